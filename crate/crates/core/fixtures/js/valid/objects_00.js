var o = {
  delta: 22,
  "quoted key": 'single',
  nested: { a: [1, 2], b: null },
  method(x) {
    return this.delta + x;
  },
  get twice() {
    return this.delta * 2;
  },
  ['delta'.length]: true
};
for (var k in o) {
  print(k);
}
print(o.method(1), o.twice, o.nested.a[1]);
delete o.nested;
print(typeof o.nested, "delta" in o);
