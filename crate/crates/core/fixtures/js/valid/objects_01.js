var o = {
  alpha: 60,
  "quoted key": 'single',
  nested: { a: [1, 2], b: null },
  method(x) {
    return this.alpha + x;
  },
  get twice() {
    return this.alpha * 2;
  },
  ['alpha'.length]: true
};
for (var k in o) {
  print(k);
}
print(o.method(1), o.twice, o.nested.a[1]);
delete o.nested;
print(typeof o.nested, "alpha" in o);
