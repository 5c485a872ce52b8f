var o = {
  beta: 23,
  "quoted key": 'single',
  nested: { a: [1, 2], b: null },
  method(x) {
    return this.beta + x;
  },
  get twice() {
    return this.beta * 2;
  },
  ['beta'.length]: true
};
for (var k in o) {
  print(k);
}
print(o.method(1), o.twice, o.nested.a[1]);
delete o.nested;
print(typeof o.nested, "beta" in o);
