var o = {a: 1, b: 2};
function f(x) {
  return x.a + x.b;
}
for (var i = 0; i < 100; i++) f(o);
print(o);
