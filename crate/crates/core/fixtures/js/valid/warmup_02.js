function f28(a, k) {
  var sum = 0;
  for (var i = 0; i < a.length; i++) {
    sum = sum ^ a[i] ^ k;
  }
  return sum;
}
var ta = new Uint8Array(100);
for (var i = 0; i < ta.length; i++) {
  ta[i] = i * 3;
}
var r = 0;
for (var n = 0; n < 1000; n++) {
  r = f28(ta, n);
}
print(r);
