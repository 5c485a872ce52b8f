function hypot3(a, b, c) {
  return Math.sqrt(a * a + b * b + c * c);
}
var vals = [];
for (var i = 1; i <= 29; i++) {
  vals.push(hypot3(i, Math.sin(i), Math.cos(i)));
}
var mx = -Infinity;
for (var k = 0; k < vals.length; k++) {
  if (vals[k] > mx) mx = vals[k];
}
print(Math.floor(mx), isNaN(mx), Math.min(1, 2, 3));
