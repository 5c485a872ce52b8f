var x = 130;
var y = x & 0xff;
var z = ~y | (x >> 2);
z ^= 0x1234;
z <<= 1;
z >>>= 3;
var w = -z % 7;
if (z > 0 && w !== 0 || !y) {
  print(z, w);
} else {
  print("none");
}
