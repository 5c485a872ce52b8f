var v = 93;
v += 3;
v -= 1;
v *= 2;
v /= 4;
v %= 7;
v **= 2;
v |= 1;
v &= 0xff;
v ^= 0x0f;
var w = null;
w ??= 5;
var z = 0;
z ||= 9;
z &&= z + 1;
print(v, w, z);
