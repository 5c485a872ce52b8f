var ab = new ArrayBuffer(16);
var dv = new DataView(ab);
dv.setInt32(0, 2506);
dv.setFloat64(8, Math.PI);
var i8 = new Int8Array(ab);
var acc = 0;
for (var i = 0; i < i8.length; i++) {
  acc += i8[i] & 0x0f;
}
print(dv.getInt32(0), acc);
