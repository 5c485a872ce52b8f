function alloc(n) {
  var keep = [];
  for (var i = 0; i < n; i++) {
    keep.push({ id: i, data: new Uint8Array(16) });
  }
  return keep;
}
var held = alloc(57);
held = null;
var again = alloc(5);
print(again.length, again[4].data.byteLength);
