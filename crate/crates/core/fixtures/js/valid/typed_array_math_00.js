let buf = new ArrayBuffer(32);
let view = new Float64Array(buf);
let ints = new Uint32Array(buf);
for (let i = 0; i < view.length; i++) {
  view[i] = Math.floor(i * 1.5) + 0.25;
}
let acc = 0;
for (let j = 0; j < ints.length; j++) {
  acc = (acc << 1) ^ ints[j];
  acc = acc >>> 0;
}
print(acc, view[0], Math.max(view[1], 2));
