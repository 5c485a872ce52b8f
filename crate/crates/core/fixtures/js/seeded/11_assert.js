let buf = new ArrayBuffer(8);
let view = new Uint8Array(buf);
view[0] = 255;
let s = view[0] >> 1;
assertArrayEquals([view], [view]);
