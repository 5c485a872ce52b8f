let m = new Map();
let s = new Set();
for (let i = 0; i < 4; i++) {
  m.set(i, i * 2);
  s.add(i % 3);
}
let keys = 0;
for (const k of m.keys()) {
  keys += k;
}
print(keys, s.size, m.get(2));
