const sq = (v) => v * v;
const add = (a, b) => {
  return a + b;
};
const xs = [1, 2, 3, 46];
let total = 0;
for (const x of xs) {
  total = add(total, sq(x));
}
const mapped = xs.map((v) => v + 7);
print(total, mapped.length);
