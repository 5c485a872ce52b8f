const sq = (v) => v * v;
const add = (a, b) => {
  return a + b;
};
const xs = [1, 2, 3, 27];
let total = 0;
for (const x of xs) {
  total = add(total, sq(x));
}
const mapped = xs.map((v) => v + 4);
print(total, mapped.length);
