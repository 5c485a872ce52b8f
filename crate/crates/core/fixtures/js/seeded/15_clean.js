const m = new Map();
m.set('k', 1);
let total = 0;
for (const v of m.values()) total += v;
print(total);
