function outer(a) {
  let base = a * 2;
  function inner(b) {
    const scale = 5;
    return base + b * scale;
  }
  var results = [];
  for (let i = 0; i < 3; i++) {
    results.push(inner(i));
  }
  return results;
}
var r = outer(9);
print(r[0], r[2]);
