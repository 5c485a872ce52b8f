function fib(n) {
  if (n < 2) return n;
  return fib(n - 1) + fib(n - 2);
}
function fact(n) {
  return n <= 1 ? 1 : n * fact(n - 1);
}
var results = [];
for (let k = 0; k < 15; k++) {
  results.push(fib(k) + fact(k % 6));
}
print(results[results.length - 1]);
