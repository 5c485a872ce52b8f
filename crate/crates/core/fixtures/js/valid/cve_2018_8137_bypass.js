function opt(arr, start, end) {
  for (let i = start; i < end; i++) {
    if (i === 10) {
      i += 0;
      start++;
    }
    arr[i] = 2.3023e-320;
  }
}
function main() {
  let arr = new Float64Array(100);
  arr.fill(1.1);
  for (let i = 0; i < 1000; i++) {
    opt(arr, 0, 3);
  }
  opt(arr, 0, 100000);
}
main();
