var tests = [{name: 't', body: function () {}}];
var arr = new Float64Array(16);
arr.fill(1.5);
function g(a, n) {
  return a[n & 15];
}
var r = g(arr, 3);
testRunner.runTests(tests, {verbose: false});
