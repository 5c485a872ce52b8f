var helper = load("helper.js");
function opt(a) {
  if (a.length > 2) {
    a[0] = {};
  }
  return a[1];
}
var xs = [1.1, 2.2, 3.3];
opt(xs);
