var handlers = {
  add: function (a, b) {
    return a + b;
  },
  mul: function (a, b) {
    return a * b;
  }
};
function dispatch(op, a, b) {
  var h = handlers[op];
  if (typeof h !== "function") {
    return -1;
  }
  return h(a, b);
}
print(dispatch("add", 9, 2), dispatch("mul", 3, 4), dispatch("nope", 0, 0));
