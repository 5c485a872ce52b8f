function makeCounter(start) {
  var count = start;
  return function () {
    count += 7;
    return count;
  };
}
var c = makeCounter(24);
var last;
for (var i = 0; i < 20; i++) {
  last = c();
}
print(last);
