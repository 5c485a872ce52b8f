function makeCounter(start) {
  var count = start;
  return function () {
    count += 9;
    return count;
  };
}
var c = makeCounter(5);
var last;
for (var i = 0; i < 6; i++) {
  last = c();
}
print(last);
