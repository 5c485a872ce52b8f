function makeCounter(start) {
  var count = start;
  return function () {
    count += 2;
    return count;
  };
}
var c = makeCounter(1);
var last;
for (var i = 0; i < 17; i++) {
  last = c();
}
print(last);
