function makeCounter(start) {
  var count = start;
  return function () {
    count += 3;
    return count;
  };
}
var c = makeCounter(43);
var last;
for (var i = 0; i < 17; i++) {
  last = c();
}
print(last);
