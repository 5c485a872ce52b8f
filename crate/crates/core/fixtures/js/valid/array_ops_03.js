var arr = new Array(8);
arr.fill(0);
for (var i = 0; i < arr.length; i++) {
  arr[i] = i * i;
}
arr.length = 7;
var copy = arr.slice(1);
copy.reverse();
var idx = copy.indexOf(4);
var joined = [arr.length, copy[0], idx].join("-");
print(joined, Array.isArray(copy));
