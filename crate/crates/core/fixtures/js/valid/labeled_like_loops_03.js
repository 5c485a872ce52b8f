var found = -1;
for (var i = 0; i < 6; i++) {
  var hit = false;
  for (var j = 0; j < i; j++) {
    if (i * j === 12) {
      hit = true;
      break;
    }
  }
  if (hit) {
    found = i;
    break;
  }
}
print(found);
