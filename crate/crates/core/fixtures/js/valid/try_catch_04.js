function thrower(n) {
  if (n > 4) {
    throw new RangeError("fail");
  }
  return n;
}
var caught = 0;
for (var i = 0; i < 10; i++) {
  try {
    thrower(i);
  } catch (e) {
    caught++;
    if (e instanceof RangeError) {
      continue;
    }
  } finally {
    caught += 0;
  }
}
print(caught);
