var i = 0;
var log = [];
do {
  i++;
  if (i % 3 === 0) {
    continue;
  }
  log.push(i);
} while (i < 14);
while (log.length > 7) {
  log.pop();
  if (log.length === 1) break;
}
for (;;) {
  break;
}
print(log.join(","));
