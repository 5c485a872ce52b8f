var i = 0;
var log = [];
do {
  i++;
  if (i % 3 === 0) {
    continue;
  }
  log.push(i);
} while (i < 27);
while (log.length > 13) {
  log.pop();
  if (log.length === 1) break;
}
for (;;) {
  break;
}
print(log.join(","));
