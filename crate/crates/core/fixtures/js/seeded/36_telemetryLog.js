let count = 0;
while (count < 10) {
  count++;
}
let done = count === 10;
telemetryLog('done=' + done, true);
