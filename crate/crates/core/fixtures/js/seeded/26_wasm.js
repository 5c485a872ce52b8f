let count = 0;
while (count < 10) {
  count++;
}
let done = count === 10;
var ok = wasmIsSupported();
