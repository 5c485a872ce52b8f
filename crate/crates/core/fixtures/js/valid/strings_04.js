var s = "xyz";
var t = 'it\'s';
var u = `template xyz`;
var v = `value ${s.length} and ${t}`;
var parts = s.split("");
var out = "";
for (var i = parts.length - 1; i >= 0; i--) {
  out += parts[i];
}
print(out, u, v, s.charCodeAt(0).toString(16), "\x41\n".length);
