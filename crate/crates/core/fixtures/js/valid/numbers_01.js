var a = 0xf21;
var b = 1e3;
var c = .5;
var d = 3.25e-2;
var e = 0b101;
var f = 0o17;
var g = 2 ** 3;
var h = -a + +b - -c;
print(a, b, c, d, e, f, g, h, Number.MAX_SAFE_INTEGER > a);
