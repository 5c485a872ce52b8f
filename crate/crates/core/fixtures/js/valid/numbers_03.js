var a = 0x5e1;
var b = 1e3;
var c = .5;
var d = 3.25e-2;
var e = 0b101;
var f = 0o17;
var g = 2 ** 7;
var h = -a + +b - -c;
print(a, b, c, d, e, f, g, h, Number.MAX_SAFE_INTEGER > a);
