var a = 0, b = 9;
var c = a > b ? a - b : b - a;
var d = (a++, b--, a + b);
var e = a ? b ? 1 : 2 : 3;
var f = a ?? b;
var g = void 0;
print(c, d, e, f, typeof g, !!a);
