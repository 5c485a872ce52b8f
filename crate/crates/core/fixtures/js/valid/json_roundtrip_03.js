var obj = { n: 26, list: [true, false, null], s: "x" };
var text = JSON.stringify(obj);
var back = JSON.parse(text);
print(text.length, back.list[0], back.n === obj.n);
