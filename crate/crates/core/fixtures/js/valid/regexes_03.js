var re = /^x.*y$/i;
var text = "aab 123 xzy 4567";
var m = re.exec(text);
print(m === null ? "no match" : m[0]);
var count = text.split(/\s+/).length;
print(count / 2, re.source);
