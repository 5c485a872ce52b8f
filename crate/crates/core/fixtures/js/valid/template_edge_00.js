var name = "n7";
var plain = `no substitutions here`;
var multi = `line one
line two`;
var nested = `outer ${`inner ${name}`} done`;
print(plain.length, multi.length, nested);
