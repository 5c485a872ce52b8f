var str = 'abc'.repeat(4);
var re = /b+/g;
var found = str.match(re);
var n = found.length;
$vm.print(n);
