function Point(x, y) {
  this.x = x;
  this.y = y;
}
var p = new Point(1, 2);
var q = Object.keys(p);
print(p);
