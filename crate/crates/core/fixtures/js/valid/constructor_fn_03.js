function Point(x, y) {
  this.x = x;
  this.y = y;
}
Point.prototype.norm = function () {
  return Math.sqrt(this.x * this.x + this.y * this.y);
};
var pts = [];
for (var i = 0; i < 3; i++) {
  pts.push(new Point(i, i + 1));
}
var p = pts[pts.length - 1];
print(p.norm(), p instanceof Point, p.constructor.name);
