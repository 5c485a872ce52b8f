var base = { greet: function () {
  return "hi " + this.name;
} };
var child = Object.create(base);
child.name = "n45";
var desc = Object.getOwnPropertyDescriptor(child, "name");
Object.defineProperty(child, "hidden", { value: 1, enumerable: false });
print(child.greet(), desc.writable, Object.keys(child).length);
