#!/usr/bin/env python3
"""Generate the valid-JS fixture corpus under crates/core/fixtures/js/valid.

Every file is checked with `node --check` and executed once under node with a
`print` shim; files that fail either step abort generation.
"""

import os
import random
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
OUT = os.path.join(ROOT, "crates", "core", "fixtures", "js", "valid")

CVE_0777 = """\
function opt(arr, start, end) {
  for (let i = start; i < end; i++) {
    if (i === 10) {
      i += 0;
    }
    arr[i] = 2.3023e-320;
  }
}
function main() {
  let arr = new Float64Array(100);
  arr.fill(1.1);
  for (let i = 0; i < 1000; i++) {
    opt(arr, 0, 3);
  }
  opt(arr, 0, 100000);
  print(arr.length);
}
main();
"""

# Follow-up variants: an extra loop layer and a dead-code guard.
CVE_8137 = """\
function opt(arr, start, end) {
  for (let i = start; i < end; i++) {
    if (i === 10) {
      for (let j = 0; j < 0; j++) {}
      i += 0;
    }
    arr[i] = 2.3023e-320;
  }
}
function main() {
  let arr = new Float64Array(100);
  arr.fill(1.1);
  for (let i = 0; i < 1000; i++) {
    opt(arr, 0, 3);
  }
  opt(arr, 0, 100000);
}
main();
"""

CVE_BYPASS = """\
function opt(arr, start, end) {
  for (let i = start; i < end; i++) {
    if (i === 10) {
      i += 0;
      start++;
    }
    arr[i] = 2.3023e-320;
  }
}
function main() {
  let arr = new Float64Array(100);
  arr.fill(1.1);
  for (let i = 0; i < 1000; i++) {
    opt(arr, 0, 3);
  }
  opt(arr, 0, 100000);
}
main();
"""


def warmup(r):
    name = f"f{r.randint(0, 99)}"
    n = r.choice([100, 1000, 10000, 0x1000])
    ta = r.choice(["Float64Array", "Int32Array", "Uint8Array", "Float32Array", "Uint32Array"])
    size = r.choice([8, 16, 64, 100])
    op = r.choice(["+", "|", "^", "&", "*"])
    return f"""\
function {name}(a, k) {{
  var sum = 0;
  for (var i = 0; i < a.length; i++) {{
    sum = sum {op} a[i] {op} k;
  }}
  return sum;
}}
var ta = new {ta}({size});
for (var i = 0; i < ta.length; i++) {{
  ta[i] = i * 3;
}}
var r = 0;
for (var n = 0; n < {n}; n++) {{
  r = {name}(ta, n);
}}
print(r);
"""


def typed_array_math(r):
    fn = r.choice(["Math.floor", "Math.abs", "Math.sqrt", "Math.round", "Math.ceil"])
    ta = r.choice(["Float64Array", "Float32Array"])
    shift = r.choice([1, 2, 3, 4])
    return f"""\
let buf = new ArrayBuffer({8 * r.choice([4, 8, 16])});
let view = new {ta}(buf);
let ints = new Uint32Array(buf);
for (let i = 0; i < view.length; i++) {{
  view[i] = {fn}(i * 1.5) + 0.25;
}}
let acc = 0;
for (let j = 0; j < ints.length; j++) {{
  acc = (acc << {shift}) ^ ints[j];
  acc = acc >>> 0;
}}
print(acc, view[0], Math.max(view[1], 2));
"""


def bit_ops(r):
    mask = r.choice(["0xff", "0xffff", "0x7fffffff", "0x80000000"])
    return f"""\
var x = {r.randint(1, 1000)};
var y = x & {mask};
var z = ~y | (x >> 2);
z ^= 0x1234;
z <<= 1;
z >>>= 3;
var w = -z % 7;
if (z > 0 && w !== 0 || !y) {{
  print(z, w);
}} else {{
  print("none");
}}
"""


def closures(r):
    k = r.randint(2, 9)
    return f"""\
function makeCounter(start) {{
  var count = start;
  return function () {{
    count += {k};
    return count;
  }};
}}
var c = makeCounter({r.randint(0, 50)});
var last;
for (var i = 0; i < {r.randint(3, 20)}; i++) {{
  last = c();
}}
print(last);
"""


def arrows(r):
    return f"""\
const sq = (v) => v * v;
const add = (a, b) => {{
  return a + b;
}};
const xs = [1, 2, 3, {r.randint(4, 99)}];
let total = 0;
for (const x of xs) {{
  total = add(total, sq(x));
}}
const mapped = xs.map((v) => v + {r.randint(1, 9)});
print(total, mapped.length);
"""


def objects(r):
    key = r.choice(["alpha", "beta", "gamma", "delta"])
    return f"""\
var o = {{
  {key}: {r.randint(0, 100)},
  "quoted key": 'single',
  nested: {{ a: [1, 2], b: null }},
  method(x) {{
    return this.{key} + x;
  }},
  get twice() {{
    return this.{key} * 2;
  }},
  [{key!r}.length]: true
}};
for (var k in o) {{
  print(k);
}}
print(o.method(1), o.twice, o.nested.a[1]);
delete o.nested;
print(typeof o.nested, "{key}" in o);
"""


def try_catch(r):
    msg = r.choice(["boom", "fail", "oops"])
    return f"""\
function thrower(n) {{
  if (n > {r.randint(1, 5)}) {{
    throw new RangeError("{msg}");
  }}
  return n;
}}
var caught = 0;
for (var i = 0; i < 10; i++) {{
  try {{
    thrower(i);
  }} catch (e) {{
    caught++;
    if (e instanceof RangeError) {{
      continue;
    }}
  }} finally {{
    caught += 0;
  }}
}}
print(caught);
"""


def loops(r):
    lim = r.randint(5, 50)
    return f"""\
var i = 0;
var log = [];
do {{
  i++;
  if (i % 3 === 0) {{
    continue;
  }}
  log.push(i);
}} while (i < {lim});
while (log.length > {lim // 2}) {{
  log.pop();
  if (log.length === 1) break;
}}
for (;;) {{
  break;
}}
print(log.join(","));
"""


def strings(r):
    word = r.choice(["abc", "hello", "xyz", "Patch"])
    return f"""\
var s = "{word}";
var t = 'it\\'s';
var u = `template {word}`;
var v = `value ${{s.length}} and ${{t}}`;
var parts = s.split("");
var out = "";
for (var i = parts.length - 1; i >= 0; i--) {{
  out += parts[i];
}}
print(out, u, v, s.charCodeAt(0).toString(16), "\\x41\\n".length);
"""


def regexes(r):
    pat = r.choice(["/a+b/g", "/[0-9]+/", "/^x.*y$/i", "/\\d{2,3}/"])
    return f"""\
var re = {pat};
var text = "aab 123 xzy 4567";
var m = re.exec(text);
print(m === null ? "no match" : m[0]);
var count = text.split(/\\s+/).length;
print(count / 2, re.source);
"""


def ternary_seq(r):
    return f"""\
var a = {r.randint(0, 9)}, b = {r.randint(0, 9)};
var c = a > b ? a - b : b - a;
var d = (a++, b--, a + b);
var e = a ? b ? 1 : 2 : 3;
var f = a ?? b;
var g = void 0;
print(c, d, e, f, typeof g, !!a);
"""


def array_ops(r):
    n = r.randint(3, 12)
    return f"""\
var arr = new Array({n});
arr.fill(0);
for (var i = 0; i < arr.length; i++) {{
  arr[i] = i * i;
}}
arr.length = {n - 1};
var copy = arr.slice(1);
copy.reverse();
var idx = copy.indexOf(4);
var joined = [arr.length, copy[0], idx].join("-");
print(joined, Array.isArray(copy));
"""


def recursion(r):
    n = r.randint(5, 15)
    return f"""\
function fib(n) {{
  if (n < 2) return n;
  return fib(n - 1) + fib(n - 2);
}}
function fact(n) {{
  return n <= 1 ? 1 : n * fact(n - 1);
}}
var results = [];
for (let k = 0; k < {n}; k++) {{
  results.push(fib(k) + fact(k % 6));
}}
print(results[results.length - 1]);
"""


def constructor_fn(r):
    return f"""\
function Point(x, y) {{
  this.x = x;
  this.y = y;
}}
Point.prototype.norm = function () {{
  return Math.sqrt(this.x * this.x + this.y * this.y);
}};
var pts = [];
for (var i = 0; i < {r.randint(2, 8)}; i++) {{
  pts.push(new Point(i, i + 1));
}}
var p = pts[pts.length - 1];
print(p.norm(), p instanceof Point, p.constructor.name);
"""


def gc_pressure(r):
    return f"""\
function alloc(n) {{
  var keep = [];
  for (var i = 0; i < n; i++) {{
    keep.push({{ id: i, data: new Uint8Array(16) }});
  }}
  return keep;
}}
var held = alloc({r.randint(10, 200)});
held = null;
var again = alloc(5);
print(again.length, again[4].data.byteLength);
"""


def dataview(r):
    return f"""\
var ab = new ArrayBuffer(16);
var dv = new DataView(ab);
dv.setInt32(0, {r.randint(0, 100000)});
dv.setFloat64(8, Math.PI);
var i8 = new Int8Array(ab);
var acc = 0;
for (var i = 0; i < i8.length; i++) {{
  acc += i8[i] & 0x0f;
}}
print(dv.getInt32(0), acc);
"""


def map_set(r):
    return f"""\
let m = new Map();
let s = new Set();
for (let i = 0; i < {r.randint(4, 20)}; i++) {{
  m.set(i, i * 2);
  s.add(i % 3);
}}
let keys = 0;
for (const k of m.keys()) {{
  keys += k;
}}
print(keys, s.size, m.get(2));
"""


def switchless_dispatch(r):
    return f"""\
var handlers = {{
  add: function (a, b) {{
    return a + b;
  }},
  mul: function (a, b) {{
    return a * b;
  }}
}};
function dispatch(op, a, b) {{
  var h = handlers[op];
  if (typeof h !== "function") {{
    return -1;
  }}
  return h(a, b);
}}
print(dispatch("add", {r.randint(1, 9)}, 2), dispatch("mul", 3, 4), dispatch("nope", 0, 0));
"""


def json_roundtrip(r):
    return f"""\
var obj = {{ n: {r.randint(0, 99)}, list: [true, false, null], s: "x" }};
var text = JSON.stringify(obj);
var back = JSON.parse(text);
print(text.length, back.list[0], back.n === obj.n);
"""


def nested_functions(r):
    return f"""\
function outer(a) {{
  let base = a * 2;
  function inner(b) {{
    const scale = {r.randint(2, 9)};
    return base + b * scale;
  }}
  var results = [];
  for (let i = 0; i < 3; i++) {{
    results.push(inner(i));
  }}
  return results;
}}
var r = outer({r.randint(1, 9)});
print(r[0], r[2]);
"""


def numbers(r):
    return f"""\
var a = 0x{r.randint(16, 4095):x};
var b = 1e3;
var c = .5;
var d = 3.25e-2;
var e = 0b101;
var f = 0o17;
var g = 2 ** {r.randint(2, 10)};
var h = -a + +b - -c;
print(a, b, c, d, e, f, g, h, Number.MAX_SAFE_INTEGER > a);
"""


def labeled_like_loops(r):
    return f"""\
var found = -1;
for (var i = 0; i < {r.randint(5, 20)}; i++) {{
  var hit = false;
  for (var j = 0; j < i; j++) {{
    if (i * j === 12) {{
      hit = true;
      break;
    }}
  }}
  if (hit) {{
    found = i;
    break;
  }}
}}
print(found);
"""


def proto_chain(r):
    return f"""\
var base = {{ greet: function () {{
  return "hi " + this.name;
}} }};
var child = Object.create(base);
child.name = "n{r.randint(0, 99)}";
var desc = Object.getOwnPropertyDescriptor(child, "name");
Object.defineProperty(child, "hidden", {{ value: 1, enumerable: false }});
print(child.greet(), desc.writable, Object.keys(child).length);
"""


def compound_assign(r):
    return f"""\
var v = {r.randint(1, 100)};
v += 3;
v -= 1;
v *= 2;
v /= 4;
v %= 7;
v **= 2;
v |= 1;
v &= 0xff;
v ^= 0x0f;
var w = null;
w ??= 5;
var z = 0;
z ||= 9;
z &&= z + 1;
print(v, w, z);
"""


def math_heavy(r):
    return f"""\
function hypot3(a, b, c) {{
  return Math.sqrt(a * a + b * b + c * c);
}}
var vals = [];
for (var i = 1; i <= {r.randint(5, 30)}; i++) {{
  vals.push(hypot3(i, Math.sin(i), Math.cos(i)));
}}
var mx = -Infinity;
for (var k = 0; k < vals.length; k++) {{
  if (vals[k] > mx) mx = vals[k];
}}
print(Math.floor(mx), isNaN(mx), Math.min(1, 2, 3));
"""


def template_edge(r):
    return f"""\
var name = "n{r.randint(0, 9)}";
var plain = `no substitutions here`;
var multi = `line one
line two`;
var nested = `outer ${{`inner ${{name}}`}} done`;
print(plain.length, multi.length, nested);
"""


FAMILIES = [
    warmup, typed_array_math, bit_ops, closures, arrows, objects, try_catch, loops, strings,
    regexes, ternary_seq, array_ops, recursion, constructor_fn, gc_pressure, dataview, map_set,
    switchless_dispatch, json_roundtrip, nested_functions, numbers, labeled_like_loops,
    proto_chain, compound_assign, math_heavy, template_edge,
]

PRELUDE = "globalThis.print = (...a) => console.log(...a);\n"


def check(path):
    ok = subprocess.run(["node", "--check", path], capture_output=True)
    if ok.returncode != 0:
        sys.exit(f"node --check failed for {path}: {ok.stderr.decode()}")
    with open(path) as f:
        src = f.read()
    with tempfile.NamedTemporaryFile("w", suffix=".js", delete=False) as tmp:
        tmp.write(PRELUDE + src)
    try:
        run = subprocess.run(["node", tmp.name], capture_output=True, timeout=20)
    finally:
        os.unlink(tmp.name)
    if run.returncode != 0:
        sys.exit(f"node run failed for {path}: {run.stderr.decode()}")


def main():
    rng = random.Random(20180777)
    os.makedirs(OUT, exist_ok=True)
    for old in os.listdir(OUT):
        os.unlink(os.path.join(OUT, old))
    files = [
        ("cve_2018_0777.js", CVE_0777),
        ("cve_2018_8137.js", CVE_8137),
        ("cve_2018_8137_bypass.js", CVE_BYPASS),
    ]
    rounds = 0
    while len(files) < 120:
        for fam in FAMILIES:
            if len(files) >= 120:
                break
            files.append((f"{fam.__name__}_{rounds:02}.js", fam(rng)))
        rounds += 1
    for name, text in files:
        path = os.path.join(OUT, name)
        with open(path, "w") as f:
            f.write(text)
        check(path)
    print(f"wrote {len(files)} files to {OUT}")


if __name__ == "__main__":
    main()
