#!/usr/bin/env python3
"""Generate the seeded-error PoC corpus used to measure repair.

Writes crates/core/fixtures/js/seeded/NN_<category>.js and manifest.tsv
(file, category, expected) where expected is one of:
  fixable  harness idiom the shipped rules know about
  other    error outside the rule set (left broken on purpose)
  clean    no error at all
"""

import os
import random

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
OUT = os.path.join(ROOT, "crates", "core", "fixtures", "js", "seeded")

rng = random.Random(77)

BODIES = [
    "var o = {a: 1, b: 2};\nfunction f(x) {\n  return x.a + x.b;\n}\nfor (var i = 0; i < 100; i++) f(o);\n",
    "var arr = new Float64Array(16);\narr.fill(1.5);\nfunction g(a, n) {\n  return a[n & 15];\n}\nvar r = g(arr, 3);\n",
    "let buf = new ArrayBuffer(8);\nlet view = new Uint8Array(buf);\nview[0] = 255;\nlet s = view[0] >> 1;\n",
    "function opt(a) {\n  if (a.length > 2) {\n    a[0] = {};\n  }\n  return a[1];\n}\nvar xs = [1.1, 2.2, 3.3];\nopt(xs);\n",
    "const m = new Map();\nm.set('k', 1);\nlet total = 0;\nfor (const v of m.values()) total += v;\n",
    "var str = 'abc'.repeat(4);\nvar re = /b+/g;\nvar found = str.match(re);\nvar n = found.length;\n",
    "function Point(x, y) {\n  this.x = x;\n  this.y = y;\n}\nvar p = new Point(1, 2);\nvar q = Object.keys(p);\n",
    "let count = 0;\nwhile (count < 10) {\n  count++;\n}\nlet done = count === 10;\n",
]

# Variable each body defines that harness calls can refer to.
BODY_VAR = ["o", "arr", "view", "xs", "total", "n", "p", "done"]

files = []


def emit(category, expected, text):
    files.append((category, expected, text))


def body():
    k = rng.randrange(len(BODIES))
    return BODIES[k], BODY_VAR[k]


def fixable():
    for call in ["$vm.haveABadTime({v})", "$vm.print({v})", "$vm.gc()", "$vm.noInline(print)", "$vm.value"]:
        b, v = body()
        emit("vm", "fixable", b + call.format(v=v) + ";\n")
    for head in ['load("./resources/standalone-pre.js");\n', 'load("harness.js");\n', "load('../shared.js');\n",
                 'var helper = load("helper.js");\n']:
        b, v = body()
        emit("load", "fixable", head + b)
    b, v = body()
    emit("load", "fixable", 'var h = load("h.js");\n' + b + "h;\n")
    for pre in ["export ", "export default ", "export "]:
        b, v = body()
        emit("export", "fixable", b + pre + "function exported() {\n  return 1;\n}\n")
    for tmpl in ["assertEquals({v}, {v});", "assertTrue({v} !== undefined);", "assertEq(typeof {v}, 'object');",
                 "assertThrows(() => {{ throw 1; }}, Error);", "assertArrayEquals([{v}], [{v}]);", "assertSame({v}, {v});"]:
        b, v = body()
        emit("assert", "fixable", b + tmpl.format(v=v) + "\n")
    for _ in range(3):
        b, v = body()
        emit("libdir", "fixable", 'load(libdir + "asserts.js");\n' + b)
    for line in ["wasmEvalText('(module)');\n", "var ok = wasmIsSupported();\n"]:
        b, v = body()
        emit("wasm", "fixable", b + line)
    for _ in range(2):
        b, v = body()
        emit("appendToActual", "fixable", b + "appendToActual(" + v + ");\n")
    for line in ["testRunner.runTests(tests);\n", "testRunner.runTests(tests, {verbose: false});\n",
                 "testRunner.run(tests);\n"]:
        b, v = body()
        emit("testRunner", "fixable", "var tests = [{name: 't', body: function () {}}];\n" + b + line)
    for _ in range(2):
        b, v = body()
        emit("telemetryLog", "fixable", b + "telemetryLog('" + v + "=' + " + v + ", true);\n")
    for line in ['__loadScript("test_assert.js");\n', "__loadScript('lib.js');\n", '__loadScript("a.js");\n']:
        b, v = body()
        emit("loadScript", "fixable", line + b)
    b, v = body()
    emit("mixed", "fixable", 'load("harness.js");\n' + b + "$vm.print(" + v + ");\nexport function e() {}\n")
    b, v = body()
    emit("mixed", "fixable", 'load(libdir + "asserts.js");\n' + b + "assertEq(" + v + ", " + v + ");\n")


def other():
    b, v = body()
    emit("other", "other", b + "WScript.Echo(" + v + ");\n")
    b, v = body()
    emit("other", "other", b + "drainJobQueue();\n")
    b, v = body()
    emit("other", "other", b + "switch (1) {\n  case 1:\n    break;\n}\n")
    b, v = body()
    emit("other", "other", "class A {}\n" + b)
    b, v = body()
    emit("other", "other", "function k() {}\n%OptimizeFunctionOnNextCall(k);\n" + b)
    b, v = body()
    emit("other", "other", b + "async function w() {}\n")


def clean():
    for k in range(8):
        emit("clean", "clean", BODIES[k] + "print(" + BODY_VAR[k] + ");\n")


def main():
    fixable()
    other()
    clean()
    assert len(files) == 50, len(files)
    rng.shuffle(files)
    os.makedirs(OUT, exist_ok=True)
    for f in os.listdir(OUT):
        os.remove(os.path.join(OUT, f))
    with open(os.path.join(OUT, "manifest.tsv"), "w") as m:
        for i, (category, expected, text) in enumerate(files):
            name = "%02d_%s.js" % (i, category)
            with open(os.path.join(OUT, name), "w") as f:
                f.write(text)
            m.write("%s\t%s\t%s\n" % (name, category, expected))
    counts = {}
    for _, e, _ in files:
        counts[e] = counts.get(e, 0) + 1
    print(counts)


if __name__ == "__main__":
    main()
