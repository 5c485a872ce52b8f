#!/usr/bin/env python3
"""Generate the labeled commit-stream fixture.

Writes under crates/core/fixtures/:
  commits.jsonl        60 commit records (30 security, 30 not)
  issues.jsonl         issue sidecar referenced by the commits
  commit_labels.tsv    id<TAB>security|benign, plus a note column
"""

import json
import os
import random

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
OUT = os.path.join(ROOT, "crates", "core", "fixtures")

rng = random.Random(4242)
commits = []
labels = []
issues = {}


def commit_id():
    return "%040x" % rng.getrandbits(160)


def hunk(path, added, removed=(), context=("  // ...",), start=100):
    lines = [[" ", c] for c in context]
    lines += [["-", r] for r in removed]
    lines += [["+", a] for a in added]
    old_n = len(context) + len(removed)
    new_n = len(context) + len(added)
    return {"path": path, "old": [start, old_n], "new": [start, new_n], "lines": lines}


def new_file(path, text):
    body = text.rstrip("\n").split("\n")
    return {"path": path, "old": [0, 0], "new": [1, len(body)], "lines": [["+", l] for l in body]}


def add(label, note, msg, files, hunks):
    cid = commit_id()
    commits.append({"id": cid, "ts": 1500000000 + len(commits) * 86400, "msg": msg, "files": files, "hunks": hunks})
    labels.append((cid, label, note))


def issue(num, security, title):
    issues[num] = {"issue_id": num, "security": security, "title": title}


GUARDS = [
    "if (index >= length) return false;",
    "if (!array->hasBuffer()) return nullptr;",
    "while (cursor < end && *cursor != '\\0') ++cursor;",
    "if (size > kMaxLength || size < 0) ThrowRangeError();",
    "return isValid ? value : 0;",
    "if (UNLIKELY(offset + count > byteLength)) return false;",
    "switch (kind) {",
    "if (!obj->isNative()) break;",
]
PLAIN = [
    "auto result = computeHash(key);",
    "m_count = 0;",
    "value = value * 2 + 1;",
    "registerBuiltin(\"from\", fromImpl);",
    "Vector<JSValue> args;",
    "args.append(jsNumber(i));",
    "emitLoad(dst, src);",
    "ASSERT(m_state == Idle);",
    "log(\"entering slow path\");",
    "size_t total = lhs + rhs;",
]

CRASH_TESTS = [
    "// crashes with OOB write before the fix\nvar ta = new Float64Array(16);\nfunction opt(a, n) {\n  for (var i = 0; i < n; i++) a[i] = 1.1;\n}\nfor (var j = 0; j < 10000; j++) opt(ta, 16);\nopt(ta, 0x10000);\n",
    "// ASAN: heap-use-after-free\nvar buf = new ArrayBuffer(64);\nvar view = new Uint8Array(buf);\nfunction f() { return view[0]; }\nfor (var i = 0; i < 1e4; i++) f();\n",
    "// Used to segfault in the JIT.\nfunction g(o) { return o.x; }\nfor (var i = 0; i < 100000; i++) g({x: i});\ng(1);\n",
    "// type confusion leads to crash\nvar arr = [1.1, 2.2];\nfunction h(a) { a[0] = {}; return a[1]; }\nfor (var i = 0; i < 20000; i++) h(arr);\n",
]
SPARSE_TESTS = [
    "var a = new Int32Array(8);\nfunction k(x) { return a[x & 7]; }\nfor (var i = 0; i < 50000; i++) k(i);\nassertEquals(k(3), 0);\n",
    "function f(x) { return x | 0; }\nfor (let i = 0; i < 1e5; i++) f(i);\nprint(f(-1));\n",
]


def dense_test(n):
    return "".join(f"assertEquals({i * 3}, triple({i}));\n" for i in range(n))


def cpp_hunk(path, n_guard, n_plain, start=200):
    added = rng.sample(GUARDS, n_guard) + rng.sample(PLAIN, n_plain)
    rng.shuffle(added)
    return hunk(path, added, removed=[rng.choice(PLAIN)], start=start)


def security():
    # Security-flagged bug reference, neutral wording.
    for k in range(8):
        num = 1000 + k
        issue(num, True, f"Restricted: JIT issue {num}")
        path = rng.choice(["src/jit/BoundsCheck.cpp", "src/runtime/TypedArray.cpp", "src/parser/Lexer.cpp"])
        msg = rng.choice(["Harden bounds handling in {}. bug={}", "Tighten range analysis ({})\n\nBug: {}",
                          "Handle edge case in {}\n\nhttps://bugs.example.org/show_bug.cgi?id={}"])
        msg = msg.format(os.path.basename(path), num)
        add("security", "flagged issue", msg, [{"path": path, "kind": "modified"}], [cpp_hunk(path, 1, 3)])
    # Keywords in the message.
    for k, msg in enumerate([
        "Fix heap buffer overflow in Array.prototype.fill",
        "Prevent use-after-free of detached ArrayBuffer",
        "Fix type confusion in polymorphic inline cache",
        "Fix integer overflow when computing string length",
        "Avoid out-of-bounds read in RegExp backtracking",
        "Merge fix for CVE-2018-0777 into release branch",
        "JIT: fix crash in bounds check elimination",
        "Fix OOB write in DataView setters",
    ]):
        path = "src/runtime/Obj%d.cpp" % k
        add("security", "message keyword", msg, [{"path": path, "kind": "modified"}], [cpp_hunk(path, 1, 4)])
    # Silent fixes: many new guards plus a crash-style regression test.
    for k in range(6):
        path = "src/jit/Opt%d.cpp" % k
        test = "JSTests/stress/regress-%d.js" % (7000 + k)
        msg = rng.choice(["Check bounds before folding", "Guard induction variable update",
                          "Validate length before copy", "Reject unexpected shape in fast path"])
        add("security", "guards + crash test", msg,
            [{"path": path, "kind": "modified"}, {"path": test, "kind": "added"}],
            [cpp_hunk(path, 3, 2), new_file(test, CRASH_TESTS[k % len(CRASH_TESTS)])])
    # Keyword only in an added code comment.
    for k, note in enumerate(["// Prevents integer overflow on 32-bit builds.",
                              "/* Avoid use-after-free when the callback detaches. */",
                              "// Fixes an oob access for holey arrays."]):
        path = "src/runtime/Fix%d.cpp" % k
        h = hunk(path, [note, rng.choice(GUARDS), rng.choice(PLAIN)], removed=[rng.choice(PLAIN)])
        add("security", "comment keyword", "Adjust length computation", [{"path": path, "kind": "modified"}], [h])
    # Unknown issue plus guard-heavy change and a sparse test.
    for k in range(3):
        num = 5000 + k
        path = "src/wasm/Validate%d.cpp" % k
        test = "test/mjsunit/regress/regress-%d.js" % num
        add("security", "unknown issue + weak signals", "Validate table index (#%d)" % num,
            [{"path": path, "kind": "modified"}, {"path": test, "kind": "added"}],
            [cpp_hunk(path, 2, 2), new_file(test, SPARSE_TESTS[k % 2])])
    # Adversarial misses: silent fix with a functional-style test and few guards.
    for k in range(2):
        path = "src/builtins/Sort%d.cpp" % k
        test = "test/builtins/sort-%d.js" % k
        add("security", "adversarial: silent fix", "Refine comparator handling",
            [{"path": path, "kind": "modified"}, {"path": test, "kind": "added"}],
            [cpp_hunk(path, 0, 6), new_file(test, dense_test(12))])


def benign():
    plain_msgs = [
        "Update README", "Refactor bytecode emitter", "Rename internal helpers", "Add Intl.Segmenter stub",
        "Bump version to 7.2", "Clean up build warnings", "Improve GC logging", "Move tests into subfolder",
        "Document shell flags", "Speed up string concatenation",
    ]
    for k, msg in enumerate(plain_msgs):
        path = "src/misc/File%d.cpp" % k
        add("benign", "plain", msg, [{"path": path, "kind": "modified"}], [cpp_hunk(path, 0, 5)])
    # References to known non-security issues.
    for k in range(4):
        num = 2000 + k
        issue(num, False, "Feature request %d" % num)
        path = "src/api/Api%d.cpp" % k
        add("benign", "non-security issue", "Implement option parsing. bug=%d" % num,
            [{"path": path, "kind": "modified"}], [cpp_hunk(path, 1, 5)])
    # Feature work with dense functional tests.
    for k in range(3):
        path = "src/builtins/Array%d.cpp" % k
        test = "test/builtins/array-%d.js" % k
        add("benign", "feature + dense test", "Implement Array.prototype.findLast variant %d" % k,
            [{"path": path, "kind": "modified"}, {"path": test, "kind": "added"}],
            [cpp_hunk(path, 1, 4), new_file(test, dense_test(15))])
    # Keywords only inside string literals of code.
    for k, lit in enumerate(['throwError("buffer overflow in user script");',
                             'reportWarning("possible crash in extension");',
                             'const char* kMsg = "security policy violated";']):
        path = "src/diag/Messages%d.cpp" % k
        add("benign", "adversarial: keyword in string", "Improve diagnostic messages",
            [{"path": path, "kind": "modified"}], [hunk(path, [lit, rng.choice(PLAIN)])])
    # Near-miss words that must not match on word boundaries.
    for k, msg in enumerate(["Add crashpad uploader configuration", "Rework oobe setup screen",
                             "Overflowing menu layout tweaks"]):
        path = "src/shell/Shell%d.cpp" % k
        add("benign", "adversarial: near-miss word", msg, [{"path": path, "kind": "modified"}], [cpp_hunk(path, 0, 4)])
    # Unknown issue references with otherwise weak signals.
    for k in range(3):
        path = "src/tools/Tool%d.cpp" % k
        add("benign", "unknown issue, weak signals", "Follow-up cleanup for #%d" % (9000 + k),
            [{"path": path, "kind": "modified"}], [cpp_hunk(path, 0, 4)])
    # Sparse new tests, few guards.
    for k in range(2):
        test = "test/perf/loop-%d.js" % k
        add("benign", "sparse perf test", "Add loop microbenchmark %d" % k,
            [{"path": test, "kind": "added"}], [new_file(test, SPARSE_TESTS[k])])
    # Adversarial false alarms.
    path = "src/shell/Reporter.cpp"
    add("benign", "adversarial: keyword in benign message", "Add crash reporter opt-out flag",
        [{"path": path, "kind": "modified"}], [cpp_hunk(path, 0, 4)])
    path = "src/parser/Parser.cpp"
    test = "test/parser/empty-input.js"
    add("benign", "adversarial: functional crash fix", "Handle empty input in parser",
        [{"path": path, "kind": "modified"}, {"path": test, "kind": "added"}],
        [cpp_hunk(path, 3, 1), new_file(test, "// Used to crash on empty input (null deref, not exploitable).\neval('');\n")])


def main():
    security()
    benign()
    order = list(range(len(commits)))
    rng.shuffle(order)
    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "commits.jsonl"), "w") as f:
        f.write("# Labeled commit stream; labels live in commit_labels.tsv.\n")
        for i in order:
            f.write(json.dumps(commits[i]) + "\n")
    with open(os.path.join(OUT, "commit_labels.tsv"), "w") as f:
        for i in order:
            cid, label, note = labels[i]
            f.write(f"{cid}\t{label}\t{note}\n")
    with open(os.path.join(OUT, "issues.jsonl"), "w") as f:
        for num in sorted(issues):
            f.write(json.dumps(issues[num]) + "\n")
    n_sec = sum(1 for _, l, _ in labels if l == "security")
    print(f"{len(commits)} commits ({n_sec} security), {len(issues)} issues")


if __name__ == "__main__":
    main()
