#!/usr/bin/env python3
"""Generate the hot-file census fixture.

Writes crates/core/fixtures/census/qjs_files.txt (30 source files) and
qjs_security.jsonl (security patches in commit-stream format). 11 of the 30
files are touched, 371 times in total. Test files are touched too but are
not part of the census and must not count.
"""

import json
import os
import random

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
OUT = os.path.join(ROOT, "crates", "core", "fixtures", "census")

FILES = [
    "quickjs.c", "quickjs.h", "quickjs-libc.c", "quickjs-libc.h", "quickjs-atom.h",
    "quickjs-opcode.h", "libregexp.c", "libregexp.h", "libregexp-opcode.h", "libunicode.c",
    "libunicode.h", "libunicode-table.h", "cutils.c", "cutils.h", "list.h",
    "libbf.c", "libbf.h", "qjs.c", "qjsc.c", "unicode_gen.c",
    "unicode_gen_def.h", "run-test262.c", "dtoa.c", "dtoa.h", "xsum.c",
    "xsum.h", "fuzz_common.c", "fuzz_eval.c", "fuzz_compile.c", "fuzz_regexp.c",
]

TOUCHES = {
    "quickjs.c": 300,
    "libregexp.c": 20,
    "quickjs-libc.c": 15,
    "libunicode.c": 9,
    "libbf.c": 8,
    "cutils.c": 6,
    "quickjs.h": 4,
    "quickjs-opcode.h": 3,
    "quickjs-atom.h": 3,
    "libregexp.h": 2,
    "qjs.c": 1,
}

rng = random.Random(371)


def main():
    assert len(FILES) == 30 and len(TOUCHES) == 11 and sum(TOUCHES.values()) == 371
    commits = [[] for _ in range(300)]
    for i in range(300):
        commits[i].append("quickjs.c")
    for path, n in TOUCHES.items():
        if path == "quickjs.c":
            continue
        for _ in range(n):
            # Half join an existing commit (never twice the same file), half stand alone.
            if rng.random() < 0.5:
                for _ in range(50):
                    c = rng.choice(commits)
                    if path not in c:
                        c.append(path)
                        break
                else:
                    commits.append([path])
            else:
                commits.append([path])
    for c in rng.sample(commits, 25):
        c.append("tests/test_builtin.js")
    rng.shuffle(commits)
    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "qjs_files.txt"), "w") as f:
        f.write("".join(p + "\n" for p in FILES))
    with open(os.path.join(OUT, "qjs_security.jsonl"), "w") as f:
        f.write("# Security patches for the census fixture; hunks omitted.\n")
        for i, paths in enumerate(commits):
            rec = {
                "id": "%040x" % (0x5eed0000 + i),
                "ts": 1577836800 + i * 86400,
                "msg": "Fix security issue %d" % i,
                "files": [{"path": p, "kind": "modified"} for p in paths],
            }
            f.write(json.dumps(rec) + "\n")
    counted = sum(1 for c in commits for p in c if p in TOUCHES)
    print(len(commits), "commits,", counted, "census touches")


if __name__ == "__main__":
    main()
