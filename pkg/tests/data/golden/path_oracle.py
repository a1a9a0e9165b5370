"""File-existence oracle child.

Usage: path_oracle.py ROOT

Answers 1 when the payload names a regular file under ROOT, 0
otherwise.  Payloads are absolute-looking paths ("/etc/hosts"); they
are resolved against ROOT, never against the real filesystem root.
"""

import os
import sys


def unescape(s):
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\" and i + 1 < len(s):
            nxt = s[i + 1]
            out.append({"\\": "\\", "t": "\t", "n": "\n"}.get(nxt, nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def main():
    root = sys.argv[1]
    inp = open(sys.stdin.fileno(), "r", encoding="latin-1", newline="\n")
    out = open(sys.stdout.fileno(), "w", encoding="latin-1", newline="\n")
    for line in inp:
        _query, _, payload = line.rstrip("\n").partition("\t")
        path = unescape(payload)
        # refuse traversal out of the fixture tree
        ok = (
            path.startswith("/")
            and ".." not in path.split("/")
            and os.path.isfile(os.path.join(root, path.lstrip("/")))
        )
        out.write("1\n" if ok else "0\n")
        out.flush()


if __name__ == "__main__":
    main()
