#!/usr/bin/env python3
"""Write a CommitDump JSON for a git repository.

    python3 scripts/git_dump.py /path/to/repo > dump.json
    verstore ingest --dump dump.json --out repo.el

Commit size is the total byte size of the blobs in the commit's tree
(`git ls-tree -r -l`). The delta from commit A to commit B is the byte length
of `git diff --binary --no-color --no-ext-diff A B`, computed for both
directions of every parent/child pair.
"""

import argparse
import json
import subprocess
import sys


def git(repo, *args):
    return subprocess.run(["git", "-C", repo, *args], check=True, capture_output=True).stdout


def tree_bytes(repo, commit):
    total = 0
    for line in git(repo, "ls-tree", "-r", "-l", commit).decode().splitlines():
        size = line.split(None, 4)[3]
        if size != "-":
            total += int(size)
    return total


def diff_bytes(repo, a, b):
    return len(git(repo, "diff", "--binary", "--no-color", "--no-ext-diff", a, b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("repo")
    ap.add_argument("--rev", default="--all", help="revision range passed to git rev-list")
    ap.add_argument("--max-commits", type=int, default=None)
    args = ap.parse_args()

    cmd = ["rev-list", "--parents", "--topo-order", "--reverse", args.rev]
    rows = [line.split() for line in git(args.repo, *cmd).decode().splitlines()]
    if args.max_commits is not None:
        rows = rows[: args.max_commits]
    kept = {r[0] for r in rows}

    commits, deltas = [], []
    for sha, *parents in rows:
        parents = [p for p in parents if p in kept]
        commits.append({"id": sha, "bytes": tree_bytes(args.repo, sha), "parents": parents})
        for p in parents:
            deltas.append({"from": p, "to": sha, "bytes": diff_bytes(args.repo, p, sha)})
            deltas.append({"from": sha, "to": p, "bytes": diff_bytes(args.repo, sha, p)})
    json.dump({"commits": commits, "deltas": deltas}, sys.stdout)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
