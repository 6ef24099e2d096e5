#!/usr/bin/env python3
"""Brute-force Newton-boosting reference for the GBDT trainer.

Independent implementation used to freeze the per-round training log-loss on
the small fixture under tests/data/. Deliberately plain: explicit loops,
Python floats (IEEE doubles), no numpy reductions, so the arithmetic order is
unambiguous and reproducible.

Usage:
    scripts/gbdt_reference.py tests/data/gbdt_fixture.tsv \
        --rounds 10 --learning-rate 0.1 --max-depth 2 \
        --min-samples-leaf 1 --l2 1.0 > tests/data/gbdt_reference_losses.txt

Boosting scheme (must stay in lock-step with the C++ implementation):
  * base score per class = log(max(class prior, 1e-12))
  * per round, per class c: g_i = p_ic - [y_i == c], h_i = p_ic (1 - p_ic)
  * exact greedy splits between distinct adjacent sorted values,
    gain = GL^2/(HL+l2) + GR^2/(HR+l2) - G^2/(H+l2), strictly-better wins,
    candidates enumerated by (feature asc, threshold asc)
  * children need >= min_samples_leaf rows; non-positive gain stops a node
  * leaf value = -lr * G / (H + l2); row goes left iff x[f] < threshold
  * training log-loss = mean over rows of -log softmax(F_i)[y_i],
    reported before any trees and after every round.
"""

import argparse
import math


def read_fixture(path):
    xs, ys = [], []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            xs.append([float(v) for v in parts[:-1]])
            ys.append(int(parts[-1]))
    return xs, ys


def softmax(scores):
    m = scores[0]
    for s in scores[1:]:
        if s > m:
            m = s
    exps = [math.exp(s - m) for s in scores]
    total = 0.0
    for e in exps:
        total += e
    return [e / total for e in exps]


def log_loss(F, ys):
    acc = 0.0
    for i, y in enumerate(ys):
        p = softmax(F[i])[y]
        acc += -math.log(max(p, 1e-300))
    return acc / len(ys)


class Node:
    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self):
        self.feature = -1
        self.threshold = 0.0
        self.left = None
        self.right = None
        self.value = 0.0


def build_tree(xs, g, h, rows, depth, args):
    node = Node()
    G = 0.0
    H = 0.0
    for r in rows:
        G += g[r]
    for r in rows:
        H += h[r]
    if depth >= args.max_depth or len(rows) < 2 * args.min_samples_leaf:
        node.value = -args.learning_rate * G / (H + args.l2)
        return node

    parent_score = G * G / (H + args.l2)
    best_gain = 0.0
    best = None  # (feature, threshold)
    n_features = len(xs[0])
    for f in range(n_features):
        order = sorted(rows, key=lambda r: (xs[r][f], r))
        GL = 0.0
        HL = 0.0
        for pos in range(len(order) - 1):
            r = order[pos]
            GL += g[r]
            HL += h[r]
            if xs[order[pos]][f] == xs[order[pos + 1]][f]:
                continue
            n_left = pos + 1
            n_right = len(order) - n_left
            if n_left < args.min_samples_leaf or n_right < args.min_samples_leaf:
                continue
            GR = G - GL
            HR = H - HL
            gain = GL * GL / (HL + args.l2) + GR * GR / (HR + args.l2) - parent_score
            if gain > best_gain:
                best_gain = gain
                best = (f, (xs[order[pos]][f] + xs[order[pos + 1]][f]) / 2.0)
    if best is None:
        node.value = -args.learning_rate * G / (H + args.l2)
        return node

    node.feature, node.threshold = best
    left_rows = [r for r in rows if xs[r][node.feature] < node.threshold]
    right_rows = [r for r in rows if xs[r][node.feature] >= node.threshold]
    node.left = build_tree(xs, g, h, left_rows, depth + 1, args)
    node.right = build_tree(xs, g, h, right_rows, depth + 1, args)
    return node


def predict_tree(node, x):
    while node.feature >= 0:
        node = node.left if x[node.feature] < node.threshold else node.right
    return node.value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("fixture")
    ap.add_argument("--rounds", type=int, default=10)
    ap.add_argument("--learning-rate", type=float, default=0.1)
    ap.add_argument("--max-depth", type=int, default=2)
    ap.add_argument("--min-samples-leaf", type=int, default=1)
    ap.add_argument("--l2", type=float, default=1.0)
    ap.add_argument("--classes", type=int, default=3)
    args = ap.parse_args()

    xs, ys = read_fixture(args.fixture)
    n = len(xs)
    base = []
    for c in range(args.classes):
        count = 0
        for y in ys:
            if y == c:
                count += 1
        base.append(math.log(max(count / n, 1e-12)))
    F = [list(base) for _ in range(n)]

    print("%.17g" % log_loss(F, ys))
    for _ in range(args.rounds):
        for c in range(args.classes):
            g = [0.0] * n
            h = [0.0] * n
            for i in range(n):
                p = softmax(F[i])[c]
                g[i] = p - (1.0 if ys[i] == c else 0.0)
                h[i] = p * (1.0 - p)
            tree = build_tree(xs, g, h, list(range(n)), 0, args)
            for i in range(n):
                F[i][c] += predict_tree(tree, xs[i])
        print("%.17g" % log_loss(F, ys))


if __name__ == "__main__":
    main()
