#!/usr/bin/env python3
"""Writes a small molecule-like graph dataset in TU text format.

Graphs are random trees with a few ring closures and three node labels
drawn with skewed weights. Output is fully determined by --seed.
"""

import argparse
import pathlib
import random


# relative frequencies of the seven atom types in MUTAG-like molecules
ATOM_WEIGHTS = [126, 22, 28, 1, 1, 2, 1]


def molecule(rng, n, weights):
    edges = set()
    for v in range(1, n):
        # attach to a recent node so chains dominate, like carbon backbones
        u = rng.randrange(max(0, v - 4), v)
        edges.add((u, v))
    for _ in range(rng.choice([1, 2, 2, 3])):
        u, v = sorted(rng.sample(range(n), 2))
        if v - u >= 3:
            edges.add((u, v))
    labels = rng.choices(range(len(weights)), weights=weights, k=n)
    return sorted(edges), labels


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", type=pathlib.Path)
    ap.add_argument("--name", default="DESK")
    ap.add_argument("--graphs", type=int, default=40)
    ap.add_argument("--min-nodes", type=int, default=10)
    ap.add_argument("--max-nodes", type=int, default=26)
    ap.add_argument("--labels", type=int, default=7, help="atom types, at most 7")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    adj, indicator, node_labels, graph_labels = [], [], [], []
    offset = 0
    for g in range(args.graphs):
        n = rng.randint(args.min_nodes, args.max_nodes)
        edges, labels = molecule(rng, n, ATOM_WEIGHTS[: args.labels])
        for u, v in edges:
            adj.append((offset + u + 1, offset + v + 1))
            adj.append((offset + v + 1, offset + u + 1))
        indicator += [g + 1] * n
        node_labels += labels
        graph_labels.append(1 if sum(labels) % 2 else -1)
        offset += n

    adj.sort()
    p = args.out / args.name
    (p.parent / f"{args.name}_A.txt").write_text("".join(f"{a}, {b}\n" for a, b in adj))
    (p.parent / f"{args.name}_graph_indicator.txt").write_text("".join(f"{g}\n" for g in indicator))
    (p.parent / f"{args.name}_node_labels.txt").write_text("".join(f"{x}\n" for x in node_labels))
    (p.parent / f"{args.name}_graph_labels.txt").write_text("".join(f"{x}\n" for x in graph_labels))


if __name__ == "__main__":
    main()
