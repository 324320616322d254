#!/usr/bin/env python3
"""Benchmark: compiled flow kernel vs the pure-Python twin.

Builds the two network families the annealer actually solves (expanded
timing circulations and bipartite shifter assignments), runs both kernels
on identical inputs, checks the outputs are bit-identical, and prints the
speedup table.

Usage: python benchmarks/bench_flow.py [--trials N]
"""

import argparse
import random
import time

from voltplan import _speedups_py

try:
    from voltplan import _speedups
except ImportError:
    _speedups = None

from voltplan.flow import network
from voltplan.voltage import build_expanded_network
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from conftest import random_timing_instance  # noqa: E402


def expanded_instances(trials, seed=1):
    rng = random.Random(seed)
    out = []
    for _ in range(trials):
        tg, curves = random_timing_instance(rng, max_m=40, k_choices=(4,), edge_prob=0.12)
        net = build_expanded_network(tg, curves)
        out.append(net)
    return out


def bipartite_instances(trials, seed=2):
    rng = random.Random(seed)
    out = []
    for _ in range(trials):
        n_ls, n_rooms = rng.randint(40, 120), rng.randint(20, 60)
        arcs = []
        s, t = 0, 1
        for i in range(n_ls):
            arcs.append((s, 2 + i, 0, 0, 1))
            for r in rng.sample(range(n_rooms), min(n_rooms, rng.randint(2, 10))):
                arcs.append((2 + i, 2 + n_ls + r, rng.randint(0, 50), 0, 1))
        for r in range(n_rooms):
            arcs.append((2 + n_ls + r, t, 0, 0, rng.randint(1, 6)))
        out.append(network(2 + n_ls + n_rooms, arcs))
    return out


def run_kernel(kern, nets, mode):
    results = []
    t0 = time.perf_counter()
    for net in nets:
        tails = [a.tail for a in net.arcs]
        heads = [a.head for a in net.arcs]
        caps = [a.upper for a in net.arcs]
        costs = [a.cost for a in net.arcs]
        if mode == "maxflow":
            results.append(kern.mcmf(net.n_nodes, tails, heads, caps, costs, 0, 1, kern.INF))
        else:
            # same saturation transform the circulation solver applies
            n = net.n_nodes
            excess = [0] * n
            ktails, kheads, kcaps, kcosts = [], [], [], []
            for tl, hd, cp, cs in zip(tails, heads, caps, costs):
                if cs < 0:
                    excess[hd] += cp
                    excess[tl] -= cp
                    ktails.append(hd)
                    kheads.append(tl)
                    kcaps.append(cp)
                    kcosts.append(-cs)
                else:
                    ktails.append(tl)
                    kheads.append(hd)
                    kcaps.append(cp)
                    kcosts.append(cs)
            s_node, t_node = n, n + 1
            supply = 0
            for v in range(n):
                if excess[v] > 0:
                    supply += excess[v]
                    ktails.append(s_node)
                    kheads.append(v)
                    kcaps.append(excess[v])
                    kcosts.append(0)
                elif excess[v] < 0:
                    ktails.append(v)
                    kheads.append(t_node)
                    kcaps.append(-excess[v])
                    kcosts.append(0)
            results.append(
                kern.mcmf(n + 2, ktails, kheads, kcaps, kcosts, s_node, t_node, supply)
            )
    return time.perf_counter() - t0, results


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=60)
    args = parser.parse_args()

    if _speedups is None:
        print("compiled kernel not built; run: python setup.py build_ext --inplace")
        return 1

    suites = [
        ("timing circulation", expanded_instances(args.trials), "circulation"),
        ("shifter assignment", bipartite_instances(args.trials), "maxflow"),
    ]
    print(f"{'suite':>20}  {'pure (s)':>9}  {'compiled (s)':>12}  {'speedup':>8}")
    for name, nets, mode in suites:
        t_pure, r_pure = run_kernel(_speedups_py, nets, mode)
        t_fast, r_fast = run_kernel(_speedups, nets, mode)
        assert r_pure == r_fast, "kernels disagree"
        print(f"{name:>20}  {t_pure:9.3f}  {t_fast:12.3f}  {t_pure / t_fast:7.1f}x")
    print("outputs bit-identical across kernels")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
