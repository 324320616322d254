import random
from pathlib import Path

import pytest

from voltplan.model import DPCurve, validate_dp_curve
from voltplan.voltage import TimingGraph, longest_path_for

DATA = Path(__file__).parent / "data"


def random_curve(rng, k):
    """Random valid curve: strictly decreasing integer slopes."""
    delays = [rng.randint(1, 12)]
    for _ in range(k - 1):
        delays.append(delays[-1] + rng.randint(1, 6))
    slopes = sorted(rng.sample(range(1, 60), k - 1), reverse=True)
    powers = [0] * k
    powers[k - 1] = rng.randint(0, 20)
    for q in range(k - 1, 0, -1):
        gap = delays[q] - delays[q - 1]
        powers[q - 1] = powers[q] + slopes[q - 1] * gap
    curve = DPCurve(points=tuple((i + 1, delays[i], powers[i]) for i in range(k)))
    return validate_dp_curve(curve, k)


def random_timing_instance(rng, max_m=8, k_choices=(2, 3, 4), edge_prob=0.35):
    """Random DAG + curves + a cycle budget between tight and loose."""
    m = rng.randint(1, max_m)
    k = rng.choice(list(k_choices))
    curves = [random_curve(rng, k) for _ in range(m)]
    wires = []
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < edge_prob:
                wires.append((i, j, rng.randint(0, 4)))
    has_in = {d for _, d, _ in wires}
    has_out = {s for s, _, _ in wires}
    base = TimingGraph(
        m=m,
        wires=tuple(wires),
        sources=tuple(i for i in range(m) if i not in has_in),
        sinks=tuple(i for i in range(m) if i not in has_out),
        t_cycle=0,
    )
    cp_fast, _ = longest_path_for(base, [c.delay(1) for c in curves])
    cp_slow, _ = longest_path_for(base, [c.delay(c.k) for c in curves])
    t_cycle = rng.randint(cp_fast, cp_slow + 3)
    tg = TimingGraph(
        m=m, wires=base.wires, sources=base.sources, sinks=base.sinks, t_cycle=t_cycle
    )
    return tg, curves


@pytest.fixture
def rng():
    return random.Random(20260808)
