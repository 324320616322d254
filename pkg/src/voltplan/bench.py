"""Benchmark file formats and seeded specification generation.

Plain-text inputs, one record per line, '#' comments:

  blocks:  <name> <width> <height>
  nets:    net <source> <sink> [<sink>...]
  spec:    k <int>
           tcycle <int>
           curve <name> <level> <delay> <power>  (k triples, flattened)
           shifter <area> <ratio_num>:<ratio_den> <level> <delay> <power> ...

A thin converter accepts the GSRC .blocks/.nets subset (n10..n300) and
rewrites it into these formats.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction

from .errors import DuplicateName, ParseError, UnknownBlock
from .model import DPCurve, ShifterSpec, derive_shifter_spec, validate_dp_curve
from .voltage import longest_path_for, TimingGraph


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_blocks(text) -> list[tuple[str, int, int]]:
    """Parse `<name> <width> <height>` lines into (name, w, h) tuples."""
    out = []
    seen = set()
    for lineno, line in _content_lines(text):
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected '<name> <width> <height>', got {line!r}", lineno)
        name = parts[0]
        try:
            w, h = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"bad dimensions in {line!r}", lineno) from None
        if w <= 0 or h <= 0:
            raise ParseError(f"dimensions must be positive in {line!r}", lineno)
        if name in seen:
            raise DuplicateName(f"duplicate block {name!r}", lineno)
        seen.add(name)
        out.append((name, w, h))
    return out


def parse_nets(text, known_names) -> list[tuple[str, list[str]]]:
    """Parse `net <source> <sink>...` lines into multi-pin (source, sinks)."""
    known = set(known_names)
    out = []
    for lineno, line in _content_lines(text):
        parts = line.split()
        if parts[0] != "net" or len(parts) < 3:
            raise ParseError(f"expected 'net <source> <sink>...', got {line!r}", lineno)
        for name in parts[1:]:
            if name not in known:
                raise UnknownBlock(f"unknown block {name!r}", lineno)
        out.append((parts[1], parts[2:]))
    return out


def parse_spec(text):
    """Parse a spec file; returns (curves by name, ShifterSpec, t_cycle, k)."""
    k = None
    t_cycle = None
    curves = {}
    shifter = None
    for lineno, line in _content_lines(text):
        parts = line.split()
        kind = parts[0]
        if kind == "k":
            k = int(parts[1])
        elif kind == "tcycle":
            t_cycle = int(parts[1])
        elif kind == "curve":
            name = parts[1]
            vals = parts[2:]
            if len(vals) % 3 != 0 or not vals:
                raise ParseError(f"curve {name}: triples expected", lineno)
            pts = []
            for i in range(0, len(vals), 3):
                pts.append((int(vals[i]), int(vals[i + 1]), int(vals[i + 2])))
            if name in curves:
                raise DuplicateName(f"duplicate curve for {name!r}", lineno)
            curves[name] = DPCurve(points=tuple(pts))
        elif kind == "shifter":
            area = int(parts[1])
            mnum, mden = parts[2].split(":")
            vals = parts[3:]
            if len(vals) % 3 != 0 or not vals:
                raise ParseError("shifter: triples expected", lineno)
            overhead = []
            for i in range(0, len(vals), 3):
                overhead.append((int(vals[i]), int(vals[i + 1]), int(vals[i + 2])))
            shifter = derive_shifter_spec(
                area, Fraction(int(mnum), int(mden)), overhead
            )
        else:
            raise ParseError(f"unknown record {kind!r}", lineno)
    if k is None or t_cycle is None or shifter is None:
        raise ParseError("spec needs k, tcycle and shifter records")
    for name, curve in curves.items():
        validate_dp_curve(curve, k)
    if shifter.k != k:
        raise ParseError(f"shifter overhead has {shifter.k} levels, k={k}")
    return curves, shifter, t_cycle, k


# Slope bands per level transition: generated curves draw the slope of the
# level (q-1)->q segment from a band that is strictly above the next level's
# band. Module curves and the shifter overhead draw from the same bands, so
# the pointwise sum keeps strictly decreasing slopes for any k up to K_CAP.
K_CAP = 8


def _band(q):
    width = 2 ** (K_CAP - q + 1)
    return (width // 2 + 1, width) if q < K_CAP else (1, 2)


def _gen_curve_points(rng, k, base_delay_range, gap_range, base_power_range):
    d = rng.randint(*base_delay_range)
    p1 = rng.randint(*base_power_range)
    delays = [d]
    powers = [p1]
    for q in range(2, k + 1):
        gap = rng.randint(*gap_range)
        lo, hi = _band(q)
        slope = rng.randint(lo, hi)
        delays.append(delays[-1] + gap)
        powers.append(powers[-1] - slope * gap)
    return tuple((q + 1, delays[q], powers[q]) for q in range(k))


def gen_spec(
    seed: int,
    blocks,
    nets,
    k: int,
    *,
    base_delay_range=(5, 20),
    gap_range=(1, 6),
    timing_slack=Fraction(1, 2),
    shifter_area=None,
    shifter_ratio=Fraction(2, 1),
) -> str:
    """Deterministically generate curves, a shifter and a cycle budget.

    Per-module streams are seeded by (seed, index) so a k=2 run draws a
    prefix of the k=4 run: smaller level sets nest inside larger ones.
    The cycle budget interpolates between the all-fastest and all-slowest
    critical paths by `timing_slack`.
    """
    if k < 1 or k > K_CAP:
        raise ValueError(f"k must be in 1..{K_CAP}")
    names = [b[0] for b in blocks]
    lines = [f"k {k}"]
    curves = {}
    for i, name in enumerate(names):
        # child seeds are derived arithmetically: string/tuple seeding goes
        # through hash(), which is randomized per process
        rng = random.Random(seed * 1_000_003 + i)
        pts = _gen_curve_points(rng, k, base_delay_range, gap_range, (3000, 4000))
        curves[name] = DPCurve(points=pts)
        validate_dp_curve(curves[name], k)
        flat = " ".join(f"{l} {d} {p}" for l, d, p in pts)
        lines.append(f"curve {name} {flat}")

    rng = random.Random(seed * 1_000_003 - 1)
    if shifter_area is None:
        min_area = min(b[1] * b[2] for b in blocks)
        shifter_area = max(1, min_area // 64)
    # overhead slopes come from the same bands as the module curves, which
    # keeps every modified curve convex; the base power only shifts the tax
    overhead = _gen_curve_points(rng, k, (0, 2), (1, 2), (600, 800))
    spec = derive_shifter_spec(shifter_area, shifter_ratio, overhead)
    flat = " ".join(f"{l} {d} {p}" for l, d, p in spec.overhead)
    lines.append(
        f"shifter {shifter_area} {shifter_ratio.numerator}:{shifter_ratio.denominator} {flat}"
    )

    # cycle budget from the critical path of the decomposed two-pin nets
    index = {n: i for i, n in enumerate(names)}
    pairs = []
    for source, sinks in nets:
        for sink in sinks:
            pairs.append((index[source], index[sink]))
    has_in = {d for _, d in pairs}
    has_out = {s for s, _ in pairs}
    tg = TimingGraph(
        m=len(names),
        wires=tuple((s, d, 0) for s, d in pairs),
        sources=tuple(i for i in range(len(names)) if i not in has_in),
        sinks=tuple(i for i in range(len(names)) if i not in has_out),
        t_cycle=0,
    )
    curve_list = [curves[n] for n in names]
    cp_fast, _ = longest_path_for(tg, [c.delay(1) for c in curve_list])
    cp_slow, _ = longest_path_for(tg, [c.delay(c.k) for c in curve_list])
    t_cycle = cp_fast + int(Fraction(timing_slack) * (cp_slow - cp_fast))
    lines.append(f"tcycle {t_cycle}")
    return "\n".join(lines) + "\n"


_GSRC_VERTEX = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def convert_gsrc_blocks(text) -> str:
    """Rewrite the GSRC .blocks subset into the plain blocks format.

    Hard rectilinear blocks use their bounding box; soft blocks become the
    square of their area. Terminals are dropped.
    """
    out = []
    for lineno, line in _content_lines(text):
        parts = line.split()
        if len(parts) >= 2 and parts[1] == "hardrectilinear":
            verts = _GSRC_VERTEX.findall(line)
            if not verts:
                raise ParseError(f"no vertices in {line!r}", lineno)
            xs = [int(x) for x, _ in verts]
            ys = [int(y) for _, y in verts]
            out.append(f"{parts[0]} {max(xs) - min(xs)} {max(ys) - min(ys)}")
        elif len(parts) >= 3 and parts[1] == "softrectangular":
            area = int(float(parts[2]))
            side = max(1, round(area**0.5))
            out.append(f"{parts[0]} {side} {max(1, area // side)}")
        # headers, UCSC/UCLA banners, terminal lines: skipped
    return "\n".join(out) + "\n"


def convert_gsrc_nets(text, known_names) -> str:
    """Rewrite the GSRC .nets subset; first pin drives the rest.

    Pins that are not known blocks (terminals) are dropped, as are nets that
    would close a cycle over the first-pin-drives ordering.
    """
    known = set(known_names)
    groups = []
    pending = None
    expect = 0
    for _lineno, line in _content_lines(text):
        parts = line.split()
        if parts[0] == "NetDegree":
            if pending:
                groups.append(pending)
            expect = int(parts[-1])
            pending = []
        elif pending is not None and expect > 0:
            if parts[0] in known:
                pending.append(parts[0])
            expect -= 1
    if pending:
        groups.append(pending)

    index = {n: i for i, n in enumerate(known_names)}
    adj = {i: set() for i in index.values()}

    def reaches(a, b, seen):
        if a == b:
            return True
        seen.add(a)
        return any(reaches(nxt, b, seen) for nxt in adj[a] if nxt not in seen)

    lines = []
    for pins in groups:
        pins = list(dict.fromkeys(pins))  # dedupe, keep order
        if len(pins) < 2:
            continue
        src, sinks = pins[0], pins[1:]
        kept = [s for s in sinks if not reaches(index[s], index[src], set())]
        if not kept:
            continue
        for s in kept:
            adj[index[src]].add(index[s])
        lines.append("net " + " ".join([src] + kept))
    return "\n".join(lines) + "\n"
