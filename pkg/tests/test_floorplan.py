import random
from fractions import Fraction
from itertools import accumulate

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voltplan.anneal import AnnealConfig, anneal
from voltplan.errors import MalformedExpression
from voltplan.floorplan import (
    Floorplan,
    Room,
    SlicingExpr,
    check_expr,
    cost_phi,
    hpwl,
    initial_expr,
    make_expr,
    pack,
    perturb,
    phi_weights,
    voltage_islands,
    whitespace_parts,
    whitespace_percent,
)
from voltplan.model import DPCurve, ModuleBlock, build_netlist, derive_shifter_spec


def rects_disjoint(rooms):
    for i in range(len(rooms)):
        for j in range(i + 1, len(rooms)):
            a, b = rooms[i], rooms[j]
            if (
                a.x < b.x + b.w and b.x < a.x + a.w
                and a.y < b.y + b.h and b.y < a.y + a.h
            ):
                return False
    return True


def check_tiling(fp: Floorplan):
    assert sum(r.w * r.h for r in fp.rooms) == fp.area
    assert rects_disjoint(fp.rooms)
    for r in fp.rooms:
        assert r.w >= r.module_w and r.h >= r.module_h
        assert 0 <= r.x and 0 <= r.y
        assert r.x + r.w <= fp.chip_w and r.y + r.h <= fp.chip_h


class TestPack:
    def test_equal_children_no_whitespace(self):
        fp = pack(make_expr([0, 1, "V"]), [(2, 2), (2, 2)])
        assert (fp.chip_w, fp.chip_h) == (4, 2)
        assert whitespace_percent(fp) == 0

    def test_uneven_children_top_strip(self):
        fp = pack(make_expr([0, 1, "V"]), [(2, 2), (2, 4)])
        assert (fp.chip_w, fp.chip_h) == (4, 4)
        room0 = fp.rooms[0]
        assert (room0.w, room0.h) == (2, 4)
        p1, p2, p3 = whitespace_parts(room0)
        assert p2 == (0, 2, 2, 2)
        assert p1[2] == 0 and p3[2] == 0

    def test_malformed_rejected(self):
        with pytest.raises(MalformedExpression):
            pack(SlicingExpr(tokens=(0, "V", 1)), [(1, 1), (1, 1)])
        with pytest.raises(MalformedExpression):
            check_expr(SlicingExpr(tokens=(0, 1, "V", "V")))

    def test_random_exprs_tile(self, rng):
        for _ in range(100):
            m = rng.randint(1, 12)
            dims = [(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(m)]
            expr = initial_expr(m)
            for _ in range(30):
                expr = perturb(expr, rng.randint(1, 3), rng)
            fp = pack(expr, dims)
            check_tiling(fp)


class TestWhitespaceParts:
    def test_exact_fit_all_empty(self):
        room = Room(x=0, y=0, w=5, h=4, module_w=5, module_h=4)
        for part in whitespace_parts(room):
            assert part[2] * part[3] == 0

    def test_frozen_example(self):
        room = Room(x=0, y=0, w=10, h=10, module_w=8, module_h=8)
        p1, p2, p3 = whitespace_parts(room)
        assert p1 == (8, 0, 2, 8)
        assert p2 == (0, 8, 8, 2)
        assert p3 == (8, 8, 2, 2)

    @given(
        st.integers(1, 30), st.integers(1, 30), st.integers(0, 10), st.integers(0, 10)
    )
    @settings(max_examples=80)
    def test_areas_sum_to_slack(self, mw, mh, sw, sh):
        room = Room(x=3, y=5, w=mw + sw, h=mh + sh, module_w=mw, module_h=mh)
        parts = whitespace_parts(room)
        slack = (mw + sw) * (mh + sh) - mw * mh
        assert sum(p[2] * p[3] for p in parts) == slack


class TestHpwl:
    def test_coincident_centers(self):
        fp = Floorplan(
            chip_w=4, chip_h=4,
            rooms=(
                Room(0, 0, 4, 4, 4, 4),
                Room(0, 0, 4, 4, 4, 4),
            ),
        )
        assert hpwl(fp, [(0, 1)]) == 0

    def test_frozen_three_four(self):
        # centers (1,1) and (4,5): |3| + |4| = 7
        fp = Floorplan(
            chip_w=8, chip_h=8,
            rooms=(Room(0, 0, 2, 2, 2, 2), Room(3, 4, 2, 2, 2, 2)),
        )
        assert hpwl(fp, [(0, 1)]) == 7

    def test_translation_invariance(self, rng):
        for _ in range(50):
            rooms = []
            for _ in range(4):
                x, y = rng.randint(0, 20), rng.randint(0, 20)
                w, h = rng.randint(1, 9), rng.randint(1, 9)
                rooms.append(Room(x, y, w, h, w, h))
            nets = [(0, 1), (1, 2), (2, 3), (0, 3)]
            base = hpwl(Floorplan(40, 40, tuple(rooms)), nets)
            dx, dy = rng.randint(1, 7), rng.randint(1, 7)
            moved = tuple(
                Room(r.x + dx, r.y + dy, r.w, r.h, r.module_w, r.module_h)
                for r in rooms
            )
            assert hpwl(Floorplan(60, 60, moved), nets) == base


class TestVoltageIslands:
    def test_uniform_connected(self):
        fp = pack(make_expr([0, 1, "V", 2, "H"]), [(2, 2), (2, 2), (4, 2)])
        assert voltage_islands(fp, (1, 1, 1)) == 1

    def test_all_distinct(self):
        fp = pack(make_expr([0, 1, "V", 2, "H"]), [(2, 2), (2, 2), (4, 2)])
        assert voltage_islands(fp, (1, 2, 3)) == 3

    def test_checkerboard_two_levels(self):
        fp = pack(
            make_expr([0, 1, "V", 2, 3, "V", "H"]),
            [(1, 1), (1, 1), (1, 1), (1, 1)],
        )
        # diagonal corners share only a point, not a boundary segment
        assert voltage_islands(fp, (1, 2, 2, 1)) == 4


class TestCostPhi:
    def test_area_only(self):
        w = phi_weights(area=1, wirelength=0, power=0)
        assert cost_phi(100, 50, 40, 2, 1, w) == 100

    def test_frozen_sum(self):
        w = phi_weights(1, 1, 1, 1, 1)
        assert cost_phi(100, 50, 40, 2, 1, w) == 193

    def test_monotone_in_each_metric(self, rng):
        w = phi_weights(
            Fraction(1), Fraction(1, 2), Fraction(2), Fraction(1, 10), Fraction(5)
        )
        base = (100, 50, 40, 2, 1)
        phi0 = cost_phi(*base, w)
        for i in range(5):
            bumped = list(base)
            bumped[i] += 3
            assert cost_phi(*bumped, w) >= phi0


class TestPerturb:
    def test_m2_involution(self):
        rng = random.Random(3)
        expr = initial_expr(6)
        once = perturb(expr, 2, random.Random(3))
        twice = perturb(once, 2, random.Random(3))
        assert twice.tokens == expr.tokens

    def test_m1_two_modules(self):
        expr = make_expr([0, 1, "V"])
        got = perturb(expr, 1, random.Random(0))
        assert got.tokens == (1, 0, "V")

    def test_fuzz_moves_stay_packable(self, rng):
        dims = [(rng.randint(1, 8), rng.randint(1, 8)) for _ in range(9)]
        expr = initial_expr(9)
        for _ in range(10_000):
            expr = perturb(expr, rng.randint(1, 3), rng)
            check_expr(expr, 9)
        fp = pack(expr, dims)
        check_tiling(fp)


def tiny_netlist(m=5, k=3, t_factor=2):
    rng = random.Random(11)
    mods = []
    for i in range(m):
        delays = [rng.randint(2, 6)]
        for _ in range(k - 1):
            delays.append(delays[-1] + rng.randint(1, 4))
        slopes = sorted(rng.sample(range(1, 40), k - 1), reverse=True)
        powers = [rng.randint(0, 9)]
        for q in range(k - 1, 0, -1):
            powers.insert(0, powers[0] + slopes[q - 1] * (delays[q] - delays[q - 1]))
        curve = DPCurve(points=tuple((q + 1, delays[q], powers[q]) for q in range(k)))
        mods.append(
            ModuleBlock(
                name=f"b{i}", width=rng.randint(3, 9), height=rng.randint(3, 9),
                curve=curve,
            )
        )
    nets = [(f"b{i}", f"b{i + 1}") for i in range(m - 1)]
    t_cycle = sum(c.curve.delay(k) for c in mods) * t_factor
    return build_netlist(mods, nets, t_cycle, k)


def tiny_shifter(k=3):
    return derive_shifter_spec(4, Fraction(1), [(1, 0, 2), (2, 1, 1), (3, 2, 0)][:k])


class TestAnneal:
    def test_single_module_trivial(self):
        nl = tiny_netlist(m=1)
        res = anneal(nl, tiny_shifter(), AnnealConfig(), seed=1)
        assert res.floorplan.chip_w == nl.modules[0].width
        assert res.metrics.ls_count == 0

    def test_single_module_phi_area_plus_power(self):
        from voltplan.anneal import modified_curves
        from voltplan.floorplan import phi_weights

        nl = tiny_netlist(m=1)
        weights = phi_weights(area=1, wirelength=0, power=1, islands=0, unplaced=0)
        res = anneal(nl, tiny_shifter(), AnnealConfig(weights=weights), seed=1)
        curve = modified_curves(nl, tiny_shifter())[0]
        assert res.metrics.phi == res.floorplan.area + curve.power(curve.k)

    def test_whitespace_percent_formula(self):
        fp = pack(make_expr([0, 1, "V"]), [(2, 2), (2, 4)])
        # chip 4x4 = 16, modules 4 + 8 = 12 used
        assert whitespace_percent(fp) == Fraction(16 - 12, 16) * 100

    def test_deterministic_across_runs(self):
        nl = tiny_netlist()
        a = anneal(nl, tiny_shifter(), AnnealConfig(), seed=42)
        b = anneal(nl, tiny_shifter(), AnnealConfig(), seed=42)
        assert a.metrics == b.metrics
        assert a.floorplan == b.floorplan
        assert a.expr.tokens == b.expr.tokens

    def test_best_phi_nonincreasing_and_final_not_worse(self):
        nl = tiny_netlist()
        phis = []
        cfg = AnnealConfig(observer=lambda fp, asg, phi: phis.append(phi))
        res = anneal(nl, tiny_shifter(), cfg, seed=5)
        best = list(accumulate(phis, min))
        assert all(b1 >= b2 for b1, b2 in zip(best, best[1:]))
        assert res.metrics.phi <= phis[0] or res.metrics.phi <= best[-1] * Fraction(11, 10)

    def test_result_tiles_and_meets_timing(self):
        nl = tiny_netlist()
        res = anneal(nl, tiny_shifter(), AnnealConfig(), seed=9)
        check_tiling(res.floorplan)
        from voltplan.anneal import modified_curves
        from voltplan.voltage import build_timing_graph, longest_path_delay

        tg = build_timing_graph(nl, [0] * len(nl.nets))
        curves = modified_curves(nl, tiny_shifter())
        assert longest_path_delay(tg, curves, res.voltage) <= nl.t_cycle
