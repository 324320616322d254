"""Command line interface.

Verbs: gen-spec (seeded curve/shifter/budget generation), run (full
pipeline), report (merge run rows into one CSV with an averages line),
render (re-draw the SVG from serialized artifacts).

Exit codes: 0 success, 2 parse or validation error, 3 timing infeasible.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .bench import convert_gsrc_blocks, convert_gsrc_nets, gen_spec, parse_blocks, parse_nets
from .errors import TimingInfeasible, ValidationError, VoltplanError
from .pipeline import RunConfig, run_pipeline
from .render import render_svg
from .report import emit_report, pretty_report, parse_report, ReportRow


def _frac(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(text)


def _add_gen_spec(sub):
    p = sub.add_parser("gen-spec", help="generate curves, shifter and cycle budget")
    p.add_argument("--blocks", required=True)
    p.add_argument("--nets", required=True)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--timing-slack", type=_frac, default=Fraction(1, 2),
                   help="where the budget sits between the fastest and slowest critical paths")
    p.add_argument("--shifter-area", type=int, default=None)
    p.add_argument("-o", "--out", required=True)


def _add_run(sub):
    p = sub.add_parser("run", help="full pipeline: anneal, assign, report, render")
    p.add_argument("--blocks", required=True)
    p.add_argument("--nets", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--dataset", default="")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--tcycle", type=int, default=None)
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--beta", type=int, default=10)
    p.add_argument("--accept-target", type=float, default=0.9)
    p.add_argument("--ls-every", type=int, default=5)
    p.add_argument("--kappa", type=_frac, default=Fraction(0))
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--max-levels", type=int, default=400)


def _add_report(sub):
    p = sub.add_parser("report", help="merge run report rows into one table")
    p.add_argument("csvs", nargs="+")
    p.add_argument("-o", "--out", default=None)
    p.add_argument("--pretty", action="store_true")


def _add_render(sub):
    p = sub.add_parser("render", help="redraw the SVG from serialized artifacts")
    p.add_argument("--floorplan", required=True)
    p.add_argument("--shifters", default=None)
    p.add_argument("-o", "--out", required=True)


def _add_convert(sub):
    p = sub.add_parser("convert-gsrc", help="rewrite GSRC .blocks/.nets files")
    p.add_argument("--blocks", required=True)
    p.add_argument("--nets", required=True)
    p.add_argument("--out-blocks", required=True)
    p.add_argument("--out-nets", required=True)


def _cmd_gen_spec(args) -> int:
    blocks = parse_blocks(Path(args.blocks).read_text())
    nets = parse_nets(Path(args.nets).read_text(), [b[0] for b in blocks])
    text = gen_spec(
        args.seed,
        blocks,
        nets,
        args.k,
        timing_slack=args.timing_slack,
        shifter_area=args.shifter_area,
    )
    Path(args.out).write_text(text)
    print(f"wrote {args.out}")
    return 0


def _cmd_run(args) -> int:
    config = RunConfig(
        blocks_path=args.blocks,
        nets_path=args.nets,
        spec_path=args.spec,
        seed=args.seed,
        out_dir=args.out,
        dataset=args.dataset,
        k=args.k,
        t_cycle=args.tcycle,
        alpha=args.alpha,
        beta=args.beta,
        accept_target=args.accept_target,
        ls_every=args.ls_every,
        kappa=args.kappa,
        window=args.window,
        max_levels=args.max_levels,
    )
    row, _result = run_pipeline(config)
    print(pretty_report([row]), end="")
    print(f"artifacts in {args.out}")
    return 0


def _cmd_report(args) -> int:
    rows = []
    for path in args.csvs:
        parsed = parse_report(Path(path).read_text())
        for fields in parsed[1:]:  # skip header
            rows.append(
                ReportRow(
                    dataset=fields[0],
                    k=int(fields[1]),
                    power_cost=int(fields[2]),
                    wirelength_with_ls=int(fields[3]),
                    ls_number=int(fields[4]),
                    ilo_percent=Fraction(fields[5]),
                    white_space_percent=Fraction(fields[6]),
                    runtime_seconds=float(fields[7]),
                )
            )
    text = emit_report(rows)
    if args.out:
        Path(args.out).write_text(text)
    if args.pretty or not args.out:
        print(pretty_report(rows), end="")
    return 0


def _cmd_render(args) -> int:
    rooms = []
    modules = []
    max_x = max_y = 0
    for line in Path(args.floorplan).read_text().splitlines():
        if not line.strip():
            continue
        f = line.split()
        x, y, w, h = int(f[1]), int(f[2]), int(f[3]), int(f[4])
        rx, ry, rw, rh = int(f[5]), int(f[6]), int(f[7]), int(f[8])
        level = int(f[9])
        rooms.append((rx, ry, rw, rh))
        modules.append((x, y, w, h, level))
        max_x = max(max_x, rx + rw)
        max_y = max(max_y, ry + rh)
    shifters = []
    if args.shifters and Path(args.shifters).exists():
        for line in Path(args.shifters).read_text().splitlines():
            if not line.strip():
                continue
            f = line.split()
            shifters.append((int(f[3]), int(f[4]), int(f[5]), int(f[6])))
    Path(args.out).write_text(render_svg(max_x, max_y, rooms, modules, shifters))
    print(f"wrote {args.out}")
    return 0


def _cmd_convert(args) -> int:
    blocks_text = convert_gsrc_blocks(Path(args.blocks).read_text())
    names = [b[0] for b in parse_blocks(blocks_text)]
    nets_text = convert_gsrc_nets(Path(args.nets).read_text(), names)
    Path(args.out_blocks).write_text(blocks_text)
    Path(args.out_nets).write_text(nets_text)
    print(f"wrote {args.out_blocks} and {args.out_nets}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="voltplan",
        description="multi-voltage floorplanning with level-shifter placement",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_gen_spec(sub)
    _add_run(sub)
    _add_report(sub)
    _add_render(sub)
    _add_convert(sub)
    args = parser.parse_args(argv)
    handlers = {
        "gen-spec": _cmd_gen_spec,
        "run": _cmd_run,
        "report": _cmd_report,
        "render": _cmd_render,
        "convert-gsrc": _cmd_convert,
    }
    try:
        return handlers[args.command](args)
    except TimingInfeasible as exc:
        path = " -> ".join(str(v) for v in exc.critical_path)
        print(f"timing infeasible: {exc}" + (f" (critical path: {path})" if path else ""),
              file=sys.stderr)
        return 3
    except (ValidationError, VoltplanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
