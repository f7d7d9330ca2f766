"""Command-line front end.

Subcommands: analyze (full report for one box), gen (emit boxes), decompose
(optimal decomposition), fuzz (seeded property sweep), repro (reference
scenario run), sweep (parameter sweep as CSV).  Exit codes: 0 success, 1 an
asserted property failed, 2 usage or input error.  Output is deterministic:
identical invocations print identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from .boxes import (
    Box,
    box_from_json_obj,
    box_to_json_obj,
    format_fraction,
    is_no_signaling,
    parse_fraction,
)
from .cost import (
    NotInHull,
    communication_cost,
    decomposition_to_json_obj,
    eta_star,
    find_distinct_decompositions,
)
from .generators import (
    FAMILY_KINDS,
    TSIRELSON_ANGLES,
    FamilySpec,
    canonical,
    canonical_names,
    isotropic,
    quantum_box,
    sample,
)
from .measures import chsh, lhv_admissible, signal, uncertainty, unpredictability
from .verify import fuzz, reproduce_paper

_PARAMETRIC_KINDS = ("isotropic", "quantum")


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _parse_angles(raw: list[str] | None) -> tuple[float, float, float, float] | None:
    if raw is None:
        return None
    if len(raw) == 1 and raw[0] == "tsirelson":
        return TSIRELSON_ANGLES
    if len(raw) == 4:
        try:
            return tuple(float(x) for x in raw)
        except ValueError:
            raise ValueError(f"--angles needs radians, got {raw!r}")
    raise ValueError("--angles takes four radians or the preset name tsirelson")


def _load_box_file(path: str) -> Box:
    if path == "-":
        return box_from_json_obj(json.loads(sys.stdin.read()))
    with open(path, "r", encoding="utf-8") as handle:
        return box_from_json_obj(json.load(handle))


def _resolve_box(args: argparse.Namespace) -> Box:
    source = args.source
    if source == "-" or source not in canonical_names() + _PARAMETRIC_KINDS:
        if source != "-" and not os.path.exists(source):
            raise ValueError(
                f"box source {source!r} is neither a file, a canonical name, "
                f"nor one of {_PARAMETRIC_KINDS}"
            )
        return _load_box_file(source)
    if source == "isotropic":
        if args.v is None:
            raise ValueError("isotropic needs --v")
        return isotropic(parse_fraction(args.v))
    if source == "quantum":
        angles = _parse_angles(args.angles)
        if angles is None:
            raise ValueError("quantum needs --angles")
        return quantum_box(angles, args.denom)
    return canonical(source)


def _add_source_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "source",
        help="box file, - for stdin, a canonical name, isotropic, or quantum",
    )
    sub.add_argument("--v", help="isotropic weight, e.g. 7/10 or 0.7")
    sub.add_argument(
        "--angles",
        nargs="+",
        metavar="RAD",
        help="four measurement angles (a0 a1 b0 b1) or the preset name tsirelson",
    )
    sub.add_argument(
        "--denom", type=int, default=10**6, help="quantum rationalization bound"
    )


def _cmd_analyze(args: argparse.Namespace) -> int:
    box = _resolve_box(args)
    chsh_report = chsh(box)
    signal_report = signal(box)
    unc = uncertainty(box)
    cost_report = communication_cost(box, "full256")
    i_formula = unpredictability(box, "formula")
    i_per_party = unpredictability(box, "per_party")
    obj = {
        "format": "analysis-v1",
        "box": box_to_json_obj(box),
        "chsh": {
            "values": [format_fraction(v) for v in chsh_report.values],
            "lambda_max": format_fraction(chsh_report.lambda_max),
        },
        "signal": {
            "a_to_b": format_fraction(signal_report.s_a_to_b),
            "b_to_a": format_fraction(signal_report.s_b_to_a),
            "s": format_fraction(signal_report.s),
        },
        "unpredictability": {
            "formula": format_fraction(i_formula),
            "per_party": format_fraction(i_per_party),
        },
        "uncertainty": {
            "delta": {
                f"{party}{setting}": format_fraction(value)
                for (party, setting), value in sorted(unc.delta.items())
            },
            "u_a": format_fraction(unc.u_a),
            "u_b": format_fraction(unc.u_b),
        },
        "cost": {
            "c": format_fraction(cost_report.c),
            "eta": format_fraction(cost_report.eta),
            "lower_bound": format_fraction(cost_report.lower_bound),
            "decomposition": decomposition_to_json_obj(cost_report.decomposition),
        },
        "flags": {
            "no_signaling": is_no_signaling(box),
            "lhv_admissible": lhv_admissible(box),
            "weakly_nonclassical": i_formula > 0,
            "strongly_nonclassical": cost_report.eta > 0,
        },
    }
    if args.dim is not None:
        obj["eta_star"] = {
            "d": args.dim,
            "value": "%.12g" % eta_star(box, args.dim),
            "approximate": True,
        }
    if args.text:
        lines = [
            f"lambda_max = {format_fraction(chsh_report.lambda_max)}",
            f"s = {format_fraction(signal_report.s)}",
            f"C = {format_fraction(cost_report.c)}",
            f"eta = {format_fraction(cost_report.eta)}",
            f"I = {format_fraction(i_formula)}",
            f"U_A = {format_fraction(unc.u_a)}",
            f"U_B = {format_fraction(unc.u_b)}",
            "flags: "
            + ", ".join(k for k, v in obj["flags"].items() if v),
        ]
        if args.dim is not None:
            lines.append(f"eta_star(d={args.dim}) ~ {obj['eta_star']['value']}")
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        _emit(obj, args.out)
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    if (args.kind is None) == (args.family is None):
        raise ValueError("pass exactly one of --kind and --family")
    if args.kind is not None:
        if args.count != 1:
            raise ValueError("--count above 1 needs --family")
        if args.kind == "isotropic":
            if args.v is None:
                raise ValueError("isotropic needs --v")
            boxes = [isotropic(parse_fraction(args.v))]
        elif args.kind == "quantum":
            angles = _parse_angles(args.angles)
            if angles is None:
                raise ValueError("quantum needs --angles")
            boxes = [quantum_box(angles, args.denom)]
        else:
            boxes = [canonical(args.kind)]
    else:
        spec = FamilySpec(args.family, args.seed)
        boxes = sample(spec, args.count)
    if len(boxes) == 1 and args.out is None:
        _emit(box_to_json_obj(boxes[0]), None)
        return 0
    if args.out is None:
        raise ValueError("--count above 1 needs --out DIRECTORY")
    os.makedirs(args.out, exist_ok=True)
    for index, box in enumerate(boxes):
        path = os.path.join(args.out, f"box-{index:04d}.json")
        _emit(box_to_json_obj(box), path)
    return 0


def _cmd_decompose(args: argparse.Namespace) -> int:
    box = _resolve_box(args)
    if args.alt:
        try:
            pair = find_distinct_decompositions(box, args.basis)
        except NotInHull:
            _emit({"basis": args.basis, "status": "not-in-hull"}, args.out)
            return 0
        if pair is None:
            report = communication_cost(box, args.basis)
            obj = {
                "first": decomposition_to_json_obj(report.decomposition),
                "second": None,
            }
        else:
            obj = {
                "first": decomposition_to_json_obj(pair[0]),
                "second": decomposition_to_json_obj(pair[1]),
            }
        _emit(obj, args.out)
        return 0
    try:
        report = communication_cost(box, args.basis)
    except NotInHull:
        _emit({"basis": args.basis, "status": "not-in-hull"}, args.out)
        return 0
    _emit(decomposition_to_json_obj(report.decomposition), args.out)
    return 0


def _cmd_fuzz(args: argparse.Namespace) -> int:
    report = fuzz(FamilySpec(args.family, args.seed), args.count)
    _emit(report.to_json_obj(), args.out)
    return 1 if report.aborted else 0


def _cmd_repro(args: argparse.Namespace) -> int:
    report = reproduce_paper()
    _emit(report, args.out)
    return 1 if report["failures"] else 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.kind != "isotropic":
        raise ValueError(f"unknown sweep kind {args.kind!r}")
    if args.steps < 1:
        raise ValueError("--steps must be at least 1")
    columns = ("param", "lambda_max", "s", "C", "eta", "I", "U_A", "U_B")
    header = list(columns) + [f"{name}_exact" for name in columns]
    rows = []
    for k in range(args.steps + 1):
        v = Fraction(k, args.steps)
        box = isotropic(v)
        lam = chsh(box).lambda_max
        cost_report = communication_cost(box, "full256")
        unc = uncertainty(box)
        exact = (
            v,
            lam,
            cost_report.s,
            cost_report.c,
            cost_report.eta,
            unpredictability(box, "formula"),
            unc.u_a,
            unc.u_b,
        )
        rows.append(
            ["%.12g" % float(x) for x in exact] + [format_fraction(x) for x in exact]
        )
    handle = open(args.csv, "w", encoding="utf-8", newline="") if args.csv else sys.stdout
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if args.csv:
            handle.close()
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrbox",
        description="Exact analysis of two-input two-output correlation boxes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="full report for one box")
    _add_source_options(analyze)
    analyze.add_argument("--dim", type=int, help="channel size for eta_star")
    fmt = analyze.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (the default)")
    fmt.add_argument("--text", action="store_true", help="plain text instead of JSON")
    analyze.add_argument("--out", help="write JSON here instead of stdout")
    analyze.set_defaults(func=_cmd_analyze)

    gen = sub.add_parser("gen", help="emit canonical, parametric, or sampled boxes")
    gen.add_argument("--kind", help="canonical name, isotropic, or quantum")
    gen.add_argument("--v", help="isotropic weight")
    gen.add_argument("--angles", nargs="+", metavar="RAD")
    gen.add_argument("--denom", type=int, default=10**6)
    gen.add_argument("--family", choices=FAMILY_KINDS, help="sampling family")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--out", help="output directory (box-NNNN.json per box)")
    gen.set_defaults(func=_cmd_gen)

    decompose = sub.add_parser("decompose", help="optimal decomposition of a box")
    _add_source_options(decompose)
    decompose.add_argument("--basis", choices=("full256", "chsh16"), default="full256")
    decompose.add_argument(
        "--alt", action="store_true", help="also search for a second optimal support"
    )
    decompose.add_argument("--out", help="write JSON here instead of stdout")
    decompose.set_defaults(func=_cmd_decompose)

    fuzz_cmd = sub.add_parser("fuzz", help="seeded sweep of the tracked inequalities")
    fuzz_cmd.add_argument("--family", choices=FAMILY_KINDS, default="general")
    fuzz_cmd.add_argument("--seed", type=int, default=0)
    fuzz_cmd.add_argument("--count", type=int, default=100)
    fuzz_cmd.add_argument("--out", help="write JSON here instead of stdout")
    fuzz_cmd.set_defaults(func=_cmd_fuzz)

    repro = sub.add_parser("repro", help="recompute the reference scenario")
    repro.add_argument("--out", help="write JSON here instead of stdout")
    repro.set_defaults(func=_cmd_repro)

    sweep = sub.add_parser("sweep", help="parameter sweep as CSV")
    sweep.add_argument("--kind", default="isotropic")
    sweep.add_argument("--steps", type=int, default=10)
    sweep.add_argument("--csv", help="write CSV here instead of stdout")
    sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
