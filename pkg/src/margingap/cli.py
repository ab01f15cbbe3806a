"""Command line interface for margin-gap analysis.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 computation budget exceeded.  All outputs are deterministic functions
of the arguments.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import __version__
from .errors import BudgetExceededError, FormatError, MargingapError, VerificationError
from .formats import (basis_text, load_basis, load_margin, load_matrix, load_model,
                      render_report, save_basis, save_matrix, save_model)
from .models import (as_rows, build_named_model, delta_block_matrix,
                     gamma_block_matrix, margin_matrix)
from .rarity import SampleConfig, dimension_report, rarity_run
from .solvers import cell_bounds, gap, unit_cost
from .stdpairs import pair_survey, verify_sullivant_certificates
from .toric import TermOrder, graver_basis, markov_entry_check, reduced_groebner

_NAMED = ("B", "Gamma", "Delta", "graph-edges")


def _add_matrix_source(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_argument_group("matrix source (choose one)")
    group.add_argument("--model", metavar="NAME",
                       help=f"named family, one of {', '.join(_NAMED)} "
                            "(Gamma and Delta use their block column order)")
    group.add_argument("--n", type=int, help="size parameter for named families")
    group.add_argument("--model-file", metavar="PATH", help="model JSON file")
    group.add_argument("--matrix", metavar="PATH", help="matrix exchange file")
    parser.set_defaults(_matrix_required=required)


def _resolve_matrix(args) -> tuple[tuple[int, ...], ...]:
    sources = [s for s in (args.model, args.model_file, args.matrix) if s]
    if len(sources) > 1:
        raise FormatError("give exactly one of --model, --model-file, --matrix")
    if args.matrix:
        return load_matrix(args.matrix)
    if args.model_file:
        return as_rows(margin_matrix(load_model(args.model_file)))
    if args.model:
        name = args.model
        if args.n is None:
            raise FormatError("--model needs --n")
        low = name.lower()
        if low == "gamma":
            return as_rows(gamma_block_matrix(args.n))
        if low == "delta":
            return as_rows(delta_block_matrix(args.n))
        return as_rows(margin_matrix(build_named_model(name, args.n)))
    if args._matrix_required:
        raise FormatError("a matrix source is required "
                          "(--model NAME --n N, --model-file, or --matrix)")
    return ()


def _cmd_model(args) -> int:
    if args.model_file:
        model = load_model(args.model_file)
        matrix = margin_matrix(model)
    elif args.model:
        if args.n is None:
            raise FormatError("--model needs --n")
        model = build_named_model(args.model, args.n)
        low = args.model.lower()
        if low == "gamma":
            matrix = gamma_block_matrix(args.n)
        elif low == "delta":
            matrix = delta_block_matrix(args.n)
        else:
            matrix = margin_matrix(model)
    else:
        raise FormatError("model subcommand needs --model NAME --n N or --model-file")
    rows = as_rows(matrix)
    if args.export:
        save_matrix(rows, args.export)
    if args.save_model:
        save_model(model, args.save_model)
    summary = {
        "n": model.n_vars,
        "levels": list(model.levels),
        "facets": [[v + 1 for v in f] for f in model.complex.facets],
        "rows": len(rows),
        "cols": len(rows[0]) if rows else 0,
    }
    sys.stdout.write(render_report(summary))
    return 0


def _cmd_gap(args) -> int:
    rows = _resolve_matrix(args)
    b = load_margin(args.margin)
    cost = unit_cost(len(rows[0]), args.cost_cell)
    report = gap(rows, cost, b, node_budget=args.node_budget)
    sys.stdout.write(render_report(report))
    return 0


def _cmd_bounds(args) -> int:
    rows = _resolve_matrix(args)
    b = load_margin(args.margin)
    result = cell_bounds(rows, b, args.cell, node_budget=args.node_budget)
    summary = {
        "status": result.status,
        "lp_min": result.lp_min,
        "ip_min": result.ip_min,
        "lp_max": result.lp_max,
        "ip_max": result.ip_max,
    }
    sys.stdout.write(render_report(summary))
    return 0


def _make_basis(rows, kind: str, max_elements: int, max_pairs: int):
    if kind == "graver":
        return graver_basis(rows, max_elements=max_elements, max_pairs=max_pairs)
    order = TermOrder.first_cell(len(rows[0]))
    return reduced_groebner(rows, order, max_elements=max_elements,
                            max_pairs=max_pairs)


def _cmd_basis(args) -> int:
    rows = _resolve_matrix(args)
    basis = _make_basis(rows, args.kind, args.max_elements, args.max_pairs)
    if args.out:
        save_basis(basis, args.out)
        summary = {
            "kind": basis.kind,
            "elements": len(basis.elements),
            "matrix_fingerprint": basis.matrix_fingerprint,
            "out": args.out,
        }
        sys.stdout.write(render_report(summary))
    else:
        sys.stdout.write(basis_text(basis))
    return 0


def _cmd_stdpairs(args) -> int:
    if args.verify_sullivant is not None:
        report = verify_sullivant_certificates(args.verify_sullivant,
                                               node_budget=args.node_budget)
        sys.stdout.write(render_report(report))
        return 0
    rows = _resolve_matrix(args)
    order = TermOrder.first_cell(len(rows[0]))
    gb = reduced_groebner(rows, order)
    records = pair_survey(gb, rows, t_max=args.t_max,
                          node_budget=args.node_budget,
                          max_nodes=args.max_nodes)
    pairs_out = []
    positive = 0
    for rec in records:
        if rec.estimate.lower > 0:
            positive += 1
        pairs_out.append({
            "root": {str(j): x for j, x in enumerate(rec.pair.root) if x},
            "free": list(rec.pair.free),
            "gap_lower": rec.estimate.lower,
            "gap_upper": rec.estimate.upper,
            "free_below_rank": rec.free_below_rank,
        })
    summary = {
        "total": len(records),
        "positive_gap_lower": positive,
        "pairs": pairs_out,
    }
    sys.stdout.write(render_report(summary))
    return 0


def _cmd_verify(args) -> int:
    report = verify_sullivant_certificates(args.n, node_budget=args.node_budget,
                                           max_n=args.max_n)
    sys.stdout.write(render_report(report))
    return 0


def _cmd_rarity(args) -> int:
    config = SampleConfig(n=args.n, q=args.q, samples=args.samples,
                          seed=args.seed, distribution=args.dist)
    report = rarity_run(config, node_budget=args.node_budget,
                        membership_cap=args.membership_cap, jobs=args.jobs,
                        keep_records=args.csv is not None)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "gap", "hits", "dominates_witness"])
            for rec in report.records:
                writer.writerow([rec.index, str(rec.gap),
                                 ";".join(str(k) for k in rec.hits),
                                 int(rec.dominates_witness)])
    summary = {
        "config": report.config,
        "counted": report.counted,
        "excluded": report.excluded,
        "histogram": [[g, c] for g, c in report.histogram],
        "sullivant_hits": list(report.sullivant_hits),
        "hit_fraction": report.hit_fraction,
        "dimensions": report.dimensions,
        "threshold_note": report.threshold_note,
    }
    sys.stdout.write(render_report(summary))
    return 0


def _cmd_dims(args) -> int:
    sys.stdout.write(render_report(dimension_report(args.n)))
    return 0


def _cmd_markov(args) -> int:
    rows = _resolve_matrix(args)
    if args.basis_file:
        basis = load_basis(args.basis_file)
    else:
        basis = _make_basis(rows, args.kind, args.max_elements, args.max_pairs)
    report = markov_entry_check(basis, rows)
    sys.stdout.write(render_report(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="margingap",
        description="Exact gap, basis, and standard-pair analysis for "
                    "binary-table margin matrices.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", help="build a model and export its matrix")
    p.add_argument("--model", "--name", dest="model", metavar="NAME")
    p.add_argument("--n", type=int)
    p.add_argument("--model-file", metavar="PATH")
    p.add_argument("--export", metavar="PATH", help="write the matrix exchange file")
    p.add_argument("--save-model", metavar="PATH", help="write the model JSON file")
    p.set_defaults(func=_cmd_model)

    p = sub.add_parser("gap", help="exact IP-LP gap for a margin vector")
    _add_matrix_source(p)
    p.add_argument("--margin", required=True, metavar="PATH")
    p.add_argument("--cost-cell", type=int, default=0)
    p.add_argument("--node-budget", type=int, default=200000)
    p.set_defaults(func=_cmd_gap)

    p = sub.add_parser("bounds", help="exact LP and IP bounds for one cell")
    _add_matrix_source(p)
    p.add_argument("--margin", required=True, metavar="PATH")
    p.add_argument("--cell", type=int, required=True)
    p.add_argument("--node-budget", type=int, default=200000)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("basis", help="Graver or reduced Groebner basis")
    _add_matrix_source(p)
    p.add_argument("--kind", choices=("graver", "gb"), default="graver")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--max-elements", type=int, default=200000)
    p.add_argument("--max-pairs", type=int, default=50_000_000)
    p.set_defaults(func=_cmd_basis)

    p = sub.add_parser("stdpairs", help="standard pairs with gap brackets")
    _add_matrix_source(p, required=False)
    p.add_argument("--t-max", type=int, default=16)
    p.add_argument("--node-budget", type=int, default=200000)
    p.add_argument("--max-nodes", type=int, default=5_000_000)
    p.add_argument("--verify-sullivant", type=int, metavar="N",
                   help="run the certificate report instead of enumeration")
    p.set_defaults(func=_cmd_stdpairs)

    p = sub.add_parser("verify-sullivant", help="heavy-pair certificate report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--node-budget", type=int, default=400000)
    p.add_argument("--max-n", type=int, default=6)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("rarity", help="Monte Carlo margin experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", choices=("uniform-composition", "multinomial-uniform"),
                   default="uniform-composition")
    p.add_argument("--csv", metavar="PATH", help="per-sample dump")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--node-budget", type=int, default=200000)
    p.add_argument("--membership-cap", type=int, default=10**6)
    p.set_defaults(func=_cmd_rarity)

    p = sub.add_parser("dims", help="cone and slice dimension report")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_dims)

    p = sub.add_parser("markov-check",
                       help="entry bound report for wide-support basis elements")
    _add_matrix_source(p)
    p.add_argument("--kind", choices=("graver", "gb"), default="graver")
    p.add_argument("--basis-file", metavar="PATH",
                   help="reuse a saved basis instead of recomputing")
    p.add_argument("--max-elements", type=int, default=200000)
    p.add_argument("--max-pairs", type=int, default=50_000_000)
    p.set_defaults(func=_cmd_markov)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "kind", None) in ("graver", "gb"):
        args.kind = {"graver": "graver", "gb": "reduced_groebner"}[args.kind]
    try:
        return args.func(args)
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MargingapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
