"""Command line front-end: ``orbent plan|run|study-threshold|report``.

Errors exit with status 2 and a JSON object ``{"error": ..., "message": ...}``
on stderr. Output goes under ``--out``, else ``$ORBENT_OUTPUT_DIR``, else
``./orbent-out``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .denoise import bulk_edge_study
from .entropy import EntropyReport
from .planner import Target, default_targets, plan, verify_reference_sets
from .pipeline import OUTPUT_ENV, DEFAULT_P, RunConfig, run


def _root(args) -> Path:
    return Path(args.out or os.environ.get(OUTPUT_ENV) or "orbent-out")


def _add_ssr(p: argparse.ArgumentParser, default: bool) -> None:
    p.add_argument("--ssr", dest="ssr", action="store_true", default=default, help="apply local number SSR")
    p.add_argument("--no-ssr", dest="ssr", action="store_false")


def cmd_plan(args) -> int:
    if args.pair:
        i, j = sorted(args.pair)
        targets = [Target((i, j))]
    else:
        targets = default_targets(args.orbitals)
    p = plan(targets, ssr=args.ssr, scope=args.scope, n_qubits=2 * args.orbitals)
    summary = {"ssr": p.ssr, "scope": p.scope, "total": p.total, "counts": p.counts()}
    if args.pair and tuple(sorted(args.pair)) == (0, 1):
        cmp = verify_reference_sets(p)
        summary["matches_reference_sets"] = cmp.ok
        if not cmp.ok:
            summary["diff"] = cmp.diff
    out = _root(args) / ("plan-ssr.json" if p.ssr else "plan-nossr.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(p.to_json())
    summary["written"] = str(out)
    for k, n in summary["counts"].items():
        print(f"{k:12s} {n}")
    print(f"total        {p.total}")
    if "matches_reference_sets" in summary:
        print(f"reference sets match: {summary['matches_reference_sets']}")
    if args.pair:
        for k, group in enumerate(p.sets):
            print(f"set {k}: " + ", ".join(s.label for s in group))
    return 0


def cmd_run(args) -> int:
    pairs = (tuple(sorted(args.pair)),) if args.pair else None
    cfg = RunConfig(fixture=args.fixture, ssr=args.ssr, shots=args.shots, p=args.p, seed=args.seed,
                    mode=args.mode, noise_reduction=args.noise_reduction, bootstrap=args.bootstrap,
                    hermitize=args.hermitize, pairs=pairs)
    res = run(cfg, out=args.out)
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _print_report(res.report)
    print(f"artifacts: {Path(res.files['manifest.json']).parent}")
    return 0


def _print_report(rep: EntropyReport) -> None:
    print(f"# {rep.label} ({'SSR' if rep.ssr else 'no SSR'})")
    for k, q in rep.quantities.items():
        ci = "" if q.lo is None else f"  [{q.lo:.6f}, {q.hi:.6f}]"
        print(f"{k:12s} {q.value:.6f}{ci}")


def cmd_study(args) -> int:
    res = bulk_edge_study(args.R, args.samples, args.d, args.sigma, args.seed)
    out = _root(args) / "threshold-study.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps([r.to_dict() for r in res], indent=2) + "\n")
    print(f"{'R':>5} {'tau':>9} {'edge':>9} {'signal kept':>12} {'noise>tau':>10} {'false alarm':>12}")
    for r in res:
        print(f"{r.R:5.2f} {r.tau:9.5f} {r.edge:9.5f} {r.signal_survival:12.3f} "
              f"{r.noise_above_tau:10.4f} {r.pure_noise_false_alarm:12.3f}")
    print(f"written: {out}")
    return 0


def cmd_report(args) -> int:
    path = Path(args.path)
    if path.is_dir():
        path = path / "report.json"
    rep = EntropyReport.from_dict(json.loads(path.read_text()))
    if args.format == "csv":
        sys.stdout.write(rep.to_csv())
    else:
        _print_report(rep)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(json.dumps({"error": "UsageError", "message": message}), file=sys.stderr)
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="orbent", description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_ENV} or ./orbent-out)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plan", help="group Pauli strings into commuting measurement sets")
    _add_ssr(p, True)
    p.add_argument("--pair", type=int, nargs=2, metavar=("I", "J"))
    p.add_argument("--orbitals", type=int, default=4)
    p.add_argument("--scope", choices=["per-ordm", "global"], default="per-ordm")
    p.set_defaults(func=cmd_plan)

    r = sub.add_parser("run", help="plan, measure, reconstruct, denoise and report")
    r.add_argument("--fixture", required=True, help="fixture label or path to a fixture JSON")
    _add_ssr(r, True)
    r.add_argument("--mode", choices=["exact", "simulate"], default="exact")
    r.add_argument("--shots", type=int, default=10_000)
    r.add_argument("--p", type=float, default=DEFAULT_P, help="global depolarizing parameter")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--noise-reduction", choices=["on", "raw-baseline", "off"], default="on")
    r.add_argument("--bootstrap", type=int, default=0, help="number of bootstrap resamples")
    r.add_argument("--hermitize", choices=["mirror", "average"], default="mirror")
    r.add_argument("--pair", type=int, nargs=2, metavar=("I", "J"))
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("study-threshold", help="singular-value bulk-edge study")
    s.add_argument("--R", type=float, nargs="+", default=[1.0, 0.8, 0.2])
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--d", type=int, default=16)
    s.add_argument("--sigma", type=float, default=0.01)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_study)

    rp = sub.add_parser("report", help="print a stored entropy report")
    rp.add_argument("path", help="run directory or report.json")
    rp.add_argument("--format", choices=["table", "csv"], default="table")
    rp.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # reported as machine-readable JSON
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(json.dumps({"error": type(exc).__name__, "message": str(msg)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
