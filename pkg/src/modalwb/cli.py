"""Command-line surface.

Subcommands: ``frame info``, ``frame md``, ``check``, ``count``, ``tune``,
``audit``, ``export dot``. Every subcommand accepts ``--json`` for
machine-readable output. Exit codes: 0 success, 1 property failure
(invalid formula, audit failures), 2 usage or input errors. The
environment variable MODALWB_CAP overrides the default brute-force caps.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import audit, frames, partitions, semantics, syntax

DEFAULT_AUDIT_SPECS = {
    "tuned-equivalences": audit.GenSpec(n_max=5, alphabet_size=2, density=0.4),
    "height-correspondence": audit.GenSpec(n_max=4, density=0.3),
    "atr-correspondence": audit.GenSpec(n_max=4, density=0.3),
    "rpp-correspondence": audit.GenSpec(n_max=4, density=0.3),
    "md-sum": audit.GenSpec(n_max=4, density=0.35),
    "top-down": audit.GenSpec(n_max=8, density=0.3),
    "cluster-bound": audit.GenSpec(n_max=8, density=0.3),
    "lex-phi": audit.GenSpec(n_max=3, density=0.4),
    "diff-axioms": audit.GenSpec(n_max=4, density=0.35),
    "definability": audit.GenSpec(n_max=8, density=0.3),
    "byrd-frame": audit.GenSpec(n_max=8),
}

DEFAULT_AUDIT_TRIALS = {
    "tuned-equivalences": 500,
    "height-correspondence": 200,
    "atr-correspondence": 200,
    "rpp-correspondence": 200,
    "md-sum": 100,
    "top-down": 100,
    "cluster-bound": 100,
    "lex-phi": 100,
    "diff-axioms": 100,
    "definability": 100,
    "byrd-frame": 5,
}


class _UsageError(Exception):
    pass


def _env_cap(default: int) -> int:
    raw = os.environ.get("MODALWB_CAP")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"MODALWB_CAP must be an integer, got {raw!r}") from None


def _load(path) -> frames.Frame:
    try:
        return frames.load_frame(path)
    except FileNotFoundError:
        raise _UsageError(f"frame file not found: {path}") from None
    except (ValueError, json.JSONDecodeError) as exc:
        raise _UsageError(f"bad frame file {path}: {exc}") from None


def _emit(data: dict, as_json: bool, lines) -> None:
    if as_json:
        print(json.dumps(data, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _cmd_frame_info(args) -> int:
    frame = _load(args.path)
    skel = frames.skeleton(frame)
    index = frames.transitivity_index(frame)
    try:
        reducible = frames.is_path_reducible(frame, index)
    except frames.PathBudgetExceeded:
        reducible = None
    data = {
        "points": frame.n,
        "alphabet": list(frame.alphabet.names),
        "transitivity_index": index,
        "height": frames.height(frame),
        "clusters": len(skel.clusters),
        "path_reducible_at_index": reducible,
    }
    _emit(
        data,
        args.json,
        [
            f"points: {data['points']}",
            f"alphabet: {', '.join(data['alphabet'])}",
            f"transitivity index: {data['transitivity_index']}",
            f"height: {data['height']}",
            f"clusters: {data['clusters']}",
            f"path reducible at index: {data['path_reducible_at_index']}",
        ],
    )
    return 0


def _cmd_frame_md(args) -> int:
    frame = _load(args.path)
    if args.sample is not None:
        md = partitions.frame_modal_depth(
            frame, mode="sampled", trials=args.sample, seed=args.seed
        )
        mode = "sampled"
    else:
        if frame.n > partitions.EXACT_DEPTH_LIMIT:
            raise _UsageError(
                f"frame has {frame.n} points; exact mode needs at most "
                f"{partitions.EXACT_DEPTH_LIMIT}, use --sample N"
            )
        md = partitions.frame_modal_depth(frame, mode="exact")
        mode = "exact"
    data = {"modal_depth": md, "mode": mode}
    note = "" if mode == "exact" else " (lower bound)"
    _emit(data, args.json, [f"modal depth: {md} [{mode}{note}]"])
    return 0


def _cmd_check(args) -> int:
    frame = _load(args.path)
    try:
        formula = syntax.parse(args.formula, frame.alphabet)
    except syntax.ParseError as exc:
        raise _UsageError(f"bad formula: {exc}") from None
    cap = args.cap if args.cap is not None else _env_cap(semantics.DEFAULT_VALUATION_CAP)
    try:
        valid = semantics.validity_bruteforce(frame, formula, cap=cap)
    except partitions.CapExceeded as exc:
        raise _UsageError(str(exc)) from None
    data = {"formula": args.formula, "valid": valid}
    _emit(data, args.json, ["valid" if valid else "not valid"])
    return 0 if valid else 1


def _cmd_count(args) -> int:
    frame = _load(args.path)
    cap = args.cap if args.cap is not None else _env_cap(4096)
    try:
        count = partitions.count_k_formulas(frame, args.k, cap=cap)
    except partitions.CapExceeded as exc:
        raise _UsageError(str(exc)) from None
    data = {"k": args.k, "count": count}
    _emit(data, args.json, [f"nonequivalent {args.k}-formulas: {count}"])
    return 0


def _cmd_tune(args) -> int:
    frame = _load(args.path)
    try:
        sets = json.loads(args.sets)
        family = [frozenset(int(p) for p in s) for s in sets]
    except (ValueError, TypeError) as exc:
        raise _UsageError(f"bad --sets value: {exc}") from None
    try:
        base = partitions.induced_partition(frame.n, family)
        refined = partitions.coarsest_tuned_refinement(frame, base)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    data = {
        "blocks": [sorted(b) for b in refined.blocks],
        "birth_stages": list(refined.birth) if refined.birth else [],
        "tuned": partitions.is_tuned(frame, refined),
    }
    _emit(
        data,
        args.json,
        [f"blocks: {data['blocks']}", f"tuned: {data['tuned']}"],
    )
    return 0


def _cmd_audit(args) -> int:
    if args.suite not in audit.SUITES:
        raise _UsageError(
            f"unknown suite {args.suite!r}; known: {', '.join(sorted(audit.SUITES))}"
        )
    spec = DEFAULT_AUDIT_SPECS[args.suite]
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    trials = args.trials if args.trials is not None else DEFAULT_AUDIT_TRIALS[args.suite]
    report = audit.run_suite(args.suite, spec, trials)
    if args.out:
        audit.emit_report(report, args.out)
    data = audit.report_to_dict(report)
    _emit(
        data,
        args.json,
        [
            f"suite: {report.suite}",
            f"trials: {report.trials}",
            f"passes: {report.passes}",
            f"failures: {len(report.failures)}",
        ]
        + [f"  trial {f.trial}: {f.detail}" for f in report.failures],
    )
    return 0 if report.ok() else 1


def _cmd_export_dot(args) -> int:
    frame = _load(args.path)
    dot = frames.to_dot(frame)
    if args.json:
        print(json.dumps({"dot": dot}, sort_keys=True))
    else:
        print(dot, end="")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modalwb",
        description="Workbench for finite polymodal Kripke frames.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    frame_p = sub.add_parser("frame", help="frame inspection")
    frame_sub = frame_p.add_subparsers(dest="frame_command", required=True)
    info_p = frame_sub.add_parser("info", help="relational invariants of a frame")
    info_p.add_argument("path")
    info_p.add_argument("--json", action="store_true")
    info_p.set_defaults(fn=_cmd_frame_info)
    md_p = frame_sub.add_parser("md", help="modal depth of a frame")
    md_p.add_argument("path")
    group = md_p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", default=False)
    group.add_argument("--sample", type=int, metavar="N")
    md_p.add_argument("--seed", type=int, default=0)
    md_p.add_argument("--json", action="store_true")
    md_p.set_defaults(fn=_cmd_frame_md)

    check_p = sub.add_parser("check", help="brute-force validity of a formula")
    check_p.add_argument("path")
    check_p.add_argument("formula")
    check_p.add_argument("--cap", type=int)
    check_p.add_argument("--json", action="store_true")
    check_p.set_defaults(fn=_cmd_check)

    count_p = sub.add_parser("count", help="count nonequivalent k-formulas")
    count_p.add_argument("path")
    count_p.add_argument("-k", type=int, required=True)
    count_p.add_argument("--cap", type=int)
    count_p.add_argument("--json", action="store_true")
    count_p.set_defaults(fn=_cmd_count)

    tune_p = sub.add_parser("tune", help="coarsest tuned refinement of seed sets")
    tune_p.add_argument("path")
    tune_p.add_argument("--sets", required=True, help="JSON list of point lists")
    tune_p.add_argument("--json", action="store_true")
    tune_p.set_defaults(fn=_cmd_tune)

    audit_p = sub.add_parser("audit", help="run a property suite")
    audit_p.add_argument("suite")
    audit_p.add_argument("--trials", type=int)
    audit_p.add_argument("--seed", type=int)
    audit_p.add_argument("--out")
    audit_p.add_argument("--json", action="store_true")
    audit_p.set_defaults(fn=_cmd_audit)

    export_p = sub.add_parser("export", help="export a frame")
    export_sub = export_p.add_subparsers(dest="export_command", required=True)
    dot_p = export_sub.add_parser("dot", help="Graphviz DOT rendering")
    dot_p.add_argument("path")
    dot_p.add_argument("--json", action="store_true")
    dot_p.set_defaults(fn=_cmd_export_dot)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.fn(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except frames.PathBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
