"""Command-line frontend: induce / train / predict / eval / bench.

All subcommands are batch, file-in/file-out, and fully seeded; identical
invocations on identical inputs write identical bytes (wall-clock fields in
bench output excepted).  Exit codes: 0 success, 1 usage error, 2 data
error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import traceback
import warnings

import numpy as np

from .classifier import TrainConfig, load_model, predict, save_model, train
from .evaluation import METHOD_CONFIGS, benchmark_scaling, cross_validate
from .exceptions import DataError
from .extraction import EXTRACTORS
from .induction import INDUCERS, induce_all
from .table import drop_inconsistent, find_inconsistent, load_csv, normalize_min_max

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

DEFAULT_SEED = int(os.environ.get("FUZZYRULES_SEED", "42"))
DEFAULT_THREADS = int(os.environ.get("FUZZYRULES_THREADS", str(os.cpu_count() or 1)))


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here is exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _alpha(text: str) -> float:
    value = float(text)
    if not 0.0 <= value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in [0, 1), got {text}")
    return value


def _beta(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"beta must lie in (0, 1], got {text}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _pos_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _label_column(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def _add_io_flags(sub, needs_label: bool = True):
    sub.add_argument("--input", required=True, help="input CSV file")
    sub.add_argument("--no-header", dest="has_header", action="store_false",
                     help="input CSV has no header row")
    if needs_label:
        sub.add_argument("--label-column", type=_label_column, default=None,
                         help="label column index or name (default: last column)")
        sub.add_argument("--drop-inconsistent", action="store_true",
                         help="remove instances with identical condition values "
                              "but different labels before induction")
    sub.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)
    sub.add_argument("--threads", type=_pos_int, default=DEFAULT_THREADS,
                     help="induction fan-out (default: all cores)")


def _add_train_flags(sub):
    sub.add_argument("--alpha", type=_alpha, default=0.0)
    sub.add_argument("--beta", type=_beta, default=0.01,
                     help="batch fraction (bsrc only)")
    sub.add_argument("--delta", type=_nonneg_int, default=0,
                     help="cover-degree stopping threshold (bsrc only)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzyrules",
                     description="Rule induction and rule-based classification "
                                 "on fuzzy similarity tables.")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("induce", parents=[], help="induce one rule per instance")
    _add_io_flags(p)
    _add_train_flags(p)
    p.add_argument("--inducer", choices=INDUCERS, default="a-cvr")
    p.add_argument("--out", required=True, help="output JSON-lines reduct file")

    p = sub.add_parser("train", help="train a rule classifier")
    _add_io_flags(p)
    _add_train_flags(p)
    p.add_argument("--inducer", choices=INDUCERS, default="a-cvr")
    p.add_argument("--extractor", choices=(*EXTRACTORS, "bsrc"), default="gfrc")
    p.add_argument("--out", required=True, help="output model JSON file")

    p = sub.add_parser("predict", help="classify instances with a saved model")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--input", required=True, help="CSV of condition values")
    p.add_argument("--no-header", dest="has_header", action="store_false")
    p.add_argument("--label-column", type=_label_column, default=None,
                   help="column to ignore when the input still carries labels")
    p.add_argument("--out", required=True, help="output prediction CSV")

    p = sub.add_parser("eval", help="k-fold cross-validation")
    _add_io_flags(p)
    _add_train_flags(p)
    p.add_argument("--inducer", choices=INDUCERS, default="a-cvr")
    p.add_argument("--extractor", choices=(*EXTRACTORS, "bsrc"), default="gfrc")
    p.add_argument("--folds", type=_pos_int, default=5)
    p.add_argument("--stratified", action="store_true")
    p.add_argument("--paper-normalization", action="store_true",
                   help="normalize the whole table up front instead of "
                        "per training fold")
    p.add_argument("--out", required=True, help="output report JSON")
    p.add_argument("--csv", default=None, help="also write a flat CSV report")

    p = sub.add_parser("bench", help="scaling benchmark over growing prefixes")
    _add_io_flags(p)
    _add_train_flags(p)
    p.add_argument("--methods", required=True,
                   help="comma-separated subset of: " + ",".join(sorted(METHOD_CONFIGS)))
    p.add_argument("--subgroups", type=_pos_int, default=10)
    p.add_argument("--axis", choices=("instances", "attributes"),
                   default="instances")
    p.add_argument("--out", required=True, help="output timing CSV")
    p.add_argument("--flat-csv", default=None,
                   help="also write the per-phase flat CSV layout")
    p.add_argument("--json", dest="json_out", default=None,
                   help="also write the full timing report as JSON")
    return parser


def _load_table(args):
    table = load_csv(args.input, has_header=args.has_header,
                     label_column=args.label_column)
    table = normalize_min_max(table)
    if getattr(args, "drop_inconsistent", False):
        table, removed = drop_inconsistent(table)
        if removed:
            print(f"note: removed {removed} inconsistent instances",
                  file=sys.stderr)
    else:
        bad = find_inconsistent(table)
        if bad:
            print(f"WARNING: {len(bad)} instances share identical condition "
                  f"values with different labels (e.g. indices "
                  f"{bad[:5]}); their rules will cover nothing. "
                  f"Consider --drop-inconsistent.", file=sys.stderr)
    return table


def _cmd_induce(args) -> int:
    table = _load_table(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)   # already reported above
        reducts = induce_all(table, args.alpha, method=args.inducer,
                             threads=args.threads)
    with open(args.out, "w", encoding="utf-8") as fh:
        for r in reducts:
            fh.write(json.dumps(r.to_record(table.class_names)) + "\n")
    print(f"wrote {len(reducts)} reducts to {args.out}")
    return EXIT_OK


def _cmd_train(args) -> int:
    table = _load_table(args)
    config = TrainConfig(alpha=args.alpha, inducer=args.inducer,
                         extractor=args.extractor, beta=args.beta,
                         delta=args.delta, seed=args.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        clf = train(table, config, threads=args.threads)
    save_model(clf, args.out)
    print(f"trained {len(clf.rules)} rules -> {args.out}")
    return EXIT_OK


def _read_instances(path, has_header: bool, label_column, m: int) -> np.ndarray:
    from .exceptions import ParseError
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise DataError(f"empty input file: {path}")
    if has_header:
        rows = rows[1:]
        if not rows:
            raise DataError(f"no data rows in {path}")
    out = []
    for r, row in enumerate(rows):
        cells = [c.strip() for c in row]
        if label_column is not None:
            idx = label_column if isinstance(label_column, int) else None
            if idx is None:
                raise DataError("label column by name requires reading the header; "
                                "use a numeric index")
            if idx < 0:
                idx += len(cells)
            if 0 <= idx < len(cells):
                cells = cells[:idx] + cells[idx + 1:]
        if len(cells) != m:
            raise ParseError(f"expected {m} condition values, found {len(cells)}",
                             row=r + 1 + (1 if has_header else 0))
        try:
            out.append([float(c) for c in cells])
        except ValueError:
            raise ParseError("cannot parse condition value as a real number",
                             row=r + 1 + (1 if has_header else 0)) from None
    return np.asarray(out, dtype=np.float64)


def _cmd_predict(args) -> int:
    clf = load_model(args.model)
    matrix = _read_instances(args.input, args.has_header, args.label_column, clf.m)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["instance_index", "predicted_label",
                         "matched_rule_owner", "matching_degree"])
        for i, row in enumerate(matrix):
            res = predict(clf, row)
            writer.writerow([i, res.label, res.rule.owner,
                             repr(res.matching_degree)])
    print(f"predicted {matrix.shape[0]} instances -> {args.out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    table = _load_table(args)
    config = TrainConfig(alpha=args.alpha, inducer=args.inducer,
                         extractor=args.extractor, beta=args.beta,
                         delta=args.delta, seed=args.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        report = cross_validate(table, config, k=args.folds, seed=args.seed,
                                stratified=args.stratified,
                                paper_normalization=args.paper_normalization,
                                threads=args.threads)
    report.to_json(args.out)
    if args.csv:
        report.to_flat_csv(args.csv, dataset=os.path.basename(args.input))
    for note in report.warnings:
        print(f"warning: {note}", file=sys.stderr)
    print(f"accuracy {report.mean:.4f} +/- {report.std:.4f} "
          f"({args.folds}-fold, {report.normalization_mode} normalization) "
          f"-> {args.out}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    table = _load_table(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise DataError("no methods given")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        report = benchmark_scaling(
            table, methods, g=args.subgroups, seed=args.seed,
            alpha=args.alpha, beta=args.beta, delta=args.delta,
            axis=args.axis, threads=args.threads,
            progress=lambda line: print(line, file=sys.stderr))
    dataset = os.path.basename(args.input)
    report.to_csv(args.out, dataset=dataset)
    if args.flat_csv:
        report.to_flat_csv(args.flat_csv, dataset=dataset)
    if args.json_out:
        report.to_json(args.json_out)
    print(f"benchmarked {len(methods)} methods over {args.subgroups} "
          f"{args.axis} prefixes -> {args.out}")
    return EXIT_OK


_COMMANDS = {
    "induce": _cmd_induce,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
}


def run(argv) -> int:
    """Parse and execute one invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (DataError, OSError, ValueError) as exc:
        print(f"fuzzyrules {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception:
        print(f"fuzzyrules {args.command}: internal error", file=sys.stderr)
        traceback.print_exc()
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
