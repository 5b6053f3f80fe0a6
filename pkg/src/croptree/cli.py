"""Command-line surface: oldeman, train, compare, recommend.

Exit codes: 0 success, 1 usage or parameter errors, 2 data errors.
Commands that write files do so atomically; a failing run leaves no
partial output behind.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from typing import List, Optional

from .climate import (CLASS_DOMAIN, MONTH_NAMES, CroppingPattern,
                      DEFAULT_B3_PATTERN, MissingPolicy, cropping_pattern,
                      pattern_for_label)
from .dataset import (Dataset, count_by_type_region, dataset_from_pairs,
                      label_dataset, label_records, parse_labeled_file,
                      parse_rainfall_file, sniff_labeled, CountTable)
from .errors import DataError
from .evaluation import INDICATOR_ROWS, ComparisonTable, compare
from .model_io import load_model, save_model
from .trees import ALGORITHMS, TrainParams, predict, train, tree_size

_POLICIES = {
    "zerofill": MissingPolicy.ZERO_FILL,
    "skip": MissingPolicy.SKIP_STATION,
    "error": MissingPolicy.ERROR,
}

_PATTERNS_BY_TEXT = {p.value: p for p in CroppingPattern}


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default of 2 is reserved for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _k_flag(text: str):
    if text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"k must be an integer or 'auto', got {text!r}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="croptree",
                     description="Oldeman climate labeling and decision-tree "
                                 "cropping-pattern classification")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_policy(p):
        p.add_argument("--missing-policy", choices=sorted(_POLICIES),
                       default="zerofill",
                       help="how to treat missing months when labeling")

    def add_b3(p):
        p.add_argument("--b3-pattern", choices=sorted(_PATTERNS_BY_TEXT),
                       default=DEFAULT_B3_PATTERN.value,
                       help="cropping pattern to use for the B3 climate class")

    p = sub.add_parser("oldeman", help="label a rainfall file with Oldeman classes")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    add_policy(p)
    add_b3(p)
    p.set_defaults(func=_cmd_oldeman)

    p = sub.add_parser("train", help="train a decision tree on labeled rainfall data")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--min-leaf", type=int, default=2)
    p.add_argument("--confidence-factor", type=float, default=0.25)
    p.add_argument("--no-prune", action="store_true",
                   help="skip pessimistic pruning (gainratio only)")
    p.add_argument("--k", type=_k_flag, default=None,
                   help="attribute subset size for randomsubset (default auto)")
    p.add_argument("--prune-folds", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    add_policy(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("compare", help="compare learners on one dataset")
    p.add_argument("input")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--algorithms", default=",".join(ALGORITHMS),
                   help="comma-separated learner names")
    p.add_argument("--cv", type=int, default=10, help="cross-validation folds")
    p.add_argument("--resubstitution", action="store_true",
                   help="score on the training data instead of cross-validating")
    p.add_argument("--seed", type=int, default=1)
    add_policy(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("recommend", help="predict classes and cropping patterns")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--complete-only", action="store_true",
                   help="drop stations with any missing month")
    add_b3(p)
    p.set_defaults(func=_cmd_recommend)
    return parser


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def _atomic_write_bytes(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory,
                               prefix=os.path.basename(path) + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _atomic_write(path: str, text: str) -> None:
    _atomic_write_bytes(path, text.encode("utf-8"))


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        _atomic_write(path, text)


def _parse_input(path: str):
    """Parse a rainfall file, labeled or raw, naming the file in errors."""
    data = _read_bytes(path)
    try:
        if sniff_labeled(data):
            return parse_labeled_file(data)
        return parse_rainfall_file(data)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def _load_dataset(path: str, policy: MissingPolicy) -> Dataset:
    parsed = _parse_input(path)
    try:
        if parsed and isinstance(parsed[0], tuple):
            return dataset_from_pairs(parsed)
        return label_dataset(parsed, policy)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def _render_count_table(table: CountTable) -> str:
    lines = ["climate_class," + ",".join(table.regions) + ",total"]
    for cls, row, total in zip(table.classes, table.counts, table.class_totals):
        lines.append(f"{cls}," + ",".join(str(c) for c in row) + f",{total}")
    lines.append("total," + ",".join(str(t) for t in table.region_totals)
                 + f",{table.total}")
    return "\n".join(lines) + "\n"


def _render_comparison(table: ComparisonTable) -> str:
    def kappa_text(value):
        return "undefined" if value is None else f"{value:.4f}"

    columns = [
        [f"{r.accuracy_pct:.2f}" for r in table.reports],
        [kappa_text(r.kappa) for r in table.reports],
        [f"{r.mean_absolute_error:.4f}" for r in table.reports],
        [f"{r.root_mean_squared_error:.4f}" for r in table.reports],
        [str(r.tree_size) for r in table.reports],
    ]
    lines = ["indicator," + ",".join(table.algorithms)]
    for name, cells in zip(INDICATOR_ROWS, columns):
        lines.append(name + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


def _cmd_oldeman(args) -> int:
    parsed = _parse_input(args.input)
    if parsed and isinstance(parsed[0], tuple):
        raise DataError(f"{args.input}: already labeled; expected a raw rainfall file")
    if not parsed:
        raise DataError(f"{args.input}: no station rows")
    policy = _POLICIES[args.missing_policy]
    try:
        pairs = label_records(parsed, policy)
    except DataError as exc:
        raise DataError(f"{args.input}: {exc}") from None
    if not pairs:
        raise DataError(f"{args.input}: every station was skipped by the "
                        "missing-data policy")
    b3 = _PATTERNS_BY_TEXT[args.b3_pattern]
    lines = ["station,region,year,climate_class,cropping_pattern"]
    for rec, climate in pairs:
        pattern = cropping_pattern(climate, b3)
        lines.append(f"{rec.station_id},{rec.region},{rec.year},"
                     f'{climate.label},"{pattern.display}"')
    _atomic_write(args.output, "\n".join(lines) + "\n")
    dataset = dataset_from_pairs([(rec, c.label) for rec, c in pairs])
    sys.stdout.write(_render_count_table(count_by_type_region(dataset)))
    return 0


def _build_params(args) -> TrainParams:
    if args.algorithm == "gainratio":
        return TrainParams("gainratio", min_leaf=args.min_leaf,
                           confidence_factor=args.confidence_factor,
                           prune=not args.no_prune, seed=args.seed)
    if args.algorithm == "randomsubset":
        return TrainParams("randomsubset", k=args.k, seed=args.seed)
    return TrainParams("reducederror", min_leaf=args.min_leaf,
                       prune_folds=args.prune_folds, seed=args.seed)


def _cmd_train(args) -> int:
    dataset = _load_dataset(args.input, _POLICIES[args.missing_policy])
    params = _build_params(args)
    model = train(dataset, params)
    _atomic_write_bytes(args.output, save_model(model))
    correct = sum(predict(model, inst.features).predicted_class == inst.label
                  for inst in dataset.instances)
    print(f"tree size: {tree_size(model)}")
    print(f"training accuracy: {100.0 * correct / len(dataset):.2f}%")
    return 0


def _cmd_compare(args) -> int:
    names = [name.strip() for name in args.algorithms.split(",") if name.strip()]
    if not names:
        raise ValueError("no algorithms requested")
    for name in names:
        if name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {name!r}")
    if not args.resubstitution and args.cv < 2:
        raise ValueError("cross-validation needs at least 2 folds")
    dataset = _load_dataset(args.input, _POLICIES[args.missing_policy])
    table = compare([TrainParams(name, seed=args.seed) for name in names],
                    dataset, k=args.cv, seed=args.seed,
                    resubstitution=args.resubstitution)
    _emit(_render_comparison(table), args.output)
    return 0


def _cmd_recommend(args) -> int:
    try:
        model = load_model(_read_bytes(args.model))
    except DataError as exc:
        raise DataError(f"{args.model}: {exc}") from None
    if (model.attribute_names != MONTH_NAMES
            or model.class_domain != CLASS_DOMAIN):
        raise DataError(f"{args.model}: model does not use the rainfall "
                        "pipeline's attribute and class domains")
    parsed = _parse_input(args.input)
    if parsed and isinstance(parsed[0], tuple):
        pairs = parsed
    else:
        pairs = [(rec, None) for rec in parsed]
    if args.complete_only:
        pairs = [(rec, gold) for rec, gold in pairs if rec.complete]
    if not pairs:
        raise DataError(f"{args.input}: no stations to classify")
    b3 = _PATTERNS_BY_TEXT[args.b3_pattern]
    lines = ["station,region,climate_class,cropping_pattern,data_status"]
    correct = 0
    labeled = all(gold is not None for _rec, gold in pairs)
    for rec, gold in pairs:
        prediction = predict(model, rec.rainfall)
        pattern = pattern_for_label(prediction.predicted_class, b3)
        status = "complete" if rec.complete else "incomplete"
        lines.append(f"{rec.station_id},{rec.region},"
                     f'{prediction.predicted_class},"{pattern.display}",{status}')
        if labeled and prediction.predicted_class == gold:
            correct += 1
    _emit("\n".join(lines) + "\n", args.output)
    if labeled:
        print(f"holdout accuracy: {100.0 * correct / len(pairs):.2f}% "
              f"({correct}/{len(pairs)})")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else int(exc.code)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
