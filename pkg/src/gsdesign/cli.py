"""Command-line interface.

Exit codes: 0 success (or optimal search), 2 input error, 3 search stopped
by its budget, 4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import oracle
from .bound import BoundInvariantError
from .encoding import EncodingError, FormatError, decode, load_descriptors, toy_table
from .io import DatasetError, format_results, parse_dataset, parse_results, parse_sequences
from .kernel import GSParams, parse_sigma
from .preimage_dp import ResourceError
from .regression import (
    ModelFormatError,
    NumericError,
    TrainedModel,
    cross_validate,
    expand_grid,
    fit,
    predict,
)
from .search import compare_rankings, design, design_unnormalized

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("gsdesign")


class InputError(Exception):
    pass


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _table(args):
    if args.descriptors in (None, "toy"):
        return toy_table()
    return load_descriptors(_read(args.descriptors), standardize=args.standardize)


def _model(args, table) -> TrainedModel:
    return TrainedModel.from_json(_read(args.model), table)


def _grid(text, conv):
    return [conv(v) for v in str(text).split(",") if v.strip()]


def _scalar(text, conv, name):
    values = _grid(text, conv)
    if len(values) != 1:
        raise InputError(f"--{name} takes a single value here (grids only under 'cv')")
    return values[0]


def cmd_train(args) -> int:
    table = _table(args)
    train = parse_dataset(_read(args.data), table)
    params = GSParams(_scalar(args.k, int, "k"), _scalar(args.sigma_p, parse_sigma, "sigma-p"),
                      _scalar(args.sigma_c, parse_sigma, "sigma-c"))
    lam = _scalar(args.lam, float, "lambda")
    model = fit(train, params, lam, args.normalized, table)
    _write(args.out, model.to_json())
    pred = np.array([predict(model, s) for s in train.sequences])
    resid = pred - train.activities
    print(f"trained {'normalized' if args.normalized else 'unnormalized'} model on "
          f"{len(train)} sequences: rmse={math.sqrt(np.mean(resid ** 2)):.6g} "
          f"max_abs_residual={np.max(np.abs(resid)):.6g}", file=sys.stderr)
    return EXIT_OK


def cmd_cv(args) -> int:
    table = _table(args)
    train = parse_dataset(_read(args.data), table)
    grid = expand_grid(_grid(args.k, int), _grid(args.sigma_p, parse_sigma),
                       _grid(args.sigma_c, parse_sigma))
    params, lam, score = cross_validate(train, grid, _grid(args.lam, float), args.folds, table,
                                        normalized=args.normalized, seed=args.seed)
    summary = {**params.to_dict(), "lambda": lam, "cv_mse": score}
    print(json.dumps(summary, sort_keys=True))
    if args.out:
        _write(args.out, fit(train, params, lam, args.normalized, table).to_json())
    return EXIT_OK


def cmd_predict(args) -> int:
    table = _table(args)
    model = _model(args, table)
    seqs = parse_sequences(_read(args.sequences), table)
    lines = ["sequence,score"] + [f"{decode(s, table)},{predict(model, s)!r}" for s in seqs]
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _run_design(model, args):
    budget = dict(max_nodes=args.max_nodes, max_seconds=args.max_seconds)
    if model.normalized:
        return design(model, args.length, args.top_k, mode=args.mode, **budget)
    return design_unnormalized(model, args.length, args.top_k, **budget)


def cmd_design(args) -> int:
    table = _table(args)
    model = _model(args, table)
    if args.length < model.params.k:
        raise InputError(f"--length {args.length} is shorter than the model's k = {model.params.k}")
    result = _run_design(model, args)
    rows = [(decode(seq, table), predict(model, seq), bound, result.optimal)
            for (seq, _), bound in zip(result.sequences, result.bounds)]
    _write(args.out, format_results(rows))
    st = result.stats
    print(f"expanded={st.expanded} pruned={st.pruned} leaves={st.leaves} "
          f"queue_peak={st.queue_peak} optimal={str(result.optimal).lower()}", file=sys.stderr)
    return EXIT_OK if result.optimal else EXIT_BUDGET


def cmd_compare(args) -> int:
    a = parse_results(_read(args.first))
    b = parse_results(_read(args.second))
    overlap, pcc = compare_rankings(a, b)
    print(f"overlap={overlap!r}")
    print(f"rank_pcc={'n/a' if pcc is None else repr(pcc)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    """Certify the search (or DP) against exhaustive enumeration."""
    table = _table(args)
    model = _model(args, table)
    spec = oracle.EnumerationSpec(table.size, args.length, cap=args.cap)
    objective = "h_star" if model.normalized else "h"
    result = _run_design(model, args)
    if not result.optimal:
        print("FAIL search did not run to completion")
        return EXIT_INTERNAL
    expected = oracle.enum_top_k(model, spec, objective, len(result.sequences))
    ok = True
    for rank, ((s, v), (es, ev)) in enumerate(zip(result.sequences, expected), start=1):
        good = abs(v - ev) <= 1e-9 * max(1.0, abs(ev))
        ok &= good
        print(f"{'PASS' if good else 'FAIL'} rank {rank}: search {decode(s, table)} {v!r} "
              f"oracle {decode(es, table)} {ev!r}")
    return EXIT_OK if ok else EXIT_INTERNAL


def _add_common(p, model=False):
    p.add_argument("--descriptors", default="toy",
                   help="descriptor file (symbol then d values per row), or 'toy'")
    p.add_argument("--standardize", action="store_true",
                   help="scale each descriptor column to zero mean, unit variance")
    if model:
        p.add_argument("--model", required=True, help="model JSON written by 'train'")


def _add_hyper(p):
    p.add_argument("--k", default="3")
    p.add_argument("--sigma-p", dest="sigma_p", default="1.0", help="value or 'inf'")
    p.add_argument("--sigma-c", dest="sigma_c", default="1.0", help="value or 'inf'")
    p.add_argument("--lambda", dest="lam", default="1.0")
    norm = p.add_mutually_exclusive_group()
    norm.add_argument("--normalized", dest="normalized", action="store_true", default=True)
    norm.add_argument("--unnormalized", dest="normalized", action="store_false")


def _add_search(p):
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--top-k", dest="top_k", type=int, default=1)
    p.add_argument("--max-nodes", dest="max_nodes", type=int, default=None)
    p.add_argument("--max-seconds", dest="max_seconds", type=float, default=None)
    p.add_argument("--mode", choices=["auto", "exact", "fast"], default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsdesign", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of option defaults (keys are option dests)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.commands = sub.choices

    p = sub.add_parser("train", help="fit kernel ridge regression")
    _add_common(p)
    _add_hyper(p)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cv", help="grid-search hyperparameters by cross-validation")
    _add_common(p)
    _add_hyper(p)
    p.add_argument("--data", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="also train and write a model with the best point")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("predict", help="score sequences with a model")
    _add_common(p, model=True)
    p.add_argument("--sequences", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("design", help="find the best sequences of a given length")
    _add_common(p, model=True)
    _add_search(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("compare", help="overlap and rank correlation of two result files")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="check design results against exhaustive enumeration")
    _add_common(p, model=True)
    _add_search(p)
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP)
    p.set_defaults(func=cmd_verify)
    return parser


def parse_args(argv=None):
    """Parse ``argv``; values from ``--config`` act as defaults that flags override."""
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    parser = build_parser()
    if known.config:
        try:
            conf = json.loads(_read(known.config))
        except json.JSONDecodeError as exc:
            raise InputError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(conf, dict):
            raise InputError("config file must hold a JSON object")
        command = next((a for a in argv if a in parser.commands), None)
        if command is not None:
            sub = parser.commands[command]
            for action in sub._actions:
                if action.dest in conf:
                    action.required = False
            sub.set_defaults(**conf)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, FormatError, EncodingError, DatasetError, ModelFormatError,
            NumericError, ResourceError, oracle.OracleCapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BoundInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
