"""Command line entry point: ``slmp {gen,train,eval,bench,surface}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import data as datamod
from .bench import BenchSpec, accuracy, make_dataset, run_bench, surface_grid, train_one, train_size_for
from .ccp import CcpConfig, init_weights
from .errors import InputError, TrainingError
from .lattice import SlmpModel
from .lp import DcProgram, build_subproblem

EXIT_INPUT = 2
EXIT_TRAINING = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage already; keep that but route through InputError
    def error(self, message):
        raise InputError(message)


def _data_flags(p, defaults=True):
    d = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--dataset", choices=["moons", "blobs"], default=d("moons"))
    p.add_argument("--csv", help="labelled CSV file instead of a generator")
    p.add_argument("--label-col", default=d("label"))
    p.add_argument("--positive-label", help="label treated as class C1")
    p.add_argument("--n-samples", type=int, default=d(1250), help="generated samples")
    p.add_argument("--noise", type=float, default=d(0.1), help="moons noise sigma")
    p.add_argument("--seed", type=int, default=d(0))


def _train_flags(p, defaults=True):
    d = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--trainer", choices=["greedy", "wdccp", "kddccp"], default=d("kddccp"))
    p.add_argument("--k", type=int, default=d(2))
    p.add_argument("--train-size", type=int)
    p.add_argument("--standardize", action="store_true", default=None)
    p.add_argument("--no-standardize", dest="standardize", action="store_false")
    p.add_argument("--max-iters", type=int, default=d(50))
    p.add_argument("--obj-tol", type=float, default=d(1e-5))
    p.add_argument("--init", choices=["cluster", "random"], default=d("cluster"))
    p.add_argument("--row-generation", action="store_true", default=d(False))
    p.add_argument("--lp-solver", choices=["auto", "simplex", "highs", "ipm"], default=d("auto"))
    p.add_argument("--one-sided", action="store_true", default=d(False), help="wdccp: learn only the lower corner")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="slmp", description="Morphological perceptron training and benchmarks.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a synthetic dataset as CSV")
    _data_flags(p)
    p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("train", help="train one model")
    _data_flags(p)
    _train_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--dump-lp", help="write the first CCP subproblem to this file")

    p = sub.add_parser("eval", help="accuracy of a saved model on a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--csv", required=True)
    p.add_argument("--label-col", default="label")
    p.add_argument("--scaler", help="scaler JSON written by train --standardize")

    p = sub.add_parser("bench", help="repeated train/test experiment")
    p.add_argument("--config", help="JSON BenchSpec; explicit flags override it")
    _data_flags(p, defaults=False)
    _train_flags(p, defaults=False)
    p.add_argument("--repeats", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output directory for report.csv and repeats.csv")

    p = sub.add_parser("surface", help="export a decision-surface grid")
    p.add_argument("--model", required=True)
    p.add_argument("--csv", help="data whose bounding box sets the grid extent")
    p.add_argument("--label-col", default="label")
    p.add_argument("--bounds", type=float, nargs=4, metavar=("X1MIN", "X1MAX", "X2MIN", "X2MAX"))
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--out", help="output file (default stdout)")
    return ap


# flag name -> BenchSpec field
_SPEC_FLAGS = {"dataset": "dataset", "csv": "csv", "label_col": "label_col", "positive_label": "positive_label",
               "n_samples": "n_samples", "noise": "noise", "seed": "seed", "trainer": "trainer", "k": "K",
               "train_size": "train_size", "standardize": "standardize", "max_iters": "max_iters",
               "obj_tol": "obj_tol", "init": "init", "row_generation": "row_generation",
               "lp_solver": "lp_method", "one_sided": "one_sided", "repeats": "repeats", "workers": "workers",
               "out": "out"}


def spec_from_args(args) -> BenchSpec:
    base = {}
    if getattr(args, "config", None):
        base = {f.name: getattr(BenchSpec.from_json(args.config), f.name) for f in fields(BenchSpec)}
    for flag, key in _SPEC_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            base[key] = v
    return BenchSpec(**base)


def _cmd_gen(args):
    spec = spec_from_args(args)
    if spec.csv:
        raise InputError("gen writes generated datasets; --csv is not a generator")
    text = make_dataset(spec, spec.seed).to_csv(args.out)
    if not args.out:
        sys.stdout.write(text)


def _cmd_train(args):
    spec = spec_from_args(args)
    d = make_dataset(spec, spec.seed)
    train, test = d, None
    if args.train_size is not None:
        train, test = datamod.split(d, args.train_size, spec.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if spec.standardize if spec.standardize is not None else d.n > 2:
        train, test, scaler = datamod.standardize(train, test)
        (out / "scaler.json").write_text(json.dumps(scaler.to_dict()) + "\n")
    if args.dump_lp:
        cfg = CcpConfig(K=spec.K, init_strategy=spec.init, init_margin=spec.init_margin, seed=spec.seed)
        prog = DcProgram.from_data(train.X, train.positive)
        build_subproblem(prog, init_weights(train, cfg)).write(args.dump_lp)
    report = train_one(spec, train, spec.seed)
    report.model.save(out / "model.json")
    report.write_trace(out / "trace.csv")
    line = f"train_accuracy={accuracy(report.model, train):.6f}"
    if test is not None:
        line += f" test_accuracy={accuracy(report.model, test):.6f}"
    print(f"{line} iterations={report.iterations} converged={report.converged}")


def _load_eval_data(path, label_col, scaler_path=None):
    d = datamod.load_csv(path, label_col)
    if scaler_path:
        try:
            scaler = datamod.Scaler.from_dict(json.loads(Path(scaler_path).read_text()))
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read scaler {scaler_path}: {exc}") from None
        d = scaler.apply(d)
    return d


def _cmd_eval(args):
    model = SlmpModel.load(args.model)
    d = _load_eval_data(args.csv, args.label_col, args.scaler)
    labels = {str(v) for v in np.unique(d.y.astype(str))}
    if not labels <= {str(model.positive_label), str(model.negative_label)}:
        raise InputError(f"data labels {sorted(labels)} do not match model labels {list(model.labels)}")
    print(f"accuracy={accuracy(model, d):.6f}")


def _cmd_bench(args):
    spec = spec_from_args(args)
    if spec.out is None:
        raise InputError("bench needs --out (or 'out' in the config)")
    result = run_bench(spec)
    for r in result.records:
        if r.error:
            print(f"repeat {r.repeat}: {r.error}", file=sys.stderr)
    row = result.report_row()
    print(",".join(row))
    print(",".join(str(v) for v in row.values()))


def _cmd_surface(args):
    model = SlmpModel.load(args.model)
    X = datamod.load_csv(args.csv, args.label_col).X if args.csv else None
    text = surface_grid(model, args.bounds, args.resolution, X, args.out)
    if not args.out:
        sys.stdout.write(text)


COMMANDS = {"gen": _cmd_gen, "train": _cmd_train, "eval": _cmd_eval, "bench": _cmd_bench, "surface": _cmd_surface}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
        COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TrainingError as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    return 0
