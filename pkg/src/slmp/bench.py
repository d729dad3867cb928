"""Repeated train/evaluate experiments and decision-surface export."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import data as datamod
from .ccp import CcpConfig, TrainReport, train_kddccp, train_wdccp
from .errors import InputError, TrainingError
from .greedy import train_greedy
from .lattice import SlmpModel, neuron_response, predict

log = logging.getLogger(__name__)

TRAINERS = ("greedy", "wdccp", "kddccp")
GENERATORS = ("moons", "blobs")


@dataclass
class BenchSpec:
    dataset: str = "moons"
    csv: str | None = None
    label_col: str = "label"
    positive_label: str | None = None
    noise: float = 0.1
    sigma: float = 1.0
    n_samples: int = 1250
    train_size: int | None = None
    trainer: str = "kddccp"
    K: int = 2
    repeats: int = 30
    seed: int = 0
    standardize: bool | None = None
    max_iters: int = 50
    obj_tol: float = 1e-5
    init: str = "cluster"
    init_margin: float = 0.05
    row_generation: bool = False
    lp_method: str = "auto"
    one_sided: bool = False
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.repeats < 1:
            raise InputError("repeats must be at least 1")
        if self.trainer not in TRAINERS:
            raise InputError(f"trainer must be one of {TRAINERS}")
        if self.csv is None and self.dataset not in GENERATORS:
            raise InputError(f"dataset must be one of {GENERATORS} or a --csv file")

    @classmethod
    def from_json(cls, path) -> "BenchSpec":
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read bench config {path}: {exc}") from None
        known = {f.name for f in fields(cls)}
        unknown = set(cfg) - known
        if unknown:
            raise InputError(f"unknown bench config keys: {sorted(unknown)}")
        return cls(**cfg)

    @property
    def name(self) -> str:
        return Path(self.csv).stem if self.csv else self.dataset

    @property
    def dendrites(self) -> int | str:
        return {"kddccp": self.K, "wdccp": 1}.get(self.trainer, "")


@dataclass
class RepeatRecord:
    repeat: int
    seed: int
    train_accuracy: float = float("nan")
    test_accuracy: float = float("nan")
    seconds: float = 0.0
    iterations: int = 0
    converged: bool = False
    dendrites: int = 0
    monotone: bool = True
    final_gap: float = 0.0
    error: str = ""


@dataclass
class BenchResult:
    spec: BenchSpec
    records: list = field(default_factory=list)

    @property
    def ok(self) -> list:
        return [r for r in self.records if not r.error]

    @property
    def test_accuracies(self) -> list:
        return [r.test_accuracy for r in self.ok]

    @property
    def train_accuracies(self) -> list:
        return [r.train_accuracy for r in self.ok]

    @property
    def timings(self) -> list:
        return [r.seconds for r in self.records]

    @property
    def mean(self) -> float:
        return _stats(self.test_accuracies)[0]

    @property
    def std(self) -> float:
        return _stats(self.test_accuracies)[1]

    @property
    def best(self) -> float:
        return _stats(self.test_accuracies)[2]

    def report_row(self) -> dict:
        return {"dataset": self.spec.name, "trainer": self.spec.trainer, "K": self.spec.dendrites,
                "mean": self.mean, "std": self.std, "best": self.best}

    def write(self, out) -> None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        row = self.report_row()
        with open(out / "report.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(row))
            w.writerow([_fmt(v) for v in row.values()])
        with open(out / "repeats.csv", "w", newline="") as fh:
            names = [f.name for f in fields(RepeatRecord)]
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names)
            for r in self.records:
                w.writerow([_fmt(getattr(r, k)) for k in names])
        (out / "spec.json").write_text(json.dumps(asdict(self.spec), indent=2) + "\n")


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def _stats(values):
    """(mean, sample std, best); std is 0 for a single value."""
    if not values:
        raise TrainingError("no successful repeats; statistics are undefined")
    a = np.asarray(values, dtype=float)
    std = float(np.std(a, ddof=1)) if a.size > 1 else 0.0
    return float(np.mean(a)), std, float(np.max(a))


def accuracy(model: SlmpModel, d: datamod.Dataset) -> float:
    pred = np.asarray(predict(model, d.X)).astype(str)
    return float(np.mean(pred == d.y.astype(str)))


def make_dataset(spec: BenchSpec, seed: int) -> datamod.Dataset:
    if spec.csv:
        return datamod.load_csv(spec.csv, spec.label_col, spec.positive_label)
    if spec.dataset == "moons":
        return datamod.make_moons(spec.n_samples, spec.noise, seed)
    return datamod.make_blobs(spec.n_samples, sigma=spec.sigma, seed=seed)


def train_size_for(spec: BenchSpec, M: int) -> int:
    if spec.train_size is not None:
        return spec.train_size
    return 1000 if spec.csv is None else int(round(0.67 * M))


def train_one(spec: BenchSpec, train: datamod.Dataset, seed: int) -> TrainReport:
    if spec.trainer == "greedy":
        return train_greedy(train)
    cfg = CcpConfig(K=spec.K, max_iters=spec.max_iters, obj_tol=spec.obj_tol, init_strategy=spec.init,
                    init_margin=spec.init_margin, seed=seed, row_generation=spec.row_generation,
                    lp_method=spec.lp_method)
    if spec.trainer == "wdccp":
        return train_wdccp(train, np.ones(train.M), cfg, one_sided=spec.one_sided)
    return train_kddccp(train, cfg)


def run_repeat(spec: BenchSpec, r: int, base: datamod.Dataset | None = None) -> RepeatRecord:
    seed = spec.seed + r
    rec = RepeatRecord(r, seed)
    start = time.perf_counter()
    try:
        d = base if base is not None else make_dataset(spec, seed)
        train, test = datamod.split(d, train_size_for(spec, d.M), seed)
        standardize = spec.standardize if spec.standardize is not None else d.n > 2
        if standardize:
            train, test, _ = datamod.standardize(train, test)
        report = train_one(spec, train, seed)
        rec.train_accuracy = accuracy(report.model, train)
        rec.test_accuracy = accuracy(report.model, test)
        rec.iterations = report.iterations
        rec.converged = report.converged
        rec.dendrites = report.model.K
        tr = report.objective_trace
        rec.monotone = all(b <= a + 1e-6 for a, b in zip(tr, tr[1:]))
        rec.final_gap = abs(report.final_hinge - tr[-1]) if tr else 0.0
    except (TrainingError, InputError) as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
        log.warning("repeat %d failed: %s", r, exc)
    rec.seconds = time.perf_counter() - start
    return rec


def run_bench(spec: BenchSpec) -> BenchResult:
    base = make_dataset(spec, spec.seed) if spec.csv else None
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            records = list(pool.map(run_repeat, [spec] * spec.repeats, range(spec.repeats), [base] * spec.repeats))
    else:
        records = [run_repeat(spec, r, base) for r in range(spec.repeats)]
    result = BenchResult(spec, sorted(records, key=lambda rec: rec.repeat))
    if spec.out:
        result.write(spec.out)
    return result


def default_bounds(X, margin=0.1):
    X = np.asarray(X, dtype=float)
    lo, hi = X.min(axis=0), X.max(axis=0)
    pad = margin * np.where(hi > lo, hi - lo, 1.0)
    return (lo[0] - pad[0], hi[0] + pad[0], lo[1] - pad[1], hi[1] + pad[1])


def surface_grid(model: SlmpModel, bounds=None, resolution: int = 200, data=None, path=None) -> str:
    """CSV ``x1,x2,tau,label`` on a resolution x resolution grid over ``bounds``.

    ``bounds`` is ``(x1_min, x1_max, x2_min, x2_max)``; by default the
    bounding box of ``data`` padded by 10% on each side.
    """
    if model.n != 2:
        raise InputError(f"decision surfaces need 2-D inputs, model has n={model.n}")
    if resolution < 1:
        raise InputError("resolution must be positive")
    if bounds is None:
        if data is None:
            raise InputError("give grid bounds or data to derive them from")
        bounds = default_bounds(data)
    x1 = np.linspace(bounds[0], bounds[1], resolution)
    x2 = np.linspace(bounds[2], bounds[3], resolution)
    G = np.array([(a, b) for a in x1 for b in x2])
    tau = neuron_response(model, G)
    labels = predict(model, G)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x1", "x2", "tau", "label"])
    for (a, b), t, lab in zip(G, tau, labels):
        w.writerow([repr(float(a)), repr(float(b)), repr(float(t)), lab.item() if hasattr(lab, "item") else lab])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
