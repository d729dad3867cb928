"""Datasets: synthetic generators, CSV I/O, seeded splits and standardization."""
from __future__ import annotations

import csv
import hashlib
import io
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import InputError

log = logging.getLogger(__name__)

#: centers and labels of the default three-blob problem (two blobs of class 1
#: flank one blob of class 0, so no single half-plane separates the classes)
DEFAULT_BLOB_CENTERS = ((-5.0, 0.0), (0.0, 0.0), (5.0, 0.0))
DEFAULT_BLOB_LABELS = (1, 0, 1)


@dataclass(frozen=True, eq=False)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    positive_label: Any = 1
    feature_names: tuple | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y).reshape(-1)
        if X.shape[0] < 1 or X.shape[0] != y.shape[0]:
            raise InputError(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
        if not np.all(np.isfinite(X)):
            raise InputError("features must be finite (no NaN/Inf)")
        if len(np.unique(y)) > 2:
            raise InputError(f"expected at most two labels, found {sorted(map(str, np.unique(y)))}")
        if self.feature_names is not None and len(self.feature_names) != X.shape[1]:
            raise InputError("feature_names length does not match the feature count")
        X.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def M(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def positive(self) -> np.ndarray:
        """Boolean mask of class C1 (the positive label)."""
        return np.array([_same_label(v, self.positive_label) for v in self.y], dtype=bool)

    @property
    def negative_label(self):
        for v in self.y:
            if not _same_label(v, self.positive_label):
                return _plain(v)
        return 0 if _same_label(1, self.positive_label) else "not-" + str(self.positive_label)

    def require_two_classes(self) -> None:
        pos = self.positive
        if pos.all() or not pos.any():
            raise InputError("training data must contain both classes")

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return replace(self, X=self.X[idx], y=self.y[idx])

    def to_csv(self, path=None, label_column: str = "label") -> str:
        """Byte-deterministic CSV (shortest round-trip floats)."""
        names = self.feature_names or tuple(f"x{i + 1}" for i in range(self.n))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([*names, label_column])
        for row, label in zip(self.X, self.y):
            w.writerow([repr(float(v)) for v in row] + [_plain(label)])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


def _plain(v):
    return v.item() if isinstance(v, np.generic) else v


def _same_label(a, b) -> bool:
    return str(_plain(a)) == str(_plain(b))


def make_blobs(M: int, centers: Sequence = DEFAULT_BLOB_CENTERS, sigma: float = 1.0, seed: int = 0,
               center_labels: Sequence = DEFAULT_BLOB_LABELS) -> Dataset:
    """Gaussian blobs; sample j takes class ``j % 2`` and cycles through that class's centers."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    center_labels = list(center_labels)
    if M < 1 or not sigma > 0:
        raise InputError("make_blobs needs M >= 1 and sigma > 0")
    if len(center_labels) != centers.shape[0]:
        raise InputError("one label per center is required")
    classes = sorted(set(center_labels))
    if len(classes) != 2:
        raise InputError("centers must be split across exactly two labels")
    by_class = [[i for i, lab in enumerate(center_labels) if lab == c] for c in classes]
    rng = np.random.default_rng(seed)
    j = np.arange(M)
    cls = j % 2
    pick = np.array([by_class[c][(jj // 2) % len(by_class[c])] for jj, c in zip(j, cls)])
    X = centers[pick] + rng.normal(0.0, sigma, size=(M, centers.shape[1]))
    y = np.array([classes[c] for c in cls])
    prov = {"generator": "blobs", "M": M, "centers": centers.tolist(), "sigma": sigma,
            "seed": seed, "center_labels": center_labels}
    return Dataset(X, y, positive_label=classes[1], provenance=prov)


def make_moons(M: int, noise_sigma: float = 0.1, seed: int = 0) -> Dataset:
    """Two interleaving half circles; the first ``M // 2`` samples are class 0."""
    if M < 2 or noise_sigma < 0:
        raise InputError("make_moons needs M >= 2 and noise_sigma >= 0")
    rng = np.random.default_rng(seed)
    m0 = M // 2
    y = np.r_[np.zeros(m0, dtype=int), np.ones(M - m0, dtype=int)]
    theta = rng.uniform(0.0, np.pi, size=M)
    X = moon_points(theta, y) + rng.normal(0.0, noise_sigma, size=(M, 2))
    prov = {"generator": "moons", "M": M, "noise_sigma": noise_sigma, "seed": seed}
    return Dataset(X, y, positive_label=1, provenance=prov)


def moon_points(theta, y) -> np.ndarray:
    """Noise-free moon coordinates: class 0 ``(cos, sin)``, class 1 ``(1 - cos, 0.5 - sin)``."""
    theta = np.asarray(theta, dtype=float)
    upper = np.column_stack([np.cos(theta), np.sin(theta)])
    lower = np.column_stack([1.0 - np.cos(theta), 0.5 - np.sin(theta)])
    return np.where(np.asarray(y)[:, None] == 0, upper, lower)


def _parse_label(text: str):
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            return text


def load_csv(path, label_column: str = "label", positive_label=None) -> Dataset:
    """Read a header-first CSV with one label column and numeric features."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    reader = csv.reader(io.StringIO(raw.decode("utf-8-sig")))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise InputError(f"{path}: empty file") from None
    if label_column not in header:
        raise InputError(f"{path}: no column named {label_column!r} (have {header})")
    li = header.index(label_column)
    rows, labels = [], []
    for lineno, rec in enumerate(reader, start=2):
        if not rec or all(not f.strip() for f in rec):
            continue
        if len(rec) != len(header):
            raise InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
        try:
            rows.append([float(f) for i, f in enumerate(rec) if i != li])
        except ValueError:
            bad = next(f for i, f in enumerate(rec) if i != li and not _is_float(f))
            raise InputError(f"{path}:{lineno}: non-numeric feature value {bad!r}") from None
        labels.append(_parse_label(rec[li].strip()))
    if not rows:
        raise InputError(f"{path}: no data rows")
    distinct = sorted({str(v) for v in labels})
    if len(distinct) != 2:
        raise InputError(f"{path}: label column must have exactly two values, found {distinct}")
    if positive_label is None:
        positive_label = _parse_label(distinct[1])
    elif str(positive_label) not in distinct:
        raise InputError(f"{path}: positive label {positive_label!r} not among {distinct}")
    else:
        positive_label = _parse_label(str(positive_label))
    y = np.array(labels, dtype=object)
    if all(isinstance(v, int) for v in labels):
        y = y.astype(int)
    names = tuple(h for i, h in enumerate(header) if i != li)
    prov = {"file": str(path), "sha256": hashlib.sha256(raw).hexdigest(), "label_column": label_column}
    return Dataset(np.array(rows, dtype=float), y, positive_label, names, prov)


def _is_float(text) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def split(d: Dataset, n_train: int, seed: int = 0):
    """Seeded shuffle, then the first ``n_train`` rows train and the rest test."""
    if n_train <= 0 or n_train >= d.M:
        raise InputError(f"n_train must be in [1, {d.M - 1}], got {n_train}")
    perm = np.random.default_rng(seed).permutation(d.M)
    tr, te = d.subset(perm[:n_train]), d.subset(perm[n_train:])
    prov = {**d.provenance, "split": {"n_train": n_train, "seed": seed}}
    return replace(tr, provenance=prov), replace(te, provenance=prov)


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    scale: np.ndarray

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.scale

    def inverse(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) * self.scale + self.mean

    def apply(self, d: Dataset) -> Dataset:
        return replace(d, X=self.transform(d.X), provenance={**d.provenance, "standardized": True})

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, data) -> "Scaler":
        return cls(np.asarray(data["mean"], dtype=float), np.asarray(data["scale"], dtype=float))


def fit_scaler(X) -> Scaler:
    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    flat = std == 0
    if np.any(flat):
        log.warning("features %s are constant on the training set; left unscaled", np.flatnonzero(flat).tolist())
        mean = np.where(flat, 0.0, mean)
    return Scaler(mean, np.where(flat, 1.0, std))


def standardize(train: Dataset, test: Dataset | None = None):
    """Fit per-feature mean/std on ``train``; return ``(train', test', scaler)``."""
    scaler = fit_scaler(train.X)
    return scaler.apply(train), (None if test is None else scaler.apply(test)), scaler
