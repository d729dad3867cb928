"""Greedy hyperbox carving.

Start from one excitatory dendrite holding the bounding box of class C1,
then, while some C0 training point is still accepted, add an inhibitory
dendrite whose box is the closed Chebyshev ball around the first such point
with radius equal to its Chebyshev distance to the nearest C1 point.  C1
points end up on or outside every carved box, so they stay accepted, and the
carved point itself is rejected: the loop stops after at most |C0| carvings
with every training point classified correctly.
"""
from __future__ import annotations

import time

import numpy as np

from .ccp import TrainReport
from .data import Dataset
from .errors import InputError
from .lattice import MIN, SlmpModel, neuron_response


def _conflicts(X, pos):
    seen = {}
    for j, row in enumerate(map(tuple, X)):
        if row in seen and pos[seen[row]] != pos[j]:
            return seen[row], j
        seen.setdefault(row, j)
    return None


def _carve(X1, x0):
    """Inhibitory box around ``x0`` whose interior holds no C1 point."""
    d = float(np.min(np.max(np.abs(X1 - x0), axis=1)))
    while True:
        lower, upper = x0 - d, x0 + d
        # rounding in x0 +- d may push a C1 point a hair inside; shrink until none is
        inner = np.min(np.minimum(X1 - lower, upper - X1), axis=1)
        if np.all(inner <= 0.0):
            return lower, upper
        d = np.nextafter(d, 0.0)


def train_greedy(train: Dataset) -> TrainReport:
    start = time.perf_counter()
    train.require_two_classes()
    X, pos = train.X, train.positive
    clash = _conflicts(X, pos)
    if clash is not None:
        raise InputError(f"samples {clash[0]} and {clash[1]} have identical features but different labels")
    X1 = X[pos]
    neg_idx = np.flatnonzero(~pos)
    lowers = [X1.min(axis=0)]
    uppers = [X1.max(axis=0)]
    polarity = [1]

    def build():
        return SlmpModel.from_boxes(np.array(lowers), np.array(uppers), polarity, MIN,
                                    train.positive_label, train.negative_label)

    model = build()
    carved = 0
    while True:
        accepted = neuron_response(model, X[neg_idx]) >= 0
        if not np.any(accepted):
            break
        if carved >= len(neg_idx):  # pragma: no cover - excluded by the construction above
            raise RuntimeError("greedy carving did not terminate")
        x0 = X[neg_idx[np.argmax(accepted)]]
        lower, upper = _carve(X1, x0)
        lowers.append(lower)
        uppers.append(upper)
        polarity.append(-1)
        model = build()
        carved += 1
    return TrainReport(model, [], carved, True, time.perf_counter() - start)
