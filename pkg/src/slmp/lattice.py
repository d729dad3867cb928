"""Single-layer morphological perceptron with dendrite computation.

Weights are stored in concatenated form: row ``k`` of ``weights`` is
``[w1_k, -w0_k]`` (length ``2n``), so that with ``z = [x, -x]`` the response
of dendrite ``k`` is ``p_k * min_i (z_i + w_ki)``.  Dendrite ``k`` accepts
the closed box ``[-w1_k, -w0_k]`` = ``[weights[k, :n], weights[k, n:]]``
with the sign flip on the lower corner, i.e. ``weights[k] = [-lower, upper]``.

The neuron aggregates the dendrite responses with either ``min`` or ``max``.
Inside a dendrite the reduction is always ``min``; the all-excitatory
``max`` model is the union-of-boxes classifier trained by the CCP.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InputError

MIN = "min"
MAX = "max"


@dataclass(frozen=True)
class Hyperbox:
    lower: np.ndarray
    upper: np.ndarray

    @property
    def empty(self) -> bool:
        return bool(np.any(self.lower > self.upper))

    def contains(self, x) -> np.ndarray:
        """Closed-box membership; ``x`` may be a point or an (M, n) batch."""
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lower) & (x <= self.upper), axis=-1)


@dataclass(frozen=True, eq=False)
class SlmpModel:
    """Immutable SLMP classifier.

    Parameters
    ----------
    weights : array_like, shape (K, 2n)
        Concatenated dendrite weights ``[w1_k, -w0_k]``.
    polarity : array_like, shape (K,)
        +1 for excitatory, -1 for inhibitory dendrites.
    aggregation : {"min", "max"}
        Reduction over dendrites.
    positive_label, negative_label
        Labels returned for ``tau >= 0`` and ``tau < 0``.
    """

    weights: np.ndarray
    polarity: np.ndarray
    aggregation: str = MAX
    positive_label: Any = 1
    negative_label: Any = 0
    n: int = field(init=False)
    K: int = field(init=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 2 or w.shape[1] % 2:
            raise InputError(f"weights must have shape (K, 2n) with K, n >= 1; got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InputError("weights must be finite")
        p = np.array(self.polarity, dtype=int).reshape(-1)
        if p.shape[0] != w.shape[0]:
            raise InputError(f"polarity has {p.shape[0]} entries for {w.shape[0]} dendrites")
        if not np.all(np.abs(p) == 1):
            raise InputError("polarity entries must be +1 or -1")
        if self.aggregation not in (MIN, MAX):
            raise InputError(f"aggregation must be 'min' or 'max', got {self.aggregation!r}")
        if self.positive_label == self.negative_label:
            raise InputError("positive and negative labels must differ")
        w.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "polarity", p)
        object.__setattr__(self, "K", w.shape[0])
        object.__setattr__(self, "n", w.shape[1] // 2)

    @classmethod
    def from_boxes(cls, lower, upper, polarity=None, aggregation=MAX, positive_label=1, negative_label=0):
        """Build a model from per-dendrite box corners, each of shape (K, n)."""
        lower = np.atleast_2d(np.asarray(lower, dtype=float))
        upper = np.atleast_2d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape:
            raise InputError("lower and upper corners must have the same shape")
        if polarity is None:
            polarity = np.ones(lower.shape[0], dtype=int)
        return cls(np.hstack([-lower, upper]), polarity, aggregation, positive_label, negative_label)

    @property
    def w1(self) -> np.ndarray:
        return self.weights[:, : self.n]

    @property
    def w0(self) -> np.ndarray:
        return -self.weights[:, self.n :]

    @property
    def labels(self) -> tuple:
        return (self.negative_label, self.positive_label)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "aggregation": self.aggregation,
            "polarity": [int(p) for p in self.polarity],
            "weights": [[float(v) for v in row] for row in self.weights],
            "positive_label": _json_label(self.positive_label),
            "negative_label": _json_label(self.negative_label),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SlmpModel":
        try:
            model = cls(
                data["weights"],
                data["polarity"],
                data["aggregation"],
                data["positive_label"],
                data["negative_label"],
            )
        except KeyError as exc:
            raise InputError(f"model JSON is missing field {exc}") from None
        if model.n != data.get("n", model.n) or model.K != data.get("K", model.K):
            raise InputError("model JSON fields n/K disagree with the weight matrix")
        return model

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "SlmpModel":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read model {path}: {exc}") from None
        return cls.from_dict(data)


def _json_label(label):
    if isinstance(label, np.generic):
        return label.item()
    return label


def _as_points(model: SlmpModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (model.n,) or x.ndim > 2:
        raise InputError(f"expected input of dimension {model.n}, got shape {x.shape}")
    return x


def dendrite_responses(model: SlmpModel, x) -> np.ndarray:
    """All dendrite responses; shape (K,) for one point, (M, K) for a batch."""
    x = _as_points(model, x)
    z = np.concatenate([x, -x], axis=-1)
    inner = np.min(z[..., None, :] + model.weights, axis=-1)
    return model.polarity * inner


def dendrite_response(model: SlmpModel, k: int, x) -> float:
    """Response of dendrite ``k`` (0-based) to ``x``."""
    if not 0 <= k < model.K:
        raise InputError(f"dendrite index {k} out of range for K={model.K}")
    x = _as_points(model, x)
    z = np.concatenate([x, -x], axis=-1)
    return model.polarity[k] * np.min(z + model.weights[k], axis=-1)


def neuron_response(model: SlmpModel, x):
    """tau(x); a float for one point, an (M,) array for a batch."""
    r = dendrite_responses(model, x)
    out = np.min(r, axis=-1) if model.aggregation == MIN else np.max(r, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def predict(model: SlmpModel, x):
    """Hard limiter: ``positive_label`` iff tau(x) >= 0."""
    tau = neuron_response(model, x)
    if np.ndim(tau) == 0:
        return model.positive_label if tau >= 0 else model.negative_label
    return np.where(tau >= 0, model.positive_label, model.negative_label)


def dendrite_hyperbox(model: SlmpModel, k: int) -> Hyperbox:
    if not 0 <= k < model.K:
        raise InputError(f"dendrite index {k} out of range for K={model.K}")
    n = model.n
    return Hyperbox(lower=-model.weights[k, :n].copy(), upper=model.weights[k, n:].copy())


def dual_model(model: SlmpModel) -> SlmpModel:
    """Model with swapped min/max aggregation and negated polarities.

    Its response is exactly ``-tau`` of the original model.
    """
    agg = MAX if model.aggregation == MIN else MIN
    return SlmpModel(model.weights, -model.polarity, agg, model.positive_label, model.negative_label)
