"""K-dendrite training by the convex-concave procedure.

Each iteration linearizes the concave parts of the DC constraints at the
current weights, solves the resulting LP and moves to its solution.  Because
the linearizations are tight at the expansion point, the current weights are
feasible for the next LP, so the recorded objective never increases.
"""
from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import dc
from .data import Dataset
from .errors import InputError, TrainingError
from .lattice import MAX, SlmpModel, neuron_response
from .lp import DcProgram, LpStatus, active_u_rows, build_subproblem, convexified_residuals, solve_lp
from .lp.program import u_row_block

log = logging.getLogger(__name__)

CLUSTER_BOXES = "cluster"
RANDOM_BOXES = "random"

#: objective values at or below this are treated as the global minimum 0
ZERO_OBJECTIVE = 1e-9
#: half-width of the stand-in for an infinite box side, in units of the feature range
SURROGATE_SPAN = 1e3


@dataclass
class CcpConfig:
    K: int = 1
    max_iters: int = 50
    obj_tol: float = 1e-5
    weight_tol: float = 1e-6
    init_strategy: str = CLUSTER_BOXES
    init_margin: float = 0.05
    seed: int = 0
    sample_weights: np.ndarray | None = None
    row_generation: bool = False
    lp_method: str = "auto"
    lp_tol: float = 1e-7
    # largest gap between the LP objective and the true hinge at the new
    # weights for which the iteration counts as a fixed point
    tight_tol: float = 1e-7
    kmeans_iters: int = 20

    def __post_init__(self):
        if int(self.K) < 1:
            raise InputError("K must be at least 1")
        if self.max_iters < 0:
            raise InputError("max_iters must be non-negative")
        if not (self.obj_tol > 0 and self.weight_tol > 0 and self.lp_tol > 0):
            raise InputError("tolerances must be positive")
        if self.init_strategy not in (CLUSTER_BOXES, RANDOM_BOXES):
            raise InputError(f"init_strategy must be {CLUSTER_BOXES!r} or {RANDOM_BOXES!r}")
        if self.init_margin < 0:
            raise InputError("init_margin must be non-negative")


@dataclass
class IterationRecord:
    iter: int
    objective: float
    max_weight_delta: float
    lp_pivots: int
    seconds: float


@dataclass
class TrainReport:
    model: SlmpModel
    objective_trace: list
    iterations: int
    converged: bool
    wall_time: float
    history: list = field(default_factory=list)
    final_hinge: float = float("nan")

    def write_trace(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", "objective", "max_weight_delta", "lp_pivots", "seconds"])
            for r in self.history:
                w.writerow([r.iter, repr(r.objective), repr(r.max_weight_delta), r.lp_pivots, f"{r.seconds:.6f}"])


def kmeans(P, K, rng, iters=20):
    """Lloyd's algorithm with k-means++ seeding; returns (labels, centers)."""
    P = np.asarray(P, dtype=float)
    centers = np.empty((K, P.shape[1]))
    centers[0] = P[rng.integers(P.shape[0])]
    d2 = np.sum((P - centers[0]) ** 2, axis=1)
    for k in range(1, K):
        total = d2.sum()
        idx = rng.choice(P.shape[0], p=d2 / total) if total > 0 else rng.integers(P.shape[0])
        centers[k] = P[idx]
        d2 = np.minimum(d2, np.sum((P - centers[k]) ** 2, axis=1))
    labels = np.zeros(P.shape[0], dtype=int)
    for _ in range(iters):
        labels = np.argmin(np.sum((P[:, None, :] - centers[None]) ** 2, axis=2), axis=1)
        for k in range(K):
            members = P[labels == k]
            if len(members):
                centers[k] = members.mean(axis=0)
    return labels, centers


def feature_range(X) -> np.ndarray:
    return np.ptp(np.asarray(X, dtype=float), axis=0)


def init_weights(train: Dataset, cfg: CcpConfig) -> np.ndarray:
    """Initial boxes around class C1, in concatenated form ``[-lower, upper]``."""
    X1 = train.X[train.positive]
    if X1.shape[0] == 0:
        raise InputError("class C1 is empty; cannot place initial boxes")
    K = int(cfg.K)
    rng = np.random.default_rng(cfg.seed)
    margin = cfg.init_margin * feature_range(train.X)
    strategy = cfg.init_strategy
    if strategy == CLUSTER_BOXES and K > X1.shape[0]:
        log.warning("K=%d exceeds the %d C1 samples; using random boxes with replacement", K, X1.shape[0])
        strategy = RANDOM_BOXES
    lower = np.empty((K, train.n))
    upper = np.empty((K, train.n))
    if strategy == CLUSTER_BOXES:
        labels, centers = kmeans(X1, K, rng, cfg.kmeans_iters)
        for k in range(K):
            members = X1[labels == k]
            if len(members):
                lower[k], upper[k] = members.min(axis=0), members.max(axis=0)
            else:
                lower[k] = upper[k] = centers[k]
    else:
        idx = rng.choice(X1.shape[0], size=K, replace=K > X1.shape[0])
        lower[:] = upper[:] = X1[idx]
    return np.hstack([-(lower - margin), upper + margin])


def solve_subproblem(prog: DcProgram, W_t, cfg: CcpConfig, fixed=None):
    """One CCP step: returns ``(W_new, objective, lp_iterations)``.

    The objective is evaluated on the completed point (minimal xi, h and
    u = psi for the returned weights), which is feasible by construction.
    """
    u_rows = active_u_rows(prog, W_t) if cfg.row_generation else None
    lp = build_subproblem(prog, W_t, u_rows, fixed)
    lay = lp.layout
    present = {tuple(t) for t in lp.u_rows} if cfg.row_generation else None
    pivots = 0
    while True:
        sol = solve_lp(lp, tol=cfg.lp_tol, method=cfg.lp_method)
        pivots += sol.iterations
        if sol.status is LpStatus.ITER_LIMIT:
            raise TrainingError(f"LP iteration limit after {pivots} iterations ({sol.method})")
        if sol.status is not LpStatus.OPTIMAL:
            raise TrainingError(f"subproblem reported {sol.status.value}; built subproblems are always feasible and bounded")
        parts = lay.decode(sol.values)
        if not cfg.row_generation:
            break
        pieces = -prog.Z[:, None, :] - parts["W"][None, :, :]
        viol = np.max(pieces, axis=2) - parts["u"]
        j, k = np.nonzero(viol > cfg.lp_tol)
        new = [(a, b, c) for a, b, c in zip(j, k, np.argmax(pieces[j, k], axis=1)) if (a, b, c) not in present]
        if not new:
            break
        present.update(new)
        A_new, b_new = u_row_block(lay, prog.Z, new)
        lp = lp.add_rows(A_new, b_new, np.asarray(new))
    W_new = parts["W"]
    if fixed is not None:
        W_new = np.where(fixed, W_t, W_new)
    xi = convexified_residuals(prog, W_t, W_new)
    return W_new, float(prog.nu @ np.maximum(xi, 0.0)), pivots


def run_ccp(prog: DcProgram, W0, cfg: CcpConfig, positive_label=1, negative_label=0, fixed=None) -> TrainReport:
    start = time.perf_counter()
    W = np.array(W0, dtype=float)
    F = prog.hinge(W)
    trace = [F]
    history = [IterationRecord(0, F, 0.0, 0, 0.0)]
    converged = F <= ZERO_OBJECTIVE
    it = 0
    while not converged and it < cfg.max_iters:
        it += 1
        t = time.perf_counter()
        try:
            W_new, f, pivots = solve_subproblem(prog, W, cfg, fixed)
        except TrainingError as exc:
            exc.trace = list(trace)
            raise
        delta = float(np.max(np.abs(W_new - W)))
        F_new = prog.hinge(W_new)
        prev = trace[-1]
        trace.append(f)
        history.append(IterationRecord(it, f, delta, pivots, time.perf_counter() - t))
        log.debug("ccp iter %d objective %.10g hinge %.10g delta %.3g", it, f, F_new, delta)
        W = W_new
        tight = f - F_new <= cfg.tight_tol
        if f <= ZERO_OBJECTIVE or (tight and (abs(prev - f) <= cfg.obj_tol or delta <= cfg.weight_tol)):
            converged = True
    model = SlmpModel(W, np.ones(W.shape[0], dtype=int), MAX, positive_label, negative_label)
    report = TrainReport(model, trace, it, converged, time.perf_counter() - start, history)
    report.final_hinge = hinge_loss(model, prog)
    return report


def hinge_loss(model: SlmpModel, prog: DcProgram) -> float:
    """sum nu_j max(0, +-tau(x_j)) evaluated through the neuron itself."""
    n = model.n
    tau = neuron_response(model, prog.Z[:, :n])
    return float(np.sum(prog.nu * np.maximum(prog.side * tau, 0.0)))


def _weights_for(train: Dataset, cfg: CcpConfig) -> np.ndarray:
    if cfg.sample_weights is None:
        return np.ones(train.M)
    nu = np.asarray(cfg.sample_weights, dtype=float).reshape(-1)
    if nu.shape[0] != train.M:
        raise InputError(f"{nu.shape[0]} sample weights for {train.M} samples")
    if np.any(nu < 0) or not np.all(np.isfinite(nu)):
        raise InputError("sample weights must be finite and non-negative")
    return nu


def train_kddccp(train: Dataset, cfg: CcpConfig) -> TrainReport:
    """Train an all-excitatory max-aggregation SLMP with ``cfg.K`` dendrites."""
    train.require_two_classes()
    nu = _weights_for(train, cfg)
    prog = DcProgram.from_data(train.X, train.positive, nu)
    W0 = init_weights(train, cfg)
    return run_ccp(prog, W0, cfg, train.positive_label, train.negative_label)


def train_wdccp(train: Dataset, nu, cfg: CcpConfig | None = None, one_sided: bool = False) -> TrainReport:
    """Single-dendrite training with per-sample weights ``nu``.

    With ``one_sided`` the upper box corner is pinned far outside the data,
    standing in for an infinite side, so only the lower corner is learned.
    """
    cfg = cfg or CcpConfig()
    nu = np.asarray(nu, dtype=float).reshape(-1)
    cfg = replace(cfg, K=1, sample_weights=nu)
    if not one_sided:
        return train_kddccp(train, cfg)
    train.require_two_classes()
    nu = _weights_for(train, cfg)
    prog = DcProgram.from_data(train.X, train.positive, nu)
    W0 = init_weights(train, cfg)
    n = train.n
    W0[0, n:] = surrogate_upper(train.X)
    fixed = np.zeros_like(W0, dtype=bool)
    fixed[0, n:] = True
    return run_ccp(prog, W0, cfg, train.positive_label, train.negative_label, fixed)


def surrogate_upper(X) -> np.ndarray:
    """Finite stand-in for an upper corner at +infinity."""
    X = np.asarray(X, dtype=float)
    span = feature_range(X)
    span = np.where(span > 0, span, 1.0)
    mid = (X.max(axis=0) + X.min(axis=0)) / 2
    return mid + SURROGATE_SPAN * span
