"""Linear programs and the convexified CCP subproblem.

Every LP here has the form::

    minimize    c @ v
    subject to  A @ v <= b,   lower <= v <= upper

with ``A`` held as a CSR matrix.  Subproblem columns are laid out as
``[W (K*N) | xi (M) | h (M) | u (M*K)]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .. import dc
from ..errors import InputError


@dataclass(frozen=True)
class VarLayout:
    """Column bookkeeping for a subproblem with K dendrites, N weights per row, M samples."""

    K: int
    N: int
    M: int

    @property
    def num_vars(self) -> int:
        return self.K * self.N + 2 * self.M + self.M * self.K

    @property
    def xi_offset(self) -> int:
        return self.K * self.N

    @property
    def h_offset(self) -> int:
        return self.K * self.N + self.M

    @property
    def u_offset(self) -> int:
        return self.K * self.N + 2 * self.M

    def w(self, k, i):
        return np.asarray(k) * self.N + i

    def xi(self, j):
        return self.xi_offset + np.asarray(j)

    def h(self, j):
        return self.h_offset + np.asarray(j)

    def u(self, j, k):
        return self.u_offset + np.asarray(j) * self.K + k

    def name(self, col: int) -> tuple:
        col = int(col)
        if not 0 <= col < self.num_vars:
            raise IndexError(col)
        if col < self.xi_offset:
            return ("w",) + divmod(col, self.N)
        if col < self.h_offset:
            return ("xi", col - self.xi_offset)
        if col < self.u_offset:
            return ("h", col - self.h_offset)
        return ("u",) + divmod(col - self.u_offset, self.K)

    def column(self, name: tuple) -> int:
        kind, *idx = name
        getter = {"w": self.w, "xi": self.xi, "h": self.h, "u": self.u}[kind]
        col = int(getter(*idx))
        if self.name(col) != tuple(name):
            raise KeyError(name)
        return col

    def decode(self, v) -> dict:
        v = np.asarray(v, dtype=float)
        K, N, M = self.K, self.N, self.M
        return {
            "W": v[: K * N].reshape(K, N).copy(),
            "xi": v[self.xi_offset : self.h_offset].copy(),
            "h": v[self.h_offset : self.u_offset].copy(),
            "u": v[self.u_offset :].reshape(M, K).copy(),
        }

    def encode(self, W, xi, h, u) -> np.ndarray:
        return np.concatenate(
            [np.ravel(W), np.ravel(xi), np.ravel(h), np.ravel(u)]
        ).astype(float)


@dataclass
class LinearProgram:
    objective: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    layout: VarLayout | None = None
    # (j, k, i) triples of the u-definition rows present, in row order
    u_rows: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.A = sp.csr_matrix(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        n = self.objective.shape[0]
        self.lower = np.full(n, -np.inf) if self.lower is None else np.asarray(self.lower, dtype=float)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float)
        if self.A.shape != (self.b.shape[0], n):
            raise InputError(f"constraint matrix {self.A.shape} does not match {self.b.shape[0]} rows x {n} vars")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise InputError("bounds must have one entry per variable")

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def num_rows(self) -> int:
        return self.b.shape[0]

    @property
    def var_names(self) -> dict:
        if self.layout is None:
            return {("v", j): j for j in range(self.num_vars)}
        return {self.layout.name(j): j for j in range(self.num_vars)}

    @property
    def constraints(self):
        """Rows as ``(dense coefficients, "<=", rhs)`` tuples."""
        dense = self.A.toarray()
        return [(dense[r], "<=", float(self.b[r])) for r in range(self.num_rows)]

    def residual(self, v) -> float:
        """Largest violation of the rows and bounds at ``v`` (0 if feasible)."""
        v = np.asarray(v, dtype=float)
        worst = 0.0
        if self.num_rows:
            worst = max(worst, float(np.max(self.A @ v - self.b)))
        worst = max(worst, float(np.max(self.lower - v)), float(np.max(v - self.upper)))
        return max(worst, 0.0)

    def add_rows(self, A_new, b_new, u_rows=None) -> "LinearProgram":
        rows = None
        if self.u_rows is not None and u_rows is not None:
            rows = np.vstack([self.u_rows, u_rows])
        return LinearProgram(
            self.objective,
            sp.vstack([self.A, sp.csr_matrix(A_new)], format="csr"),
            np.concatenate([self.b, b_new]),
            self.lower,
            self.upper,
            self.layout,
            rows,
        )

    def write(self, path) -> None:
        """Dump in the line format described in the README (debugging aid)."""
        lines = [f"vars {self.num_vars} rows {self.num_rows}"]
        lines.append("min " + _sparse_terms(self.objective))
        for r in range(self.num_rows):
            lo, hi = self.A.indptr[r], self.A.indptr[r + 1]
            terms = " ".join(f"{c}:{float(v)!r}" for c, v in zip(self.A.indices[lo:hi], self.A.data[lo:hi]))
            lines.append(f"{terms} <= {float(self.b[r])!r}")
        for j in range(self.num_vars):
            if np.isfinite(self.lower[j]) or np.isfinite(self.upper[j]):
                lines.append(f"bound {j} {float(self.lower[j])!r} {float(self.upper[j])!r}")
        Path(path).write_text("\n".join(lines) + "\n")


def _sparse_terms(vec) -> str:
    return " ".join(f"{j}:{float(v)!r}" for j, v in enumerate(vec) if v != 0.0)


@dataclass(frozen=True, eq=False)
class DcProgram:
    """Per-sample data of the DC-constrained training problem.

    ``Z`` holds the concatenated patterns, ``positive`` marks class C1
    samples and ``nu`` their objective weights.
    """

    Z: np.ndarray
    positive: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        Z = np.atleast_2d(np.asarray(self.Z, dtype=float))
        pos = np.asarray(self.positive, dtype=bool).reshape(-1)
        nu = np.ones(Z.shape[0]) if self.nu is None else np.asarray(self.nu, dtype=float).reshape(-1)
        if Z.shape[0] == 0:
            raise InputError("at least one sample is required")
        if pos.shape[0] != Z.shape[0] or nu.shape[0] != Z.shape[0]:
            raise InputError("Z, positive and nu must have one entry per sample")
        if np.any(nu < 0) or not np.all(np.isfinite(nu)):
            raise InputError("sample weights must be finite and non-negative")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "nu", nu)

    @classmethod
    def from_data(cls, X, positive, nu=None) -> "DcProgram":
        return cls(dc.concat(np.atleast_2d(X)), positive, nu)

    @property
    def M(self) -> int:
        return self.Z.shape[0]

    @property
    def N(self) -> int:
        return self.Z.shape[1]

    @property
    def side(self) -> np.ndarray:
        """+1 for C0 samples (tau <= xi), -1 for C1 samples (tau >= -xi)."""
        return np.where(self.positive, -1.0, 1.0)

    def margins(self, W) -> np.ndarray:
        """Signed constraint values ``side * phi``; positive means violated."""
        return self.side * dc.phi(self.Z, W)

    def hinge(self, W) -> float:
        return float(np.sum(self.nu * np.maximum(self.margins(W), 0.0)))


def all_u_rows(K: int, N: int, M: int) -> np.ndarray:
    j, k, i = np.meshgrid(np.arange(M), np.arange(K), np.arange(N), indexing="ij")
    return np.column_stack([j.ravel(), k.ravel(), i.ravel()])


def active_u_rows(prog: DcProgram, W) -> np.ndarray:
    """The u-definition rows that are tight at ``W`` (one per sample and dendrite)."""
    istar = dc.active_pieces(prog.Z, W)
    M, K = istar.shape
    j, k = np.meshgrid(np.arange(M), np.arange(K), indexing="ij")
    return np.column_stack([j.ravel(), k.ravel(), istar.ravel()])


def u_row_block(layout: VarLayout, Z, triples):
    """Rows ``-u_jk - w_ki <= z_ji`` for the given (j, k, i) triples."""
    triples = np.asarray(triples, dtype=int).reshape(-1, 3)
    r = np.arange(triples.shape[0])
    j, k, i = triples.T
    A = sp.csr_matrix(
        (
            np.full(2 * r.size, -1.0),
            (np.concatenate([r, r]), np.concatenate([layout.u(j, k), layout.w(k, i)])),
        ),
        shape=(r.size, layout.num_vars),
    )
    return A, Z[j, i]


def _linearization_terms(prog: DcProgram, W_t):
    """Per-sample data of the linearized concave parts at ``W_t``.

    Returns the active piece indices (M, K) and, for C1 samples, the
    selected dendrite k* of phi1 (ignored for C0 rows).
    """
    istar = dc.active_pieces(prog.Z, W_t)
    kstar = dc.phi1_selector(prog.Z, W_t) if W_t.shape[0] > 1 else np.zeros(prog.M, dtype=int)
    return istar, kstar


def build_subproblem(prog: DcProgram, W_t, u_rows=None, fixed=None) -> LinearProgram:
    """Convexify the DC constraints at ``W_t`` and encode them as an LP.

    C0 sample j (one row per k)::

        sum_{t != k} u_jt - L2_j(W) - xi_j <= 0

    C1 sample j::

        sum_k u_jk - L1_j(W) - xi_j <= 0

    with ``u_jk >= -z_ji - w_ki`` for the rows in ``u_rows`` (all rows when
    None), hinge rows ``xi_j - h_j <= 0`` and ``h >= 0``.  ``L1``/``L2`` are
    the tangents of phi1/phi2 at ``W_t``.  ``fixed`` is an optional (K, N)
    mask of weights held at their ``W_t`` value.
    """
    W_t = np.atleast_2d(np.asarray(W_t, dtype=float))
    K, N = W_t.shape
    if K < 1:
        raise InputError("at least one dendrite is required")
    if N != prog.N:
        raise InputError(f"weights have {N} columns, patterns have {prog.N}")
    if not np.all(np.isfinite(W_t)):
        raise InputError("expansion point must be finite")
    M = prog.M
    lay = VarLayout(K, N, M)
    Z = prog.Z
    if u_rows is None:
        u_rows = all_u_rows(K, N, M)
    u_rows = np.asarray(u_rows, dtype=int).reshape(-1, 3)

    A_u, b_u = u_row_block(lay, Z, u_rows)

    istar, kstar = _linearization_terms(prog, W_t)
    rows, cols, vals, rhs = [], [], [], []
    r = 0
    ks = np.arange(K)
    for j in range(M):
        zj = Z[j, istar[j]]
        wcols = lay.w(ks, istar[j])
        ucols = lay.u(j, ks)
        if prog.positive[j]:
            keep = ks != kstar[j]
            # sum_k u_jk + sum_{t != k*} w_{t,i*} - xi_j <= -sum_{t != k*} z_{j,i*}
            c = np.concatenate([ucols, wcols[keep], [lay.xi(j)]])
            v = np.concatenate([np.ones(K), np.ones(keep.sum()), [-1.0]])
            rows.append(np.full(c.size, r))
            cols.append(c)
            vals.append(v)
            rhs.append(-np.sum(zj[keep]))
            r += 1
        else:
            const = -np.sum(zj)
            for k in range(K):
                others = ucols[ks != k]
                c = np.concatenate([others, wcols, [lay.xi(j)]])
                v = np.concatenate([np.ones(K - 1), np.ones(K), [-1.0]])
                rows.append(np.full(c.size, r))
                cols.append(c)
                vals.append(v)
                rhs.append(const)
                r += 1
    j = np.arange(M)
    rows.append(np.concatenate([r + j, r + j]))
    cols.append(np.concatenate([lay.xi(j), lay.h(j)]))
    vals.append(np.concatenate([np.ones(M), -np.ones(M)]))
    rhs.extend([0.0] * M)
    r += M
    A_s = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(r, lay.num_vars),
    )

    c = np.zeros(lay.num_vars)
    c[lay.h(j)] = prog.nu
    lower = np.full(lay.num_vars, -np.inf)
    upper = np.full(lay.num_vars, np.inf)
    lower[lay.h(j)] = 0.0
    if fixed is not None:
        fixed = np.asarray(fixed, dtype=bool).reshape(K, N)
        cols_fixed = np.flatnonzero(fixed.ravel())
        lower[cols_fixed] = upper[cols_fixed] = W_t.ravel()[cols_fixed]
    return LinearProgram(
        c,
        sp.vstack([A_u, A_s], format="csr"),
        np.concatenate([b_u, np.asarray(rhs, dtype=float)]),
        lower,
        upper,
        lay,
        u_rows,
    )


def convexified_residuals(prog: DcProgram, W_t, W) -> np.ndarray:
    """Left-hand sides of the convexified constraints at ``W`` with ``u = psi(W)``.

    The smallest feasible ``xi`` for weights ``W`` in the subproblem built at
    ``W_t`` (with every u-definition row present).
    """
    W_t = np.atleast_2d(np.asarray(W_t, dtype=float))
    W = np.atleast_2d(np.asarray(W, dtype=float))
    K = W.shape[0]
    istar, kstar = _linearization_terms(prog, W_t)
    Z = prog.Z
    P = dc.psi_matrix(Z, W)  # (M, K)
    # tangent pieces -z_{j,i*} - w_{k,i*} evaluated at W
    tangents = -np.take_along_axis(Z, istar, axis=1) - W[np.arange(K), istar]
    out = np.empty(prog.M)
    pos = prog.positive
    if np.any(pos):
        keep = np.arange(K)[None, :] != kstar[pos, None]
        out[pos] = np.sum(P[pos], axis=1) - np.sum(np.where(keep, tangents[pos], 0.0), axis=1)
    neg = ~pos
    if np.any(neg):
        out[neg] = np.max(dc._others_sum(P[neg]), axis=1) - np.sum(tangents[neg], axis=1)
    return out


def complete_solution(prog: DcProgram, W_t, W, layout: VarLayout | None = None) -> np.ndarray:
    """Feasible subproblem point with the given weights and minimal xi, h, u."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if layout is None:
        layout = VarLayout(W.shape[0], W.shape[1], prog.M)
    xi = convexified_residuals(prog, W_t, W)
    return layout.encode(W, xi, np.maximum(xi, 0.0), dc.psi_matrix(prog.Z, W))
