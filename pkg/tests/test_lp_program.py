import numpy as np
import pytest
import scipy.sparse as sp

from slmp import dc
from slmp.errors import InputError
from slmp.lp import (DcProgram, LinearProgram, LpSolution, LpStatus, VarLayout, active_u_rows, build_subproblem,
                     complete_solution, convexified_residuals, solve_lp)
from slmp.lp.solve import AUTO_DENSE_LIMIT, pick_method


def random_program(r, M=12, n=2, K=2):
    X = r.normal(size=(M, n))
    pos = np.arange(M) % 2 == 1
    W = r.normal(size=(K, 2 * n))
    return DcProgram.from_data(X, pos), W


def test_single_sample_hand_construction():
    prog = DcProgram.from_data([[0.5]], [True])
    lp = build_subproblem(prog, np.array([[0.0, 1.0]]))
    lay = lp.layout
    assert lp.num_vars == 5
    names = set(lp.var_names)
    assert names == {("w", 0, 0), ("w", 0, 1), ("xi", 0), ("h", 0), ("u", 0, 0)}
    col = lp.var_names
    rows = {tuple(np.round(a, 12)) + (b,) for a, rel, b in lp.constraints}
    expected = set()
    z = [0.5, -0.5]
    for i in range(2):
        a = np.zeros(5)
        a[col[("u", 0, 0)]] = -1.0
        a[col[("w", 0, i)]] = -1.0
        expected.add(tuple(a) + (z[i],))  # u >= -z_i - w_i
    a = np.zeros(5)
    a[col[("u", 0, 0)]], a[col[("xi", 0)]] = 1.0, -1.0
    expected.add(tuple(a) + (0.0,))  # u <= xi, the phi1 tangent is zero for K=1
    a = np.zeros(5)
    a[col[("xi", 0)]], a[col[("h", 0)]] = 1.0, -1.0
    expected.add(tuple(a) + (0.0,))  # h >= xi
    assert rows == expected
    assert lp.lower[lay.h(0)] == 0.0 and np.isinf(lp.upper[lay.h(0)])
    assert np.array_equal(lp.objective, np.eye(5)[lay.h(0)])
    assert all(rel == "<=" for _, rel, _ in lp.constraints)


@pytest.mark.parametrize("K, n, M", [(1, 1, 1), (2, 3, 7), (4, 2, 10)])
def test_variable_count(K, n, M):
    r = np.random.default_rng(K + n + M)
    prog = DcProgram.from_data(r.normal(size=(M, n)), np.arange(M) % 2 == 0)
    lp = build_subproblem(prog, r.normal(size=(K, 2 * n)))
    assert lp.num_vars == K * 2 * n + 2 * M + M * K
    n0 = int(np.sum(~prog.positive))
    assert lp.num_rows == M * K * 2 * n + n0 * K + (M - n0) + M


def test_layout_bijection():
    lay = VarLayout(3, 4, 5)
    seen = set()
    for col in range(lay.num_vars):
        name = lay.name(col)
        assert lay.column(name) == col
        seen.add(name)
    assert len(seen) == lay.num_vars
    with pytest.raises(IndexError):
        lay.name(lay.num_vars)


def test_decode_encode_identity(rng):
    lay = VarLayout(2, 6, 4)
    v = rng.normal(size=lay.num_vars)
    parts = lay.decode(v)
    assert np.array_equal(lay.encode(parts["W"], parts["xi"], parts["h"], parts["u"]), v)


def test_previous_iterate_is_feasible(rng):
    for _ in range(20):
        prog, W = random_program(rng, M=int(rng.integers(1, 15)), n=int(rng.integers(1, 4)), K=int(rng.integers(1, 5)))
        lp = build_subproblem(prog, W)
        v = complete_solution(prog, W, W)
        assert lp.residual(v) <= 1e-12
        xi = lp.layout.decode(v)["xi"]
        # tight linearizations: the convexified slack equals side * tau at W_t
        assert np.allclose(xi, prog.margins(W), atol=1e-12)
        assert float(lp.objective @ v) == pytest.approx(prog.hinge(W), abs=1e-12)


def test_completed_point_feasible_at_other_weights(rng):
    prog, W_t = random_program(rng, K=3)
    W = W_t + rng.normal(size=W_t.shape)
    lp = build_subproblem(prog, W_t)
    assert lp.residual(complete_solution(prog, W_t, W)) <= 1e-12


def test_inner_approximation(rng):
    for K in (1, 2, 3):
        prog, W_t = random_program(rng, M=14, K=K)
        sol = solve_lp(build_subproblem(prog, W_t), method="simplex")
        assert sol.status is LpStatus.OPTIMAL
        parts = build_subproblem(prog, W_t).layout.decode(sol.values)
        # the true DC constraints hold at (W*, xi*)
        assert np.all(prog.margins(parts["W"]) <= parts["xi"] + 1e-7)
        assert sol.objective_value <= prog.hinge(W_t) + 1e-7


def test_backends_agree(rng):
    prog, W_t = random_program(rng, M=16, K=2)
    lp = build_subproblem(prog, W_t)
    values = {m: solve_lp(lp, method=m) for m in ("simplex", "highs", "ipm")}
    ref = values["simplex"].objective_value
    for m, sol in values.items():
        assert sol.status is LpStatus.OPTIMAL, m
        assert sol.objective_value == pytest.approx(ref, abs=1e-6), m
        assert lp.residual(sol.values) <= 1e-6, m


def test_row_generation_matches_full(rng):
    from slmp.lp.program import u_row_block

    prog, W_t = random_program(rng, M=20, K=3)
    full = solve_lp(build_subproblem(prog, W_t), method="simplex").objective_value
    lp = build_subproblem(prog, W_t, active_u_rows(prog, W_t))
    present = {tuple(t) for t in lp.u_rows}
    while True:
        sol = solve_lp(lp, method="simplex")
        parts = lp.layout.decode(sol.values)
        pieces = -prog.Z[:, None, :] - parts["W"][None]
        j, k = np.nonzero(pieces.max(axis=2) - parts["u"] > 1e-9)
        new = [t for t in zip(j, k, pieces[j, k].argmax(axis=1)) if t not in present]
        if not new:
            break
        present.update(new)
        lp = lp.add_rows(*u_row_block(lp.layout, prog.Z, new), np.array(new))
    assert sol.objective_value == pytest.approx(full, abs=1e-7)


def test_convexified_residuals_match_lp_rows(rng):
    prog, W_t = random_program(rng, K=3)
    W = W_t + 0.3 * rng.normal(size=W_t.shape)
    xi = convexified_residuals(prog, W_t, W)
    # each residual is the smallest xi making that sample's rows feasible
    lp = build_subproblem(prog, W_t)
    v = complete_solution(prog, W_t, W)
    lay = lp.layout
    assert np.array_equal(lay.decode(v)["xi"], xi)
    for j in range(prog.M):
        w = v.copy()
        w[lay.xi(j)] -= 1e-6
        assert lp.residual(w) > 0


def test_single_class_allowed():
    prog = DcProgram.from_data([[0.0], [1.0]], [True, True])
    sol = solve_lp(build_subproblem(prog, np.array([[0.5, 0.5]])), method="simplex")
    assert sol.status is LpStatus.OPTIMAL and sol.objective_value == pytest.approx(0.0, abs=1e-9)


def test_fixed_columns(rng):
    prog, W_t = random_program(rng, K=1)
    fixed = np.zeros_like(W_t, dtype=bool)
    fixed[0, 2:] = True
    lp = build_subproblem(prog, W_t, fixed=fixed)
    sol = solve_lp(lp, method="simplex")
    W = lp.layout.decode(sol.values)["W"]
    assert np.allclose(W[0, 2:], W_t[0, 2:], atol=1e-9)


def test_build_errors():
    prog = DcProgram.from_data([[0.0]], [True])
    with pytest.raises(InputError):
        build_subproblem(prog, np.zeros((0, 2)))
    with pytest.raises(InputError):
        build_subproblem(prog, np.zeros((1, 4)))
    with pytest.raises(InputError):
        build_subproblem(prog, np.array([[0.0, np.nan]]))
    with pytest.raises(InputError):
        DcProgram.from_data([[0.0]], [True], [-1.0])


def test_lp_dump_format(tmp_path):
    prog = DcProgram.from_data([[0.5]], [True])
    lp = build_subproblem(prog, np.array([[0.0, 1.0]]))
    path = tmp_path / "lp.txt"
    lp.write(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "vars 5 rows 4"
    assert lines[1] == f"min {lp.layout.h(0)}:1.0"
    assert all(" <= " in line for line in lines[2:6])
    assert lines[6:] == [f"bound {lp.layout.h(0)} 0.0 inf"]


def test_lp_solution_invariant():
    with pytest.raises(ValueError):
        LpSolution(LpStatus.INFEASIBLE, np.zeros(1), 0.0)
    with pytest.raises(ValueError):
        LpSolution(LpStatus.OPTIMAL, None, None)


def test_highs_status_detection():
    infeasible = LinearProgram([0.0], sp.csr_matrix([[1.0]]), [-1.0], [0.0], [np.inf])
    unbounded = LinearProgram([-1.0], sp.csr_matrix([[-1.0]]), [0.0], [0.0], [np.inf])
    for method in ("simplex", "highs", "ipm"):
        assert solve_lp(infeasible, method=method).status is LpStatus.INFEASIBLE, method
        assert solve_lp(unbounded, method=method).status is LpStatus.UNBOUNDED, method


def test_method_selection():
    small = LinearProgram([1.0], sp.csr_matrix([[1.0]]), [1.0], None, None)
    assert pick_method(small) == "simplex"
    m = int(np.sqrt(AUTO_DENSE_LIMIT)) + 1
    big = LinearProgram(np.zeros(1), sp.csr_matrix((m, 1)), np.zeros(m), None, None)
    assert pick_method(big) == "ipm"
    with pytest.raises(InputError):
        solve_lp(small, method="magic")


def test_lp_shape_validation():
    with pytest.raises(InputError):
        LinearProgram([1.0, 2.0], sp.csr_matrix([[1.0]]), [1.0], None, None)
