import json
from pathlib import Path

import numpy as np
import pytest

from oracles import lp_vertex_enumeration, random_small_lp
from slmp.lp import KERNEL, revised_simplex
from slmp.lp import _simplex_kernel_py

CASES = json.loads((Path(__file__).with_name("data") / "lp_cases.json").read_text())["cases"]

try:
    from slmp.lp._simplex_kernel import run_phase as compiled_phase
except ImportError:
    compiled_phase = None

KERNELS = [pytest.param(_simplex_kernel_py.run_phase, id="python"),
           pytest.param(compiled_phase, id="compiled",
                        marks=pytest.mark.skipif(compiled_phase is None, reason="extension not built"))]


def test_kernel_selected():
    assert KERNEL in ("compiled", "python")


@pytest.mark.parametrize("kernel", KERNELS)
def test_frozen_vertex_oracle(kernel):
    for case in CASES:
        res = revised_simplex(case["c"], case["A"], case["b"], case["lo"], case["up"], run_phase=kernel)
        assert res.status == case["status"]
        if case["status"] == "optimal":
            assert abs(res.objective - case["value"]) <= 1e-7
            A = np.asarray(case["A"])
            assert np.all(A @ res.x <= np.asarray(case["b"]) + 1e-7)
            assert np.all(res.x >= np.asarray(case["lo"]) - 1e-7) and np.all(res.x <= np.asarray(case["up"]) + 1e-7)


def test_live_vertex_oracle():
    r = np.random.default_rng(99)
    for _ in range(40):
        c, A, b, lo, up = random_small_lp(r)
        status, value = lp_vertex_enumeration(c, A, b, lo, up)
        res = revised_simplex(c, A, b, lo, up)
        assert res.status == status
        if status == "optimal":
            assert res.objective == pytest.approx(value, abs=1e-7)


@pytest.mark.skipif(compiled_phase is None, reason="extension not built")
def test_kernels_agree_pivot_for_pivot():
    for case in CASES[:60]:
        a = revised_simplex(case["c"], case["A"], case["b"], case["lo"], case["up"], run_phase=compiled_phase)
        b = revised_simplex(case["c"], case["A"], case["b"], case["lo"], case["up"], run_phase=_simplex_kernel_py.run_phase)
        assert (a.status, a.pivots) == (b.status, b.pivots)
        if a.status == "optimal":
            assert np.allclose(a.x, b.x, atol=1e-12)


def test_hand_examples():
    res = revised_simplex([-1.0], [[1.0]], [1.0], [0.0], None)
    assert res.status == "optimal" and res.x[0] == pytest.approx(1.0) and res.objective == pytest.approx(-1.0)
    assert revised_simplex([0.0], [[1.0]], [-1.0], [0.0], None).status == "infeasible"
    assert revised_simplex([-1.0], [[-1.0]], [0.0], [0.0], None).status == "unbounded"


def test_free_variables_and_negative_rhs():
    # min x + y, x + y >= 2 (as -x - y <= -2), x - y <= 0; both free
    res = revised_simplex([1.0, 1.0], [[-1.0, -1.0], [1.0, -1.0]], [-2.0, 0.0])
    assert res.status == "optimal" and res.objective == pytest.approx(2.0)


def test_beale_cycling_example():
    # classic instance on which the textbook largest-coefficient rule cycles
    c = [-0.75, 150.0, -0.02, 6.0]
    A = [[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]]
    res = revised_simplex(c, A, [0.0, 0.0, 1.0], np.zeros(4), None)
    assert res.status == "optimal" and res.objective == pytest.approx(-0.05, abs=1e-9)


def test_upper_bounds_only():
    res = revised_simplex([1.0, -2.0], np.zeros((1, 2)), [0.0], None, [3.0, 4.0])
    assert res.status == "unbounded"
    res = revised_simplex([-1.0, -2.0], np.zeros((1, 2)), [0.0], None, [3.0, 4.0])
    assert res.status == "optimal" and res.objective == pytest.approx(-11.0)


def test_crossed_bounds_infeasible():
    assert revised_simplex([1.0], [[1.0]], [1.0], [2.0], [1.0]).status == "infeasible"


def test_iteration_limit():
    c, A, b, lo, up = [-1.0, -1.0], [[1.0, 2.0], [2.0, 1.0]], [4.0, 4.0], [0.0, 0.0], None
    assert revised_simplex(c, A, b, lo, up, max_iter=1).status == "iter_limit"
    assert revised_simplex(c, A, b, lo, up).status == "optimal"


def test_refactorization_long_run():
    # enough pivots to pass several refactorization points
    r = np.random.default_rng(3)
    n, m = 40, 60
    A = r.uniform(0, 1, size=(m, n))
    res = revised_simplex(-r.uniform(0.5, 1, size=n), A, np.ones(m), np.zeros(n), None)
    assert res.status == "optimal" and res.pivots > 64
    assert np.all(A @ res.x <= 1 + 1e-9)
    # value from an independent LP solver, frozen
    assert res.objective == pytest.approx(-1.5512408380324902, abs=1e-9)


def test_pure_python_switch():
    import os
    import subprocess
    import sys

    env = {**os.environ, "SLMP_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", "from slmp.lp import KERNEL; print(KERNEL)"], env=env,
                         capture_output=True, text=True, check=True).stdout.strip()
    assert out == "python"
