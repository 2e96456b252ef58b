import math

import numpy as np
import pytest

import modelopt


def test_problem_catalogue():
    names = set(modelopt.problem_names())
    assert {"quadratic", "logistic-synthetic", "projection-qp", "transport-toy"} <= names


def test_quadratic_reference_data():
    p = modelopt.build_problem("quadratic", {"n": 5})
    assert p.dim == 5
    assert p.x0.shape == (5,)
    assert p.f(p.x_star) == pytest.approx(p.f_star, abs=1e-12)


def test_gm_run_stays_under_its_bound():
    p = modelopt.build_problem("quadratic", {"n": 10})
    r = modelopt.run_benchmark(p, "gm", iters=200)
    assert r.asserted and r.passed
    assert r.iterations == 200
    assert all(g <= b + 1e-10 for g, b in zip(r.gap, r.gap_bound))
    assert np.all(np.diff(r.A) > 0)


def test_fgm_beats_gm():
    p = modelopt.build_problem("quadratic", {"n": 50, "kappa": 100})
    gm = modelopt.run_benchmark(p, "gm", iters=300)
    fgm = modelopt.run_benchmark(p, "fgm", iters=300)
    assert fgm.final_gap < gm.final_gap


def test_primal_dual_returns_multipliers():
    p = modelopt.build_problem("projection-qp")
    r = modelopt.run_benchmark(p, "pd-fgm", iters=200)
    assert r.z_out is not None
    assert r.duality_gap[-1] >= -1e-10
    assert r.passed


def test_scalar_helpers():
    assert modelopt.holder_L(1.0, 1.0) == pytest.approx(1.0)
    assert modelopt.holder_L(1.0, 0.0, 0.5) == pytest.approx(1.0)
    assert modelopt.largest_root(0.0, 1.0) == pytest.approx(1.0)
    x, y = np.array([1.0, 2.0]), np.array([0.0, 0.0])
    assert modelopt.bregman(y, x) == pytest.approx(2.5)
    p, q = np.array([0.5, 0.5]), np.array([0.8, 0.2])
    kl = 0.8 * math.log(0.8 / 0.5) + 0.2 * math.log(0.2 / 0.5)
    assert modelopt.bregman(p, q, geometry="entropy") == pytest.approx(kl)


def test_softmax_prox_step():
    x = modelopt.solve(np.array([0.5, 0.5]), np.array([0.0, math.log(4.0)]), geometry="entropy", simplex=True)
    np.testing.assert_allclose(x, [0.8, 0.2], atol=1e-12)


def test_box_prox_step_clips():
    x = modelopt.solve(np.zeros(2), np.array([3.0, -0.5]), lower=-np.ones(2), upper=np.ones(2))
    np.testing.assert_allclose(x, [-1.0, 0.5], atol=1e-15)


def test_argdual_half_space_projection():
    x, z = modelopt.argdual(np.array([2.0, 0.0]), np.zeros(2), 0.0, 1.0, np.array([[1.0, 0.0]]), np.array([1.0]), ["<="])
    np.testing.assert_allclose(x, [1.0, 0.0], atol=1e-10)
    np.testing.assert_allclose(z, [1.0], atol=1e-10)


def test_errors_carry_kind():
    with pytest.raises(modelopt.ModeloptError) as e:
        modelopt.build_problem("no-such-problem")
    assert e.value.kind == "rejected_input"
    B = np.array([[1.0, 0.0], [-1.0, 0.0]])
    with pytest.raises(modelopt.ModeloptError) as e:
        modelopt.argdual(np.zeros(2), np.zeros(2), 1.0, 1.0, B, np.array([-1.0, -1.0]), ["<=", "<="])
    assert e.value.kind == "infeasible"


def test_cli_in_process(tmp_path):
    out = tmp_path / "trace.csv"
    code, stdout, _ = modelopt.run_command(
        ["run", "--problem", "quadratic", "--solver", "fgm", "--iters", "50", "--out", str(out)])
    assert code == 0
    assert out.exists()
    assert stdout
    assert modelopt.run_command(["run", "--problem", "quadratic", "--solver", "adam"])[0] == 2
