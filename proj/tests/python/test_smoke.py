import math

import numpy as np
import pytest

import rminimax as rx


FIG1_A = np.array([[1.0], [1.0], [1.0]])
FIG1_B = np.array([1.0, 1.0, 0.99])


def test_linalg_surface():
    u, s, vt = rx.svd(np.diag([3.0, 1.0]))
    assert np.allclose(s, [3.0, 1.0])
    evs = rx.eigenvalues_general(np.array([[0.0, -1.0], [2.0, -2.0]]))
    assert sorted(round(e.real, 9) for e in evs) == [-1.0, -1.0]
    assert rx.operator_norm(np.diag([1.0, -4.0])) == pytest.approx(4.0)


def test_manifold_surface():
    sphere = rx.Manifold.sphere(3)
    p = np.array([0.0, 0.0, 1.0])
    t = rx.project_tangent(sphere, p, np.array([1.0, 2.0, 3.0]))
    assert np.allclose(t, [1.0, 2.0, 0.0])
    q = rx.retract(sphere, np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))
    assert np.allclose(q, [1 / math.sqrt(2), 1 / math.sqrt(2), 0.0])
    basis = rx.tangent_basis(sphere, p)
    assert basis.shape == (3, 2)


def test_example2_equilibrium_and_certificates():
    game = rx.LinearSphereGame("example2", FIG1_A, FIG1_B, kappa=0.1)
    x, y = game.equilibrium()
    assert x[0] == pytest.approx(0.9975, abs=5e-4)
    assert game.value(x, y) == pytest.approx(-0.141, abs=1e-3)

    blocks = rx.intrinsic_blocks(game, x, y)
    gda = rx.gda_certificate(blocks["a"], blocks["b"], blocks["c"])
    assert gda["tau_threshold"] == pytest.approx(36.18, abs=0.4)
    sga = rx.sga_certificate(blocks["a"], blocks["b"], blocks["c"], 0.15)
    assert sga["tau_threshold"] == pytest.approx(16.7, abs=0.3)

    cls = rx.classify_equilibrium(game, x, y)
    assert cls["class"] == "DSE_not_DNE"


def test_solver_runs():
    game = rx.LinearSphereGame("example2", FIG1_A, FIG1_B, kappa=0.1)
    x0, y0 = game.least_squares_point()
    out = rx.run_solver(game, x0, y0, mode="sga", tau=10.0, gamma=1e-4, theta=0.15,
                        max_iters=2000, record_every=100)
    assert not out["diverged"]
    assert out["dist"][-1] < out["dist"][0]


def test_wgan_surface():
    spec = rx.GaussianWganSpec()
    a = np.zeros((5, 4))
    assert rx.covariance_error(spec, a) == pytest.approx(16.0)
    p = np.zeros((2, 3))
    q = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    assert rx.emd(p, q) == pytest.approx(0.5)
    state = rx.wgan_pretrain(spec, seed=3, iters=50, batch_size=16)
    assert state["a_x"].shape == (5, 4)
    assert not state["diverged"]
