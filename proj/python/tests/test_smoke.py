import math

import numpy as np
import pytest

import lowmach as lm


def test_spectral_identities():
    d = lm.DomainSpec.torus(32, 32)
    g = lm.random_field(d, lm.Parity.Periodic, 6, 3)
    u = lm.random_vector_field(d, 6, 4)
    lap = lm.laplacian(g)
    assert (lm.delta(lm.grad(g)) + lap).max_abs() <= 1e-10 * lap.max_abs()
    a, b = lm.inner(g, lm.delta(u)), lm.inner(lm.grad(g), u)
    assert abs(a - b) <= 1e-10 * (abs(a) + abs(b))


def test_numpy_round_trip_and_shape_check():
    d = lm.DomainSpec.channel(16, 8)
    f = lm.random_field(d, lm.Parity.EvenInY, 3, 1)
    arr = f.to_numpy()
    assert arr.shape == (9, 16)  # nodes include both walls
    g = lm.ScalarField(d, lm.Parity.EvenInY, arr)
    assert np.array_equal(g.to_numpy(), arr)
    with pytest.raises(lm.InputError):
        lm.ScalarField(d, lm.Parity.EvenInY, np.zeros((8, 16)))


def test_projections():
    d = lm.DomainSpec.channel(32, 32)
    w = lm.random_vector_field(d, 6, 2)
    p, q = lm.helmholtz_decompose(w)
    n0 = lm.sobolev_norm(w, 0)
    assert lm.sobolev_norm(lm.project_p(p) - p, 0) <= 1e-10 * n0
    assert lm.sobolev_norm(lm.project_p(q), 0) <= 1e-10 * n0
    assert lm.sobolev_norm(lm.div(p), 0) <= 1e-10 * lm.sobolev_norm(w, 1)


def test_taylor_green_is_stationary():
    d = lm.DomainSpec.torus(32, 32, 2 * math.pi)
    x, y = lm.ScalarField.constant(d, lm.Parity.Periodic, 0.0).coordinates()
    X, Y = np.meshgrid(x, y)
    vx = lm.ScalarField(d, lm.Parity.Periodic, np.sin(X) * np.cos(Y))
    vy = lm.ScalarField(d, lm.Parity.Periodic, -np.cos(X) * np.sin(Y))
    v0 = lm.VectorField(vx, vy)
    final, series = lm.run_incompressible(lm.EulerState(v0), 0.2)
    assert final.t == pytest.approx(0.2)
    assert lm.sobolev_norm(final.v - v0, 0) <= 1e-8
    assert max(abs(e / series["kinetic"][0] - 1) for e in series["kinetic"]) <= 1e-8


def test_compressible_run_and_cascade():
    c = lm.Config()
    c.set("domain.nx", "16")
    c.set("domain.ny", "16")
    s0 = lm.initial_state(c, 100.0)
    eos = lm.Eos.gamma_law(100.0)
    final, series = lm.run_compressible(s0, eos, 0.05)
    assert abs(series["mass"][-1] / series["mass"][0] - 1) <= 1e-8
    rep = lm.cascade(final, eos)
    assert rep.f4 > 0 and math.isfinite(rep.E)


def test_config_errors():
    c = lm.Config()
    with pytest.raises(lm.ConfigError):
        c.set("no.such.key", "1")
    with pytest.raises(lm.ConfigError):
        lm.Config.parse("domain.nx = 24\n")
    assert "sweep.k_list" in lm.config_keys()


def test_burgers_oracle():
    n = 512
    x = np.arange(n) / n
    u0 = list(0.1 * np.sin(2 * np.pi * x))
    t = 0.5
    exact = np.array(lm.burgers_exact(u0, t))
    numeric = np.array(lm.burgers_numeric(u0, t, n))
    assert np.max(np.abs(exact - numeric)) <= 1e-6
    assert lm.burgers_horizon(u0) == pytest.approx(1 / (0.2 * np.pi), rel=1e-8)
    with pytest.raises(lm.HorizonError):
        lm.burgers_exact(u0, 2.0)


def test_fit_slope():
    k = [1e2, 1e3, 1e4]
    fit = lm.fit_slope(k, [2 * kk**-0.5 for kk in k])
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    assert fit.constant() == pytest.approx(2.0, rel=1e-10)
    with pytest.raises(lm.InputError):
        lm.fit_slope([1.0, 2.0], [1.0, 2.0])
