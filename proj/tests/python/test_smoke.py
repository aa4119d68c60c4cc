import math

import numpy as np
import pytest

import sns2d


TWO_PI = 2.0 * math.pi


def test_grid_and_dealiasing():
    g = sns2d.make_grid(32, TWO_PI)
    assert g.n_modes == 32
    assert g.dealias_cutoff == 10
    assert g.wavenumber_unit() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        sns2d.make_grid(3, 1.0)


def test_taylor_green_advection_vanishes():
    g = sns2d.make_grid(32, TWO_PI)
    tg = sns2d.taylor_green_field(g, 1.0)
    b = sns2d.bilinear_b(tg, tg)
    assert sns2d.norm_l2(b) <= 1e-13 * sns2d.norm_l2(tg)


def test_trilinear_antisymmetry():
    g = sns2d.make_grid(32, TWO_PI)
    u = sns2d.random_solenoidal_field(g, 1.5, 7, 0)
    v = sns2d.random_solenoidal_field(g, 1.5, 7, 1)
    w = sns2d.random_solenoidal_field(g, 1.5, 7, 2)
    s = sns2d.trilinear_form(u, v, w) + sns2d.trilinear_form(u, w, v)
    scale = sns2d.norm_bundle(u).v * sns2d.norm_bundle(v).v * sns2d.norm_bundle(w).v
    assert abs(s) <= 1e-10 * scale


def test_field_numpy_round_trip():
    g = sns2d.make_grid(16, TWO_PI)
    f = sns2d.random_solenoidal_field(g, 1.0, 3, 0)
    arr = f.to_array()
    assert arr.shape == (2, 16, 16)
    back = sns2d.field_from_array(g, arr)
    assert sns2d.norm_l2(back - f) == 0.0


def test_theory_numbers():
    assert sns2d.c_beta(1.0, 1.0) == pytest.approx(27.0 / 256.0, abs=1e-14)
    p = sns2d.AnalysisParams()
    p.viscosity = 1.0
    p.horizon = 1.0
    p.k0 = 1.0
    p.k1 = 0.0
    p.c_bar = 1.0
    p.c_tilde = 1.0
    rc = sns2d.euler_constants(p)
    assert rc.alpha0 == pytest.approx(0.25, abs=1e-14)
    assert rc.gamma_sup == pytest.approx(1.0 / 6.0, abs=1e-13)
    assert rc.threshold_lin_growth(1e6) > 0.0


def test_trajectory_determinism_and_energy():
    g = sns2d.make_grid(16, TWO_PI)
    model = sns2d.build_noise_model(g, 0.5, 3.0, sns2d.GKind.additive)
    params = sns2d.SchemeParams()
    params.viscosity = 1.0
    params.horizon = 0.25
    params.n_steps = 8
    params.kind = sns2d.SchemeKind.fully_implicit
    u0 = sns2d.taylor_green_field(g, 1.0)
    path = sns2d.sample_wiener_path(model, 0.25, 32, 99)

    rec1 = sns2d.run_trajectory(u0, params, model, path)
    rec2 = sns2d.run_trajectory(u0, params, model, path)
    assert len(rec1.states) == 9
    for a, b in zip(rec1.states, rec2.states):
        assert np.array_equal(a.to_array(), b.to_array())
    for d in rec1.diagnostics:
        nb = sns2d.norm_bundle(rec1.states[-1])
        assert abs(d.energy_defect) <= 10 * params.solver_tol * (1 + nb.v**2) * 10


def test_path_coarsening_exact():
    g = sns2d.make_grid(16, TWO_PI)
    model = sns2d.build_noise_model(g, 1.0, 3.0, sns2d.GKind.additive)
    path = sns2d.sample_wiener_path(model, 1.0, 8, 5)
    coarse = sns2d.coarsen_path(path, 4)
    fine = path.increments()
    want = fine[0:4].sum(axis=0)
    got = coarse.increments()[0]
    assert np.array_equal(want, got)


def test_fit_rate_exact_power_law():
    pts = [(float(n), 2.0 * n ** -0.5) for n in (8, 16, 32, 64)]
    order, intercept, half_width = sns2d.fit_rate(pts)
    assert order == pytest.approx(0.5, abs=1e-12)
    assert half_width <= 1e-10


def test_small_strong_error_study():
    cfg = sns2d.StudyConfig()
    cfg.grid = sns2d.make_grid(16, TWO_PI)
    cfg.viscosity = 1.0
    cfg.horizon = 0.25
    cfg.noise = sns2d.build_noise_model(cfg.grid, 0.5, 3.0, sns2d.GKind.additive)
    init = sns2d.InitSpec()
    init.kind = sns2d.InitKind.taylor_green
    cfg.init = init
    cfg.ladder = [2, 4, 8]
    cfg.reference_n = 64
    cfg.mc_samples = 2
    cfg.base_seed = 11
    rep = sns2d.strong_error_study(cfg)
    assert len(rep.rows) == 3
    assert all(r.est_max_l2_sq > 0 for r in rep.rows)
    assert len(rep.fits) == 2
