import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from conftest import kdv_corpus, soliton, soliton_dressing
from gbdt.core import Triple, build_s_engine, make_dressing, potential
from gbdt.errors import SingularS
from gbdt.kdv import (build_kdv_engine, kdv_identity_defect, kdv_lambda_pair, kdv_potential,
                      kdv_s_matrix, kdv_s_path, sample_kdv_field)
from gbdt.matfun import expm
from gbdt.verify import FD_QUADRATURE, KDV_C, kdv_residual, kdv_units, sampled_max_norm
from gbdt.grid import Grid2D, GridSpec

CORPUS = kdv_corpus(4, seed=3)


@pytest.mark.parametrize('kappa', [0.5, 1.0, 1.7])
def test_one_soliton(kappa):
    d = soliton_dressing(kappa)
    eng = build_kdv_engine(d)
    for x, t in ((0.0, 0.0), (-1.2, 0.1), (2.0, 0.3), (0.5, -0.2)):
        assert kdv_potential(eng, x, t)[0, 0] == pytest.approx(soliton(kappa, x, t), abs=1e-12)


def test_soliton_moves_right_with_speed_4_kappa_squared():
    kappa = 1.2
    eng = build_kdv_engine(soliton_dressing(kappa))
    peak = [minimize_scalar(lambda x: kdv_potential(eng, x, t)[0, 0].real, bounds=(-3, 6),
                            method='bounded', options={'xatol': 1e-9}).x for t in (0.0, 0.5)]
    assert peak[1] - peak[0] == pytest.approx(4 * kappa ** 2 * 0.5, abs=1e-6)


def test_time_zero_equals_stationary_potential():
    for d in CORPUS:
        ke, se = build_kdv_engine(d), build_s_engine(d)
        for x in (0.1, 1.3):
            assert np.allclose(kdv_potential(ke, x, 0.0), potential(d, se, x), atol=1e-11)


def test_lambda_time_dependence():
    d = CORPUS[1]
    l1, l2 = kdv_lambda_pair(d, 0.3, 0.2)
    m1, m2 = kdv_lambda_pair(d, 0.3, 0.0)
    # d/dt exp(4itQ^3) acts like 4 A d/dx along the x-flow; compare with the block form
    n = d.n
    gen = np.block([[np.zeros((n, n)), d.A], [-np.eye(n), np.zeros((n, n))]])
    prop = expm(4 * 0.2 * gen @ np.block([[d.A, 0 * d.A], [0 * d.A, d.A]]))
    stacked = prop @ np.vstack([m1, m2])
    assert np.allclose(stacked[:n], l1, atol=1e-10)
    assert np.allclose(stacked[n:], l2, atol=1e-10)


def test_closed_form_matches_both_paths():
    for d in CORPUS:
        eng = build_kdv_engine(d)
        assert eng.mode == 'closed_form'
        for x, t in ((0.7, 0.05), (-0.4, 0.1), (1.5, -0.03)):
            s = kdv_s_matrix(eng, x, t)
            for path in ('tx', 'xt'):
                p = kdv_s_path(eng, x, t, path)
                assert np.linalg.norm(s - p) <= 1e-8 * np.linalg.norm(p)


def test_s_at_origin():
    d = CORPUS[0]
    assert np.allclose(kdv_s_matrix(build_kdv_engine(d), 0.0, 0.0), d.triple.S0, atol=1e-12)
    assert np.array_equal(kdv_s_path(build_kdv_engine(d, mode='quadrature'), 0, 0), d.triple.S0)


def test_bad_path_name():
    with pytest.raises(ValueError):
        kdv_s_path(build_kdv_engine(CORPUS[0]), 1.0, 1.0, path='diagonal')


def test_identity_propagates_in_time():
    for d in CORPUS:
        eng = build_kdv_engine(d)
        for x, t in ((0.0, 0.0), (1.0, 0.08), (-2.0, 0.1)):
            assert np.linalg.norm(kdv_identity_defect(eng, x, t)) < 1e-10 * max(
                1, np.linalg.norm(kdv_s_matrix(eng, x, t)))


def test_potential_hermitian_in_matrix_case():
    d = next(d for d in CORPUS if d.h == 2)
    eng = build_kdv_engine(d)
    u = kdv_potential(eng, 0.6, 0.07)
    assert np.linalg.norm(u - u.conj().T) < 1e-10 * np.linalg.norm(u)
    assert np.linalg.norm(u @ np.diag([1, 2]) - np.diag([1, 2]) @ u) > 1e-3


def test_soliton_residual_calibration():
    # the constant in the KdV bound is calibrated on this exact solution
    for kappa in (0.5, 1.0, 1.5):
        d = soliton_dressing(kappa)
        eng = build_kdv_engine(d, **FD_QUADRATURE)
        grid = Grid2D(GridSpec(-1.0, 1.0, 0.5), GridSpec(0.0, 0.1, 0.05))
        u = lambda x, t: kdv_potential(eng, x, t)  # noqa: E731
        lx, lt = kdv_units(d, sampled_max_norm(u, [(0.0, 0.0)]))
        rep = kdv_residual(u, grid, fd_steps=(8e-3 * lx, 8e-3 * lt), units=(lx, lt))
        ratio = rep.max_residual / (rep.step ** 2 * rep.scale)
        assert 0.01 < ratio < KDV_C / 4


def test_residual_detects_wrong_solution():
    d = soliton_dressing(1.0)
    eng = build_kdv_engine(d, **FD_QUADRATURE)
    grid = Grid2D(GridSpec(-1.0, 1.0, 0.5), GridSpec(0.0, 0.1, 0.05))
    lx, lt = kdv_units(d, 2.0)
    steps, units = (8e-3 * lx, 8e-3 * lt), (lx, lt)
    good = kdv_residual(lambda x, t: kdv_potential(eng, x, t), grid, steps, units)
    bad = kdv_residual(lambda x, t: 1.02 * kdv_potential(eng, x, t), grid, steps, units)
    assert good.passed(1e-5, KDV_C)
    assert not bad.passed(1e-5, KDV_C)


def test_sample_field_flags_singular_points():
    # S(x, 0) = (1 - exp(-2x)) / 2 vanishes only at x = 0
    d = make_dressing(Triple([[-1.0]], [[0.0]], [[1.0]], [[1.0]]))
    eng = build_kdv_engine(d)
    xs = np.linspace(-1, 1, 5)
    field = sample_kdv_field(eng, xs, [0.0])
    assert [s[0] for s in field.singular] == [0.0]
    assert np.isnan(field.values[0, 2, 0, 0])
    assert np.all(np.isfinite(field.values[0, [0, 1, 3, 4]]))
    with pytest.raises(SingularS):
        kdv_potential(eng, 0.0, 0.0)
