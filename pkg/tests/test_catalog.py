import numpy as np
import pytest

from gbdt.catalog import (PRESETS, ee2_dressing, ee2_potential_reference,
                          ee3_dressing, ee3_gamma, ee3_potential_reference, ee3_triple,
                          ee36_dressing, ee36_fundamental, get_preset)
from gbdt.core import (SolutionRequest, build_s_engine, lambda_pair, potential, s_matrix,
                       transformed_solution, validate_triple)
from gbdt.errors import SingularGamma, SingularMatrix


def random_hermitian_pd(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return m @ m.conj().T + 0.5 * np.eye(n)


# ---------------------------------------------------------------- ee2

def test_ee2_scalar():
    for x in (0.0, 0.5, 3.0):
        assert ee2_potential_reference([[1]], [[1]], x)[0, 0] == pytest.approx(2 / (1 + x) ** 2,
                                                                                 rel=1e-14)


def test_ee2_forms_agree(rng):
    for _ in range(10):
        n = int(rng.integers(1, 5))
        h = int(rng.integers(1, 3))
        s0 = random_hermitian_pd(rng, n)
        t2 = rng.normal(size=(n, h)) + 1j * rng.normal(size=(n, h))
        for x in (0.1, 1.7):
            a = ee2_potential_reference(s0, t2, x)
            b = ee2_potential_reference(s0, t2, x, form='resolvent')
            assert np.linalg.norm(a - b) <= 1e-12 * max(1, np.linalg.norm(a))


def test_ee2_zero_theta():
    assert np.array_equal(ee2_potential_reference(np.eye(2), np.zeros((2, 1)), 0.7),
                          np.zeros((1, 1)))


def test_ee2_singular():
    with pytest.raises(SingularMatrix):
        ee2_potential_reference([[1.0]], [[1.0]], -1.0)
    with pytest.raises(SingularMatrix):
        ee2_potential_reference([[0.0]], [[1.0]], 1.0, form='resolvent')
    with pytest.raises(ValueError):
        ee2_potential_reference([[1.0]], [[1.0]], 1.0, form='series')


def test_ee2_pipeline(rng):
    s0 = random_hermitian_pd(rng, 3)
    t2 = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    d = ee2_dressing(s0, t2)
    assert validate_triple(d.triple).identity == 0.0
    eng = build_s_engine(d)
    assert eng.mode == 'quadrature'
    for x in rng.uniform(0, 5, 20):
        l1, l2 = lambda_pair(d, x)
        assert np.array_equal(l1, np.zeros_like(l1))
        assert np.allclose(s_matrix(eng, x), s0 + x * t2 @ t2.conj().T, atol=1e-12)
        ref = ee2_potential_reference(s0, t2, x)
        assert np.linalg.norm(potential(d, eng, x) - ref) <= 1e-10 * max(1, np.linalg.norm(ref))


# ---------------------------------------------------------------- ee3

def test_ee3_triple_is_exact():
    for b, c, d in ((1, 0, 1), (2.5, -1, 0.3), (-1, 4, -2)):
        chk = validate_triple(ee3_triple(b, c, d))
        assert chk.identity == 0.0 and chk.hermitian == 0.0


def test_ee3_reference_values():
    assert ee3_potential_reference(1, 1, 1, 2.0) == pytest.approx(-1.5, rel=1e-14)
    for x in (0.1, 0.5, 1.0, 2.0, 5.0):
        assert ee3_potential_reference(1, 0, 1, x) == pytest.approx(6 / x ** 2, rel=1e-14)


def test_ee3_double_pole_for_nonzero_c():
    x = 1e-3
    assert abs(x * x * ee3_potential_reference(1, 1, 1, x) - 2) < 5e-3
    assert abs(x * x * ee3_potential_reference(2, -3, 1, x) - 2) < 5e-3


def test_ee3_gamma_zero():
    with pytest.raises(SingularGamma):
        ee3_potential_reference(1, 1, 1, 0.0)
    with pytest.raises(ValueError):
        ee3_potential_reference(1, 1, 0, 1.0)
    with pytest.raises(ValueError):
        ee3_triple(1, 1, 0)


def test_ee3_pipeline_random_points(rng):
    for b, c, d in ((1.0, 0.0, 1.0), (1.0, 1.0, 1.0), (2.0, -0.5, 3.0)):
        dr = ee3_dressing(b, c, d)
        eng = build_s_engine(dr)
        for x in rng.uniform(0.05, 5, 100):
            ref = ee3_potential_reference(b, c, d, x)
            assert potential(dr, eng, x)[0, 0] == pytest.approx(ref, rel=1e-10)
            assert s_matrix(eng, x)[0, 0].real == pytest.approx(ee3_gamma(b, c, x), rel=1e-12)


def test_ee3_second_admissible_split():
    b, c, d = 1.3, 0.8, 2.0
    first, second = ee3_dressing(b, c, d), ee3_dressing(b, c, d, split=c)
    e1, e2 = build_s_engine(first), build_s_engine(second)
    for x in (0.3, 1.1, 4.0):
        assert potential(first, e1, x)[0, 0] == pytest.approx(potential(second, e2, x)[0, 0],
                                                              rel=1e-12)


def test_ee3_independent_of_d():
    b, c = 1.0, 0.4
    values = []
    for d in (0.01, 1.0, -7.0):
        dr = ee3_dressing(b, c, d)
        values.append(potential(dr, build_s_engine(dr), 1.3)[0, 0])
    assert np.allclose(values, values[0], rtol=1e-12)


# ---------------------------------------------------------------- ee36

def test_ee36_tail():
    x = 1e3
    assert abs(ee36_fundamental(1.0, x) * np.exp(-1j * x) - 1) < 1e-2


def test_ee36_regular_solution_bounded():
    vals = [abs(ee36_fundamental(1.0, x, 'regular')) for x in (1e-3, 1e-4, 1e-5, 1e-6)]
    assert max(vals) <= 10 * vals[0]


def test_ee36_regular_is_phi_minus_chi():
    for lam in (1.0, 2.5, 1 + 0.5j, -1.0):
        for x in (0.5, 1.0, 3.0):
            diff = ee36_fundamental(lam, x, 'phi') - ee36_fundamental(lam, x, 'chi')
            assert abs(ee36_fundamental(lam, x, 'regular') - diff) < 1e-12


def test_ee36_regular_small_x_asymptotics():
    for x in (1e-3, 1e-6):
        assert ee36_fundamental(1.0, x, 'regular') == pytest.approx(-2j * x ** 3 / 15, rel=1e-5)


def test_ee36_solves_equation():
    lam, h = 2.2, 1e-3
    for which in ('phi', 'chi', 'regular'):
        for x in (0.5, 2.0):
            y = [ee36_fundamental(lam, x + k * h, which) for k in (-2, -1, 0, 1, 2)]
            ypp = (-y[0] + 16 * y[1] - 30 * y[2] + 16 * y[3] - y[4]) / (12 * h * h)
            assert abs(-ypp + 6 / x ** 2 * y[2] - lam * y[2]) < 1e-6 * abs(lam * y[2])


def test_ee36_domain():
    with pytest.raises(ValueError):
        ee36_fundamental(1.0, 0.0)
    with pytest.raises(ValueError):
        ee36_fundamental(0.0, 1.0)
    with pytest.raises(ValueError):
        ee36_fundamental(1.0, 1.0, 'psi')


def test_ee36_pipeline(rng):
    dr = ee36_dressing(1.0, 1.0)
    eng = build_s_engine(dr)
    for x, lam in zip(rng.uniform(0.2, 5, 20), rng.uniform(0.5, 4, 20)):
        y1 = transformed_solution(dr, eng, x, SolutionRequest(lam, [1, 0]))[0]
        y2 = transformed_solution(dr, eng, x, SolutionRequest(lam, [0, 1]))[0]
        assert abs(y1 - ee36_fundamental(lam, x, 'phi')) < 1e-10
        assert abs(y2 - ee36_fundamental(lam, x, 'chi')) < 1e-10


def test_ee36_lambda_and_s_match_worked_form():
    b = 1.7
    dr = ee36_dressing(b, 2.0)
    eng = build_s_engine(dr)
    x = 0.9
    l1, l2 = lambda_pair(dr, x)
    assert np.allclose(np.hstack([l1, l2]), [[b, -b * x], [0, 0]], atol=1e-15)
    assert np.allclose(s_matrix(eng, x), np.diag([b * b * x ** 3 / 3, 2.0]), atol=1e-13)


# ---------------------------------------------------------------- presets

def test_presets():
    assert PRESETS == ('ee2', 'ee3', 'ee36')
    p = get_preset('ee3', c=0.0)
    assert p.params == {'b': 1.0, 'c': 0.0, 'd': 1.0}
    assert p.potential_reference(2.0)[0, 0] == pytest.approx(1.5)
    for pid in PRESETS:
        pr = get_preset(pid)
        dr = pr.dressing()
        assert validate_triple(pr.triple()).identity == 0.0
        x = 0.8
        assert np.allclose(potential(dr, build_s_engine(dr), x), pr.potential_reference(x),
                           rtol=1e-10)
    with pytest.raises(KeyError):
        get_preset('ee4')
    with pytest.raises(KeyError):
        get_preset('ee36', c=1.0)
    with pytest.raises(ValueError):
        get_preset('ee3', d=0.0)
