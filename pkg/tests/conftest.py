import numpy as np
import pytest

from gbdt.core import Triple, make_dressing
from gbdt.kdv import build_kdv_engine, kdv_s_matrix
from gbdt.matfun import rcond
from gbdt.verify import random_valid_triple

ACCEPTANCE_LINES = []


def stationary_corpus(count=20, seed=20240611):
    """Random dressings with n <= 4, h <= 2, plus a spectral parameter and f0 each."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, 5))
        h = int(rng.integers(1, 3))
        d = make_dressing(random_valid_triple(rng, n, h))
        lam = float(rng.uniform(0.5, 4.0))
        f0 = rng.normal(size=2 * h) + 1j * rng.normal(size=2 * h)
        out.append((d, lam, f0))
    return out


KDV_REGION = (np.linspace(0.0, 2.0, 9), np.linspace(0.0, 0.1, 5))


def kdv_corpus(count=10, seed=7):
    """Random dressings with n <= 3, five of every ten with h = 2.

    Draws whose S(x, t) has rcond below 1e-2 somewhere in x in [0, 2],
    t in [0, 0.1] are redrawn so that finite differences stay meaningful.
    """
    rng = np.random.default_rng(seed)
    shapes = [(1, 1), (2, 2), (3, 1), (2, 1), (3, 2), (1, 2), (3, 1), (2, 2), (3, 2), (2, 1)]
    out = []
    for n, h in (shapes * 2)[:count]:
        while True:
            d = make_dressing(random_valid_triple(rng, n, h))
            eng = build_kdv_engine(d)
            xs, ts = KDV_REGION
            if min(rcond(kdv_s_matrix(eng, x, t)) for x in xs for t in ts) > 1e-2:
                break
        out.append(d)
    return out


def soliton_dressing(kappa):
    """One-soliton data: u(x, t) = -2 kappa^2 sech^2(kappa (x - 4 kappa^2 t))."""
    tr = Triple([[-kappa ** 2]], [[1.0 / kappa]], [[-kappa]], [[1.0]])
    return make_dressing(tr)


def soliton(kappa, x, t):
    return -2 * kappa ** 2 / np.cosh(kappa * (x - 4 * kappa ** 2 * t)) ** 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section('acceptance criteria')
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
