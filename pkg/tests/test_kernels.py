import math

import numpy as np
import pytest
from scipy.integrate import quad

from thermocasimir import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAS_NUMBA, reason="numba unavailable")


def reference(kind, z, e, k2):
    """Single-material momentum integral by scipy quad."""
    def f(y):
        s = math.sqrt(y * y + k2)
        rtm = 1.0 if math.isinf(e) else (e * y - s) / (e * y + s)
        rte = (y - s) / (y + s)
        out = 0.0
        for r in (rtm, rte):
            x = r * r * math.exp(-y)
            out += y * y * x / (1 - x) if kind == K.PRESSURE else y * math.log1p(-x)
        return out
    return quad(f, z, math.inf, epsabs=0, epsrel=1e-12, limit=500)[0]


CASES = [
    # zeta, eps, k2
    (0.0, math.inf, 0.0),  # ideal TM, TE off: Drude-like zero frequency
    (0.0, math.inf, 12.5),  # plasma zero frequency
    (0.7, 3000.0, 2999.0 * 0.49),
    (3.0, 150.0, 149.0 * 9.0),
    (12.0, 9.0, 8.0 * 144.0),
]


@pytest.mark.parametrize("kind", [K.FREE_ENERGY, K.PRESSURE])
@pytest.mark.parametrize("z,e,k2", CASES)
def test_numpy_kernel_matches_quad(kind, z, e, k2):
    got = K.term_integrals(kind, [z], [e], [k2], [e], [k2], 1e-10, use_numba=False)[0]
    ref = reference(kind, z, e, k2)
    assert got == pytest.approx(ref, rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("kind", [K.FREE_ENERGY, K.PRESSURE])
def test_frozen_tail_beyond_cut(kind):
    # above the cut only the closed-form tail is used; the frozen reflection
    # error is a small fraction of an e^-45 sized term
    z, e = 45.0, 2.0
    got = K.term_integrals(kind, [z], [e], [z * z], [e], [z * z], use_numba=False)[0]
    ref = reference(kind, z, e, z * z)
    assert got == pytest.approx(ref, rel=1e-2)
    assert abs(got - ref) < 1e-20


@needs_numba
@pytest.mark.parametrize("kind", [K.FREE_ENERGY, K.PRESSURE])
def test_backends_agree(kind):
    rng = np.random.default_rng(3)
    z = np.sort(rng.uniform(0, 50, 200))
    e = 1 + 10 ** rng.uniform(-2, 5, 200)
    k2 = (e - 1) * z * z
    eB = 1 + 10 ** rng.uniform(-2, 5, 200)
    kB = (eB - 1) * z * z
    a = K.term_integrals(kind, z, e, k2, eB, kB, use_numba=True)
    b = K.term_integrals(kind, z, e, k2, eB, kB, use_numba=False)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=0)


def test_tail_closed_form():
    # with r frozen the tail is p * int_z^inf y^2 e^-y dy
    p = K.tail_np(K.PRESSURE, np.array([40.0]), np.array([math.inf]), np.array([0.0]),
                  np.array([math.inf]), np.array([0.0]))[0]
    assert p == pytest.approx(math.exp(-40.0) * (1600 + 80 + 2), rel=1e-14)


def test_distinct_materials_symmetric():
    args = ([0.5, 2.0], [100.0, 5.0], [99 * 0.25, 4 * 4.0], [7.0, 1e4], [6 * 0.25, 9999 * 4.0])
    a = K.term_integrals(K.PRESSURE, *args)
    z, eA, kA, eB, kB = args
    b = K.term_integrals(K.PRESSURE, z, eB, kB, eA, kA)
    np.testing.assert_allclose(a, b, rtol=1e-12)


@needs_numba
def test_worker_count_bit_identical():
    z = np.linspace(0, 30, 300)
    e = 1 + 80.0 / (0.01 + z)
    k2 = (e - 1) * z * z
    with K.workers(1):
        one = K.term_integrals(K.PRESSURE, z, e, k2, e, k2)
    with K.workers(4):
        four = K.term_integrals(K.PRESSURE, z, e, k2, e, k2)
    assert one.tobytes() == four.tobytes()


def test_backend_name():
    assert K.backend() in ("numba", "numpy")
