"""Transverse-momentum integrals of the Lifshitz formula.

For every frequency the integral over ``y = 2 q d`` runs from ``zeta``
(the rescaled frequency ``2 d xi / hbar c``) to ``Y_CUT`` with adaptive
Gauss-Legendre panels, plus a closed-form exponential tail beyond.

Each material enters through two numbers per frequency: ``eps`` (may be
``inf`` at zero frequency) and ``k2 = (eps - 1) zeta^2``, which stays
finite in the zero-frequency limit of the plasma model.

Two interchangeable backends implement the same panel-splitting rule:
a numba ``prange`` loop and a numpy version that bisects all unconverged
panels of a batch at once. ``THERMOCASIMIR_PURE_NUMPY=1`` (or a missing
numba) selects the numpy one.
"""

from __future__ import annotations

import math
import os

import numpy as np

FREE_ENERGY = 0
PRESSURE = 1

Y_CUT = 40.0
N_COARSE = 8
MAX_DEPTH = 40
GL_ORDER = 16
ROUNDOFF = 64 * np.finfo(float).eps

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)

try:
    if os.environ.get("THERMOCASIMIR_PURE_NUMPY", "") not in ("", "0"):
        raise ImportError("numba disabled by THERMOCASIMIR_PURE_NUMPY")
    import numba
    from numba import njit, prange

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # probing an old TBB only produces a warning; OpenMP or workqueue will do
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def backend() -> str:
    return "numba" if HAS_NUMBA else "numpy"


# ---------------------------------------------------------------- numpy path


def _complements(y, eps, k2):
    """``1 - r_TM`` and ``1 + r_TE`` computed without cancellation."""
    s = np.sqrt(y * y + k2)
    with np.errstate(invalid="ignore"):
        u = np.where(np.isinf(eps), 0.0, 2.0 * s / (eps * y + s))
    a = 2.0 * y / (y + s)
    return u, a


def _log_q(p1m, p, y):
    # q = 1 - p exp(-y) with 1 - p supplied separately
    return p1m - p * np.expm1(-y)


def integrand_np(kind, y, eA, kA, eB, kB):
    uA, aA = _complements(y, eA, kA)
    uB, aB = _complements(y, eB, kB)
    tm_1m = uA + uB - uA * uB
    te_1m = aA + aB - aA * aB
    tm = 1.0 - tm_1m
    te = 1.0 - te_1m
    qm = _log_q(tm_1m, tm, y)
    qe = _log_q(te_1m, te, y)
    e = np.exp(-y)
    if kind == PRESSURE:
        return y * y * (tm * e / qm + te * e / qe)
    return y * (_log(qm, tm * e) + _log(qe, te * e))


def _log(q, x):
    # ln(1 - x) with q = 1 - x; log1p keeps relative accuracy when x is small
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x < 0.5, np.log1p(-x), np.log(q))


def tail_np(kind, z, eA, kA, eB, kB):
    """Integral from ``z`` to infinity with reflections frozen at ``z``."""
    uA, aA = _complements(z, eA, kA)
    uB, aB = _complements(z, eB, kB)
    p = (1.0 - uA) * (1.0 - uB) + (1.0 - aA) * (1.0 - aB)
    e = np.exp(-z)
    if kind == PRESSURE:
        return p * e * (z * z + 2.0 * z + 2.0)
    return -p * e * (z + 1.0)


def _gl_np(kind, a, b, eA, kA, eB, kB):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    y = mid[:, None] + half[:, None] * _GL_X[None, :]
    f = integrand_np(kind, y, eA[:, None], kA[:, None], eB[:, None], kB[:, None])
    return half * (f @ _GL_W)


def term_integrals_np(kind, zeta, eA, kA, eB, kB, rtol):
    zeta = np.asarray(zeta, dtype=float)
    n = zeta.size
    out = np.zeros(n)
    upper = np.full(n, Y_CUT)
    active = np.nonzero(zeta < Y_CUT)[0]
    start = np.where(zeta < Y_CUT, Y_CUT, zeta)
    out += tail_np(kind, start, eA, kA, eB, kB)
    if active.size == 0:
        return out

    z = zeta[active]
    width = (upper[active] - z) / N_COARSE
    owner = np.repeat(active, N_COARSE)
    a = np.repeat(z, N_COARSE) + np.tile(np.arange(N_COARSE), active.size) * np.repeat(width, N_COARSE)
    b = a + np.repeat(width, N_COARSE)
    b[N_COARSE - 1 :: N_COARSE] = Y_CUT
    whole = _gl_np(kind, a, b, eA[owner], kA[owner], eB[owner], kB[owner])

    ref = np.zeros(n)
    np.add.at(ref, owner, np.abs(whole))
    tol_density = rtol * ref / np.where(zeta < Y_CUT, Y_CUT - zeta, 1.0)

    depth = 0
    while owner.size:
        m = 0.5 * (a + b)
        args = (eA[owner], kA[owner], eB[owner], kB[owner])
        left = _gl_np(kind, a, m, *args)
        right = _gl_np(kind, m, b, *args)
        both = left + right
        limit = np.maximum(tol_density[owner] * (b - a), ROUNDOFF * (np.abs(left) + np.abs(right)))
        done = ~(np.abs(both - whole) > limit) | (depth >= MAX_DEPTH)
        np.add.at(out, owner[done], both[done])
        keep = ~done
        owner = np.concatenate([owner[keep], owner[keep]])
        a, b = np.concatenate([a[keep], m[keep]]), np.concatenate([m[keep], b[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        depth += 1
    return out


# ---------------------------------------------------------------- numba path

if HAS_NUMBA:

    @njit(cache=True, inline="always")
    def _complements_nb(y, eps, k2):
        s = math.sqrt(y * y + k2)
        u = 0.0 if math.isinf(eps) else 2.0 * s / (eps * y + s)
        return u, 2.0 * y / (y + s)

    @njit(cache=True)
    def integrand_nb(kind, y, eA, kA, eB, kB):
        uA, aA = _complements_nb(y, eA, kA)
        uB, aB = _complements_nb(y, eB, kB)
        tm_1m = uA + uB - uA * uB
        te_1m = aA + aB - aA * aB
        tm = 1.0 - tm_1m
        te = 1.0 - te_1m
        em = math.expm1(-y)
        qm = tm_1m - tm * em
        qe = te_1m - te * em
        e = math.exp(-y)
        if kind == PRESSURE:
            return y * y * (tm * e / qm + te * e / qe)
        xm = tm * e
        xe = te * e
        lm = math.log1p(-xm) if xm < 0.5 else math.log(qm)
        le = math.log1p(-xe) if xe < 0.5 else math.log(qe)
        return y * (lm + le)

    @njit(cache=True)
    def tail_nb(kind, z, eA, kA, eB, kB):
        uA, aA = _complements_nb(z, eA, kA)
        uB, aB = _complements_nb(z, eB, kB)
        p = (1.0 - uA) * (1.0 - uB) + (1.0 - aA) * (1.0 - aB)
        e = math.exp(-z)
        if kind == PRESSURE:
            return p * e * (z * z + 2.0 * z + 2.0)
        return -p * e * (z + 1.0)

    @njit(cache=True)
    def _gl_nb(kind, a, b, eA, kA, eB, kB, gx, gw):
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        acc = 0.0
        for i in range(gx.size):
            acc += gw[i] * integrand_nb(kind, mid + half * gx[i], eA, kA, eB, kB)
        return half * acc

    @njit(cache=True)
    def _term_nb(kind, z, eA, kA, eB, kB, rtol, gx, gw):
        if z >= Y_CUT:
            return tail_nb(kind, z, eA, kA, eB, kB)
        size = N_COARSE + 2 * MAX_DEPTH + 8
        sa = np.empty(size)
        sb = np.empty(size)
        sw = np.empty(size)
        sd = np.empty(size, dtype=np.int64)
        width = (Y_CUT - z) / N_COARSE
        ref = 0.0
        top = 0
        # pushed in reverse so panels pop left to right
        for j in range(N_COARSE - 1, -1, -1):
            a = z + j * width
            b = Y_CUT if j == N_COARSE - 1 else a + width
            w = _gl_nb(kind, a, b, eA, kA, eB, kB, gx, gw)
            ref += abs(w)
            sa[top] = a
            sb[top] = b
            sw[top] = w
            sd[top] = 0
            top += 1
        tol_density = rtol * ref / (Y_CUT - z)
        total = 0.0
        while top > 0:
            top -= 1
            a = sa[top]
            b = sb[top]
            whole = sw[top]
            depth = sd[top]
            m = 0.5 * (a + b)
            left = _gl_nb(kind, a, m, eA, kA, eB, kB, gx, gw)
            right = _gl_nb(kind, m, b, eA, kA, eB, kB, gx, gw)
            # NaN compares False and is accepted rather than split forever
            limit = max(tol_density * (b - a), ROUNDOFF * (abs(left) + abs(right)))
            if not abs(left + right - whole) > limit or depth >= MAX_DEPTH:
                total += left + right
            else:
                sa[top] = m
                sb[top] = b
                sw[top] = right
                sd[top] = depth + 1
                sa[top + 1] = a
                sb[top + 1] = m
                sw[top + 1] = left
                sd[top + 1] = depth + 1
                top += 2
        return total + tail_nb(kind, Y_CUT, eA, kA, eB, kB)

    @njit(cache=True, parallel=True)
    def term_integrals_nb(kind, zeta, eA, kA, eB, kB, rtol, gx, gw):
        out = np.empty(zeta.size)
        for i in prange(zeta.size):
            out[i] = _term_nb(kind, zeta[i], eA[i], kA[i], eB[i], kB[i], rtol, gx, gw)
        return out


def term_integrals(kind, zeta, eA, kA, eB, kB, rtol=1e-8, *, use_numba=None):
    """Momentum integral for each frequency in ``zeta``.

    Returns the dimensionless integral of ``y ln(1 - r r e^-y)`` (free
    energy) or ``y^2 r r e^-y / (1 - r r e^-y)`` (pressure) summed over
    both polarizations.
    """
    arrays = [np.ascontiguousarray(x, dtype=float) for x in (zeta, eA, kA, eB, kB)]
    if use_numba is None:
        use_numba = HAS_NUMBA
    if use_numba:
        if not HAS_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return term_integrals_nb(int(kind), *arrays, float(rtol), _GL_X, _GL_W)
    return term_integrals_np(kind, *arrays, rtol)


class workers:
    """Context manager fixing the number of kernel threads.

    Each frequency is integrated independently, so results do not depend
    on the thread count.
    """

    def __init__(self, n: int | None):
        self.n = n
        self._old = None

    def __enter__(self):
        if HAS_NUMBA and self.n is not None:
            self._old = numba.get_num_threads()
            numba.set_num_threads(max(1, min(int(self.n), numba.config.NUMBA_NUM_THREADS)))
        return self

    def __exit__(self, *exc):
        if self._old is not None:
            numba.set_num_threads(self._old)
        return False
