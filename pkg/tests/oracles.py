"""Independent oracles used by the test suite.

Everything here deliberately avoids the code paths under test: quadrature
instead of series/continued fractions, Sturm bisection instead of QL/QR,
characteristic polynomials plus multiprecision root finding instead of
Hessenberg QR, and plain Simpson sums for Fourier transforms.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import quad


def si_quad(x: float) -> float:
    """Si(x) by adaptive quadrature of the defining integral."""
    if x == 0:
        return 0.0
    val, _ = quad(lambda t: np.sinc(t / np.pi), 0.0, abs(x), limit=400)
    return float(np.sign(x) * val)


def sine_tail_quad(r: float) -> float:
    """int_r^inf sin(pi t)/(pi t) dt = 1/2 - Si(pi r)/pi via quadrature."""
    return 0.5 - si_quad(np.pi * r) / np.pi


def sine_partial2_quad(r: float) -> float:
    val, _ = quad(lambda t: np.sinc(2.0 * t), 0.0, r, limit=400)
    return float(val)


def char_fn_quad(pdf, k: float, upper: float = 60.0) -> complex:
    re, _ = quad(lambda x: pdf(x) * np.cos(2 * np.pi * k * x), 0.0, upper, limit=400)
    im, _ = quad(lambda x: pdf(x) * np.sin(2 * np.pi * k * x), 0.0, upper, limit=400)
    return complex(re, -im)


# --------------------------------------------------------------------------
# eigenvalue oracles (small N)
# --------------------------------------------------------------------------

def _sturm_count(diag, off, x: float) -> int:
    """Number of eigenvalues of the tridiagonal matrix strictly below x."""
    count = 0
    d = 1.0
    tiny = 1e-300
    for i in range(len(diag)):
        b2 = off[i - 1] ** 2 if i > 0 else 0.0
        d = (diag[i] - x) - b2 / d
        if d == 0.0:
            d = tiny
        if d < 0:
            count += 1
    return count


def tridiag_eigs_bisect(diag, off, tol: float = 1e-13) -> np.ndarray:
    """All eigenvalues by Sturm-sequence bisection (independent of LAPACK)."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = len(diag)
    radius = np.max(np.abs(diag)) + 2 * (np.max(np.abs(off)) if len(off) else 0.0) + 1.0
    eigs = np.empty(n)
    for k in range(n):
        lo, hi = -radius, radius
        while hi - lo > tol * radius:
            mid = 0.5 * (lo + hi)
            if _sturm_count(diag, off, mid) <= k:
                lo = mid
            else:
                hi = mid
        eigs[k] = 0.5 * (lo + hi)
    return eigs


def charpoly_eigs(matrix, dps: int = 50) -> np.ndarray:
    """Eigenvalues via Faddeev-LeVerrier characteristic polynomial and
    mpmath's multiprecision polynomial root finder."""
    import mpmath as mp

    a = np.asarray(matrix, dtype=complex)
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        c = -np.trace(a @ m) / k
        coeffs.append(c)
    with mp.workdps(dps):
        roots = mp.polyroots([mp.mpc(c) for c in coeffs], maxsteps=200, extraprec=200)
    return np.array([complex(r) for r in roots])


# --------------------------------------------------------------------------
# Fourier transform oracle
# --------------------------------------------------------------------------

def cosine_transform_even(f, k_values, r_max: float = 400.0, step: float = 0.005) -> np.ndarray:
    """2 int_0^{r_max} f(r) cos(2 pi k r) dr by composite Simpson.

    The oracle for checking that the diffraction densities are the Fourier
    transforms of the autocorrelation ones; truncation at r_max leaves
    oscillatory tails well below 1e-3 for the functions under test.
    """
    n = int(round(r_max / step))
    if n % 2 == 1:
        n += 1
    r = np.linspace(0.0, r_max, n + 1)
    fr = np.asarray(f(r), dtype=float)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= step / 3.0
    k_values = np.atleast_1d(np.asarray(k_values, dtype=float))
    out = np.empty(len(k_values))
    for i, k in enumerate(k_values):
        out[i] = 2.0 * np.sum(w * fr * np.cos(2.0 * np.pi * k * r))
    return out
