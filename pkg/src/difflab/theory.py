"""Closed-form autocorrelation and diffraction densities for every model.

Conventions.  Autocorrelations are written as (atoms) + density * Lebesgue;
diffraction likewise.  Under the e^{-2 pi i k x} Fourier transform the
homogeneous Poisson pair (rho delta_0 + rho^2 Lebesgue) maps to
(rho^2 delta_0 + rho Lebesgue); the +/-1-marked Poisson comb loses both the
background and the Bragg atom and diffracts to a flat density rho.

Two different functions share the letter h in the source material and are
deliberately named apart here: ``renewal_backscatter`` enters the renewal
diffraction as (1 - h) * Lebesgue, while ``dyson_h`` *is* the diffuse
diffraction density of the beta ensembles (diffraction = delta_0 + h).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .core import (
    AtomLocation,
    GridFunction,
    NoConvergence,
    SingularPoint,
    SpectralMeasure,
)
from .specfun import WaitingDistribution, char_fn, sinc_s, sinc_s_prime, sine_partial2, sine_tail

__all__ = [
    "PurePointPart",
    "poisson_theory",
    "marked_poisson_theory",
    "renewal_backscatter",
    "renewal_pure_point",
    "renewal_nu_density",
    "dyson_f",
    "dyson_h",
    "ginibre_g",
    "ginibre_h",
]


@dataclass(frozen=True)
class PurePointPart:
    """Pure-point diffraction: a single atom at 0, or a full lattice comb.

    ``spacing`` is None for the single-atom case; a comb has atoms of equal
    intensity at every integer multiple of ``spacing`` (including 0).
    """

    intensity: float
    spacing: float | None = None

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("intensity must be >= 0")
        if self.spacing is not None and self.spacing <= 0:
            raise ValueError("spacing must be positive")

    @property
    def is_comb(self) -> bool:
        return self.spacing is not None

    def atom_locations(self, k_max: float, include_zero: bool = True) -> np.ndarray:
        """All atom positions with |k| <= k_max (nonnegative side)."""
        if not self.is_comb:
            return np.array([0.0]) if include_zero else np.array([])
        n = int(np.floor(k_max / self.spacing + 1e-12))
        ks = self.spacing * np.arange(0 if include_zero else 1, n + 1)
        return ks


# --------------------------------------------------------------------------
# Poisson
# --------------------------------------------------------------------------

def poisson_theory(rho: float):
    """Autocorrelation and diffraction of the homogeneous Poisson process."""
    if rho < 0:
        raise ValueError("rho must be >= 0")
    auto = SpectralMeasure(
        atoms=((0.0, rho),),
        ac_density=(lambda x, c=rho**2: np.full_like(np.asarray(x, float), c)),
        label=f"poisson(rho={rho}) autocorrelation",
    )
    diff = SpectralMeasure(
        atoms=((0.0, rho**2),),
        ac_density=(lambda k, c=rho: np.full_like(np.asarray(k, float), c)),
        label=f"poisson(rho={rho}) diffraction",
    )
    return auto, diff


def marked_poisson_theory(rho: float):
    """Autocorrelation / diffraction of the +/-1 marked Poisson comb.

    The random signs cancel the rho^2 background and the Bragg atom: the
    autocorrelation is a bare atom rho at 0 and the diffraction is the flat
    density rho with no pure-point part at all.
    """
    if rho < 0:
        raise ValueError("rho must be >= 0")
    auto = SpectralMeasure(
        atoms=((0.0, rho),),
        ac_density=None,
        label=f"marked-poisson(rho={rho}) autocorrelation",
    )
    diff = SpectralMeasure(
        atoms=(),
        ac_density=(lambda k, c=rho: np.full_like(np.asarray(k, float), c)),
        label=f"marked-poisson(rho={rho}) diffraction",
    )
    return auto, diff


# --------------------------------------------------------------------------
# renewal
# --------------------------------------------------------------------------

def renewal_backscatter(mu: WaitingDistribution, k):
    """The renewal h(k) = 2(|mu_hat|^2 - Re mu_hat) / |1 - mu_hat|^2.

    The diffuse diffraction density is 1 - h(k).  Raises AtomLocation when k
    sits in the pure-point support (mu_hat(k) = 1), where the density is
    undefined.
    """
    k = np.asarray(k, dtype=float)
    mh = np.asarray(char_fn(mu, k))
    denom = np.abs(1.0 - mh) ** 2
    if np.any(np.sqrt(denom) < 1e-12):
        raise AtomLocation("k belongs to the pure-point support of the diffraction")
    out = 2.0 * (np.abs(mh) ** 2 - mh.real) / denom
    return float(out) if out.ndim == 0 else out


def _rational(x, tol: float = 1e-9, max_den: int = 10**4) -> Fraction | None:
    """Best small-denominator rational within tol, else None.

    Floats cannot distinguish an irrational from a rational of huge
    denominator, so reconstruction is capped at max_den: genuine lattice
    configs use small denominators, and typical irrationals miss every
    candidate by more than tol.
    """
    if isinstance(x, Fraction):
        return x
    frac = Fraction(float(x)).limit_denominator(max_den)
    if abs(float(frac) - float(x)) <= tol * max(1.0, abs(float(x))):
        return frac
    return None


def renewal_pure_point(mu: WaitingDistribution) -> PurePointPart:
    """Pure-point diffraction part of the renewal process with waiting law mu.

    Continuous laws give the single atom delta_0.  A discrete law supported
    on a lattice b*Z gives the comb on Z/b (spacing 1/b, unit intensity); a
    discrete law with no common lattice degenerates to delta_0 as well.
    """
    if mu.kind != "discrete":
        return PurePointPart(intensity=1.0)
    fracs = []
    for loc, _ in mu.params:
        frac = _rational(loc)
        if frac is None:
            return PurePointPart(intensity=1.0)
        fracs.append(frac)
    # gcd over Q: bring to a common denominator, gcd the numerators
    den = 1
    for f in fracs:
        den = den * f.denominator // gcd(den, f.denominator)
    nums = [f.numerator * (den // f.denominator) for f in fracs]
    g = 0
    for n in nums:
        g = gcd(g, n)
    b = Fraction(g, den)
    return PurePointPart(intensity=1.0, spacing=float(1 / b))


def renewal_nu_density(mu: WaitingDistribution, r_max: float, step: float | None = None):
    """Solve the renewal equation nu = mu + mu * nu on (0, r_max].

    Continuous mu: returns a GridFunction with the renewal density on a
    uniform grid (trapezoidal Volterra discretisation, solved by forward
    substitution; the discrete fixed-point residual is at rounding level).
    Discrete lattice mu: returns the exact atom list [(location, weight)] up
    to r_max from iterated discrete convolution.
    """
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    if step is None:
        step = r_max / 4096.0
    if step <= 0:
        raise ValueError("step must be positive")

    if mu.kind == "discrete":
        return _nu_atoms(mu, r_max)

    n = int(round(r_max / step))
    grid = step * np.arange(1, n + 1)
    m = mu.pdf(grid)
    m0 = float(mu.pdf(np.asarray(0.0)))
    nu = np.empty(n)
    # Trapezoid over nodes t = 0, h, .., r_i with nu(0+) = m(0+):
    #   nu_i (1 - h m0 / 2) = m_i (1 + h m0 / 2) + h sum_{j=1}^{i-1} m_{i-j} nu_j
    # solved by forward substitution; the discrete residual is then at
    # rounding level, far below the 1e-8 contract.
    lhs = 1.0 - step * 0.5 * m0
    if lhs <= 0:
        raise NoConvergence("step too coarse for the density scale at 0")
    for i in range(1, n + 1):
        conv = np.dot(m[i - 2 :: -1][: i - 1], nu[: i - 1]) if i > 1 else 0.0
        nu[i - 1] = (m[i - 1] * (1.0 + step * 0.5 * m0) + step * conv) / lhs
    out = GridFunction(grid, nu)
    resid = renewal_residual(mu, out)
    if not (np.isfinite(resid) and resid < 1e-8):
        raise NoConvergence(f"renewal fixed-point residual {resid:g} above 1e-8")
    return out


def renewal_residual(mu: WaitingDistribution, nu: GridFunction) -> float:
    """Sup-norm of nu - mu - mu*nu on nu's grid (same trapezoid rule)."""
    vals = nu.values
    step = nu.spacing
    m = mu.pdf(nu.grid)
    m0 = float(mu.pdf(np.asarray(0.0)))
    worst = 0.0
    for i in range(1, len(vals) + 1):
        conv = np.dot(m[i - 2 :: -1][: i - 1], vals[: i - 1]) if i > 1 else 0.0
        integral = step * (0.5 * m[i - 1] * m0 + conv + 0.5 * m0 * vals[i - 1])
        worst = max(worst, abs(vals[i - 1] - m[i - 1] - integral))
    return worst


def _nu_atoms(mu: WaitingDistribution, r_max: float):
    pp = renewal_pure_point(mu)
    if not pp.is_comb:
        raise ValueError("discrete mu without a common lattice is unsupported here")
    b = 1.0 / pp.spacing  # lattice constant of supp(mu)
    n = int(np.floor(r_max / b + 1e-9))
    # atom weights of mu on the lattice j*b
    mu_w = np.zeros(n + 1)
    for loc, p in mu.params:
        j = int(round(float(loc) / b))
        if j <= n:
            mu_w[j] += p
    nu_w = np.zeros(n + 1)
    for i in range(1, n + 1):
        nu_w[i] = mu_w[i] + np.dot(mu_w[1 : i + 1], nu_w[i - 1 :: -1][:i])
    return [(j * b, nu_w[j]) for j in range(1, n + 1)]


# --------------------------------------------------------------------------
# Dyson beta ensembles
# --------------------------------------------------------------------------

def dyson_f(beta: int, r):
    """Bulk two-point function f_beta; the ac autocorrelation is 1 - f(|x|)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be >= 0")
    if beta == 2:
        out = sinc_s(r) ** 2
    elif beta == 1:
        out = sinc_s(r) ** 2 + sinc_s_prime(r) * sine_tail(r)
    elif beta == 4:
        out = sinc_s(2 * r) ** 2 - 2.0 * sinc_s_prime(2 * r) * sine_partial2(r)
    else:
        raise ValueError("beta must be 1, 2 or 4")
    return float(out) if np.ndim(out) == 0 else out


def dyson_h(beta: int, k):
    """Diffuse diffraction density h_beta; diffraction = delta_0 + h * Lebesgue.

    beta=1 is continuous across |k|=1 (both branches give 2 - log 3, which is
    what this function returns there); beta=4 has a logarithmic singularity
    at |k|=1 and raises SingularPoint, so grids must exclude it explicitly.
    """
    k = np.asarray(k, dtype=float)
    a = np.abs(k)
    if beta == 2:
        out = np.minimum(a, 1.0)
    elif beta == 1:
        inner = a * (2.0 - np.log1p(2.0 * a))
        with np.errstate(divide="ignore", invalid="ignore"):
            outer = 2.0 - a * np.log1p(2.0 / np.where(a > 1.0, 2.0 * a - 1.0, 1.0))
        out = np.where(a <= 1.0, inner, outer)
    elif beta == 4:
        if np.any(np.abs(a - 1.0) < 1e-300) or np.any(a == 1.0):
            raise SingularPoint("h_4 has a logarithmic singularity at |k| = 1")
        with np.errstate(divide="ignore"):
            inner = 0.25 * a * (2.0 - np.log(np.abs(1.0 - a)))
        out = np.where(a <= 2.0, inner, 1.0)
    else:
        raise ValueError("beta must be 1, 2 or 4")
    return float(out) if np.ndim(out) == 0 else out


def dyson_theory(beta: int):
    """SpectralMeasure pair (autocorrelation, diffraction) for a beta ensemble."""
    auto = SpectralMeasure(
        atoms=((0.0, 1.0),),
        ac_density=(lambda x, b=beta: 1.0 - dyson_f(b, np.abs(np.asarray(x, float)))),
        label=f"dyson(beta={beta}) autocorrelation",
    )
    diff = SpectralMeasure(
        atoms=((0.0, 1.0),),
        ac_density=(lambda k, b=beta: dyson_h(b, k)),
        label=f"dyson(beta={beta}) diffraction",
    )
    return auto, diff


# --------------------------------------------------------------------------
# Ginibre
# --------------------------------------------------------------------------

def ginibre_g(r):
    """Radial ac autocorrelation density 1 - e^{-pi r^2} of the Ginibre process."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be >= 0")
    out = -np.expm1(-np.pi * r**2)
    return float(out) if np.ndim(out) == 0 else out


def ginibre_h(k):
    """Radial ac diffraction density; identical to ginibre_g (self-dual pair)."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise ValueError("k must be >= 0")
    out = -np.expm1(-np.pi * k**2)
    return float(out) if np.ndim(out) == 0 else out


def ginibre_theory():
    auto = SpectralMeasure(
        atoms=((0.0, 1.0),),
        ac_density=(lambda r: ginibre_g(np.abs(np.asarray(r, float)))),
        label="ginibre autocorrelation",
    )
    diff = SpectralMeasure(
        atoms=((0.0, 1.0),),
        ac_density=(lambda k: ginibre_h(np.abs(np.asarray(k, float)))),
        label="ginibre diffraction",
    )
    return auto, diff
