"""Special functions and waiting-time laws.

The sine-kernel two-point functions need sin(pi r)/(pi r), its derivative and
two sine-integral primitives; the renewal theory needs characteristic
functions of mean-one waiting-time distributions under the e^{-2 pi i k x}
Fourier convention.  The sine integral Si is evaluated in-house: a power
series below argument 4 and a complex continued fraction (modified Lentz)
above, giving absolute error well under 1e-10 everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import NegativeArgument

__all__ = [
    "sinc_s",
    "sinc_s_prime",
    "sine_integral",
    "sine_tail",
    "sine_partial2",
    "WaitingDistribution",
    "char_fn",
]


def sinc_s(r):
    """s(r) = sin(pi r)/(pi r), with the removable singularity s(0) = 1."""
    return np.sinc(np.asarray(r, dtype=float))


def sinc_s_prime(r):
    """Derivative of s: (cos(pi r) * pi r - sin(pi r)) / (pi r^2), s'(0) = 0."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < 1e-3
    rs = np.where(small, 1.0, r)  # dummy to keep the division finite
    direct = (np.cos(np.pi * rs) * np.pi * rs - np.sin(np.pi * rs)) / (np.pi * rs**2)
    # two series terms suffice below 1e-3: error ~ (pi r)^5 / 840
    series = -(np.pi**2) * r / 3.0 + (np.pi**4) * r**3 / 30.0
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


_SI_MAXIT = 400
_SI_EPS = 1e-16


def _si_series(x: np.ndarray) -> np.ndarray:
    """Power series for Si, accurate to machine precision for |x| <= 4."""
    out = np.array(x, dtype=float)
    term = np.array(x, dtype=float)
    x2 = x * x
    for n in range(1, 40):
        term = term * (-x2) * (2 * n - 1) / ((2 * n + 1) ** 2 * (2 * n))
        out += term
        if np.all(np.abs(term) < _SI_EPS):
            break
    return out


def _si_contfrac(x: np.ndarray) -> np.ndarray:
    """Si for x > 4 via the continued fraction for E1(ix), modified Lentz."""
    fpmin = 1e-290
    b = 1.0 + 1j * x
    c = np.full_like(b, 1.0 / fpmin)
    d = 1.0 / b
    h = d.copy()
    for i in range(2, _SI_MAXIT):
        a = -((i - 1) ** 2)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    h *= np.cos(x) - 1j * np.sin(x)
    return np.pi / 2 + h.imag


def sine_integral(x):
    """Si(x) = integral of sin(t)/t from 0 to x (odd in x)."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    ax = np.abs(x)
    out = np.empty_like(ax)
    lo = ax <= 4.0
    if np.any(lo):
        out[lo] = _si_series(ax[lo])
    if np.any(~lo):
        out[~lo] = _si_contfrac(ax[~lo])
    out = np.copysign(out, x) * np.where(x == 0.0, 0.0, 1.0)
    return float(out[0]) if scalar else out


def sine_tail(r):
    """Tail integral of s: int_r^inf s(t) dt = 1/2 - Si(pi r)/pi, r >= 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise NegativeArgument("sine_tail requires r >= 0")
    out = 0.5 - sine_integral(np.pi * r) / np.pi
    return out if np.ndim(out) else float(out)


def sine_partial2(r):
    """int_0^r s(2t) dt = Si(2 pi r)/(2 pi), r >= 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise NegativeArgument("sine_partial2 requires r >= 0")
    out = sine_integral(2 * np.pi * r) / (2 * np.pi)
    return out if np.ndim(out) else float(out)


# --------------------------------------------------------------------------
# waiting-time distributions
# --------------------------------------------------------------------------

_KINDS = ("exponential", "gamma", "uniform", "discrete")


@dataclass(frozen=True)
class WaitingDistribution:
    """A probability law on (0, inf) with mean exactly one.

    Supported kinds: exponential(rate), gamma(shape, rate), uniform(a, b) and
    discrete (finite list of positive atoms).  Construction rescales the
    parameters so that the mean is exactly 1; all kinds have finite variance,
    so the moment condition the renewal theory requires always holds.

    Discrete atom locations may be given as :class:`fractions.Fraction` (or
    strings such as ``"3/2"``) to make the lattice classification exact.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown waiting-time kind {self.kind!r}")

    # -- constructors (mean-1 normalisation happens here) ------------------

    @staticmethod
    def exponential(rate: float = 1.0) -> "WaitingDistribution":
        if rate <= 0:
            raise ValueError("rate must be positive")
        # mean 1/rate; rescaling x -> x * rate gives exponential(1)
        return WaitingDistribution("exponential", (1.0,))

    @staticmethod
    def gamma(shape: float, rate: float | None = None) -> "WaitingDistribution":
        if shape <= 0:
            raise ValueError("shape must be positive")
        # mean shape/rate; rescaled to mean 1 means rate == shape
        return WaitingDistribution("gamma", (float(shape), float(shape)))

    @staticmethod
    def uniform(a: float, b: float) -> "WaitingDistribution":
        if not (0 <= a < b):
            raise ValueError("need 0 <= a < b")
        mean = (a + b) / 2.0
        if mean <= 0:
            raise ValueError("support must be positive")
        a, b = a / mean, b / mean
        if a <= 0:
            raise ValueError("support must exclude 0 after rescaling")
        return WaitingDistribution("uniform", (a, b))

    @staticmethod
    def discrete(atoms: Sequence) -> "WaitingDistribution":
        """Finite atom list; locations given as Fraction/str/int stay exact
        rationals (so lattice classification is exact), floats stay floats."""
        locs = []
        probs = []
        for loc, p in atoms:
            if isinstance(loc, (Fraction, int, str)):
                locs.append(Fraction(loc))
            else:
                locs.append(float(loc))
            probs.append(float(p))
        probs_arr = np.asarray(probs, dtype=float)
        if np.any(probs_arr <= 0) or abs(probs_arr.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be positive and sum to 1")
        if any(loc <= 0 for loc in locs):
            raise ValueError("atom locations must be positive")
        if all(isinstance(loc, Fraction) for loc in locs):
            mean = sum(Fraction(p).limit_denominator(10**12) * loc
                       for loc, p in zip(locs, probs))
        else:
            mean = float(sum(p * float(loc) for loc, p in zip(locs, probs)))
            locs = [float(loc) for loc in locs]
        locs = [loc / mean for loc in locs]
        return WaitingDistribution(
            "discrete", tuple((loc, p) for loc, p in zip(locs, probs_arr))
        )

    # -- basic quantities ---------------------------------------------------

    @property
    def mean(self) -> float:
        return 1.0

    @property
    def std(self) -> float:
        if self.kind == "exponential":
            return 1.0
        if self.kind == "gamma":
            shape, rate = self.params
            return float(np.sqrt(shape) / rate)
        if self.kind == "uniform":
            a, b = self.params
            return float((b - a) / np.sqrt(12.0))
        locs = np.array([float(l) for l, _ in self.params])
        probs = np.array([p for _, p in self.params])
        return float(np.sqrt(np.sum(probs * (locs - 1.0) ** 2)))

    def pdf(self, x):
        """Density (continuous kinds only)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "exponential":
            # right-continuous at 0: the Volterra solver needs the 0+ limit
            return np.where(x >= 0, np.exp(-np.clip(x, 0, None)), 0.0)
        if self.kind == "gamma":
            shape, rate = self.params
            from scipy.stats import gamma as _gamma

            return _gamma.pdf(x, shape, scale=1.0 / rate)
        if self.kind == "uniform":
            a, b = self.params
            return np.where((x >= a) & (x <= b), 1.0 / (b - a), 0.0)
        raise ValueError("discrete law has no density")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "exponential":
            return rng.standard_exponential(n)
        if self.kind == "gamma":
            shape, rate = self.params
            return rng.gamma(shape, 1.0 / rate, n)
        if self.kind == "uniform":
            a, b = self.params
            return rng.uniform(a, b, n)
        locs = np.array([float(l) for l, _ in self.params])
        probs = np.array([p for _, p in self.params])
        return locs[rng.choice(len(locs), size=n, p=probs)]

    # -- serialisation (config fragment) ------------------------------------

    def to_fragment(self) -> dict:
        if self.kind == "discrete":
            return {
                "kind": "discrete",
                "atoms": [[str(l), p] for l, p in self.params],
            }
        return {"kind": self.kind, "params": list(self.params)}

    @staticmethod
    def from_fragment(fragment: dict) -> "WaitingDistribution":
        kind = fragment["kind"]
        if kind == "exponential":
            return WaitingDistribution.exponential()
        if kind == "gamma":
            return WaitingDistribution.gamma(*fragment["params"][:1])
        if kind == "uniform":
            return WaitingDistribution.uniform(*fragment["params"])
        if kind == "discrete":
            return WaitingDistribution.discrete(
                [(Fraction(str(l)), p) for l, p in fragment["atoms"]]
            )
        raise ValueError(f"unknown waiting-time kind {kind!r}")


def char_fn(d: WaitingDistribution, k):
    """Characteristic function int e^{-2 pi i k x} dmu(x) of a waiting law."""
    k = np.asarray(k, dtype=float)
    w = 2 * np.pi * k
    if d.kind == "exponential":
        out = 1.0 / (1.0 + 1j * w)
    elif d.kind == "gamma":
        shape, rate = d.params
        out = (1.0 + 1j * w / rate) ** (-shape)
    elif d.kind == "uniform":
        a, b = d.params
        # exact sinc form, stable as k -> 0
        out = np.exp(-1j * np.pi * k * (a + b)) * np.sinc(k * (b - a))
    else:
        locs = np.array([float(l) for l, _ in d.params])
        probs = np.array([p for _, p in d.params])
        out = np.sum(probs * np.exp(-1j * np.outer(w, locs).reshape(k.shape + locs.shape)), axis=-1)
    return complex(out) if np.ndim(out) == 0 else out
