"""Seeded, reproducible samplers for every point process in the lab.

Every sampler is a pure function of (parameters, window, SeedSpec): identical
inputs give byte-identical point sets, independent of execution order, which
is what makes replica-parallel experiments replayable.

The Gaussian beta ensembles are sampled through their symmetric tridiagonal
model (Gaussian diagonal, chi-distributed offdiagonal with parameter
beta*(N-j)), one code path for beta in {1, 2, 4}.  For that convention the
global spectrum is the semicircle of radius sqrt(2 beta N) with central
eigenvalue density sqrt(2N/beta)/pi; multiplying the kept central eigenvalues
by that density yields unit point density, which the acceptance suite
enforces as the calibration check.  Ginibre entries have variance 1/pi per
complex entry so that the circular law fills the radius sqrt(N/pi) (area N)
with unit density directly, no post-hoc rescaling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .core import PointSet, SeedSpec, WeightedPointSet, Window
from .specfun import WaitingDistribution

__all__ = [
    "sample_poisson",
    "mark_pm1",
    "matern2_thin",
    "sample_renewal",
    "sample_beta_bulk",
    "sample_ginibre",
    "beta_bulk_window_length",
    "ginibre_window_radius",
]


def _uniform_in_window(rng: np.random.Generator, w: Window, n: int) -> np.ndarray:
    if w.kind == "interval":
        return rng.uniform(-w.size / 2, w.size / 2, n)
    if w.kind == "square":
        return rng.uniform(-w.size / 2, w.size / 2, (n, 2))
    # disk: exact polar sampling
    r = w.size * np.sqrt(rng.random(n))
    theta = rng.uniform(0.0, 2 * np.pi, n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def sample_poisson(rho: float, w: Window, seed: SeedSpec) -> PointSet:
    """Homogeneous Poisson process of density rho restricted to the window."""
    if rho < 0:
        raise ValueError("rho must be >= 0")
    rng = seed.rng()
    n = rng.poisson(rho * w.volume)
    pts = _uniform_in_window(rng, w, n)
    inside = w.contains(pts)  # boundary hits have probability zero; drop them
    return PointSet(pts[inside], w)


def mark_pm1(p: PointSet, seed: SeedSpec) -> WeightedPointSet:
    """Attach i.i.d. fair +/-1 weights to each point.

    Marks come from an independent stream of the seed, so the same SeedSpec
    that generated the points can be reused here without correlation.
    """
    rng = seed.rng(purpose=1)
    weights = rng.integers(0, 2, len(p)) * 2.0 - 1.0
    return WeightedPointSet(p, weights)


def matern2_thin(p: PointSet, hard_core: float, seed: SeedSpec) -> PointSet:
    """Matern type II thinning with hard-core distance ``hard_core``.

    Each point draws an i.i.d. uniform age mark; a point survives iff no
    other point within the hard-core distance carries a strictly smaller
    mark.  The survivors have minimum pairwise distance >= hard_core.
    """
    if hard_core <= 0:
        raise ValueError("hard-core distance must be positive")
    rng = seed.rng(purpose=1)
    n = len(p)
    if n == 0:
        return p
    marks = rng.random(n)
    from scipy.spatial import cKDTree

    pts = p.points.reshape(n, -1)
    pairs = cKDTree(pts).query_pairs(hard_core, output_type="ndarray")
    survive = np.ones(n, dtype=bool)
    if len(pairs):
        i, j = pairs[:, 0], pairs[:, 1]
        np.logical_and.at(survive, j, ~(marks[i] < marks[j]))  # smaller mark kills
        np.logical_and.at(survive, i, ~(marks[j] < marks[i]))
    return PointSet(p.points[survive], p.window)


def sample_renewal(mu: WaitingDistribution, w: Window, seed: SeedSpec) -> PointSet:
    """Stationary renewal realisation on a 1D window.

    The dropping machine starts far to the left of the window (burn-in of
    50 * max(1, 10 * std(mu)) lengths) and only points inside the open window
    are kept, approximating the start-at-minus-infinity stationary process.
    """
    if w.dimension != 1:
        raise ValueError("renewal sampling needs a 1D window")
    rng = seed.rng()
    half = w.size / 2.0
    burn = 50.0 * max(1.0, 10.0 * mu.std)
    position = -half - burn
    chunk = max(1024, int(w.size + burn) + 64)
    kept = []
    while position < half:
        gaps = mu.sample(rng, chunk)
        pts = position + np.cumsum(gaps)
        position = pts[-1]
        kept.append(pts[(pts > -half) & (pts < half)])
    points = np.concatenate(kept) if kept else np.empty(0)
    return PointSet(points, w)


def beta_bulk_window_length(beta: int, n: int, keep_fraction: float) -> float:
    """Window length of the rescaled central region: 4 * kappa * N / pi."""
    return 4.0 * keep_fraction * n / np.pi


def sample_beta_bulk(beta: int, n: int, keep_fraction: float, seed: SeedSpec) -> PointSet:
    """Bulk of the Gaussian beta ensemble as a unit-density point set.

    Samples the tridiagonal model, keeps eigenvalues in the central fraction
    ``keep_fraction`` of the semicircle support and rescales by the central
    density sqrt(2N/beta)/pi, so the kept region has unit point density in
    expectation.  The returned window is the rescaled kept region.
    """
    if beta not in (1, 2, 4):
        raise ValueError("beta must be 1, 2 or 4")
    if n < 2:
        raise ValueError("need n >= 2")
    if not (0 < keep_fraction <= 1):
        raise ValueError("keep_fraction must be in (0, 1]")
    rng = seed.rng()
    diag = rng.standard_normal(n)
    dof = beta * np.arange(n - 1, 0, -1)
    offdiag = np.sqrt(rng.chisquare(dof) / 2.0)
    eig = linalg.symtridiag_eigenvalues(linalg.SymTridiag(diag, offdiag))
    edge = np.sqrt(2.0 * beta * n)
    central_density = np.sqrt(2.0 * n / beta) / np.pi
    kept = eig[np.abs(eig) < keep_fraction * edge]
    window = Window.interval(beta_bulk_window_length(beta, n, keep_fraction))
    return PointSet(kept * central_density, window)


def ginibre_window_radius(n: int, keep_fraction: float) -> float:
    """Radius of the kept disk: kappa * sqrt(N/pi)."""
    return keep_fraction * np.sqrt(n / np.pi)


def sample_ginibre(
    n: int, keep_fraction: float, seed: SeedSpec, dim_cap: int = linalg.DEFAULT_DIM_CAP
) -> PointSet:
    """Ginibre eigenvalues as a unit-density planar point set.

    Entries are i.i.d. centred complex Gaussians with variance 1/pi, so the
    eigenvalues approach the uniform distribution on the disk of radius
    sqrt(N/pi) (area N) with density 1.  Eigenvalues within radius
    kappa * sqrt(N/pi) are kept; the window is that disk.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if not (0 < keep_fraction <= 1):
        raise ValueError("keep_fraction must be in (0, 1]")
    rng = seed.rng()
    scale = 1.0 / np.sqrt(2.0 * np.pi)  # per-component std for variance 1/pi
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    eig = linalg.complex_eigenvalues(linalg.ComplexMatrix(a * scale), dim_cap=dim_cap)
    radius = ginibre_window_radius(n, keep_fraction)
    kept = eig[np.abs(eig) < radius]
    window = Window.disk(radius)
    return PointSet(np.column_stack([kept.real, kept.imag]), window)
