"""Shared geometric and spectral data types.

Everything downstream (samplers, estimators, theory, verification) exchanges
the handful of types defined here: observation windows centred at the origin,
finite point configurations, weighted Dirac combs, spectral measures split
into pure-point and absolutely continuous parts, and uniformly gridded curves
with optional error bars.  All types are immutable after construction and can
be shared freely between threads.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


# --------------------------------------------------------------------------
# errors
# --------------------------------------------------------------------------

class DiffLabError(Exception):
    """Base class for all package errors."""


class WindowTooLarge(DiffLabError):
    """Restriction window exceeds the window the points were sampled on."""


class TooFewPoints(DiffLabError):
    """Estimator needs at least two points."""


class GridMismatch(DiffLabError):
    """GridFunctions combined on different abscissae."""


class NegativeArgument(DiffLabError):
    """Argument outside the nonnegative half-line."""


class AtomLocation(DiffLabError):
    """Density requested at a point of the pure-point support."""


class SingularPoint(DiffLabError):
    """Density requested at a non-removable singularity."""


class NoConvergence(DiffLabError):
    """Iterative routine exhausted its iteration budget."""


class DimensionTooLarge(DiffLabError):
    """Matrix dimension above the configured cap."""


class AllPointsExcluded(DiffLabError):
    """Every grid point fell inside an exclusion band."""


class ConfigError(DiffLabError):
    """Invalid experiment configuration; message names the offending field."""


# --------------------------------------------------------------------------
# windows
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Centred observation window: an interval (1D), or a disk/square (2D).

    ``size`` is the interval length L, the disk radius R, or the square side
    L.  Windows are always centred at the origin; stationarity of every
    implemented process means no generality is lost.
    """

    kind: str  # "interval" | "disk" | "square"
    size: float

    def __post_init__(self):
        if self.kind not in ("interval", "disk", "square"):
            raise ValueError(f"unknown window kind {self.kind!r}")
        if not (self.size > 0 and np.isfinite(self.size)):
            raise ValueError("window size must be positive and finite")

    @staticmethod
    def interval(length: float) -> "Window":
        return Window("interval", float(length))

    @staticmethod
    def disk(radius: float) -> "Window":
        return Window("disk", float(radius))

    @staticmethod
    def square(side: float) -> "Window":
        return Window("square", float(side))

    @property
    def dimension(self) -> int:
        return 1 if self.kind == "interval" else 2

    @property
    def volume(self) -> float:
        """Length for intervals, area for disks and squares."""
        if self.kind == "interval":
            return self.size
        if self.kind == "disk":
            return np.pi * self.size**2
        return self.size**2

    @property
    def inradius(self) -> float:
        """Largest r such that the centred disk of radius r fits inside."""
        if self.kind == "disk":
            return self.size
        return self.size / 2.0

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Strict (open-window) membership mask for an array of points."""
        points = np.asarray(points, dtype=float)
        if self.kind == "interval":
            return np.abs(points) < self.size / 2.0
        if self.kind == "disk":
            return np.hypot(points[..., 0], points[..., 1]) < self.size
        return np.max(np.abs(points), axis=-1) < self.size / 2.0

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        """Distance from each point to the window boundary."""
        points = np.asarray(points, dtype=float)
        if self.kind == "interval":
            return self.size / 2.0 - np.abs(points)
        if self.kind == "disk":
            return self.size - np.hypot(points[..., 0], points[..., 1])
        return self.size / 2.0 - np.max(np.abs(points), axis=-1)

    def fits_inside(self, other: "Window") -> bool:
        """True if self, as a region, is contained in ``other``."""
        if self.dimension != other.dimension:
            return False
        if self.dimension == 1:
            return self.size <= other.size
        # circumradius of self must not exceed what other accommodates
        circum = self.size if self.kind == "disk" else self.size * np.sqrt(2) / 2
        if other.kind == "disk":
            return circum <= other.size
        # other is a square: compare along the axes and the diagonal
        if self.kind == "disk":
            return 2 * self.size <= other.size
        return self.size <= other.size


def window_volume(w: Window) -> float:
    """Length/area of the window (the normalising volume of the averaging)."""
    return w.volume


# --------------------------------------------------------------------------
# point configurations
# --------------------------------------------------------------------------

def _as_points(points, dimension: int) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if dimension == 1:
        arr = arr.reshape(-1)
    else:
        arr = arr.reshape(-1, 2)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    return arr


@dataclass(frozen=True)
class PointSet:
    """A finite point configuration observed through a window.

    Points are stored as a float array, shape (n,) in 1D and (n, 2) in 2D.
    Every point lies strictly inside the (open) window.
    """

    points: np.ndarray
    window: Window

    def __post_init__(self):
        pts = _as_points(self.points, self.window.dimension)
        object.__setattr__(self, "points", pts)
        if len(pts) and not np.all(self.window.contains(pts)):
            raise ValueError("all points must lie strictly inside the window")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dimension(self) -> int:
        return self.window.dimension

    def min_pairwise_distance(self) -> float:
        """Smallest distance between two distinct points (inf if n < 2)."""
        n = len(self)
        if n < 2:
            return np.inf
        if self.dimension == 1:
            return float(np.min(np.diff(np.sort(self.points))))
        from scipy.spatial import cKDTree

        d, _ = cKDTree(self.points).query(self.points, k=2)
        return float(np.min(d[:, 1]))

    def is_simple(self, tol: float = 1e-12) -> bool:
        return self.min_pairwise_distance() > tol


@dataclass(frozen=True)
class WeightedPointSet:
    """A PointSet with one real weight per point (a weighted Dirac comb)."""

    base: PointSet
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        object.__setattr__(self, "weights", w)
        if len(w) != len(self.base):
            raise ValueError("weights and points must have equal length")
        if len(w) and not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")

    def __len__(self) -> int:
        return len(self.base)

    @property
    def points(self) -> np.ndarray:
        return self.base.points

    @property
    def window(self) -> Window:
        return self.base.window


def point_density(p: PointSet) -> float:
    """Points per unit window volume."""
    return len(p) / p.window.volume


def restrict(p: PointSet, w: Window) -> PointSet:
    """Restriction to a smaller window (strict, open-window semantics)."""
    if not w.fits_inside(p.window):
        raise WindowTooLarge(
            f"cannot restrict {p.window.kind}({p.window.size}) to "
            f"{w.kind}({w.size})"
        )
    if len(p) == 0:
        return PointSet(p.points, w)
    keep = w.contains(p.points)
    return PointSet(p.points[keep], w)


# --------------------------------------------------------------------------
# gridded curves
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GridFunction:
    """Real values on a strictly increasing uniform 1D grid.

    ``stderr``, when present, holds a per-point standard error of the value
    (e.g. across replicas).  ``n_replicas`` counts the realisations that went
    into the values.
    """

    grid: np.ndarray
    values: np.ndarray
    stderr: Optional[np.ndarray] = None
    n_replicas: int = 1

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=float).reshape(-1)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        if len(g) != len(v):
            raise ValueError("grid and values must have equal length")
        if len(g) == 0:
            raise ValueError("empty grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        if len(g) > 1:
            d = np.diff(g)
            if np.any(d <= 0):
                raise ValueError("grid must be strictly increasing")
            if not np.allclose(d, d[0], rtol=1e-9, atol=1e-12 * abs(g[-1] - g[0])):
                raise ValueError("grid must be uniformly spaced")
        if self.stderr is not None:
            s = np.asarray(self.stderr, dtype=float).reshape(-1)
            object.__setattr__(self, "stderr", s)
            if len(s) != len(g):
                raise ValueError("stderr and grid must have equal length")
            if np.any(s < 0) or not np.all(np.isfinite(s)):
                raise ValueError("stderr must be finite and nonnegative")
        if self.n_replicas < 1:
            raise ValueError("n_replicas must be >= 1")

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0]) if len(self.grid) > 1 else 0.0


@dataclass(frozen=True)
class SpectralMeasure:
    """Pure-point atoms plus an absolutely continuous density.

    ``atoms`` is a sequence of (location, intensity >= 0); locations are
    scalars in 1D and may be pairs in 2D (radial measures use scalars).
    ``ac_density`` is a vectorised callable, a GridFunction, or None.  A
    singular continuous part has no representation here: no implemented model
    produces one, so it is flagged rather than modelled.
    """

    atoms: tuple = ()
    ac_density: Optional[object] = None  # callable or GridFunction
    label: str = ""

    def __post_init__(self):
        atoms = tuple((loc, float(i)) for loc, i in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        for _, intensity in atoms:
            if intensity < 0:
                raise ValueError("atom intensities must be >= 0")

    def ac(self, x) -> np.ndarray:
        """Evaluate the absolutely continuous density (0 if absent)."""
        x = np.asarray(x, dtype=float)
        if self.ac_density is None:
            return np.zeros_like(x)
        if isinstance(self.ac_density, GridFunction):
            return np.interp(x, self.ac_density.grid, self.ac_density.values)
        return np.asarray(self.ac_density(x), dtype=float)


# --------------------------------------------------------------------------
# seeding
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus replica index; derives independent per-replica RNGs.

    Derivation is a pure function of (master_seed, replica_index) via numpy's
    splittable SeedSequence, so replicas can run concurrently and still
    reproduce bit-identically in any execution order.
    """

    master_seed: int
    replica_index: int = 0

    def __post_init__(self):
        if self.replica_index < 0:
            raise ValueError("replica_index must be >= 0")

    def rng(self, purpose: int = 0) -> np.random.Generator:
        """Derived generator; distinct ``purpose`` values give independent
        streams (marking reuses a sampler's SeedSpec without replaying it)."""
        ss = np.random.SeedSequence(
            entropy=int(self.master_seed) & (2**64 - 1),
            spawn_key=(int(self.replica_index), int(purpose)),
        )
        return np.random.Generator(np.random.PCG64(ss))

    def replica(self, index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, index)


# --------------------------------------------------------------------------
# CSV exchange formats
# --------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_point_set(p, path_or_buf) -> None:
    """Write a PointSet or WeightedPointSet in the package CSV format.

    Header is ``x`` (1D) or ``x,y`` (2D), plus ``w`` for weighted sets; the
    window is recorded in a ``# window: <kind> <size>`` comment line.
    """
    weights = None
    if isinstance(p, WeightedPointSet):
        weights = p.weights
        base = p.base
    else:
        base = p
    lines = [f"# window: {base.window.kind} {_fmt(base.window.size)}"]
    cols = ["x"] if base.dimension == 1 else ["x", "y"]
    if weights is not None:
        cols.append("w")
    lines.append(",".join(cols))
    for i in range(len(base)):
        if base.dimension == 1:
            row = [_fmt(base.points[i])]
        else:
            row = [_fmt(base.points[i, 0]), _fmt(base.points[i, 1])]
        if weights is not None:
            row.append(_fmt(weights[i]))
        lines.append(",".join(row))
    _write_text(path_or_buf, "\n".join(lines) + "\n")


def read_point_set(path_or_buf):
    """Read a PointSet (or WeightedPointSet if a ``w`` column is present)."""
    text = _read_text(path_or_buf)
    window = None
    header = None
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("window:"):
                kind, size = body[len("window:"):].split()
                window = Window(kind, float(size))
            continue
        if header is None:
            header = [c.strip() for c in line.split(",")]
            continue
        rows.append([float(c) for c in line.split(",")])
    if window is None:
        raise ValueError("missing '# window:' comment line")
    if header is None:
        raise ValueError("missing header line")
    data = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
    weighted = "w" in header
    ncoord = len(header) - (1 if weighted else 0)
    pts = data[:, 0] if ncoord == 1 else data[:, :2]
    base = PointSet(pts, window)
    if weighted:
        return WeightedPointSet(base, data[:, -1])
    return base


def write_grid_function(g: GridFunction, path_or_buf) -> None:
    """Write a GridFunction as ``abscissa,value[,stderr]`` CSV."""
    lines = [f"# n_replicas: {g.n_replicas}"]
    if g.stderr is None:
        lines.append("abscissa,value")
        for x, v in zip(g.grid, g.values):
            lines.append(f"{_fmt(x)},{_fmt(v)}")
    else:
        lines.append("abscissa,value,stderr")
        for x, v, s in zip(g.grid, g.values, g.stderr):
            lines.append(f"{_fmt(x)},{_fmt(v)},{_fmt(s)}")
    _write_text(path_or_buf, "\n".join(lines) + "\n")


def read_grid_function(path_or_buf) -> GridFunction:
    text = _read_text(path_or_buf)
    n_replicas = 1
    header = None
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n_replicas:"):
                n_replicas = int(body.split(":")[1])
            continue
        if header is None:
            header = [c.strip() for c in line.split(",")]
            continue
        rows.append([float(c) for c in line.split(",")])
    data = np.asarray(rows, dtype=float)
    stderr = data[:, 2] if header is not None and len(header) > 2 else None
    return GridFunction(data[:, 0], data[:, 1], stderr=stderr, n_replicas=n_replicas)


def _write_text(path_or_buf, text: str) -> None:
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w") as fh:
            fh.write(text)


def _read_text(path_or_buf) -> str:
    if hasattr(path_or_buf, "read"):
        return path_or_buf.read()
    with open(path_or_buf) as fh:
        return fh.read()
