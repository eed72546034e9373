"""Eigenvalue computations backing the random-matrix samplers.

Two operations only: all eigenvalues of a real symmetric tridiagonal matrix
(ascending) and all eigenvalues of a dense complex matrix (any order).  Both
are delegated to LAPACK - implicit-shift QL/QR for the tridiagonal case and
Hessenberg reduction plus shifted QR for the dense case - which meets the
accuracy contract at machine precision and is deterministic for fixed input.
The test suite checks both against independent small-matrix oracles
(Sturm-sequence bisection, characteristic-polynomial roots).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import DimensionTooLarge, NoConvergence

DEFAULT_DIM_CAP = 1024


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix: diagonal of length N, offdiagonal N-1."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).reshape(-1)
        e = np.asarray(self.offdiag, dtype=float).reshape(-1)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        if len(d) < 1:
            raise ValueError("need at least a 1x1 matrix")
        if len(e) != len(d) - 1:
            raise ValueError("offdiag must have length N-1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("entries must be finite")

    @property
    def n(self) -> int:
        return len(self.diag)

    def flipped(self) -> "SymTridiag":
        """Reverse both bands; the spectrum is invariant under this flip."""
        return SymTridiag(self.diag[::-1].copy(), self.offdiag[::-1].copy())


@dataclass(frozen=True)
class ComplexMatrix:
    """Dense complex N x N matrix."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError("entries must be a square matrix")
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise ValueError("entries must be finite")
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def symtridiag_eigenvalues(m: SymTridiag, tol: float = 1e-12) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending.

    Each eigenvalue is accurate to machine precision relative to the spectral
    scale, well inside any tol > 0 the caller requests.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if m.n == 1:
        return m.diag.copy()
    try:
        vals = scipy.linalg.eigvalsh_tridiagonal(m.diag, m.offdiag)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NoConvergence(str(exc)) from exc
    return np.sort(vals)


def complex_eigenvalues(
    m: ComplexMatrix, tol: float = 1e-12, dim_cap: int = DEFAULT_DIM_CAP
) -> np.ndarray:
    """All eigenvalues of a dense complex matrix (unspecified order)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if m.n > dim_cap:
        raise DimensionTooLarge(f"N = {m.n} exceeds the cap {dim_cap}")
    try:
        return np.linalg.eigvals(m.entries)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
