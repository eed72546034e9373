import numpy as np
import pytest

from difflab import (
    ComplexMatrix,
    DimensionTooLarge,
    SymTridiag,
    complex_eigenvalues,
    symtridiag_eigenvalues,
)
from oracles import charpoly_eigs, tridiag_eigs_bisect


def test_symtridiag_trivial_cases():
    assert symtridiag_eigenvalues(SymTridiag([3.5], [])).tolist() == [3.5]
    e = symtridiag_eigenvalues(SymTridiag([0.0, 0.0], [1.0]))
    assert np.allclose(e, [-1.0, 1.0], atol=1e-14)
    e3 = symtridiag_eigenvalues(SymTridiag([0.0, 0.0, 0.0], [1.0, 1.0]))
    assert np.allclose(e3, [-np.sqrt(2.0), 0.0, np.sqrt(2.0)], atol=1e-12)


def test_symtridiag_sorted_and_deterministic():
    rng = np.random.default_rng(0)
    m = SymTridiag(rng.standard_normal(64), rng.standard_normal(63))
    a = symtridiag_eigenvalues(m)
    b = symtridiag_eigenvalues(m)
    assert np.array_equal(a, b)
    assert np.all(np.diff(a) >= 0)


def test_symtridiag_matches_bisection_oracle():
    rng = np.random.default_rng(1)
    for n in (2, 3, 4, 5, 6):
        m = SymTridiag(rng.standard_normal(n), rng.standard_normal(n - 1))
        mine = symtridiag_eigenvalues(m)
        oracle = tridiag_eigs_bisect(m.diag, m.offdiag)
        assert np.max(np.abs(mine - oracle)) < 1e-8


def test_symtridiag_flip_invariance():
    rng = np.random.default_rng(2)
    for _ in range(5):
        m = SymTridiag(rng.standard_normal(12), rng.standard_normal(11))
        assert np.allclose(
            symtridiag_eigenvalues(m), symtridiag_eigenvalues(m.flipped()), atol=1e-10
        )


def test_symtridiag_trace_invariant():
    rng = np.random.default_rng(3)
    m = SymTridiag(rng.standard_normal(40), rng.standard_normal(39))
    scale = np.max(np.abs(m.diag)) + np.max(np.abs(m.offdiag))
    assert abs(symtridiag_eigenvalues(m).sum() - m.diag.sum()) < 1e-8 * scale * 40


def test_complex_trivial_cases():
    d = np.diag([1.0 + 1j, 2.0, -3.0j])
    assert np.allclose(sorted(complex_eigenvalues(ComplexMatrix(d)), key=np.angle),
                       sorted([1.0 + 1j, 2.0, -3.0j], key=np.angle))
    upper = np.array([[2.0, 5.0], [0.0, -1.0]], dtype=complex)
    vals = sorted(complex_eigenvalues(ComplexMatrix(upper)).real.tolist())
    assert np.allclose(vals, [-1.0, 2.0])
    rot = ComplexMatrix(np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex))
    vals = complex_eigenvalues(rot)
    assert np.allclose(sorted(vals.imag), [-1.0, 1.0], atol=1e-14)
    assert np.allclose(vals.real, 0.0, atol=1e-14)


def test_complex_matches_charpoly_oracle():
    rng = np.random.default_rng(4)
    for n in (2, 3, 4, 5, 6):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        mine = np.sort_complex(complex_eigenvalues(ComplexMatrix(a)))
        oracle = np.sort_complex(charpoly_eigs(a))
        assert np.max(np.abs(mine - oracle)) < 1e-8


def test_complex_trace_invariant():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30))
    norm = np.linalg.norm(a)
    assert abs(complex_eigenvalues(ComplexMatrix(a)).sum() - np.trace(a)) < 1e-8 * norm


def test_dimension_cap_and_validation():
    a = np.zeros((4, 4), dtype=complex)
    with pytest.raises(DimensionTooLarge):
        complex_eigenvalues(ComplexMatrix(a), dim_cap=3)
    with pytest.raises(ValueError):
        symtridiag_eigenvalues(SymTridiag([0.0, 0.0], [1.0]), tol=-1.0)
    with pytest.raises(ValueError):
        SymTridiag([0.0, np.nan], [1.0])
    with pytest.raises(ValueError):
        SymTridiag([0.0, 1.0], [1.0, 2.0])
