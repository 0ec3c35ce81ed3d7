"""Dense complex linear algebra used throughout the package.

States are 1-d ``complex128`` arrays and operators are square 2-d arrays.
Composite systems are flattened row-major with the leftmost subsystem most
significant, so ``kron(a, b)`` puts ``a`` on subsystem A and ``b`` on B and
basis index ``(i, j)`` maps to ``i * dim_b + j``.

Arrays returned by the constructors in this package are marked read-only;
copy them before mutating.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotNormalized

__all__ = [
    "STATE_TOL", "UNITARY_TOL", "frozen", "ket", "operator", "composite_index",
    "split_index", "roots_of_unity", "kron", "dagger", "trace", "fidelity",
    "is_unitary", "normalize", "phase_gauge", "operator_phase_distance",
    "random_state", "random_unitary", "polar_unitary",
]

STATE_TOL = 1e-10
UNITARY_TOL = 1e-12
_NORM_TOL = 1e-12


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def ket(amplitudes, tol: float = _NORM_TOL) -> np.ndarray:
    """Validate a physical state vector and return it as a read-only array.

    Raises :class:`NotNormalized` if the Euclidean norm differs from 1 by
    more than ``tol``. Unnormalized intermediates should stay plain arrays.
    """
    v = np.array(amplitudes, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"a ket must be a non-empty 1-d array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("ket amplitudes must be finite")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f"ket norm is {norm!r}, expected 1")
    return frozen(v)


def operator(entries) -> np.ndarray:
    m = np.array(entries, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"an operator must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("operator entries must be finite")
    return frozen(m)


def composite_index(dims: Sequence[int], indices: Sequence[int]) -> int:
    """Flat index of a product basis state, leftmost subsystem most significant."""
    if len(dims) != len(indices):
        raise DimensionMismatch("one index per subsystem is required")
    flat = 0
    for d, i in zip(dims, indices):
        if d <= 0:
            raise ValueError("subsystem dimensions must be positive")
        if not 0 <= i < d:
            raise IndexError(f"index {i} out of range for subsystem of dim {d}")
        flat = flat * d + i
    return flat


def split_index(dims: Sequence[int], flat: int) -> tuple[int, ...]:
    total = int(np.prod(dims))
    if not 0 <= flat < total:
        raise IndexError(f"flat index {flat} out of range for composite dim {total}")
    out = []
    for d in reversed(dims):
        flat, r = divmod(flat, d)
        out.append(r)
    return tuple(reversed(out))


@lru_cache(maxsize=None)
def roots_of_unity(s: int) -> np.ndarray:
    """``exp(2j*pi*k/s)`` for ``k = 0..s-1``, each from its exact angle."""
    if s <= 0:
        raise ValueError("s must be positive")
    k = np.arange(s)
    return frozen(np.exp(2j * np.pi * k / s))


def kron(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise DimensionMismatch("kron needs two kets or two operators")
    return frozen(np.kron(a, b))


def dagger(a) -> np.ndarray:
    return frozen(np.conj(np.asarray(a, dtype=np.complex128)).T)


def trace(a) -> complex:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"trace needs a square matrix, got shape {a.shape}")
    return complex(np.trace(a))


def fidelity(a, b) -> float:
    """Squared overlap ``|<a|b>|**2`` of two normalized states."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(f"fidelity of shapes {a.shape} and {b.shape}")
    f = abs(np.vdot(a, b)) ** 2
    return float(min(f, 1.0))


def is_unitary(a, tol: float = UNITARY_TOL) -> bool:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    residual = a.conj().T @ a - np.eye(a.shape[0])
    return bool(np.max(np.abs(residual)) <= tol)


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise NotNormalized("cannot normalize the zero vector")
    return frozen(v / norm)


def phase_gauge(v, tol: float = 1e-12) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real positive."""
    v = np.asarray(v, dtype=np.complex128)
    nz = np.flatnonzero(np.abs(v) > tol)
    if nz.size == 0:
        return frozen(v.copy())
    first = v[nz[0]]
    return frozen(v * (abs(first) / first))


def operator_phase_distance(a, b) -> float:
    """``1 - |Tr(a^dagger b)| / (||a|| ||b||)``; zero iff ``b`` is a phase times ``a``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0 if na == nb else 1.0
    return float(max(0.0, 1.0 - abs(np.vdot(a, b)) / (na * nb)))


def random_state(s: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state: a normalized complex Gaussian vector."""
    v = rng.standard_normal(s) + 1j * rng.standard_normal(s)
    return normalize(v)


def random_unitary(s: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with the R-diagonal phases removed."""
    z = (rng.standard_normal((s, s)) + 1j * rng.standard_normal((s, s))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return frozen(q * (d / np.abs(d)))


def polar_unitary(t) -> np.ndarray:
    """Unitary factor ``U`` of the polar decomposition ``t = U P`` with ``P >= 0``."""
    w, _, vh = np.linalg.svd(np.asarray(t, dtype=np.complex128))
    return frozen(w @ vh)
