"""Number and phase observables of an s-level system.

A phase value ``theta = 2*pi*k/s`` is always carried as its integer index
``k`` so that "modular 2 pi" arithmetic is exact integer arithmetic mod s.
Numbers ``n`` live in ``Z_s`` the same way.

The unitary forms are the workhorses:

* ``exp_phase_op(s, n)`` is the cyclic shift ``|m> -> |m + n mod s>``;
* ``exp_number_op(s, k)`` is the clock ``diag(exp(i theta_k m))``.

The Hermitian operators and the two-system modular observables are built
as spectral sums and exist for checking eigen-relations.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import LabelOutOfRange, NotScalar
from .linalg import STATE_TOL, frozen, roots_of_unity

__all__ = [
    "check_dim", "check_label", "number_state", "phase_state", "phase_basis",
    "exp_phase_op", "exp_number_op", "number_operator", "phase_operator",
    "weyl_commutator", "phase_eigenvalues", "phase_difference_observable",
    "phase_sum_observable", "number_sum_observable",
    "number_difference_observable", "reflection",
]


def check_dim(s: int) -> int:
    if not isinstance(s, (int, np.integer)) or s < 1:
        raise ValueError(f"dimension must be a positive integer, got {s!r}")
    return int(s)


def check_label(s: int, value: int, what: str = "label") -> int:
    if not isinstance(value, (int, np.integer)) or not 0 <= value < s:
        raise LabelOutOfRange(f"{what} {value!r} is not in Z_{s}")
    return int(value)


def number_state(s: int, n: int) -> np.ndarray:
    s = check_dim(s)
    n = check_label(s, n, "number")
    v = np.zeros(s, dtype=np.complex128)
    v[n] = 1.0
    return frozen(v)


def phase_state(s: int, k: int) -> np.ndarray:
    """Phase eigenstate with amplitudes ``exp(-i m theta_k) / sqrt(s)``."""
    s = check_dim(s)
    k = check_label(s, k, "phase index")
    m = np.arange(s)
    return frozen(roots_of_unity(s)[(-k * m) % s] / np.sqrt(s))


@lru_cache(maxsize=64)
def phase_basis(s: int) -> np.ndarray:
    """Matrix whose column ``k`` is ``phase_state(s, k)``."""
    s = check_dim(s)
    m = np.arange(s)
    return frozen(roots_of_unity(s)[(-np.outer(m, m)) % s] / np.sqrt(s))


def exp_phase_op(s: int, n: int) -> np.ndarray:
    """Shift operator ``sum_m |m + n><m|``; ``n`` is reduced mod ``s`` first."""
    s = check_dim(s)
    n = int(n) % s
    m = np.arange(s)
    op = np.zeros((s, s), dtype=np.complex128)
    op[(m + n) % s, m] = 1.0
    return frozen(op)


def exp_number_op(s: int, k: int) -> np.ndarray:
    """Clock operator ``diag(exp(2j*pi*k*m/s))``; ``k`` is reduced mod ``s`` first."""
    s = check_dim(s)
    k = int(k) % s
    m = np.arange(s)
    return frozen(np.diag(roots_of_unity(s)[(k * m) % s]))


def number_operator(s: int) -> np.ndarray:
    s = check_dim(s)
    return frozen(np.diag(np.arange(s, dtype=float)))


def phase_eigenvalues(s: int) -> np.ndarray:
    """The phase grid ``2*pi*m/s`` for ``m = 0..s-1``, inside the window ``[0, 2 pi)``."""
    return 2 * np.pi * np.arange(check_dim(s)) / s


def phase_operator(s: int) -> np.ndarray:
    """Hermitian phase operator ``sum_k theta_k |theta_k><theta_k|``."""
    f = phase_basis(s)
    return frozen((f * phase_eigenvalues(s)) @ f.conj().T)


def weyl_commutator(s: int, k: int, n: int, tol: float = STATE_TOL) -> complex:
    """Scalar ``c`` with ``e^{i theta N} e^{i n P} e^{-i theta N} e^{-i n P} = c I``.

    Computed from the explicit four-factor matrix product, ``theta = 2 pi k / s``.
    Raises :class:`NotScalar` when the product is not proportional to the
    identity within ``tol``.
    """
    s = check_dim(s)
    k = check_label(s, k, "phase index")
    n = check_label(s, n, "number")
    clock = exp_number_op(s, k)
    shift = exp_phase_op(s, n)
    product = clock @ shift @ exp_number_op(s, -k) @ exp_phase_op(s, -n)
    c = complex(np.trace(product) / s)
    residual = np.max(np.abs(product - c * np.eye(s)))
    if residual > tol:
        raise NotScalar(f"Weyl product for s={s}, k={k}, n={n} deviates from c*I by {residual:.3e}")
    return c


@lru_cache(maxsize=64)
def reflection(s: int) -> np.ndarray:
    """Number reflection ``|m> -> |-m mod s>``; conjugation by it sends N -> -N and P -> -P (mod)."""
    s = check_dim(s)
    m = np.arange(s)
    op = np.zeros((s, s), dtype=np.complex128)
    op[(-m) % s, m] = 1.0
    return frozen(op)


def _modular_phase_observable(s: int, sign: int) -> np.ndarray:
    s = check_dim(s)
    a, b = np.divmod(np.arange(s * s), s)
    eig = 2 * np.pi * ((a + sign * b) % s) / s
    u = np.kron(phase_basis(s), phase_basis(s))
    return frozen((u * eig) @ u.conj().T)


def phase_difference_observable(s: int) -> np.ndarray:
    """``P_A - P_B`` modular 2 pi on ``C^s (x) C^s``, diagonal in the product phase basis."""
    return _modular_phase_observable(s, -1)


def phase_sum_observable(s: int) -> np.ndarray:
    """``P_A + P_B`` modular 2 pi; the B-reflected counterpart of the phase difference."""
    return _modular_phase_observable(s, +1)


def number_sum_observable(s: int) -> np.ndarray:
    s = check_dim(s)
    a, b = np.divmod(np.arange(s * s), s)
    return frozen(np.diag(((a + b) % s).astype(float)))


def number_difference_observable(s: int) -> np.ndarray:
    s = check_dim(s)
    a, b = np.divmod(np.arange(s * s), s)
    return frozen(np.diag(((a - b) % s).astype(float)))
