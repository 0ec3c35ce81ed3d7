"""Entangled channels and Bell measurement bases on two s-level systems.

Three families of maximally entangled bases are provided:

* the standard basis of common eigenstates of phase-difference and
  number-sum, ``bell_state(s, k, n) = C (|theta_k> (x) |n>)`` with ``C`` the
  controlled shift ``|a>|m> -> |a>|m - a>``;
* the dual basis obtained by reflecting the second subsystem's number
  (``m -> -m``), i.e. common eigenstates of phase-sum and
  number-difference; its ``(0, 0)`` member is ``sum_m |m>|m> / sqrt(s)``;
* the general basis ``|k;l> = sum_m |m> (x) O_kl |m> / sqrt(s)`` for a
  family of operators ``O_kl`` obeying ``Tr(O_kl O_k'l'^dagger) = s delta delta``.

Every basis is returned as an ``(s*s, s*s)`` array whose row ``i`` is the
``i``-th state, in ``(phase, number)`` / ``(k, l)`` lexicographic order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    FamilyNormalizationError,
    NormalizationViolation,
    NotOrthonormal,
)
from .linalg import frozen, is_unitary, operator
from .observables import (
    check_dim,
    check_label,
    exp_number_op,
    exp_phase_op,
    phase_state,
)

__all__ = [
    "BellLabel", "iter_labels", "controlled_shift", "apply_controlled_shift",
    "bell_state", "bell_basis", "dual_channel_state", "dual_bell_state",
    "dual_bell_basis", "clock_shift_family", "check_family", "GeneralScheme",
    "general_channel_state", "general_bell_basis", "gram_deviation",
    "completeness_deviation", "schmidt_coefficients", "channel_operator",
    "measurement_operator", "rescale_to_trace", "ChannelValidity",
    "channel_validity",
]

GRAM_TOL = 1e-8
SCHEME_TOL = 1e-9
TRACE_TOL = 1e-6
RELIABLE_TOL = 1e-9


@dataclass(frozen=True, order=True)
class BellLabel:
    """Outcome or channel label: a phase index and a number, both in ``Z_s``."""

    s: int
    phase: int
    number: int

    def __post_init__(self):
        check_dim(self.s)
        check_label(self.s, self.phase, "phase index")
        check_label(self.s, self.number, "number")

    @property
    def index(self) -> int:
        return self.phase * self.s + self.number

    def as_list(self) -> list[int]:
        return [self.phase, self.number]


def iter_labels(s: int) -> Iterator[BellLabel]:
    for k in range(s):
        for n in range(s):
            yield BellLabel(s, k, n)


def controlled_shift(s: int) -> np.ndarray:
    """The permutation ``|a>|m> -> |a>|m - a mod s>`` as an ``s^2 x s^2`` matrix."""
    s = check_dim(s)
    a, m = np.divmod(np.arange(s * s), s)
    op = np.zeros((s * s, s * s), dtype=np.complex128)
    op[a * s + (m - a) % s, a * s + m] = 1.0
    return frozen(op)


def apply_controlled_shift(vec, s: int) -> np.ndarray:
    psi = np.asarray(vec, dtype=np.complex128).reshape(s, s)
    out = np.empty_like(psi)
    a = np.arange(s)[:, None]
    m = np.arange(s)[None, :]
    out[a, (m - a) % s] = psi
    return out.reshape(s * s)


def bell_state(s: int, phase: int, number: int) -> np.ndarray:
    b = np.zeros(check_dim(s), dtype=np.complex128)
    b[check_label(s, number, "number")] = 1.0
    v = apply_controlled_shift(np.kron(phase_state(s, phase), b), s)
    return frozen(v / np.linalg.norm(v))


def bell_basis(s: int) -> np.ndarray:
    return frozen(np.stack([bell_state(s, lab.phase, lab.number) for lab in iter_labels(s)]))


def _reflect_second(vec, s: int) -> np.ndarray:
    psi = np.asarray(vec).reshape(s, s)
    return psi[:, (-np.arange(s)) % s].reshape(s * s)


def dual_channel_state(s: int) -> np.ndarray:
    s = check_dim(s)
    return frozen(np.eye(s, dtype=np.complex128).reshape(s * s) / np.sqrt(s))


def dual_bell_state(s: int, phase: int, number: int) -> np.ndarray:
    """Common eigenstate of phase-sum (eigenvalue ``2 pi phase / s``) and number-difference.

    Equals ``sum_a exp(-i a theta) |a> (x) |a - number> / sqrt(s)``.
    """
    return frozen(_reflect_second(bell_state(s, phase, number), s))


def dual_bell_basis(s: int) -> np.ndarray:
    return frozen(np.stack([dual_bell_state(s, lab.phase, lab.number) for lab in iter_labels(s)]))


def clock_shift_family(s: int) -> tuple[np.ndarray, ...]:
    """``O_kl = exp_phase_op(s, k) @ exp_number_op(s, l)`` in ``(k, l)`` lexicographic order."""
    s = check_dim(s)
    return tuple(frozen(exp_phase_op(s, k) @ exp_number_op(s, l)) for k in range(s) for l in range(s))


def check_family(family: Sequence[np.ndarray], s: int, tol: float = SCHEME_TOL) -> float:
    """Return the max deviation of ``Tr(O_i O_j^dagger)`` from ``s delta_ij``.

    Raises :class:`FamilyNormalizationError` above ``tol``.
    """
    ops = np.asarray(family, dtype=np.complex128)
    if ops.shape != (s * s, s, s):
        raise DimensionMismatch(f"expected {s * s} operators of shape ({s}, {s}), got {ops.shape}")
    flat = ops.reshape(s * s, s * s)
    traces = flat @ flat.conj().T  # Tr(O_i O_j^dagger) = <vec O_j, vec O_i>
    dev = float(np.max(np.abs(traces - s * np.eye(s * s))))
    if dev > tol:
        raise FamilyNormalizationError(f"family normalization deviates by {dev:.3e}")
    return dev


@dataclass(frozen=True)
class GeneralScheme:
    """Channel deformation ``t`` plus measurement family, validated on construction.

    ``t`` acts on the receiving system and must satisfy ``Tr(t^dagger t) = s``;
    it need not be unitary, which is what makes broken schemes expressible.
    """

    s: int
    t: np.ndarray
    family: tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self):
        s = check_dim(self.s)
        t = operator(self.t)
        if t.shape != (s, s):
            raise DimensionMismatch(f"T must be {s}x{s}, got {t.shape}")
        tr = float(np.real(np.trace(t.conj().T @ t)))
        if abs(tr - s) > SCHEME_TOL:
            raise NormalizationViolation(f"Tr(T^dagger T) = {tr!r}, expected {s}")
        family = tuple(operator(o) for o in self.family) if self.family else clock_shift_family(s)
        check_family(family, s)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "family", family)

    @property
    def reliable(self) -> bool:
        return is_unitary(self.t, RELIABLE_TOL) and all(is_unitary(o, RELIABLE_TOL) for o in self.family)

    def measurement_op(self, k: int, l: int) -> np.ndarray:
        return self.family[check_label(self.s, k) * self.s + check_label(self.s, l)]


def general_channel_state(scheme: GeneralScheme | np.ndarray) -> np.ndarray:
    """``(T (x) I) |Psi>`` with ``|Psi> = sum_m |m>|m> / sqrt(s)``."""
    if isinstance(scheme, GeneralScheme):
        t = scheme.t
    else:
        t = operator(scheme)
    s = t.shape[0]
    tr = float(np.real(np.trace(t.conj().T @ t)))
    if abs(tr - s) > TRACE_TOL:
        raise NormalizationViolation(f"Tr(T^dagger T) = {tr!r}, expected {s}")
    v = (t / np.sqrt(s)).reshape(s * s)
    return frozen(v)


def general_bell_basis(scheme: GeneralScheme | Sequence[np.ndarray]) -> np.ndarray:
    """States ``|k;l> = sum_m |m> (x) O_kl |m> / sqrt(s)``; raises :class:`NotOrthonormal`."""
    family = scheme.family if isinstance(scheme, GeneralScheme) else scheme
    ops = np.asarray(family, dtype=np.complex128)
    s = ops.shape[-1]
    if ops.shape != (s * s, s, s):
        raise DimensionMismatch(f"expected {s * s} operators of shape ({s}, {s}), got {ops.shape}")
    # amplitude (m, c) of |k;l> is <c|O_kl|m> / sqrt(s)
    states = np.transpose(ops, (0, 2, 1)).reshape(s * s, s * s) / np.sqrt(s)
    dev = gram_deviation(states)
    if dev > GRAM_TOL:
        raise NotOrthonormal(f"basis Gram matrix deviates from identity by {dev:.3e}")
    return frozen(states)


def gram_deviation(states) -> float:
    v = np.asarray(states)
    return float(np.max(np.abs(v.conj() @ v.T - np.eye(v.shape[0]))))


def completeness_deviation(states) -> float:
    v = np.asarray(states)
    return float(np.max(np.abs(v.T @ v.conj() - np.eye(v.shape[1]))))


def channel_operator(state, s: int) -> np.ndarray:
    """Deformation ``T`` with ``(T (x) I)|Psi> = state``: ``sqrt(s)`` times the amplitude matrix."""
    v = np.asarray(state, dtype=np.complex128)
    if v.shape != (s * s,):
        raise DimensionMismatch(f"expected a state of dim {s * s}, got shape {v.shape}")
    return frozen(np.sqrt(s) * v.reshape(s, s))


def measurement_operator(basis_state, s: int) -> np.ndarray:
    """Operator ``O`` with ``basis_state = sum_m |m> (x) O|m> / sqrt(s)``."""
    v = np.asarray(basis_state, dtype=np.complex128)
    if v.shape != (s * s,):
        raise DimensionMismatch(f"expected a state of dim {s * s}, got shape {v.shape}")
    return frozen(np.sqrt(s) * v.reshape(s, s).T)


def schmidt_coefficients(state, s: int) -> np.ndarray:
    return np.linalg.svd(np.asarray(state, dtype=np.complex128).reshape(s, s), compute_uv=False)


def rescale_to_trace(t) -> np.ndarray:
    """Scale ``t`` so that ``Tr(t^dagger t)`` equals its dimension."""
    t = operator(t)
    s = t.shape[0]
    return frozen(t * np.sqrt(s / np.real(np.trace(t.conj().T @ t))))


@dataclass(frozen=True)
class ChannelValidity:
    dim: int
    trace: float
    inverse_trace: float | None
    gap: float | None
    trace_ok: bool
    singular: bool
    unitary: bool

    @property
    def reliable(self) -> bool:
        return self.trace_ok and self.unitary and not self.singular

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "trace": self.trace,
            "inverse_trace": self.inverse_trace,
            "gap": self.gap,
            "trace_ok": self.trace_ok,
            "singular": self.singular,
            "unitary": self.unitary,
            "reliable": self.reliable,
        }


def channel_validity(t) -> ChannelValidity:
    """Audit a channel deformation: ``Tr(T^dagger T)``, ``Tr((T^dagger T)^-1)`` and the gap to ``s``.

    A singular ``T`` is reported with ``singular=True`` and no inverse trace
    instead of raising, so sweeps over broken deformations keep going.
    """
    t = operator(t)
    s = t.shape[0]
    gram = t.conj().T @ t
    tr = float(np.real(np.trace(gram)))
    sv = np.linalg.svd(t, compute_uv=False)
    singular = bool(sv[-1] <= 1e-12 * max(sv[0], 1.0))
    if singular:
        inv_tr = gap = None
    else:
        inv_tr = float(np.sum(1.0 / sv**2))
        gap = inv_tr - s
    return ChannelValidity(
        dim=s,
        trace=tr,
        inverse_trace=inv_tr,
        gap=gap,
        trace_ok=abs(tr - s) <= TRACE_TOL,
        singular=singular,
        unitary=is_unitary(t, RELIABLE_TOL),
    )
