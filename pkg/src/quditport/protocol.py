"""End-to-end teleportation of an s-level state from system C to system A.

Systems are ordered A (x) B (x) C. A and B share the channel state, C holds
the unknown input. A joint measurement on B, C in a maximally entangled
basis yields one of ``s**2`` labels; A's conditional state is then corrected
by a label-dependent unitary.

Schemes:

``standard``
    Channel and measurement are phase-difference / number-sum eigenstates.
    Recovery is ``exp(-i n_BC theta_AB) X^(-n_AC) Z^(k_AC)`` with
    ``k_AC = k_AB + k_BC`` and ``n_AC = n_AB - n_BC`` (mod s), where ``X`` and
    ``Z`` are ``exp_phase_op`` and ``exp_number_op``.
``dual``
    Channel and measurement are phase-sum / number-difference eigenstates.
    The recovery has the same form with the reflected addition rules
    ``k_AC = k_AB - k_BC`` and ``n_AC = n_AB + n_BC``.
``general``
    Channel ``(T (x) I)|Psi>`` and basis ``|k;l>`` built from a family
    ``O_kl``; recovery is ``O_kl T^dagger``.

Any channel may be paired with any implemented measurement basis; mixed
pairings recover through the general ``O T^dagger`` rule, with ``T`` and ``O``
read off the channel and basis states.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .channels import (
    GRAM_TOL,
    RELIABLE_TOL,
    BellLabel,
    GeneralScheme,
    bell_basis,
    bell_state,
    channel_operator,
    clock_shift_family,
    dual_bell_basis,
    dual_bell_state,
    general_bell_basis,
    general_channel_state,
    gram_deviation,
    measurement_operator,
)
from .errors import DimensionMismatch, NotOrthonormal, UnreliableScheme
from .linalg import (
    fidelity,
    frozen,
    is_unitary,
    ket,
    kron,
    operator_phase_distance,
    polar_unitary,
    roots_of_unity,
)
from .observables import check_dim, exp_number_op, exp_phase_op

__all__ = [
    "SCHEMES", "TeleportRun", "Outcome", "OutcomeRecord", "TeleportReport",
    "assemble_total_state", "measure_BC", "recovery_operator",
    "dual_recovery_operator", "general_recovery", "polar_recovery",
    "rule_recovery", "channel_state_for", "measurement_basis_for",
    "recovery_crosscheck", "rng_streams", "run_teleport",
]

SCHEMES = ("standard", "dual", "general")
Scheme = Literal["standard", "dual", "general"]

ZERO_PROBABILITY = 1e-14
FIDELITY_TOL = 1e-9


def rng_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (input-state, measurement-sampling) generators split from one seed."""
    a, b = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(a), np.random.default_rng(b)


@dataclass(frozen=True)
class TeleportRun:
    s: int
    scheme: Scheme
    input_state: np.ndarray
    channel: BellLabel | GeneralScheme
    seed: int = 0
    measurement: Scheme | None = None

    def __post_init__(self):
        check_dim(self.s)
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.measurement is not None and self.measurement not in SCHEMES:
            raise ValueError(f"unknown measurement basis {self.measurement!r}")
        phi = ket(self.input_state, tol=1e-10)
        if phi.shape != (self.s,):
            raise DimensionMismatch(f"input state must have dim {self.s}, got {phi.shape[0]}")
        object.__setattr__(self, "input_state", phi)
        if self.scheme == "general":
            if not isinstance(self.channel, GeneralScheme):
                raise TypeError("the general scheme needs a GeneralScheme channel")
        elif not isinstance(self.channel, BellLabel):
            raise TypeError(f"the {self.scheme} scheme needs a BellLabel channel")
        if self.channel.s != self.s:
            raise DimensionMismatch("channel dimension differs from run dimension")

    @property
    def measurement_basis(self) -> Scheme:
        return self.measurement or self.scheme


@dataclass(frozen=True)
class Outcome:
    label: BellLabel
    probability: float
    post_state: np.ndarray | None


@dataclass(frozen=True)
class OutcomeRecord:
    label: BellLabel
    probability: float
    post_state: np.ndarray | None
    recovery: np.ndarray
    recovered: np.ndarray | None
    fidelity: float | None
    count: int | None = None


def assemble_total_state(channel, input_state) -> np.ndarray:
    """``channel (x) input`` in A (x) B (x) C order."""
    channel = np.asarray(channel)
    phi = np.asarray(input_state)
    s = phi.shape[0]
    if channel.shape != (s * s,):
        raise DimensionMismatch(f"channel dim {channel.shape} does not match input dim {s}")
    return kron(channel, phi)


def measure_BC(total, basis) -> list[Outcome]:
    """Project B, C of ``total`` onto each basis state, by contraction over the B, C indices.

    ``basis`` is an ``(s*s, s*s)`` array of B (x) C states in label order. The
    returned outcomes carry the exact probability and A's normalized
    conditional state (``None`` when the outcome is impossible).
    """
    basis = np.asarray(basis, dtype=np.complex128)
    total = np.asarray(total, dtype=np.complex128)
    n = basis.shape[0]
    s = int(round(np.sqrt(n)))
    if basis.shape != (s * s, s * s) or total.shape != (s**3,):
        raise DimensionMismatch(f"basis {basis.shape} and total state {total.shape} do not fit together")
    dev = gram_deviation(basis)
    if dev > GRAM_TOL:
        raise NotOrthonormal(f"measurement basis Gram deviation {dev:.3e}")
    # unnormalized A vectors: <beta|_BC |Phi>, shape (outcomes, s)
    conditional = basis.conj() @ total.reshape(s, s * s).T
    outcomes = []
    for i, vec in enumerate(conditional):
        p = float(np.real(np.vdot(vec, vec)))
        post = frozen(vec / np.sqrt(p)) if p > ZERO_PROBABILITY else None
        outcomes.append(Outcome(BellLabel(s, *divmod(i, s)), p, post))
    return outcomes


def _translation_recovery(s: int, k_ac: int, n_ac: int, n_bc: int, k_ab: int) -> np.ndarray:
    prefactor = roots_of_unity(s)[(-n_bc * k_ab) % s]
    return frozen(prefactor * (exp_phase_op(s, -n_ac) @ exp_number_op(s, k_ac)))


def recovery_operator(s: int, channel: BellLabel, outcome: BellLabel) -> np.ndarray:
    """Standard-scheme recovery ``exp(-i n_BC theta_AB) exp(-i n_AC P) exp(i theta_AC N)``."""
    k_ac = (channel.phase + outcome.phase) % s
    n_ac = (channel.number - outcome.number) % s
    return _translation_recovery(s, k_ac, n_ac, outcome.number, channel.phase)


def dual_recovery_operator(s: int, channel: BellLabel, outcome: BellLabel) -> np.ndarray:
    """Dual-scheme recovery: same operator form, reflected label arithmetic.

    With phase-sum labels, ``theta_AC = theta_AB - theta_BC`` is the A-C phase
    difference; with number-difference labels, ``n_AC = n_AB + n_BC``.
    """
    k_ac = (channel.phase - outcome.phase) % s
    n_ac = (channel.number + outcome.number) % s
    return _translation_recovery(s, k_ac, n_ac, outcome.number, channel.phase)


def general_recovery(scheme: GeneralScheme, k: int, l: int) -> np.ndarray:
    """``O_kl T^dagger``; raises :class:`UnreliableScheme` unless T and every O_kl are unitary."""
    if not scheme.reliable:
        raise UnreliableScheme("recovery O_kl T^dagger is exact only when T and every O_kl are unitary")
    return frozen(scheme.measurement_op(k, l) @ scheme.t.conj().T)


def polar_recovery(scheme: GeneralScheme, k: int, l: int) -> np.ndarray:
    """Best-effort unitary recovery ``O_kl U^dagger`` with ``U`` the polar factor of T."""
    return frozen(scheme.measurement_op(k, l) @ polar_unitary(scheme.t).conj().T)


def rule_recovery(channel_state, basis_state, s: int, unitary_part: bool = False) -> np.ndarray:
    """General ``O T^dagger`` recovery with ``T`` and ``O`` read off the two states."""
    t = channel_operator(channel_state, s)
    if unitary_part:
        t = polar_unitary(t)
    return frozen(measurement_operator(basis_state, s) @ t.conj().T)


def channel_state_for(run: TeleportRun) -> np.ndarray:
    if run.scheme == "standard":
        return bell_state(run.s, run.channel.phase, run.channel.number)
    if run.scheme == "dual":
        return dual_bell_state(run.s, run.channel.phase, run.channel.number)
    return general_channel_state(run.channel)


def measurement_basis_for(run: TeleportRun) -> np.ndarray:
    basis = run.measurement_basis
    if basis == "standard":
        return bell_basis(run.s)
    if basis == "dual":
        return dual_bell_basis(run.s)
    if isinstance(run.channel, GeneralScheme):
        return general_bell_basis(run.channel)
    return general_bell_basis(clock_shift_family(run.s))


def _is_reliable(run: TeleportRun, channel_state) -> bool:
    if run.scheme == "general" and run.measurement_basis == "general":
        return run.channel.reliable
    if run.scheme != "general":
        return True
    return is_unitary(channel_operator(channel_state, run.s), RELIABLE_TOL)


def _recoveries(run: TeleportRun, channel_state, basis, allow_unreliable: bool) -> list[np.ndarray]:
    s = run.s
    labels = [BellLabel(s, *divmod(i, s)) for i in range(s * s)]
    reliable = _is_reliable(run, channel_state)
    if not reliable and not allow_unreliable:
        raise UnreliableScheme(f"{run.scheme} channel with {run.measurement_basis} measurement is not reliable")
    if run.scheme == run.measurement_basis:
        if run.scheme == "standard":
            return [recovery_operator(s, run.channel, lab) for lab in labels]
        if run.scheme == "dual":
            return [dual_recovery_operator(s, run.channel, lab) for lab in labels]
        rec = general_recovery if reliable else polar_recovery
        return [rec(run.channel, lab.phase, lab.number) for lab in labels]
    return [rule_recovery(channel_state, b, s, unitary_part=not reliable) for b in basis]


def recovery_crosscheck(s: int, scheme: Scheme, channel: BellLabel, literal: bool = False) -> float:
    """Max phase-insensitive distance between the closed-form recovery and the ``O T^dagger`` rule.

    With ``literal=True`` the dual scheme is checked against the standard
    label arithmetic instead of the reflected one.
    """
    if scheme == "standard":
        state, basis, closed = bell_state(s, channel.phase, channel.number), bell_basis(s), recovery_operator
    elif scheme == "dual":
        state, basis = dual_bell_state(s, channel.phase, channel.number), dual_bell_basis(s)
        closed = recovery_operator if literal else dual_recovery_operator
    else:
        raise ValueError("closed-form recoveries exist only for the standard and dual schemes")
    worst = 0.0
    for i, b in enumerate(basis):
        lab = BellLabel(s, *divmod(i, s))
        worst = max(worst, operator_phase_distance(closed(s, channel, lab), rule_recovery(state, b, s)))
    return worst


@dataclass(frozen=True)
class TeleportReport:
    s: int
    scheme: str
    measurement: str
    channel: dict
    seed: int
    mode: str
    trials: int | None
    reliable: bool
    input_state: np.ndarray
    records: tuple[OutcomeRecord, ...]
    min_fidelity: float | None
    mean_fidelity: float | None
    max_probability_deviation: float
    max_frequency_deviation: float | None
    recovery_crosscheck: float | None

    @property
    def passed(self) -> bool:
        return self.min_fidelity is not None and self.min_fidelity >= 1 - FIDELITY_TOL

    def to_dict(self) -> dict:
        outcomes = []
        for r in self.records:
            rec = {"label": r.label.as_list(), "probability": r.probability, "fidelity": r.fidelity}
            if r.count is not None:
                rec["count"] = r.count
                rec["frequency"] = r.count / self.trials
            outcomes.append(rec)
        return {
            "scheme": self.scheme,
            "measurement": self.measurement,
            "dim": self.s,
            "channel": self.channel,
            "seed": self.seed,
            "mode": self.mode,
            "trials": self.trials,
            "reliable": self.reliable,
            "input_state": {
                "dim": self.s,
                "re": [float(x) for x in self.input_state.real],
                "im": [float(x) for x in self.input_state.imag],
            },
            "outcomes": outcomes,
            "aggregates": {
                "min_fidelity": self.min_fidelity,
                "mean_fidelity": self.mean_fidelity,
                "max_probability_deviation": self.max_probability_deviation,
                "max_frequency_deviation": self.max_frequency_deviation,
                "recovery_crosscheck": self.recovery_crosscheck,
            },
        }


def _channel_description(run: TeleportRun) -> dict:
    if isinstance(run.channel, BellLabel):
        return {"phase": run.channel.phase, "number": run.channel.number}
    t = run.channel.t
    return {"t": {"dim": run.s, "re": t.real.ravel().tolist(), "im": t.imag.ravel().tolist()}}


def run_teleport(
    run: TeleportRun,
    trials: int | None = None,
    allow_unreliable: bool = False,
) -> TeleportReport:
    """Run one teleportation experiment.

    With ``trials=None`` every outcome is enumerated with its exact
    probability. Otherwise ``trials`` labels are drawn from the outcome
    distribution with a generator seeded from ``run.seed``, and the receiver
    applies the recovery for each drawn label.

    Unreliable schemes raise :class:`UnreliableScheme` unless
    ``allow_unreliable`` is set, in which case the unitary (polar) part of the
    channel deformation is used for recovery and the loss shows up in the
    fidelities.
    """
    s = run.s
    phi = run.input_state
    channel_state = channel_state_for(run)
    basis = measurement_basis_for(run)
    reliable = _is_reliable(run, channel_state)
    recoveries = _recoveries(run, channel_state, basis, allow_unreliable)
    outcomes = measure_BC(assemble_total_state(channel_state, phi), basis)

    records = []
    for out, rec in zip(outcomes, recoveries):
        if out.post_state is None:
            records.append(OutcomeRecord(out.label, out.probability, None, rec, None, None))
            continue
        recovered = rec @ out.post_state
        records.append(
            OutcomeRecord(out.label, out.probability, out.post_state, rec, frozen(recovered), fidelity(phi, recovered))
        )

    probs = np.array([r.probability for r in records])
    max_pdev = float(np.max(np.abs(probs - 1.0 / s**2)))
    possible = [r for r in records if r.fidelity is not None]
    crosscheck = None
    if run.scheme != "general" and run.scheme == run.measurement_basis:
        crosscheck = recovery_crosscheck(s, run.scheme, run.channel)

    if trials is None:
        min_f = min(r.fidelity for r in possible) if possible else None
        mean_f = float(sum(r.probability * r.fidelity for r in possible)) if possible else None
        return TeleportReport(
            s, run.scheme, run.measurement_basis, _channel_description(run), run.seed, "exhaustive", None,
            reliable, phi, tuple(records), min_f, mean_f, max_pdev, None, crosscheck,
        )

    if trials < 1:
        raise ValueError("trials must be at least 1")
    _, sampler = rng_streams(run.seed)
    draws = sampler.choice(s * s, size=trials, p=probs / probs.sum())
    counts = np.bincount(draws, minlength=s * s)
    draw_fid = np.empty(trials)
    for j, i in enumerate(draws):
        # the receiver knows only the label; it applies that label's recovery to its own state
        recovered = recoveries[i] @ outcomes[i].post_state
        draw_fid[j] = fidelity(phi, recovered)
    records = [
        OutcomeRecord(r.label, r.probability, r.post_state, r.recovery, r.recovered, r.fidelity, int(c))
        for r, c in zip(records, counts)
    ]
    max_fdev = float(np.max(np.abs(counts / trials - 1.0 / s**2)))
    return TeleportReport(
        s, run.scheme, run.measurement_basis, _channel_description(run), run.seed, "sampled", trials,
        reliable, phi, tuple(records), float(draw_fid.min()), float(draw_fid.mean()), max_pdev, max_fdev,
        crosscheck,
    )
