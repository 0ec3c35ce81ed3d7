"""Teleportation of s-level quantum systems built from phase/number canonical pairs."""

__version__ = "0.1.0"

from .channels import (
    BellLabel,
    GeneralScheme,
    bell_basis,
    bell_state,
    channel_validity,
    clock_shift_family,
    dual_bell_basis,
    dual_bell_state,
    dual_channel_state,
    general_bell_basis,
    general_channel_state,
)
from .errors import QuditportError, UnreliableScheme
from .linalg import dagger, fidelity, is_unitary, kron, trace
from .observables import (
    exp_number_op,
    exp_phase_op,
    number_state,
    number_sum_observable,
    phase_difference_observable,
    phase_state,
    weyl_commutator,
)
from .protocol import TeleportReport, TeleportRun, recovery_operator, run_teleport

__all__ = [
    "BellLabel", "GeneralScheme", "bell_basis", "bell_state", "channel_validity",
    "clock_shift_family", "dual_bell_basis", "dual_bell_state", "dual_channel_state",
    "general_bell_basis", "general_channel_state", "QuditportError", "UnreliableScheme",
    "dagger", "fidelity", "is_unitary", "kron", "trace", "exp_number_op", "exp_phase_op",
    "number_state", "number_sum_observable", "phase_difference_observable", "phase_state",
    "weyl_commutator", "TeleportReport", "TeleportRun", "recovery_operator", "run_teleport",
]
