"""Linear-optics analysis of polarization x path hyperentangled Bell states."""

from .bellstates import ALL_LABELS, BellLabel, hyper_bell, starred_state
from .fock import TwoPhotonState, apply_unitary, inner, state_from_w

__all__ = [
    "ALL_LABELS",
    "BellLabel",
    "TwoPhotonState",
    "apply_unitary",
    "hyper_bell",
    "inner",
    "starred_state",
    "state_from_w",
]
