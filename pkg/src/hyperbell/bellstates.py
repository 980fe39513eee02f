"""The 16 polarization x path hyperentangled Bell states and local operations.

Photon 1 occupies paths ``a``/``c`` and photon 2 paths ``b``/``d``.  Labels
are ordered pol-major, ``index = 4 * pol_index + mom_index`` with both
factors ordered ``(Phi+, Phi-, Psi+, Psi-)``, giving indices 0..15.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import fock
from .constants import PHASE_MATCH_TOL, UNITARY_TOL
from .fock import TwoPhotonState

POL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")
MOM_LABELS = ("phi+", "phi-", "psi+", "psi-")

_S2 = np.sqrt(2.0)
# coefficient matrices c[x1, x2] of (x1)_1 (x2)_2; rows/cols ordered (H, V) or (a|b, c|d)
_BELL_COEFFS = {
    0: np.array([[1, 0], [0, 1]]) / _S2,
    1: np.array([[1, 0], [0, -1]]) / _S2,
    2: np.array([[0, 1], [1, 0]]) / _S2,
    3: np.array([[0, 1], [-1, 0]]) / _S2,
}


class BellLabel(NamedTuple):
    pol: str
    mom: str

    @property
    def index(self) -> int:
        return 4 * POL_LABELS.index(self.pol) + MOM_LABELS.index(self.mom)

    @classmethod
    def from_index(cls, index: int) -> "BellLabel":
        if not 0 <= index < 16:
            raise ValueError(f"Bell index {index} outside 0..15")
        return cls(POL_LABELS[index // 4], MOM_LABELS[index % 4])

    @classmethod
    def parse(cls, text: str) -> "BellLabel":
        """Parse ``"Phi+*phi-"``."""
        try:
            pol, mom = text.strip().split("*")
        except ValueError:
            raise ValueError(f"bad Bell label {text!r}; expected e.g. 'Phi+*phi-'") from None
        if pol not in POL_LABELS or mom not in MOM_LABELS:
            raise ValueError(f"bad Bell label {text!r}")
        return cls(pol, mom)

    def __str__(self):
        return f"{self.pol}*{self.mom}"


ALL_LABELS = tuple(BellLabel.from_index(i) for i in range(16))


def parse_labels(text: str) -> list[BellLabel]:
    """Comma-separated labels, e.g. ``"Phi+*phi+,Psi-*psi-"``."""
    return [BellLabel.parse(t) for t in text.split(",") if t.strip()]


def bell_w(label: BellLabel) -> np.ndarray:
    """Symmetric 8x8 ``W`` of a hyper-Bell state (unit-norm state)."""
    p = POL_LABELS.index(label.pol)
    q = MOM_LABELS.index(label.mom)
    # photon-1 modes 1..4 and photon-2 modes 5..8 are both ordered (pol, path)
    block = np.kron(_BELL_COEFFS[p], _BELL_COEFFS[q]) / 2
    w = np.zeros((8, 8), dtype=complex)
    w[:4, 4:] = block
    w[4:, :4] = block.T
    return w


def hyper_bell(label: BellLabel) -> TwoPhotonState:
    return fock.state_from_w(bell_w(label))


def all_bell_states() -> list[TwoPhotonState]:
    return [hyper_bell(lab) for lab in ALL_LABELS]


def starred_state(pol: str) -> TwoPhotonState:
    """``Psi^+- (x) (a_1 c_2 - b_1 d_2) / sqrt(2)``.

    Photon 1 sits in path ``a`` or ``b`` and photon 2 in ``c`` or ``d``, so the
    state leaves the nominal one-photon-per-side arrangement.
    """
    if pol not in ("Psi+", "Psi-"):
        raise ValueError("starred states exist only for Psi+ and Psi-")
    sign = 1 if pol == "Psi+" else -1
    w = np.zeros((8, 8), dtype=complex)
    for (x1, x2), path_amp in ((("a", "c"), 1), (("b", "d"), -1)):
        for (p1, p2), pol_amp in ((("H", "V"), 1), (("V", "H"), sign)):
            k = fock.mode_index(p1, x1) - 1
            l = fock.mode_index(p2, x2) - 1
            w[k, l] += path_amp * pol_amp
    return fock.state_from_w(w)


def identify(state: TwoPhotonState, tol: float = PHASE_MATCH_TOL) -> BellLabel | None:
    """The Bell label equal to ``state`` up to a global phase, if any."""
    if state.n_modes != 8:
        return None
    for lab in ALL_LABELS:
        if abs(abs(fock.inner(hyper_bell(lab), state)) - 1) < tol:
            return lab
    return None


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class LocalOp:
    """Single-photon operation ``pol_action (x) path_action``.

    Matrices act on the photon's ``(H, V)`` and ``(a, c)`` / ``(b, d)``
    amplitudes.  Instances hash by identity so they can key dictionaries.
    """

    photon: int
    pol_action: np.ndarray
    path_action: np.ndarray
    name: str = ""

    def __repr__(self):
        return f"LocalOp({self.name or '?'} on photon {self.photon})"


def compile_local_op(op: LocalOp) -> np.ndarray:
    """8x8 mode unitary; identity outside the chosen photon's 4 modes."""
    if op.photon not in (1, 2):
        raise ValueError("photon must be 1 or 2")
    block = np.kron(np.asarray(op.pol_action, complex), np.asarray(op.path_action, complex))
    fock.check_unitary(block, UNITARY_TOL)
    u = np.eye(8, dtype=complex)
    sl = slice(0, 4) if op.photon == 1 else slice(4, 8)
    u[sl, sl] = block
    return u


def pauli_ops(photon: int = 1) -> list[LocalOp]:
    """The 16 Pauli x Pauli operations on one photon, named e.g. ``"XZ"``."""
    return [
        LocalOp(photon, PAULI[p], PAULI[q], name=p + q)
        for p in "IXYZ"
        for q in "IXYZ"
    ]


def local_orbit(start: BellLabel, ops: Iterable[LocalOp]) -> dict[LocalOp, BellLabel | None]:
    s = hyper_bell(start)
    return {op: identify(fock.apply_unitary(compile_local_op(op), s)) for op in ops}


def label_permutation(u) -> tuple[int, ...] | None:
    """Index permutation of the 16 labels induced by a mode unitary.

    Returns ``perm`` with ``u |label i> ~ |label perm[i]>`` up to phase, or
    None when some Bell state leaves the Bell basis.
    """
    perm = []
    for lab in ALL_LABELS:
        img = identify(fock.apply_unitary(u, hyper_bell(lab)))
        if img is None:
            return None
        perm.append(img.index)
    return tuple(perm)
