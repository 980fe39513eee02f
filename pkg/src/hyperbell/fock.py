"""Two-photon bosonic Fock space over a handful of optical modes.

A two-photon state is stored as a dense vector of amplitudes over the
occupation-number basis ``|n_1, ..., n_D>`` with ``sum(n) == 2``.  The basis
is ordered lexicographically on the occupation tuples, so for the 8-mode
core the 36 basis states run from ``(0, ..., 0, 2)`` to ``(2, 0, ..., 0)``.

Equivalently a state is ``sum_ij W_ij c_i^dag c_j^dag |0>`` for a complex
symmetric matrix ``W``; both pictures are exposed here and converting
between them is exact:

* one photon in each of modes ``k != l`` has amplitude ``2 W_kl``,
* two photons in mode ``k`` have amplitude ``sqrt(2) W_kk``.

Mode indices in the public API are 1-based to match the physical labelling
(``1 = H a``, ``2 = H c``, ``3 = V a``, ``4 = V c``, ``5 = H b``, ``6 = H d``,
``7 = V b``, ``8 = V d``); arrays are of course 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .constants import RANK_TOL, UNITARY_TOL

N_MODES = 8

#: (polarization, path) for modes 1..8.
MODE_TABLE = (
    ("H", "a"),
    ("H", "c"),
    ("V", "a"),
    ("V", "c"),
    ("H", "b"),
    ("H", "d"),
    ("V", "b"),
    ("V", "d"),
)
PHOTON1_MODES = (1, 2, 3, 4)
PHOTON2_MODES = (5, 6, 7, 8)


def mode_index(pol: str, path: str) -> int:
    """1-based mode number of polarization ``pol`` on ``path``."""
    try:
        return MODE_TABLE.index((pol, path)) + 1
    except ValueError:
        raise ValueError(f"no mode ({pol!r}, {path!r})") from None


def mode_label(index: int) -> tuple[str, str]:
    if not 1 <= index <= N_MODES:
        raise ValueError(f"mode index {index} outside 1..{N_MODES}")
    return MODE_TABLE[index - 1]


def fock_basis(n_modes: int = N_MODES) -> list[tuple[int, ...]]:
    """All two-photon occupation vectors over ``n_modes``, lexicographic."""
    occ = []
    for k, l in combinations_with_replacement(range(n_modes), 2):
        n = [0] * n_modes
        n[k] += 1
        n[l] += 1
        occ.append(tuple(n))
    return sorted(occ)


def _pair_tables(n_modes: int):
    """Row/column mode of every basis state, in basis order."""
    basis = fock_basis(n_modes)
    rows = np.empty(len(basis), dtype=np.intp)
    cols = np.empty(len(basis), dtype=np.intp)
    for idx, occ in enumerate(basis):
        occupied = [m for m, n in enumerate(occ) for _ in range(n)]
        rows[idx], cols[idx] = occupied
    return rows, cols


def basis_dim(n_modes: int) -> int:
    return n_modes * (n_modes + 1) // 2


def _modes_for_dim(dim: int) -> int:
    n = int(round((np.sqrt(8 * dim + 1) - 1) / 2))
    if basis_dim(n) != dim:
        raise ValueError(f"{dim} is not a two-photon basis dimension")
    return n


_ROWS, _COLS = _pair_tables(N_MODES)


def _tables(n_modes: int):
    if n_modes == N_MODES:
        return _ROWS, _COLS
    return _pair_tables(n_modes)


def pair_modes(n_modes: int = N_MODES) -> tuple[np.ndarray, np.ndarray]:
    """0-based modes ``(k, l)``, ``k <= l``, of each basis state in order."""
    rows, cols = _tables(n_modes)
    return rows.copy(), cols.copy()


def basis_index(modes: tuple[int, int], n_modes: int = N_MODES) -> int:
    """Position of the basis state with photons in the two (1-based) modes."""
    k, l = sorted(modes)
    occ = [0] * n_modes
    occ[k - 1] += 1
    occ[l - 1] += 1
    return fock_basis(n_modes).index(tuple(occ))


@dataclass(frozen=True, eq=False)
class TwoPhotonState:
    """Amplitude vector over the two-photon Fock basis.

    ``raw_norm`` is the norm the state had before normalization when it was
    built by :func:`state_from_w`; it is 1 for states built from already
    normalized data.
    """

    amplitudes: np.ndarray
    raw_norm: float = 1.0
    n_modes: int = field(init=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n_modes", _modes_for_dim(amps.size))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def w(self) -> np.ndarray:
        return w_from_state(self)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, modes: tuple[int, int]) -> complex:
        return complex(self.amplitudes[basis_index(modes, self.n_modes)])

    def to_json(self) -> list[list[float]]:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]

    @classmethod
    def from_json(cls, data) -> "TwoPhotonState":
        arr = np.asarray(data, dtype=float)
        return cls(arr[:, 0] + 1j * arr[:, 1])

    def __repr__(self):
        nz = np.flatnonzero(np.abs(self.amplitudes) > 1e-12)
        return f"TwoPhotonState(n_modes={self.n_modes}, support={nz.size}, norm={self.norm:.6g})"


def symmetrize(w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("W must be a square matrix")
    return (w + w.T) / 2


def amplitudes_from_w(w) -> np.ndarray:
    """Unnormalized amplitude vector of ``sum_ij W_ij c_i^dag c_j^dag |0>``."""
    w = symmetrize(w)
    rows, cols = _tables(w.shape[0])
    scale = np.where(rows == cols, np.sqrt(2.0), 2.0)
    return scale * w[rows, cols]


def state_from_w(w, normalize: bool = True) -> TwoPhotonState:
    """Build the state ``sum_ij W_ij c_i^dag c_j^dag |0>``.

    ``W`` is symmetrized first.  The result is normalized unless
    ``normalize`` is false; either way ``raw_norm`` holds the norm of the
    unnormalized vector.
    """
    amps = amplitudes_from_w(w)
    nrm = float(np.linalg.norm(amps))
    if nrm == 0.0:
        raise ValueError("null state")
    if normalize:
        amps = amps / nrm
    return TwoPhotonState(amps, raw_norm=nrm)


def w_from_state(s: TwoPhotonState) -> np.ndarray:
    """Symmetric ``W`` with ``state_from_w(W, normalize=False)`` equal to ``s``."""
    n = s.n_modes
    rows, cols = _tables(n)
    scale = np.where(rows == cols, 1 / np.sqrt(2.0), 0.5)
    w = np.zeros((n, n), dtype=complex)
    vals = scale * s.amplitudes
    w[rows, cols] = vals
    w[cols, rows] = vals
    return w


def inner(x: TwoPhotonState, y: TwoPhotonState) -> complex:
    """``<x|y>``, antilinear in ``x``."""
    return complex(np.vdot(x.amplitudes, y.amplitudes))


def unitarity_deviation(u) -> float:
    u = np.asarray(u, dtype=complex)
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("mode unitary must be square")
    dev = unitarity_deviation(u)
    if dev > tol:
        raise ValueError(f"matrix is not unitary (deviation {dev:.3g} > {tol:g})")
    return u


def apply_unitary(u, s: TwoPhotonState) -> TwoPhotonState:
    """Evolve ``s`` under the mode map ``c_j^dag -> sum_i U_ij c_i^dag``."""
    u = check_unitary(u)
    if u.shape[0] != s.n_modes:
        raise ValueError(f"unitary acts on {u.shape[0]} modes, state has {s.n_modes}")
    w = s.w
    return TwoPhotonState(amplitudes_from_w(u @ w @ u.T), raw_norm=s.raw_norm)


def number_matrix(x: TwoPhotonState, y: TwoPhotonState) -> np.ndarray:
    """Matrix ``M_kl = <x| c_k^dag c_l |y>``.

    For ``c_s = sum_k v_k c_k`` this gives ``<x|c_s^dag c_s|y> = v^dag M v``.
    """
    # c_l |y> is the one-photon vector 2 W^y[l, :]
    return 4.0 * (x.w.conj() @ y.w.T)


def schmidt_coefficients(s: TwoPhotonState, cut=(PHOTON1_MODES, PHOTON2_MODES)) -> np.ndarray:
    """Singular values of the amplitude matrix across a photon-sector cut."""
    left, right = (tuple(m - 1 for m in side) for side in cut)
    w = s.w
    inside = w.copy()
    inside[np.ix_(left, right)] = 0
    inside[np.ix_(right, left)] = 0
    if np.abs(inside).max() > 1e-12:
        raise ValueError("not in one-photon-per-side sector")
    return np.linalg.svd(2 * w[np.ix_(left, right)], compute_uv=False)


def schmidt_rank(s: TwoPhotonState, cut=(PHOTON1_MODES, PHOTON2_MODES), tol: float = RANK_TOL) -> int:
    """Number of Schmidt coefficients above ``tol`` across the photon cut.

    The amplitude matrix has entry ``(i, j)`` equal to the amplitude of one
    photon in ``cut[0][i]`` and one in ``cut[1][j]``.
    """
    return int(np.count_nonzero(schmidt_coefficients(s, cut) > tol))
