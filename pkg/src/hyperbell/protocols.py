"""Superdense coding, fingerprinting and teleportation on top of the KW analyzer."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from . import circuits, fock
from .bellstates import (
    BellLabel,
    LocalOp,
    compile_local_op,
    hyper_bell,
    local_orbit,
    pauli_ops,
)
from .circuits import CircuitConfig

SHARED_STATE = BellLabel("Psi-", "psi-")
#: messages 0..6 in the order the shared state is usually transformed
PREFERRED_TARGETS = tuple(
    BellLabel.parse(s)
    for s in ("Psi-*psi-", "Phi+*phi+", "Phi-*phi+", "Psi+*phi+", "Psi-*phi+", "Phi-*psi-", "Phi-*psi+")
)


def _kw_named():
    cfg = circuits.kw_reference_config()
    part = circuits.partition_states(cfg)
    return cfg, part.named(circuits.class_names(part, circuits.golden_table(1)))


# superdense coding ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CodebookEntry:
    message: int
    op: LocalOp
    label: BellLabel
    class_name: str


@dataclass(frozen=True)
class DenseCodebook:
    shared_state: BellLabel
    entries: tuple
    preferred: bool  # True when the targets are PREFERRED_TARGETS

    @property
    def capacity_bits(self) -> float:
        return math.log2(len(self.entries))

    def decode(self, class_name: str) -> int:
        for e in self.entries:
            if e.class_name == class_name:
                return e.message
        raise KeyError(f"class {class_name} carries no message")

    def to_json(self) -> dict:
        return {
            "shared_state": str(self.shared_state),
            "preferred_targets": self.preferred,
            "capacity_bits": self.capacity_bits,
            "entries": [
                {"message": e.message, "op": e.op.name, "photon": e.op.photon, "label": str(e.label), "class": e.class_name}
                for e in self.entries
            ],
        }


def _ops_reaching(start: BellLabel, photon: int) -> dict[BellLabel, LocalOp]:
    """First Pauli op (in ``pauli_ops`` order) reaching each label."""
    out: dict[BellLabel, LocalOp] = {}
    for op, lab in local_orbit(start, pauli_ops(photon)).items():
        if lab is not None and lab not in out:
            out[lab] = op
    return out


def build_codebook(photon: int = 1) -> DenseCodebook:
    """Seven photon-local Pauli ops taking the shared state into seven distinct classes."""
    _, part = _kw_named()
    reach = _ops_reaching(SHARED_STATE, photon)

    def entries_for(targets):
        return tuple(
            CodebookEntry(m, reach[lab], lab, part.names[part.class_index(lab)])
            for m, lab in enumerate(targets)
        )

    if all(lab in reach for lab in PREFERRED_TARGETS):
        book = DenseCodebook(SHARED_STATE, entries_for(PREFERRED_TARGETS), True)
    else:
        # one reachable label per class, lowest index first
        picks = {}
        for lab in sorted(reach, key=lambda x: x.index):
            picks.setdefault(part.class_index(lab), lab)
        book = DenseCodebook(SHARED_STATE, entries_for([picks[k] for k in sorted(picks)]), False)
    if len({e.class_name for e in book.entries}) != 7 or len(book.entries) != 7:
        raise RuntimeError("no codebook covering seven classes")
    return book


def encode(book: DenseCodebook, message: int):
    entry = book.entries[message]
    return fock.apply_unitary(compile_local_op(entry.op), hyper_bell(book.shared_state))


def _sample(dist: dict, rng: np.random.Generator):
    keys = list(dist)
    cdf = np.cumsum([dist[k] for k in keys])
    k = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return keys[min(k, len(keys) - 1)]


def dense_roundtrip(message: int, rng: np.random.Generator, book: DenseCodebook | None = None) -> int:
    """Encode, measure with the KW analyzer, decode from the class alone."""
    book = book or build_codebook()
    if not 0 <= message < len(book.entries):
        raise ValueError(f"message must be in 0..{len(book.entries) - 1}")
    cfg, part = _kw_named()
    sig = _sample(circuits.signature_distribution(encode(book, message), cfg), rng)
    k = part.class_of_signature(sig)
    if k is None:
        raise RuntimeError(f"signature {sig} outside every class")
    return book.decode(part.names[k])


def efficiency_crossover() -> dict:
    """Detector efficiency below which one hyperentangled pair beats two polarization pairs.

    Two figures, side by side: equating distinguishable outcomes per attempt,
    ``eta^2 * 7 = eta^4 * 9``, and equating expected bits per attempt,
    ``eta^2 log2 7 = eta^4 log2 9``.
    """
    return {
        "class_count_threshold": {"value": math.sqrt(7 / 9), "formula": "sqrt(7/9), from eta^2 * 7 = eta^4 * 9"},
        "bit_ratio_threshold": {
            "value": math.sqrt(math.log(7) / math.log(9)),
            "formula": "sqrt(log 7 / log 9), from eta^2 log2(7) = eta^4 log2(9)",
        },
        "bits_single_pair": math.log2(7),
        "bits_two_pairs": 2 * math.log2(3),
    }


# fingerprinting ------------------------------------------------------------------------------


@dataclass
class FingerprintScheme:
    alice: DenseCodebook
    bob_ops: tuple
    expected_class: str

    def state(self, m_a: int, m_b: int):
        u = compile_local_op(self.alice.entries[m_a].op) @ compile_local_op(self.bob_ops[m_b])
        return fock.apply_unitary(u, hyper_bell(self.alice.shared_state))


def fingerprint_scheme() -> FingerprintScheme:
    """Alice encodes with photon-1 ops; Bob uses photon-2 ops producing the same labels.

    With equal messages the two ops undo each other and the referee sees the
    shared state's class.
    """
    alice = build_codebook(1)
    reach2 = _ops_reaching(SHARED_STATE, 2)
    bob = tuple(reach2[e.label] for e in alice.entries)
    _, part = _kw_named()
    return FingerprintScheme(alice, bob, part.names[part.class_index(SHARED_STATE)])


def fingerprint_matrix(scheme: FingerprintScheme | None = None) -> np.ndarray:
    """Exact probability of the verdict "equal" for every message pair."""
    scheme = scheme or fingerprint_scheme()
    cfg, part = _kw_named()
    k = part.names.index(scheme.expected_class)
    sigs = part.classes[k].signatures
    n = len(scheme.alice.entries)
    out = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            dist = circuits.signature_distribution(scheme.state(a, b), cfg)
            out[a, b] = sum(p for s, p in dist.items() if s in sigs)
    return out


def fingerprint_run(m_a: int, m_b: int, rng: np.random.Generator, scheme: FingerprintScheme | None = None) -> str:
    scheme = scheme or fingerprint_scheme()
    cfg, part = _kw_named()
    sig = _sample(circuits.signature_distribution(scheme.state(m_a, m_b), cfg), rng)
    k = part.class_of_signature(sig)
    return "equal" if k is not None and part.names[k] == scheme.expected_class else "different"


# three-photon teleportation ------------------------------------------------------------------

#: Bob's modes, appended after the eight apparatus modes
BOB_MODES = (("H", "b"), ("H", "d"), ("V", "b"), ("V", "d"))
N_TELEPORT_MODES = 12


class ThreePhotonState:
    """``sum T_ijk c_i^dag c_j^dag c_k^dag |0>`` with a symmetric tensor ``T``."""

    def __init__(self, tensor: np.ndarray):
        t = np.asarray(tensor, dtype=complex)
        perms = (t, t.transpose(0, 2, 1), t.transpose(1, 0, 2), t.transpose(1, 2, 0), t.transpose(2, 0, 1), t.transpose(2, 1, 0))
        self.tensor = sum(perms) / 6
        self.n_modes = t.shape[0]

    @classmethod
    def product(cls, x: np.ndarray, pair_w: np.ndarray) -> "ThreePhotonState":
        """``(sum x_i c_i^dag)(sum W_jk c_j^dag c_k^dag)|0>``."""
        return cls(np.einsum("i,jk->ijk", x, pair_w))

    def basis(self):
        return list(combinations_with_replacement(range(self.n_modes), 3))

    def amplitude(self, modes) -> complex:
        i, j, k = sorted(modes)
        counts = np.unique([i, j, k], return_counts=True)[1]
        return complex(6 * self.tensor[i, j, k] / math.sqrt(math.prod(math.factorial(c) for c in counts)))

    def amplitudes(self) -> np.ndarray:
        return np.array([self.amplitude(m) for m in self.basis()])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes()))

    def scaled(self, c: complex) -> "ThreePhotonState":
        return ThreePhotonState(self.tensor * c)

    def evolve(self, u: np.ndarray) -> "ThreePhotonState":
        u = fock.check_unitary(u)
        return ThreePhotonState(np.einsum("ai,bj,ck,ijk->abc", u, u, u, self.tensor))


def _teleport_input(alpha: complex, beta: complex) -> ThreePhotonState:
    """Input photon in path ``b`` of the apparatus plus the shared pair.

    The shared pair is Phi+ (x) phi+ between Alice's photon (apparatus paths
    ``a``/``c``) and Bob's photon (his own paths ``b``/``d``).
    """
    x = np.zeros(N_TELEPORT_MODES, dtype=complex)
    x[fock.mode_index("H", "b") - 1] = alpha
    x[fock.mode_index("V", "b") - 1] = beta
    w = np.zeros((N_TELEPORT_MODES, N_TELEPORT_MODES), dtype=complex)
    for pol in "HV":
        for mine, bobs in (("a", "b"), ("c", "d")):
            k = fock.mode_index(pol, mine) - 1
            l = 8 + BOB_MODES.index((pol, bobs))
            w[k, l] = w[l, k] = 0.25
    state = ThreePhotonState.product(x, w)
    return state.scaled(1 / state.norm)


def _extended_unitary(config: CircuitConfig) -> np.ndarray:
    u = np.eye(N_TELEPORT_MODES, dtype=complex)
    u[:8, :8] = circuits.compile(config)
    return u


def _bob_maps(config: CircuitConfig):
    """``(signature, Bob path) -> 2x2`` map from ``(alpha, beta)`` to Bob's (H, V) amplitudes."""
    u = _extended_unitary(config)
    outs = [_teleport_input(*e).evolve(u) for e in ((1, 0), (0, 1))]
    ports = config.port_names
    maps: dict = {}
    for k, l in combinations_with_replacement(range(8), 2):
        sig = tuple(sorted((ports[k], ports[l])))
        for path in ("b", "d"):
            m = np.zeros((2, 2), dtype=complex)
            for col, out in enumerate(outs):
                for row, pol in enumerate("HV"):
                    m[row, col] = out.amplitude((k, l, 8 + BOB_MODES.index((pol, path))))
            maps[(sig, path)] = m
    return maps


@dataclass
class CorrectionTable:
    #: (signature, Bob path) -> 2x2 unitary Bob applies
    corrections: dict
    #: (signature, Bob path) -> branch probability (independent of the input)
    weights: dict
    success_probability: float

    def to_json(self) -> list:
        rows = []
        for (sig, path), c in sorted(self.corrections.items()):
            rows.append({
                "signature": list(sig),
                "bob_path": path,
                "probability": self.weights[(sig, path)],
                "correction": [[[float(z.real), float(z.imag)] for z in row] for row in c],
            })
        return rows


def correction_table(config: CircuitConfig | None = None, tol: float = 1e-9) -> CorrectionTable:
    """Branches where Bob's photon is a fixed unitary image of the input, and its inverse.

    A branch succeeds when its map ``L`` satisfies ``L^dag L = p * 1`` with
    ``p > 0``; then ``p`` is its probability for every input and
    ``L^dag / sqrt(p)`` restores the input polarization.
    """
    config = config or circuits.kw_reference_config()
    corrections, weights = {}, {}
    for key, m in _bob_maps(config).items():
        g = m.conj().T @ m
        p = float(np.real(np.trace(g)) / 2)
        if p > tol and np.abs(g - p * np.eye(2)).max() < tol:
            corrections[key] = m.conj().T / math.sqrt(p)
            weights[key] = p
    return CorrectionTable(corrections, weights, float(sum(weights.values())))


@dataclass
class TeleportOutcome:
    signature: tuple
    bob_path: str
    success: bool
    correction: np.ndarray | None
    output: np.ndarray | None
    fidelity: float | None

    def to_json(self) -> dict:
        return {
            "signature": list(self.signature),
            "bob_path": self.bob_path,
            "success": self.success,
            "fidelity": self.fidelity,
        }


class Teleporter:
    """Branch maps and correction table for one analyzer, computed once."""

    def __init__(self, config: CircuitConfig | None = None):
        self.config = config or circuits.kw_reference_config()
        self.maps = _bob_maps(self.config)
        self.table = correction_table(self.config)
        self._keys = list(self.maps)
        self._stack = np.stack([self.maps[k] for k in self._keys])

    def teleport(self, alpha: complex, beta: complex, rng: np.random.Generator) -> TeleportOutcome:
        if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-9:
            raise ValueError("input polarization state must be normalized")
        vec = np.array([alpha, beta], dtype=complex)
        probs = np.sum(np.abs(self._stack @ vec) ** 2, axis=1)
        cdf = np.cumsum(probs)
        k = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), len(cdf) - 1)
        sig, path = self._keys[k]
        if (sig, path) not in self.table.corrections:
            return TeleportOutcome(sig, path, False, None, None, None)
        corr = self.table.corrections[(sig, path)]
        out = corr @ (self.maps[(sig, path)] @ vec)
        out = out / np.linalg.norm(out)
        return TeleportOutcome(sig, path, True, corr, out, float(abs(np.vdot(vec, out)) ** 2))


def teleport(alpha: complex, beta: complex, rng: np.random.Generator, teleporter: Teleporter | None = None) -> TeleportOutcome:
    """One teleportation attempt of ``alpha|H> + beta|V>`` through the KW analyzer."""
    return (teleporter or Teleporter()).teleport(alpha, beta, rng)


def random_qubit(rng: np.random.Generator) -> tuple[complex, complex]:
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    z /= np.linalg.norm(z)
    return complex(z[0]), complex(z[1])


# locality -----------------------------------------------------------------------------------


@dataclass
class LocalityReport:
    name: str
    local: bool
    photon1_outputs: list = field(default_factory=list)
    photon2_outputs: list = field(default_factory=list)

    def to_json(self) -> dict:
        return dict(self.__dict__)


def locality_audit(config: CircuitConfig, tol: float = 1e-12) -> LocalityReport:
    """Whether the two photons' input modes feed disjoint sets of output ports.

    A local scheme never brings the photons together, so it cannot serve as
    a Bell measurement for teleportation.
    """
    u = circuits.compile(config)
    ports = config.port_names
    reach1 = sorted({ports[i] for i in np.flatnonzero(np.abs(u[:, :4]).max(axis=1) > tol)})
    reach2 = sorted({ports[i] for i in np.flatnonzero(np.abs(u[:, 4:]).max(axis=1) > tol)})
    return LocalityReport(config.name, not set(reach1) & set(reach2), reach1, reach2)
