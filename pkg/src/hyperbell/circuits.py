"""Optical circuits on the four paths a, b, c, d and their detection signatures.

A circuit is an ordered list of elements acting on the eight
(polarization, path) modes.  Path names are kept through the circuit: a
beam splitter on ``(a, b)`` leaves its outputs on paths ``a`` and ``b``.
Every path ends in a 45-degree analyzer whose two ports are detector modes:
port ``<det>45`` takes the ``(H+V)/sqrt(2)`` component and ``<det>45bar``
the ``(H-V)/sqrt(2)`` one, sitting in the H and V slot of that path.

A detection signature is the unordered pair of ports that click for one
two-photon event.  States whose signature supports coincide form a class;
:func:`partition_states` groups the 16 Bell states this way.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from . import fock
from .bellstates import ALL_LABELS, BellLabel, bell_w
from .constants import SCHEMA, SUPPORT_EPS, UNITARY_TOL
from .fock import TwoPhotonState

PATHS = ("a", "b", "c", "d")
DETECTORS = ("alpha", "beta", "gamma", "delta")
_S2 = np.sqrt(2.0)


def _m(pol: str, path: str) -> int:
    if path not in PATHS:
        raise ValueError(f"unknown path {path!r}")
    return fock.mode_index(pol, path) - 1


@dataclass(frozen=True)
class PhaseShift:
    """``exp(i angle)`` on both polarizations of ``path``."""

    path: str
    angle: float

    def matrix(self) -> np.ndarray:
        u = np.eye(8, dtype=complex)
        for pol in "HV":
            k = _m(pol, self.path)
            u[k, k] = np.exp(1j * self.angle)
        return u

    @property
    def paths(self):
        return (self.path,)


@dataclass(frozen=True)
class PolPhase:
    path: str
    pol: str
    angle: float

    def matrix(self) -> np.ndarray:
        u = np.eye(8, dtype=complex)
        k = _m(self.pol, self.path)
        u[k, k] = np.exp(1j * self.angle)
        return u

    @property
    def paths(self):
        return (self.path,)


@dataclass(frozen=True)
class BeamSplitter:
    """Polarization-independent 50/50 splitter.

    ``in_i -> (out_i + out_j)/sqrt(2)``, ``in_j -> (out_i - out_j)/sqrt(2)``.
    """

    path_i: str
    path_j: str
    convention: str = "plus_minus"

    def matrix(self) -> np.ndarray:
        if self.convention != "plus_minus":
            raise ValueError(f"unsupported beam splitter convention {self.convention!r}")
        u = np.eye(8, dtype=complex)
        for pol in "HV":
            i, j = _m(pol, self.path_i), _m(pol, self.path_j)
            u[i, i] = u[j, i] = u[i, j] = 1 / _S2
            u[j, j] = -1 / _S2
        return u

    @property
    def paths(self):
        return (self.path_i, self.path_j)


@dataclass(frozen=True)
class PBS:
    """H/V polarizing beam splitter: H keeps its path, V swaps paths.

    The swapped V amplitude picks up ``reflect_phase``.
    """

    path_i: str
    path_j: str
    reflect_phase: complex = 1 + 0j

    def matrix(self) -> np.ndarray:
        u = np.eye(8, dtype=complex)
        i, j = _m("V", self.path_i), _m("V", self.path_j)
        u[i, i] = u[j, j] = 0
        u[j, i] = u[i, j] = self.reflect_phase
        return u

    @property
    def paths(self):
        return (self.path_i, self.path_j)


@dataclass(frozen=True)
class HWP:
    """Half-wave plate at ``angle`` (radians) from H.

    ``H -> cos(2t) H + sin(2t) V``, ``V -> sin(2t) H - cos(2t) V``.
    """

    path: str
    angle: float

    def matrix(self) -> np.ndarray:
        u = np.eye(8, dtype=complex)
        h, v = _m("H", self.path), _m("V", self.path)
        c, s = np.cos(2 * self.angle), np.sin(2 * self.angle)
        u[h, h], u[v, h], u[h, v], u[v, v] = c, s, s, -c
        return u

    @property
    def paths(self):
        return (self.path,)


@dataclass(frozen=True)
class Analyzer45:
    """Terminal 45-degree analyzer on ``path`` read out by ``detector``."""

    path: str
    detector: str

    def matrix(self) -> np.ndarray:
        u = np.eye(8, dtype=complex)
        h, v = _m("H", self.path), _m("V", self.path)
        u[h, h] = u[h, v] = u[v, h] = 1 / _S2
        u[v, v] = -1 / _S2
        return u

    @property
    def paths(self):
        return (self.path,)


Element = Union[PhaseShift, PolPhase, BeamSplitter, PBS, HWP, Analyzer45]
_ELEMENT_TYPES = {cls.__name__: cls for cls in (PhaseShift, PolPhase, BeamSplitter, PBS, HWP, Analyzer45)}


def _element_to_json(el: Element) -> dict:
    out = {"type": type(el).__name__}
    for name, val in el.__dict__.items():
        if isinstance(val, complex) or isinstance(val, np.complexfloating):
            out[name] = [float(val.real), float(val.imag)]
        else:
            out[name] = val
    return out


def _element_from_json(data: dict) -> Element:
    data = dict(data)
    try:
        cls = _ELEMENT_TYPES[data.pop("type")]
    except KeyError as exc:
        raise ValueError(f"unknown or missing element type in {data!r}") from exc
    if "reflect_phase" in data:
        rp = data["reflect_phase"]
        data["reflect_phase"] = complex(*rp) if isinstance(rp, (list, tuple)) else complex(rp)
    try:
        return cls(**data)
    except TypeError as exc:
        raise ValueError(f"bad fields for {cls.__name__}: {exc}") from None


@dataclass(frozen=True)
class CircuitConfig:
    elements: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def analyzers(self) -> dict[str, Analyzer45]:
        return {el.path: el for el in self.elements if isinstance(el, Analyzer45)}

    @property
    def port_names(self) -> list[str]:
        """Detector port name of each output mode (0-based mode order)."""
        names = [""] * 8
        for path, an in self.analyzers.items():
            names[_m("H", path)] = f"{an.detector}45"
            names[_m("V", path)] = f"{an.detector}45bar"
        return names

    def relabeled(self, mapping: dict[str, str]) -> "CircuitConfig":
        """Copy with analyzer detector names replaced via ``mapping``."""
        els = [
            Analyzer45(el.path, mapping.get(el.detector, el.detector)) if isinstance(el, Analyzer45) else el
            for el in self.elements
        ]
        return CircuitConfig(tuple(els), self.name)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "name": self.name,
            "elements": [_element_to_json(el) for el in self.elements],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CircuitConfig":
        if "elements" not in data:
            raise ValueError("circuit file has no 'elements' list")
        return cls(tuple(_element_from_json(e) for e in data["elements"]), data.get("name", ""))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "CircuitConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed circuit file {path}: {exc}") from None
        return cls.from_json(data)


def validate(config: CircuitConfig) -> None:
    """Raise ValueError unless every path ends in exactly one analyzer."""
    seen_analyzer: dict[str, int] = {}
    detectors = []
    for pos, el in enumerate(config.elements):
        if not isinstance(el, tuple(_ELEMENT_TYPES.values())):
            raise ValueError(f"unknown element {el!r}")
        for p in el.paths:
            if p not in PATHS:
                raise ValueError(f"unknown path {p!r} in {el!r}")
            if p in seen_analyzer:
                if isinstance(el, Analyzer45):
                    raise ValueError(f"path {p!r} has more than one analyzer")
                raise ValueError(f"element {el!r} follows the analyzer on path {p!r}")
        if isinstance(el, Analyzer45):
            seen_analyzer[el.path] = pos
            detectors.append(el.detector)
    missing = [p for p in PATHS if p not in seen_analyzer]
    if missing:
        raise ValueError(f"path without analyzer: {', '.join(missing)}")
    if len(set(detectors)) != len(detectors):
        raise ValueError(f"duplicate detector labels: {detectors}")


def compile(config: CircuitConfig) -> np.ndarray:  # noqa: A001
    """Mode unitary from input (pol, path) modes to detector-port modes."""
    validate(config)
    u = np.eye(8, dtype=complex)
    for el in config.elements:
        u = el.matrix() @ u
    return fock.check_unitary(u, UNITARY_TOL)


Signature = tuple  # (port, port), sorted


def signature_names(config: CircuitConfig) -> list[Signature]:
    """Signature of each Fock basis state at the detectors, in basis order."""
    ports = config.port_names
    rows, cols = fock.pair_modes()
    return [tuple(sorted((ports[k], ports[l]))) for k, l in zip(rows, cols)]


def output_state(state: TwoPhotonState, config: CircuitConfig) -> TwoPhotonState:
    return fock.apply_unitary(compile(config), state)


def signature_distribution(state: TwoPhotonState, config: CircuitConfig) -> dict[Signature, float]:
    """Probability of every two-click signature (zeros included)."""
    out = output_state(state, config)
    probs = out.probabilities()
    return dict(zip(signature_names(config), (float(p) for p in probs)))


def signature_support(state: TwoPhotonState, config: CircuitConfig, eps: float = SUPPORT_EPS) -> frozenset:
    return frozenset(sig for sig, p in signature_distribution(state, config).items() if p > eps)


@dataclass(frozen=True)
class PartitionClass:
    members: frozenset
    signatures: frozenset = frozenset()

    def sorted_members(self) -> list:
        return sorted(self.members, key=_sort_key)


@dataclass(frozen=True)
class Partition:
    """Classes of Bell labels with their signature sets.

    ``disjoint`` is False when two classes share a signature, i.e. a click
    pattern that does not determine the class.
    """

    classes: tuple
    disjoint: bool = True
    names: tuple = ()

    def named(self, names: Sequence[str]) -> "Partition":
        return Partition(self.classes, self.disjoint, tuple(names))

    def member_sets(self) -> set[frozenset]:
        return {c.members for c in self.classes}

    def sizes(self) -> list[int]:
        return sorted((len(c.members) for c in self.classes), reverse=True)

    def class_index(self, label: BellLabel) -> int:
        for i, c in enumerate(self.classes):
            if label in c.members:
                return i
        raise KeyError(f"{label} is not in the partition")

    def class_of_signature(self, sig: Signature) -> int | None:
        sig = tuple(sorted(sig))
        hits = [i for i, c in enumerate(self.classes) if sig in c.signatures]
        if len(hits) > 1:
            raise ValueError(f"signature {sig} belongs to several classes")
        return hits[0] if hits else None

    def to_json(self) -> dict:
        names = self.names or [str(i + 1) for i in range(len(self.classes))]
        return {
            "schema": SCHEMA,
            "disjoint": self.disjoint,
            "classes": [
                {
                    "name": name,
                    "members": [str(lab) for lab in c.sorted_members()],
                    "signatures": [list(s) for s in sorted(c.signatures)],
                }
                for name, c in zip(names, self.classes)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Partition":
        classes = tuple(
            PartitionClass(
                frozenset(BellLabel.parse(s) for s in c["members"]),
                frozenset(tuple(sorted(sig)) for sig in c.get("signatures", [])),
            )
            for c in data["classes"]
        )
        names = tuple(c["name"] for c in data["classes"] if "name" in c)
        return cls(classes, data.get("disjoint", True), names if len(names) == len(classes) else ())

    def to_text(self, title: str = "", class_names: Sequence[str] | None = None) -> str:
        """Fixed-width table: class, members, signatures."""
        names = class_names or self.names or [str(i + 1) for i in range(len(self.classes))]
        width = max(len(str(m)) for c in self.classes for m in c.members) * 2 + 3
        lines = []
        if title:
            lines.append(title)
        lines.append(f"{'Class':<6}| {'State':<{width}}| Detector signature")
        lines.append("-" * (width + 40))
        for name, c in zip(names, self.classes):
            mem = [str(m) for m in c.sorted_members()]
            sigs = [f"{a}.{b}" for a, b in sorted(c.signatures)]
            mem_rows = [", ".join(mem[i:i + 2]) for i in range(0, len(mem), 2)]
            sig_rows = [", ".join(sigs[i:i + 4]) for i in range(0, len(sigs), 4)]
            for k in range(max(len(mem_rows), len(sig_rows), 1)):
                lead = name if k == 0 else ""
                m = mem_rows[k] if k < len(mem_rows) else ""
                s = sig_rows[k] if k < len(sig_rows) else ""
                lines.append(f"{lead:<6}| {m:<{width}}| {s}")
            lines.append("-" * (width + 40))
        return "\n".join(lines)


def _support_masks(us: np.ndarray, ws: np.ndarray, eps: float) -> np.ndarray:
    """Support indicator ``(B, S, 36)`` of each state under each unitary."""
    rows, cols = fock.pair_modes()
    scale = np.where(rows == cols, 2.0, 4.0)  # |amplitude|^2 / |W'_kl|^2
    out = np.einsum("bij,sjk,blk->bsil", us, ws, us, optimize=True)
    probs = scale * np.abs(out[:, :, rows, cols]) ** 2
    return probs > eps


def _sort_key(label):
    return (0, label.index) if isinstance(label, BellLabel) else (1, str(label))


def _partition_from_mask(mask: np.ndarray, names: list[Signature], labels: Sequence) -> Partition:
    groups: dict[bytes, list[int]] = {}
    for s in range(mask.shape[0]):
        groups.setdefault(mask[s].tobytes(), []).append(s)
    classes = []
    for idx in groups.values():
        sigs = frozenset(names[k] for k in np.flatnonzero(mask[idx[0]]))
        classes.append(PartitionClass(frozenset(labels[i] for i in idx), sigs))
    order = {lab: i for i, lab in enumerate(labels)}
    classes.sort(key=lambda c: min(order[lab] for lab in c.members))
    disjoint = all(
        not (a.signatures & b.signatures) for a, b in itertools.combinations(classes, 2)
    )
    return Partition(tuple(classes), disjoint)


def partition_states(
    config: CircuitConfig, states: Sequence[BellLabel] = ALL_LABELS, eps: float = SUPPORT_EPS
) -> Partition:
    """Group labels whose signature supports are identical.

    Classes are ordered by their smallest Bell index.  Partially overlapping
    supports stay in separate classes and clear ``Partition.disjoint``.
    """
    u = compile(config)
    ws = np.stack([bell_w(lab) for lab in states])
    mask = _support_masks(u[None], ws, eps)[0]
    return _partition_from_mask(mask, signature_names(config), list(states))


def partition_named(config: CircuitConfig, states: dict, eps: float = SUPPORT_EPS) -> Partition:
    """Partition arbitrary named states given as ``{name: W}`` (8x8, unit state)."""
    u = compile(config)
    ws = np.stack([np.asarray(w, dtype=complex) for w in states.values()])
    mask = _support_masks(u[None], ws, eps)[0]
    return _partition_from_mask(mask, signature_names(config), list(states))


def distributions_equal_within_classes(config: CircuitConfig, partition: Partition, tol: float = 1e-12) -> bool:
    """Whether classmates share full distributions, not just supports."""
    from .bellstates import hyper_bell

    for c in partition.classes:
        dists = [np.array(list(signature_distribution(hyper_bell(lab), config).values())) for lab in c.members]
        if any(np.abs(d - dists[0]).max() > tol for d in dists[1:]):
            return False
    return True


# reference circuits and golden tables -----------------------------------------------------


def _data_json(name: str) -> dict:
    return json.loads(resources.files("hyperbell").joinpath("data", name).read_text())


def kw_reference_config() -> CircuitConfig:
    """Seven-class analyzer: photon-internal PBS pairs, then 50/50 splitters (table 1 grouping)."""
    return CircuitConfig.from_json(_data_json("kw_reference.json"))


def modified_reference_config() -> CircuitConfig:
    """Frozen calibration result for the modified analyzer (Table 2 grouping)."""
    return CircuitConfig.from_json(_data_json("modified_reference.json"))


def analyzers_only_config() -> CircuitConfig:
    """No interference at all: each path straight into its analyzer."""
    return CircuitConfig(
        tuple(Analyzer45(p, d) for p, d in zip(PATHS, DETECTORS)), name="analyzers-only"
    )


def golden_table(which: int) -> Partition:
    """Reference grouping (members and signature strings) for table 1 or 2.

    Classes keep the reference order and names (``"1"`` .. ``"7"`` or
    ``"1'"`` .. ``"7'"``, see :attr:`Partition.names`).
    """
    if which not in (1, 2):
        raise ValueError("only tables 1 and 2 exist")
    return Partition.from_json(_data_json(f"table{which}.json"))


def class_names(part: Partition, golden: Partition | None = None, prime: str = "") -> list[str]:
    """Name each class of ``part`` after the golden class with the same members.

    Falls back to 1-based position when no golden class matches.
    """
    names = [f"{i + 1}{prime}" for i in range(len(part.classes))]
    if golden is None:
        return names
    raw = _golden_names(golden)
    by_members = {c.members: raw[i] for i, c in enumerate(golden.classes)}
    return [by_members.get(c.members, n) for c, n in zip(part.classes, names)]


def _golden_names(golden: Partition) -> list[str]:
    return list(getattr(golden, "names", None) or [str(i + 1) for i in range(len(golden.classes))])


def starred_signatures() -> frozenset:
    return frozenset(tuple(sorted(s)) for s in _data_json("table1.json")["starred"]["signatures"])


# comparison -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    kind: str  # "equal" | "isomorphic" | "different"
    mapping: tuple | None = None
    diff: dict = field(default_factory=dict)


def relabeling_group() -> list[tuple[int, ...]]:
    """Permutations of the 16 labels induced by photon-local phase and Pauli ops.

    Generated by the Pauli operations on each photon's polarization and path
    together with the ``(psi+, psi-)`` and ``(Psi+, Psi-)`` swaps realized by
    opposite quarter-wave phases on the two photons.
    """
    from .bellstates import LocalOp, PAULI, compile_local_op, label_permutation

    gens = []
    for name in ("X", "Z"):
        gens.append(compile_local_op(LocalOp(1, PAULI[name], PAULI["I"])))
        gens.append(compile_local_op(LocalOp(1, PAULI["I"], PAULI[name])))
    s, sd = np.diag([1, 1j]), np.diag([1, -1j])
    i2 = PAULI["I"]
    gens.append(compile_local_op(LocalOp(1, i2, s)) @ compile_local_op(LocalOp(2, i2, sd)))
    gens.append(compile_local_op(LocalOp(1, s, i2)) @ compile_local_op(LocalOp(2, sd, i2)))
    perms = [label_permutation(g) for g in gens]
    identity = tuple(range(16))
    group = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for p in perms:
                h = tuple(p[g[i]] for i in range(16))
                if h not in group:
                    group.add(h)
                    nxt.append(h)
        frontier = nxt
    return sorted(group)


def _apply_perm(sets: set[frozenset], perm) -> set[frozenset]:
    return {frozenset(BellLabel.from_index(perm[m.index]) for m in s) for s in sets}


def compare_partition(p: Partition, q: Partition) -> Comparison:
    ps, qs = p.member_sets(), q.member_sets()
    if ps == qs:
        return Comparison("equal")
    for perm in relabeling_group():
        if _apply_perm(ps, perm) == qs:
            return Comparison("isomorphic", mapping=perm)
    return Comparison(
        "different",
        diff={"only_left": sorted(_fmt(s) for s in ps - qs), "only_right": sorted(_fmt(s) for s in qs - ps)},
    )


def _fmt(members: Iterable[BellLabel]) -> str:
    return "{" + ", ".join(str(m) for m in sorted(members, key=_sort_key)) + "}"


# calibration search ------------------------------------------------------------------------

_PHASES = (0.0, np.pi / 2, -np.pi / 2, np.pi)
_REFLECT = (1 + 0j, 1j, -1 + 0j, -1j)
_HWP_ANGLES = (None, 0.0, np.pi / 8, np.pi / 4)


@dataclass(frozen=True)
class SearchSpace:
    """Discrete family of analyzer circuits.

    Each candidate is: optional photon-internal pre-stage, path phases,
    half-wave plates, two stages of paired beam splitters / H/V polarizing
    beam splitters (in either order), then analyzers on every path.
    """

    name: str
    pre_stages: tuple = ((), (("BS", "a", "c"),), (("BS", "b", "d"),), (("BS", "a", "c"), ("BS", "b", "d")))
    orders: tuple = ("BS-PBS", "PBS-BS")
    stage1_pairings: tuple = ((("a", "b"), ("c", "d")), (("a", "d"), ("c", "b")))
    stage2_pairings: tuple = ((("a", "b"), ("c", "d")), (("a", "c"), ("b", "d")), (("a", "d"), ("b", "c")))
    reflect_phases: tuple = _REFLECT
    hwp_choices: tuple = tuple(
        tuple((p, t) for p, t in zip(("a", "c"), pair) if t is not None)
        for pair in itertools.product(_HWP_ANGLES, repeat=2)
    )
    phases: tuple = _PHASES

    @classmethod
    def default(cls) -> "SearchSpace":
        return cls("default")

    @classmethod
    def widened(cls) -> "SearchSpace":
        """Default plus a photon-internal PBS pre-stage and common HWPs on all paths."""
        base = cls.default()
        pre = base.pre_stages + ((("PBS", "a", "c"), ("PBS", "b", "d")),)
        hwps = base.hwp_choices + tuple(
            tuple((p, t) for p in PATHS) for t in _HWP_ANGLES if t is not None
        )
        return cls("widened", pre_stages=pre, hwp_choices=hwps)

    def size(self) -> int:
        return (
            len(self.pre_stages) * len(self.hwp_choices) * len(self.orders) * len(self.stage1_pairings)
            * len(self.stage2_pairings) * len(self.reflect_phases) * len(self.phases) ** 4
        )

    def _pre_elements(self, pre) -> list:
        out = []
        for kind, i, j in pre:
            out.append(BeamSplitter(i, j) if kind == "BS" else PBS(i, j))
        return out

    def families(self) -> Iterator[tuple[tuple, list]]:
        """Yield ``(key, elements_without_phases)``; phases vary fastest."""
        for pre in self.pre_stages:
            for hw in self.hwp_choices:
                for order in self.orders:
                    for s1 in self.stage1_pairings:
                        for s2 in self.stage2_pairings:
                            for r in self.reflect_phases:
                                yield (pre, hw, order, s1, s2, r)

    def build(self, key, phases) -> CircuitConfig:
        pre, hw, order, s1, s2, r = key
        els: list = self._pre_elements(pre)
        els += [PhaseShift(p, float(t)) for p, t in zip(PATHS, phases) if t != 0]
        els += [HWP(p, float(t)) for p, t in hw]
        if order == "BS-PBS":
            els += [BeamSplitter(i, j) for i, j in s1] + [PBS(i, j, r) for i, j in s2]
        else:
            els += [PBS(i, j, r) for i, j in s1] + [BeamSplitter(i, j) for i, j in s2]
        els += [Analyzer45(p, p) for p in PATHS]
        return CircuitConfig(tuple(els), name=f"{self.name}-candidate")


def _phase_batch(phases) -> tuple[list, np.ndarray]:
    combos = list(itertools.product(phases, repeat=4))
    diag = np.empty((len(combos), 8), dtype=complex)
    for b, combo in enumerate(combos):
        per_path = dict(zip(PATHS, combo))
        for k, (_, path) in enumerate(fock.MODE_TABLE):
            diag[b, k] = np.exp(1j * per_path[path])
    return combos, diag


def _target_checker(target: Partition, labels: Sequence[BellLabel]):
    pos = {lab: i for i, lab in enumerate(labels)}
    classes = [sorted(pos[m] for m in c.members) for c in target.classes]
    same = [(c[0], m) for c in classes for m in c[1:]]
    reps = [c[0] for c in classes]
    diff = list(itertools.combinations(reps, 2))

    def check(mask: np.ndarray) -> np.ndarray:
        ok = np.ones(mask.shape[0], dtype=bool)
        for i, j in same:
            ok &= (mask[:, i] == mask[:, j]).all(axis=1)
        for i, j in diff:
            ok &= (mask[:, i] != mask[:, j]).any(axis=1)
        return ok

    return check


def assign_detectors(config: CircuitConfig, target: Partition) -> tuple[CircuitConfig, int]:
    """Name the four analyzers to reproduce as many target signature sets as possible.

    Returns the relabeled circuit and the number of classes whose signature
    strings then match the target exactly (ties keep the first assignment in
    lexicographic order of detector permutations).
    """
    current = [config.analyzers[p].detector for p in PATHS]
    best, best_score = None, -1
    for perm in itertools.permutations(DETECTORS):
        cand = config.relabeled(dict(zip(current, perm)))
        part = partition_states(cand)
        by_members = {c.members: c.signatures for c in part.classes}
        score = sum(1 for c in target.classes if by_members.get(c.members) == c.signatures)
        if score > best_score:
            best, best_score = cand, score
    return best, best_score


def calibrate(
    target: Partition,
    space: SearchSpace | None = None,
    labels: Sequence[BellLabel] = ALL_LABELS,
    eps: float = SUPPORT_EPS,
    limit: int | None = None,
    assign_labels: bool = True,
) -> list[CircuitConfig]:
    """Every circuit in ``space`` whose partition has the target's member sets.

    Enumeration is deterministic (phases vary fastest); the first hit is the
    canonical one.  Detector names are fixed afterwards by
    :func:`assign_detectors` when the target carries signature strings.
    ``limit`` stops after that many hits.
    """
    space = space or SearchSpace.default()
    check = _target_checker(target, labels)
    ws = np.stack([bell_w(lab) for lab in labels])
    combos, diag = _phase_batch(space.phases)
    analyzers = np.eye(8, dtype=complex)
    for p in PATHS:
        analyzers = Analyzer45(p, p).matrix() @ analyzers
    hits: list[CircuitConfig] = []
    for key in space.families():
        # all elements after the phases, and the pre-stage before them
        proto = space.build(key, (0.0,) * 4)
        pre_u = np.eye(8, dtype=complex)
        post_u = np.eye(8, dtype=complex)
        n_pre = len(key[0])
        for el in proto.elements[:n_pre]:
            pre_u = el.matrix() @ pre_u
        for el in proto.elements[n_pre:]:
            post_u = el.matrix() @ post_u
        us = (post_u[None] * diag[:, None, :]) @ pre_u
        ok = check(_support_masks(us, ws, eps))
        for b in np.flatnonzero(ok):
            cfg = space.build(key, combos[b])
            if assign_labels:
                cfg, _ = assign_detectors(cfg, target)
            hits.append(cfg)
            if limit is not None and len(hits) >= limit:
                return hits
    return hits
