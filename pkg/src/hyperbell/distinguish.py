"""Linear-optics distinguishability test for sets of hyper-Bell states.

Two states ``psi_i``, ``psi_j`` can only be told apart by a linear-optical
measurement if, for the mode ``c_s = sum_k v_k c_k`` of the first detected
photon, ``<psi_i| c_s^dag c_s |psi_j> = 0``.  For a candidate set the
conditions over all pairs form a system of quadratic equations in the unit
vector ``v``; this module decides numerically whether it has a solution by
minimizing

    F(v) = sum_{i<j in set} |v^dag M^(ij) v|^2,   M^(ij)_kl = <psi_i|c_k^dag c_l|psi_j>

over the unit sphere from many random starts.  ``F = 0`` somewhere means
the necessary condition can hold (feasible); a strictly positive minimum
means the set cannot be fully discriminated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from . import bellstates, fock
from .bellstates import ALL_LABELS, BellLabel
from .constants import (
    DEFAULT_MAX_ITER,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    ESCALATION_FACTOR,
    FEASIBLE_BELOW,
    INFEASIBLE_ABOVE,
)

_BELL_W = np.stack([bellstates.bell_w(lab) for lab in ALL_LABELS])
_BELL_W.setflags(write=False)


def _build_pair_table() -> np.ndarray:
    states = bellstates.all_bell_states()
    table = np.empty((16, 16, 8, 8), dtype=complex)
    for i in range(16):
        for j in range(16):
            table[i, j] = fock.number_matrix(states[i], states[j])
    table.setflags(write=False)
    return table


#: ``PAIR_TABLE[i, j]`` is the number matrix of Bell states ``i`` and ``j``.
PAIR_TABLE = _build_pair_table()


def _as_index(m) -> int:
    if isinstance(m, BellLabel):
        return m.index
    if isinstance(m, str):
        return BellLabel.parse(m).index
    return int(m)


def _as_indices(members) -> tuple[int, ...]:
    idx = [_as_index(m) for m in members]
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate members in {members!r}")
    if any(not 0 <= i < 16 for i in idx):
        raise ValueError("Bell indices run from 0 to 15")
    return tuple(sorted(idx))


def pair_matrix(i, j) -> np.ndarray:
    """Number matrix ``<psi_i|c_k^dag c_l|psi_j>`` for two Bell labels."""
    return PAIR_TABLE[_as_index(i), _as_index(j)]


def _as_complex(v) -> np.ndarray:
    v = np.asarray(v)
    if np.isrealobj(v) and v.shape[-1] == 16:
        v = v[..., :8] + 1j * v[..., 8:]
    return np.asarray(v, dtype=complex)


def residual(v, members) -> float:
    """``F(v)`` over all unordered pairs of ``members``, from the pair table.

    ``v`` is a complex 8-vector (or its 16 real coordinates, real parts
    first); it is used as given, so pass a unit vector.
    """
    v = _as_complex(v)
    idx = _as_indices(members)
    total = 0.0
    for i, j in combinations(idx, 2):
        total += abs(np.vdot(v, PAIR_TABLE[i, j] @ v)) ** 2
    return float(total)


def _gram(ws: np.ndarray, v: np.ndarray):
    """Overlaps ``G_ij = v^dag M^(ij) v = 4 <W_i v, W_j v>`` for a batch of ``v``.

    ``ws`` is ``(K, D, D)``, ``v`` is ``(R, D)``; returns ``u`` of shape
    ``(R, K, D)`` with ``u[r, k] = W_k v_r`` and ``G`` of shape ``(R, K, K)``.
    """
    k, d = ws.shape[0], ws.shape[-1]
    u = (v @ ws.reshape(k * d, d).T).reshape(-1, k, d)
    g = 4.0 * np.matmul(u.conj(), u.transpose(0, 2, 1))
    return u, g


def residual_gradient(v, members, project: bool = True) -> np.ndarray:
    """Real gradient of ``F`` w.r.t. ``(Re v, Im v)``.

    With ``project`` the radial component is removed, leaving the gradient
    of ``F`` restricted to the unit sphere at unit ``v``.
    """
    v = _as_complex(v)
    ws = _BELL_W[list(_as_indices(members))]
    u, g = _gram(ws, v[None, :])
    u, g = u[0], g[0]
    np.fill_diagonal(g, 0)
    # dF/d(conj v) = sum_{i != j} conj(G_ij) * 4 conj(W_i) u_j
    t = np.einsum("iab,jb->ija", ws.conj(), u)
    dconj = 4.0 * np.einsum("ij,ija->a", g.conj(), t)
    grad = 2.0 * np.concatenate([dconj.real, dconj.imag])
    if project:
        z = np.concatenate([v.real, v.imag])
        z = z / np.linalg.norm(z)
        grad = grad - z * (z @ grad)
    return grad


@dataclass(frozen=True)
class FeasibilityOptions:
    restarts: int = DEFAULT_RESTARTS
    max_iter: int = DEFAULT_MAX_ITER
    seed: int = DEFAULT_SEED
    feasible_below: float = FEASIBLE_BELOW
    infeasible_above: float = INFEASIBLE_ABOVE
    escalation: int = ESCALATION_FACTOR


@dataclass
class FeasibilityReport:
    members: tuple[int, ...]
    verdict: str
    min_residual: float
    witness: np.ndarray = field(repr=False)
    restarts_used: int

    @property
    def labels(self) -> list[BellLabel]:
        return [BellLabel.from_index(i) for i in self.members]

    def to_json(self) -> dict:
        return {
            "members": [str(lab) for lab in self.labels],
            "verdict": self.verdict,
            "min_residual": self.min_residual,
            "restarts": self.restarts_used,
            "witness": [[float(x.real), float(x.imag)] for x in self.witness],
        }


def random_unit_vectors(rng: np.random.Generator, count: int, dim: int = 8) -> np.ndarray:
    """``count`` complex vectors uniform on the unit sphere of ``C^dim``."""
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def set_rng(seed: int, members: Sequence[int]) -> np.random.Generator:
    """Counter-based stream keyed by the seed and the candidate set.

    The stream depends only on ``(seed, set)``, so results do not change with
    the order in which sets are processed or how work is split up.
    """
    mask = sum(1 << i for i in members)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, mask])))


def _pair_index(k: int):
    i, j = np.triu_indices(k, 1)
    return i, j


def _residual_jacobian(ws, wconj_flat, z, pi, pj):
    """Stacked real residuals ``(Re G_p, Im G_p)`` and their Jacobian in z."""
    d = ws.shape[-1]
    v = z[:, :d] + 1j * z[:, d:]
    u, g = _gram(ws, v)
    n, k = u.shape[:2]
    # t[r, i, j] = conj(W_i) u_j
    t = (u.reshape(n * k, d) @ wconj_flat.T).reshape(n, k, k, d).transpose(0, 2, 1, 3)
    a = t[:, pi, pj]
    b = t[:, pj, pi].conj()
    gp = g[:, pi, pj]
    jac = np.concatenate([4.0 * (a + b), 4j * (b - a)], axis=-1)
    r = np.concatenate([gp.real, gp.imag], axis=-1)
    jr = np.concatenate([jac.real, jac.imag], axis=-2)
    return r, jr


def minimize_residual(members, starts: np.ndarray, max_iter: int = DEFAULT_MAX_ITER):
    """Levenberg-Marquardt descent of ``F`` on the sphere from each start.

    Steps are taken in the tangent space and followed by renormalization.
    Returns the final residuals and unit vectors, one per start.
    """
    return minimize_residual_w(_BELL_W[list(_as_indices(members))], starts, max_iter)


def minimize_residual_w(ws: np.ndarray, starts: np.ndarray, max_iter: int = DEFAULT_MAX_ITER):
    """:func:`minimize_residual` for arbitrary symmetric ``W`` matrices ``(K, D, D)``."""
    ws = np.asarray(ws, dtype=complex)
    d = ws.shape[-1]
    starts = np.asarray(starts, dtype=complex)
    n = starts.shape[0]
    z = np.concatenate([starts.real, starts.imag], axis=1)
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    if ws.shape[0] < 2:
        return np.zeros(n), starts / np.linalg.norm(starts, axis=1, keepdims=True)
    wconj_flat = ws.conj().reshape(-1, d)
    pi, pj = _pair_index(ws.shape[0])

    r, jr = _residual_jacobian(ws, wconj_flat, z, pi, pj)
    f = np.sum(r * r, axis=1)
    lam = np.full(n, 1e-3)
    active = np.arange(n)
    eye = np.eye(2 * d)
    for _ in range(max_iter):
        if active.size == 0:
            break
        za, ra, ja, fa, la = z[active], r[active], jr[active], f[active], lam[active]
        proj = eye - za[:, :, None] * za[:, None, :]
        jt = ja @ proj
        jtt = jt.transpose(0, 2, 1)
        jtj = jtt @ jt
        rhs = -(jtt @ ra[..., None])[..., 0]
        scale = np.einsum("rii->ri", jtj).max(axis=1) + 1e-300
        step = np.linalg.solve(jtj + (la * scale)[:, None, None] * eye, rhs[..., None])[..., 0]
        zn = za + step
        zn /= np.linalg.norm(zn, axis=1, keepdims=True)
        rn, jn = _residual_jacobian(ws, wconj_flat, zn, pi, pj)
        fn = np.sum(rn * rn, axis=1)
        better = fn < fa
        done = np.zeros(active.size, dtype=bool)
        if better.any():
            sel = active[better]
            gain = fa[better] - fn[better]
            z[sel], r[sel], jr[sel], f[sel] = zn[better], rn[better], jn[better], fn[better]
            lam[sel] = np.maximum(la[better] / 3.0, 1e-12)
            done[better] = (fn[better] < 1e-30) | (gain <= 1e-11 * fa[better])
        worse = ~better
        lam[active[worse]] = la[worse] * 4.0
        done[worse] |= (la[worse] > 1e10) | (fa[worse] < 1e-30)
        active = active[~done]
    return f, z[:, :d] + 1j * z[:, d:]


def feasibility(members, opts: FeasibilityOptions | None = None) -> FeasibilityReport:
    """Decide whether a unit witness annihilates every pairwise condition.

    Verdicts: ``feasible`` when the best residual is below
    ``opts.feasible_below``, ``infeasible`` above ``opts.infeasible_above``.
    In between the restart count is raised by ``opts.escalation`` and the
    set is judged again; a set still in between is ``indeterminate``.
    """
    opts = opts or FeasibilityOptions()
    idx = _as_indices(members)
    verdict, best_f, best_v, used = judge_w(_BELL_W[list(idx)], set_rng(opts.seed, idx), opts)
    return FeasibilityReport(idx, verdict, best_f, best_v, used)


def judge_w(ws: np.ndarray, rng: np.random.Generator, opts: FeasibilityOptions):
    """Verdict, best residual, best witness and restarts used for a ``W`` stack."""
    d = np.shape(ws)[-1]
    best_f, best_v, used = np.inf, None, 0
    verdict = "indeterminate"
    for count in (opts.restarts, opts.restarts * (opts.escalation - 1)):
        f, v = minimize_residual_w(ws, random_unit_vectors(rng, count, d), opts.max_iter)
        used += count
        k = int(np.argmin(f))
        if f[k] < best_f:
            best_f, best_v = float(f[k]), v[k]
        if best_f < opts.feasible_below:
            verdict = "feasible"
            break
        if best_f > opts.infeasible_above:
            verdict = "infeasible"
            break
    return verdict, best_f, best_v, used


#: the octet discussed analytically: two class-1 states and one of each other class
WORKED_OCTET = tuple(
    BellLabel.parse(s)
    for s in (
        "Phi+*phi+", "Phi-*phi-", "Phi-*phi+", "Psi-*psi-",
        "Psi+*phi+", "Psi+*phi-", "Psi-*phi+", "Psi-*phi-",
    )
)


def upper_bound(n: int) -> int:
    """Most classes a linear-optical scheme can separate with ``n`` qubit DOFs."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return 2 ** (n + 1)


def ratio(n: int) -> Fraction:
    """``upper_bound(n) / 4**n`` as an exact fraction."""
    return Fraction(upper_bound(n), 4**n)


def general_bound(dims: Sequence[int]) -> int:
    """``2 * prod(dims)`` for degrees of freedom of dimensions ``dims``."""
    dims = list(dims)
    if not dims or any(int(d) != d or d < 2 for d in dims):
        raise ValueError("dimensions must be integers >= 2")
    return 2 * math.prod(int(d) for d in dims)


# worked octet: recover the key condition structure -------------------------------------


def _unit_form(k: int, l: int) -> np.ndarray:
    m = np.zeros((8, 8), dtype=complex)
    m[k - 1, l - 1] = 1
    return m


def _hermitian_parts(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``v^dag m v = v^dag A v + i v^dag B v`` with A, B Hermitian."""
    return (m + m.conj().T) / 2, (m - m.conj().T) / 2j


def _as_real(h: np.ndarray) -> np.ndarray:
    return np.concatenate([h.real.ravel(), h.imag.ravel()])


#: conditions as (kind, modes) on the 1-based witness components
KEY_CONDITIONS = (
    ("modulus", (1, 3)),
    ("modulus", (2, 4)),
    ("modulus", (5, 7)),
    ("modulus", (6, 8)),
    ("balance", ((1, 5), (2, 6))),
    ("product", (7, 5)),
    ("product", (2, 4)),
    ("product", (6, 8)),
    ("product", (3, 1)),
)


def _condition_forms(kind: str, modes) -> list[np.ndarray]:
    """Hermitian forms whose joint vanishing is the condition."""
    if kind == "modulus":
        k, l = modes
        return [_unit_form(k, k) - _unit_form(l, l)]
    if kind == "balance":
        (k1, k2), (l1, l2) = modes
        return [_unit_form(k1, k1) + _unit_form(k2, k2) - _unit_form(l1, l1) - _unit_form(l2, l2)]
    if kind == "product":
        # conj(v_k) v_l = 0  <=>  real and imaginary parts vanish
        return list(_hermitian_parts(_unit_form(*modes)))
    raise ValueError(f"unknown condition kind {kind!r}")


@dataclass
class WorkedExampleReport:
    span_rank: int
    #: largest distance of a key condition's form from the constraint span
    max_span_distance: float
    conditions: list = field(default_factory=list)
    forced_zero: tuple = ()
    contradiction: bool = False
    feasibility: FeasibilityReport | None = None

    @property
    def ok(self) -> bool:
        return self.contradiction and all(c["implied"] for c in self.conditions)

    def to_json(self) -> dict:
        return {
            "span_rank": self.span_rank,
            "max_span_distance": self.max_span_distance,
            "conditions": self.conditions,
            "forced_zero": list(self.forced_zero),
            "contradiction": self.contradiction,
            "feasibility": self.feasibility.to_json() if self.feasibility else None,
        }


def worked_example_check(opts: FeasibilityOptions | None = None, tol: float = 1e-10) -> WorkedExampleReport:
    """Derive the key conditions for :data:`WORKED_OCTET` and show they force ``v = 0``.

    Each pairwise condition ``v^dag M v = 0`` is two real Hermitian forms.
    A key condition is implied when its forms lie in the real span of
    those 56 forms (any ``v`` meeting all pair conditions then meets it).
    The contradiction follows because every modulus equality ``|v_k| = |v_l|``
    is paired with a product condition on the same two components, forcing
    both to zero, and together these cover all eight components.
    """
    idx = _as_indices(WORKED_OCTET)
    forms = []
    for i, j in combinations(idx, 2):
        forms.extend(_hermitian_parts(PAIR_TABLE[i, j]))
    basis = np.array([_as_real(h) for h in forms]).T
    rank = int(np.linalg.matrix_rank(basis, tol))
    rows, worst = [], 0.0
    for kind, modes in KEY_CONDITIONS:
        dist = 0.0
        for h in _condition_forms(kind, modes):
            target = _as_real(h)
            coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
            dist = max(dist, float(np.linalg.norm(basis @ coef - target)))
        worst = max(worst, dist)
        rows.append({"kind": kind, "modes": modes, "distance": dist, "implied": dist < tol})
    if not all(r["implied"] for r in rows):
        bad = [r for r in rows if not r["implied"]]
        raise AssertionError(f"key conditions not implied by the pair constraints: {bad}")
    moduli = {frozenset(m) for k, m in KEY_CONDITIONS if k == "modulus"}
    products = {frozenset(m) for k, m in KEY_CONDITIONS if k == "product"}
    zero = sorted(set().union(*(moduli & products)))
    report = WorkedExampleReport(rank, worst, rows, tuple(zero), zero == list(range(1, 9)))
    report.feasibility = feasibility(idx, opts)
    return report


# n = 1: polarization only -------------------------------------------------------------------


@dataclass
class PolarizationOnlyReport:
    verdict: str
    min_residual: float
    class_sizes: list
    classes: list
    bound: int
    achieved: int

    @property
    def ok(self) -> bool:
        return (
            self.verdict == "infeasible"
            and self.class_sizes == [2, 1, 1]
            and self.achieved == self.bound - 1
        )

    def to_json(self) -> dict:
        return dict(self.__dict__)


def polarization_w(pol: str, paths=("a", "b")) -> np.ndarray:
    """8-mode ``W`` of a polarization Bell state, photon 1 on ``paths[0]``."""
    coeff = bellstates._BELL_COEFFS[bellstates.POL_LABELS.index(pol)]
    w = np.zeros((8, 8), dtype=complex)
    for p1, x in enumerate("HV"):
        for p2, y in enumerate("HV"):
            k = fock.mode_index(x, paths[0]) - 1
            l = fock.mode_index(y, paths[1]) - 1
            w[k, l] += coeff[p1, p2] / 2
            w[l, k] += coeff[p1, p2] / 2
    return w


def polarization_only_analysis(opts: FeasibilityOptions | None = None) -> PolarizationOnlyReport:
    """Repeat the analysis with polarization as the only degree of freedom.

    Feasibility runs on the four occupied modes (H, V of each photon).  The
    partition comes from a beam splitter on the two photons' paths followed
    by H/V analysis, written as a 22.5 degree plate before each 45 degree
    analyzer.
    """
    from . import circuits as cx

    opts = opts or FeasibilityOptions()
    keep = [fock.mode_index(x, p) - 1 for p in "ab" for x in "HV"]
    ws = np.stack([polarization_w(pol)[np.ix_(keep, keep)] for pol in bellstates.POL_LABELS])
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([opts.seed, 1])))
    verdict, best, _, _ = judge_w(ws, rng, opts)

    cfg = cx.CircuitConfig(
        (cx.BeamSplitter("a", "b"), cx.HWP("a", np.pi / 8), cx.HWP("b", np.pi / 8))
        + tuple(cx.Analyzer45(p, d) for p, d in zip(cx.PATHS, cx.DETECTORS)),
        name="polarization-bsa",
    )
    part = cx.partition_named(cfg, {pol: polarization_w(pol) for pol in bellstates.POL_LABELS})
    classes = [sorted(c.members, key=bellstates.POL_LABELS.index) for c in part.classes]
    return PolarizationOnlyReport(
        verdict, best, part.sizes(), classes, upper_bound(1), len(part.classes)
    )


# symmetry of the label set ------------------------------------------------------------------


def symmetry_generators() -> dict[str, tuple[int, ...]]:
    """Label permutations induced by mode unitaries that map Bell states to Bell states.

    If ``U`` sends every Bell state to a Bell state (up to phase), then a
    witness for a set ``S`` transforms into a witness for ``U(S)``, so
    feasibility is constant on orbits of the generated group.
    """
    from . import circuits as cx
    from .bellstates import PAULI, LocalOp, compile_local_op, label_permutation

    i2 = PAULI["I"]
    half = np.pi / 2
    units = {
        "X pol": compile_local_op(LocalOp(1, PAULI["X"], i2)),
        "Z pol": compile_local_op(LocalOp(1, PAULI["Z"], i2)),
        "X path": compile_local_op(LocalOp(1, i2, PAULI["X"])),
        "Z path": compile_local_op(LocalOp(1, i2, PAULI["Z"])),
    }
    chains = {
        "S path": [cx.PhaseShift("c", half), cx.PhaseShift("d", -half)],
        "S pol": [cx.PolPhase(p, "V", half if p in "ac" else -half) for p in cx.PATHS],
        "H pol": [cx.HWP(p, np.pi / 8) for p in cx.PATHS],
        "H path": [cx.BeamSplitter("a", "c"), cx.BeamSplitter("b", "d")],
        "CNOT pol-path": [cx.PBS("a", "c"), cx.PBS("b", "d")],
    }
    for name, els in chains.items():
        u = np.eye(8, dtype=complex)
        for el in els:
            u = el.matrix() @ u
        units[name] = u
    swap = np.zeros((8, 8))
    for side in (0, 4):
        for pol in range(2):
            for path in range(2):
                swap[side + 2 * path + pol, side + 2 * pol + path] = 1
    units["swap DOF"] = swap
    out = {}
    for name, u in units.items():
        perm = label_permutation(u)
        if perm is None:
            raise AssertionError(f"{name} does not permute the Bell states")
        out[name] = perm
    return out


def octet_masks(size: int = 8) -> list[int]:
    """Bitmasks of all ``size``-subsets of the 16 labels in combination-rank order."""
    return [sum(1 << i for i in c) for c in combinations(range(16), size)]


def _permute_mask(mask: int, perm) -> int:
    out = 0
    for i in range(16):
        if mask >> i & 1:
            out |= 1 << perm[i]
    return out


def _mask_members(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(16) if mask >> i & 1)


@dataclass
class Orbit:
    representative: tuple[int, ...]
    rank: int
    multiplicity: int
    ranks: list[int] = field(repr=False, default_factory=list)


def symmetry_reduce(octets=None, generators=None) -> list[Orbit]:
    """Orbits of ``octets`` (bitmasks or member tuples) under the generated group.

    Orbits are connected components of the graph whose edges are the
    generator permutations; the representative is the lowest-ranked member.
    """
    if octets is None:
        octets = octet_masks()
    masks = [o if isinstance(o, int) else sum(1 << i for i in _as_indices(o)) for o in octets]
    rank = {m: r for r, m in enumerate(masks)}
    gens = list((generators or symmetry_generators()).values())
    parent = list(range(len(masks)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r, m in enumerate(masks):
        for g in gens:
            img = _permute_mask(m, g)
            if img not in rank:
                raise ValueError("octet set is not closed under the symmetry group")
            a, b = find(r), find(rank[img])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for r in range(len(masks)):
        groups.setdefault(find(r), []).append(r)
    return [
        Orbit(_mask_members(masks[root]), root, len(members), members)
        for root, members in sorted(groups.items())
    ]


# exhaustive sweep ----------------------------------------------------------------------------


@dataclass
class SweepEntry:
    rank: int
    members: tuple[int, ...]
    verdict: str
    min_residual: float
    restarts: int
    solved: bool = True  # False when inherited from an orbit representative

    def to_json(self) -> dict:
        out = {
            "rank": self.rank,
            "members": [str(BellLabel.from_index(i)) for i in self.members],
            "verdict": self.verdict,
            "min_residual": self.min_residual,
            "restarts": self.restarts,
        }
        if not self.solved:
            out["inherited"] = True
        return out


@dataclass
class SweepReport:
    entries: list[SweepEntry]
    wall_time: float
    options: FeasibilityOptions
    threads: int
    symmetry_reduced: bool = False
    orbits: int | None = None

    @property
    def counts(self) -> dict[str, int]:
        out = {"feasible": 0, "infeasible": 0, "indeterminate": 0}
        for e in self.entries:
            out[e.verdict] += 1
        return out

    @property
    def flagged(self) -> list[SweepEntry]:
        return [e for e in self.entries if e.verdict != "infeasible"]

    @property
    def all_infeasible(self) -> bool:
        return len(self.entries) > 0 and not self.flagged

    @property
    def min_of_min_residuals(self) -> float:
        return min(e.min_residual for e in self.entries)

    @property
    def max_of_min_residuals(self) -> float:
        return max(e.min_residual for e in self.entries)

    def summary(self) -> dict:
        return {
            "octets": len(self.entries),
            "solved": sum(e.solved for e in self.entries),
            "counts": self.counts,
            "min_of_min_residuals": self.min_of_min_residuals,
            "max_of_min_residuals": self.max_of_min_residuals,
            "symmetry_reduced": self.symmetry_reduced,
            "orbits": self.orbits,
        }

    def provenance(self) -> dict:
        o = self.options
        return {
            "seed": o.seed,
            "restarts": o.restarts,
            "max_iter": o.max_iter,
            "feasible_below": o.feasible_below,
            "infeasible_above": o.infeasible_above,
            "escalation": o.escalation,
            "label_order": [str(lab) for lab in ALL_LABELS],
        }

    def to_json(self) -> dict:
        return {
            "summary": self.summary(),
            "provenance": self.provenance(),
            "octets": [e.to_json() for e in self.entries],
            "metadata": {"wall_time_s": self.wall_time, "threads": self.threads},
        }

    def to_csv(self) -> str:
        lines = ["rank,members,verdict,min_residual,restarts,inherited"]
        for e in self.entries:
            mem = " ".join(str(BellLabel.from_index(i)) for i in e.members)
            lines.append(f"{e.rank},{mem},{e.verdict},{e.min_residual:.6e},{e.restarts},{int(not e.solved)}")
        return "\n".join(lines) + "\n"


def _solve_batch(job):
    ranks, member_lists, opts = job
    out = []
    for r, members in zip(ranks, member_lists):
        rep = feasibility(members, opts)
        out.append((r, rep.verdict, rep.min_residual, rep.restarts_used))
    return out


def _run_jobs(todo, opts, threads, progress, chunk=16):
    """Evaluate ``todo`` = [(rank, members)] and return results keyed by rank."""
    jobs = [
        ([r for r, _ in todo[i:i + chunk]], [m for _, m in todo[i:i + chunk]], opts)
        for i in range(0, len(todo), chunk)
    ]
    results = {}
    done = 0
    if threads <= 1:
        batches = map(_solve_batch, jobs)
    else:
        from concurrent.futures import ProcessPoolExecutor

        pool = ProcessPoolExecutor(max_workers=threads)
        batches = pool.map(_solve_batch, jobs)
    try:
        for batch in batches:
            for r, verdict, res, used in batch:
                results[r] = (verdict, res, used)
            done += len(batch)
            if progress:
                progress(done, len(todo))
    finally:
        if threads > 1:
            pool.shutdown()
    return results


def sweep_octets(
    opts: FeasibilityOptions | None = None,
    threads: int = 1,
    symmetry: bool = False,
    progress=None,
    limit: int | None = None,
) -> SweepReport:
    """Judge every 8-subset of the 16 labels, in combination-rank order.

    With ``symmetry`` only orbit representatives are solved and each verdict
    is copied to the rest of its orbit.  ``limit`` truncates to the first
    ``limit`` ranks (a smoke-test knob; a truncated report is not a proof).
    Results do not depend on ``threads``: every set draws its own seeded
    restart stream.
    """
    import time

    opts = opts or FeasibilityOptions()
    masks = octet_masks()
    if limit is not None:
        masks = masks[:limit]
    start = time.perf_counter()
    orbits = None
    if symmetry:
        if limit is not None:
            raise ValueError("symmetry reduction needs the full octet list")
        orbits = symmetry_reduce(masks)
        todo = [(o.rank, o.representative) for o in orbits]
    else:
        todo = [(r, _mask_members(m)) for r, m in enumerate(masks)]
    results = _run_jobs(todo, opts, threads, progress)
    entries: list[SweepEntry] = [None] * len(masks)  # type: ignore[list-item]
    if symmetry:
        for o in orbits:
            verdict, res, used = results[o.rank]
            for r in o.ranks:
                entries[r] = SweepEntry(r, _mask_members(masks[r]), verdict, res, used, r == o.rank)
    else:
        for r, m in enumerate(masks):
            verdict, res, used = results[r]
            entries[r] = SweepEntry(r, _mask_members(m), verdict, res, used)
    return SweepReport(
        entries, time.perf_counter() - start, opts, threads, symmetry, len(orbits) if orbits else None
    )
