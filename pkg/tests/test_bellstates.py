import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperbell import bellstates as bs
from hyperbell import fock
from hyperbell.bellstates import ALL_LABELS, BellLabel

# polarization and path Bell states written out by hand: {(x1, x2): amplitude * sqrt 2}
POL = {
    "Phi+": {("H", "H"): 1, ("V", "V"): 1},
    "Phi-": {("H", "H"): 1, ("V", "V"): -1},
    "Psi+": {("H", "V"): 1, ("V", "H"): 1},
    "Psi-": {("H", "V"): 1, ("V", "H"): -1},
}
MOM = {
    "phi+": {("a", "b"): 1, ("c", "d"): 1},
    "phi-": {("a", "b"): 1, ("c", "d"): -1},
    "psi+": {("a", "d"): 1, ("c", "b"): 1},
    "psi-": {("a", "d"): 1, ("c", "b"): -1},
}


def by_hand(label: BellLabel) -> np.ndarray:
    amps = np.zeros(36, dtype=complex)
    for (p1, p2), x in POL[label.pol].items():
        for (q1, q2), y in MOM[label.mom].items():
            modes = (fock.mode_index(p1, q1), fock.mode_index(p2, q2))
            amps[fock.basis_index(modes)] += x * y / 2
    return amps


@pytest.mark.parametrize("label", ALL_LABELS, ids=str)
def test_states_match_hand_expansion(label):
    assert np.allclose(bs.hyper_bell(label).amplitudes, by_hand(label), atol=1e-15)


def test_gram_is_identity():
    states = bs.all_bell_states()
    gram = np.array([[fock.inner(x, y) for y in states] for x in states])
    assert np.abs(gram - np.eye(16)).max() < 1e-12


def test_schmidt_rank_four():
    assert all(fock.schmidt_rank(s) == 4 for s in bs.all_bell_states())


def test_label_indexing():
    assert [lab.index for lab in ALL_LABELS] == list(range(16))
    assert BellLabel.parse("Psi-*phi+") == BellLabel("Psi-", "phi+")
    assert BellLabel.parse("Psi-*phi+").index == 12
    assert bs.parse_labels("Phi+*phi+, Psi-*psi-") == [ALL_LABELS[0], ALL_LABELS[15]]
    for bad in ("Phi+phi+", "Chi+*phi+", "Phi+*Phi+"):
        with pytest.raises(ValueError):
            BellLabel.parse(bad)
    with pytest.raises(ValueError):
        BellLabel.from_index(16)


@pytest.mark.parametrize("pol", ["Psi+", "Psi-"])
def test_starred_states(pol):
    s = bs.starred_state(pol)
    assert s.norm == pytest.approx(1.0)
    # photon 1 on a or b, photon 2 on c or d: outside the span of the 16
    assert all(abs(fock.inner(s, b)) < 1e-15 for b in bs.all_bell_states())
    sign = 1 if pol == "Psi+" else -1
    ha_vc = s.amplitude((fock.mode_index("H", "a"), fock.mode_index("V", "c")))
    vb_hd = s.amplitude((fock.mode_index("V", "b"), fock.mode_index("H", "d")))
    assert ha_vc == pytest.approx(0.5)
    assert vb_hd == pytest.approx(-0.5 * sign)
    with pytest.raises(ValueError):
        bs.starred_state("Phi+")


def test_identify_up_to_phase():
    for lab in ALL_LABELS:
        s = bs.hyper_bell(lab)
        assert bs.identify(fock.TwoPhotonState(np.exp(0.7j) * s.amplitudes)) == lab
    mix = fock.TwoPhotonState((bs.hyper_bell(ALL_LABELS[0]).amplitudes + bs.hyper_bell(ALL_LABELS[1]).amplitudes) / np.sqrt(2))
    assert bs.identify(mix) is None


# single-qubit Pauli action on Bell states: X flips Phi<->Psi, Z flips the sign
PAULI_ACTION = {
    "X": {"Phi+": "Psi+", "Phi-": "Psi-", "Psi+": "Phi+", "Psi-": "Phi-"},
    "Z": {"Phi+": "Phi-", "Phi-": "Phi+", "Psi+": "Psi-", "Psi-": "Psi+"},
}


@pytest.mark.parametrize("photon", [1, 2])
@pytest.mark.parametrize("name", ["X", "Z"])
def test_pauli_actions(photon, name):
    pol_op = bs.LocalOp(photon, bs.PAULI[name], bs.PAULI["I"])
    path_op = bs.LocalOp(photon, bs.PAULI["I"], bs.PAULI[name])
    for lab in ALL_LABELS:
        got = bs.identify(fock.apply_unitary(bs.compile_local_op(pol_op), bs.hyper_bell(lab)))
        assert got == BellLabel(PAULI_ACTION[name][lab.pol], lab.mom)
        got = bs.identify(fock.apply_unitary(bs.compile_local_op(path_op), bs.hyper_bell(lab)))
        mom = PAULI_ACTION[name][lab.mom.capitalize()].lower()
        assert got == BellLabel(lab.pol, mom)


@given(st.sampled_from(ALL_LABELS), st.sampled_from([1, 2]))
def test_local_paulis_cover_all_labels(start, photon):
    reached = set(bs.local_orbit(start, bs.pauli_ops(photon)).values())
    assert reached == set(ALL_LABELS)


def test_label_permutation():
    assert bs.label_permutation(np.eye(8)) == tuple(range(16))
    h = np.eye(8, dtype=complex)
    h[:2, :2] = np.array([[1, 1], [1, -1]]) / np.sqrt(2)  # mixes H a and H c only
    assert bs.label_permutation(h) is None


def test_psi_minus_psi_minus_support():
    s = bs.hyper_bell(BellLabel("Psi-", "psi-"))
    nz = s.amplitudes[np.abs(s.amplitudes) > 1e-12]
    assert nz.size == 4 and np.allclose(np.abs(nz), 0.5)
    assert sorted(np.sign(nz.real)) == [-1, -1, 1, 1]


def test_starred_support_size():
    for pol in ("Psi+", "Psi-"):
        assert np.count_nonzero(np.abs(bs.starred_state(pol).amplitudes) > 1e-12) == 4


def test_identity_op_and_orbit_start():
    ident = bs.LocalOp(1, bs.PAULI["I"], bs.PAULI["I"])
    assert np.array_equal(bs.compile_local_op(ident), np.eye(8))
    start = BellLabel("Psi-", "psi-")
    assert bs.local_orbit(start, [ident])[ident] == start
    z_pol = bs.LocalOp(1, bs.PAULI["Z"], bs.PAULI["I"])
    assert bs.local_orbit(start, [z_pol])[z_pol] == BellLabel("Psi+", "psi-")
