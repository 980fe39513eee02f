"""Fock-space layer checked against a brute-force occupation-number model."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hyperbell import fock


def random_w(rng, n=8):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + a.T


def random_unitary(rng, n=8):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / abs(np.diag(r)))


# brute force: states as dicts occupation-tuple -> amplitude ---------------------------------


def _dict_state(s):
    return dict(zip(fock.fock_basis(s.n_modes), s.amplitudes))


def _annihilate(k, state):
    out = {}
    for occ, amp in state.items():
        if occ[k]:
            new = list(occ)
            new[k] -= 1
            out[tuple(new)] = out.get(tuple(new), 0) + np.sqrt(occ[k]) * amp
    return out


def _overlap(x, y):
    return sum(np.conj(x.get(k, 0)) * v for k, v in y.items())


def _permanent(m):
    n = m.shape[0]
    return sum(np.prod([m[i, p[i]] for i in range(n)]) for p in itertools.permutations(range(n)))


def test_basis_size_and_order():
    basis = fock.fock_basis()
    assert len(basis) == 36 == fock.basis_dim(8)
    assert basis == sorted(basis)
    assert all(sum(b) == 2 for b in basis)


def test_amplitude_conventions():
    w = np.zeros((8, 8))
    w[0, 4] = w[4, 0] = 0.5
    s = fock.state_from_w(w, normalize=False)
    assert s.amplitude((1, 5)) == pytest.approx(1.0)
    w = np.zeros((8, 8))
    w[2, 2] = 1 / np.sqrt(2)
    s = fock.state_from_w(w, normalize=False)
    assert s.amplitude((3, 3)) == pytest.approx(1.0)


def test_hong_ou_mandel():
    # H photons on a and b meeting on a 50:50 splitter never leave in separate ports
    w = np.zeros((8, 8))
    w[0, 4] = w[4, 0] = 0.5
    s = fock.state_from_w(w)
    u = np.eye(8, dtype=complex)
    a, b = 0, 4
    u[np.ix_([a, b], [a, b])] = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    out = fock.apply_unitary(u, s)
    assert abs(out.amplitude((1, 5))) < 1e-15
    assert abs(out.amplitude((1, 1))) ** 2 == pytest.approx(0.5)
    assert abs(out.amplitude((5, 5))) ** 2 == pytest.approx(0.5)


def test_evolution_matches_permanents(rng):
    u = random_unitary(rng)
    s = fock.state_from_w(random_w(rng))
    out = fock.apply_unitary(u, s)
    basis = fock.fock_basis()

    def modes(occ):
        return [k for k, n in enumerate(occ) for _ in range(n)]

    expected = np.zeros(36, dtype=complex)
    for j, t in enumerate(basis):
        tm = modes(t)
        for i, sb in enumerate(basis):
            sm = modes(sb)
            norm = np.sqrt(np.prod([math.factorial(n) for n in sb]) * np.prod([math.factorial(n) for n in t]))
            expected[i] += _permanent(u[np.ix_(sm, tm)]) / norm * s.amplitudes[j]
    assert np.allclose(out.amplitudes, expected, atol=1e-12)


def test_number_matrix_against_ladder_operators(rng):
    for _ in range(50):
        x = fock.state_from_w(random_w(rng))
        y = fock.state_from_w(random_w(rng))
        m = fock.number_matrix(x, y)
        dx, dy = _dict_state(x), _dict_state(y)
        ref = np.array([[_overlap(_annihilate(k, dx), _annihilate(l, dy)) for l in range(8)] for k in range(8)])
        assert np.allclose(m, ref, atol=1e-12)


def test_number_matrix_trace_counts_photons(rng):
    s = fock.state_from_w(random_w(rng))
    assert np.trace(fock.number_matrix(s, s)).real == pytest.approx(2.0)


def test_roundtrip_and_linearity(rng):
    w1, w2 = random_w(rng), random_w(rng)
    s1 = fock.state_from_w(w1, normalize=False)
    assert np.allclose(fock.w_from_state(s1), w1 / 2 + w1.T / 2)
    c = 0.3 - 1.1j
    combo = fock.state_from_w(w1 + c * w2, normalize=False).amplitudes
    parts = fock.state_from_w(w1, normalize=False).amplitudes + c * fock.state_from_w(w2, normalize=False).amplitudes
    assert np.allclose(combo, parts)


def test_rejects_non_unitary():
    with pytest.raises(ValueError):
        fock.check_unitary(2 * np.eye(8))
    with pytest.raises(ValueError):
        fock.state_from_w(np.zeros((8, 8)))


def test_schmidt_ranks():
    w = np.zeros((8, 8))
    w[0, 4] = w[4, 0] = 1
    assert fock.schmidt_rank(fock.state_from_w(w)) == 1
    w = np.zeros((8, 8))
    for k in range(4):
        w[k, 4 + k] = w[4 + k, k] = 1
    s = fock.state_from_w(w)
    assert fock.schmidt_rank(s) == 4
    assert np.allclose(fock.schmidt_coefficients(s), 0.5)


def test_schmidt_rejects_mixed_sectors():
    w = np.zeros((8, 8))
    w[0, 1] = w[1, 0] = 1
    with pytest.raises(ValueError):
        fock.schmidt_rank(fock.state_from_w(w))


@settings(max_examples=40, deadline=None)
@given(
    re=arrays(np.float64, (8, 8), elements=st.floats(-1, 1)),
    im=arrays(np.float64, (8, 8), elements=st.floats(-1, 1)),
    seed=st.integers(0, 2**32 - 1),
)
def test_unitary_evolution_preserves_norm(re, im, seed):
    w = re + 1j * im
    w = w + w.T
    if np.abs(w).max() < 1e-3:
        return
    s = fock.state_from_w(w)
    u = random_unitary(np.random.default_rng(seed))
    out = fock.apply_unitary(u, s)
    assert out.norm == pytest.approx(1.0, abs=1e-12)
    back = fock.apply_unitary(u.conj().T, out)
    assert np.allclose(back.amplitudes, s.amplitudes, atol=1e-12)


def test_hyper_bell_by_hand_w():
    from hyperbell.bellstates import BellLabel, hyper_bell

    # (HH + VV)(ab + cd)/2 puts amplitude 1/2 on mode pairs (1,5), (2,6), (3,7), (4,8)
    w = np.zeros((8, 8))
    for k in range(4):
        w[k, 4 + k] = w[4 + k, k] = 0.25
    s = fock.state_from_w(w)
    assert s.norm == pytest.approx(1.0)
    ref = hyper_bell(BellLabel("Phi+", "phi+"))
    assert np.allclose(s.amplitudes, ref.amplitudes)
    wb = ref.w
    nz = np.abs(wb[np.abs(wb) > 1e-12])
    assert nz.size == 8 and np.allclose(nz, nz[0])


def test_number_matrix_properties(rng):
    s = fock.state_from_w(random_w(rng))
    m = fock.number_matrix(s, s)
    assert np.allclose(m, m.conj().T)
    assert np.linalg.eigvalsh(m).min() > -1e-12
    from hyperbell.bellstates import ALL_LABELS, hyper_bell

    x, y = hyper_bell(ALL_LABELS[0]), hyper_bell(ALL_LABELS[4])
    assert abs(np.trace(fock.number_matrix(x, y))) < 1e-15


def test_permutation_maps_basis_to_basis(rng):
    p = np.eye(8)[rng.permutation(8)]
    for k, l in [(1, 5), (2, 2), (3, 8)]:
        amps = np.zeros(36)
        amps[fock.basis_index((k, l))] = 1
        out = fock.apply_unitary(p, fock.TwoPhotonState(amps))
        assert np.count_nonzero(np.abs(out.amplitudes) > 1e-12) == 1


def test_polarization_bell_times_path_product_has_rank_two():
    w = np.zeros((8, 8))
    for pol in "HV":  # Phi+ on polarization, photon 1 on a, photon 2 on b
        k, l = fock.mode_index(pol, "a") - 1, fock.mode_index(pol, "b") - 1
        w[k, l] = w[l, k] = 1
    s = fock.state_from_w(w)
    assert fock.schmidt_rank(s) == 2
    assert np.allclose(fock.schmidt_coefficients(s)[:2], 1 / np.sqrt(2))
