import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindsymlab.spectra import (SubspaceDepletedError, eigh, ground_subspace,
                                kramers_check, normalize_subspace,
                                subspace_density)
from lindsymlab.operators import spin_matrices
from lindsymlab.symmetry import time_reversal

RT2 = np.sqrt(2.0)


def test_eigh_rejects_non_hermitian():
    m = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        eigh(m)


def test_eigh_matches_numpy_on_hermitian():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = a + a.conj().T
    vals, vecs = eigh(h)
    assert np.allclose(vecs @ np.diag(vals) @ vecs.conj().T, h, atol=1e-12)


def test_ground_doublet_q_symmetric_frozen(hams):
    gs = ground_subspace(hams["q_symmetric"])
    frozen = np.array([
        [1, 0],
        [0, 1],
        [-1j, 0],
        [0, 1j],
    ]) / RT2
    assert gs.dim == 2
    assert not gs.spans_full_space
    assert np.linalg.norm(gs.basis - frozen) < 1e-12
    assert abs(gs.energy + np.sqrt(3.0) / 2) < 1e-12


def test_ground_doublet_tr_invariant_frozen(hams, trev):
    gs = ground_subspace(hams["tr_invariant"], pairing=trev)
    frozen = np.array([
        [1, 0],
        [-1, 0],
        [0, 1],
        [0, 1],
    ]) / RT2
    assert np.linalg.norm(gs.basis - frozen) < 1e-12
    assert abs(gs.energy + np.sqrt(3.0)) < 1e-12


def test_ground_doublet_both_symmetric_frozen(hams, trev):
    gs = ground_subspace(hams["both_symmetric"], pairing=trev)
    frozen = np.zeros((4, 2), dtype=complex)
    frozen[1, 0] = 1.0
    frozen[2, 1] = 1.0
    assert np.linalg.norm(gs.basis - frozen) < 1e-12
    assert abs(gs.energy - 0.25) < 1e-12


def test_pairing_with_incompatible_antiunitary_raises(hams, trev):
    # the q_symmetric Hamiltonian anticommutes with time reversal: the
    # image of a ground state lies in the excited doublet
    with pytest.raises(ValueError):
        ground_subspace(hams["q_symmetric"], pairing=trev)


def test_projector_consistency(hams, trev):
    for name, h in hams.items():
        pairing = trev if name != "q_symmetric" else None
        gs = ground_subspace(h, pairing=pairing)
        p = gs.projector
        assert np.linalg.norm(p @ p - p) < 1e-12
        assert np.linalg.norm(p - p.conj().T) < 1e-12
        assert abs(np.trace(p).real - gs.dim) < 1e-12
        assert np.linalg.norm(h @ p - gs.energy * p) < 1e-9


def test_paired_partner_is_antiunitary_image(hams, trev):
    gs = ground_subspace(hams["tr_invariant"], pairing=trev)
    partner = trev.act_state(gs.basis[:, 0])
    overlap = abs(gs.basis[:, 1].conj() @ partner)
    assert abs(overlap - 1.0) < 1e-12
    # Kramers: the image is automatically orthogonal to the original
    assert abs(gs.basis[:, 0].conj() @ partner) < 1e-12


def test_full_spectrum_degenerate_flagged():
    gs = ground_subspace(np.eye(4) * 2.5)
    assert gs.spans_full_space
    assert gs.dim == 4
    assert np.linalg.norm(gs.projector - np.eye(4)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_phase_fix_makes_basis_deterministic(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    g1 = ground_subspace(h)
    g2 = ground_subspace(h.copy())
    assert np.array_equal(g1.basis, g2.basis)
    for k in range(g1.dim):
        col = g1.basis[:, k]
        top = col[int(np.argmax(np.abs(col)))]
        assert abs(top.imag) < 1e-12
        assert top.real > 0


def test_kramers_check_spin_three_half(hams, trev):
    assert kramers_check(hams["tr_invariant"], trev)
    assert kramers_check(hams["both_symmetric"], trev)


def test_kramers_check_integer_spin_not_forced():
    t1 = time_reversal(1.0)
    sz2 = spin_matrices(1.0).sz @ spin_matrices(1.0).sz
    # spin-1 Sz^2 commutes with T but T^2 = +1: multiplicities (1, 2)
    assert not kramers_check(sz2, t1)


def test_kramers_check_requires_commuting_hamiltonian(hams, trev):
    with pytest.raises(ValueError):
        kramers_check(hams["q_symmetric"], trev)


def test_subspace_density_requirements(hams, trev):
    gs = ground_subspace(hams["tr_invariant"], pairing=trev)
    rho = np.eye(4) / 4
    rg = subspace_density(rho, gs.basis)
    assert rg.shape == (2, 2)
    assert abs(np.trace(rg).real - 0.5) < 1e-12
    with pytest.raises(ValueError):
        subspace_density(np.eye(4), gs.basis)  # trace 4
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 1] = 0.3
    with pytest.raises(ValueError):
        subspace_density(bad, gs.basis)  # not Hermitian


def test_normalize_subspace():
    rg = np.diag([0.3, 0.1]).astype(complex)
    out = normalize_subspace(rg)
    assert abs(np.trace(out).real - 1.0) < 1e-14
    assert np.allclose(out, np.diag([0.75, 0.25]))
    with pytest.raises(SubspaceDepletedError):
        normalize_subspace(np.diag([1e-13, 0.0]).astype(complex))
    with pytest.raises(SubspaceDepletedError):
        normalize_subspace(np.diag([-0.2, 0.1]).astype(complex))


def test_ground_subspace_respects_rel_tol():
    h = np.diag([0.0, 1e-12, 1.0, 2.0])
    assert ground_subspace(h, rel_tol=1e-9).dim == 2
    assert ground_subspace(h, rel_tol=1e-15).dim == 1
