import numpy as np
import pytest

from mubkit.algebra import MubFamily, canonical_phase, projector_from_state
from mubkit.construct import build_family
from mubkit.reconstruct import (
    _jacobi,
    eigen_hermitian,
    reconstruct_all,
    state_from_projector,
)

HALVES = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
CIRCLE = 0.5 * np.array([[1, 1j], [-1j, 1]], dtype=complex)


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (a + a.conj().T)


class TestEigenHermitian:
    def test_identity(self):
        decomp = eigen_hermitian(np.eye(3))
        assert np.allclose(decomp.eigenvalues, [1, 1, 1])

    def test_uniform_projector(self):
        decomp = eigen_hermitian(HALVES)
        assert np.allclose(decomp.eigenvalues, [1, 0], atol=1e-14)
        top = decomp.eigenvectors[:, 0]
        expected = np.array([1, 1]) / np.sqrt(2)
        assert abs(abs(np.vdot(top, expected)) - 1.0) < 1e-12

    def test_already_diagonal(self):
        decomp = eigen_hermitian(np.diag([0.7, 0.3]))
        assert np.allclose(decomp.eigenvalues, [0.7, 0.3])

    def test_eigenvalues_sorted_descending(self):
        rng = np.random.default_rng(1)
        for d in (2, 4, 6):
            vals = eigen_hermitian(random_hermitian(rng, d)).eigenvalues
            assert np.all(np.diff(vals) <= 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="not Hermitian"):
            eigen_hermitian(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_zero_matrix(self):
        decomp = eigen_hermitian(np.zeros((3, 3)))
        assert np.allclose(decomp.eigenvalues, 0.0)
        assert np.allclose(decomp.eigenvectors, np.eye(3))

    def test_dim_property_and_reconstruct(self):
        rng = np.random.default_rng(2)
        m = random_hermitian(rng, 5)
        decomp = eigen_hermitian(m)
        assert decomp.dim == 5
        assert np.max(np.abs(decomp.reconstruct() - m)) < 1e-12

    def test_off_diagonal_mass_decreases_per_sweep(self):
        rng = np.random.default_rng(13)
        for d in (3, 5, 8):
            m = random_hermitian(rng, d)
            _, _, history = _jacobi(m)
            assert all(later <= earlier * (1 + 1e-12) for earlier, later in zip(history, history[1:]))
            assert history[-1] < 1e-12 * np.linalg.norm(m)

    def test_property_batch(self):
        # Reconstruction, trace conservation, and orthonormality on a
        # spread of seeded Hermitian matrices.
        rng = np.random.default_rng(42)
        for trial in range(30):
            d = 2 + trial % 7
            m = random_hermitian(rng, d)
            decomp = eigen_hermitian(m)
            vals, vecs = decomp.eigenvalues, decomp.eigenvectors
            assert np.max(np.abs(decomp.reconstruct() - m)) < 1e-10
            assert abs(vals.sum() - np.trace(m).real) < 1e-12
            assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(d))) < 1e-10


class TestStateFromProjector:
    def test_uniform_projector(self):
        state = state_from_projector(HALVES)
        assert np.allclose(state, np.array([1, 1]) / np.sqrt(2), atol=1e-12)

    def test_circular_projector_canonical_phase(self):
        state = state_from_projector(CIRCLE)
        assert np.allclose(state, np.array([1, -1j]) / np.sqrt(2), atol=1e-12)

    def test_maximally_mixed_is_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            state_from_projector(0.5 * np.eye(2))

    def test_rank_two_rejected(self):
        with pytest.raises(ValueError, match="rank"):
            state_from_projector(np.diag([0.7, 0.3]))

    def test_scaled_projector_rejected(self):
        with pytest.raises(ValueError, match="deviates from 1"):
            state_from_projector(0.9 * HALVES, tol=1e-3)

    def test_round_trip_from_random_states(self):
        rng = np.random.default_rng(77)
        for trial in range(100):
            d = 2 + trial % 7
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            v /= np.linalg.norm(v)
            recovered = state_from_projector(projector_from_state(v))
            assert np.max(np.abs(recovered - canonical_phase(v))) < 1e-10

    def test_projector_round_trip(self):
        state = state_from_projector(CIRCLE)
        assert np.max(np.abs(projector_from_state(state) - CIRCLE)) < 1e-12


class TestReconstructAll:
    def test_qubit_family_states(self):
        family = build_family(2)
        states = reconstruct_all(family)
        sq = 1 / np.sqrt(2)
        expected = {
            (0, 0): [sq, sq],
            (0, 1): [sq, -sq],
            (1, 0): [sq, -1j * sq],
            (1, 1): [sq, 1j * sq],
            (2, 0): [1.0, 0.0],
            (2, 1): [0.0, 1.0],
        }
        for (a, alpha), vec in expected.items():
            assert np.allclose(states[a, alpha], vec, atol=1e-12)

    def test_d3_round_trip(self):
        family = build_family(3)
        states = reconstruct_all(family)
        assert states.shape == (4, 3, 3)
        for a in range(4):
            for alpha in range(3):
                rebuilt = projector_from_state(states[a, alpha])
                assert np.max(np.abs(rebuilt - family.projector(a, alpha))) < 1e-10

    def test_error_names_offending_labels(self):
        mats = np.zeros((1, 2, 2, 2), dtype=complex)
        mats[0, 0] = np.diag([1.0, 0.0])
        mats[0, 1] = 0.5 * np.eye(2)
        with pytest.raises(ValueError, match=r"basis 0, vector 1"):
            reconstruct_all(MubFamily(mats))
