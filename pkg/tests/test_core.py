import numpy as np
import pytest

from gaussqfi.core import (
    GaussianState,
    RealGaussianState,
    Tolerances,
    is_symplectic,
    k_matrix,
    omega_matrix,
    symplectic_eigenvalues,
    symplectic_eigenvalues_two_mode,
    symplectic_inverse,
    to_complex,
    to_real,
    transform_state,
    u_matrix,
    validate_state,
    williamson_decompose,
)
from gaussqfi.errors import NumericalError, StructuralError, UnphysicalStateError
from gaussqfi.sampling import passive, random_state, random_symplectic, squeezer


def test_constants():
    k = k_matrix(2)
    assert np.allclose(k, np.diag([1, 1, -1, -1]))
    u = u_matrix(2)
    assert np.allclose(u @ u.conj().T, np.eye(4))
    # K = U i Omega U^dag
    assert np.allclose(u @ (1j * omega_matrix(2)) @ u.conj().T, k)


def test_vacuum():
    vac = GaussianState.vacuum(2)
    assert np.allclose(vac.covariance, np.eye(4))
    assert np.allclose(symplectic_eigenvalues(vac.covariance), [1, 1])
    assert vac.photon_number() == 0.0


def test_state_is_read_only():
    st = GaussianState.vacuum(1)
    with pytest.raises(ValueError):
        st.covariance[0, 0] = 2.0


class TestSymplecticEigenvalues:
    def test_thermal(self):
        sigma = np.diag([3.0, 5.0, 3.0, 5.0]).astype(complex)
        assert np.allclose(symplectic_eigenvalues(sigma), [5.0, 3.0])

    def test_squeezed_thermal(self):
        s = squeezer([0.7])
        sigma = s @ (2.0 * np.eye(2)) @ s.conj().T
        assert np.allclose(symplectic_eigenvalues(sigma), [2.0])

    def test_two_mode_closed_form(self, rng):
        for _ in range(20):
            st = random_state(2, rng)
            l1, l2 = symplectic_eigenvalues_two_mode(st.covariance)
            assert np.allclose([l1, l2], symplectic_eigenvalues(st.covariance), rtol=1e-10)

    def test_bad_shape(self):
        with pytest.raises(StructuralError):
            symplectic_eigenvalues(np.eye(3))

    def test_pairing_violation(self):
        # Hermitian and positive, but K sigma has no +-lambda pairing
        sigma = np.array([[2.0, 0.5], [0.5, 1.0]], dtype=complex)
        with pytest.raises(StructuralError):
            symplectic_eigenvalues(sigma, Tolerances(pair=1e-8))


class TestWilliamson:
    def test_reconstruction(self, rng):
        for n in (1, 2, 3):
            st = random_state(n, rng)
            fac = williamson_decompose(st.covariance)
            assert np.linalg.norm(fac.reconstruct() - st.covariance) < 1e-9
            assert is_symplectic(fac.S)
            assert np.all(np.diff(fac.eigenvalues) <= 0)

    def test_recovers_eigenvalues(self, rng):
        s = random_symplectic(2, rng)
        lam = np.array([2.5, 1.5])
        sigma = s @ np.diag(np.concatenate([lam, lam])) @ s.conj().T
        fac = williamson_decompose(sigma)
        assert np.allclose(fac.eigenvalues, lam)

    def test_gauge_fixed(self, rng):
        st = random_state(3, rng)
        fac = williamson_decompose(st.covariance)
        alpha = fac.symplectic.alpha
        for j in range(3):
            i = np.argmax(np.abs(alpha[:, j]))
            assert abs(alpha[i, j].imag) < 1e-12 and alpha[i, j].real > 0

    def test_degenerate_flagged(self, rng):
        s = random_symplectic(3, rng)
        lam = np.array([2.0, 2.0, 1.5])
        sigma = s @ np.diag(np.concatenate([lam, lam])) @ s.conj().T
        fac = williamson_decompose(sigma)
        assert fac.gauge.degenerate
        assert fac.gauge.degenerate_blocks == ((0, 1),)
        assert np.linalg.norm(fac.reconstruct() - sigma) < 1e-9

    def test_vacuum_fully_degenerate(self):
        fac = williamson_decompose(np.eye(4, dtype=complex))
        # any passive S works; it must not squeeze
        assert np.allclose(fac.symplectic.beta, 0)
        assert np.allclose(fac.S @ fac.S.conj().T, np.eye(4))

    def test_symplectic_inverse(self, rng):
        s = random_symplectic(2, rng)
        assert np.allclose(symplectic_inverse(s) @ s, np.eye(4))


class TestValidation:
    def test_ok(self, rng):
        assert validate_state(random_state(2, rng)).ok

    def test_non_hermitian(self):
        sigma = np.eye(2, dtype=complex)
        sigma[0, 1] = 0.3
        with pytest.raises(StructuralError):
            validate_state(GaussianState(np.zeros(2), sigma))

    def test_bad_displacement_pairing(self):
        with pytest.raises(StructuralError):
            validate_state(GaussianState(np.array([1.0, 2.0]), np.eye(2)))

    def test_unphysical(self):
        with pytest.raises(UnphysicalStateError):
            validate_state(GaussianState(np.zeros(2), 0.5 * np.eye(2)))

    def test_report_without_raising(self):
        rep = validate_state(GaussianState(np.zeros(2), 0.5 * np.eye(2)), raise_on_error=False)
        assert not rep.ok and not rep.physical
        assert "symplectic eigenvalue" in rep.messages[0]

    def test_mismatched_shapes(self):
        with pytest.raises(StructuralError):
            GaussianState(np.zeros(4), np.eye(2))


class TestRealForm:
    def test_vacuum_identity(self):
        real = to_real(GaussianState.vacuum(1))
        assert np.allclose(real.covariance_real, np.eye(2))

    def test_coherent_mean(self):
        st = GaussianState.from_amplitudes([1.0 + 2.0j], np.eye(2))
        real = to_real(st)
        assert np.allclose(real.displacement_real, np.sqrt(2) * np.array([1.0, 2.0]))

    def test_squeezed_diagonal(self):
        r = 0.4
        s = squeezer([r])
        real = to_real(GaussianState(np.zeros(2), s @ s.conj().T))
        assert np.allclose(real.covariance_real, np.diag([np.exp(-2 * r), np.exp(2 * r)]))

    def test_round_trip(self, rng):
        for n in (1, 2, 3):
            st = random_state(n, rng)
            back = to_complex(to_real(st))
            assert np.abs(back.covariance - st.covariance).max() < 1e-12
            assert np.abs(back.displacement - st.displacement).max() < 1e-12

    def test_rejects_asymmetric(self):
        with pytest.raises(StructuralError):
            to_complex(RealGaussianState(np.zeros(2), np.array([[1.0, 0.2], [0.0, 1.0]])))


def test_transform_state_passive_preserves_spectrum(rng):
    st = random_state(2, rng)
    u = passive(np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0])
    out = transform_state(st, u, shift=[0.5, -0.2j])
    assert np.allclose(symplectic_eigenvalues(out.covariance), symplectic_eigenvalues(st.covariance))
    assert np.allclose(out.mean, (u @ st.displacement)[:2] + np.array([0.5, -0.2j]))


def test_not_positive_definite():
    with pytest.raises((NumericalError, StructuralError)):
        symplectic_eigenvalues(-np.eye(2))
