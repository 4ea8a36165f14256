"""Gaussian states in the complex (mode-operator) representation.

Ordering convention: for N modes the operator vector is
``(a_1, ..., a_N, a_1^dag, ..., a_N^dag)``, so a covariance matrix is
``[[X, Y], [conj(Y), conj(X)]]`` and the vacuum is the identity.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NumericalError, StructuralError, UnphysicalStateError


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances. ``herm``, ``symp`` and ``recon`` scale with ``||sigma||``."""

    herm: float = 1e-10
    symp: float = 1e-10
    phys: float = 1e-8
    pair: float = 1e-8
    recon: float = 1e-9
    degen: float = 1e-8


DEFAULT_TOL = Tolerances()


# --------------------------------------------------------------------------
# constants
# --------------------------------------------------------------------------

def k_matrix(n):
    """``K = diag(I, -I)`` of size 2n."""
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)


def omega_matrix(n):
    """Real symplectic form ``[[0, I], [-I, 0]]`` for (x..., p...) ordering."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def u_matrix(n):
    """Unitary taking quadratures (x..., p...) to mode operators: ``A = U Q``."""
    eye = np.eye(n)
    return np.block([[eye, 1j * eye], [eye, -1j * eye]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class SymplecticConstants:
    K: np.ndarray
    Omega: np.ndarray
    U: np.ndarray

    @classmethod
    def for_modes(cls, n):
        return cls(K=k_matrix(n), Omega=omega_matrix(n), U=u_matrix(n))


def swap_matrix(n):
    """Permutation exchanging the annihilation and creation halves."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [eye, zero]])


def _frozen(a, dtype=complex):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------------------------
# states
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianState:
    """First and second moments of an N-mode Gaussian state (complex form).

    Args:
        displacement: length-2N vector ``(d, conj(d))``.
        covariance: 2N x 2N Hermitian matrix.
    """

    displacement: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        d = _frozen(self.displacement).reshape(-1)
        s = _frozen(self.covariance)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise StructuralError(f"covariance must be 2N x 2N, got shape {s.shape}")
        if d.shape[0] != s.shape[0]:
            raise StructuralError(
                f"displacement length {d.shape[0]} does not match covariance size {s.shape[0]}"
            )
        object.__setattr__(self, "displacement", d)
        object.__setattr__(self, "covariance", s)

    @property
    def modes(self):
        return self.covariance.shape[0] // 2

    @property
    def mean(self):
        """The N complex amplitudes ``<a_i>``."""
        return self.displacement[: self.modes]

    @classmethod
    def vacuum(cls, n=1):
        return cls(np.zeros(2 * n, dtype=complex), np.eye(2 * n, dtype=complex))

    @classmethod
    def from_amplitudes(cls, amplitudes, covariance):
        amp = np.atleast_1d(np.asarray(amplitudes, dtype=complex))
        return cls(np.concatenate([amp, amp.conj()]), covariance)

    def photon_number(self):
        """Mean total photon number ``sum_i <a_i^dag a_i>``."""
        n = self.modes
        x = np.real(np.diag(self.covariance)[:n])
        return float(np.sum((x - 1.0) / 2.0) + np.sum(np.abs(self.mean) ** 2))


@dataclass(frozen=True)
class RealGaussianState:
    """Quadrature form: ``displacement_real = (x..., p...)``, real symmetric covariance."""

    displacement_real: np.ndarray
    covariance_real: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "displacement_real", _frozen(self.displacement_real, float).reshape(-1))
        object.__setattr__(self, "covariance_real", _frozen(self.covariance_real, float))

    @property
    def modes(self):
        return self.covariance_real.shape[0] // 2


def to_complex(state, tol=1e-10):
    """Real quadrature form -> complex form (``d = U d_R``, ``sigma = U sigma_R U^dag``)."""
    s_r = state.covariance_real
    if s_r.ndim != 2 or s_r.shape[0] != s_r.shape[1] or s_r.shape[0] % 2:
        raise StructuralError(f"real covariance must be 2N x 2N, got {s_r.shape}")
    if state.displacement_real.shape[0] != s_r.shape[0]:
        raise StructuralError("real displacement length does not match covariance")
    scale = max(1.0, np.linalg.norm(s_r))
    if np.linalg.norm(s_r - s_r.T) > tol * scale:
        raise StructuralError("real covariance matrix is not symmetric")
    u = u_matrix(state.modes)
    sigma = u @ s_r @ u.conj().T
    sigma = 0.5 * (sigma + sigma.conj().T)
    return GaussianState(u @ state.displacement_real, sigma)


def to_real(state, tol=1e-10):
    """Complex form -> real quadrature form (inverse of :func:`to_complex`)."""
    u = u_matrix(state.modes)
    s_r = u.conj().T @ state.covariance @ u
    d_r = u.conj().T @ state.displacement
    scale = max(1.0, np.linalg.norm(s_r))
    if np.abs(s_r.imag).max() > tol * scale or np.abs(d_r.imag).max() > tol * max(1.0, np.abs(d_r).max()):
        raise StructuralError("complex-form state lacks the conjugate-pair structure")
    s_r = s_r.real
    return RealGaussianState(d_r.real, 0.5 * (s_r + s_r.T))


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    hermitian: bool
    block_structure: bool
    displacement_structure: bool
    physical: bool
    eigenvalues: Optional[np.ndarray]
    messages: tuple = ()

    @property
    def ok(self):
        return self.hermitian and self.block_structure and self.displacement_structure and self.physical


def _structure_errors(sigma, d, tol):
    n = sigma.shape[0] // 2
    scale = max(1.0, np.linalg.norm(sigma))
    herm = np.linalg.norm(sigma - sigma.conj().T) <= tol.herm * scale
    x, y = sigma[:n, :n], sigma[:n, n:]
    block = (
        np.linalg.norm(sigma[n:, n:] - x.conj()) <= tol.herm * scale
        and np.linalg.norm(sigma[n:, :n] - y.conj()) <= tol.herm * scale
        and np.linalg.norm(y - y.T) <= tol.herm * scale
    )
    dscale = max(1.0, np.abs(d).max(initial=0.0))
    dstruct = np.abs(d[n:] - d[:n].conj()).max(initial=0.0) <= tol.herm * dscale
    return herm, block, dstruct


def validate_state(state, tol=DEFAULT_TOL, raise_on_error=True):
    """Check Hermiticity, block structure, displacement pairing and physicality.

    Returns a :class:`ValidationReport`; with ``raise_on_error`` a failing
    structural check raises :class:`StructuralError` and a symplectic
    eigenvalue below ``1 - tol.phys`` raises :class:`UnphysicalStateError`.
    """
    sigma, d = state.covariance, state.displacement
    if sigma.shape != (d.shape[0], d.shape[0]):
        raise StructuralError("dimension mismatch between displacement and covariance")
    herm, block, dstruct = _structure_errors(sigma, d, tol)
    msgs = []
    if not herm:
        msgs.append("covariance is not Hermitian")
    if not block:
        msgs.append("covariance lacks the [[X, Y], [conj Y, conj X]] structure")
    if not dstruct:
        msgs.append("displacement halves are not complex conjugates")
    lam = None
    physical = False
    if herm and block:
        try:
            lam = symplectic_eigenvalues(sigma, tol)
            physical = bool(lam[-1] >= 1.0 - tol.phys)
            if not physical:
                msgs.append(f"smallest symplectic eigenvalue {lam[-1]:.6g} < 1")
        except (StructuralError, NumericalError) as exc:
            msgs.append(str(exc))
    report = ValidationReport(herm, block, dstruct, physical, lam, tuple(msgs))
    if raise_on_error and not report.ok:
        if herm and block and dstruct:
            raise UnphysicalStateError("; ".join(msgs))
        raise StructuralError("; ".join(msgs))
    return report


# --------------------------------------------------------------------------
# symplectic spectrum
# --------------------------------------------------------------------------

def _hermitian_sqrt(sigma):
    w, v = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    if w[0] <= 0.0:
        raise NumericalError("covariance is not positive definite")
    sq = np.sqrt(w)
    return (v * sq) @ v.conj().T, (v / sq) @ v.conj().T


def _signed_spectrum(sigma):
    """Eigen-decomposition of ``sigma^1/2 K sigma^1/2`` (Hermitian, similar to K sigma)."""
    n = sigma.shape[0] // 2
    root, inv_root = _hermitian_sqrt(sigma)
    k = np.concatenate([np.ones(n), -np.ones(n)])
    h = (root * k) @ root
    h = 0.5 * (h + h.conj().T)
    try:
        mu, w = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigen-solver failed: {exc}") from exc
    return mu, w, inv_root


def symplectic_eigenvalues(sigma, tol=DEFAULT_TOL):
    """Positive members of the ``+-lambda`` eigenvalue pairs of ``K sigma``, descending."""
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise StructuralError(f"covariance must be 2N x 2N, got {sigma.shape}")
    n = sigma.shape[0] // 2
    mu, _, _ = _signed_spectrum(sigma)
    pos = mu[n:][::-1]
    neg = -mu[:n]
    if np.any(pos <= 0) or np.max(np.abs(pos - neg) / np.maximum(1.0, pos)) > tol.pair:
        raise StructuralError("eigenvalues of K sigma do not pair as +-lambda")
    return pos.copy()


def symplectic_eigenvalues_two_mode(sigma, tol=1e-12):
    """Closed form ``lambda_{1,2} = sqrt(tr[A^2] +- sqrt(tr[A^2]^2 - 16 det A)) / 2``."""
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.shape != (4, 4):
        raise StructuralError("two-mode closed form needs a 4 x 4 covariance")
    a = k_matrix(2) @ sigma
    t = np.trace(a @ a).real
    det = np.linalg.det(a).real
    disc = t * t - 16.0 * det
    if disc < -tol * max(1.0, t * t):
        raise NumericalError(f"negative discriminant {disc:.3g}: unphysical or corrupted covariance")
    root = np.sqrt(max(disc, 0.0))
    low = t - root
    if low < 0:
        raise NumericalError("negative symplectic eigenvalue square")
    return 0.5 * np.sqrt(t + root), 0.5 * np.sqrt(low)


# --------------------------------------------------------------------------
# Williamson decomposition
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SymplecticMatrix:
    """Complex-form symplectic matrix ``[[alpha, beta], [conj beta, conj alpha]]``."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frozen(self.alpha))
        object.__setattr__(self, "beta", _frozen(self.beta))

    @property
    def matrix(self):
        a, b = self.alpha, self.beta
        return np.block([[a, b], [b.conj(), a.conj()]])

    @classmethod
    def from_matrix(cls, s):
        n = s.shape[0] // 2
        return cls(s[:n, :n], s[:n, n:])

    def symplectic_error(self):
        s = self.matrix
        k = k_matrix(s.shape[0] // 2)
        return float(np.linalg.norm(s @ k @ s.conj().T - k))


@dataclass(frozen=True)
class GaugeInfo:
    convention: str = "K-normalised; largest |alpha| entry per column real positive"
    degenerate_blocks: tuple = ()

    @property
    def degenerate(self):
        return bool(self.degenerate_blocks)


@dataclass(frozen=True)
class WilliamsonFactors:
    """``sigma = S D S^dag`` with ``D = diag(lambda, lambda)``."""

    symplectic: SymplecticMatrix
    eigenvalues: np.ndarray
    gauge: GaugeInfo = field(default_factory=GaugeInfo)

    @property
    def S(self):
        return self.symplectic.matrix

    @property
    def D(self):
        return np.diag(np.concatenate([self.eigenvalues, self.eigenvalues])).astype(complex)

    def reconstruct(self):
        s = self.S
        return s @ self.D @ s.conj().T


def _degenerate_blocks(lam, tol):
    blocks = []
    start = 0
    for i in range(1, len(lam) + 1):
        if i == len(lam) or abs(lam[i] - lam[i - 1]) >= tol * max(1.0, lam[i - 1]):
            if i - start > 1:
                blocks.append(tuple(range(start, i)))
            start = i
    return tuple(blocks)


def _k_gram_schmidt(vs, kdiag):
    """Modified Gram-Schmidt under ``<u, v>_K = u^dag K v`` (positive-norm vectors)."""
    out = []
    for v in vs:
        w = v.copy()
        for u in out:
            w = w - u * (u.conj() @ (kdiag * w))
        nrm = (w.conj() @ (kdiag * w)).real
        if nrm <= 0:
            raise NumericalError("K-norm lost positivity during orthogonalisation")
        out.append(w / np.sqrt(nrm))
    return out


def _fix_phase(v, n):
    top = np.abs(v[:n])
    peak = top.max()
    idx = int(np.flatnonzero(top >= peak * (1.0 - 1e-12))[0])
    ph = v[idx] / abs(v[idx])
    return v / ph


def williamson_decompose(sigma, tol=DEFAULT_TOL):
    """Williamson decomposition with deterministic gauge.

    Eigenvectors of ``K sigma`` for the positive eigenvalues are K-normalised,
    phase-fixed so the largest-magnitude alpha entry of each column is real and
    positive, and the negative-eigenvalue columns are built from them by the
    conjugate swap, which guarantees the ``[[alpha, beta], [conj beta, conj alpha]]``
    form. Degenerate eigenvalue clusters are K-orthonormalised and reported in
    ``gauge.degenerate_blocks``.
    """
    sigma = np.asarray(sigma, dtype=complex)
    n = sigma.shape[0] // 2
    mu, w, inv_root = _signed_spectrum(sigma)
    lam = mu[n:][::-1].copy()
    neg = -mu[:n]
    if np.max(np.abs(lam - neg) / np.maximum(1.0, lam)) > tol.pair:
        raise StructuralError("eigenvalues of K sigma do not pair as +-lambda")
    if lam[-1] < 1.0 - tol.phys:
        raise UnphysicalStateError(f"smallest symplectic eigenvalue {lam[-1]:.6g} < 1")
    kdiag = np.concatenate([np.ones(n), -np.ones(n)])
    # v = sigma^-1/2 w is an eigenvector of K sigma with v^dag K v = 1/mu
    cols = [inv_root @ w[:, 2 * n - 1 - i] * np.sqrt(lam[i]) for i in range(n)]
    blocks = _degenerate_blocks(lam, tol.degen)
    for blk in blocks:
        ortho = _k_gram_schmidt([cols[i] for i in blk], kdiag)
        for i, v in zip(blk, ortho):
            cols[i] = v
    cols = [_fix_phase(v, n) for v in cols]
    v_pos = np.stack(cols, axis=1)
    # K sigma eigenvectors V relate to S by S = K V K; the a-part of v is alpha
    alpha = v_pos[:n, :]
    beta = -v_pos[n:, :].conj()
    sym = SymplecticMatrix(alpha, beta)
    fac = WilliamsonFactors(sym, _frozen(lam, float), GaugeInfo(degenerate_blocks=blocks))
    scale = max(1.0, np.linalg.norm(sigma))
    # loose sanity bound; the tolerance contract itself is exercised by the test-suite
    if np.linalg.norm(fac.reconstruct() - sigma) > 1e-6 * scale or sym.symplectic_error() > 1e-6 * scale:
        raise NumericalError("Williamson reconstruction failed")
    return fac


def symplectic_inverse(s):
    """``S^-1 = K S^dag K`` for complex-form symplectic ``S``."""
    k = np.concatenate([np.ones(s.shape[0] // 2), -np.ones(s.shape[0] // 2)])
    return (k[:, None] * s.conj().T) * k[None, :]


def is_symplectic(s, tol=1e-10):
    k = k_matrix(s.shape[0] // 2)
    return np.linalg.norm(s @ k @ s.conj().T - k) <= tol * max(1.0, np.linalg.norm(s) ** 2)


def transform_state(state, t, shift=None):
    """Apply a Gaussian unitary: ``d -> T d + shift``, ``sigma -> T sigma T^dag``."""
    d = t @ state.displacement
    if shift is not None:
        shift = np.asarray(shift, dtype=complex)
        if shift.shape[0] == state.modes:
            shift = np.concatenate([shift, shift.conj()])
        d = d + shift
    sigma = t @ state.covariance @ t.conj().T
    return GaussianState(d, 0.5 * (sigma + sigma.conj().T))
