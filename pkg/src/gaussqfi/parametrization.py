"""One-parameter families of Gaussian states and their derivatives.

A :class:`StateFamily` maps ``eps -> GaussianState``. Derivatives come from
one of three tiers, best first:

* ``generator``: the family is ``sigma(eps) = e^{X eps} sigma_0 e^{X^dag eps}``
  (plus an optional linear displacement drift); everything is exact.
* ``analytic``: the caller supplies a :class:`DerivativeBundle`.
* ``fd``: central finite differences of the evaluator.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.linalg import expm

from .core import (
    DEFAULT_TOL,
    GaussianState,
    symplectic_eigenvalues,
    symplectic_inverse,
    transform_state,
    williamson_decompose,
)
from .errors import DomainError, StructuralError, UnsupportedDerivativeError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class FdConfig:
    """Finite-difference steps; ``None`` selects the scale-aware default."""

    step_first: Optional[float] = None
    step_second: Optional[float] = None

    def __post_init__(self):
        for h in (self.step_first, self.step_second):
            if h is not None and not h > 0:
                raise DomainError("finite-difference steps must be positive")

    def first(self, eps):
        if self.step_first is not None:
            return self.step_first
        return np.cbrt(_EPS) * max(1.0, abs(eps))

    def second(self, eps):
        if self.step_second is not None:
            return self.step_second
        return _EPS ** 0.25 * max(1.0, abs(eps))


DEFAULT_FD = FdConfig()


@dataclass(frozen=True)
class DerivativeBundle:
    """Derivatives of a family at one point.

    ``lambda_dot``/``lambda_ddot`` follow the column order of ``S`` when ``S``
    is given, otherwise descending eigenvalue order. ``S``/``S_dot`` must be a
    Williamson factor of the covariance at the same point and its derivative.
    """

    sigma_dot: np.ndarray
    d_dot: np.ndarray
    sigma_ddot: Optional[np.ndarray] = None
    lambda_dot: Optional[np.ndarray] = None
    lambda_ddot: Optional[np.ndarray] = None
    S: Optional[np.ndarray] = None
    S_dot: Optional[np.ndarray] = None
    tier: str = "analytic"


@dataclass(frozen=True)
class StateFamily:
    """A differentiable map ``eps -> GaussianState``.

    Evaluators (and derivative callables) must be reentrant: they may be called
    concurrently for different ``eps``.
    """

    evaluator: Callable[[float], GaussianState]
    derivatives: Optional[Callable[[float], DerivativeBundle]] = None
    generator: Optional[np.ndarray] = None
    domain: tuple = (-np.inf, np.inf)
    name: str = ""

    def __call__(self, eps):
        return self.evaluator(eps)

    @property
    def tier(self):
        if self.generator is not None:
            return "generator"
        if self.derivatives is not None:
            return "analytic"
        return "fd"

    def without_derivatives(self):
        """The same map with only the finite-difference tier available."""
        return StateFamily(self.evaluator, domain=self.domain, name=self.name)

    def transformed(self, t, shift=None):
        """Family ``eps -> T rho(eps) T^dag`` displaced by a constant ``shift``."""
        t = np.asarray(t, dtype=complex)
        ev = self.evaluator

        def evaluator(eps):
            return transform_state(ev(eps), t, shift)

        deriv = None
        if self.derivatives is not None:
            base = self.derivatives

            def deriv(eps):
                b = base(eps)
                return DerivativeBundle(
                    sigma_dot=t @ b.sigma_dot @ t.conj().T,
                    d_dot=t @ b.d_dot,
                    sigma_ddot=None if b.sigma_ddot is None else t @ b.sigma_ddot @ t.conj().T,
                    lambda_dot=b.lambda_dot,
                    lambda_ddot=b.lambda_ddot,
                    S=None if b.S is None else t @ b.S,
                    S_dot=None if b.S_dot is None else t @ b.S_dot,
                    tier=b.tier,
                )

        gen = None
        if self.generator is not None:
            gen = t @ self.generator @ symplectic_inverse(t)
        return StateFamily(evaluator, deriv, gen, self.domain, self.name)


def _pair(vec, n):
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    if vec.shape[0] == n:
        return np.concatenate([vec, vec.conj()])
    return vec


def generator_family(state0, generator=None, drift=None, name=""):
    """``sigma(eps) = E sigma_0 E^dag``, ``d(eps) = E d_0 + eps * drift`` with ``E = e^{X eps}``.

    Args:
        state0: the state at ``eps = 0``.
        generator: complex-form symplectic algebra element ``X`` (``X^dag = -K X K``);
            ``None`` means no symplectic action.
        drift: constant displacement velocity, either N amplitudes or a full 2N vector.
    """
    n = state0.modes
    x = np.zeros((2 * n, 2 * n), dtype=complex) if generator is None else np.asarray(generator, dtype=complex)
    v = np.zeros(2 * n, dtype=complex) if drift is None else _pair(drift, n)
    sigma0 = state0.covariance
    d0 = state0.displacement
    xd = x.conj().T

    def evaluator(eps):
        e = expm(x * eps)
        s = e @ sigma0 @ e.conj().T
        return GaussianState(e @ d0 + eps * v, 0.5 * (s + s.conj().T))

    def derivatives(eps):
        e = expm(x * eps)
        s = e @ sigma0 @ e.conj().T
        s = 0.5 * (s + s.conj().T)
        return DerivativeBundle(
            sigma_dot=x @ s + s @ xd,
            d_dot=x @ e @ d0 + v,
            sigma_ddot=x @ x @ s + 2.0 * x @ s @ xd + s @ xd @ xd,
            lambda_dot=np.zeros(n),
            lambda_ddot=np.zeros(n),
            tier="generator",
        )

    return StateFamily(evaluator, derivatives, x, name=name)


def _check_domain(family, eps, h):
    lo, hi = family.domain
    if not (lo + h <= eps <= hi - h):
        raise DomainError(f"eps={eps} is closer than {h:g} to the family domain boundary {family.domain}")


def evaluate_with_derivatives(family, eps, cfg=DEFAULT_FD):
    """State and first-order derivatives at ``eps``.

    Analytic and generator tiers pass through; otherwise central differences
    ``(f(eps+h) - f(eps-h)) / 2h`` with ``h = cfg.first(eps)``.
    """
    lo, hi = family.domain
    if not (lo <= eps <= hi):
        raise DomainError(f"eps={eps} outside family domain {family.domain}")
    state = family.evaluator(eps)
    if family.derivatives is not None:
        return state, family.derivatives(eps)
    h = cfg.first(eps)
    _check_domain(family, eps, h)
    plus = family.evaluator(eps + h)
    minus = family.evaluator(eps - h)
    sd = (plus.covariance - minus.covariance) / (2 * h)
    dd = (plus.displacement - minus.displacement) / (2 * h)
    return state, DerivativeBundle(sigma_dot=0.5 * (sd + sd.conj().T), d_dot=dd, tier="fd")


def sigma_second_derivative(family, eps, bundle=None, cfg=DEFAULT_FD):
    """``sigma''(eps)``: from the bundle when present, else a second central difference."""
    if bundle is not None and bundle.sigma_ddot is not None:
        return bundle.sigma_ddot
    h = cfg.second(eps)
    _check_domain(family, eps, h)
    s = family.evaluator(eps).covariance
    sp = family.evaluator(eps + h).covariance
    sm = family.evaluator(eps - h).covariance
    out = (sp - 2.0 * s + sm) / (h * h)
    return 0.5 * (out + out.conj().T)


def eigenvalue_derivatives_fd(family, eps, cfg=DEFAULT_FD, tol=DEFAULT_TOL):
    """``(lambda_dot, lambda_ddot)`` of the sorted symplectic spectrum by central differences."""
    h1, h2 = cfg.first(eps), cfg.second(eps)
    _check_domain(family, eps, max(h1, h2))
    lam = symplectic_eigenvalues(family.evaluator(eps).covariance, tol)
    p1 = symplectic_eigenvalues(family.evaluator(eps + h1).covariance, tol)
    m1 = symplectic_eigenvalues(family.evaluator(eps - h1).covariance, tol)
    p2 = symplectic_eigenvalues(family.evaluator(eps + h2).covariance, tol)
    m2 = symplectic_eigenvalues(family.evaluator(eps - h2).covariance, tol)
    return (p1 - m1) / (2 * h1), (p2 - 2 * lam + m2) / (h2 * h2)


# --------------------------------------------------------------------------
# P1 = S^-1 S_dot
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class P1Blocks:
    """``P1 = [[R, Q], [conj Q, conj R]]`` with ``R`` skew-Hermitian, ``Q`` symmetric."""

    R: np.ndarray
    Q: np.ndarray
    tier: str = ""

    @property
    def matrix(self):
        return np.block([[self.R, self.Q], [self.Q.conj(), self.R.conj()]])

    @classmethod
    def from_matrix(cls, p, tier=""):
        n = p.shape[0] // 2
        r = p[:n, :n]
        q = p[:n, n:]
        return cls(0.5 * (r - r.conj().T), 0.5 * (q + q.T), tier)


@dataclass(frozen=True)
class WilliamsonJet:
    """Williamson data at one point plus first derivatives, all in one gauge.

    ``eigenvalues`` follow the column order of ``S``; ``degenerate`` records
    whether the spectrum at the point has (near-)coincident eigenvalues.
    """

    state: GaussianState
    bundle: DerivativeBundle
    S: np.ndarray
    eigenvalues: np.ndarray
    p1: P1Blocks
    lambda_dot: np.ndarray
    tier: str
    degenerate: bool


def _projected_p1(s, lam, sigma_dot, degen_tol):
    """Exact ``P1`` (in the gauge with vanishing R-diagonal) from ``sigma_dot``.

    With ``M = S^-1 sigma_dot S^-dag``: ``M_ij = P_ij (d_j - k_i k_j d_i) + D1_ij``.
    Entries of R inside a degenerate cluster are pure gauge and set to zero;
    their weight in every QFI formula vanishes.
    """
    n = lam.shape[0]
    s_inv = symplectic_inverse(s)
    m = s_inv @ sigma_dot @ s_inv.conj().T
    ma = m[:n, :n]
    mb = m[:n, n:]
    diff = lam[None, :] - lam[:, None]
    mask = np.abs(diff) > degen_tol * np.maximum(1.0, lam[:, None])
    r = np.where(mask, ma / np.where(mask, diff, 1.0), 0.0)
    q = mb / (lam[:, None] + lam[None, :])
    return P1Blocks(0.5 * (r - r.conj().T), 0.5 * (q + q.T)), np.real(np.diag(ma)).copy()


def _gauge_match(s, ref, n):
    """Right-multiply ``s`` by the diagonal phase gauge minimising ``||s G - ref||_F``."""
    z = np.einsum("ij,ij->j", ref[:, :n].conj(), s[:, :n]) + np.einsum(
        "ij,ij->j", ref[:, n:].conj(), s[:, n:]
    ).conj()
    g = np.where(np.abs(z) > 0, z.conj() / np.maximum(np.abs(z), 1e-300), 1.0)
    return s * np.concatenate([g, g.conj()])[None, :]


def williamson_jet(family, eps, cfg=DEFAULT_FD, tol=DEFAULT_TOL):
    """Williamson factors, ``P1`` and ``lambda_dot`` at ``eps`` from the best available tier.

    Raises:
        UnsupportedDerivativeError: finite-difference tier on a degenerate spectrum.
    """
    state, bundle = evaluate_with_derivatives(family, eps, cfg)
    n = state.modes
    sigma = state.covariance
    if bundle.S is not None and bundle.S_dot is not None:
        s = np.asarray(bundle.S, dtype=complex)
        s_inv = symplectic_inverse(s)
        dmat = s_inv @ sigma @ s_inv.conj().T
        lam = np.real(np.diag(dmat)[:n]).copy()
        off = dmat - np.diag(np.diag(dmat))
        if np.linalg.norm(off) > 1e-8 * max(1.0, np.linalg.norm(sigma)):
            raise StructuralError("supplied S does not diagonalise the covariance")
        p1 = P1Blocks.from_matrix(s_inv @ bundle.S_dot, "analytic_S")
        if bundle.lambda_dot is not None:
            lam_dot = np.asarray(bundle.lambda_dot, dtype=float)
        else:
            md = s_inv @ bundle.sigma_dot @ s_inv.conj().T
            lam_dot = np.real(np.diag(md)[:n]).copy()
        srt = np.sort(lam)[::-1]
        degenerate = bool(np.any(np.abs(np.diff(srt)) < tol.degen * np.maximum(1.0, srt[1:])))
        return WilliamsonJet(state, bundle, s, lam, p1, lam_dot, "analytic_S", degenerate)

    fac = williamson_decompose(sigma, tol)
    s = fac.S
    lam = np.array(fac.eigenvalues)
    degenerate = fac.gauge.degenerate
    if family.generator is not None:
        x = np.asarray(family.generator, dtype=complex)
        p1 = P1Blocks.from_matrix(symplectic_inverse(s) @ x @ s, "generator")
        return WilliamsonJet(state, bundle, s, lam, p1, np.zeros(n), "generator", degenerate)
    if bundle.tier != "fd":
        p1, lam_dot = _projected_p1(s, lam, bundle.sigma_dot, tol.degen)
        if bundle.lambda_dot is not None:
            lam_dot = np.asarray(bundle.lambda_dot, dtype=float)
        return WilliamsonJet(state, bundle, s, lam, replace(p1, tier="analytic_sigma"), lam_dot,
                             "analytic_sigma", degenerate)

    if degenerate:
        raise UnsupportedDerivativeError(
            "finite-difference P1 on a degenerate symplectic spectrum is gauge-ambiguous"
        )
    h = cfg.first(eps)
    _check_domain(family, eps, h)
    fp = williamson_decompose(family.evaluator(eps + h).covariance, tol)
    fm = williamson_decompose(family.evaluator(eps - h).covariance, tol)
    sp = _gauge_match(fp.S, s, n)
    sm = _gauge_match(fm.S, s, n)
    s_dot = (sp - sm) / (2 * h)
    p1 = P1Blocks.from_matrix(symplectic_inverse(s) @ s_dot, "fd")
    lam_dot = (np.asarray(fp.eigenvalues) - np.asarray(fm.eigenvalues)) / (2 * h)
    return WilliamsonJet(state, bundle, s, lam, p1, lam_dot, "fd", False)


def p1_matrix(family, eps, cfg=DEFAULT_FD, tol=DEFAULT_TOL):
    """``P1 = S^-1 S_dot`` split into its ``R`` and ``Q`` blocks (tier recorded in ``.tier``)."""
    return williamson_jet(family, eps, cfg, tol).p1


def random_algebra_element(n, rng, scale=1.0):
    """Random ``X = [[R, Q], [conj Q, conj R]]``, R skew-Hermitian, Q symmetric."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    r = 0.5 * (a - a.conj().T) * scale
    q = 0.5 * (b + b.T) * scale
    return np.block([[r, q], [q.conj(), r.conj()]])
