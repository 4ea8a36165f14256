"""Random symplectic matrices, states and analytic families for tests and benchmarks."""

import numpy as np
from scipy.linalg import expm
from scipy.stats import unitary_group

from .core import GaussianState
from .parametrization import DerivativeBundle, StateFamily, random_algebra_element


def passive(u):
    """Passive (photon-number preserving) symplectic ``diag(U, conj U)``."""
    z = np.zeros_like(u)
    return np.block([[u, z], [z, u.conj()]])


def squeezer(r):
    """Product of single-mode squeezers ``[[cosh r, -sinh r], [-sinh r, cosh r]]`` (complex form)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    c = np.diag(np.cosh(r)).astype(complex)
    s = np.diag(-np.sinh(r)).astype(complex)
    return np.block([[c, s], [s, c]])


def random_symplectic(n, rng, max_squeeze=0.8):
    """Bloch-Messiah style ``P(U) Sq(r) P(V)`` with ``r`` uniform in ``[0, max_squeeze]``."""
    u = unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.random()) * np.eye(1)
    v = unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.random()) * np.eye(1)
    return passive(np.atleast_2d(u)) @ squeezer(rng.uniform(0, max_squeeze, n)) @ passive(np.atleast_2d(v))


def random_state(n, rng, lam_range=(1.2, 3.0), max_squeeze=0.8, max_disp=1.0):
    """Random physical state ``S diag(L, L) S^dag`` with displacement."""
    s = random_symplectic(n, rng, max_squeeze)
    lam = rng.uniform(*lam_range, n)
    d = np.diag(np.concatenate([lam, lam]))
    sigma = s @ d @ s.conj().T
    amp = max_disp * (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)
    return GaussianState.from_amplitudes(amp, 0.5 * (sigma + sigma.conj().T))


def analytic_family(s0, lam0, x, lam_rate, d0, drift):
    """``sigma(eps) = S(eps) D(eps) S(eps)^dag`` with ``S = e^{X eps} S0`` and ``lambda = lam0 + eps * rate``.

    All derivatives, including ``S``/``S_dot``, are supplied analytically.
    """
    s0 = np.asarray(s0, dtype=complex)
    lam0 = np.asarray(lam0, dtype=float)
    rate = np.asarray(lam_rate, dtype=float)
    x = np.asarray(x, dtype=complex)
    d0 = np.asarray(d0, dtype=complex)
    v = np.asarray(drift, dtype=complex)
    n = lam0.shape[0]

    def parts(eps):
        s = expm(x * eps) @ s0
        lam = lam0 + eps * rate
        return s, np.diag(np.concatenate([lam, lam])), np.diag(np.concatenate([rate, rate]))

    def evaluator(eps):
        s, d, _ = parts(eps)
        sigma = s @ d @ s.conj().T
        return GaussianState(d0 + eps * v, 0.5 * (sigma + sigma.conj().T))

    def derivatives(eps):
        s, d, dd = parts(eps)
        sd = x @ s
        sdd = x @ sd
        sigma_dot = sd @ d @ s.conj().T + s @ dd @ s.conj().T + s @ d @ sd.conj().T
        sigma_ddot = (
            sdd @ d @ s.conj().T
            + 2 * sd @ dd @ s.conj().T
            + 2 * sd @ d @ sd.conj().T
            + 2 * s @ dd @ sd.conj().T
            + s @ d @ sdd.conj().T
        )
        return DerivativeBundle(
            sigma_dot=0.5 * (sigma_dot + sigma_dot.conj().T),
            d_dot=v.copy(),
            sigma_ddot=0.5 * (sigma_ddot + sigma_ddot.conj().T),
            lambda_dot=rate.copy(),
            lambda_ddot=np.zeros(n),
            S=s,
            S_dot=sd,
        )

    lo = -np.inf
    hi = np.inf
    for l0, c in zip(lam0, rate):
        if c > 0:
            lo = max(lo, (1.0 - l0) / c)
        elif c < 0:
            hi = min(hi, (1.0 - l0) / c)
    return StateFamily(evaluator, derivatives, domain=(lo, hi), name="analytic")


def random_analytic_family(n, rng, lam_range=(1.2, 3.0), rate_scale=0.3, max_squeeze=0.8,
                           gen_scale=0.5, max_disp=1.0):
    """Random mixed family with analytic derivatives, evaluated around ``eps = 0``."""
    s0 = random_symplectic(n, rng, max_squeeze)
    lam0 = rng.uniform(*lam_range, n)
    x = random_algebra_element(n, rng, gen_scale)
    rate = rate_scale * rng.normal(size=n)
    amp = max_disp * (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)
    vel = max_disp * (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)
    d0 = np.concatenate([amp, amp.conj()])
    v = np.concatenate([vel, vel.conj()])
    return analytic_family(s0, lam0, x, rate, d0, v)
