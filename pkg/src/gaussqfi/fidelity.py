"""Two-mode Gaussian fidelity and the Bures-limit QFI estimate built on it."""

from dataclasses import dataclass

import numpy as np

from .core import k_matrix
from .errors import NumericalError, StructuralError

_CLAMP = 1e-12


@dataclass(frozen=True)
class FidelityBreakdown:
    value: float
    Delta: float
    Gamma: float
    Lambda: float
    displacement_factor: float


def two_mode_fidelity(state1, state2):
    """Uhlmann fidelity of two two-mode Gaussian states.

    ``F = 4 exp(-dd^dag (s1+s2)^-1 dd) / ((sqrt G + sqrt L) - sqrt((sqrt G + sqrt L)^2 - Delta))``
    with ``Delta = det(s1+s2)``, ``G = det(I + K s1 K s2)``, ``L = det(s1+K) det(s2+K)``.
    """
    if state1.modes != 2 or state2.modes != 2:
        raise StructuralError("two_mode_fidelity needs two-mode states")
    s1, s2 = state1.covariance, state2.covariance
    k = k_matrix(2)
    total = s1 + s2
    delta = np.linalg.det(total).real
    gamma = np.linalg.det(np.eye(4) + k @ s1 @ k @ s2).real
    lam = (np.linalg.det(s1 + k) * np.linalg.det(s2 + k)).real
    scale = max(1.0, abs(delta), abs(gamma))
    for name, val in (("Gamma", gamma), ("Lambda", lam)):
        if val < -_CLAMP * scale:
            raise NumericalError(f"{name} = {val:.3g} is negative")
    g = np.sqrt(max(gamma, 0.0))
    l = np.sqrt(max(lam, 0.0))
    inner = (g + l) ** 2 - delta
    if inner < -_CLAMP * scale:
        raise NumericalError(f"fidelity square-root argument {inner:.3g} is negative")
    denom = (g + l) - np.sqrt(max(inner, 0.0))
    if denom <= 0:
        raise NumericalError("non-positive fidelity denominator")
    dd = state1.displacement - state2.displacement
    expo = (dd.conj() @ np.linalg.solve(total, dd)).real
    factor = float(np.exp(-expo))
    return FidelityBreakdown(float(4.0 * factor / denom), float(delta), float(gamma), float(lam), factor)


def bures_qfi_fd(family, eps, step=1e-3):
    """``8 (1 - sqrt F(rho_eps, rho_{eps+h})) / h^2`` averaged over ``h = +-step``."""
    if not step > 0:
        raise ValueError("step must be positive")
    rho = family.evaluator(eps)
    vals = []
    for h in (step, -step):
        f = two_mode_fidelity(rho, family.evaluator(eps + h)).value
        vals.append(8.0 * (1.0 - np.sqrt(f)) / (h * h))
    return 0.5 * (vals[0] + vals[1])
