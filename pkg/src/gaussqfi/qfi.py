"""Quantum Fisher information of one-parameter Gaussian families.

Every public ``qfi_*`` function takes a :class:`~gaussqfi.parametrization.StateFamily`
and a parameter value and returns a :class:`QfiEstimate`. Notation: ``A = K sigma``,
dots are derivatives with respect to the parameter.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import _kernels
from .core import DEFAULT_TOL, k_matrix, symplectic_eigenvalues, symplectic_inverse
from .errors import (
    ApplicabilityError,
    CompositeError,
    ConvergenceError,
    DomainError,
    GaussQfiError,
    InsufficientDerivativesError,
    NumericalError,
    PurityError,
    UnsupportedDerivativeError,
)
from .parametrization import (
    DEFAULT_FD,
    eigenvalue_derivatives_fd,
    evaluate_with_derivatives,
    sigma_second_derivative,
    williamson_jet,
    _projected_p1,
)

TOL_PURE = 1e-9
SERIES_HARD_CAP = 10 ** 6
NU_LADDER = tuple(1.0 + 1e-3 * 2.0 ** -k for k in range(7))


class Method(str, Enum):
    TWO_MODE_COVARIANCE = "two_mode_covariance"
    TWO_MODE_WILLIAMSON = "two_mode_williamson"
    SERIES = "series"
    MULTIMODE_WILLIAMSON = "multimode_williamson"
    ISOTHERMAL = "isothermal"
    PURE_POINT = "pure_point"
    REGULARIZED = "regularized"
    BURES_FD = "bures_fd"
    FOCK_FD = "fock_fd"


class PureConvention(str, Enum):
    """Value of ``lambda_dot^2 / (lambda^2 - 1)`` at a pure mode."""

    PAPER = "paper"  # lambda_ddot, keeps the QFI continuous
    ZERO = "zero"    # 0, exact only for families that stay pure


@dataclass(frozen=True)
class QfiEstimate:
    value: float
    method: Method
    error_bound: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def warnings(self):
        return tuple(self.diagnostics.get("warnings", ()))

    def __float__(self):
        return float(self.value)


def displacement_term(sigma, d_dot):
    """``2 d_dot^dag sigma^-1 d_dot``."""
    return 2.0 * float(np.real(d_dot.conj() @ np.linalg.solve(sigma, d_dot)))


def _pure_mask(lam, tol_pure):
    return np.asarray(lam) <= 1.0 + tol_pure


def _prepare(family, eps, cfg):
    state, bundle = evaluate_with_derivatives(family, eps, cfg)
    sigma = state.covariance
    k = k_matrix(state.modes)
    return state, bundle, k @ sigma, k @ bundle.sigma_dot


# --------------------------------------------------------------------------
# two-mode closed forms
# --------------------------------------------------------------------------

def two_mode_eigenvalue_rates(a, a_dot):
    """``(l1, l2, l1_dot, l2_dot)`` from differentiating the closed-form two-mode spectrum.

    At a degenerate spectrum the rates are not defined and ``None`` is returned
    for both; callers drop the term they multiply (it carries ``l1^2 - l2^2``).
    """
    t = np.trace(a @ a).real
    det = np.linalg.det(a).real
    t_dot = 2.0 * np.trace(a @ a_dot).real
    det_dot = det * np.trace(np.linalg.solve(a, a_dot)).real
    disc = t * t - 16.0 * det
    root = math.sqrt(max(disc, 0.0))
    l1 = 0.5 * math.sqrt(t + root)
    l2 = 0.5 * math.sqrt(max(t - root, 0.0))
    if root <= 1e-9 * t:
        return l1, l2, None, None
    root_dot = (2.0 * t * t_dot - 16.0 * det_dot) / (2.0 * root)
    l1_dot = (t_dot + root_dot) / (8.0 * l1)
    l2_dot = (t_dot - root_dot) / (8.0 * l2)
    return l1, l2, l1_dot, l2_dot


def two_mode_covariance_value(a, a_dot):
    """Symplectic + purity part of the two-mode QFI in terms of ``A`` and ``A_dot``."""
    eye = np.eye(4)
    det = np.linalg.det(a).real
    x = np.linalg.solve(a, a_dot)
    c = eye + a @ a
    y = np.linalg.solve(c, a_dot)
    l1, l2, l1d, l2d = two_mode_eigenvalue_rates(a, a_dot)
    eig_term = 0.0
    if l1d is not None:
        eig_term = 4.0 * (l1 ** 2 - l2 ** 2) * (-(l1d ** 2) / (l1 ** 4 - 1.0) + l2d ** 2 / (l2 ** 4 - 1.0))
    sq = math.sqrt(abs(np.linalg.det(c).real))
    num = det * np.trace(x @ x).real + sq * np.trace(y @ y).real + eig_term
    return num / (2.0 * (det - 1.0)), (l1, l2, l1d, l2d)


def qfi_two_mode(family, eps, cfg=DEFAULT_FD, tol_pure=TOL_PURE, tol=DEFAULT_TOL):
    """Exact two-mode QFI from the covariance matrix, its derivative and the closed-form spectrum."""
    state, bundle, a, a_dot = _prepare(family, eps, cfg)
    if state.modes != 2:
        raise ApplicabilityError("qfi_two_mode needs a two-mode family")
    lam = symplectic_eigenvalues(state.covariance, tol)
    if lam[-1] <= 1.0 + tol_pure:
        raise PurityError(
            f"symplectic eigenvalue {lam[-1]:.12g} is 1: use qfi_regularized for states with pure modes"
        )
    try:
        core, (l1, l2, l1d, l2d) = two_mode_covariance_value(a, a_dot)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular matrix in two-mode formula: {exc}") from exc
    value = core + displacement_term(state.covariance, bundle.d_dot)
    return QfiEstimate(value, Method.TWO_MODE_COVARIANCE, diagnostics={
        "eigenvalues": np.array([l1, l2]),
        "lambda_dot": None if l1d is None else np.array([l1d, l2d]),
        "derivative_tier": bundle.tier,
        "route": Method.TWO_MODE_COVARIANCE.value,
    })


def two_mode_williamson_value(lam, p1, lam_dot):
    """Symplectic + purity part of the two-mode QFI from Williamson data ``(D0, P1, D1)``."""
    lam = np.asarray(lam, dtype=float)
    d0 = np.concatenate([lam, lam])
    d1 = np.concatenate([lam_dot, lam_dot])
    kd = np.array([1.0, 1.0, -1.0, -1.0])
    p = p1
    det_d0 = float(np.prod(d0))
    c = 1.0 + d0 ** 2
    cinv = 1.0 / c
    kp = kd[:, None] * p
    term_a = np.trace(p @ p) - np.trace((1.0 / d0)[:, None] * kp * d0[None, :] @ kp)
    cp = cinv[:, None] * p
    cdkp = (cinv * d0)[:, None] * kp
    term_b = np.trace(cp @ cp) + np.trace(cdkp @ cdkp) - np.trace(cinv[:, None] * (p @ p))
    sym = (det_d0 * term_a + math.sqrt(float(np.prod(c))) * term_b) / (det_d0 - 1.0)
    purity = 0.5 * float(np.sum(d1 ** 2 / ((d0 + kd) * d0)))
    return float(np.real(sym)) + purity


def qfi_two_mode_williamson(family, eps, cfg=DEFAULT_FD, tol_pure=TOL_PURE, tol=DEFAULT_TOL):
    """Two-mode QFI from Williamson factors and ``P1 = S^-1 S_dot``."""
    jet = williamson_jet(family, eps, cfg, tol)
    if jet.state.modes != 2:
        raise ApplicabilityError("qfi_two_mode_williamson needs a two-mode family")
    if np.min(jet.eigenvalues) <= 1.0 + tol_pure:
        raise PurityError("pure mode present: use qfi_regularized")
    core = two_mode_williamson_value(jet.eigenvalues, jet.p1.matrix, jet.lambda_dot)
    value = core + displacement_term(jet.state.covariance, jet.bundle.d_dot)
    return QfiEstimate(value, Method.TWO_MODE_WILLIAMSON, diagnostics={
        "eigenvalues": jet.eigenvalues,
        "lambda_dot": jet.lambda_dot,
        "derivative_tier": jet.tier,
        "route": Method.TWO_MODE_WILLIAMSON.value,
    })


# --------------------------------------------------------------------------
# series
# --------------------------------------------------------------------------

def remainder_bound(a, a_dot, lam_min, order):
    """Bound on the tail of the series after ``order`` terms.

    ``|R_M| <= tr[(A A_dot)^2] / (2 lam_min^(2M+2) (lam_min^2 - 1))``; infinite
    when ``lam_min <= 1``.
    """
    t = abs(np.trace(a @ a_dot @ a @ a_dot).real)
    if t == 0.0:
        return 0.0
    if lam_min <= 1.0:
        return math.inf
    log_b = math.log(t) - math.log(2.0 * (lam_min ** 2 - 1.0)) - (2 * order + 2) * math.log(lam_min)
    return math.exp(log_b) if log_b < 700 else math.inf


def _order_for_tolerance(a, a_dot, lam_min, tol):
    t = abs(np.trace(a @ a_dot @ a @ a_dot).real)
    if t == 0.0:
        return 1
    need = (math.log(t) - math.log(2.0 * (lam_min ** 2 - 1.0) * tol)) / (2.0 * math.log(lam_min)) - 1.0
    m = max(1, int(math.ceil(need)))
    while m > 1 and remainder_bound(a, a_dot, lam_min, m - 1) <= tol:
        m -= 1
    while remainder_bound(a, a_dot, lam_min, m) > tol:
        m += 1
    return m


def series_remainder_bound(family, eps, order, cfg=DEFAULT_FD, tol=DEFAULT_TOL):
    """Remainder bound of :func:`qfi_series` truncated after ``order`` terms."""
    state, bundle, a, a_dot = _prepare(family, eps, cfg)
    lam_min = float(symplectic_eigenvalues(state.covariance, tol)[-1])
    return remainder_bound(a, a_dot, lam_min, order)


def series_partial_sums(a, a_dot, order):
    """``0.5 * sum_{n<=M} tr[(A^-n A_dot)^2]`` for every ``M = 1..order``."""
    a_inv = np.linalg.inv(a)
    return _kernels.series_partial_sums(a_inv, a_dot, order)


def series_rounding_bound(partial_sums, disp, modes):
    """Floating-point allowance ``4 (M + 4N) u (sum_n |term_n| + |displacement|)`` for a summed series."""
    terms = np.diff(np.concatenate([[0.0], np.asarray(partial_sums, dtype=float)]))
    m = terms.shape[0]
    return 4.0 * (m + 4 * modes) * np.finfo(float).eps * (float(np.abs(terms).sum()) + abs(disp))


def qfi_series(family, eps, tol=1e-10, max_order=None, cfg=DEFAULT_FD, tol_pure=TOL_PURE,
               hard_cap=SERIES_HARD_CAP, dtol=DEFAULT_TOL):
    """Multi-mode QFI as the truncated series ``0.5 sum tr[(A^-n A_dot)^2] + 2 d_dot^dag sigma^-1 d_dot``.

    Truncates at the smallest order whose remainder bound is ``<= tol`` (or at
    ``max_order``). ``error_bound`` is that truncation bound plus a rounding
    allowance; both parts are listed in ``diagnostics``.
    """
    state, bundle, a, a_dot = _prepare(family, eps, cfg)
    lam = symplectic_eigenvalues(state.covariance, dtol)
    lam_min = float(lam[-1])
    if lam_min <= 1.0 + tol_pure:
        raise PurityError(f"series diverges for a pure mode (lambda_min = {lam_min:.12g})")
    order = _order_for_tolerance(a, a_dot, lam_min, tol)
    if max_order is not None:
        order = min(order, int(max_order))
    if order > hard_cap:
        raise ConvergenceError(
            f"series needs {order} terms (> cap {hard_cap}) to reach tol={tol:g}",
            achieved=remainder_bound(a, a_dot, lam_min, hard_cap),
        )
    sums = series_partial_sums(a, a_dot, order)
    bound = remainder_bound(a, a_dot, lam_min, order)
    disp = displacement_term(state.covariance, bundle.d_dot)
    value = float(sums[-1]) + disp
    rounding = series_rounding_bound(sums, disp, state.modes)
    return QfiEstimate(value, Method.SERIES, bound + rounding, {
        "eigenvalues": lam,
        "order": order,
        "truncation_bound": bound,
        "rounding_bound": rounding,
        "derivative_tier": bundle.tier,
        "kernel_backend": _kernels.BACKEND,
        "route": Method.SERIES.value,
    })


# --------------------------------------------------------------------------
# exact multi-mode formula
# --------------------------------------------------------------------------

def _fd_lambda_ddot(family, eps, cfg, tol):
    try:
        _, ldd = eigenvalue_derivatives_fd(family, eps, cfg, tol)
    except DomainError as exc:
        raise InsufficientDerivativesError(
            f"second eigenvalue derivative needed at a pure mode but unavailable: {exc}"
        ) from exc
    return ldd


def _lambda_ddot(family, eps, jet, cfg, tol):
    """``lambda_ddot`` in the column order of ``jet.S``."""
    if jet.bundle.lambda_ddot is not None:
        return np.asarray(jet.bundle.lambda_ddot, dtype=float)
    ldd = _fd_lambda_ddot(family, eps, cfg, tol)
    # finite differences follow the descending spectrum; S columns may not
    out = np.empty_like(ldd)
    out[np.argsort(-np.asarray(jet.eigenvalues), kind="stable")] = ldd
    return out


def _descending_lambda_ddot(family, eps, bundle, sigma, cfg, tol):
    """``lambda_ddot`` in descending-eigenvalue order."""
    if bundle.lambda_ddot is None:
        return _fd_lambda_ddot(family, eps, cfg, tol)
    ldd = np.asarray(bundle.lambda_ddot, dtype=float)
    if bundle.S is None:
        return ldd
    s_inv = symplectic_inverse(np.asarray(bundle.S, dtype=complex))
    lam_s = np.real(np.diag(s_inv @ sigma @ s_inv.conj().T))[: ldd.shape[0]]
    return ldd[np.argsort(-lam_s, kind="stable")]


def williamson_terms(lam, p1, lam_dot, pure, lam_ddot=None, convention=PureConvention.PAPER):
    """``(orientation, squeezing, purity)`` parts of the Williamson-form QFI."""
    lam = np.asarray(lam, dtype=float)
    r_abs2 = np.abs(p1.R) ** 2
    q_abs2 = np.abs(p1.Q) ** 2
    orient, squeeze = _kernels.pair_weighted_sums(lam, r_abs2, q_abs2, pure)
    lam_dot = np.asarray(lam_dot, dtype=float)
    purity = 0.0
    for i in range(lam.shape[0]):
        if pure[i]:
            if PureConvention(convention) is PureConvention.PAPER:
                purity += float(lam_ddot[i])
        else:
            purity += lam_dot[i] ** 2 / (lam[i] ** 2 - 1.0)
    return orient, squeeze, purity


def qfi_multimode_williamson(family, eps, convention=PureConvention.PAPER, cfg=DEFAULT_FD,
                             tol_pure=TOL_PURE, tol=DEFAULT_TOL):
    """Exact N-mode QFI from the Williamson decomposition.

    ``sum_ij (l_i-l_j)^2/(l_i l_j-1) |R_ij|^2 + (l_i+l_j)^2/(l_i l_j+1) |Q_ij|^2
    + sum_i l_dot_i^2/(l_i^2-1) + 2 d_dot^dag sigma^-1 d_dot``. At pure modes the
    purity term is ``lambda_ddot`` (``convention="paper"``) or 0 (``"zero"``) and
    the orientation weight of a pure pair is 0.
    """
    jet = williamson_jet(family, eps, cfg, tol)
    lam = np.asarray(jet.eigenvalues, dtype=float)
    pure = _pure_mask(lam, tol_pure)
    warnings = []
    lam_ddot = None
    if pure.any():
        if PureConvention(convention) is PureConvention.PAPER:
            lam_ddot = _lambda_ddot(family, eps, jet, cfg, tol)
        if np.any(np.abs(jet.lambda_dot[pure]) > 1e-6):
            warnings.append("lambda_dot nonzero at a pure mode: family may not be differentiable there")
        warnings.append("pure mode present: attainability of the Cramer-Rao bound not assessed")
    orient, squeeze, purity = williamson_terms(lam, jet.p1, jet.lambda_dot, pure, lam_ddot, convention)
    disp = displacement_term(jet.state.covariance, jet.bundle.d_dot)
    value = orient + squeeze + purity + disp
    return QfiEstimate(value, Method.MULTIMODE_WILLIAMSON, diagnostics={
        "eigenvalues": lam,
        "lambda_dot": jet.lambda_dot,
        "lambda_ddot": lam_ddot,
        "pure_modes": tuple(int(i) for i in np.flatnonzero(pure)),
        "terms": {"orientation": orient, "squeezing": squeeze, "purity": purity, "displacement": disp},
        "derivative_tier": jet.tier,
        "convention": PureConvention(convention).value,
        "warnings": tuple(warnings),
        "route": Method.MULTIMODE_WILLIAMSON.value,
    })


# --------------------------------------------------------------------------
# iso-thermal and pure states
# --------------------------------------------------------------------------

def qfi_isothermal(family, eps, cfg=DEFAULT_FD, tol_iso=1e-8):
    """QFI of an iso-thermal family (``A^2 = nu^2 I`` with constant ``nu``).

    Computes both ``nu^2/(2(1+nu^2)) tr[(A^-1 A_dot)^2]`` and the inversion-free
    ``-tr[A_dot^2]/(2(1+nu^2))``; the first is returned, their difference is
    reported in diagnostics.
    """
    state, bundle, a, a_dot = _prepare(family, eps, cfg)
    dim = a.shape[0]
    a2 = a @ a
    nu2 = np.trace(a2).real / dim
    if np.linalg.norm(a2 - nu2 * np.eye(dim)) > tol_iso * max(1.0, nu2):
        raise ApplicabilityError("state is not iso-thermal (A^2 != nu^2 I)")
    anti = a @ a_dot + a_dot @ a
    if np.linalg.norm(anti) > tol_iso * max(1.0, np.linalg.norm(a) * np.linalg.norm(a_dot)):
        raise ApplicabilityError("iso-thermal formula needs a constant nu (A A_dot + A_dot A = 0)")
    nu = math.sqrt(nu2)
    x = np.linalg.solve(a, a_dot)
    inverting = nu2 / (2.0 * (1.0 + nu2)) * np.trace(x @ x).real
    direct = -np.trace(a_dot @ a_dot).real / (2.0 * (1.0 + nu2))
    value = inverting + displacement_term(state.covariance, bundle.d_dot)
    return QfiEstimate(value, Method.ISOTHERMAL, diagnostics={
        "nu": nu,
        "inversion_free": direct,
        "form_mismatch": abs(inverting - direct),
        "derivative_tier": bundle.tier,
        "route": Method.ISOTHERMAL.value,
    })


def qfi_pure_point(family, eps, cfg=DEFAULT_FD, tol_pure=TOL_PURE, tol=DEFAULT_TOL):
    """QFI at a point where every mode is pure.

    ``H = (2 tr[A^-1 A_ddot] - tr[(A^-1 A_dot)^2]) / 4 + 2 d_dot^dag sigma^-1 d_dot``;
    valid whether or not the family stays pure away from the point.
    """
    state, bundle, a, a_dot = _prepare(family, eps, cfg)
    lam = symplectic_eigenvalues(state.covariance, tol)
    if lam[0] > 1.0 + tol_pure:
        raise ApplicabilityError("qfi_pure_point needs all symplectic eigenvalues equal to 1")
    sigma_ddot = sigma_second_derivative(family, eps, bundle, cfg)
    k = k_matrix(state.modes)
    x = np.linalg.solve(a, a_dot)
    y = np.linalg.solve(a, k @ sigma_ddot)
    core = 0.25 * (2.0 * np.trace(y).real - np.trace(x @ x).real)
    value = core + displacement_term(state.covariance, bundle.d_dot)
    return QfiEstimate(value, Method.PURE_POINT, diagnostics={
        "eigenvalues": lam,
        "pure_state_formula": 0.25 * np.trace(x @ x).real,
        "derivative_tier": bundle.tier,
        "second_derivative_tier": "supplied" if bundle.sigma_ddot is not None else "fd",
        "warnings": ("pure state: attainability of the Cramer-Rao bound not assessed",),
        "route": Method.PURE_POINT.value,
    })


# --------------------------------------------------------------------------
# regularisation
# --------------------------------------------------------------------------

def _neville(xs, ys, x0=0.0):
    p = list(ys)
    n = len(xs)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = ((x0 - xs[i + m]) * p[i] + (xs[i] - x0) * p[i + 1]) / (xs[i] - xs[i + m])
    return p[0]


def _scaled_qfi(nu, sigma, sigma_dot, d_dot, tol):
    """QFI of the family ``nu * sigma(eps)`` (all symplectic eigenvalues > 1 for nu > 1)."""
    n = sigma.shape[0] // 2
    ss = nu * sigma
    sd = nu * sigma_dot
    disp = displacement_term(ss, d_dot)
    if n == 2:
        k = k_matrix(2)
        core, _ = two_mode_covariance_value(k @ ss, k @ sd)
        return core + disp
    from .core import williamson_decompose

    fac = williamson_decompose(ss, tol)
    lam = np.asarray(fac.eigenvalues)
    p1, lam_dot = _projected_p1(fac.S, lam, sd, tol.degen)
    pure = np.zeros(n, dtype=bool)
    o, s, p = williamson_terms(lam, p1, lam_dot, pure)
    return o + s + p + disp


def qfi_regularized(family, eps, convention=PureConvention.PAPER, path="analytic", cfg=DEFAULT_FD,
                    tol_pure=TOL_PURE, tol=DEFAULT_TOL):
    """QFI valid at states with pure modes: ``lim_{nu->1} H(nu sigma) + sum_{pure i} lambda_ddot_i``.

    ``path="analytic"`` evaluates the Williamson formula with the pure-mode
    limits built in; ``path="ladder"`` evaluates ``H(nu sigma)`` on
    ``nu = 1 + 1e-3 * 2^-k`` (k = 0..6) and Richardson-extrapolates to ``nu = 1``.
    ``path="auto"`` tries the analytic path and falls back to the ladder.
    """
    if path in ("analytic", "auto"):
        try:
            est = qfi_multimode_williamson(family, eps, convention, cfg, tol_pure, tol)
            diag = dict(est.diagnostics)
            diag["route"] = "regularized/analytic"
            return QfiEstimate(est.value, Method.REGULARIZED, diagnostics=diag)
        except UnsupportedDerivativeError:
            if path == "analytic":
                raise
    if path not in ("ladder", "auto"):
        raise ValueError(f"unknown path {path!r}")
    state, bundle = evaluate_with_derivatives(family, eps, cfg)
    sigma = state.covariance
    lam = symplectic_eigenvalues(sigma, tol)
    pure = _pure_mask(lam, tol_pure)
    hs = [nu - 1.0 for nu in NU_LADDER]
    vals = [_scaled_qfi(nu, sigma, bundle.sigma_dot, bundle.d_dot, tol) for nu in NU_LADDER]
    limit = _neville(hs, vals)
    correction = 0.0
    lam_ddot = None
    if pure.any() and PureConvention(convention) is PureConvention.PAPER:
        lam_ddot = _descending_lambda_ddot(family, eps, bundle, sigma, cfg, tol)
        correction = float(np.sum(lam_ddot[pure]))
    return QfiEstimate(limit + correction, Method.REGULARIZED, diagnostics={
        "eigenvalues": lam,
        "nu_path": list(zip(NU_LADDER, vals)),
        "nu_limit": limit,
        "lambda_ddot": lam_ddot,
        "pure_modes": tuple(int(i) for i in np.flatnonzero(pure)),
        "derivative_tier": bundle.tier,
        "convention": PureConvention(convention).value,
        "route": "regularized/ladder",
    })


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def _is_isothermal(a, tol_iso=1e-8):
    dim = a.shape[0]
    a2 = a @ a
    nu2 = np.trace(a2).real / dim
    return np.linalg.norm(a2 - nu2 * np.eye(dim)) <= tol_iso * max(1.0, nu2)


def qfi_auto(family, eps, tol=1e-10, convention=PureConvention.PAPER, cfg=DEFAULT_FD,
             tol_pure=TOL_PURE, dtol=DEFAULT_TOL):
    """Pick a method from the state's structure; the route taken is in ``diagnostics["route"]``.

    Order: all pure -> pure-point (then regularised); iso-thermal -> iso-thermal;
    some pure modes -> regularised; two modes -> covariance form; otherwise the
    exact Williamson form when ``P1`` is obtainable, else the series.
    """
    state = family.evaluator(eps)
    lam = symplectic_eigenvalues(state.covariance, dtol)
    pure = _pure_mask(lam, tol_pure)
    a = k_matrix(state.modes) @ state.covariance

    routes = []
    if pure.all():
        routes.append((Method.PURE_POINT, lambda: qfi_pure_point(family, eps, cfg, tol_pure, dtol)))
        routes.append((Method.REGULARIZED, lambda: qfi_regularized(family, eps, convention, "auto", cfg, tol_pure, dtol)))
    else:
        if _is_isothermal(a):
            routes.append((Method.ISOTHERMAL, lambda: qfi_isothermal(family, eps, cfg)))
        if pure.any():
            routes.append((Method.REGULARIZED, lambda: qfi_regularized(family, eps, convention, "auto", cfg, tol_pure, dtol)))
        elif state.modes == 2:
            routes.append((Method.TWO_MODE_COVARIANCE, lambda: qfi_two_mode(family, eps, cfg, tol_pure, dtol)))
        routes.append((Method.MULTIMODE_WILLIAMSON,
                       lambda: qfi_multimode_williamson(family, eps, convention, cfg, tol_pure, dtol)))
        if not pure.any():
            routes.append((Method.SERIES, lambda: qfi_series(family, eps, tol, None, cfg, tol_pure, dtol=dtol)))

    failures = {}
    for method, run in routes:
        try:
            est = run()
        except GaussQfiError as exc:
            failures[method.value] = exc
            continue
        diag = dict(est.diagnostics)
        diag["route"] = method.value
        if failures:
            diag["skipped_routes"] = {k: str(v) for k, v in failures.items()}
        return QfiEstimate(est.value, est.method, est.error_bound, diag)
    raise CompositeError(failures)


METHODS = {
    Method.TWO_MODE_COVARIANCE: qfi_two_mode,
    Method.TWO_MODE_WILLIAMSON: qfi_two_mode_williamson,
    Method.SERIES: qfi_series,
    Method.MULTIMODE_WILLIAMSON: qfi_multimode_williamson,
    Method.ISOTHERMAL: qfi_isothermal,
    Method.PURE_POINT: qfi_pure_point,
    Method.REGULARIZED: qfi_regularized,
}
