"""Probe states, Gaussian channels and the squeezing-channel metrology example.

A probe is prepared as ``D R_theta S_r rho_th`` (plus an optional two-mode
squeezer before the displacement); a channel ``S_eps`` then imprints the
parameter. Single-mode operators in Fock space:
``S_r = exp(r/2 (a^2 - a^dag^2))``, ``R_theta = exp(-i theta a^dag a)``,
``D_alpha = exp(alpha a^dag - conj(alpha) a)``.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm, sqrtm

from .core import GaussianState, k_matrix, to_real
from .errors import DomainError, StructuralError
from .parametrization import generator_family


def _per_mode(value, n, dtype=float):
    arr = np.atleast_1d(np.asarray(value, dtype=dtype)).reshape(-1)
    if arr.shape[0] == 1 and n > 1:
        arr = np.repeat(arr, n)
    if arr.shape[0] != n:
        raise StructuralError(f"expected {n} per-mode values, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True)
class ProbeSpec:
    """Per-mode thermal occupation, squeezing, rotation and displacement amplitude.

    Scalars are broadcast to every mode. ``two_mode_squeezing`` needs ``modes == 2``.
    """

    n_th: object = 0.0
    r: object = 0.0
    theta: object = 0.0
    displacement: object = 0.0
    two_mode_squeezing: float = 0.0
    modes: int = 1

    def __post_init__(self):
        n = int(self.modes)
        if n < 1:
            raise StructuralError("a probe needs at least one mode")
        object.__setattr__(self, "modes", n)
        object.__setattr__(self, "n_th", _per_mode(self.n_th, n))
        object.__setattr__(self, "r", _per_mode(self.r, n))
        object.__setattr__(self, "theta", _per_mode(self.theta, n))
        object.__setattr__(self, "displacement", _per_mode(self.displacement, n, complex))
        object.__setattr__(self, "two_mode_squeezing", float(self.two_mode_squeezing))
        if np.any(self.n_th < 0):
            raise DomainError("thermal occupation must be non-negative")
        if self.two_mode_squeezing != 0.0 and n != 2:
            raise StructuralError("two-mode squeezing needs exactly two modes")

    @property
    def lambda1(self):
        """Symplectic eigenvalues ``1 + 2 n_th``."""
        return 1.0 + 2.0 * self.n_th

    def photon_number(self):
        """``n_d + n_th + (1 + 2 n_th) sinh^2 r`` summed over modes (no two-mode squeezing)."""
        return float(np.sum(np.abs(self.displacement) ** 2 + self.n_th + self.lambda1 * np.sinh(self.r) ** 2))


def squeeze_generator(n, modes=None):
    """Complex-form generator of ``exp(eps/2 (a^2 - a^dag^2))`` on the chosen modes."""
    sel = np.zeros(n)
    sel[list(range(n)) if modes is None else list(modes)] = 1.0
    z = np.zeros((n, n))
    b = -np.diag(sel)
    return np.block([[z, b], [b, z]]).astype(complex)


def rotation_generator(n, modes=None):
    """Complex-form generator of ``exp(-i eps a^dag a)`` on the chosen modes."""
    sel = np.zeros(n)
    sel[list(range(n)) if modes is None else list(modes)] = 1.0
    return np.diag(np.concatenate([-1j * sel, 1j * sel]))


def two_mode_squeeze_generator():
    """Complex-form generator of ``exp(eps (a1 a2 - a1^dag a2^dag))``."""
    z = np.zeros((2, 2))
    b = -np.array([[0.0, 1.0], [1.0, 0.0]])
    return np.block([[z, b], [b, z]]).astype(complex)


def is_algebra_element(x, tol=1e-12):
    """``X^dag = -K X K``."""
    k = k_matrix(x.shape[0] // 2)
    return np.linalg.norm(x.conj().T + k @ x @ k) <= tol * max(1.0, np.linalg.norm(x))


CHANNEL_KINDS = ("squeeze", "rotate", "displace", "two_mode_squeeze")


@dataclass(frozen=True)
class ChannelSpec:
    """Parameter-imprinting Gaussian unitary ``exp(eps G)``.

    ``modes`` restricts squeezing/rotation to a subset (default: all);
    ``direction`` is the displacement velocity (default 1 on every mode).
    """

    kind: str = "squeeze"
    modes: Optional[tuple] = None
    direction: object = None

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise StructuralError(f"unknown channel kind {self.kind!r}; expected one of {CHANNEL_KINDS}")
        if self.modes is not None:
            object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))

    def generator(self, n):
        if self.modes is not None and any(m < 0 or m >= n for m in self.modes):
            raise StructuralError(f"channel modes {self.modes} out of range for {n} modes")
        if self.kind == "squeeze":
            x = squeeze_generator(n, self.modes)
        elif self.kind == "rotate":
            x = rotation_generator(n, self.modes)
        elif self.kind == "two_mode_squeeze":
            if n != 2:
                raise StructuralError("two-mode squeezing channel needs two modes")
            x = two_mode_squeeze_generator()
        else:
            x = np.zeros((2 * n, 2 * n), dtype=complex)
        if not is_algebra_element(x):
            raise StructuralError("channel generator is not in the symplectic algebra")
        return x

    def drift(self, n):
        """Displacement velocity amplitudes (zero unless ``kind == "displace"``)."""
        if self.kind != "displace":
            return np.zeros(n, dtype=complex)
        if self.direction is None:
            return np.ones(n, dtype=complex)
        return _per_mode(self.direction, n, complex)


def probe_symplectic(spec):
    """``T R_theta S_r`` mapping the thermal covariance to the probe covariance."""
    c = np.diag(np.cosh(spec.r))
    s = np.diag(-np.sinh(spec.r))
    sq = np.block([[c, s], [s, c]]).astype(complex)
    rot = np.diag(np.concatenate([np.exp(-1j * spec.theta), np.exp(1j * spec.theta)]))
    t = rot @ sq
    if spec.two_mode_squeezing:
        t = expm(spec.two_mode_squeezing * two_mode_squeeze_generator()) @ t
    return t


def build_probe(spec):
    """Probe state ``sigma_0 = T diag(L, L) T^dag`` with amplitudes ``spec.displacement``."""
    t = probe_symplectic(spec)
    lam = spec.lambda1
    sigma = t @ np.diag(np.concatenate([lam, lam])) @ t.conj().T
    return GaussianState.from_amplitudes(spec.displacement, 0.5 * (sigma + sigma.conj().T))


def apply_channel_family(probe, channel):
    """Family ``rho_eps = exp(eps G) rho_probe exp(eps G)^dag`` with generator-tier derivatives.

    Args:
        probe: a :class:`ProbeSpec` or a :class:`GaussianState`.
        channel: a :class:`ChannelSpec`.
    """
    state = build_probe(probe) if isinstance(probe, ProbeSpec) else probe
    n = state.modes
    return generator_family(state, channel.generator(n), channel.drift(n), name=f"{channel.kind} channel")


# --------------------------------------------------------------------------
# squeezing-channel closed forms
# --------------------------------------------------------------------------

def squeezing_channel_qfi_closed(spec):
    """QFI of a one-mode probe under the squeezing channel (independent of eps).

    ``4 L^2/(L^2+1) (cosh^4 r + sinh^4 r - 2 cos 4theta cosh^2 r sinh^2 r)
    + 4|d|^2/L (cosh 2r + cos 2(theta - phi) sinh 2r)``.
    """
    if spec.modes != 1 or spec.two_mode_squeezing:
        raise StructuralError("closed form covers one-mode probes only")
    lam = float(spec.lambda1[0])
    r = float(spec.r[0])
    th = float(spec.theta[0])
    d = complex(spec.displacement[0])
    phi = np.angle(d)
    c2, s2 = math.cosh(r) ** 2, math.sinh(r) ** 2
    sq = 4 * lam ** 2 / (lam ** 2 + 1) * (c2 * c2 + s2 * s2 - 2 * math.cos(4 * th) * c2 * s2)
    disp = 4 * abs(d) ** 2 / lam * (math.cosh(2 * r) + math.cos(2 * (th - phi)) * math.sinh(2 * r))
    return sq + disp


def squeezing_channel_qfi_optimal(lambda1, r, d_mag):
    """Maximum over rotation and displacement phase: ``4L^2/(L^2+1) cosh^2 2r + 4|d|^2 e^{2r}/L``."""
    if lambda1 < 1:
        raise DomainError("lambda1 must be >= 1")
    if r < 0:
        raise DomainError("r must be >= 0")
    return 4 * lambda1 ** 2 / (lambda1 ** 2 + 1) * math.cosh(2 * r) ** 2 + 4 * d_mag ** 2 * math.exp(2 * r) / lambda1


def enhancement_squeezing_for_orders(k):
    """Squeezing ``r`` whose QFI gain ``cosh^2 2r`` over ``r = 0`` is ``10^k``."""
    if k < 0:
        raise DomainError("k must be >= 0")
    return math.asinh(math.sqrt((10 ** (k / 2) - 1) / 2))


@dataclass(frozen=True)
class OptimalTemperature:
    """Argmax of the optimal-probe QFI over ``lambda1 >= 1``.

    ``diagnosis`` is ``"interior_root"``, ``"boundary_lambda_one"`` (no interior
    maximum beats ``lambda1 = 1``) or ``"unbounded_increasing"`` (``d = 0``: the
    QFI rises towards ``4 cosh^2 2r`` as ``lambda1 -> inf``).
    """

    lambda1: float
    diagnosis: str
    stationary_points: tuple = field(default_factory=tuple)
    rhs: float = 0.0


def _bisect(fun, lo, hi, xtol=1e-12):
    flo = fun(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= xtol * max(1.0, lo):
            break
    return 0.5 * (lo + hi)


def optimal_thermal_occupation(r, d_mag, upper=1e6):
    """Solve ``L^3/(L^2+1)^2 = |d|^2 e^{2r} / (2 cosh^2 2r)`` and pick the global maximum.

    ``f(L) = L^3/(L^2+1)^2`` rises from 1/4 to ``3 sqrt(3)/16`` on ``[1, sqrt 3]``
    and then falls to 0, so there are at most two stationary points.
    """
    if r < 0 or d_mag < 0:
        raise DomainError("r and d_mag must be non-negative")
    c = d_mag ** 2 * math.exp(2 * r) / (2 * math.cosh(2 * r) ** 2)
    if c == 0.0:
        return OptimalTemperature(math.inf, "unbounded_increasing", (), 0.0)

    def g(lam):
        return lam ** 3 / (lam ** 2 + 1) ** 2 - c

    peak = math.sqrt(3.0)
    roots = []
    if g(1.0) < 0 < g(peak):
        roots.append(_bisect(g, 1.0, peak))
    if g(peak) > 0 > g(upper):
        roots.append(_bisect(g, peak, upper))
    # H rises where g > 0, so a maximum sits at the root where g turns negative.
    best, best_h, diag = 1.0, squeezing_channel_qfi_optimal(1.0, r, d_mag), "boundary_lambda_one"
    for lam in roots:
        if g(lam * (1 + 1e-9)) < 0:
            h = squeezing_channel_qfi_optimal(lam, r, d_mag)
            if h > best_h:
                best, best_h, diag = lam, h, "interior_root"
    return OptimalTemperature(best, diag, tuple(roots), c)


def qfi_max_photon_budget(n, n_th, n_d):
    """Best squeezing-channel QFI at mean photon number ``n`` split into thermal and displacement parts."""
    if n_th < 0 or n_d < 0 or n_th + n_d > n * (1 + 1e-12):
        raise DomainError(f"infeasible photon split n_th={n_th}, n_d={n_d} for n={n}")
    m = max(n - n_d, 0.0)
    first = 2 * (1 + 2 * n - 2 * n_d) ** 2 / (1 + 2 * n_th * (1 + n_th))
    root = math.sqrt(max(m - n_th, 0.0)) * math.sqrt(1 + m + n_th)
    second = 4 * n_d * (1 + 2 * m + 2 * root) / (1 + 2 * n_th) ** 2
    return first + second


def photon_budget_argmax(n, step=1e-2, refine=3):
    """Grid argmax of :func:`qfi_max_photon_budget` over the simplex ``n_th + n_d <= n``.

    Returns ``(n_th, n_d, value)``; each refinement pass re-grids a 5x5 cell
    neighbourhood of the incumbent with a ten times finer step.
    """
    def best_on(th_vals, d_vals):
        best = (None, None, -math.inf)
        for th in th_vals:
            for d in d_vals:
                if th < 0 or d < 0 or th + d > n:
                    continue
                v = qfi_max_photon_budget(n, th, d)
                if v > best[2]:
                    best = (th, d, v)
        return best

    h = step * max(n, 1e-12)
    grid = np.arange(0.0, n + 0.5 * h, h)
    th, d, v = best_on(grid, grid)
    for _ in range(refine):
        local = np.arange(-2.5 * h, 2.5 * h + 1e-15, h / 10)
        h /= 10
        th, d, v = best_on(th + local, d + local)
    return th, d, v


# --------------------------------------------------------------------------
# phase-space ellipses
# --------------------------------------------------------------------------

def ellipse_export(state, n_points=100):
    """One-sigma ellipse ``c + sigma_R^{1/2} (cos t, sin t)`` in the ``(x, p)`` plane.

    Returns an ``(n_points, 2)`` array, ``t = 2 pi k / n_points``.
    """
    if state.modes != 1:
        raise StructuralError("ellipse export needs a one-mode state")
    if n_points < 1:
        raise DomainError("n_points must be positive")
    real = to_real(state)
    root = np.real(sqrtm(real.covariance_real))
    t = 2 * np.pi * np.arange(n_points) / n_points
    circle = np.stack([np.cos(t), np.sin(t)])
    return (real.displacement_real[:, None] + root @ circle).T


def ellipse_area(state):
    """``pi sqrt(det sigma_R)``."""
    return math.pi * math.sqrt(np.linalg.det(to_real(state).covariance_real))


FIGURE1_THETAS = (0.0, np.pi / 8, np.pi / 4, 3 * np.pi / 8, np.pi / 2)
FIGURE1_EPS = (0.0, 0.1)


def figure1_sets(r=0.8, thetas=FIGURE1_THETAS, eps_values=FIGURE1_EPS, n_points=100, n_th=0.0):
    """Ellipses of squeezed probes before and after a squeezing channel.

    Returns a list of ``(eps, theta, state, points)`` ordered by theta, then eps.
    """
    out = []
    for th in thetas:
        fam = apply_channel_family(ProbeSpec(n_th=n_th, r=r, theta=th), ChannelSpec("squeeze"))
        for eps in eps_values:
            st = fam(eps)
            out.append((float(eps), float(th), st, ellipse_export(st, n_points)))
    return out
