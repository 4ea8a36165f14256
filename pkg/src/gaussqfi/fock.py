"""Truncated number-basis density matrices for one- and two-mode Gaussian probes.

Used as an independent check on the phase-space formulas. States are built by
exponentiating truncated generator matrices. Fidelities come from factor
overlaps, with a Hermitian square-root route kept for comparison. The QFI is a
symmetric Bures finite difference.
"""

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal

from .core import GaussianState
from .errors import ConvergenceError, DomainError, StructuralError
from .probes import ProbeSpec

NEG_CLAMP = 1e-10
_WEIGHT_FLOOR = 1e-16


@dataclass(frozen=True)
class CutoffConfig:
    """Per-mode cutoff ``n_max``; ``auto_grow`` doubles it until the trace deficit is below ``cutoff_tol``."""

    n_max: int = 40
    cutoff_tol: float = 1e-8
    auto_grow: bool = True
    max_n_one_mode: int = 640
    max_n_two_mode: int = 80

    def __post_init__(self):
        if self.n_max < 2:
            raise DomainError("n_max must be >= 2")


@dataclass(frozen=True)
class FockDensityMatrix:
    """``rho = factor @ factor^dag`` on ``n_max**modes`` levels (mode 0 is the slow index)."""

    modes: int
    cutoff: int
    factor: np.ndarray
    trace_deficit: float

    @property
    def matrix(self):
        f = self.factor
        return f @ f.conj().T


def _annihilation(w):
    return sp.diags(np.sqrt(np.arange(1, w, dtype=float)), 1, shape=(w, w), format="csr").astype(complex)


class _Ops:
    """Generators as ``(mode, w x w matrix)`` for one-mode gates or ``(None, sparse)`` for two-mode gates."""

    def __init__(self, modes, w):
        self.modes = modes
        self.w = w
        self.a1 = _annihilation(w)
        eye = sp.identity(w, format="csr", dtype=complex)
        if modes == 1:
            self.a = [self.a1]
        else:
            self.a = [sp.kron(self.a1, eye, format="csr"), sp.kron(eye, self.a1, format="csr")]

    def squeeze(self, j, r):
        a = self.a1
        return j, 0.5 * r * (a @ a - a.T @ a.T)

    def rotate(self, j, theta):
        a = self.a1
        return j, -1j * theta * (a.T @ a)

    def displace(self, j, alpha):
        a = self.a1
        return j, alpha * a.T - np.conj(alpha) * a

    def two_mode_squeeze(self, s):
        a1, a2 = self.a
        return None, s * (a1 @ a2 - a1.T @ a2.T)


def _expm_tridiagonal(g):
    """``exp(g)`` for anti-Hermitian tridiagonal ``g`` via a real tridiagonal eigenproblem.

    ``h = i g`` is Hermitian; a diagonal phase similarity makes its
    off-diagonal real and non-negative so ``eigh_tridiagonal`` applies.
    """
    h = 1j * g
    main = np.diag(h).real
    off = np.diag(h, 1)
    if off.size == 0 or not off.any():
        return np.diag(np.exp(-1j * main))
    phase = np.exp(1j * np.concatenate([[0.0], -np.cumsum(np.angle(off))]))
    w, v = eigh_tridiagonal(main, np.abs(off))
    vp = phase[:, None] * v
    return (vp * np.exp(-1j * w)) @ vp.conj().T


def _apply_number_difference_blocks(g, psi, w):
    """Apply ``exp(g)`` for a two-mode ``g`` that conserves ``n1 - n2``, one sector at a time."""
    n1, n2 = np.divmod(np.arange(w * w), w)
    diff = n1 - n2
    g = g.tocsr()
    out = np.empty_like(psi)
    for k in range(-(w - 1), w):
        idx = np.flatnonzero(diff == k)
        # consecutive sector states differ by (1, 1), so each block is tridiagonal
        block = g[idx][:, idx].toarray()
        out[idx] = _expm_tridiagonal(block) @ psi[idx]
    return out


def _one_mode_unitary(g):
    """``exp(g)`` for a one-mode generator coupling ``n`` to ``n +- 1`` or only ``n +- 2``."""
    g = g.toarray()
    w = g.shape[0]
    if np.diag(g, 1).any():
        return _expm_tridiagonal(g)
    u = np.zeros_like(g)
    for parity in (0, 1):
        idx = np.arange(parity, w, 2)
        u[np.ix_(idx, idx)] = _expm_tridiagonal(g[np.ix_(idx, idx)])
    return u


def _apply(gen, psi, modes, w):
    j, g = gen
    if j is None:
        return _apply_number_difference_blocks(g, psi, w)
    u = _one_mode_unitary(g)
    if modes == 1:
        return u @ psi
    t = psi.reshape(w, w, -1)
    if j == 0:
        return (u @ t.reshape(w, -1)).reshape(w * w, -1)
    return np.matmul(u, t).reshape(w * w, -1)


def _thermal_columns(n_th, w):
    """Columns ``sqrt(p_k) |k>`` of the (product) thermal state, weights below the floor dropped."""
    probs = []
    for n in n_th:
        k = np.arange(w)
        probs.append((1.0 / (1.0 + n)) * (n / (1.0 + n)) ** k if n > 0 else (k == 0).astype(float))
    if len(probs) == 1:
        p = probs[0]
    else:
        p = np.outer(probs[0], probs[1]).reshape(-1)
    idx = np.flatnonzero(p > _WEIGHT_FLOOR)
    cols = np.zeros((p.shape[0], idx.shape[0]), dtype=complex)
    cols[idx, np.arange(idx.shape[0])] = np.sqrt(p[idx])
    return cols


def _generators(spec, channel, eps, ops):
    """Generators in application order: squeeze, rotate, two-mode squeeze, displace, channel."""
    gens = []
    for j in range(spec.modes):
        if spec.r[j]:
            gens.append(ops.squeeze(j, spec.r[j]))
    for j in range(spec.modes):
        if spec.theta[j]:
            gens.append(ops.rotate(j, spec.theta[j]))
    if spec.two_mode_squeezing:
        gens.append(ops.two_mode_squeeze(spec.two_mode_squeezing))
    for j in range(spec.modes):
        if spec.displacement[j]:
            gens.append(ops.displace(j, spec.displacement[j]))
    if channel is not None and eps != 0.0:
        n = spec.modes
        targets = range(n) if channel.modes is None else channel.modes
        if channel.kind == "squeeze":
            gens.extend(ops.squeeze(j, eps) for j in targets)
        elif channel.kind == "rotate":
            gens.extend(ops.rotate(j, eps) for j in targets)
        elif channel.kind == "two_mode_squeeze":
            gens.append(ops.two_mode_squeeze(eps))
        else:
            v = channel.drift(n)
            gens.extend(ops.displace(j, eps * v[j]) for j in range(n) if v[j])
    return gens


def _truncate(psi, modes, w, n_max):
    if modes == 1:
        return psi[:n_max]
    return psi.reshape(w, w, -1)[:n_max, :n_max].reshape(n_max * n_max, -1)


def _build_once(spec, channel, eps, n_max):
    w = 2 * n_max
    ops = _Ops(spec.modes, w)
    psi = _thermal_columns(spec.n_th, w)
    for gen in _generators(spec, channel, eps, ops):
        psi = _apply(gen, psi, spec.modes, w)
    kept = _truncate(psi, spec.modes, w, n_max)
    deficit = 1.0 - float(np.sum(np.abs(kept) ** 2))
    return FockDensityMatrix(spec.modes, n_max, kept, deficit)


def fock_build(spec, cfg=CutoffConfig(), channel=None, eps=0.0):
    """Density matrix of ``exp(eps G) D T R S rho_th (...)^dag`` truncated to ``cfg.n_max`` levels per mode.

    Operators act on a working space twice the cutoff; the state is then cut
    down and the lost weight reported as ``trace_deficit``.
    """
    if not isinstance(spec, ProbeSpec):
        raise StructuralError("fock_build needs a ProbeSpec")
    if spec.modes not in (1, 2):
        raise StructuralError("the Fock oracle handles one or two modes")
    cap = cfg.max_n_one_mode if spec.modes == 1 else cfg.max_n_two_mode
    n_max = cfg.n_max
    while True:
        rho = _build_once(spec, channel, eps, n_max)
        if rho.trace_deficit < cfg.cutoff_tol:
            return rho
        if not cfg.auto_grow or 2 * n_max > cap:
            raise ConvergenceError(
                f"trace deficit {rho.trace_deficit:.3g} >= {cfg.cutoff_tol:g} at n_max={n_max}",
                achieved=rho.trace_deficit,
            )
        n_max *= 2


def fock_moments(rho):
    """First and second moments ``(d, sigma)`` of a Fock density matrix in complex form.

    ``d_i = tr(rho A_i)``, ``sigma_ij = <A_i A_j^dag + A_j^dag A_i> - 2 d_i conj(d_j)``
    with ``A = (a_1..a_N, a_1^dag..a_N^dag)``.
    """
    ops = _Ops(rho.modes, rho.cutoff)
    big = list(ops.a) + [x.T.tocsr() for x in ops.a]
    f = rho.factor
    images = [op @ f for op in big]

    def ev(x, y):
        # tr(rho X^dag Y) from the factors
        return np.vdot(x, y)

    d = np.array([np.vdot(f, img) for img in images])
    adj = [op.T.conj().tocsr() @ f for op in big]
    k = len(big)
    sigma = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            # <A_i A_j^dag> = tr(F^dag A_i A_j^dag F) = <A_i^dag F, A_j^dag F>
            # <A_j^dag A_i> = <A_j F, A_i F>
            sigma[i, j] = ev(adj[i], adj[j]) + ev(images[j], images[i]) - 2 * d[i] * np.conj(d[j])
    return GaussianState(d, 0.5 * (sigma + sigma.conj().T))


def _psd_factor(rho, tol):
    m = rho.matrix
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    if w.min() < -tol:
        raise DomainError(f"density matrix has eigenvalue {w.min():.3g} below -{tol:g}")
    w = np.clip(w, 0.0, None)
    return v * np.sqrt(w)


def uhlmann_fidelity_fock(rho1, rho2, method="factor", tol=NEG_CLAMP):
    """``(tr |sqrt(rho1) sqrt(rho2)|)^2``.

    ``method="eigh"`` takes square roots from Hermitian eigendecompositions
    (eigenvalues above ``-tol`` clamped to 0). ``method="factor"`` uses the
    stored ``rho = F F^dag`` factors; ``tr |sqrt(rho1) sqrt(rho2)|`` equals the
    nuclear norm of ``F1^dag F2`` either way, and the factor route avoids the
    square-root noise of near-zero eigenvalues.
    """
    if rho1.modes != rho2.modes or rho1.cutoff != rho2.cutoff:
        raise StructuralError("density matrices have different dimensions")
    if method == "factor":
        f1, f2 = rho1.factor, rho2.factor
    elif method == "eigh":
        f1, f2 = _psd_factor(rho1, tol), _psd_factor(rho2, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    s = np.linalg.svd(f1.conj().T @ f2, compute_uv=False)
    return float(np.sum(s)) ** 2


def fock_build_common(items, cfg=CutoffConfig()):
    """Build several states on one shared cutoff so they can be compared.

    Args:
        items: iterable of ``spec`` or ``(spec, channel, eps)`` tuples.
        cfg: cutoff settings; the shared cutoff is the largest any item needs.
    """
    items = [it if isinstance(it, tuple) else (it, None, 0.0) for it in items]
    n_max = cfg.n_max
    built = []
    for spec, channel, eps in items:
        rho = fock_build(spec, replace(cfg, n_max=n_max), channel, eps)
        n_max = max(n_max, rho.cutoff)
        built.append(rho)
    fixed = replace(cfg, n_max=n_max, auto_grow=False)
    return [rho if rho.cutoff == n_max else fock_build(spec, fixed, channel, eps)
            for rho, (spec, channel, eps) in zip(built, items)]


@dataclass(frozen=True)
class FockQfi:
    value: float
    step: float
    cutoff: int
    one_sided: tuple
    trace_deficit: float


def qfi_fock_fd(spec, channel, eps=0.0, step=2e-2, cfg=CutoffConfig(), detail=False):
    """Bures finite-difference QFI ``8 (1 - sqrt F) / h^2`` averaged over ``h = +-step``.

    Args:
        spec: one- or two-mode :class:`ProbeSpec`.
        channel: the parameter-imprinting :class:`ChannelSpec`.
        eps: parameter value.
        step: finite-difference step ``h``.
        cfg: cutoff settings; all three stencil states share one cutoff.
        detail: return a :class:`FockQfi` with diagnostics instead of a float.
    """
    rhos = fock_build_common([(spec, channel, e) for e in (eps, eps + step, eps - step)], cfg)
    sides = []
    for other in rhos[1:]:
        f = uhlmann_fidelity_fock(rhos[0], other)
        sides.append(8.0 * (1.0 - np.sqrt(f)) / step ** 2)
    value = 0.5 * (sides[0] + sides[1])
    if not detail:
        return value
    return FockQfi(value, step, rhos[0].cutoff, tuple(sides), max(r.trace_deficit for r in rhos))
