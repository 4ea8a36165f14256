"""Inner loops of the QFI formulas, in numba and numpy flavours.

Both flavours are always importable; :data:`series_partial_sums` and
:data:`pair_weighted_sums` point at the numba versions unless numba is missing
or disabled through ``GAUSSQFI_DISABLE_NUMBA``.
"""

import numpy as np

from ._jit import HAS_NUMBA, njit


def series_partial_sums_numpy(a_inv, a_dot, order):
    """Cumulative sums of ``0.5 * tr[(A^-n Adot)^2]`` for n = 1..order."""
    out = np.empty(order)
    x = a_dot
    total = 0.0
    for n in range(order):
        x = a_inv @ x
        total += 0.5 * np.einsum("ij,ji->", x, x).real
        out[n] = total
    return out


@njit(cache=True)
def _series_partial_sums_jit(a_inv, a_dot, order):
    dim = a_inv.shape[0]
    out = np.empty(order)
    x = a_dot.copy()
    y = np.empty_like(x)
    total = 0.0
    for n in range(order):
        for i in range(dim):
            for j in range(dim):
                acc = 0j
                for k in range(dim):
                    acc += a_inv[i, k] * x[k, j]
                y[i, j] = acc
        x, y = y, x
        tr = 0j
        for i in range(dim):
            for j in range(dim):
                tr += x[i, j] * x[j, i]
        total += 0.5 * tr.real
        out[n] = total
    return out


def pair_weighted_sums_numpy(lam, r_abs2, q_abs2, pure):
    """Orientation and squeezing sums of the Williamson-form QFI.

    Returns ``(sum_ij w_R(i,j) |R_ij|^2, sum_ij w_Q(i,j) |Q_ij|^2)`` where
    ``w_R = (l_i - l_j)^2 / (l_i l_j - 1)`` (zero when both modes are pure or
    the eigenvalues coincide) and ``w_Q = (l_i + l_j)^2 / (l_i l_j + 1)``.
    """
    li = lam[:, None]
    lj = lam[None, :]
    both_pure = pure[:, None] & pure[None, :]
    diff2 = (li - lj) ** 2
    denom = li * lj - 1.0
    safe = np.where(both_pure | (diff2 == 0.0), 1.0, denom)
    w_r = np.where(both_pure | (diff2 == 0.0), 0.0, diff2 / safe)
    w_q = (li + lj) ** 2 / (li * lj + 1.0)
    return float(np.sum(w_r * r_abs2)), float(np.sum(w_q * q_abs2))


@njit(cache=True)
def _pair_weighted_sums_jit(lam, r_abs2, q_abs2, pure):
    n = lam.shape[0]
    orient = 0.0
    squeeze = 0.0
    for i in range(n):
        for j in range(n):
            d = lam[i] - lam[j]
            if not (pure[i] and pure[j]) and d != 0.0:
                orient += d * d / (lam[i] * lam[j] - 1.0) * r_abs2[i, j]
            s = lam[i] + lam[j]
            squeeze += s * s / (lam[i] * lam[j] + 1.0) * q_abs2[i, j]
    return orient, squeeze


def _series_partial_sums_dispatch(a_inv, a_dot, order):
    return _series_partial_sums_jit(
        np.ascontiguousarray(a_inv, dtype=np.complex128),
        np.ascontiguousarray(a_dot, dtype=np.complex128),
        int(order),
    )


def _pair_weighted_sums_dispatch(lam, r_abs2, q_abs2, pure):
    o, s = _pair_weighted_sums_jit(
        np.ascontiguousarray(lam, dtype=np.float64),
        np.ascontiguousarray(r_abs2, dtype=np.float64),
        np.ascontiguousarray(q_abs2, dtype=np.float64),
        np.ascontiguousarray(pure, dtype=np.bool_),
    )
    return float(o), float(s)


if HAS_NUMBA:
    series_partial_sums = _series_partial_sums_dispatch
    pair_weighted_sums = _pair_weighted_sums_dispatch
    BACKEND = "numba"
else:
    series_partial_sums = series_partial_sums_numpy
    pair_weighted_sums = pair_weighted_sums_numpy
    BACKEND = "numpy"

# Explicit handles for benchmarks and backend-equivalence tests.
series_partial_sums_jit = _series_partial_sums_dispatch
pair_weighted_sums_jit = _pair_weighted_sums_dispatch
