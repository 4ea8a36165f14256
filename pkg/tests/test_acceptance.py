"""End-to-end acceptance checks; each test prints one pass/fail line."""

import math

import numpy as np

from gaussqfi import qfi as Q
from gaussqfi.cli import main
from gaussqfi.core import (
    GaussianState,
    is_symplectic,
    k_matrix,
    symplectic_eigenvalues,
    to_complex,
    to_real,
    williamson_decompose,
)
from gaussqfi.fidelity import two_mode_fidelity
from gaussqfi.fock import CutoffConfig, fock_build_common, qfi_fock_fd, uhlmann_fidelity_fock
from gaussqfi.parametrization import DerivativeBundle, StateFamily, random_algebra_element
from gaussqfi.probes import (
    ChannelSpec,
    ProbeSpec,
    apply_channel_family,
    build_probe,
    enhancement_squeezing_for_orders,
    figure1_sets,
    photon_budget_argmax,
    qfi_max_photon_budget,
    squeezing_channel_qfi_closed,
    squeezing_channel_qfi_optimal,
)
from gaussqfi.sampling import (
    analytic_family,
    passive,
    random_analytic_family,
    random_state,
    random_symplectic,
    squeezer,
)

SQUEEZE = ChannelSpec("squeeze")


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def test_criterion_01_vacuum_baseline(criterion):
    spec = ProbeSpec()
    closed = squeezing_channel_qfi_closed(spec)
    reg = Q.qfi_regularized(apply_channel_family(spec, SQUEEZE), 0.0).value
    fock = qfi_fock_fd(spec, SQUEEZE)
    ok = closed == 2.0 and abs(closed - reg) <= 1e-9 and rel(fock, 2.0) <= 5e-3
    assert criterion(1, ok, f"closed={closed:.12g} regularized={reg:.12g} fock={fock:.6g}")


def test_criterion_02_optimal_law(criterion):
    rng = np.random.default_rng(2)
    grid = np.linspace(0.0, np.pi, 41)  # contains pi/4 exactly as index 10
    worst_law, worst_arg = 0.0, 0.0
    for _ in range(20):
        lam, r, dm = rng.uniform(1, 4), rng.uniform(0, 1.5), rng.uniform(0, 2)
        vals = np.array([[squeezing_channel_qfi_closed(ProbeSpec(n_th=(lam - 1) / 2, r=r, theta=th,
                                                                 displacement=dm * np.exp(1j * ph)))
                          for ph in grid] for th in grid])
        law = squeezing_channel_qfi_optimal(lam, r, dm)
        best = vals.max()
        worst_law = max(worst_law, rel(best, law))
        # the maximum recurs at (3pi/4, 3pi/4); (pi/4, pi/4) must be one of the maximisers
        worst_arg = max(worst_arg, rel(vals[10, 10], best))
    ok = worst_law <= 1e-6 and worst_arg <= 1e-6
    assert criterion(2, ok, f"max rel |grid max - law|={worst_law:.2e}, max rel gap at (pi/4, pi/4)={worst_arg:.2e}")


def test_criterion_03_enhancement(criterion):
    def h(r):
        return squeezing_channel_qfi_closed(ProbeSpec(r=r, theta=np.pi / 4))

    ratio = h(1.46) / h(0.0)
    err_ratio = rel(ratio, math.cosh(2.92) ** 2)
    ks = np.linspace(0, 8, 33)
    err_k = max(rel(h(enhancement_squeezing_for_orders(k)) / h(0.0), 10.0 ** k) for k in ks)
    err_fit = max(rel(0.35 + 0.58 * k, enhancement_squeezing_for_orders(k)) for k in np.linspace(2, 6, 41))
    ok = err_ratio <= 1e-10 and err_k <= 1e-10 and err_fit <= 0.02 and 80 <= ratio <= 90
    assert criterion(3, ok, f"ratio={ratio:.6f} (err {err_ratio:.1e}), r(k) err {err_k:.1e}, linear fit err {err_fit:.2%}")


def test_criterion_04_heisenberg(criterion):
    exact = all(qfi_max_photon_budget(n, 0.0, 0.0) == 2 * (1 + 2 * n) ** 2 for n in (0.25, 0.5, 1, 2, 4))
    args = [photon_budget_argmax(n, step=1e-2) for n in (0.25, 0.5, 1, 2, 4)]
    at_origin = all(abs(t) < 1e-9 and abs(d) < 1e-9 for t, d, _ in args)
    ok = exact and at_origin
    assert criterion(4, ok, f"exact={exact}, argmax at (0, 0) for all n={at_origin}")


def test_criterion_05_cross_method(criterion):
    rng = np.random.default_rng(5)
    worst_pair, worst_series = 0.0, 0.0
    for _ in range(200):
        fam = random_analytic_family(2, rng, lam_range=(1.05, 4.0))
        a = Q.qfi_two_mode(fam, 0.0).value
        b = Q.qfi_two_mode_williamson(fam, 0.0).value
        c = Q.qfi_multimode_williamson(fam, 0.0).value
        s = Q.qfi_series(fam, 0.0)
        worst_pair = max(worst_pair, rel(a, b), rel(a, c), rel(b, c))
        worst_series = max(worst_series, abs(s.value - c) / s.error_bound)
    ok = worst_pair <= 1e-8 and worst_series <= 1.0
    assert criterion(5, ok, f"max pairwise rel={worst_pair:.1e}, max |series-exact|/bound={worst_series:.3f}")


def _series_terms(a, a_dot, count):
    """``0.5 tr[(A^-n A_dot)^2]`` for ``n = 1..count``, each evaluated directly."""
    a_inv = np.linalg.inv(a)
    b = a_dot.copy()
    out = []
    for _ in range(count):
        b = a_inv @ b
        out.append(0.5 * np.trace(b @ b).real)
    return np.array(out)


def test_criterion_06_remainder_bound(criterion):
    rng = np.random.default_rng(6)
    violations, checked, tightest = 0, 0, 0.0
    for i in range(50):
        n = 1 + i % 3
        fam = random_analytic_family(n, rng, lam_range=(1.05, 4.0))
        st = fam(0.0)
        bundle = fam.derivatives(0.0)
        k = k_matrix(n)
        a, a_dot = k @ st.covariance, k @ bundle.sigma_dot
        lam_min = symplectic_eigenvalues(st.covariance)[-1]
        # enough terms that the remaining tail is far below double precision of any bound used
        total = int(np.ceil(np.log(1e40) / (2 * np.log(lam_min)))) + 32
        terms = _series_terms(a, a_dot, total)
        for m in range(1, 31):
            tail = float(np.sum(terms[m:][::-1]))
            bound = Q.series_remainder_bound(fam, 0.0, m)
            checked += 1
            tightest = max(tightest, abs(tail) / bound)
            violations += abs(tail) > bound
    ok = violations == 0 and checked == 1500
    assert criterion(6, ok, f"{checked} (family, M) cases, violations={violations}, max |R_M|/bound={tightest:.3f}")


def _random_two_mode_spec(rng):
    return ProbeSpec(
        modes=2,
        n_th=list(rng.uniform(0, 0.3, 2)),
        r=list(rng.uniform(0, 0.4, 2)),
        theta=list(rng.uniform(0, np.pi, 2)),
        displacement=list(0.5 * (rng.normal(size=2) + 1j * rng.normal(size=2))),
        two_mode_squeezing=rng.uniform(0, 0.3),
    )


def test_criterion_07_fock_ground_truth(criterion):
    worst_qfi, n_grid = 0.0, 0
    for r in (0.0, 0.4, 0.8):
        for n_th in (0.0, 0.25, 0.5):
            for dm in (0.0, 1.0):
                for th in (0.0, np.pi / 4):
                    spec = ProbeSpec(n_th=n_th, r=r, theta=th, displacement=dm)
                    closed = squeezing_channel_qfi_closed(spec)
                    fock = qfi_fock_fd(spec, SQUEEZE)
                    worst_qfi = max(worst_qfi, abs(fock - closed) / max(1e-3, 1e-2 * abs(closed)))
                    n_grid += 1
    rng = np.random.default_rng(7)
    worst_fid = 0.0
    cfg = CutoffConfig(n_max=20)
    for _ in range(50):
        s1, s2 = _random_two_mode_spec(rng), _random_two_mode_spec(rng)
        r1, r2 = fock_build_common([s1, s2], cfg)
        f_fock = uhlmann_fidelity_fock(r1, r2)
        f_gauss = two_mode_fidelity(build_probe(s1), build_probe(s2)).value
        worst_fid = max(worst_fid, abs(f_fock - f_gauss))
    ok = n_grid == 36 and worst_qfi <= 1.0 and worst_fid <= 1e-6
    assert criterion(7, ok, f"{n_grid} probes, max |fock-closed|/max(1e-3, 1%)={worst_qfi:.3f}; "
                            f"50 two-mode pairs, max |dF|={worst_fid:.1e}")


def _thermalised(r, n, analytic):
    """``lambda(eps) = 1 + eps^2`` on every mode of a rotating product squeezed vacuum.

    With ``analytic`` the covariance derivative is supplied (eigenvalue
    derivatives are still left to finite differences); otherwise everything is
    differenced, which the library refuses on the degenerate ``n > 1`` spectrum.
    """
    s0 = squeezer([r] * n)
    x = np.diag(np.concatenate([-1j * np.ones(n), 1j * np.ones(n)]))

    def rotated(eps):
        s = passive(np.exp(-1j * eps) * np.eye(n)) @ s0
        return s @ s.conj().T

    def ev(eps):
        sig = (1 + eps * eps) * rotated(eps)
        return GaussianState(np.zeros(2 * n), 0.5 * (sig + sig.conj().T))

    def derivatives(eps):
        base = rotated(eps)
        sd = 2 * eps * base + (1 + eps * eps) * (x @ base + base @ x.conj().T)
        return DerivativeBundle(sigma_dot=0.5 * (sd + sd.conj().T), d_dot=np.zeros(2 * n))

    return StateFamily(ev, derivatives if analytic else None, domain=(-1, 1))


def test_criterion_08_regularization(criterion):
    worst_thermal, worst_ladder = 0.0, 0.0
    for r in (0.0, 0.3, 0.7):
        for n, analytic in ((1, False), (1, True), (2, True), (3, True)):
            fam = _thermalised(r, n, analytic)
            analytic = Q.qfi_regularized(fam, 0.0).value
            ladder = Q.qfi_regularized(fam, 0.0, path="ladder").value
            # lambda_ddot = 2 per mode plus the rotation QFI of a squeezed vacuum
            expected = n * (2.0 + 2 * np.sinh(2 * r) ** 2)
            worst_thermal = max(worst_thermal, abs(analytic - expected))
            worst_ladder = max(worst_ladder, abs(analytic - ladder))
    rng = np.random.default_rng(8)
    worst_pure = 0.0
    for i in range(60):
        n = 1 + i % 3
        s0 = random_symplectic(n, rng)
        x = random_algebra_element(n, rng, 0.5)
        amp = rng.normal(size=n) + 1j * rng.normal(size=n)
        vel = rng.normal(size=n) + 1j * rng.normal(size=n)
        d0, v = np.concatenate([amp, amp.conj()]), np.concatenate([vel, vel.conj()])
        fam = analytic_family(s0, np.ones(n), x, np.zeros(n), d0, v)
        sigma = s0 @ s0.conj().T
        sd = x @ sigma + sigma @ x.conj().T
        m = np.linalg.solve(sigma, sd)
        oracle = 0.25 * np.trace(m @ m).real + 2 * (v.conj() @ np.linalg.solve(sigma, v)).real
        for est in (Q.qfi_pure_point(fam, 0.0), Q.qfi_regularized(fam, 0.0), Q.qfi_auto(fam, 0.0)):
            worst_pure = max(worst_pure, rel(est.value, oracle))
    ok = worst_thermal <= 1e-6 and worst_ladder <= 1e-6 and worst_pure <= 1e-9
    assert criterion(8, ok, f"thermalisation err={worst_thermal:.1e}, ladder vs analytic={worst_ladder:.1e}, "
                            f"pure families rel err={worst_pure:.1e}")


def test_criterion_09_structural_properties(criterion):
    rng = np.random.default_rng(9)
    cases = 1000
    pair_err = recon_err = trip_err = inv_err = 0.0
    negatives = 0
    for i in range(cases):
        n = 1 + i % 4
        st = random_state(n, rng, lam_range=(1.0, 4.0), max_squeeze=1.0)
        sigma = st.covariance
        spec = np.sort(np.linalg.eigvals(k_matrix(n) @ sigma).real)
        lam = symplectic_eigenvalues(sigma)
        pair_err = max(pair_err, np.max(np.abs(spec + spec[::-1])) / spec[-1],
                       np.max(np.abs(np.sort(lam) - spec[n:])) / spec[-1])
        wf = williamson_decompose(sigma)
        if not is_symplectic(wf.S, 1e-9):
            recon_err = max(recon_err, np.inf)
        recon_err = max(recon_err, np.linalg.norm(wf.reconstruct() - sigma) / np.linalg.norm(sigma))
        back = to_complex(to_real(st))
        trip_err = max(trip_err, np.max(np.abs(back.covariance - sigma)), np.max(np.abs(back.displacement - st.displacement)))
    for i in range(cases):
        n = 1 + i % 3
        fam = random_analytic_family(n, rng)
        base = Q.qfi_auto(fam, 0.0).value
        moved = Q.qfi_auto(fam.transformed(random_symplectic(n, rng), shift=rng.normal(size=n)), 0.0).value
        values = [base, moved]
        if n == 2:
            values += [Q.qfi_two_mode(fam, 0.0).value, Q.qfi_two_mode_williamson(fam, 0.0).value,
                       Q.qfi_series(fam, 0.0).value]
        values.append(Q.qfi_multimode_williamson(fam, 0.0).value)
        negatives += min(values) < -1e-9
        inv_err = max(inv_err, rel(base, moved))
    ok = pair_err <= 1e-9 and recon_err <= 1e-9 and trip_err <= 1e-12 and negatives == 0 and inv_err <= 1e-8
    assert criterion(9, ok, f"{cases} cases each: pairing {pair_err:.1e}, Williamson {recon_err:.1e}, "
                            f"round trip {trip_err:.1e}, negatives {negatives}, invariance {inv_err:.1e}")


def _polygon_ellipse_area(xy):
    """Area of the ellipse through ``n`` points at equally spaced parameter values."""
    n = xy.shape[0]
    x, p = xy[:, 0], xy[:, 1]
    shoelace = 0.5 * abs(np.dot(x, np.roll(p, -1)) - np.dot(p, np.roll(x, -1)))
    return shoelace * np.pi / (0.5 * n * np.sin(2 * np.pi / n))


def test_criterion_10_cli_figure(tmp_path, criterion):
    outs = [tmp_path / "a.csv", tmp_path / "b.csv"]
    codes = [main(["ellipse", "--out", str(p)]) for p in outs]
    identical = outs[0].read_bytes() == outs[1].read_bytes()
    data = np.genfromtxt(outs[0], delimiter=",", names=True)
    sets = np.unique(data["set"])
    areas = [_polygon_ellipse_area(np.column_stack([data["x"], data["p"]])[data["set"] == s]) for s in sets]
    params = {(float(e), float(t)) for e, t in zip(data["eps"], data["theta"])}
    expected = {(e, float(t)) for e in (0.0, 0.1) for t in np.pi * np.arange(5) / 8}
    area_err = max(abs(a - np.pi) for a in areas)
    ref_sets = len(figure1_sets())
    ok = (codes == [0, 0] and identical and len(sets) == 10 == ref_sets and area_err <= 1e-9
          and len(params) == 10 and all(any(abs(e - pe) < 1e-15 and abs(t - pt) < 1e-15 for pe, pt in params)
                                        for e, t in expected))
    assert criterion(10, ok, f"{len(sets)} sets, max |area - pi|={area_err:.1e}, byte-identical={identical}")
