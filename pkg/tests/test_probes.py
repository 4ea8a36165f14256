import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussqfi import qfi as Q
from gaussqfi.core import symplectic_eigenvalues
from gaussqfi.errors import DomainError, StructuralError
from gaussqfi.probes import (
    ChannelSpec,
    ProbeSpec,
    apply_channel_family,
    build_probe,
    ellipse_area,
    ellipse_export,
    enhancement_squeezing_for_orders,
    figure1_sets,
    is_algebra_element,
    optimal_thermal_occupation,
    photon_budget_argmax,
    qfi_max_photon_budget,
    squeezing_channel_qfi_closed,
    squeezing_channel_qfi_optimal,
)


class TestBuildProbe:
    def test_vacuum(self):
        st_ = build_probe(ProbeSpec())
        assert np.allclose(st_.covariance, np.eye(2)) and np.allclose(st_.displacement, 0)

    def test_thermal(self):
        assert np.allclose(build_probe(ProbeSpec(n_th=0.5)).covariance, 2 * np.eye(2))

    @given(n_th=st.floats(0, 2), r=st.floats(0, 1.5), theta=st.floats(0, 6.3),
           d=st.complex_numbers(max_magnitude=2))
    def test_eigenvalue_and_photon_number(self, n_th, r, theta, d):
        spec = ProbeSpec(n_th=n_th, r=r, theta=theta, displacement=d)
        state = build_probe(spec)
        assert symplectic_eigenvalues(state.covariance)[0] == pytest.approx(1 + 2 * n_th, abs=1e-9)
        n = abs(d) ** 2 + n_th + (1 + 2 * n_th) * math.sinh(r) ** 2
        assert state.photon_number() == pytest.approx(n, rel=1e-10, abs=1e-12)
        assert spec.photon_number() == pytest.approx(n, rel=1e-12)

    def test_two_mode(self):
        spec = ProbeSpec(modes=2, n_th=[0.1, 0.3], two_mode_squeezing=0.4)
        assert np.allclose(sorted(symplectic_eigenvalues(build_probe(spec).covariance)), [1.2, 1.6])

    def test_invalid(self):
        with pytest.raises(DomainError):
            ProbeSpec(n_th=-0.1)
        with pytest.raises(StructuralError):
            ProbeSpec(two_mode_squeezing=0.1)
        with pytest.raises(StructuralError):
            ProbeSpec(modes=2, r=[0.1, 0.2, 0.3])


class TestChannels:
    @pytest.mark.parametrize("kind", ["squeeze", "rotate", "displace", "two_mode_squeeze"])
    def test_generators_in_algebra(self, kind):
        assert is_algebra_element(ChannelSpec(kind).generator(2))

    def test_unknown_kind(self):
        with pytest.raises(StructuralError):
            ChannelSpec("teleport")

    def test_squeeze_on_vacuum(self):
        fam = apply_channel_family(ProbeSpec(), ChannelSpec("squeeze"))
        e = 0.37
        expected = np.array([[np.cosh(2 * e), -np.sinh(2 * e)], [-np.sinh(2 * e), np.cosh(2 * e)]])
        assert np.allclose(fam(e).covariance, expected)

    def test_rotation_on_thermal_is_constant(self):
        fam = apply_channel_family(ProbeSpec(n_th=0.4), ChannelSpec("rotate"))
        assert np.allclose(fam(0.8).covariance, fam(0.0).covariance)

    def test_displacement_linear(self):
        fam = apply_channel_family(ProbeSpec(displacement=0.5), ChannelSpec("displace", direction=[1j]))
        assert np.allclose(fam(0.3).mean, [0.5 + 0.3j])
        assert np.allclose(fam(0.3).covariance, np.eye(2))

    def test_williamson_factor_is_channel_times_probe(self):
        from gaussqfi.probes import probe_symplectic
        from scipy.linalg import expm

        spec = ProbeSpec(n_th=0.3, r=0.6, theta=0.4)
        ch = ChannelSpec("squeeze")
        s = expm(0.2 * ch.generator(1)) @ probe_symplectic(spec)
        lam = spec.lambda1[0]
        assert np.allclose(s @ (lam * np.eye(2)) @ s.conj().T, apply_channel_family(spec, ch)(0.2).covariance)


class TestClosedForm:
    def test_vacuum_baseline(self):
        assert squeezing_channel_qfi_closed(ProbeSpec()) == pytest.approx(2.0)

    def test_thermal_value(self):
        assert squeezing_channel_qfi_closed(ProbeSpec(n_th=0.5)) == pytest.approx(16 / 5)

    def test_optimal_phases(self):
        d = 0.8 * np.exp(1j * np.pi / 4)
        spec = ProbeSpec(n_th=0.3, r=0.5, theta=np.pi / 4, displacement=d)
        assert squeezing_channel_qfi_closed(spec) == pytest.approx(squeezing_channel_qfi_optimal(1.6, 0.5, 0.8))

    @given(n_th=st.floats(0.01, 2), r=st.floats(0, 1.2), theta=st.floats(0, 3.2),
           dm=st.floats(0, 2), phi=st.floats(0, 6.3), eps=st.floats(-0.3, 0.3))
    def test_matches_general_method(self, n_th, r, theta, dm, phi, eps):
        spec = ProbeSpec(n_th=n_th, r=r, theta=theta, displacement=dm * np.exp(1j * phi))
        fam = apply_channel_family(spec, ChannelSpec("squeeze"))
        closed = squeezing_channel_qfi_closed(spec)
        assert Q.qfi_multimode_williamson(fam, eps).value == pytest.approx(closed, rel=1e-9)

    def test_matches_regularized_when_pure(self, rng):
        for _ in range(10):
            spec = ProbeSpec(r=rng.uniform(0, 1), theta=rng.uniform(0, 3), displacement=rng.normal() + 1j * rng.normal())
            fam = apply_channel_family(spec, ChannelSpec("squeeze"))
            assert Q.qfi_regularized(fam, 0.0).value == pytest.approx(squeezing_channel_qfi_closed(spec), rel=1e-9)

    def test_one_mode_only(self):
        with pytest.raises(StructuralError):
            squeezing_channel_qfi_closed(ProbeSpec(modes=2))

    def test_optimal_examples(self):
        assert squeezing_channel_qfi_optimal(1, 0.7, 0) == pytest.approx(2 * math.cosh(1.4) ** 2)
        assert squeezing_channel_qfi_optimal(1, 0, 1) == pytest.approx(6.0)
        with pytest.raises(DomainError):
            squeezing_channel_qfi_optimal(0.5, 0, 0)

    def test_prefactor_range(self):
        lam = np.linspace(1, 50, 200)
        pref = 4 * lam ** 2 / (lam ** 2 + 1)
        assert pref[0] == pytest.approx(2) and np.all(pref < 4) and np.all(np.diff(pref) > 0)
        disp = [squeezing_channel_qfi_optimal(l, 0.3, 1.0) - squeezing_channel_qfi_optimal(l, 0.3, 0.0) for l in lam]
        assert np.all(np.diff(disp) < 0)


class TestEnhancement:
    def test_examples(self):
        assert enhancement_squeezing_for_orders(0) == 0.0
        assert enhancement_squeezing_for_orders(1) == pytest.approx(math.asinh(math.sqrt((math.sqrt(10) - 1) / 2)), rel=1e-12)
        assert enhancement_squeezing_for_orders(1) == pytest.approx(0.9092, abs=1e-4)
        assert math.cosh(2 * 1.46) ** 2 == pytest.approx(86.445, abs=1e-3)

    def test_linear_fit(self):
        for k in np.linspace(2, 6, 21):
            assert 0.35 + 0.58 * k == pytest.approx(enhancement_squeezing_for_orders(k), rel=0.02)

    @given(k=st.floats(0, 8))
    def test_ratio(self, k):
        r = enhancement_squeezing_for_orders(k)
        assert math.cosh(2 * r) ** 2 == pytest.approx(10 ** k, rel=1e-10)

    def test_negative(self):
        with pytest.raises(DomainError):
            enhancement_squeezing_for_orders(-1)


class TestOptimalTemperature:
    def _h(self, lam, r, d):
        return squeezing_channel_qfi_optimal(lam, r, d)

    def test_interior_root(self):
        res = optimal_thermal_occupation(0.5, 0.5)
        assert res.diagnosis == "interior_root"
        lam = res.lambda1
        assert lam ** 3 / (lam ** 2 + 1) ** 2 == pytest.approx(res.rhs, abs=1e-10)
        h = 1e-5
        slope = (self._h(lam + h, 0.5, 0.5) - self._h(lam - h, 0.5, 0.5)) / (2 * h)
        assert abs(slope) < 1e-7
        assert self._h(lam, 0.5, 0.5) >= self._h(lam + 1e-3, 0.5, 0.5)
        assert self._h(lam, 0.5, 0.5) >= self._h(lam - 1e-3, 0.5, 0.5)

    def test_no_root_boundary(self):
        # rhs ~0.571 exceeds max lambda^3/(lambda^2+1)^2 = 3 sqrt(3)/16: H decreases in lambda
        res = optimal_thermal_occupation(0.5, 1.0)
        assert res.diagnosis == "boundary_lambda_one" and res.lambda1 == 1.0
        assert res.stationary_points == ()

    def test_zero_displacement(self):
        res = optimal_thermal_occupation(0.7, 0.0)
        assert res.diagnosis == "unbounded_increasing" and math.isinf(res.lambda1)

    def test_two_stationary_points(self):
        # rhs in [1/4, 3 sqrt(3)/16): a local minimum below sqrt(3) and a local maximum above
        r = 0.3
        c_target = 0.28
        d = math.sqrt(c_target * 2 * math.cosh(2 * r) ** 2 / math.exp(2 * r))
        res = optimal_thermal_occupation(r, d)
        assert len(res.stationary_points) == 2
        best = max([1.0] + list(res.stationary_points), key=lambda l: self._h(l, r, d))
        assert res.lambda1 == pytest.approx(best)

    def test_global_scan(self, rng):
        for _ in range(20):
            r, d = rng.uniform(0, 1.5), rng.uniform(0.01, 2)
            res = optimal_thermal_occupation(r, d)
            grid = np.linspace(1, 200, 20001)
            best = max(self._h(l, r, d) for l in grid)
            assert self._h(res.lambda1, r, d) >= best - 1e-9


class TestPhotonBudget:
    @pytest.mark.parametrize("n", [0.25, 0.5, 1, 2, 4])
    def test_heisenberg(self, n):
        assert qfi_max_photon_budget(n, 0, 0) == 2 * (1 + 2 * n) ** 2

    def test_example(self):
        assert qfi_max_photon_budget(1, 1, 0) == pytest.approx(18 / 5)

    def test_infeasible(self):
        with pytest.raises(DomainError):
            qfi_max_photon_budget(1, 0.6, 0.6)

    def test_equals_optimal_law(self, rng):
        for _ in range(20):
            n = rng.uniform(0.5, 3)
            n_th, n_d = rng.uniform(0, n / 2), rng.uniform(0, n / 2)
            lam = 1 + 2 * n_th
            r = math.asinh(math.sqrt((n - n_d - n_th) / lam))
            assert qfi_max_photon_budget(n, n_th, n_d) == pytest.approx(
                squeezing_channel_qfi_optimal(lam, r, math.sqrt(n_d)), rel=1e-12)

    @pytest.mark.parametrize("n", [0.5, 1, 2])
    def test_argmax_origin(self, n):
        th, d, v = photon_budget_argmax(n, step=2e-2, refine=1)
        assert abs(th) < 1e-9 and abs(d) < 1e-9
        assert v == pytest.approx(2 * (1 + 2 * n) ** 2)


class TestEllipse:
    def test_vacuum_circle(self):
        pts = ellipse_export(build_probe(ProbeSpec()), 16)
        assert np.allclose(np.hypot(pts[:, 0], pts[:, 1]), 1)

    def test_squeezed_axes(self):
        r = 0.5
        pts = ellipse_export(build_probe(ProbeSpec(r=r)), 4)
        assert np.allclose(pts[0], [np.exp(-r), 0])
        assert np.allclose(pts[1], [0, np.exp(r)])

    def test_centre(self):
        pts = ellipse_export(build_probe(ProbeSpec(displacement=1 + 1j)), 200)
        assert np.allclose(pts.mean(axis=0), [np.sqrt(2), np.sqrt(2)])

    def test_figure1(self):
        sets = figure1_sets(n_points=7)
        assert len(sets) == 10
        for eps, theta, state, pts in sets:
            assert pts.shape == (7, 2)
            assert ellipse_area(state) == pytest.approx(math.pi, abs=1e-9)

    def test_rejects_two_modes(self):
        with pytest.raises(StructuralError):
            ellipse_export(build_probe(ProbeSpec(modes=2)), 5)
