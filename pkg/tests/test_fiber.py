"""HE11 mode solver, boundary conditions, and alpha profiles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfpurcell import fiber
from nfpurcell.errors import DomainError

REF = fiber.FiberSpec(radius_nm=230.0, core_index=1.45367, wavelength_nm=780.241)


@pytest.fixture(scope="module")
def mode():
    return fiber.solve_he11(REF)


class TestDispersion:
    def test_q_over_k_reference_geometry(self, mode):
        assert mode.q_per_nm / mode.k_per_nm == pytest.approx(0.56, abs=0.005)

    def test_v_number_reference_geometry(self, mode):
        assert mode.v_number == pytest.approx(1.955, abs=0.005)

    def test_single_mode_cutoff_radius(self):
        r_cut = fiber.single_mode_cutoff_radius(780.0, 1.45367)
        assert r_cut == pytest.approx(284.0, abs=2.0)
        below = fiber.solve_he11(fiber.FiberSpec(r_cut - 1.0, 1.45367, 780.0))
        above = fiber.solve_he11(fiber.FiberSpec(r_cut + 1.0, 1.45367, 780.0))
        assert below.single_mode and not above.single_mode

    def test_guided_bracket_and_residual(self, mode):
        k = mode.k_per_nm
        assert k < mode.beta_per_nm < k * REF.core_index
        assert mode.residual < 1e-10

    def test_transverse_parameters_reconstruct(self, mode):
        k, b = mode.k_per_nm, mode.beta_per_nm
        assert mode.q_per_nm ** 2 == pytest.approx(b * b - k * k, rel=1e-12)
        assert mode.h_per_nm ** 2 == pytest.approx(
            k * k * REF.core_index ** 2 - b * b, rel=1e-12)
        # h^2 + q^2 = k^2 (n1^2 - 1) for vacuum cladding
        assert mode.h_per_nm ** 2 + mode.q_per_nm ** 2 == pytest.approx(
            k * k * (REF.core_index ** 2 - 1.0), rel=1e-12)

    def test_root_verified_by_bisection_oracle(self, mode):
        # plain bisection, independent of the production root finder
        f = lambda b: fiber.dispersion_residual(REF, b)
        lo = mode.beta_per_nm * (1 - 1e-4)
        hi = mode.beta_per_nm * (1 + 1e-4)
        assert f(lo) * f(hi) < 0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if f(lo) * f(mid) <= 0:
                hi = mid
            else:
                lo = mid
        assert mode.beta_per_nm == pytest.approx(0.5 * (lo + hi), rel=1e-12)

    @given(st.floats(min_value=0.5, max_value=2.0))
    @settings(max_examples=10, deadline=None)
    def test_scale_invariance(self, scale):
        scaled = fiber.FiberSpec(REF.radius_nm * scale, REF.core_index,
                                 REF.wavelength_nm * scale)
        m0 = fiber.solve_he11(REF)
        m1 = fiber.solve_he11(scaled)
        assert m1.beta_per_nm / m1.k_per_nm == pytest.approx(
            m0.beta_per_nm / m0.k_per_nm, rel=1e-9)
        assert m1.q_per_nm / m1.k_per_nm == pytest.approx(
            m0.q_per_nm / m0.k_per_nm, rel=1e-9)


class TestFields:
    def test_tangential_e_continuity(self, mode):
        a = REF.radius_nm
        ein = fiber.field_components(mode, a * (1 - 1e-12))
        eout = fiber.field_components(mode, a * (1 + 1e-12))
        assert abs(ein[2] - eout[2]) < 1e-8 * abs(eout[2])   # e_z
        assert abs(ein[1] - eout[1]) < 1e-8 * abs(eout[1])   # e_phi

    def test_normal_displacement_continuity(self, mode):
        a = REF.radius_nm
        ein = fiber.field_components(mode, a * (1 - 1e-12))
        eout = fiber.field_components(mode, a * (1 + 1e-12))
        ratio = REF.core_index ** 2 * ein[0] / eout[0]
        assert abs(ratio - 1.0) < 1e-8

    def test_tangential_h_continuity(self, mode):
        a = REF.radius_nm
        hin = fiber.field_h_components(mode, a * (1 - 1e-12))
        hout = fiber.field_h_components(mode, a * (1 + 1e-12))
        assert abs(hin[2] - hout[2]) < 1e-8 * abs(hout[2])
        assert abs(hin[1] - hout[1]) < 1e-8 * abs(hout[1])

    def test_ez_follows_k1_exactly(self, mode):
        from scipy.special import kv
        q = mode.q_per_nm
        a = REF.radius_nm
        r = 3.0 / q - a  # the point where q*r' = 3
        ez_r = fiber.evanescent_field(mode, r)[2]
        ez_0 = fiber.evanescent_field(mode, 0.0)[2]
        expected = kv(1, 3.0) / kv(1, q * a)
        assert abs(ez_r / ez_0) == pytest.approx(abs(expected), rel=1e-12)


class TestAlpha:
    def test_surface_ratio_r_over_z(self, mode):
        prof = fiber.alpha_profile(mode, np.linspace(0.0, 400.0, 401))
        assert prof.alpha_r[0] / prof.alpha_z[0] == pytest.approx(3.0, abs=0.3)

    def test_surface_calibration(self, mode):
        prof = fiber.alpha_profile(mode, np.linspace(0.0, 400.0, 401))
        mean0 = (prof.alpha_z[0] + prof.alpha_phi[0] + prof.alpha_r[0]) / 3.0
        assert mean0 == pytest.approx(0.2, rel=1e-12)

    def test_positive_and_strictly_decreasing(self, mode):
        prof = fiber.alpha_profile(mode, np.linspace(0.0, 1500.0, 600))
        for arr in (prof.alpha_z, prof.alpha_phi, prof.alpha_r):
            assert np.all(arr > 0)
            assert np.all(np.diff(arr) < 0)

    def test_far_field_decay_to_zero(self, mode):
        prof = fiber.alpha_profile(mode, np.array([0.0, 2000.0, 4000.0]))
        assert prof.alpha_r[-1] < 1e-6 * prof.alpha_r[0]

    def test_ratio_window_near_surface(self, mode):
        # r/z anisotropy stays close to 3 out to ~250 nm, then drifts upward
        prof = fiber.alpha_profile(mode, np.linspace(0.0, 250.0, 126))
        ratio = prof.alpha_r / prof.alpha_z
        assert np.all(ratio > 2.7) and np.all(ratio < 3.4)

    def test_asymptotic_matches_profile_at_zero(self, mode):
        prof = fiber.alpha_profile(mode, np.linspace(0.0, 10.0, 11))
        mean0 = (prof.alpha_z[0] + prof.alpha_phi[0] + prof.alpha_r[0]) / 3.0
        assert fiber.alpha_asymptotic(REF, 0.0) == pytest.approx(mean0, rel=1e-12)

    def test_asymptotic_within_five_percent_of_exact(self, mode):
        r = np.linspace(0.0, 400.0, 81)
        prof = fiber.alpha_profile(mode, r)
        exact_mean = (prof.alpha_z + prof.alpha_phi + prof.alpha_r) / 3.0
        asym = fiber.alpha_asymptotic(REF, r)
        assert np.max(np.abs(asym / exact_mean - 1.0)) < 0.05

    def test_efolding_length(self, mode):
        efold = 1.0 / (2.0 * mode.q_per_nm)
        assert efold == pytest.approx(110.8, abs=1.0)

    def test_grid_validation(self, mode):
        with pytest.raises(DomainError):
            fiber.alpha_profile(mode, np.array([0.0, 0.0, 1.0]))
