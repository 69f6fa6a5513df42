"""Surface potential, density depletion, and absorption-shift weights."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfpurcell import atom_env as env
from nfpurcell.errors import DomainError, RangeError

# Frozen arbitrary-precision references at r = 100 nm, T = 150 uK.
UG_100NM = -2.34663124336e-28
UE_100NM = -4.46805194805e-28
RHO_100NM = 0.929765202285
DELTA_100NM_MHZ = -0.320162729441


class TestPotential:
    def test_ground_reference_point(self):
        assert env.potential(env.GROUND_COEFFS, 100.0) == pytest.approx(
            UG_100NM, rel=1e-9)

    def test_excited_reference_point(self):
        assert env.potential(env.EXCITED_COEFFS, 100.0) == pytest.approx(
            UE_100NM, rel=1e-9)

    def test_vdw_asymptote_small_r(self):
        # U * r^3 -> -C3 as r -> 0
        r_nm = 1.0
        u = env.potential(env.GROUND_COEFFS, r_nm)
        assert u * (r_nm * 1e-9) ** 3 == pytest.approx(-env.GROUND_COEFFS.c3, rel=0.011)

    def test_cp_asymptote_large_r(self):
        # U * r^4 -> -C4 as r -> inf
        r_nm = 10_000.0
        u = env.potential(env.GROUND_COEFFS, r_nm)
        assert u * (r_nm * 1e-9) ** 4 == pytest.approx(-env.GROUND_COEFFS.c4, rel=0.01)

    @given(st.floats(min_value=0.5, max_value=5000.0))
    @settings(max_examples=100)
    def test_strictly_increasing(self, r):
        u1 = env.potential(env.GROUND_COEFFS, r)
        u2 = env.potential(env.GROUND_COEFFS, r * 1.01)
        assert u2 > u1
        assert u1 < 0

    def test_domain_error(self):
        with pytest.raises(DomainError):
            env.potential(env.GROUND_COEFFS, 0.0)


class TestDensity:
    SPEC = env.EnvSpec(temperature_uk=150.0)

    def test_far_field_unity(self):
        assert env.density(self.SPEC, 0.0) == 1.0

    def test_analytic_half_point(self):
        assert env.density(self.SPEC, -self.SPEC.mean_energy_j) == pytest.approx(0.5)

    def test_reference_point(self):
        ug = env.potential(env.GROUND_COEFFS, 100.0)
        assert env.density(self.SPEC, ug) == pytest.approx(RHO_100NM, abs=0.005)

    def test_unit_consistency(self):
        # evaluating via metres with converted constants gives the same
        # dimensionless output
        r_nm = 73.0
        u = env.potential(env.GROUND_COEFFS, r_nm)
        r_m = r_nm * 1e-9
        u_direct = -env.GROUND_COEFFS.c4 / (
            r_m ** 3 * (r_m + env.GROUND_COEFFS.crossover_m))
        assert env.density(self.SPEC, u) == pytest.approx(
            env.density(self.SPEC, u_direct), rel=1e-12)


class TestAbsorption:
    SPEC = env.EnvSpec()

    def test_unshifted_resonance(self):
        delta, p = env.absorption(self.SPEC, -1e-30, -1e-30)
        assert delta == 0.0
        assert p == pytest.approx(1.0 / (1.0 + self.SPEC.saturation))

    def test_reference_detuning(self):
        ug = env.potential(env.GROUND_COEFFS, 100.0)
        ue = env.potential(env.EXCITED_COEFFS, 100.0)
        delta, _ = env.absorption(self.SPEC, ug, ue)
        assert delta == pytest.approx(DELTA_100NM_MHZ, rel=0.05)

    def test_half_width_point(self):
        # delta = gamma0/2 with s = 0 gives p_abs = 1/2
        du = env.cn.PLANCK_H * env.cn.GAMMA0_HZ / 2.0
        _, p = env.absorption(self.SPEC, -2.0 * du, -3.0 * du)
        assert p == pytest.approx(0.5, rel=1e-12)

    def test_saturation_plumbed(self):
        spec = env.EnvSpec(saturation=0.4)
        _, p = env.absorption(spec, -1e-30, -1e-30)
        assert p == pytest.approx(1.0 / 1.4)


class TestProfile:
    def test_build_and_invariants(self):
        spec = env.EnvSpec()
        prof = env.build_profile(spec)
        assert np.all(prof.u_ground_j < 0)
        assert np.all(np.diff(prof.u_ground_j) > 0)
        assert np.all((prof.rho_rel > 0) & (prof.rho_rel <= 1))
        assert np.all(np.diff(prof.rho_rel) > 0)
        assert np.all(prof.p_abs > 0)
        assert np.all(prof.p_abs <= 1.0 / (1.0 + spec.saturation) + 1e-15)
        assert np.all(prof.delta_mhz < 0)        # always red shifted

    def test_far_end_asymptotics(self):
        prof = env.build_profile(env.EnvSpec(), grid_nm=np.geomspace(5.0, 1200.0, 300))
        assert prof.rho_rel[-1] > 0.999
        assert prof.p_abs[-1] == pytest.approx(1.0, abs=1e-3)

    def test_weight_product_peaks_off_surface(self):
        from nfpurcell import fiber
        spec = fiber.FiberSpec(230.0, 1.45367, 780.241)
        mode = fiber.solve_he11(spec)
        grid = np.geomspace(5.0, 1200.0, 500)
        prof = env.build_profile(env.EnvSpec(), grid_nm=grid)
        alpha = fiber.alpha_profile(mode, grid)
        mean_alpha = (alpha.alpha_z + alpha.alpha_phi + alpha.alpha_r) / 3.0
        product = prof.rho_rel * prof.p_abs * mean_alpha
        i_max = int(np.argmax(product))
        assert 0 < i_max < grid.size - 1
        assert grid[i_max] > 20.0

    def test_grid_floor_enforced(self):
        with pytest.raises(RangeError):
            env.build_profile(env.EnvSpec(), grid_nm=np.linspace(1.0, 100.0, 50))

    def test_excited_deeper_than_ground(self):
        prof = env.build_profile(env.EnvSpec())
        assert np.all(prof.u_excited_j < prof.u_ground_j)
