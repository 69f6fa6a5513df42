"""Fundamental-mode solver for a vacuum-clad step-index nanofiber.

Solves the l=1 hybrid-mode characteristic equation for HE11, builds the six
cylindrical field components from the boundary-condition null space, and
derives the orientation-resolved guided-emission enhancement profiles
alpha_i(r) (proportional to the squared evanescent field of the mode).

Conventions: lengths in nm, fields ~ exp(i(w t - beta z + phi)), normalized
units with c = eps0 = mu0 = 1 so that w*mu0 = w*eps0 = k.  Field amplitudes
carry an arbitrary overall scale; alpha profiles are pinned by a single
calibration constant (see SURFACE_ALPHA_CALIBRATION).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sp

from .errors import DomainError, NoModeError
from .numerics import RootBracket, find_root

__all__ = [
    "FiberSpec",
    "GuidedMode",
    "AlphaProfile",
    "SURFACE_ALPHA_CALIBRATION",
    "single_mode_cutoff_radius",
    "dispersion_residual",
    "solve_he11",
    "field_components",
    "field_h_components",
    "evanescent_field",
    "alpha_profile",
    "alpha_asymptotic",
]

# Second-mode (TE01/TM01) cutoff: first zero of J0
_J0_FIRST_ZERO = 2.404825557695773

# Orientation-averaged alpha at the fiber surface for the reference geometry;
# only the shape of alpha matters downstream (prefactors cancel in averages),
# this constant makes reported values meaningful.
SURFACE_ALPHA_CALIBRATION = 0.2


@dataclass(frozen=True)
class FiberSpec:
    """Step-index nanofiber geometry seen by every solver."""
    radius_nm: float
    core_index: float
    wavelength_nm: float
    outside_index: float = 1.0

    def __post_init__(self):
        if self.radius_nm <= 0:
            raise DomainError(f"radius must be positive, got {self.radius_nm}")
        if self.wavelength_nm <= 0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength_nm}")
        if not self.core_index > self.outside_index >= 1.0:
            raise DomainError(
                f"need core index > outside index >= 1, got "
                f"{self.core_index}, {self.outside_index}")

    @property
    def k_per_nm(self) -> float:
        return 2.0 * math.pi / self.wavelength_nm

    @property
    def v_number(self) -> float:
        return self.k_per_nm * self.radius_nm * math.sqrt(
            self.core_index ** 2 - self.outside_index ** 2)


def single_mode_cutoff_radius(wavelength_nm: float, core_index: float,
                              outside_index: float = 1.0) -> float:
    """Radius where V reaches the TE01/TM01 cutoff; below it only HE11 guides."""
    k = 2.0 * math.pi / wavelength_nm
    return _J0_FIRST_ZERO / (k * math.sqrt(core_index ** 2 - outside_index ** 2))


@dataclass(frozen=True)
class GuidedMode:
    """Solved HE11 eigenmode with its field-amplitude coefficients.

    amplitudes = (A, C, Ao, Co): E_z/H_z amplitudes inside and outside, the
    null vector of the tangential boundary-condition system at r = radius.
    """
    spec: FiberSpec
    beta_per_nm: float
    h_per_nm: float
    q_per_nm: float
    v_number: float
    s_param: float
    amplitudes: tuple[complex, complex, complex, complex]
    single_mode: bool
    residual: float

    @property
    def k_per_nm(self) -> float:
        return self.spec.k_per_nm


def dispersion_residual(spec: FiberSpec, beta: float) -> float:
    """LHS - RHS of the l=1 hybrid characteristic equation

    [J1'(ha)/(ha J1(ha)) + K1'(qa)/(qa K1(qa))]
      * [J1'(ha)/(ha J1(ha)) + (n2^2/n1^2) K1'(qa)/(qa K1(qa))]
      = (beta/(k n1))^2 * (1/(ha)^2 + 1/(qa)^2)^2
    """
    k = spec.k_per_nm
    n1, n2, a = spec.core_index, spec.outside_index, spec.radius_nm
    h2 = k * k * n1 * n1 - beta * beta
    q2 = beta * beta - k * k * n2 * n2
    if h2 <= 0 or q2 <= 0:
        raise DomainError("beta outside the guided bracket (k n2, k n1)")
    ha = math.sqrt(h2) * a
    qa = math.sqrt(q2) * a
    jterm = sp.jvp(1, ha) / (ha * sp.jv(1, ha))
    kterm = sp.kvp(1, qa) / (qa * sp.kv(1, qa))
    lhs = (jterm + kterm) * (jterm + (n2 * n2) / (n1 * n1) * kterm)
    rhs = (beta / (k * n1)) ** 2 * (1.0 / ha ** 2 + 1.0 / qa ** 2) ** 2
    return lhs - rhs


def _dispersion_scale(spec: FiberSpec, beta: float) -> float:
    """Natural magnitude of the characteristic equation near beta."""
    k = spec.k_per_nm
    n1, n2, a = spec.core_index, spec.outside_index, spec.radius_nm
    ha = math.sqrt(k * k * n1 * n1 - beta * beta) * a
    qa = math.sqrt(beta * beta - k * k * n2 * n2) * a
    jterm = sp.jvp(1, ha) / (ha * sp.jv(1, ha))
    kterm = sp.kvp(1, qa) / (qa * sp.kv(1, qa))
    rhs = (beta / (k * n1)) ** 2 * (1.0 / ha ** 2 + 1.0 / qa ** 2) ** 2
    return abs(jterm) ** 2 + abs(kterm) ** 2 + abs(rhs)


def _boundary_matrix(spec: FiberSpec, beta: float) -> np.ndarray:
    """Tangential-continuity system M v = 0 for v = (A, C, Ao, Co)."""
    k = spec.k_per_nm
    n1, n2, a = spec.core_index, spec.outside_index, spec.radius_nm
    h = math.sqrt(k * k * n1 * n1 - beta * beta)
    q = math.sqrt(beta * beta - k * k * n2 * n2)
    j1, j1p = sp.jv(1, h * a), sp.jvp(1, h * a)
    k1, k1p = sp.kv(1, q * a), sp.kvp(1, q * a)
    wmu = weps = k
    m = np.zeros((4, 4), dtype=complex)
    m[0] = [j1, 0.0, -k1, 0.0]                               # E_z
    m[1] = [0.0, j1, 0.0, -k1]                               # H_z
    m[2] = [-(1j / h ** 2) * (1j * beta / a) * j1,           # E_phi
            (1j / h ** 2) * wmu * h * j1p,
            -(1j / q ** 2) * (1j * beta / a) * k1,
            (1j / q ** 2) * wmu * q * k1p]
    m[3] = [-(1j / h ** 2) * weps * n1 * n1 * h * j1p,       # H_phi
            -(1j / h ** 2) * (1j * beta / a) * j1,
            -(1j / q ** 2) * weps * n2 * n2 * q * k1p,
            -(1j / q ** 2) * (1j * beta / a) * k1]
    return m


def solve_he11(spec: FiberSpec, n_scan: int = 2000) -> GuidedMode:
    """Find the HE11 root of the characteristic equation.

    Scans (k n2, k n1) uniformly for sign changes, refines each, keeps
    genuine roots (small residual relative to the equation's scale) and
    returns the one with the largest beta.
    """
    k = spec.k_per_nm
    lo = k * spec.outside_index
    hi = k * spec.core_index
    eps = (hi - lo) * 1e-9
    betas = np.linspace(lo + eps, hi - eps, n_scan + 1)
    vals = np.array([dispersion_residual(spec, b) for b in betas])

    roots = []
    for i in range(n_scan):
        va, vb = vals[i], vals[i + 1]
        if not (np.isfinite(va) and np.isfinite(vb)) or va * vb >= 0:
            continue
        bracket = RootBracket(betas[i], betas[i + 1], tolerance=1e-16 * k)
        root = find_root(lambda b: dispersion_residual(spec, b), bracket)
        rel = abs(dispersion_residual(spec, root)) / _dispersion_scale(spec, root)
        if rel < 1e-8:      # sign changes at J1 poles refine to large residual
            roots.append((root, rel))
    if not roots:
        raise NoModeError(
            f"no HE11 root in ({lo:.6g}, {hi:.6g}) for radius "
            f"{spec.radius_nm} nm at {spec.wavelength_nm} nm")

    beta, residual = max(roots, key=lambda t: t[0])
    h = math.sqrt(k * k * spec.core_index ** 2 - beta * beta)
    q = math.sqrt(beta * beta - k * k * spec.outside_index ** 2)

    m = _boundary_matrix(spec, beta)
    _, sv, vh = np.linalg.svd(m)
    v = vh[-1].conj()
    v = v / v[0]                       # fix gauge: A = 1 (real)

    ha, qa = h * spec.radius_nm, q * spec.radius_nm
    s = ((1.0 / ha ** 2 + 1.0 / qa ** 2)
         / (sp.jvp(1, ha) / (ha * sp.jv(1, ha))
            + sp.kvp(1, qa) / (qa * sp.kv(1, qa))))

    return GuidedMode(
        spec=spec,
        beta_per_nm=beta,
        h_per_nm=h,
        q_per_nm=q,
        v_number=spec.v_number,
        s_param=float(s),
        amplitudes=tuple(v),
        single_mode=bool(spec.v_number < _J0_FIRST_ZERO),
        residual=float(residual),
    )


def _transverse(kappa2: float, beta: float, k: float, n: float,
                zval: complex, zder: complex, czval: complex, czder: complex,
                r: float) -> tuple[complex, complex]:
    """(E_r, E_phi) from the axial fields; kappa2 is h^2 inside, -q^2 outside.

    zval/zder: E_z and its radial derivative; czval/czder: same for H_z.
    """
    wmu = k
    e_r = -(1j / kappa2) * (beta * zder + (1j * wmu / r) * czval)
    e_phi = -(1j / kappa2) * ((1j * beta / r) * zval - wmu * czder)
    return e_r, e_phi


def field_components(mode: GuidedMode, r_prime_nm) -> tuple:
    """Complex (e_r, e_phi, e_z) of the circular-basis HE11 at radius r'.

    Accepts scalars or arrays; r' is measured from the fiber axis and may
    lie inside or outside the core.  The quasilinear mode pair built from
    this basis has azimuth-summed component intensities equal to these
    moduli squared (times a constant), which is what the alpha profiles use.
    """
    r = np.asarray(r_prime_nm, dtype=float)
    if np.any(r <= 0):
        raise DomainError("radius from axis must be positive")
    a_in, c_in, a_out, c_out = mode.amplitudes
    k, beta = mode.k_per_nm, mode.beta_per_nm
    h, q = mode.h_per_nm, mode.q_per_nm
    n1 = mode.spec.core_index
    n2 = mode.spec.outside_index
    inside = r < mode.spec.radius_nm

    e_r = np.empty(r.shape, dtype=complex)
    e_phi = np.empty(r.shape, dtype=complex)
    e_z = np.empty(r.shape, dtype=complex)

    if np.any(inside):
        ri = r[inside]
        ez = a_in * sp.jv(1, h * ri)
        ezd = a_in * h * sp.jvp(1, h * ri)
        hz = c_in * sp.jv(1, h * ri)
        hzd = c_in * h * sp.jvp(1, h * ri)
        er, ep = _transverse(h * h, beta, k, n1, ez, ezd, hz, hzd, ri)
        e_r[inside], e_phi[inside], e_z[inside] = er, ep, ez
    if np.any(~inside):
        ro = r[~inside]
        ez = a_out * sp.kv(1, q * ro)
        ezd = a_out * q * sp.kvp(1, q * ro)
        hz = c_out * sp.kv(1, q * ro)
        hzd = c_out * q * sp.kvp(1, q * ro)
        er, ep = _transverse(-q * q, beta, k, n2, ez, ezd, hz, hzd, ro)
        e_r[~inside], e_phi[~inside], e_z[~inside] = er, ep, ez

    if np.isscalar(r_prime_nm):
        return complex(e_r), complex(e_phi), complex(e_z)
    return e_r, e_phi, e_z


def field_h_components(mode: GuidedMode, r_prime_nm) -> tuple:
    """Complex (h_r, h_phi, h_z) companion to field_components."""
    r = np.asarray(r_prime_nm, dtype=float)
    if np.any(r <= 0):
        raise DomainError("radius from axis must be positive")
    a_in, c_in, a_out, c_out = mode.amplitudes
    k, beta = mode.k_per_nm, mode.beta_per_nm
    h, q = mode.h_per_nm, mode.q_per_nm
    n1, n2 = mode.spec.core_index, mode.spec.outside_index
    weps = k
    inside = r < mode.spec.radius_nm

    h_r = np.empty(r.shape, dtype=complex)
    h_phi = np.empty(r.shape, dtype=complex)
    h_z = np.empty(r.shape, dtype=complex)

    def fill(sel, rad, amp_e, amp_h, kappa2, karg, n, jfam):
        zv = amp_h * jfam(1, karg * rad)
        zvd = amp_h * karg * (sp.jvp(1, karg * rad) if jfam is sp.jv
                              else sp.kvp(1, karg * rad))
        ev = amp_e * jfam(1, karg * rad)
        evd = amp_e * karg * (sp.jvp(1, karg * rad) if jfam is sp.jv
                              else sp.kvp(1, karg * rad))
        hr = -(1j / kappa2) * (beta * zvd - (1j * weps * n * n / rad) * ev)
        hp = -(1j / kappa2) * ((1j * beta / rad) * zv + weps * n * n * evd)
        h_r[sel], h_phi[sel], h_z[sel] = hr, hp, zv

    if np.any(inside):
        fill(inside, r[inside], a_in, c_in, h * h, h, n1, sp.jv)
    if np.any(~inside):
        fill(~inside, r[~inside], a_out, c_out, -q * q, q, n2, sp.kv)

    if np.isscalar(r_prime_nm):
        return complex(h_r), complex(h_phi), complex(h_z)
    return h_r, h_phi, h_z


def evanescent_field(mode: GuidedMode, r_nm) -> tuple:
    """Complex exterior field (e_r, e_phi, e_z) at distance r from the surface."""
    r = np.asarray(r_nm, dtype=float)
    if np.any(r < 0):
        raise DomainError("distance from surface must be >= 0")
    return field_components(mode, mode.spec.radius_nm + r)


@dataclass(frozen=True)
class AlphaProfile:
    """Guided-emission enhancement per dipole orientation on a radial grid.

    r_nm is distance from the fiber surface.  All three sequences share one
    calibration constant, chosen so the orientation mean at r=0 equals
    SURFACE_ALPHA_CALIBRATION; any global prefactor cancels in the weighted
    averages downstream.
    """
    r_nm: np.ndarray
    alpha_z: np.ndarray
    alpha_phi: np.ndarray
    alpha_r: np.ndarray
    calibration: float
    mode: GuidedMode

    def at(self, r_nm) -> tuple:
        """Linear interpolation of (alpha_z, alpha_phi, alpha_r) at r."""
        r = np.asarray(r_nm, dtype=float)
        return (np.interp(r, self.r_nm, self.alpha_z),
                np.interp(r, self.r_nm, self.alpha_phi),
                np.interp(r, self.r_nm, self.alpha_r))


def _alpha_raw(mode: GuidedMode, r_nm) -> tuple:
    e_r, e_phi, e_z = evanescent_field(mode, r_nm)
    return (np.abs(e_z) ** 2, np.abs(e_phi) ** 2, np.abs(e_r) ** 2)


def alpha_calibration(mode: GuidedMode) -> float:
    """Constant mapping |e_i|^2 to alpha_i: orientation mean 0.2 at surface."""
    az0, ap0, ar0 = _alpha_raw(mode, 0.0)
    return SURFACE_ALPHA_CALIBRATION / ((az0 + ap0 + ar0) / 3.0)


def alpha_profile(mode: GuidedMode, grid_nm) -> AlphaProfile:
    """alpha_i(r) on a grid of distances from the surface (strictly increasing)."""
    r = np.asarray(grid_nm, dtype=float)
    if r.ndim != 1 or r.size < 2 or np.any(np.diff(r) <= 0):
        raise DomainError("grid must be a strictly increasing 1-D sequence")
    if r[0] < 0:
        raise DomainError("grid must start at r >= 0")
    cal = alpha_calibration(mode)
    az, ap, ar = _alpha_raw(mode, r)
    return AlphaProfile(r, cal * az, cal * ap, cal * ar, cal, mode)


@lru_cache(maxsize=32)
def _solve_cached(spec: FiberSpec) -> GuidedMode:
    return solve_he11(spec)


def alpha_asymptotic(spec: FiberSpec, r_nm) -> np.ndarray:
    """Closed-form evanescent-decay shape of the orientation-mean alpha:

        alpha(r) ~ (1/(r0 + r)) * exp(-2 q r)

    with the solved q, normalized to the exact profile at r = 0.  Valid for
    q(r0+r) > 1 (checked at the innermost requested point).
    """
    mode = _solve_cached(spec)
    r = np.asarray(r_nm, dtype=float)
    if np.any(mode.q_per_nm * (spec.radius_nm + r) <= 1.0):
        raise DomainError("asymptotic form requires q(r0+r) > 1")
    cal = alpha_calibration(mode)
    az0, ap0, ar0 = _alpha_raw(mode, 0.0)
    mean0 = cal * (az0 + ap0 + ar0) / 3.0
    shape = (spec.radius_nm / (spec.radius_nm + r)) * np.exp(-2.0 * mode.q_per_nm * r)
    out = mean0 * shape
    if np.isscalar(r_nm):
        return float(out)
    return out
