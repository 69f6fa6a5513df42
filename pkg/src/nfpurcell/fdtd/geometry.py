"""Grid layout, mirror symmetry, UPML coefficient profiles, and subcell
permittivity rasterization for the cylinder geometry.

The Yee arrays share one shape (nx, ny, nz).  Node i sits at coordinate
(i - origin) * grid_nm per axis; component offsets add half a cell on the
component's own axis for E and on the two transverse axes for H.  On a
mirrored axis index 1 is the symmetry plane and index 0 is a ghost row used
for the magnetic-wall image fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from .config import SimulationConfig, default_run_steps

__all__ = ["GridLayout", "CartesianSource", "build_layout", "upml_vectors",
           "rasterize_cylinder", "FluxBox"]

# E-component lattice offsets: x-offset in units of grid_nm
_EDGE_OFFSET = {"x": (0.5, 0.0, 0.0), "y": (0.0, 0.5, 0.0), "z": (0.0, 0.0, 0.5)}

# Mirror-plane type per (dipole axis, plane axis): an electric dipole lying
# in a plane continues symmetrically through a magnetic wall (pmc), one
# normal to the plane through an electric wall (pec).
_PLANE_TYPE = {
    ("z", "y"): "pmc", ("z", "z"): "pec",
    ("x", "y"): "pmc", ("x", "z"): "pmc",
    ("y", "y"): "pec", ("y", "z"): "pmc",
}


@dataclass(frozen=True)
class CartesianSource:
    """A grid-aligned current edge with a complex combination weight."""
    axis: str                 # "x" | "y" | "z"
    i: int
    j: int
    k: int
    weight: float
    doubled: bool             # True when a PEC mirror doubles the moment


@dataclass(frozen=True)
class FluxBox:
    """Closed flux surface by node index; faces on symmetry planes carry no
    flux and are skipped by the assembler."""
    i0: int
    i1: int
    j0: int
    j1: int
    k0: int
    k1: int


@dataclass(frozen=True)
class GridLayout:
    """Everything the raw solver needs, fully index-based and hashable."""
    nx: int
    ny: int
    nz: int
    grid_nm: float
    dt_nm: float
    origin: tuple            # (ox, oy, oz) node index of coordinate zero
    sym_y: str               # "none" | "pec" | "pmc"
    sym_z: str
    pml: tuple               # ((xlo, xhi), (ylo, yhi), (zlo, zhi)) cell counts
    sources: tuple           # CartesianSource entries (coherent combination)
    boxes: tuple             # (inner FluxBox, outer FluxBox)
    # cylinder rasterization inputs; None for vacuum
    cyl_center_x_nm: float | None
    cyl_radius_nm: float | None
    cyl_index: float | None
    subcell_samples: int
    steps: int
    omega: float
    source_sigma_nm: float
    source_t0_nm: float
    dtype: str

    @property
    def shape(self):
        return (self.nx, self.ny, self.nz)

    @property
    def sym_factor(self) -> int:
        return (2 if self.sym_y != "none" else 1) * (2 if self.sym_z != "none" else 1)

    def coord(self, axis: int, index: float) -> float:
        return (index - self.origin[axis]) * self.grid_nm

    def describe(self) -> dict:
        return {
            "shape": [self.nx, self.ny, self.nz],
            "grid_nm": self.grid_nm,
            "dt_nm": self.dt_nm,
            "origin": list(self.origin),
            "sym_y": self.sym_y,
            "sym_z": self.sym_z,
            "pml": [list(p) for p in self.pml],
            "sources": [[s.axis, s.i, s.j, s.k, s.weight, s.doubled]
                        for s in self.sources],
            "boxes": [[b.i0, b.i1, b.j0, b.j1, b.k0, b.k1] for b in self.boxes],
            "cylinder": None if self.cyl_radius_nm is None else
                        [self.cyl_center_x_nm, self.cyl_radius_nm, self.cyl_index],
            "subcell_samples": self.subcell_samples,
            "steps": self.steps,
            "omega": self.omega,
            "source_sigma_nm": self.source_sigma_nm,
            "source_t0_nm": self.source_t0_nm,
            "dtype": self.dtype,
        }


def _dipole_cartesian_axes(config: SimulationConfig):
    """Decompose the requested orientation at the requested azimuth into
    grid-aligned dipole axes with combination weights."""
    az = config.azimuth_rad
    c, s = math.cos(az), math.sin(az)
    # clean up exact multiples of pi/2
    if abs(c) < 1e-12:
        c = 0.0
    if abs(s) < 1e-12:
        s = 0.0
    if config.orientation == "z":
        return [("z", 1.0)]
    if config.orientation == "r":
        comps = [("x", c), ("y", s)]
    else:                                   # phi
        comps = [("x", -s), ("y", c)]
    return [(ax, w) for ax, w in comps if w != 0.0]


def build_layout(config: SimulationConfig,
                 domain_override: dict | None = None) -> GridLayout:
    """Derive the index-space layout from the physical configuration.

    domain_override may pin {"x_max_nm", "x_min_nm"} so that every cell of a
    sweep column shares one grid (then a single vacuum reference at the
    farthest dipole position normalizes the whole column).
    """
    d = config.grid_nm
    pml = config.pml_cells
    r0 = config.fiber.radius_nm if config.fiber is not None else 0.0
    az = config.azimuth_rad

    axes_weights = _dipole_cartesian_axes(config)
    # dipole position in the transverse plane
    rad_pos = r0 + config.distance_nm
    x_d = rad_pos * math.cos(az)
    y_d = rad_pos * math.sin(az)
    if abs(x_d) < 1e-9:
        x_d = 0.0
    if abs(y_d) < 1e-9:
        y_d = 0.0

    on_plane_y = (y_d == 0.0)
    symmetric = (config.use_symmetry and on_plane_y and len(axes_weights) == 1)
    dip_axis = axes_weights[0][0] if len(axes_weights) == 1 else None

    sym_y = _PLANE_TYPE[(dip_axis, "y")] if symmetric else "none"
    sym_z = _PLANE_TYPE[(dip_axis, "z")] if symmetric else "none"

    pad = config.pad_lateral_nm
    gap = config.flux_gap_nm
    sep = config.flux_sep_nm
    if pad < gap + sep + 4 * d:
        raise DomainError("pad_lateral_nm too small for the nested flux boxes")

    # physical extents before snapping (structure = fiber cross-section + dipole)
    struct_x_lo = min(x_d, -r0 if config.fiber is not None else 0.0)
    struct_x_hi = max(x_d, r0)
    x_min = struct_x_lo - pad - pml * d
    x_max = struct_x_hi + pad + pml * d
    if domain_override:
        x_max = domain_override.get("x_max_nm", x_max)
        x_min = domain_override.get("x_min_nm", x_min)
        if struct_x_hi + gap + sep + 3 * d + pml * d > x_max:
            raise DomainError("domain override too small for the structure")

    y_extent = max(abs(y_d), r0) + pad + pml * d
    z_extent = (config.flux_halflength_nm + sep + config.pad_axial_nm + pml * d)

    # a full-domain run must center an edge-offset source component exactly,
    # so the coordinate origin shifts half a cell on that axis
    src_axes = {ax for ax, _ in axes_weights}
    nx = int(math.ceil((x_max - x_min) / d)) + 1
    ox = -x_min / d                       # node index of x = 0

    if sym_y == "none":
        half = int(math.ceil(y_extent / d))
        ny = 2 * half + 1
        oy = float(half) + (0.5 if "y" in src_axes else 0.0)
        pml_y = (pml, pml)
    else:
        ny = int(math.ceil(y_extent / d)) + 2
        oy = 1.0
        pml_y = (0, pml)
    if sym_z == "none":
        half = int(math.ceil(z_extent / d))
        nz = 2 * half + 1
        oz = float(half) + (0.5 if "z" in src_axes else 0.0)
        pml_z = (pml, pml)
    else:
        nz = int(math.ceil(z_extent / d)) + 2
        oz = 1.0
        pml_z = (0, pml)

    # Snap each source edge to its natural lattice site; the fiber center
    # then shifts continuously so the surface distance stays exact.
    sources = []
    x_c = 0.0
    for ax, w in axes_weights:
        offx, offy, offz = _EDGE_OFFSET[ax]
        fi = ox + x_d / d - offx
        fj = oy + y_d / d - offy
        fk = oz - offz
        i, j, k = round(fi), round(fj), round(fk)
        if sym_y != "none":
            j = 1
        if sym_z != "none":
            k = 1
        doubled = False
        if sym_y == "pec" and ax == "y":
            doubled = True
        if sym_z == "pec" and ax == "z":
            doubled = True
        sources.append(CartesianSource(ax, i, j, k, w, doubled))
        if len(axes_weights) == 1 and config.fiber is not None and y_d == 0.0:
            # the fiber center shifts so the snapped dipole edge sits at the
            # exact requested surface distance
            x_snapped = (i + offx - ox) * d
            sign = 1.0 if x_d >= 0 else -1.0
            x_c = x_snapped - sign * (config.distance_nm + r0)

    # flux boxes (node indices). Inner box enclosing structure and dipole.
    def node_lo(x_nm):
        return int(math.floor(ox + x_nm / d))

    def node_hi(x_nm):
        return int(math.ceil(ox + x_nm / d))

    i0 = node_lo(struct_x_lo + x_c - gap)
    i1 = node_hi(struct_x_hi + x_c + gap)
    y_hi = max(abs(y_d), r0) + gap
    if sym_y == "none":
        j0 = int(math.floor(oy - y_hi / d))
        j1 = int(math.ceil(oy + y_hi / d))
    else:
        j0, j1 = 1, int(math.ceil(oy + y_hi / d))
    if sym_z == "none":
        k0 = int(math.floor(oz - config.flux_halflength_nm / d))
        k1 = int(math.ceil(oz + config.flux_halflength_nm / d))
    else:
        k0, k1 = 1, int(math.ceil(oz + config.flux_halflength_nm / d))
    inner = FluxBox(i0, i1, j0, j1, k0, k1)
    ds = max(1, int(round(sep / d)))
    outer = FluxBox(i0 - ds, i1 + ds,
                    j0 if sym_y != "none" else j0 - ds, j1 + ds,
                    k0 if sym_z != "none" else k0 - ds, k1 + ds)

    # sanity: outer box strictly inside the PML-free region
    if (outer.i0 <= pml or outer.i1 >= nx - 1 - pml
            or outer.j1 >= ny - 1 - pml_y[1] or outer.k1 >= nz - 1 - pml_z[1]
            or (sym_y == "none" and outer.j0 <= pml)
            or (sym_z == "none" and outer.k0 <= pml)):
        raise DomainError("flux box touches the PML; increase padding")

    max_extent = max(nx, ny if sym_y == "none" else 2 * ny,
                     nz if sym_z == "none" else 2 * nz) * d
    steps = config.steps or default_run_steps(config, max_extent)
    tau = config.source_periods * config.wavelength_nm

    return GridLayout(
        nx=nx, ny=ny, nz=nz, grid_nm=d, dt_nm=config.dt_nm,
        origin=(ox, oy, oz), sym_y=sym_y, sym_z=sym_z,
        pml=((pml, pml), pml_y, pml_z),
        sources=tuple(sources), boxes=(inner, outer),
        cyl_center_x_nm=(x_c if config.fiber is not None else None),
        cyl_radius_nm=(r0 if config.fiber is not None else None),
        cyl_index=(config.fiber.core_index if config.fiber is not None else None),
        subcell_samples=config.subcell_samples,
        steps=steps, omega=config.omega,
        source_sigma_nm=tau, source_t0_nm=5.0 * tau,
        dtype=config.dtype,
    )


def upml_vectors(n: int, pml_lo: int, pml_hi: int, delta: float, dt: float,
                 m: float = 4.0, sigma_factor: float = 0.8,
                 kappa_max: float = 1.0):
    """Per-axis UPML update coefficients at integer and half-node positions.

    Returns dict with keys (name, offset) for name in a1,a2,b1,b2,c1,c2 and
    offset in 0 ("int") or 1 ("half").  Quartic polynomial grading; in the
    interior the coefficients reduce the update to the vanilla Yee scheme.
    """
    sigma_max = sigma_factor * (m + 1.0) / delta
    out = {}
    for off_name, off in (("int", 0.0), ("half", 0.5)):
        pos = np.arange(n, dtype=float) + off
        depth = np.zeros(n)
        if pml_lo > 0:
            dlo = (pml_lo - pos) / pml_lo
            depth = np.maximum(depth, np.clip(dlo, 0.0, 1.0))
        if pml_hi > 0:
            dhi = (pos - (n - 1 - pml_hi)) / pml_hi
            depth = np.maximum(depth, np.clip(dhi, 0.0, 1.0))
        sigma = sigma_max * depth ** m
        kappa = 1.0 + (kappa_max - 1.0) * depth ** m
        denom = 2.0 * kappa + sigma * dt
        out[("a1", off_name)] = (2.0 * kappa - sigma * dt) / denom
        out[("a2", off_name)] = 2.0 * dt / denom
        out[("b1", off_name)] = (2.0 * kappa - sigma * dt) / denom
        out[("b2", off_name)] = 2.0 / denom
        out[("c1", off_name)] = kappa + 0.5 * sigma * dt
        out[("c2", off_name)] = kappa - 0.5 * sigma * dt
    return out


def rasterize_cylinder(layout: GridLayout):
    """Inverse relative permittivity on the three staggered E-sublattices.

    The cylinder axis is parallel to z, so the maps are 2-D over (x, y) and
    broadcast along z.  Each cell is supersampled subcell_samples^2 times and
    the fill fraction sets a volume-averaged permittivity.
    """
    nx, ny = layout.nx, layout.ny
    d = layout.grid_nm
    if layout.cyl_radius_nm is None:
        one = np.ones((nx, ny))
        return one, one.copy(), one.copy()

    s = layout.subcell_samples
    eps_core = layout.cyl_index ** 2
    xc = layout.cyl_center_x_nm
    ox, oy = layout.origin[0], layout.origin[1]
    sub = (np.arange(s) + 0.5) / s - 0.5          # in cells

    maps = []
    for offx, offy in ((0.5, 0.0), (0.0, 0.5), (0.0, 0.0)):   # Ex, Ey, Ez
        ix = np.arange(nx)[:, None, None, None]
        jy = np.arange(ny)[None, :, None, None]
        x = (ix + offx - ox + sub[None, None, :, None]) * d - xc
        y = (jy + offy - oy + sub[None, None, None, :]) * d
        fill = (x * x + y * y <= layout.cyl_radius_nm ** 2).mean(axis=(2, 3))
        eps = 1.0 + fill * (eps_core - 1.0)
        maps.append(1.0 / eps)
    return tuple(maps)
