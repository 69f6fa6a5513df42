"""Decay-rate maps over (fiber radius, surface distance, dipole orientation).

Every cell of a sweep column (fixed radius and orientation) shares one grid,
sized for the farthest dipole of the column; a single vacuum reference with
the dipole at that farthest position then normalizes the whole column.  This
is the "divide by the far cell, multiply by its vacuum ratio" normalization,
which telescopes to raw_power(d) / p0(far) and anchors the large-distance
limit at one.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..cache import ResultCache, content_key
from ..errors import AccuracyError, RangeError
from .config import SimulationConfig
from .geometry import build_layout
from .solver import KERNEL_VERSION, _defect, _FLUX_DEFECT_LIMIT, raw_power_run

__all__ = ["DecayMap", "sweep", "interpolate"]

ORIENTATIONS = ("z", "phi", "r")


@dataclass(frozen=True)
class DecayMap:
    """Tabulated gamma_i/gamma0 on strictly increasing axes."""
    radius_nm: np.ndarray
    distance_nm: np.ndarray
    tables: dict                      # orientation -> (n_radius, n_distance)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        r = np.asarray(self.radius_nm, dtype=float)
        d = np.asarray(self.distance_nm, dtype=float)
        if np.any(np.diff(r) <= 0) or np.any(np.diff(d) <= 0):
            raise RangeError("map axes must be strictly increasing")
        object.__setattr__(self, "radius_nm", r)
        object.__setattr__(self, "distance_nm", d)

    @property
    def orientations(self):
        return tuple(sorted(self.tables))

    def content_hash(self) -> str:
        payload = {
            "radius": self.radius_nm.tolist(),
            "distance": self.distance_nm.tolist(),
            "tables": {k: np.asarray(v).tolist() for k, v in sorted(self.tables.items())},
        }
        return content_key(payload)

    def to_csv(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["radius_nm", "distance_nm", "gamma_z", "gamma_phi", "gamma_r"])
            for i, r in enumerate(self.radius_nm):
                for j, d in enumerate(self.distance_nm):
                    row = [f"{r:.6g}", f"{d:.6g}"]
                    for o in ORIENTATIONS:
                        if o in self.tables:
                            row.append(f"{self.tables[o][i, j]:.9g}")
                        else:
                            row.append("")
                    w.writerow(row)
        sidecar = path.with_suffix(path.suffix + ".provenance.json")
        sidecar.write_text(json.dumps(
            {"provenance": self.provenance, "content_hash": self.content_hash()},
            indent=2, sort_keys=True))

    @classmethod
    def from_csv(cls, path: str | Path) -> "DecayMap":
        path = Path(path)
        radii, dists = [], []
        rows = []
        with path.open() as fh:
            reader = csv.DictReader(fh)
            for rec in reader:
                r = float(rec["radius_nm"])
                d = float(rec["distance_nm"])
                if r not in radii:
                    radii.append(r)
                if d not in dists:
                    dists.append(d)
                rows.append(rec)
        radii = sorted(radii)
        dists = sorted(dists)
        tables = {}
        for o in ORIENTATIONS:
            col = f"gamma_{o}"
            if any(rec.get(col) not in (None, "") for rec in rows):
                tables[o] = np.full((len(radii), len(dists)), np.nan)
        for rec in rows:
            i = radii.index(float(rec["radius_nm"]))
            j = dists.index(float(rec["distance_nm"]))
            for o in list(tables):
                val = rec.get(f"gamma_{o}")
                if val not in (None, ""):
                    tables[o][i, j] = float(val)
        prov = {}
        sidecar = path.with_suffix(path.suffix + ".provenance.json")
        if sidecar.exists():
            prov = json.loads(sidecar.read_text()).get("provenance", {})
        return cls(np.array(radii), np.array(dists), tables, prov)


def _column_cells(base: SimulationConfig, radius: float, distances,
                  orientation: str, cache, results, failures, i_row, threads):
    """Run one (radius, orientation) column on a shared grid."""
    fiber = replace(base.fiber, radius_nm=float(radius))
    d_far = float(max(distances))
    pad_pml = base.pad_lateral_nm + base.pml_cells * base.grid_nm
    override = {"x_min_nm": -(radius + pad_pml),
                "x_max_nm": radius + d_far + pad_pml}

    def cell_config(d):
        return base.with_(fiber=fiber, distance_nm=float(d),
                          orientation=orientation)

    far_layout = build_layout(cell_config(d_far), domain_override=override)
    vac = raw_power_run(far_layout, vacuum=True, cache=cache)
    if _defect(vac) > _FLUX_DEFECT_LIMIT:
        for j in range(len(distances)):
            failures.append({"radius": radius, "orientation": orientation,
                             "distance": float(distances[j]),
                             "reason": f"vacuum flux defect {_defect(vac):.3%}"})
        return

    def one(j_d):
        j, d = j_d
        layout = build_layout(cell_config(d), domain_override=override)
        run = raw_power_run(layout, vacuum=False, cache=cache)
        return j, run

    jobs = list(enumerate(distances))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outs = list(pool.map(one, jobs))
    else:
        outs = [one(job) for job in jobs]

    for j, run in sorted(outs):
        defect = max(_defect(run), _defect(vac))
        if defect > _FLUX_DEFECT_LIMIT or not math.isfinite(run["p_inner"]):
            failures.append({"radius": radius, "orientation": orientation,
                             "distance": float(distances[j]),
                             "reason": f"flux defect {defect:.3%}"})
            continue
        results[orientation][i_row, j] = run["p_inner"] / vac["p_inner"]


def sweep(radii, distances, orientations, base_config: SimulationConfig,
          cache: ResultCache | None = None, threads: int = 1,
          progress=None) -> DecayMap:
    """Populate a DecayMap cell by cell; failed cells become NaN entries and
    are listed in the provenance, the sweep itself continues."""
    radii = np.sort(np.asarray(list(radii), dtype=float))
    distances = np.sort(np.asarray(list(distances), dtype=float))
    orientations = tuple(o for o in ORIENTATIONS if o in set(orientations))
    if radii.size == 0 or distances.size == 0 or not orientations:
        raise RangeError("sweep axes must be non-empty")

    results = {o: np.full((radii.size, distances.size), np.nan)
               for o in orientations}
    failures: list = []
    t_start = time.time()
    for i, radius in enumerate(radii):
        for orientation in orientations:
            _column_cells(base_config, radius, distances, orientation,
                          cache, results, failures, i, threads)
            if progress is not None:
                progress(radius, orientation)

    provenance = {
        "version": KERNEL_VERSION,
        "grid_nm": base_config.grid_nm,
        "dtype": base_config.dtype,
        "wavelength_nm": base_config.wavelength_nm,
        "core_index": base_config.fiber.core_index,
        "pml_cells": base_config.pml_cells,
        "failures": failures,
        "wall_s": time.time() - t_start,
    }
    return DecayMap(radii, distances, {o: results[o] for o in orientations},
                    provenance)


def interpolate(decay_map: DecayMap, radius_nm: float, distance_nm: float,
                orientation: str, return_flag: bool = False):
    """Bilinear interpolation in (radius, distance).

    Below the smallest tabulated distance the value is a linear
    extrapolation from the two nearest points (flagged when
    return_flag=True); beyond the largest it clamps to the edge, where the
    ratio has already converged to one.  Radius must be inside the axis.
    """
    if orientation not in decay_map.tables:
        raise RangeError(f"orientation {orientation!r} not tabulated")
    r_ax, d_ax = decay_map.radius_nm, decay_map.distance_nm
    if not (r_ax[0] - 1e-9 <= radius_nm <= r_ax[-1] + 1e-9):
        raise RangeError(
            f"radius {radius_nm} outside [{r_ax[0]}, {r_ax[-1]}]")
    table = decay_map.tables[orientation]

    extrapolated = bool(distance_nm < d_ax[0])

    def along_distance(row):
        if distance_nm <= d_ax[0]:
            slope = (row[1] - row[0]) / (d_ax[1] - d_ax[0])
            return row[0] + slope * (distance_nm - d_ax[0])
        return float(np.interp(distance_nm, d_ax, row))

    if r_ax.size == 1:
        i, w = 0, 0.0
    else:
        i = int(np.clip(np.searchsorted(r_ax, radius_nm) - 1, 0, r_ax.size - 2))
        w = float(np.clip((radius_nm - r_ax[i]) / (r_ax[i + 1] - r_ax[i]), 0.0, 1.0))
    rows = table[i], table[min(i + 1, r_ax.size - 1)]
    if np.any(np.isnan(rows[0])) or np.any(np.isnan(rows[1])):
        raise AccuracyError("interpolation touches an invalid (failed) map cell")
    value = (1.0 - w) * along_distance(rows[0]) + w * along_distance(rows[1])
    if return_flag:
        return value, extrapolated
    return value
