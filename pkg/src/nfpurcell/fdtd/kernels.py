"""Fused UPML field-update kernels (single-threaded, GIL-released).

Update scheme per component (D/B auxiliary formulation): with cyclic axis
roles (u, v, w) for the w-component,

    D_new = a1_u D + a2_u curl
    F_new = b1_v F + b2_v (c1_w D_new - c2_w D) / eps      (E; mu=1 for H)

Interior coefficients reduce this to the vanilla Yee update.  The kernels
write each cell exactly once from read-only inputs of the previous phase, so
results do not depend on any partitioning of the iteration space.
"""

import numba
import numpy as np

_JIT = dict(cache=True, fastmath=True, nogil=True)


@numba.njit(**_JIT)
def update_e(ex, ey, ez, dx_, dy_, dz_, hx, hy, hz,
             a1x, a2x, a1y, a2y, a1z, a2z,
             b1x, b2x, b1y, b2y, b1z, b2z,
             c1xh, c2xh, c1yh, c2yh, c1zh, c2zh,
             iex, iey, iez, inv_d):
    nx, ny, nz = ex.shape
    for i in range(nx):
        for j in range(1, ny):
            for k in range(1, nz):
                curl = (hz[i, j, k] - hz[i, j - 1, k]
                        - hy[i, j, k] + hy[i, j, k - 1]) * inv_d
                dn = a1y[j] * dx_[i, j, k] + a2y[j] * curl
                ex[i, j, k] = (b1z[k] * ex[i, j, k]
                               + b2z[k] * (c1xh[i] * dn - c2xh[i] * dx_[i, j, k])
                               * iex[i, j])
                dx_[i, j, k] = dn
    for i in range(1, nx):
        for j in range(ny):
            for k in range(1, nz):
                curl = (hx[i, j, k] - hx[i, j, k - 1]
                        - hz[i, j, k] + hz[i - 1, j, k]) * inv_d
                dn = a1z[k] * dy_[i, j, k] + a2z[k] * curl
                ey[i, j, k] = (b1x[i] * ey[i, j, k]
                               + b2x[i] * (c1yh[j] * dn - c2yh[j] * dy_[i, j, k])
                               * iey[i, j])
                dy_[i, j, k] = dn
    for i in range(1, nx):
        for j in range(1, ny):
            for k in range(nz):
                curl = (hy[i, j, k] - hy[i - 1, j, k]
                        - hx[i, j, k] + hx[i, j - 1, k]) * inv_d
                dn = a1x[i] * dz_[i, j, k] + a2x[i] * curl
                ez[i, j, k] = (b1y[j] * ez[i, j, k]
                               + b2y[j] * (c1zh[k] * dn - c2zh[k] * dz_[i, j, k])
                               * iez[i, j])
                dz_[i, j, k] = dn


@numba.njit(**_JIT)
def update_h(hx, hy, hz, bx, by, bz, ex, ey, ez,
             a1xh, a2xh, a1yh, a2yh, a1zh, a2zh,
             b1xh, b2xh, b1yh, b2yh, b1zh, b2zh,
             c1x, c2x, c1y, c2y, c1z, c2z, inv_d):
    nx, ny, nz = hx.shape
    for i in range(nx):
        for j in range(ny - 1):
            for k in range(nz - 1):
                curl = (ez[i, j + 1, k] - ez[i, j, k]
                        - ey[i, j, k + 1] + ey[i, j, k]) * inv_d
                bn = a1yh[j] * bx[i, j, k] - a2yh[j] * curl
                hx[i, j, k] = (b1zh[k] * hx[i, j, k]
                               + b2zh[k] * (c1x[i] * bn - c2x[i] * bx[i, j, k]))
                bx[i, j, k] = bn
    for i in range(nx - 1):
        for j in range(ny):
            for k in range(nz - 1):
                curl = (ex[i, j, k + 1] - ex[i, j, k]
                        - ez[i + 1, j, k] + ez[i, j, k]) * inv_d
                bn = a1zh[k] * by[i, j, k] - a2zh[k] * curl
                hy[i, j, k] = (b1xh[i] * hy[i, j, k]
                               + b2xh[i] * (c1y[j] * bn - c2y[j] * by[i, j, k]))
                by[i, j, k] = bn
    for i in range(nx - 1):
        for j in range(ny - 1):
            for k in range(nz):
                curl = (ey[i + 1, j, k] - ey[i, j, k]
                        - ex[i, j + 1, k] + ex[i, j, k]) * inv_d
                bn = a1xh[i] * bz[i, j, k] - a2xh[i] * curl
                hz[i, j, k] = (b1yh[j] * hz[i, j, k]
                               + b2yh[j] * (c1z[k] * bn - c2z[k] * bz[i, j, k]))
                bz[i, j, k] = bn
