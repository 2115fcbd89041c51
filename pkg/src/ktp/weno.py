"""Two-candidate WENO reconstruction (third order on smooth data) with ghost padding."""
from __future__ import annotations

import numpy as np

WENO_EPS = 1e-6
LINEAR_WEIGHTS = (1.0 / 3.0, 2.0 / 3.0)
GHOSTS = 2


def weno23_interface(f_up, f_c, f_down, eps_w: float = WENO_EPS):
    """Reconstruct at the interface between ``f_c`` and ``f_down``.

    ``f_up`` is the upwind neighbour of ``f_c``.  For rightward flow pass
    ``(f[i-1], f[i], f[i+1])`` to get the value at ``i+1/2``; for leftward
    flow pass ``(f[i+2], f[i+1], f[i])``.  Works elementwise on arrays.
    """
    f_up = np.asarray(f_up, dtype=float)
    f_c = np.asarray(f_c, dtype=float)
    f_down = np.asarray(f_down, dtype=float)
    p0 = -0.5 * f_up + 1.5 * f_c
    p1 = 0.5 * f_c + 0.5 * f_down
    a0 = LINEAR_WEIGHTS[0] / (eps_w + (f_c - f_up) ** 2) ** 2
    a1 = LINEAR_WEIGHTS[1] / (eps_w + (f_down - f_c) ** 2) ** 2
    return (a0 * p0 + a1 * p1) / (a0 + a1)


def pad_ghosts(a, bc: str, axis: int = 0):
    """Add two ghost cells per side along ``axis`` (copy-edge or periodic wrap)."""
    mode = "wrap" if bc == "periodic" else "edge"
    width = [(0, 0)] * np.ndim(a)
    width[axis] = (GHOSTS, GHOSTS)
    return np.pad(a, width, mode=mode)


def interface_values(a, bc: str, rightward: bool, axis: int = 0):
    """Upwind-biased reconstructions at the ``N+1`` cell interfaces along ``axis``.

    Entry ``k`` is the value at the left face of cell ``k`` (``k = N`` is the
    right face of the last cell).
    """
    g = np.moveaxis(pad_ghosts(a, bc, axis), axis, 0)
    n = g.shape[0] - 2 * GHOSTS
    # padded index of cell i is i + 2; interface k sits between padded k+1 and k+2
    if rightward:
        out = weno23_interface(g[0:n + 1], g[1:n + 2], g[2:n + 3])
    else:
        out = weno23_interface(g[3:n + 4], g[2:n + 3], g[1:n + 2])
    return np.moveaxis(out, 0, axis)


def flux_divergence(face_flux, dx: float, axis: int = 0):
    """``-(F[k+1] - F[k]) / dx`` from ``N+1`` face fluxes."""
    return -np.diff(face_flux, axis=axis) / dx
