"""Upwind WENO discretisation of the free-streaming term ``-v df/dx``."""
from __future__ import annotations

import numpy as np

from .moments import PhaseGrid
from .weno import flux_divergence, interface_values


def velocity_split(v):
    """Index slices of the strictly negative and strictly positive nodes of a sorted ``v``."""
    v = np.asarray(v)
    lo = int(np.searchsorted(v, 0.0, side="left"))
    hi = int(np.searchsorted(v, 0.0, side="right"))
    return slice(0, lo), slice(hi, len(v))


def transport_rhs(f, grid: PhaseGrid):
    """Conservative upwind approximation of ``-v df/dx``.

    ``f`` may be ``(Nx, Nv+1)`` or carry leading axes, e.g. ``(2, Nx, Nv+1)``;
    space is always the second-to-last axis.
    """
    f = np.asarray(f, dtype=float)
    v = grid.v
    out = np.zeros_like(f)
    neg, pos = velocity_split(v)
    axis = f.ndim - 2
    for sl, rightward in ((pos, True), (neg, False)):
        vs = v[sl]
        if vs.size == 0:
            continue
        faces = interface_values(f[..., sl], grid.bc, rightward, axis=axis) * vs
        out[..., sl] = flux_divergence(faces, grid.dx, axis=axis)
    return out
