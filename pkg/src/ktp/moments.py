"""Discrete velocity quadrature, macroscopic fields and entropy functionals.

All velocity integrals use the node-sum rule ``dv * sum_j g(v_j)`` over the
``Nv + 1`` nodes of :class:`PhaseGrid`.  A distribution field is stored as a
float array of shape ``(2, Nx, Nv + 1)`` (species, space, velocity).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .mixture import (
    DENSITY_FLOOR,
    ENDPOINT_BOUND_RTOL,
    EntropyValue,
    SpeciesParams,
    entropy_density_array,
    maxwellian_on_grid,
)

BOUNDARY_MODES = ("free-flow", "periodic")


class ShapeError(ValueError):
    """Array shapes are inconsistent with the phase grid."""


class DiagnosticError(ValueError):
    """A diagnostic cannot be evaluated on the given state."""


@dataclass(frozen=True)
class PhaseGrid:
    x_lo: float
    x_hi: float
    nx: int
    v_lo: float
    v_hi: float
    nv: int
    bc: str = "free-flow"

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise ValueError(f"x_lo < x_hi required, got [{self.x_lo}, {self.x_hi}]")
        if not self.v_lo < self.v_hi:
            raise ValueError(f"v_lo < v_hi required, got [{self.v_lo}, {self.v_hi}]")
        if self.nx < 1 or self.nv < 1:
            raise ValueError(f"nx and nv must be positive, got nx={self.nx}, nv={self.nv}")
        if self.bc not in BOUNDARY_MODES:
            raise ValueError(f"bc must be one of {BOUNDARY_MODES}, got {self.bc!r}")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.nx

    @property
    def dv(self) -> float:
        return (self.v_hi - self.v_lo) / self.nv

    @property
    def x(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def v(self) -> np.ndarray:
        return self.v_lo + np.arange(self.nv + 1) * self.dv

    @property
    def vmax(self) -> float:
        return float(np.max(np.abs(self.v)))

    @property
    def shape(self) -> tuple[int, int, int]:
        return (2, self.nx, self.nv + 1)

    def cfl_dt(self, cfl: float) -> float:
        """Time step with ``max_j |v_j| * dt / dx = cfl``."""
        return cfl * self.dx / self.vmax


@dataclass(frozen=True)
class MacroState:
    """Species and mixture moments on the spatial grid.

    ``n`` and ``q`` have shape ``(2, Nx)``; ``q_i = n_i u_i``.
    """

    n: np.ndarray
    q: np.ndarray
    u_species: np.ndarray
    rho: np.ndarray
    bulk_u: np.ndarray
    common_u: np.ndarray
    momentum: np.ndarray

    @property
    def n1(self):
        return self.n[0]

    @property
    def n2(self):
        return self.n[1]


def _safe_div(num, den, floor):
    den = np.asarray(den, dtype=float)
    ok = den > floor
    return np.where(ok, num / np.where(ok, den, 1.0), 0.0)


def common_velocity(mom1, mom2, rho1, rho2, nu1, nu2, floor: float = DENSITY_FLOOR):
    """Common relaxation velocity ``(nu1 rho1 u1 + nu2 rho2 u2) / (nu1 rho1 + nu2 rho2)``.

    ``mom_i`` is the mass flux ``rho_i u_i``.  Returns 0 where the weighted
    density falls below ``floor``.
    """
    num = nu1 * np.asarray(mom1, dtype=float) + nu2 * np.asarray(mom2, dtype=float)
    den = nu1 * np.asarray(rho1, dtype=float) + nu2 * np.asarray(rho2, dtype=float)
    return _safe_div(num, den, floor)


def _check_shape(f, grid: PhaseGrid):
    if np.shape(f) != grid.shape:
        raise ShapeError(f"distribution shape {np.shape(f)} does not match grid {grid.shape}")


def species_moments(f, grid: PhaseGrid):
    """Return ``(n, q)``: zeroth and first node-sum moments, each ``(2, Nx)``."""
    _check_shape(f, grid)
    n = grid.dv * np.sum(f, axis=-1)
    q = grid.dv * (f @ grid.v)
    return n, q


def macro_from_moments(n, q, species: tuple[SpeciesParams, SpeciesParams]) -> MacroState:
    n = np.asarray(n, dtype=float)
    q = np.asarray(q, dtype=float)
    m = np.array([species[0].m, species[1].m])[:, None]
    u_species = _safe_div(q, n, DENSITY_FLOOR)
    rho_i = m * n
    rho = rho_i.sum(axis=0)
    mom = (m * q).sum(axis=0)
    bulk = _safe_div(mom, rho, DENSITY_FLOOR)
    cu = common_velocity(
        rho_i[0] * u_species[0], rho_i[1] * u_species[1], rho_i[0], rho_i[1],
        species[0].nu, species[1].nu,
    )
    return MacroState(n=n, q=q, u_species=u_species, rho=rho, bulk_u=bulk, common_u=cu, momentum=mom)


def discrete_moments(f, grid: PhaseGrid, species: tuple[SpeciesParams, SpeciesParams]) -> MacroState:
    n, q = species_moments(f, grid)
    return macro_from_moments(n, q, species)


@dataclass
class MaxwellianReport:
    truncated_cells: int = 0
    vacuum_cells: int = 0


def _indicator_cell_average(n, u, v, dv, sp: SpeciesParams):
    """Endpoint Maxwellian averaged over the velocity cell around each node."""
    r = np.sqrt(sp.support_radius_sq(np.maximum(n, 0.0)))[..., None]
    lo = np.maximum(v - 0.5 * dv, u[..., None] - r)
    hi = np.minimum(v + 0.5 * dv, u[..., None] + r)
    return sp.c * np.clip(hi - lo, 0.0, None) / dv


def _two_node_deposit(n, u, v, dv):
    """Mass ``n`` at velocity ``u`` split linearly onto the two enclosing nodes."""
    out = np.zeros(np.shape(n) + v.shape)
    s = np.clip((u - v[0]) / dv, 0.0, len(v) - 1.0)
    j = np.minimum(np.floor(s).astype(int), len(v) - 2)
    w = s - j
    rows = np.arange(np.size(n))
    out[rows, j] = (1.0 - w) * n / dv
    out[rows, j + 1] = w * n / dv
    return out


def discrete_maxwellian(
    n,
    u,
    v,
    dv: float,
    species: SpeciesParams,
    renormalize: bool = True,
    match_momentum: bool = True,
    report: MaxwellianReport | None = None,
    max_iter: int = 30,
):
    """Truncated Maxwellian sampled on velocity nodes ``v`` for each cell.

    With ``renormalize`` the samples are scaled so that ``dv*sum(M) == n``
    exactly.  With ``match_momentum`` as well, the velocity parameter is
    corrected so that ``dv*sum(v*M) == n*u`` to round-off (fixed-point
    iteration, then a bracketed root solve for cells it leaves behind).  Under
    renormalisation the endpoint (indicator) Maxwellian is averaged over the
    velocity cell of each node, which keeps its discrete moments continuous in
    ``u``; a support narrower than one cell is deposited on the two enclosing
    nodes.
    """
    n = np.asarray(n, dtype=float)
    shape = n.shape
    u = np.broadcast_to(np.asarray(u, dtype=float), shape).ravel()
    n = n.ravel()
    v = np.asarray(v, dtype=float)
    vac = n <= DENSITY_FLOOR
    if report is not None:
        r = np.sqrt(species.support_radius_sq(np.maximum(n, 0.0)))
        out = (~vac) & ((u - r < v[0]) | (u + r > v[-1]))
        report.truncated_cells += int(np.count_nonzero(out))
        report.vacuum_cells += int(np.count_nonzero(vac & (n != 0.0)))

    def sample(upar, sel=slice(None)):
        nn, vv = n[sel], vac[sel]
        if renormalize and species.endpoint and species.n_dim == 1:
            M = _indicator_cell_average(nn, upar, v, dv, species)
        else:
            M = maxwellian_on_grid(nn, upar, v, species)
        M[vv] = 0.0
        if not renormalize:
            return M
        mass = dv * M.sum(axis=-1)
        M = M * _safe_div(nn, mass, 0.0)[:, None]
        lost = ~vv & ~(mass > 0.0)
        if np.any(lost):
            M[lost] = _two_node_deposit(nn[lost], upar[lost], v, dv)
        return M

    M = sample(u)
    if renormalize and match_momentum and np.any(~vac):
        M = _match_momentum(M, sample, n, u, v, dv, vac, max_iter)
    return M.reshape(shape + v.shape)


_MOMENTUM_TOL = 4e-16


def _match_momentum(M, sample, n, u, v, dv, vac, max_iter):
    live = ~vac
    tol = _MOMENTUM_TOL * np.maximum(1.0, np.abs(u))
    upar = u.copy()
    best_M, best_err = M, np.full(n.shape, np.inf)
    for _ in range(max_iter):
        err = np.where(live, u - _safe_div(dv * (M @ v), n, DENSITY_FLOOR), 0.0)
        improved = np.abs(err) < best_err
        best_err = np.where(improved, np.abs(err), best_err)
        best_M = np.where(improved[:, None], M, best_M)
        if np.all(best_err <= tol):
            return best_M
        upar = upar + err
        M = sample(upar)
    # the discrete drift is continuous in the velocity parameter but its slope
    # can be far from 1 near the support edge; finish stragglers by bracketing
    for j in np.flatnonzero(live & (best_err > tol)):
        sel = np.array([j])

        def resid(p):
            return dv * float(sample(np.array([p]), sel)[0] @ v) / n[j] - u[j]

        root = _bracketed_root(resid, u[j], dv)
        if root is not None and abs(resid(root)) < best_err[j]:
            best_M[j] = sample(np.array([root]), sel)[0]
    return best_M


def _bracketed_root(fun, x0: float, step: float):
    lo, hi = x0 - step, x0 + step
    for _ in range(60):
        flo, fhi = fun(lo), fun(hi)
        if flo * fhi <= 0:
            return optimize.brentq(fun, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
        step *= 2.0
        lo, hi = x0 - step, x0 + step
    return None


def total_entropy(f, grid: PhaseGrid, species: tuple[SpeciesParams, SpeciesParams]) -> EntropyValue:
    """``dx*dv*sum nu_i h_i(f_i)`` over the phase grid."""
    _check_shape(f, grid)
    if np.any(f < 0):
        raise DiagnosticError("total entropy requires a nonnegative distribution")
    total = 0.0
    infinite = False
    for i, sp in enumerate(species):
        h, inf = entropy_density_array(f[i], grid.v, sp)
        total += sp.nu * float(np.sum(h))
        infinite = infinite or bool(np.any(inf))
    return EntropyValue(grid.dx * grid.dv * total, infinite)


def cell_entropy_flags(f, grid: PhaseGrid, species) -> np.ndarray:
    """Per-cell flag: 1 where some species' entropy density is infinite."""
    flags = np.zeros(grid.nx, dtype=int)
    for i, sp in enumerate(species):
        if sp.endpoint:
            flags |= np.any(f[i] > sp.c * (1.0 + ENDPOINT_BOUND_RTOL), axis=-1).astype(int)
    return flags


def relative_internal_energy(a, b, sp: SpeciesParams):
    """Bregman divergence ``s(a|b) = s(a) - s(b) - s'(b)(a-b)`` of ``s``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ds = sp.gamma / (sp.gamma - 1.0) * sp.m ** sp.mass_exponent * np.power(b, sp.gamma - 1.0)
    return sp.internal_energy(a) - sp.internal_energy(b) - ds * (a - b)


def relative_entropy_density(ueps, uref, species, floor: float = DENSITY_FLOOR):
    """Cellwise ``(rho_eps/2)|u_eps - u|^2 + sum_i s_i(n_i_eps | n_i)``.

    ``ueps`` and ``uref`` are any objects with ``n1``, ``n2`` and ``w`` arrays.
    """
    m1, m2 = species[0].m, species[1].m
    n_ref = np.stack([np.asarray(uref.n1, float), np.asarray(uref.n2, float)])
    bad = np.argwhere(n_ref <= floor)
    if bad.size:
        i, cell = bad[0]
        raise DiagnosticError(
            f"reference density n{i + 1} = {n_ref[i, cell]:.3e} below floor at cell {cell}"
        )
    n_eps = np.stack([np.asarray(ueps.n1, float), np.asarray(ueps.n2, float)])
    rho_eps = m1 * n_eps[0] + m2 * n_eps[1]
    rho_ref = m1 * n_ref[0] + m2 * n_ref[1]
    u_eps = _safe_div(np.asarray(ueps.w, float), rho_eps, floor)
    u_ref = np.asarray(uref.w, float) / rho_ref
    dens = 0.5 * rho_eps * (u_eps - u_ref) ** 2
    for i, sp in enumerate(species):
        dens = dens + relative_internal_energy(n_eps[i], n_ref[i], sp)
    return dens


def relative_entropy(ueps, uref, species, dx: float) -> float:
    return float(dx * np.sum(relative_entropy_density(ueps, uref, species)))
