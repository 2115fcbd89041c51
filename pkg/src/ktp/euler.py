"""Isentropic two-phase Euler system: global Lax--Friedrichs splitting with WENO23."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinetic import ARS232, time_levels
from .mixture import DENSITY_FLOOR
from .moments import PhaseGrid, discrete_maxwellian
from .transport import transport_rhs
from .weno import flux_divergence, interface_values


class EulerError(RuntimeError):
    pass


@dataclass(frozen=True)
class EulerState:
    n1: np.ndarray
    n2: np.ndarray
    w: np.ndarray
    masses: tuple[float, float] = (1.0, 1.0)

    @property
    def rho(self):
        return self.masses[0] * self.n1 + self.masses[1] * self.n2

    @property
    def velocity(self):
        rho = self.rho
        return np.divide(self.w, rho, out=np.zeros_like(np.asarray(self.w, float)), where=rho > DENSITY_FLOOR)

    def stack(self) -> np.ndarray:
        return np.stack([self.n1, self.n2, self.w])

    @classmethod
    def from_array(cls, U, masses):
        return cls(U[0].copy(), U[1].copy(), U[2].copy(), tuple(masses))

    def entropy(self, species) -> float:
        """Cell sum of ``w^2/(2 rho) + s_1 + s_2`` (multiply by ``dx`` for the integral)."""
        return float(np.sum(
            0.5 * self.w * self.velocity
            + species[0].internal_energy(self.n1) + species[1].internal_energy(self.n2)
        ))


def _masses(species):
    return (species[0].m, species[1].m)


def euler_flux(U, species):
    """Physical flux for a ``(3, ...)`` array of conservative variables."""
    n1, n2, w = U
    rho = species[0].m * n1 + species[1].m * n2
    live = rho > DENSITY_FLOOR
    u = np.divide(w, rho, out=np.zeros_like(w, dtype=float), where=live)
    p = species[0].pressure(np.maximum(n1, 0.0)) + species[1].pressure(np.maximum(n2, 0.0))
    return np.stack([n1 * u, n2 * u, w * u + p])


def max_wave_speed(U, species) -> float:
    n1, n2, w = (np.asarray(a, float) for a in U)
    rho = species[0].m * n1 + species[1].m * n2
    live = rho > DENSITY_FLOOR
    if not np.any(live):
        return 0.0
    n1, n2, w, rho = n1[live], n2[live], w[live], rho[live]
    gp = species[0].gamma * species[0].pressure(np.maximum(n1, 0)) + species[1].gamma * species[1].pressure(
        np.maximum(n2, 0)
    )
    return float(np.max(np.abs(w / rho) + np.sqrt(gp / rho)))


def euler_rhs(U, grid: PhaseGrid, species, flux: str = "lf", renormalize: bool = True):
    """``-dA(U)/dx`` on the spatial lattice of ``grid``.

    ``flux="lf"``: global Lax--Friedrichs splitting with WENO23 on each
    split component.  ``flux="kinetic"``: velocity moments of the upwind
    transport of the discrete Maxwellians ``M_i[n_i, w/rho]`` on the velocity
    grid of ``grid``; this is the macroscopic scheme the kinetic solver
    collapses to as ``eps -> 0``.
    """
    U = np.asarray(U, dtype=float)
    if flux == "kinetic":
        u = np.divide(U[2], species[0].m * U[0] + species[1].m * U[1],
                      out=np.zeros_like(U[2]), where=(species[0].m * U[0] + species[1].m * U[1]) > DENSITY_FLOOR)
        M = np.stack([
            discrete_maxwellian(U[i], u, grid.v, grid.dv, species[i], renormalize=renormalize) for i in range(2)
        ])
        T = transport_rhs(M, grid)
        dn = grid.dv * T.sum(axis=-1)
        dw = grid.dv * sum(species[i].m * (T[i] @ grid.v) for i in range(2))
        return np.stack([dn[0], dn[1], dw])
    if flux != "lf":
        raise ValueError(f"flux must be 'lf' or 'kinetic', got {flux!r}")
    lam = max_wave_speed(U, species)
    A = euler_flux(U, species)
    plus = 0.5 * (A + lam * U)
    minus = 0.5 * (A - lam * U)
    faces = interface_values(plus, grid.bc, True, axis=1) + interface_values(minus, grid.bc, False, axis=1)
    return flux_divergence(faces, grid.dx, axis=1)


def euler_step(U, dt: float, grid: PhaseGrid, species, tableau=None, flux: str = "lf"):
    """One explicit RK step with the explicit part of ``tableau``."""
    tab = tableau or ARS232
    ae, be = np.array(tab.a_exp), np.array(tab.b_exp)
    U = np.asarray(U, dtype=float)
    K = []
    for k in range(tab.stages):
        Uk = U.copy()
        for l in range(k):
            if ae[k, l]:
                Uk += dt * ae[k, l] * K[l]
        K.append(euler_rhs(Uk, grid, species, flux))
    out = U.copy()
    for k in range(tab.stages):
        if be[k]:
            out += dt * be[k] * K[k]
    bad = np.argwhere(~(out[:2] >= -DENSITY_FLOOR))
    if bad.size:
        i, cell = bad[0]
        raise EulerError(f"density n{i + 1} = {out[i, cell]!r} at cell {cell} after Euler step")
    return out


@dataclass
class EulerResult:
    times: list
    states: list  # EulerState at each output time
    entropy: list

    @property
    def final(self) -> EulerState:
        return self.states[-1]


def run_euler(cfg, dt: float | None = None, tableau=None, flux: str = "lf", output_every: int | None = None):
    """Integrate the limit system from ``cfg.init`` to ``cfg.t_end``.

    With ``dt`` given, steps follow the kinetic time levels (shared output
    times); otherwise ``dt = cfl*dx/lambda`` adapts each step.
    """
    grid, species = cfg.grid, cfg.species
    n, u = cfg.init.macro(grid)
    rho = species[0].m * n[0] + species[1].m * n[1]
    U = np.stack([n[0], n[1], rho * u])
    every = cfg.output_every if output_every is None else output_every
    masses = _masses(species)
    states = [EulerState.from_array(U, masses)]
    times = [0.0]
    ent = [grid.dx * states[0].entropy(species)]
    if dt is not None:
        levels = time_levels(cfg.t_end, dt)
        steps = [float(levels[m] - levels[m - 1]) for m in range(1, len(levels))]
    else:
        steps = None
    t, m = 0.0, 0
    while t < cfg.t_end:
        if steps is not None:
            h = steps[m]
        else:
            lam = max_wave_speed(U, species)
            h = cfg.cfl * grid.dx / lam if lam > 0 else cfg.t_end - t
            if t + h > cfg.t_end * (1 - 1e-12):
                h = cfg.t_end - t
        U = euler_step(U, h, grid, species, tableau, flux)
        m += 1
        t = cfg.t_end if (steps is not None and m == len(steps)) else t + h
        if not np.all(np.isfinite(U)):
            raise EulerError(f"non-finite Euler state at t={t}")
        ent.append(grid.dx * EulerState.from_array(U, masses).entropy(species))
        if t >= cfg.t_end or (every and m % every == 0):
            states.append(EulerState.from_array(U, masses))
            times.append(float(t))
    return EulerResult(times=times, states=states, entropy=ent)


def state_from_macro(n, w, species) -> EulerState:
    return EulerState(np.asarray(n[0], float), np.asarray(n[1], float), np.asarray(w, float), _masses(species))
