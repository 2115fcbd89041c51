"""IMEX Runge--Kutta integration of the scaled two-species BGK system.

Transport is explicit (upwind WENO), relaxation implicit.  Because the
relaxation preserves each species' density and the total momentum, every
implicit stage reduces to a closed-form 2x2 velocity solve followed by a
pointwise convex combination of the explicit predictor and the stage
Maxwellian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .diagnostics import StepDiagnostics
from .mixture import DENSITY_FLOOR, SpeciesParams
from .moments import (
    MacroState,
    MaxwellianReport,
    PhaseGrid,
    cell_entropy_flags,
    discrete_maxwellian,
    macro_from_moments,
    species_moments,
    total_entropy,
)
from .transport import transport_rhs


class NumericalError(RuntimeError):
    """Non-finite values or negative densities during a step."""


@dataclass(frozen=True)
class ImexTableau:
    name: str
    a_exp: tuple
    b_exp: tuple
    a_imp: tuple
    b_imp: tuple

    def __post_init__(self):
        s = len(self.b_exp)
        ae, ai = np.array(self.a_exp, float), np.array(self.a_imp, float)
        if ae.shape != (s, s) or ai.shape != (s, s) or len(self.b_imp) != s:
            raise ValueError("tableau arrays must all have matching stage count")
        if np.any(np.triu(ae) != 0):
            raise ValueError("explicit part must be strictly lower triangular")
        if np.any(np.triu(ai, 1) != 0):
            raise ValueError("implicit part must be lower triangular")

    @property
    def stages(self) -> int:
        return len(self.b_exp)

    @property
    def c_exp(self):
        return tuple(float(sum(r)) for r in self.a_exp)

    @property
    def c_imp(self):
        return tuple(float(sum(r)) for r in self.a_imp)

    @property
    def gsa(self) -> bool:
        return tuple(self.a_exp[-1]) == tuple(self.b_exp) and tuple(self.a_imp[-1]) == tuple(self.b_imp)

    @property
    def type_ck(self) -> bool:
        ai = np.array(self.a_imp, float)
        return ai[0, 0] == 0.0 and bool(np.all(np.diag(ai)[1:] != 0.0))

    @classmethod
    def ars232(cls) -> "ImexTableau":
        a = 1.0 - 1.0 / math.sqrt(2.0)
        d = 1.0 - 1.0 / (2.0 * a)
        return cls(
            name="ARS(2,3,2)",
            a_exp=((0.0, 0.0, 0.0), (a, 0.0, 0.0), (d, 1.0 - d, 0.0)),
            b_exp=(d, 1.0 - d, 0.0),
            a_imp=((0.0, 0.0, 0.0), (0.0, a, 0.0), (0.0, 1.0 - a, a)),
            b_imp=(0.0, 1.0 - a, a),
        )


ARS232 = ImexTableau.ars232()

INIT_KINDS = ("riemann", "sine")


@dataclass(frozen=True)
class InitialData:
    """Macroscopic initial state; distributions start at the matching Maxwellians.

    ``riemann``: densities ``left`` for ``x <= 0`` and ``right`` otherwise,
    velocity ``u`` everywhere.  ``sine``: ``n_i = base_i + amplitude_i*sin(k x')``
    and ``u + u_amplitude*sin(k x')`` with ``x' = 2 pi (x - x_lo)/L``.
    """

    kind: str = "riemann"
    left: tuple[float, float] = (1.0, 0.8)
    right: tuple[float, float] = (0.5, 0.25)
    u: float = 0.0
    base: tuple[float, float] = (1.0, 1.0)
    amplitude: tuple[float, float] = (0.0, 0.0)
    u_amplitude: float = 0.0
    wavenumber: int = 1

    def __post_init__(self):
        if self.kind not in INIT_KINDS:
            raise ValueError(f"init kind must be one of {INIT_KINDS}, got {self.kind!r}")

    def macro(self, grid: PhaseGrid):
        x = grid.x
        if self.kind == "riemann":
            left = x <= 0.0
            n = np.stack([np.where(left, self.left[i], self.right[i]) for i in range(2)])
            u = np.full(grid.nx, float(self.u))
        else:
            ph = np.sin(2.0 * math.pi * self.wavenumber * (x - grid.x_lo) / (grid.x_hi - grid.x_lo))
            n = np.stack([self.base[i] + self.amplitude[i] * ph for i in range(2)])
            u = self.u + self.u_amplitude * ph
        return n.astype(float), u.astype(float)


@dataclass(frozen=True)
class SimConfig:
    eps: float
    cfl: float
    t_end: float
    grid: PhaseGrid
    species: tuple[SpeciesParams, SpeciesParams]
    init: InitialData = field(default_factory=InitialData)
    renormalize_maxwellian: bool = True
    output_every: int = 0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.output_every < 0:
            raise ValueError(f"output_every must be >= 0, got {self.output_every}")
        if len(self.species) != 2:
            raise ValueError("exactly two species are required")

    def with_eps(self, eps: float) -> "SimConfig":
        return replace(self, eps=float(eps))

    @property
    def dt(self) -> float:
        return self.grid.cfl_dt(self.cfl)


def stage_velocity_solve(A1, A2, n1, n2, rho1, rho2, nu1, nu2, dt, eps, a_kk, floor=DENSITY_FLOOR):
    """Closed-form solution of the implicit stage velocity system.

    Returns ``(u1, u2, u_common, vacuum_mask)``.  A species below ``floor`` is
    dropped from the coupling and gets velocity 0.
    """
    A = np.stack(np.broadcast_arrays(*map(np.asarray, (A1, A2)))).astype(float)
    n = np.stack(np.broadcast_arrays(*map(np.asarray, (n1, n2)))).astype(float)
    rho = np.stack(np.broadcast_arrays(*map(np.asarray, (rho1, rho2)))).astype(float)
    nu = np.array([nu1, nu2], dtype=float).reshape((2,) + (1,) * (n.ndim - 1))
    live = n > floor
    ratio = np.divide(A, n, out=np.zeros_like(A), where=live)
    k = dt * a_kk * nu / eps
    g = np.where(live, nu * rho / (1.0 + k), 0.0)
    den = g.sum(axis=0)
    num = (g * ratio).sum(axis=0)
    u = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    u_i = np.where(live, (ratio + k * u) / (1.0 + k), 0.0)
    return u_i[0], u_i[1], u, ~(live[0] & live[1])


@dataclass
class StepReport:
    clamped_mass: float = 0.0
    truncation_warnings: int = 0
    vacuum_fallbacks: int = 0


def _restore_positivity(f, dv, v):
    """Clamp negatives, then rescale each touched cell by ``a + b*v`` to restore its moments.

    Returns ``(f_fixed, clamped_mass)``.  Falls back to mass-only scaling when
    the linear factor would turn negative on the support.
    """
    neg = f < 0.0
    if not np.any(neg):
        return f, 0.0
    clamped = float(dv * -np.sum(f[neg]))
    touched = np.any(neg, axis=-1)
    cells = f[touched]
    n0 = cells.sum(axis=-1)
    q0 = cells @ v
    g = np.maximum(cells, 0.0)
    s0, s1, s2 = g.sum(axis=-1), g @ v, g @ (v * v)
    det = s0 * s2 - s1 * s1
    ok = det > 1e-300
    a = np.where(ok, (n0 * s2 - q0 * s1) / np.where(ok, det, 1.0), 0.0)
    b = np.where(ok, (s0 * q0 - s1 * n0) / np.where(ok, det, 1.0), 0.0)
    factor = a[:, None] + b[:, None] * v
    bad = ~ok | np.any((factor < 0) & (g > 0), axis=-1)
    if np.any(bad):
        scale = np.divide(n0, s0, out=np.zeros_like(n0), where=s0 > 0)
        factor[bad] = np.maximum(scale[bad], 0.0)[:, None]
    out = f.copy()
    out[touched] = g * factor
    return out, clamped


def imex_step(f, dt: float, cfg: SimConfig, tab: ImexTableau = ARS232, report: StepReport | None = None):
    """Advance the distribution pair by one IMEX step of size ``dt``."""
    grid, species, eps = cfg.grid, cfg.species, cfg.eps
    v, dv = grid.v, grid.dv
    ae, ai = np.array(tab.a_exp), np.array(tab.a_imp)
    s = tab.stages
    nu = np.array([sp.nu for sp in species])[:, None, None]
    mass = np.array([sp.m for sp in species])[:, None]
    report = report if report is not None else StepReport()
    mrep = MaxwellianReport()

    n_m, _ = species_moments(f, grid)
    T = [None] * s
    nT = [None] * s
    R = [None] * s
    fk = f
    for k in range(s):
        fstar = f.copy()
        nk = n_m.copy()
        for l in range(k):
            if ae[k, l]:
                fstar += (dt * ae[k, l]) * T[l]
                nk += (dt * ae[k, l]) * nT[l]
            if ai[k, l]:
                fstar += (dt * ai[k, l]) * R[l]
        akk = ai[k, k]
        needs_relax = bool(np.any(ai[k + 1:, k] != 0)) or (not tab.gsa and tab.b_imp[k] != 0)
        if akk == 0.0:
            fk = fstar
            if needs_relax:
                R[k] = _explicit_relaxation(fk, grid, species, eps, cfg.renormalize_maxwellian, mrep, report)
        else:
            if np.any(nk < -DENSITY_FLOOR) or not np.all(np.isfinite(nk)):
                bad = np.argwhere(~(nk >= -DENSITY_FLOOR))[0]
                raise NumericalError(
                    f"stage {k + 1}: density of species {bad[0] + 1} is {nk[tuple(bad)]!r} at cell {bad[1]}"
                )
            Ak = dv * (fstar @ v)
            u1, u2, u, vac = stage_velocity_solve(
                Ak[0], Ak[1], nk[0], nk[1], mass[0] * nk[0], mass[1] * nk[1],
                species[0].nu, species[1].nu, dt, eps, akk,
            )
            report.vacuum_fallbacks += int(np.count_nonzero(vac & ((nk[0] > 0) | (nk[1] > 0))))
            M = np.stack([
                discrete_maxwellian(nk[i], u, v, dv, species[i], renormalize=cfg.renormalize_maxwellian, report=mrep)
                for i in range(2)
            ])
            w = (dt * akk / eps) * nu
            fk = (fstar + w * M) / (1.0 + w)
            R[k] = (fk - fstar) / (dt * akk)
        if bool(np.any(ae[k + 1:, k] != 0)) or (not tab.gsa and tab.b_exp[k] != 0):
            T[k] = transport_rhs(fk, grid)
            nT[k] = dv * T[k].sum(axis=-1)

    if tab.gsa:
        f_new = fk
    else:
        f_new = f.copy()
        for k in range(s):
            if tab.b_exp[k]:
                f_new += dt * tab.b_exp[k] * T[k]
            if tab.b_imp[k]:
                f_new += dt * tab.b_imp[k] * R[k]

    if not np.all(np.isfinite(f_new)):
        i, x, j = np.argwhere(~np.isfinite(f_new))[0]
        raise NumericalError(f"non-finite distribution for species {i + 1} at cell {x}, node {j}")
    f_new, clamped = _restore_positivity(f_new, dv, v)
    report.clamped_mass += clamped
    report.truncation_warnings += mrep.truncated_cells
    return f_new


def _explicit_relaxation(fk, grid, species, eps, renorm, mrep, report):
    n, q = species_moments(fk, grid)
    macro = macro_from_moments(n, q, species)
    M = np.stack([
        discrete_maxwellian(n[i], macro.common_u, grid.v, grid.dv, species[i], renormalize=renorm, report=mrep)
        for i in range(2)
    ])
    nu = np.array([sp.nu for sp in species])[:, None, None]
    return nu / eps * (M - fk)


def initial_distribution(cfg: SimConfig, report: MaxwellianReport | None = None):
    n, u = cfg.init.macro(cfg.grid)
    g = cfg.grid
    return np.stack([
        discrete_maxwellian(n[i], u, g.v, g.dv, cfg.species[i], renormalize=cfg.renormalize_maxwellian, report=report)
        for i in range(2)
    ])


def time_levels(t_end: float, dt: float) -> np.ndarray:
    """Uniform levels ``m*dt`` with the last one clipped to ``t_end``."""
    if t_end == 0:
        return np.array([0.0])
    steps = max(1, math.ceil(t_end / dt - 1e-9))
    t = np.arange(steps + 1) * dt
    t[-1] = t_end
    return t


def record(f, t, grid, species, report: StepReport | None = None) -> tuple[StepDiagnostics, MacroState]:
    n, q = species_moments(f, grid)
    macro = macro_from_moments(n, q, species)
    rep = report or StepReport()
    diag = StepDiagnostics(
        time=float(t),
        mass=(float(grid.dx * n[0].sum()), float(grid.dx * n[1].sum())),
        momentum=float(grid.dx * macro.momentum.sum()),
        entropy=total_entropy(f, grid, species),
        clamped_mass=rep.clamped_mass,
        truncation_warnings=rep.truncation_warnings,
        vacuum_fallbacks=rep.vacuum_fallbacks,
    )
    return diag, macro


@dataclass
class KineticResult:
    times: list
    diagnostics: list
    snapshots: list  # (t, MacroState, per-cell entropy flags)
    f_final: np.ndarray

    @property
    def final_macro(self) -> MacroState:
        return self.snapshots[-1][1]


def run_kinetic(cfg: SimConfig, tab: ImexTableau = ARS232, callback=None) -> KineticResult:
    """Integrate from the equilibrium initial data to ``cfg.t_end``.

    Diagnostics are recorded every step; macro snapshots at ``t = 0``, every
    ``cfg.output_every`` steps (if positive) and at ``t_end``.
    """
    grid, species = cfg.grid, cfg.species
    f = initial_distribution(cfg)
    levels = time_levels(cfg.t_end, cfg.dt)
    diag, macro = record(f, 0.0, grid, species)
    diags, snaps = [diag], [(0.0, macro, cell_entropy_flags(f, grid, species))]
    for m in range(1, len(levels)):
        rep = StepReport()
        f = imex_step(f, float(levels[m] - levels[m - 1]), cfg, tab, rep)
        diag, macro = record(f, levels[m], grid, species, rep)
        diags.append(diag)
        last = m == len(levels) - 1
        if last or (cfg.output_every and m % cfg.output_every == 0):
            snaps.append((float(levels[m]), macro, cell_entropy_flags(f, grid, species)))
        if callback is not None:
            callback(m, f, diag)
    return KineticResult(times=[float(t) for t in levels], diagnostics=diags, snapshots=snaps, f_final=f)
