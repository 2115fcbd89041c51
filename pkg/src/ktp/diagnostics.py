"""Per-step conservation/entropy records and kinetic-versus-Euler comparison."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mixture import DENSITY_FLOOR, EntropyValue, SpeciesParams
from .moments import MacroState, PhaseGrid, relative_entropy


@dataclass(frozen=True)
class StepDiagnostics:
    time: float
    mass: tuple[float, float]
    momentum: float
    entropy: EntropyValue
    clamped_mass: float = 0.0
    truncation_warnings: int = 0
    vacuum_fallbacks: int = 0

    def __post_init__(self):
        if min(self.mass) < 0:
            raise ValueError(f"negative species mass in ledger: {self.mass}")


@dataclass(frozen=True)
class ComparisonReport:
    eps: float
    time: float
    l1_n1: float
    l1_n2: float
    l1_mom: float
    l1_momflux: float
    rel_entropy: float

    def row(self) -> tuple[float, ...]:
        return (self.eps, self.time, self.l1_n1, self.l1_n2, self.l1_mom, self.l1_momflux, self.rel_entropy)


COMPARE_HEADER = ("eps", "t", "l1_n1", "l1_n2", "l1_mom", "l1_momflux", "rel_entropy")


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class _Obs:
    n1: np.ndarray
    n2: np.ndarray
    w: np.ndarray


def _momentum_flux(w, rho):
    live = rho > DENSITY_FLOOR
    return np.where(live, w ** 2 / np.where(live, rho, 1.0), 0.0)


def compare_macro(
    macro: MacroState, ref, grid: PhaseGrid, species: tuple[SpeciesParams, SpeciesParams],
    eps: float = math.nan, time: float = math.nan,
) -> ComparisonReport:
    """L1 distances of ``n_i``, ``rho u`` and ``rho u^2`` plus the relative entropy."""
    if macro.n.shape[-1] != grid.nx or np.shape(ref.n1) != (grid.nx,):
        raise GridMismatchError(
            f"kinetic ({macro.n.shape[-1]}) and Euler ({np.shape(ref.n1)}) grids differ from nx={grid.nx}"
        )
    dx = grid.dx
    flux_ref = _momentum_flux(ref.w, ref.rho)
    flux_eps = _momentum_flux(macro.momentum, macro.rho)
    l1 = lambda a, b: float(dx * np.sum(np.abs(a - b)))  # noqa: E731
    rel = relative_entropy(_Obs(macro.n1, macro.n2, macro.momentum), ref, species, dx)
    return ComparisonReport(
        eps=eps,
        time=time,
        l1_n1=l1(macro.n1, ref.n1),
        l1_n2=l1(macro.n2, ref.n2),
        l1_mom=l1(macro.momentum, ref.w),
        l1_momflux=l1(flux_eps, flux_ref),
        rel_entropy=rel,
    )


def ap_sweep(cfg, eps_list, workers: int = 1, tableau=None, flux: str = "lf"):
    """Run the kinetic solver for each ``eps`` against one shared Euler reference.

    Returns ``(reports, kinetic_results, euler_result)``; reports follow the
    order of ``eps_list``.
    """
    from concurrent.futures import ThreadPoolExecutor

    from .euler import run_euler
    from .kinetic import ARS232, run_kinetic

    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ValueError("eps_list must be nonempty")
    if any(not e > 0 for e in eps_list):
        raise ValueError(f"eps values must be positive, got {eps_list}")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError(f"eps_list must be strictly decreasing, got {eps_list}")
    tab = tableau or ARS232
    ref = run_euler(cfg, dt=cfg.dt, tableau=tab, flux=flux)

    def one(e):
        return run_kinetic(cfg.with_eps(e), tab)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(one, eps_list))
    reports = [
        compare_macro(r.final_macro, ref.final, cfg.grid, cfg.species, eps=e, time=r.times[-1])
        for e, r in zip(eps_list, results)
    ]
    return reports, results, ref
