"""Oracle suite behind ``ktp verify``: closed forms against independent quadrature."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mixture import SpeciesParams, entropy_density_array, maxwellian_on_grid
from .oracles import (
    BALL_KINDS,
    BallIntegralKind,
    ManufacturedFields,
    ball_integral,
    ball_integral_quadrature,
    ce_compatibility_residual,
    maxwellian_identities,
    weighted_maxwellian_moments,
    weighted_moment_quadrature,
)

NV_LADDER = (500, 1000, 2000, 4000)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def ball_checks(rtol: float = 1e-10):
    out = []
    for n in (1, 2, 3):
        for alpha in (0.0, 0.5, 1.0, 2.0):
            for sel in BALL_KINDS:
                if sel == "va2_vb2" and n == 1:
                    continue
                kind = BallIntegralKind(sel, alpha, n)
                exact = np.asarray(ball_integral(kind))
                quad = np.asarray(ball_integral_quadrature(kind))
                err = float(np.max(np.abs(exact - quad)) / np.max(np.abs(exact)))
                out.append(Check(f"ball {sel} n={n} alpha={alpha:g}", bool(err <= rtol), f"rel err {err:.2e}"))
    return out


def sampled_identity_errors(n: float, u: float, species: SpeciesParams, ladder=NV_LADDER):
    """Worst relative error of the four identities for node-sum sampling at each ``Nv``.

    The velocity window is ``[u - 2r, u + 2r]`` so that the support edges sit on
    nodes for every ``Nv`` divisible by 4 and the error decays without
    oscillating.
    """
    exact = maxwellian_identities(n, u, species)
    r = math.sqrt(species.support_radius_sq(n))
    errs = []
    for nv in ladder:
        v = np.linspace(u - 2 * r, u + 2 * r, nv + 1)
        dv = v[1] - v[0]
        M = maxwellian_on_grid(np.array([n]), np.array([u]), v, species)[0]
        h, _ = entropy_density_array(M, v, species)
        got = (dv * M.sum(), dv * (v @ M), dv * (v * v) @ M, dv * h.sum())
        errs.append(max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(got, exact)))
    return errs


def identity_checks():
    out = []
    for gamma in (2.0, 7.0 / 5.0, 3.0):
        sp = SpeciesParams(m=1.0, gamma=gamma)
        for n, u in ((1.0, 0.3), (2.0, 0.5)):
            errs = sampled_identity_errors(n, u, sp)
            ok = all(b < a for a, b in zip(errs, errs[1:]))
            out.append(Check(
                f"identities gamma={gamma:g} n={n:g} u={u:g}", ok, " > ".join(f"{e:.2e}" for e in errs)
            ))
    return out


def weighted_checks(rtol: float = 1e-6):
    out = []
    for gamma in (7.0 / 5.0, 3.0 / 2.0, 2.0):
        sp = SpeciesParams(gamma=gamma)
        for n in (0.5, 1.0, 2.0):
            z, s, f4 = weighted_maxwellian_moments(n, sp, [[1.0]])
            pairs = ((z, 0), (s[0, 0], 2), (f4[0, 0], 4))
            err = max(abs(a - weighted_moment_quadrature(n, sp, p)) / abs(a) for a, p in pairs)
            out.append(Check(f"weighted moments gamma={gamma:g} n={n:g}", bool(err <= rtol), f"rel err {err:.2e}"))
    return out


def ce_checks(tol: float = 1e-12):
    fields = ManufacturedFields(
        n1=lambda x: 1.0 + 0.1 * np.sin(x), dn1=lambda x: 0.1 * np.cos(x),
        n2=lambda x: np.ones_like(x), dn2=lambda x: np.zeros_like(x),
        u=lambda x: np.zeros_like(x), du=lambda x: np.zeros_like(x),
    )
    x = np.linspace(0.0, 2.0 * math.pi, 17)
    out = []
    for g1, g2 in ((2.0, 7.0 / 5.0), (1.5, 5.0 / 3.0 - 1e-3)):
        sp = (SpeciesParams(gamma=g1), SpeciesParams(gamma=g2))
        mass, mom = ce_compatibility_residual(fields, sp, x)
        err = max(float(np.max(np.abs(mass))), float(np.max(np.abs(mom))))
        out.append(Check(f"first-order compatibility gamma=({g1:g},{g2:g})", bool(err <= tol), f"max residual {err:.2e}"))
    return out


def constant_checks():
    c2, d2 = SpeciesParams(gamma=2.0).c, SpeciesParams(gamma=2.0).d
    c3, d3 = SpeciesParams(gamma=3.0).c, SpeciesParams(gamma=3.0).d
    return [
        Check("c(gamma=2) = 1/(2 pi)", abs(c2 - 1 / (2 * math.pi)) < 1e-15 and d2 == 1.0, f"c={c2!r}"),
        Check("c(gamma=3) = 1/(2 sqrt 3)", abs(c3 - 1 / (2 * math.sqrt(3))) < 1e-15 and d3 == 0.0, f"c={c3!r}"),
    ]


def run_all():
    return constant_checks() + ball_checks() + identity_checks() + weighted_checks() + ce_checks()
