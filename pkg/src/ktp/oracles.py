"""Closed-form moment identities of truncated Maxwellians, with independent quadratures.

The closed forms here are test oracles: solver code never imports this module,
and every closed form is paired with a quadrature route (``scipy.integrate``
with algebraic end-point weights, or Gauss--Jacobi rules) that shares no code
with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import roots_jacobi

from .mixture import SpeciesParams

BALL_KINDS = ("zeroth", "second_tensor", "second_times_va2", "va2_vb2", "va4")


class UnsupportedCaseError(ValueError):
    """The identity is not defined for the given species (e.g. ``d == 0``)."""


def sphere_area(n_dim: int) -> float:
    """Surface measure of the unit sphere in ``R^n`` (2 points for ``n = 1``)."""
    return 2.0 * math.pi ** (n_dim / 2.0) / math.gamma(n_dim / 2.0)


def _beta(p, q):
    return math.gamma(p) * math.gamma(q) / math.gamma(p + q)


@dataclass(frozen=True)
class BallIntegralKind:
    selector: str
    alpha: float
    n_dim: int

    def __post_init__(self):
        if self.selector not in BALL_KINDS:
            raise ValueError(f"selector must be one of {BALL_KINDS}, got {self.selector!r}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if self.n_dim not in (1, 2, 3):
            raise ValueError(f"n_dim must be 1, 2 or 3, got {self.n_dim}")


def ball_integral(kind: BallIntegralKind):
    """Beta-function closed form of ``int_{B_1} g(v) (1 - |v|^2)^alpha dv``.

    The ``second_tensor`` selector returns an ``n x n`` array, the others a
    float.  ``va2_vb2`` (a != b) is only meaningful for ``n_dim >= 2`` but the
    formula is returned regardless, so the fixed ratio to ``va4`` can be used.
    """
    n, a = kind.n_dim, kind.alpha
    area = sphere_area(n)
    if kind.selector == "zeroth":
        return 0.5 * area * _beta(n / 2.0, a + 1.0)
    if kind.selector == "second_tensor":
        return area / (2.0 * n) * _beta(n / 2.0 + 1.0, a + 1.0) * np.eye(n)
    b2 = _beta(n / 2.0 + 2.0, a + 1.0)
    if kind.selector == "second_times_va2":
        return area / (2.0 * n) * b2
    if kind.selector == "va2_vb2":
        return area / (2.0 * n * (n + 2)) * b2
    return 3.0 * area / (2.0 * n * (n + 2)) * b2


def _angular_integral(g: Callable[[np.ndarray], float], n_dim: int, nodes: int = 32) -> float:
    """Sphere integral of a low-degree polynomial ``g``.

    Periodic trapezoid in azimuth and Gauss--Legendre in ``cos(polar)``; both
    are exact for the degree-4 integrands used here.
    """
    if n_dim == 1:
        return g(np.array([1.0])) + g(np.array([-1.0]))
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    if n_dim == 2:
        return 2.0 * math.pi / nodes * sum(g(np.array([math.cos(t), math.sin(t)])) for t in theta)
    z, wz = np.polynomial.legendre.leggauss(nodes // 2)
    total = 0.0
    for zk, wk in zip(z, wz):
        s = math.sqrt(1.0 - zk * zk)
        ring = sum(g(np.array([s * math.cos(t), s * math.sin(t), zk])) for t in theta)
        total += wk * ring
    return 2.0 * math.pi / nodes * total


def _radial_integral(power: int, alpha: float, n_dim: int) -> float:
    """``int_0^1 r^(n-1+power) (1 - r^2)^alpha dr`` through ``s = r^2``."""
    expo = (n_dim + power - 2) / 2.0
    val, _ = integrate.quad(
        lambda s: 0.5, 0.0, 1.0, weight="alg", wvar=(expo, alpha), epsabs=0.0, epsrel=1e-13
    )
    return val


def ball_integral_quadrature(kind: BallIntegralKind):
    """Independent evaluation by angular quadrature times radial quadrature."""
    n, a = kind.n_dim, kind.alpha
    if kind.selector == "zeroth":
        return _angular_integral(lambda w: 1.0, n) * _radial_integral(0, a, n)
    if kind.selector == "second_tensor":
        rad = _radial_integral(2, a, n)
        out = np.empty((n, n))
        for p in range(n):
            for q in range(n):
                out[p, q] = _angular_integral(lambda w, p=p, q=q: w[p] * w[q], n) * rad
        return out
    rad = _radial_integral(4, a, n)
    if kind.selector == "second_times_va2":
        return _angular_integral(lambda w: float(w @ w) * w[0] ** 2, n) * rad
    if kind.selector == "va2_vb2":
        if n == 1:
            raise UnsupportedCaseError("va2_vb2 requires two distinct components (n_dim >= 2)")
        return _angular_integral(lambda w: w[0] ** 2 * w[1] ** 2, n) * rad
    return _angular_integral(lambda w: w[0] ** 4, n) * rad


def maxwellian_identities(n: float, u, species: SpeciesParams):
    """Mass, momentum, second-moment tensor and entropy of ``M[n, u]``.

    Returns ``(mass, momentum, tensor, entropy)``; for ``n_dim == 1`` the
    momentum and tensor are floats.
    """
    sp = species
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (sp.n_dim,):
        raise ValueError(f"u must have {sp.n_dim} components")
    p = sp.m ** (sp.mass_exponent - 1.0) * n ** sp.gamma if n > 0 else 0.0
    mom = n * u
    tensor = n * np.outer(u, u) + p * np.eye(sp.n_dim)
    entropy = 0.5 * sp.m * n * float(u @ u) + (
        sp.m ** sp.mass_exponent * n ** sp.gamma / (sp.gamma - 1.0) if n > 0 else 0.0
    )
    if sp.n_dim == 1:
        return float(n), float(mom[0]), float(tensor[0, 0]), float(entropy)
    return float(n), mom, tensor, float(entropy)


def _require_power_form(sp: SpeciesParams):
    if sp.d == 0.0:
        raise UnsupportedCaseError(
            f"gamma={sp.gamma} is the endpoint (d = 0); the weighted identities divide by d"
        )


def weighted_maxwellian_moments(n: float, species: SpeciesParams, gradient):
    """Moments of ``c^(2/d) M^((d-2)/d)[n, 0]`` weighted by ``1``, ``v v`` and ``G:(v v)(v v)``.

    ``gradient`` is the ``n x n`` table ``G[p, q] = d_p u_q``.  Returns
    ``(zeroth, second, fourth)``; the last two are ``n x n`` arrays.
    """
    sp = species
    _require_power_form(sp)
    if not n > 0:
        raise ValueError(f"density must be positive, got {n}")
    G = np.atleast_2d(np.asarray(gradient, dtype=float))
    if G.shape != (sp.n_dim, sp.n_dim):
        raise ValueError(f"gradient must be {sp.n_dim}x{sp.n_dim}")
    a, d, g, m = sp.mass_exponent, sp.d, sp.gamma, sp.m
    eye = np.eye(sp.n_dim)
    zeroth = n ** (2.0 - g) / (d * g * m ** a)
    second = n / (d * m) * eye
    # fourth-moment coefficient int v1^2 v2^2 = n^gamma / (d m^(2-a)), obtained by
    # integrating by parts once against the pressure identity
    coef = n ** g / (d * m ** (2.0 - a))
    fourth = coef * (np.trace(G) * eye + G + G.T)
    return zeroth, second, fourth


def weighted_moment_quadrature(n: float, species: SpeciesParams, power: int) -> float:
    """``c^(2/d) int v^power M^((d-2)/d)[n, 0] dv`` in one dimension.

    Uses QAWS with the algebraic end-point weight ``(r - v)^b (r + v)^b``,
    ``b = (d - 2)/2``, so the edge singularity for ``d < 2`` is integrated
    exactly by the rule.
    """
    sp = species
    _require_power_form(sp)
    if sp.n_dim != 1:
        raise UnsupportedCaseError("weighted_moment_quadrature is one-dimensional")
    beta = (sp.d - 2.0) / 2.0
    r = math.sqrt(sp.support_radius_sq(n))
    scale = sp.c * sp.m ** beta
    val, _ = integrate.quad(
        lambda v: v ** power, -r, r, weight="alg", wvar=(beta, beta),
        epsabs=0.0, epsrel=1e-13, limit=200,
    )
    return scale * val


@dataclass(frozen=True)
class ManufacturedFields:
    """Smooth 1D fields for the first-order correction check."""

    n1: Callable
    dn1: Callable
    n2: Callable
    dn2: Callable
    u: Callable
    du: Callable


def _gauss_jacobi_moments(sp: SpeciesParams, n, u, poly0, poly1, order: int = 16):
    """``int c^(2/d) M^((d-2)/d)[n, u] (poly0(v) + poly1(v)) dv`` per cell.

    ``poly*`` map velocity arrays to integrand polynomials; the rule is exact
    for polynomials of degree ``< 2*order``.
    """
    beta = (sp.d - 2.0) / 2.0
    s, w = roots_jacobi(order, beta, beta)
    r = np.sqrt(sp.support_radius_sq(n))
    v = u[:, None] + r[:, None] * s[None, :]
    jac = sp.c * sp.m ** beta * r ** (2.0 * beta + 1.0)
    vals = poly0(v) + poly1(v)
    return jac * np.sum(vals * w[None, :], axis=-1)


def ce_compatibility_residual(fields: ManufacturedFields, species, x):
    """Mass and momentum integrals of the first-order Chapman--Enskog correction.

    Time derivatives are replaced through the isentropic two-phase Euler
    system.  Returns ``(mass_residuals, momentum_residual)`` with shapes
    ``(2, len(x))`` and ``(len(x),)``; both vanish for exact quadrature.
    """
    for sp in species:
        _require_power_form(sp)
        if sp.n_dim != 1:
            raise UnsupportedCaseError("the compatibility check is one-dimensional")
    x = np.asarray(x, dtype=float)
    n = np.stack([fields.n1(x), fields.n2(x)])
    dn = np.stack([fields.dn1(x), fields.dn2(x)])
    u, du = fields.u(x), fields.du(x)
    m = np.array([sp.m for sp in species])[:, None]
    nu = np.array([sp.nu for sp in species])[:, None]
    rho = (m * n).sum(axis=0)
    dp = sum(
        sp.gamma * sp.m ** sp.mass_exponent * n[i] ** (sp.gamma - 1.0) * dn[i]
        for i, sp in enumerate(species)
    )
    dt_n = -(u * dn + n * du)
    dt_u = -u * du - dp / rho

    # first-order species velocities; E_i collects the species momentum balance
    E = np.stack([
        dt_n[i] * u + n[i] * dt_u + 2 * n[i] * u * du + dn[i] * u * u
        + sp.m ** (sp.mass_exponent - 1.0) * sp.gamma * n[i] ** (sp.gamma - 1.0) * dn[i]
        for i, sp in enumerate(species)
    ])
    wsum = (nu * m * n).sum(axis=0)
    u1 = np.stack([
        -wsum / (nu[i] * nu[1 - i] * rho * n[i]) * E[i] for i in range(2)
    ])
    S = (nu * m * n * u1).sum(axis=0) / wsum

    mass = np.empty_like(n)
    mom = np.zeros_like(u)
    for i, sp in enumerate(species):
        a, d, g = sp.mass_exponent, sp.d, sp.gamma

        def bracket(v, i=i, a=a, d=d, g=g):
            uu, S_, dtn, dni, dtu, dui = (
                u[:, None], S[:, None], dt_n[i][:, None], dn[i][:, None], dt_u[:, None], du[:, None]
            )
            term1 = d * sp.m * (v - uu) * S_
            term2 = sp.m ** a * d * g * n[i][:, None] ** (g - 2.0) * (dtn + v * dni)
            term3 = sp.m * d * (v - uu) * (dtu + v * dui)
            return term1 - (term2 + term3) / sp.nu

        mass[i] = _gauss_jacobi_moments(sp, n[i], u, bracket, lambda v: 0.0)
        mom = mom + sp.m * _gauss_jacobi_moments(sp, n[i], u, lambda v, b=bracket: v * b(v), lambda v: 0.0)
    return mass, mom
