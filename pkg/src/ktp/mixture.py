"""Species parameters, truncated Maxwellians and kinetic entropy densities.

Each species of the mixture carries a particle mass ``m``, an adiabatic
exponent ``gamma`` and a collision frequency ``nu``.  The equilibrium of a
species is the compactly supported ("truncated") Maxwellian

    M[n, u](v) = c * (m**a * K * n**(gamma-1) - m*|v-u|**2)_+ ** (d/2),

with ``a = n_dim*(gamma-1)/2`` and ``K = 2*gamma/(gamma-1)``.  At the endpoint
``gamma = (n_dim+2)/n_dim`` the exponent ``d`` vanishes and the Maxwellian is
the constant ``c`` on a closed ball.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Densities below this value are treated as vacuum.
DENSITY_FLOOR = 1e-13

_ENDPOINT_TOL = 1e-12

#: Relative round-off allowance on the endpoint bound ``f <= c``.
ENDPOINT_BOUND_RTOL = 1e-12


class ParameterDomainError(ValueError):
    """A physical parameter lies outside its admissible range."""


class _Infinite:
    """Sentinel for the +infinity branch of the endpoint kinetic entropy."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


@dataclass(frozen=True)
class EntropyValue:
    """Extended real: a finite value, or ``infinite=True``.

    The numeric ``value`` of an infinite entropy holds the finite part of the
    sum only and must not be interpreted.
    """

    value: float
    infinite: bool = False

    def __float__(self):
        return math.inf if self.infinite else float(self.value)

    def __add__(self, other: "EntropyValue") -> "EntropyValue":
        return EntropyValue(self.value + other.value, self.infinite or other.infinite)


def is_endpoint(gamma: float, n_dim: int) -> bool:
    return abs(gamma - (n_dim + 2) / n_dim) <= _ENDPOINT_TOL


def derive_constants(gamma: float, m: float = 1.0, n_dim: int = 1) -> tuple[float, float]:
    """Return the normalisation constant ``c`` and exponent ``d`` of a species.

    ``c`` does not depend on the particle mass; ``m`` is accepted (and
    validated) so callers can pass a full parameter set.
    """
    if n_dim not in (1, 2, 3):
        raise ParameterDomainError(f"n_dim must be 1, 2 or 3, got {n_dim}")
    if not m > 0:
        raise ParameterDomainError(f"particle mass m must be positive, got {m}")
    upper = (n_dim + 2) / n_dim
    if not (1.0 < gamma <= upper + _ENDPOINT_TOL):
        raise ParameterDomainError(
            f"gamma={gamma} outside the admissible interval (1, {upper:g}] for n_dim={n_dim}"
        )
    if is_endpoint(gamma, n_dim):
        d = 0.0
    else:
        d = 2.0 / (gamma - 1.0) - n_dim
    k = 2.0 * gamma / (gamma - 1.0)
    c = (
        k ** (-1.0 / (gamma - 1.0))
        * math.gamma(gamma / (gamma - 1.0))
        / (math.pi ** (n_dim / 2.0) * math.gamma(d / 2.0 + 1.0))
    )
    return c, d


@dataclass(frozen=True)
class SpeciesParams:
    m: float = 1.0
    gamma: float = 2.0
    nu: float = 1.0
    n_dim: int = 1
    c: float = field(init=False)
    d: float = field(init=False)

    def __post_init__(self):
        if not self.nu > 0:
            raise ParameterDomainError(f"collision frequency nu must be positive, got {self.nu}")
        c, d = derive_constants(self.gamma, self.m, self.n_dim)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @property
    def endpoint(self) -> bool:
        return self.d == 0.0

    @property
    def mass_exponent(self) -> float:
        """Exponent ``n_dim*(gamma-1)/2`` of ``m`` in the pressure law."""
        return self.n_dim * (self.gamma - 1.0) / 2.0

    def pressure(self, n):
        """Pressure ``p = m**a * n**gamma``."""
        return self.m ** self.mass_exponent * np.power(n, self.gamma)

    def internal_energy(self, n):
        """``s(n) = p(n) / (gamma - 1)``."""
        return self.pressure(n) / (self.gamma - 1.0)

    def support_radius_sq(self, n):
        """Squared radius of the Maxwellian support in ``|v - u|``."""
        k = 2.0 * self.gamma / (self.gamma - 1.0)
        return k * self.m ** (self.mass_exponent - 1.0) * np.power(n, self.gamma - 1.0)

    def with_nu(self, nu: float) -> "SpeciesParams":
        return SpeciesParams(self.m, self.gamma, nu, self.n_dim)


@dataclass(frozen=True)
class Equilibrium:
    n: float
    u: tuple | float
    species: SpeciesParams

    def __post_init__(self):
        if self.n < 0:
            raise ParameterDomainError(f"equilibrium density must be nonnegative, got {self.n}")


def _maxwellian(n, u, v, sp: SpeciesParams):
    """Vectorised truncated Maxwellian; ``n``, ``u`` and ``v`` broadcast.

    For ``n_dim > 1`` the last axis of ``u`` and ``v`` holds the components.
    """
    n = np.asarray(n, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if sp.n_dim == 1:
        dist_sq = (v - u) ** 2
    else:
        dist_sq = np.sum((v - u) ** 2, axis=-1)
    npos = np.maximum(n, 0.0)
    arg = sp.support_radius_sq(npos) - dist_sq
    inside = (arg >= 0.0) & (n > 0.0)
    if sp.endpoint:
        return np.where(inside, sp.c, 0.0)
    val = sp.c * np.power(sp.m * np.where(inside, arg, 0.0), sp.d / 2.0)
    return np.where(inside, val, 0.0)


def maxwellian_eval(eq: Equilibrium, v) -> float:
    """Value of ``M[eq.n, eq.u]`` at the velocity point ``v``."""
    return float(_maxwellian(eq.n, eq.u, v, eq.species))


def maxwellian_on_grid(n, u, v, species: SpeciesParams):
    """Sample ``M[n(x), u(x)]`` on velocity nodes; returns shape ``n.shape + v.shape``."""
    n = np.asarray(n, dtype=float)
    u = np.asarray(u, dtype=float)
    return _maxwellian(n[..., None], u[..., None], np.asarray(v, dtype=float), species)


def entropy_density_array(f, v, sp: SpeciesParams):
    """Return ``(h, infinite_mask)`` for arrays ``f`` (>= 0) broadcast against ``v``.

    Entries flagged in the mask carry only their finite (kinetic) part in ``h``.
    """
    f = np.asarray(f, dtype=float)
    v = np.asarray(v, dtype=float)
    kin = 0.5 * sp.m * (v * v if sp.n_dim == 1 else np.sum(v * v, axis=-1)) * f
    if sp.endpoint:
        return kin, f > sp.c * (1.0 + ENDPOINT_BOUND_RTOL)
    p = 1.0 + 2.0 / sp.d
    internal = np.power(f, p) / (2.0 * sp.c ** (2.0 / sp.d) * p)
    return kin + internal, np.zeros(np.shape(kin), dtype=bool)


def kinetic_entropy_density(f: float, v, species: SpeciesParams):
    """Kinetic entropy ``h(f, v)``; returns :data:`INFINITE` past the endpoint bound."""
    if f < 0:
        raise ParameterDomainError(f"kinetic entropy requires f >= 0, got {f}")
    h, inf = entropy_density_array(f, v, species)
    if bool(inf):
        return INFINITE
    return float(h)
