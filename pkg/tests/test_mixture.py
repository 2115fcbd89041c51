import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktp.mixture import (
    INFINITE,
    Equilibrium,
    EntropyValue,
    ParameterDomainError,
    SpeciesParams,
    derive_constants,
    kinetic_entropy_density,
    maxwellian_eval,
    maxwellian_on_grid,
)
from scipy import integrate


def test_endpoint_has_zero_exponent():
    assert derive_constants(3.0, n_dim=1)[1] == 0.0
    assert derive_constants(2.0, n_dim=2)[1] == 0.0


def test_constants_gamma2():
    c, d = derive_constants(2.0, 1.0, 1)
    assert c == pytest.approx(1 / (2 * math.pi), rel=1e-15)
    assert d == 1.0


def test_constants_gamma3():
    c, d = derive_constants(3.0, 1.0, 1)
    assert c == pytest.approx(1 / (2 * math.sqrt(3)), rel=1e-15)
    assert d == 0.0


@pytest.mark.parametrize("gamma", [1.2, 1.4, 1.5, 5 / 3, 2.0, 2.5, 3.0])
@pytest.mark.parametrize("n", [0.3, 1.0, 2.5])
def test_maxwellian_mass_is_density(gamma, n):
    sp = SpeciesParams(gamma=gamma)
    r = math.sqrt(sp.support_radius_sq(n))
    val, _ = integrate.quad(lambda v: maxwellian_eval(Equilibrium(n, 0.4, sp), v), 0.4 - r, 0.4 + r, epsabs=0, epsrel=1e-12, limit=200)
    assert val == pytest.approx(n, rel=1e-9)


@pytest.mark.parametrize("gamma", [0.9, 1.0, 3.0001, -2.0])
def test_gamma_out_of_range(gamma):
    with pytest.raises(ParameterDomainError, match=r"\(1, 3\]"):
        derive_constants(gamma, 1.0, 1)


def test_bad_mass_dim_and_nu():
    with pytest.raises(ParameterDomainError):
        derive_constants(2.0, 0.0, 1)
    with pytest.raises(ParameterDomainError):
        derive_constants(1.5, 1.0, 4)
    with pytest.raises(ParameterDomainError):
        SpeciesParams(nu=0.0)


def test_maxwellian_examples():
    sp = SpeciesParams(gamma=2.0)
    assert maxwellian_eval(Equilibrium(0.0, 0.0, sp), 0.3) == 0.0
    assert maxwellian_eval(Equilibrium(1.0, 0.0, sp), 0.0) == pytest.approx(1 / math.pi, rel=1e-15)
    assert maxwellian_eval(Equilibrium(1.0, 0.0, sp), 2.0) == 0.0


def test_negative_equilibrium_density_rejected():
    with pytest.raises(ParameterDomainError):
        Equilibrium(-1.0, 0.0, SpeciesParams())


def test_endpoint_maxwellian_is_indicator_on_closed_ball():
    sp = SpeciesParams(gamma=3.0)
    r = math.sqrt(3.0)  # support radius at n = 1
    assert maxwellian_eval(Equilibrium(1.0, 0.0, sp), r) == sp.c
    assert maxwellian_eval(Equilibrium(1.0, 0.0, sp), 0.0) == sp.c
    assert maxwellian_eval(Equilibrium(1.0, 0.0, sp), r * (1 + 1e-12)) == 0.0


@settings(max_examples=60, deadline=None)
@given(
    gamma=st.sampled_from([1.4, 1.5, 2.0, 3.0]),
    n=st.floats(0.1, 3.0),
    u=st.floats(-1.0, 1.0),
    w=st.floats(-1.0, 1.0),
    v=st.floats(-4.0, 4.0),
)
def test_translation_equivariance(gamma, n, u, w, v):
    sp = SpeciesParams(gamma=gamma)
    a = maxwellian_eval(Equilibrium(n, u + w, sp), v + w)
    b = maxwellian_eval(Equilibrium(n, u, sp), v)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(
    gamma=st.sampled_from([1.4, 1.5, 5 / 3, 2.0, 2.5]),
    f=st.floats(0.0, 5.0),
    g=st.floats(0.0, 5.0),
    t=st.floats(0.0, 1.0),
    v=st.floats(-3.0, 3.0),
)
def test_entropy_density_convex_in_f(gamma, f, g, t, v):
    sp = SpeciesParams(gamma=gamma)
    h = lambda x: kinetic_entropy_density(x, v, sp)  # noqa: E731
    lhs = h(t * f + (1 - t) * g)
    rhs = t * h(f) + (1 - t) * h(g)
    assert lhs <= rhs + 1e-12 * (1 + abs(rhs))


def test_entropy_examples():
    sp2 = SpeciesParams(gamma=2.0)
    assert kinetic_entropy_density(0.0, 1.7, sp2) == 0.0
    assert kinetic_entropy_density(1.0, 2.0, sp2) == pytest.approx(2 + 2 * math.pi ** 2 / 3, rel=1e-14)
    sp3 = SpeciesParams(gamma=3.0)
    assert kinetic_entropy_density(sp3.c / 2, 1.0, sp3) == pytest.approx(sp3.c / 4, rel=1e-15)


def test_endpoint_entropy_infinite_above_bound():
    sp3 = SpeciesParams(gamma=3.0)
    assert kinetic_entropy_density(sp3.c * 1.01, 0.0, sp3) is INFINITE
    assert kinetic_entropy_density(sp3.c, 0.5, sp3) == pytest.approx(0.125 * sp3.c)
    assert pickle.loads(pickle.dumps(INFINITE)) is INFINITE


def test_negative_f_rejected():
    with pytest.raises(ParameterDomainError):
        kinetic_entropy_density(-1e-3, 0.0, SpeciesParams())


def test_entropy_value_arithmetic():
    a = EntropyValue(1.0)
    b = EntropyValue(2.0, infinite=True)
    assert float(a + EntropyValue(0.5)) == 1.5
    assert float(a + b) == math.inf


def test_maxwellian_on_grid_shape_and_nonnegative():
    sp = SpeciesParams(gamma=1.4)
    v = np.linspace(-3, 3, 61)
    M = maxwellian_on_grid(np.array([1.0, 0.5, 0.0]), np.array([0.0, 0.2, 0.0]), v, sp)
    assert M.shape == (3, 61)
    assert np.all(M >= 0)
    assert np.all(M[2] == 0)


def test_maxwellian_2d_mass():
    sp = SpeciesParams(gamma=1.5, n_dim=2)
    n = 0.8
    r = math.sqrt(sp.support_radius_sq(n))
    val, _ = integrate.quad(
        lambda s: 2 * math.pi * s * maxwellian_eval(Equilibrium(n, (0.0, 0.0), sp), (s, 0.0)), 0, r, epsrel=1e-11
    )
    assert val == pytest.approx(n, rel=1e-9)
