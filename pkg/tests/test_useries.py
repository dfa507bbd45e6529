import random

import pytest
from hypothesis import given, strategies as st

from drinfeld_nh.field import Poly, RatF, binom_big, field
from drinfeld_nh.sampling import random_useries
from drinfeld_nh.useries import (PrecisionError, USeries, goss, hyper, hyper_first_oracle,
                                 subst_uaz, u_of_az)


def test_u_derivatives_small_q():
    F = field(3)
    u = USeries.u(F, 12)
    assert hyper(1, u) == -(u ** 2)
    assert hyper(2, u) == u ** 3


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_goss_polynomials_are_monomials(q):
    F = field(q)
    for k in range(1, q + 1):
        assert goss(F, k) == USeries.monomial(F, k, k + 1)


def test_u_of_theta_z():
    F = field(3)
    t = Poly.theta(F)
    got = subst_uaz(USeries.u(F, 12), t, 12)
    # u(θz) = u³/(1 + θu²)
    want = USeries.from_coeffs(F, [0, 0, 0, 1, 0, -t, 0, t ** 2, 0, -(t ** 3), 0, t ** 4], 12)
    assert got == want
    assert u_of_az(Poly.const(F, 1), 10) == USeries.u(F, 10)


@pytest.mark.parametrize("q", (2, 3, 4, 5))
@given(seed=st.integers(0, 10 ** 6))
def test_ring_axioms_and_inverse(q, seed):
    F = field(q)
    rng = random.Random(seed)
    f = random_useries(F, rng, prec=15, max_val=0)
    g = random_useries(F, rng, prec=15, max_val=2)
    assert (f + g) - g == f
    assert f * (g + f) == f * g + f * f
    if not f.coeff(0).is_zero():
        assert f * f.inverse() == USeries.one(F, 15)


@pytest.mark.parametrize("q", (2, 3, 4))
@given(seed=st.integers(0, 10 ** 6))
def test_frobenius_is_qth_power(q, seed):
    F = field(q)
    f = random_useries(F, random.Random(seed), prec=8, max_val=1)
    assert f.frob(1) == f ** q


@pytest.mark.parametrize("q", (2, 3, 4, 5))
@given(seed=st.integers(0, 10 ** 6))
def test_first_hyperderivative_matches_chain_rule(q, seed):
    F = field(q)
    f = random_useries(F, random.Random(seed), prec=20)
    assert hyper(1, f) == hyper_first_oracle(f)


@pytest.mark.parametrize("q", (2, 3, 5))
@given(seed=st.integers(0, 10 ** 6), m=st.integers(0, 6), n=st.integers(0, 6))
def test_hasse_composition(q, seed, m, n):
    F = field(q)
    f = random_useries(F, random.Random(seed), prec=18)
    c = binom_big(m + n, n) % F.p
    assert hyper(m, hyper(n, f)) == hyper(m + n, f).scale_fq(F.from_int(c))


@pytest.mark.parametrize("q", (2, 3, 4))
@given(seed=st.integers(0, 10 ** 6), n=st.integers(0, 6))
def test_leibniz_rule(q, seed, n):
    F = field(q)
    rng = random.Random(seed)
    f, g = random_useries(F, rng, prec=15), random_useries(F, rng, prec=15)
    rhs = USeries.zero(F, 15)
    for i in range(n + 1):
        rhs = rhs + hyper(i, f) * hyper(n - i, g)
    assert hyper(n, f * g) == rhs


def test_json_round_trip():
    F = field(4)
    f = random_useries(F, random.Random(3), prec=10, allow_den=True)
    assert USeries.from_json(F, f.to_json()) == f


def test_precision_is_tracked():
    F = field(3)
    a = USeries.u(F, 10)
    b = USeries.one(F, 5)
    assert (a + b).prec == 5
    assert (a * a).prec == 10
    assert a.coeff(1) == RatF.one(F)
    with pytest.raises(PrecisionError):
        b.coeff(7)
