import random

import pytest
from hypothesis import given, strategies as st

from drinfeld_nh.carlitz import bracket
from drinfeld_nh.field import RatF, field
from drinfeld_nh.forms import generators, membership, membership_prec
from drinfeld_nh.operators import (RCCoeffs, UCoeffs, perturbed_rc_table, perturbed_u_table,
                                   rc_bracket, rc_bracket_nh_identity, u_operator,
                                   u_operator_nh_identity)
from drinfeld_nh.sampling import random_useries

QS = (2, 3, 4, 5)


def test_rc_coefficients():
    t = RCCoeffs.compute(1, 4, 6, 5)
    assert t.tilde == (4, 6) and t.gcd == 2 and t.reduced == (2, 3)
    t0 = RCCoeffs.compute(0, 4, 6, 5)
    assert t0.tilde == (1,) and t0.reduced == (1,)


def test_u_coefficients():
    t = UCoeffs.compute(2, 2, 3)
    # c̃_1 = (r−1)·C(k+r−1, r−1), c̃_2 = r·k·C(k+r−1, 0)
    assert t.tilde == (3, 4) and t.gcd == 1 and t.reduced == (0, 1)
    assert t.c(2) == 1
    with pytest.raises(ValueError):
        UCoeffs.compute(1, 2, 3)


@pytest.mark.parametrize("q", QS)
@given(seed=st.integers(0, 10 ** 6))
def test_bracket_degenerate_orders(q, seed):
    F = field(q)
    rng = random.Random(seed)
    f, g = random_useries(F, rng, prec=12), random_useries(F, rng, prec=12)
    k, w = rng.randint(1, 9), rng.randint(1, 9)
    assert rc_bracket(f, k, g, w, 0) == f * g
    assert rc_bracket(f, k, f, k, 1).is_zero()


@pytest.mark.parametrize("q", QS)
@pytest.mark.parametrize("r", (0, 1, 2))
def test_bracket_of_generators_is_modular(q, r):
    F = field(q)
    k, w = q - 1, q + 1
    W = k + w + 2 * r
    N = max(40, membership_prec(q, W) + 8)
    tab = generators(F, 2 * N)
    g, h = tab.g(), tab.h()
    P = membership(rc_bracket(g.truncate(N), k, h.truncate(N), w, r), W, 1 + r)
    assert P is not None
    assert P.expand(2 * N) == rc_bracket(g, k, h, w, r)
    assert rc_bracket_nh_identity(g.truncate(N), k, h.truncate(N), w, r)


@pytest.mark.parametrize("q", QS)
def test_bracket_negative_control(q):
    F = field(q)
    tab = generators(F, 40)
    g, h = tab.g(), tab.h()
    bad = perturbed_rc_table(RCCoeffs.compute(1, q - 1, q + 1, F.p), 0)
    assert not rc_bracket_nh_identity(g, q - 1, h, q + 1, 1, bad)


@pytest.mark.parametrize("q", QS)
def test_u_operator_on_h(q):
    F = field(q)
    h = generators(F, 80).h()
    lhs = u_operator(h, q + 1, q + 1)
    assert lhs == (h ** (q + 3)).scale(RatF(bracket(F, 1)).inv())
    assert u_operator_nh_identity(h.truncate(40), q + 1, q + 1)


@pytest.mark.parametrize("q", QS)
def test_u_operator_on_g_top_order(q):
    F = field(q)
    g = generators(F, 80).g()
    assert u_operator(g, q - 1, q + 1).is_zero()


@pytest.mark.parametrize("q", QS)
def test_u_operator_negative_control(q):
    F = field(q)
    D = generators(F, 40).delta()
    k = q * q - 1
    assert u_operator_nh_identity(D, k, 3)
    assert not u_operator_nh_identity(D, k, 3, perturbed_u_table(UCoeffs.compute(3, k, F.p), 1))
