import pytest

from drinfeld_nh.carlitz import (CycloElem, bracket, carlitz_action, carlitz_d, exp_coeffs,
                                 reversed_carlitz, zeta_norm)
from drinfeld_nh.field import Poly, RatF, field, monic_polys


def compose_action(F, phi_a, x_coeffs):
    """Evaluate the F_q-linear polynomial phi_a on a linear polynomial given by coefficients."""
    q = F.q
    out = [Poly.zero(F)] * (len(phi_a.coeffs) + len(x_coeffs))
    for i, c in enumerate(phi_a.coeffs):
        for j, d in enumerate(x_coeffs):
            out[i + j] = out[i + j] + c * d.frob_theta(i)
    return out


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_carlitz_theta(q):
    F = field(q)
    t = Poly.theta(F)
    phi = carlitz_action(t)
    assert phi.coeffs == (t, Poly.const(F, 1))


@pytest.mark.parametrize("q", (2, 3))
def test_carlitz_action_is_multiplicative(q):
    F = field(q)
    t = Poly.theta(F)
    for a in monic_polys(F, 1) + monic_polys(F, 2)[:4]:
        # C_{θa} = C_θ ∘ C_a
        lhs = carlitz_action(t * a).coeffs
        rhs = compose_action(F, carlitz_action(t), list(carlitz_action(a).coeffs))
        rhs = rhs[: len(lhs)]
        assert list(lhs) == rhs
        assert carlitz_action(a).coeffs[0] == a
        assert carlitz_action(a).coeffs[-1] == Poly.const(F, a.lead())


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_factorials_and_brackets(q):
    F = field(q)
    t = Poly.theta(F)
    assert carlitz_d(F, 0) == Poly.const(F, 1)
    assert carlitz_d(F, 1) == t ** q - t
    assert bracket(F, 2) == t ** (q * q) - t
    assert carlitz_d(F, 2) == bracket(F, 2) * bracket(F, 1).frob_theta(1)


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_zeta_norm(q):
    F = field(q)
    t = Poly.theta(F)
    assert zeta_norm(F, q - 1) == RatF(Poly.const(F, 1), t - t ** q)


@pytest.mark.parametrize("q", (2, 3))
def test_exp_coefficients_are_inverse_factorials(q):
    F = field(q)
    ec = exp_coeffs(F, q ** 3)
    for i in range(3):
        assert ec[q ** i] == RatF(Poly.const(F, 1), carlitz_d(F, i))


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_reversed_carlitz_degree(q):
    F = field(q)
    for a in monic_polys(F, 2)[:5]:
        rc = reversed_carlitz(a)
        dense = rc.dense()
        assert dense[0] == Poly.const(F, 1)
        assert rc.degree == len(dense) - 1
        assert rc.degree <= a.norm() - 1


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_lambda_relation(q):
    F = field(q)
    lam = CycloElem.lam(F)
    t = Poly.theta(F)
    assert lam ** (q - 1) == CycloElem.scalar(F, RatF(-t))
    if q > 2:
        assert lam * CycloElem.lam(F, q - 2) == CycloElem.scalar(F, RatF(-t))
    assert lam * lam.inv() == CycloElem.scalar(F, RatF.one(F))
