import random

import pytest
from hypothesis import given, strategies as st

from drinfeld_nh.field import binom_mod_p, field
from drinfeld_nh.forms import GradedForm, generators, membership_prec
from drinfeld_nh.nearly import (NHForm, NotNearlyHolomorphic, decompose, delta_leibniz_check, e2,
                                formal_equivariance_check, inverse_iota, iota, iota_series,
                                maass_shimura, qm_hyper, reconstruct, to_graded)
from drinfeld_nh.sampling import random_nh_layers
from drinfeld_nh.useries import USeries, hyper

QS = (2, 3, 4, 5)


def test_e2_shape():
    F = field(3)
    E2 = e2(F, 20)
    assert E2.weight == 2 and E2.type == 1 and E2.depth == 1
    assert E2.coeff(1) == USeries.const(F, F.neg_one, 20)
    assert E2.coeff(0) == generators(F, 20).E().truncate(20)


@pytest.mark.parametrize("q", QS)
def test_first_maass_shimura_on_modular_forms(q):
    F = field(q)
    tab = generators(F, 30)
    for f, k in ((tab.g(), q - 1), (tab.h(), q + 1)):
        got = maass_shimura(NHForm.from_series(f.truncate(30), k, 0), k, 1)
        assert got.coeff(0) == hyper(1, f.truncate(30))
        assert got.coeff(1) == f.truncate(30).scale_fq(F.from_int(k))
        assert got.weight == k + 2


@pytest.mark.parametrize("q", QS)
def test_delta_of_discriminant(q):
    F = field(q)
    k = q * q - 1
    N = membership_prec(q, k + 2) + 8
    D = NHForm.from_series(generators(F, N).delta().truncate(N), k, 0)
    dD = maass_shimura(D, k, 1)
    assert dD == e2(F, N) * D
    layers = decompose(dD)
    assert layers[0].is_zero()
    assert layers[1] == -GradedForm.gen(F, "h", q - 1)


@pytest.mark.parametrize("q", (2, 3, 4))
@given(seed=st.integers(0, 10 ** 6))
def test_iota_intertwines_delta_and_hyper(q, seed):
    F = field(q)
    rng = random.Random(seed)
    layers, k, m = random_nh_layers(F, rng, max_weight=2 * q + 4, max_depth=2)
    r = rng.randint(0, F.p + 1)
    N = max(30, membership_prec(q, k + 2 * r) + 8)
    Fm = reconstruct(layers, k, m, N)
    assert iota(maass_shimura(Fm, k, r)).expand(N) == hyper(r, iota(Fm).expand(N))
    assert iota_series(Fm) == iota(Fm).expand(N)


@pytest.mark.parametrize("q", (2, 3, 4, 5))
@given(seed=st.integers(0, 10 ** 6))
def test_decompose_reconstruct_round_trip(q, seed):
    F = field(q)
    rng = random.Random(seed)
    layers, k, m = random_nh_layers(F, rng, max_weight=3 * q, max_depth=3)
    N = max(30, membership_prec(q, k) + 8)
    Fm = reconstruct(layers, k, m, N)
    back = decompose(Fm)
    assert len(back) == len(layers)
    assert all((a - b).is_zero() for a, b in zip(back, layers))
    assert inverse_iota(iota(Fm), N) == Fm
    assert to_graded(Fm).coefficient_in("Y", 0).expand(N) == Fm.coeff(0)


def test_decompose_rejects_non_modular_layers():
    F = field(3)
    N = 30
    E = generators(F, N).E().truncate(N)
    with pytest.raises(NotNearlyHolomorphic):
        decompose(NHForm.from_series(E, 2, 1))


def test_depth_bound_enforced():
    F = field(3)
    one = USeries.one(F, 10)
    with pytest.raises(ValueError):
        NHForm(F, {0: one, 2: one}, 2, 0, modular=True)


@pytest.mark.parametrize("q", (2, 3))
def test_delta_leibniz(q):
    F = field(q)
    g = NHForm.from_series(generators(F, 30).g().truncate(30), q - 1, 0)
    assert delta_leibniz_check(g, q - 1, e2(F, 30), 2)


@pytest.mark.parametrize("q", (2, 3))
def test_qm_hyper_of_E(q):
    F = field(q)
    E = GradedForm.gen(F, "E")
    N = 30
    # ∂E = −E² in this normalization of ∂
    assert qm_hyper(E, 1, N).expand(N) == hyper(1, E.expand(N))
    assert qm_hyper(E, 1, N) == -(E * E)


@pytest.mark.parametrize("q", (2, 3))
@pytest.mark.parametrize("r", (0, 1, 2, 3))
def test_formal_equivariance_small(q, r):
    F = field(q)
    g, h, E = (GradedForm.gen(F, v) for v in ("g", "h", "E"))
    for f in (-(h ** (q - 1)), E, E * E, g * E):
        N = max(30, membership_prec(q, f.weight + 2 * r + 2 * f.degree("E")) + 8)
        assert formal_equivariance_check(f, f.weight, f.type, r, N)


def test_formal_equivariance_needs_matching_weight():
    F = field(3)
    D = -(GradedForm.gen(F, "h") ** 2)
    N = membership_prec(3, D.weight + 4) + 8
    assert not formal_equivariance_check(D, D.weight + 1, D.type, 1, N)


def test_formal_equivariance_negative_control():
    F = field(3)
    D = -(GradedForm.gen(F, "h") ** 2)

    def wrong(n, i, p):
        return (binom_mod_p(n, i, p) + (i == 1)) % p

    N = membership_prec(3, D.weight + 2) + 8
    assert not formal_equivariance_check(D, D.weight, D.type, 1, N, binom_fn=wrong)


def test_nh_json_round_trip():
    F = field(4)
    Fm = e2(F, 12)
    assert NHForm.from_json(F, Fm.to_json()) == Fm


def test_formal_equivariance_cache_is_transparent():
    F = field(3)
    g, E = GradedForm.gen(F, "g"), GradedForm.gen(F, "E")
    f = g * E * E
    N = membership_prec(3, f.weight + 10 + 4) + 8
    cache: dict = {}
    for r in range(6):
        assert formal_equivariance_check(f, f.weight, f.type, r, N, cache=cache) == \
            formal_equivariance_check(f, f.weight, f.type, r, N)
    assert not formal_equivariance_check(f, f.weight + 1, f.type, 1, N, cache=cache)
