"""Seeded random samples shared by the verification suites and the tests."""

from __future__ import annotations

import random

from .field import GF, Poly, RatF, embedding, field
from .forms import GradedForm, modular_basis
from .numerics import PsiSpec, PuiseuxNum, QuadExtElem
from .useries import USeries


def random_poly(F: GF, rng: random.Random, max_deg: int = 2) -> Poly:
    return Poly.from_codes(F, [rng.randrange(F.q) for _ in range(rng.randint(0, max_deg) + 1)])


def random_ratf(F: GF, rng: random.Random, max_deg: int = 2, allow_den: bool = False) -> RatF:
    num = random_poly(F, rng, max_deg)
    if allow_den and rng.random() < 0.3:
        den = Poly.theta(F) + Poly.const(F, rng.randrange(F.q))
        return RatF(num, den)
    return RatF(num, Poly.const(F, 1))


def random_useries(F: GF, rng: random.Random, prec: int = 20, max_val: int = 2,
                   allow_den: bool = False) -> USeries:
    val = rng.randint(0, max_val)
    coeffs = [random_ratf(F, rng, allow_den=allow_den) for _ in range(prec - val)]
    return USeries.from_coeffs(F, coeffs, prec, val)


def random_modular(F: GF, rng: random.Random, k: int, m: int) -> GradedForm:
    """Random A-combination of the g^a h^b basis of weight k and type m (possibly zero)."""
    out = GradedForm.zero(F, k, m)
    for a, b in modular_basis(F.q, k, m):
        c = random_ratf(F, rng, max_deg=1)
        if not c.is_zero():
            out = out + GradedForm.monomial(F, a, b, coeff=c)
    return out


def random_nh_layers(F: GF, rng: random.Random, max_weight: int, max_depth: int = 2):
    """(layers, weight, type): a random Σ g_j E₂^j with every g_j nonzero modular."""
    q = F.q
    while True:
        k = rng.randint(q - 1, max_weight)
        m = rng.randrange(max(q - 1, 1))
        r = rng.randint(0, min(max_depth, k // 2))
        layers = [random_modular(F, rng, k - 2 * j, m - j) for j in range(r + 1)]
        if not layers[-1].is_zero():
            return layers, k, m


def random_puiseux(K: GF, q: int, rng: random.Random, lo: int = -3, hi: int = 5,
                   base_only: bool = False, prec: int | None = None) -> PuiseuxNum:
    pool = list(embedding(field(q), K)) if base_only else list(range(K.q))
    return PuiseuxNum.from_terms(K, q, 1, {i: rng.choice(pool) for i in range(lo, hi)}, prec)


def random_quad(spec: PsiSpec, K: GF, rng: random.Random, **kw) -> QuadExtElem:
    return QuadExtElem(random_puiseux(K, spec.q, rng, **kw), random_puiseux(K, spec.q, rng, **kw), spec)

