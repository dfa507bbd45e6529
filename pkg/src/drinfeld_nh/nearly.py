"""Nearly holomorphic forms as polynomials in Y with u-series coefficients.

Y stands for 1/(π̃z − π̃ψ(z)).  It carries no hyperderivative; the
Maass–Shimura operator sees it only through the Y-degree μ in its binomial
weights.  The slash variable X of the formal model, by contrast, is
differentiated (see :func:`drinfeld_nh.forms.hasse_on_X`).
"""

from __future__ import annotations

import json
from functools import lru_cache
from typing import Callable

from .field import GF, binom_mod_p, field
from .forms import GradedForm, formal_slash, generators, hasse_on_X, membership
from .useries import USeries, hyper


class NotNearlyHolomorphic(ValueError):
    """A layer of the structure decomposition is not a modular form."""


def _sign(F: GF, e: int) -> int:
    return F.neg_one if e % 2 else 1


def _fq_scale(s: USeries, c: int) -> USeries:
    return s if c == 1 else s.scale_fq(c)


class NHForm:
    """Σ_μ coeffs[μ]·Y^μ of weight k and type m."""

    __slots__ = ("F", "weight", "type", "coeffs")

    def __init__(self, F: GF, coeffs: dict, weight: int, type_: int, modular: bool = False):
        clean = {}
        prec = None
        for mu, c in coeffs.items():
            if isinstance(c, GradedForm):
                raise TypeError("pass GradedForm coefficients through NHForm.from_graded")
            if mu < 0:
                raise ValueError("negative Y-degree")
            if not c.is_zero():
                clean[mu] = c
            prec = c.prec if prec is None else min(prec, c.prec)
        self.F = F
        self.weight = weight
        self.type = type_ % (F.q - 1)
        self.coeffs = {mu: c.truncate(prec) for mu, c in clean.items()}
        if modular and 2 * self.depth > weight:
            raise ValueError(f"depth {self.depth} exceeds half the weight {weight}")

    @classmethod
    def from_graded(cls, F: GF, coeffs: dict, weight: int, type_: int, prec: int) -> "NHForm":
        return cls(F, {mu: c.expand(prec) for mu, c in coeffs.items()}, weight, type_)

    @classmethod
    def from_series(cls, f: USeries, weight: int, type_: int) -> "NHForm":
        return cls(f.F, {0: f}, weight, type_)

    @property
    def depth(self) -> int:
        return max(self.coeffs, default=0)

    @property
    def prec(self) -> int | None:
        return min((c.prec for c in self.coeffs.values()), default=None)

    def coeff(self, mu: int, prec: int | None = None) -> USeries:
        c = self.coeffs.get(mu)
        if c is None:
            return USeries.zero(self.F, prec if prec is not None else (self.prec or 1))
        return c

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "NHForm") -> "NHForm":
        out = dict(self.coeffs)
        for mu, c in other.coeffs.items():
            out[mu] = out[mu] + c if mu in out else c
        return NHForm(self.F, out, self.weight, self.type)

    def __neg__(self):
        return NHForm(self.F, {mu: -c for mu, c in self.coeffs.items()}, self.weight, self.type)

    def __sub__(self, other: "NHForm") -> "NHForm":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, NHForm):
            out: dict = {}
            for m1, c1 in self.coeffs.items():
                for m2, c2 in other.coeffs.items():
                    t = c1 * c2
                    out[m1 + m2] = out[m1 + m2] + t if m1 + m2 in out else t
            return NHForm(self.F, out, self.weight + other.weight, self.type + other.type)
        return NHForm(self.F, {mu: c * other for mu, c in self.coeffs.items()}, self.weight, self.type)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, NHForm):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeff(mu, 1) == other.coeff(mu, 1) for mu in keys)

    __hash__ = None

    def to_json(self) -> dict:
        return {"weight": self.weight, "type": self.type,
                "Y": [self.coeff(mu).to_json() for mu in range(self.depth + 1)]}

    @classmethod
    def from_json(cls, F: GF, data) -> "NHForm":
        if isinstance(data, str):
            data = json.loads(data)
        coeffs = {}
        for mu, c in enumerate(data["Y"]):
            coeffs[mu] = GradedForm.from_json(F, c) if "monomials" in c else USeries.from_json(F, c)
        prec = data.get("prec")
        if any(isinstance(c, GradedForm) for c in coeffs.values()):
            if prec is None:
                raise ValueError("GradedForm coefficients need a 'prec' field")
            coeffs = {mu: c.expand(prec) if isinstance(c, GradedForm) else c for mu, c in coeffs.items()}
        return cls(F, coeffs, data["weight"], data["type"])

    def __repr__(self):
        return f"NHForm(weight={self.weight}, type={self.type}, depth={self.depth}, prec={self.prec})"


def e2(F: GF, prec: int) -> NHForm:
    """E₂ = E − Y."""
    E = generators(F, prec).E().truncate(prec)
    return NHForm(F, {0: E, 1: USeries.const(F, F.neg_one, prec)}, 2, 1)


BinomFn = Callable[[int, int, int], int]


def maass_shimura(Fm: NHForm, k: int, r: int, binom_fn: BinomFn | None = None) -> NHForm:
    """δ_k^r, termwise Σ_i binom(k−μ+r−1, i) ∂^{r−i}f Y^{μ+i} on f·Y^μ.

    ``binom_fn(n, i, p)`` replaces the binomial weights (negative controls).
    """
    if r < 0:
        raise ValueError("order must be nonnegative")
    if r == 0:
        return Fm
    for mu in Fm.coeffs:
        if k < 2 * mu:
            raise ValueError(f"δ_k needs k ≥ 2μ; got k={k}, μ={mu}")
    F = Fm.F
    p = F.p
    binom_fn = binom_fn or binom_mod_p
    out: dict = {}
    for mu, f in Fm.coeffs.items():
        for i in range(r + 1):
            b = binom_fn(k - mu + r - 1, i, p) % p
            if b == 0:
                continue
            t = hyper(r - i, f)
            t = _fq_scale(t, F.from_int(b))
            key = mu + i
            out[key] = out[key] + t if key in out else t
    return NHForm(F, out, k + 2 * r, Fm.type + r)


def iota_series(Fm: NHForm) -> USeries:
    """Y⁰ part of F as a u-series."""
    return Fm.coeff(0)


def _e2_power_coeff(F: GF, j: int, mu: int, E_pow: USeries) -> USeries:
    """[Y^μ](E − Y)^j = binom(j, μ)(−1)^μ E^{j−μ}, with E^{j−μ} given."""
    b = binom_mod_p(j, mu, F.p)
    if b == 0:
        return None
    return _fq_scale(E_pow, F.mul(F.from_int(b), _sign(F, mu)))


def reconstruct(layers: list, weight: int, type_: int, prec: int) -> NHForm:
    """Σ_j g_j E₂^j for graded forms (or u-series) g_j in g, h."""
    if not layers:
        raise ValueError("need at least one layer")
    F = layers[0].F
    tab = generators(F, prec)
    out: dict = {}
    for j, g in enumerate(layers):
        gs = g.expand(prec) if isinstance(g, GradedForm) else g.truncate(prec)
        if gs.is_zero():
            continue
        for mu in range(j + 1):
            t = _e2_power_coeff(F, j, mu, tab.monomial(0, 0, j - mu, prec))
            if t is None:
                continue
            t = gs * t
            out[mu] = out[mu] + t if mu in out else t
    return NHForm(F, out, weight, type_)


def _split_e_layers(P: GradedForm) -> list[GradedForm]:
    if P.degree("Y") or P.degree("X"):
        raise ValueError("expected a polynomial in g, h, E")
    return [P.coefficient_in("E", j) for j in range(P.depth + 1)]


def inverse_iota(P: GradedForm, prec: int) -> NHForm:
    """Σ g_j E^j ↦ Σ g_j E₂^j."""
    layers = _split_e_layers(P)
    q = P.F.q
    for j, g in enumerate(layers):
        if g.is_zero():
            continue
        if g.degree("E") or g.weight != P.weight - 2 * j or g.type != (P.type - j) % (q - 1):
            raise NotNearlyHolomorphic(f"E^{j} coefficient is not modular of weight {P.weight - 2 * j}")
    return reconstruct(layers, P.weight, P.type, prec)


def decompose(Fm: NHForm) -> list[GradedForm]:
    """Unique g_0, …, g_r (polynomials in g, h) with F = Σ g_j E₂^j.

    Peels the top Y-coefficient, which equals (−1)^r g_r, and certifies each
    layer by membership.
    """
    F = Fm.F
    k, m = Fm.weight, Fm.type
    prec = Fm.prec
    if prec is None:
        return [GradedForm.zero(F, k, m)]
    tab = generators(F, prec)
    work = dict(Fm.coeffs)
    r = Fm.depth
    layers: list = [None] * (r + 1)
    for j in range(r, -1, -1):
        top = work.get(j)
        wj, tj = k - 2 * j, m - j
        if top is None or top.is_zero():
            layers[j] = GradedForm.zero(F, max(wj, 0), tj)
            continue
        if wj < 0:
            raise NotNearlyHolomorphic(f"nonzero Y^{j} coefficient at negative weight {wj}")
        gj_series = _fq_scale(top, _sign(F, j))
        gj = membership(gj_series, wj, tj)
        if gj is None:
            raise NotNearlyHolomorphic(f"layer {j} is not modular of weight {wj}, type {tj % (F.q - 1)}")
        layers[j] = gj
        for mu in range(j + 1):
            t = _e2_power_coeff(F, j, mu, tab.monomial(0, 0, j - mu, prec))
            if t is None:
                continue
            t = gj_series * t
            work[mu] = work[mu] - t if mu in work else -t
        if not work[j].is_zero():
            raise AssertionError("peeling left a nonzero top coefficient")
    return layers


def iota(Fm: NHForm) -> GradedForm:
    """Σ g_j E₂^j ↦ Σ g_j E^j."""
    layers = decompose(Fm)
    F = Fm.F
    out = GradedForm.zero(F, Fm.weight, Fm.type)
    for j, g in enumerate(layers):
        if not g.is_zero():
            out = out + g * GradedForm.gen(F, "E", j)
    return out


def to_graded(Fm: NHForm) -> GradedForm:
    """F as a polynomial in g, h, E, Y (via E₂ = E − Y)."""
    F = Fm.F
    E2 = GradedForm.gen(F, "E") - GradedForm.gen(F, "Y")
    out = GradedForm.zero(F, Fm.weight, Fm.type)
    for j, g in enumerate(decompose(Fm)):
        if not g.is_zero():
            out = out + g * E2 ** j
    return out


@lru_cache(maxsize=4096)
def _qm_hyper_cached(P_json: str, p: int, n: int, r: int, prec: int) -> str:
    F = field(p ** n)
    P = GradedForm.from_json(F, P_json)
    res = iota(maass_shimura(inverse_iota(P, prec), P.weight, r))
    return json.dumps(res.to_json())


def qm_hyper(P: GradedForm, r: int, prec: int) -> GradedForm:
    """∂^r P as a polynomial in g, h, E, found as ι(δ^r_k(ι⁻¹ P))."""
    if P.is_zero():
        return GradedForm.zero(P.F, P.weight + 2 * r, P.type + r)
    if r == 0:
        return P
    F = P.F
    out = _qm_hyper_cached(json.dumps(P.to_json()), F.p, F.n, r, prec)
    return GradedForm.from_json(F, out)


def _group_xy(P: GradedForm) -> dict:
    """{(Y-degree, X-degree): graded form in g, h, E}."""
    out: dict = {}
    for e, c in P.terms.items():
        key = (e[3], e[4])
        mon = GradedForm(P.F, {(e[0], e[1], e[2], 0, 0): c})
        out[key] = out[key] + mon if key in out else mon
    return out


def formal_equivariance_check(f: GradedForm, k: int, m: int, r: int, prec: int,
                              binom_fn: BinomFn | None = None, cache: dict | None = None) -> bool:
    """δ_k^r(slash_X f) = slash_X(δ_k^r f) as polynomials in X and Y.

    The left side differentiates the X-polynomial by Leibniz with the Hasse
    action on X; the right side computes δ_k^r f symbolically (each ∂^j of a
    Y-coefficient recognized via ι) and then slashes.  Pass the same
    ``cache`` dict for repeated calls with one (f, prec) and varying r.
    """
    F = f.F
    p = F.p
    bf = binom_fn or binom_mod_p
    cache = {} if cache is None else cache
    if cache.get("key") != (f, prec):
        cache.clear()
        cache["key"] = (f, prec)
        by_y: dict = {}
        for (mu, a), g in _group_xy(formal_slash(f)).items():
            by_y.setdefault(mu, {})[a] = g.expand(prec)
        cache["by_y"] = by_y
    by_y = cache["by_y"]

    def cached_hyper(i: int, c: USeries) -> USeries:
        key = (id(c), i)
        if key not in cache:
            cache[key] = hyper(i, c)
        return cache[key]

    # left side
    lhs: dict = {}
    for mu, xpoly in by_y.items():
        if k < 2 * mu:
            raise ValueError(f"δ_k needs k ≥ 2μ; got k={k}, μ={mu}")
        for i in range(r + 1):
            b = bf(k - mu + r - 1, i, p) % p if r else 1
            if b == 0:
                continue
            for a, s in hasse_on_X(r - i, xpoly, cached_hyper).items():
                key = (mu + i, a)
                s = _fq_scale(s, F.from_int(b))
                lhs[key] = lhs[key] + s if key in lhs else s
            if r == 0:
                break
    # right side, symbolically
    delta_f = GradedForm.zero(F, k + 2 * r, m + r)
    for mu in range(f.degree("Y") + 1):
        Fmu = f.coefficient_in("Y", mu)
        if Fmu.is_zero():
            continue
        for i in range(r + 1):
            b = binom_mod_p(k - mu + r - 1, i, p) if r else 1
            if b == 0:
                continue
            d = qm_hyper(Fmu, r - i, prec)
            delta_f = delta_f + d * GradedForm.gen(F, "Y", mu + i).scale(b)
            if r == 0:
                break
    rhs = {key: g.expand(prec) for key, g in _group_xy(formal_slash(delta_f)).items()}
    keys = set(lhs) | set(rhs)
    zero = USeries.zero(F, prec)
    return all(lhs.get(key, zero) == rhs.get(key, zero) for key in keys)


def delta_leibniz_check(Fa: NHForm, ka: int, Gb: NHForm, kb: int) -> bool:
    """δ_{ka+kb}(F·G) = F·δ_{kb}(G) + G·δ_{ka}(F)."""
    left = maass_shimura(Fa * Gb, ka + kb, 1)
    right = Fa * maass_shimura(Gb, kb, 1) + Gb * maass_shimura(Fa, ka, 1)
    return left == right


__all__ = [
    "NHForm", "NotNearlyHolomorphic", "e2", "maass_shimura", "iota", "iota_series", "inverse_iota",
    "decompose", "reconstruct", "to_graded", "qm_hyper", "formal_equivariance_check",
    "delta_leibniz_check",
]
