"""Rankin–Cohen brackets and the U_k^r operators, with their δ-side checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

from .field import GF, binom_big
from .nearly import NHForm, maass_shimura
from .useries import USeries, hyper


def _b(n: int, k: int) -> int:
    return binom_big(n, k) if 0 <= k <= n else 0


def _reduce_table(tilde: tuple[int, ...], p: int) -> tuple[tuple[int, ...], int]:
    g = reduce(math.gcd, tilde, 0)
    if g == 0:
        return tuple(0 for _ in tilde), 0
    return tuple((t // g) % p for t in tilde), g


@dataclass(frozen=True)
class RCCoeffs:
    """β̃_{r,ν} over ℤ, their gcd, and β_{r,ν} = β̃_{r,ν}/gcd mod p (index ν = 0..r)."""

    r: int
    k: int
    w: int
    p: int
    tilde: tuple
    gcd: int
    reduced: tuple

    @classmethod
    def compute(cls, r: int, k: int, w: int, p: int) -> "RCCoeffs":
        tilde = tuple(
            math.factorial(r - nu) * math.factorial(nu) * _b(k + r - 1, r - nu) * _b(w + r - 1, nu)
            for nu in range(r + 1)
        )
        red, g = _reduce_table(tilde, p)
        return cls(r, k, w, p, tilde, g, red)


@dataclass(frozen=True)
class UCoeffs:
    """c̃_v^r(k) over ℤ for v = 1..r, their gcd, and c_v^r(k) mod p.

    ``reduced[v-1]`` holds c_v.
    """

    r: int
    k: int
    p: int
    tilde: tuple
    gcd: int
    reduced: tuple

    @classmethod
    def compute(cls, r: int, k: int, p: int) -> "UCoeffs":
        if r < 2:
            raise ValueError("U-operators need r ≥ 2")
        tilde = [(r - 1) * _b(k + r - 1, r - 1)]
        tilde += [r * k ** (v - 1) * _b(k + r - 1, r - v) for v in range(2, r + 1)]
        red, g = _reduce_table(tuple(tilde), p)
        return cls(r, k, p, tuple(tilde), g, red)

    def c(self, v: int) -> int:
        return self.reduced[v - 1]


def _signed(F: GF, c: int, e: int) -> int:
    """(−1)^e·c as an F_q code."""
    x = F.from_int(c % F.p)
    return F.neg(x) if e % 2 else x


def rc_bracket(f: USeries, k: int, g: USeries, w: int, r: int, table: RCCoeffs | None = None) -> USeries:
    """[f, g]_{k,w,r} = Σ_ν (−1)^{r−ν} β_{r,ν} ∂^ν f · ∂^{r−ν} g."""
    F = f.F
    table = table or RCCoeffs.compute(r, k, w, F.p)
    prec = min(f.prec, g.prec)
    out = USeries.zero(F, prec)
    for nu in range(r + 1):
        c = _signed(F, table.reduced[nu], r - nu)
        if c == 0:
            continue
        out = out + (hyper(nu, f) * hyper(r - nu, g)).scale_fq(c)
    return out


def rc_bracket_nh(f: USeries, k: int, g: USeries, w: int, r: int, table: RCCoeffs | None = None) -> NHForm:
    """Σ_ν (−1)^{r−ν} β_{r,ν} δ_k^ν f · δ_w^{r−ν} g in the Y model."""
    F = f.F
    table = table or RCCoeffs.compute(r, k, w, F.p)
    nf = NHForm.from_series(f, k, 0)
    ng = NHForm.from_series(g, w, 0)
    out = None
    for nu in range(r + 1):
        c = _signed(F, table.reduced[nu], r - nu)
        if c == 0:
            continue
        term = maass_shimura(nf, k, nu) * maass_shimura(ng, w, r - nu)
        term = NHForm(F, {mu: s.scale_fq(c) for mu, s in term.coeffs.items()}, term.weight, term.type)
        out = term if out is None else out + term
    if out is None:
        prec = min(f.prec, g.prec)
        out = NHForm(F, {0: USeries.zero(F, prec)}, k + w + 2 * r, r)
    return out


def rc_bracket_nh_identity(f: USeries, k: int, g: USeries, w: int, r: int,
                           table: RCCoeffs | None = None) -> bool:
    """Y-parts of the δ-form cancel and its Y⁰ part is the bracket."""
    nh = rc_bracket_nh(f, k, g, w, r, table)
    if any(mu > 0 for mu in nh.coeffs):
        return False
    return nh.coeff(0) == rc_bracket(f, k, g, w, r, table)


def u_operator(f: USeries, k: int, r: int, table: UCoeffs | None = None) -> USeries:
    """𝒰_k^r(f) = Σ_{v=1}^r (−1)^{r−v} c_v f^{v−1} (∂f)^{r−v} ∂^v f."""
    if r < 2:
        raise ValueError("U-operators need r ≥ 2")
    F = f.F
    table = table or UCoeffs.compute(r, k, F.p)
    df = hyper(1, f)
    out = USeries.zero(F, f.prec)
    for v in range(1, r + 1):
        c = _signed(F, table.c(v), r - v)
        if c == 0:
            continue
        out = out + ((f ** (v - 1)) * (df ** (r - v)) * hyper(v, f)).scale_fq(c)
    return out


def u_operator_nh(f: USeries, k: int, r: int, table: UCoeffs | None = None) -> NHForm:
    """Σ_v (−1)^{r−v} c_v f^{v−1} (δ_k f)^{r−v} δ_k^v f in the Y model."""
    if r < 2:
        raise ValueError("U-operators need r ≥ 2")
    F = f.F
    table = table or UCoeffs.compute(r, k, F.p)
    nf = NHForm.from_series(f, k, 0)
    d1 = maass_shimura(nf, k, 1)
    out = None
    for v in range(1, r + 1):
        c = _signed(F, table.c(v), r - v)
        if c == 0:
            continue
        term = maass_shimura(nf, k, v)
        for _ in range(r - v):
            term = term * d1
        term = term * (f ** (v - 1))
        term = NHForm(F, {mu: s.scale_fq(c) for mu, s in term.coeffs.items()}, k * r + 2 * r, r)
        out = term if out is None else out + term
    if out is None:
        out = NHForm(F, {0: USeries.zero(F, f.prec)}, k * r + 2 * r, r)
    return out


def u_operator_nh_identity(f: USeries, k: int, r: int, table: UCoeffs | None = None) -> bool:
    nh = u_operator_nh(f, k, r, table)
    if any(mu > 0 for mu in nh.coeffs):
        return False
    return nh.coeff(0) == u_operator(f, k, r, table)


def perturbed_u_table(table: UCoeffs, v: int, delta: int = 1) -> UCoeffs:
    """Copy of ``table`` with c_v shifted by delta mod p (negative controls)."""
    red = list(table.reduced)
    red[v - 1] = (red[v - 1] + delta) % table.p
    return UCoeffs(table.r, table.k, table.p, table.tilde, table.gcd, tuple(red))


def perturbed_rc_table(table: RCCoeffs, nu: int, delta: int = 1) -> RCCoeffs:
    red = list(table.reduced)
    red[nu] = (red[nu] + delta) % table.p
    return RCCoeffs(table.r, table.k, table.w, table.p, table.tilde, table.gcd, tuple(red))
