"""Carlitz module data: C_a, reversed polynomials, exponential coefficients,
normalized zeta values and the cyclotomic ring K[λ]/(λ^{q-1}+θ)."""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .field import GF, Poly, RatF, format_ratf


@dataclass(frozen=True)
class CarlitzPoly:
    """C_a(X) = Σ coeffs[i] X^{q^i}."""

    a: Poly
    coeffs: tuple

    def __call__(self, x):
        F = self.a.F
        acc = 0
        for i, c in enumerate(self.coeffs):
            acc = acc + c * x ** (F.q ** i)
        return acc


def _compose_theta(coeffs: list[Poly]) -> list[Poly]:
    """Coefficients of C_θ ∘ (Σ c_j τ^j)."""
    F = coeffs[0].F
    th = Poly.theta(F)
    out = [th * c for c in coeffs] + [Poly.zero(F)]
    for j, c in enumerate(coeffs):
        out[j + 1] = out[j + 1] + c.frob_theta(1)
    return out


def carlitz_action(a: Poly) -> CarlitzPoly:
    F = a.F
    if a.is_zero():
        return CarlitzPoly(a, ())
    total = [Poly.zero(F)] * (a.deg + 1)
    power = [Poly.const(F, 1)]
    for i, c in enumerate(a.codes()):
        if i:
            power = _compose_theta(power)
        if c:
            for j, pc in enumerate(power):
                total[j] = total[j] + pc.scale(c)
    return CarlitzPoly(a, tuple(total))


@dataclass(frozen=True)
class ReversedCarlitz:
    """𝔠_a(X) = X^{|a|} C_a(1/X), stored sparsely as {exponent: coefficient}."""

    a: Poly
    terms: tuple  # ((exponent, Poly), ...) increasing exponent

    @property
    def degree(self) -> int:
        return max(e for e, _ in self.terms)

    def dense(self) -> list[Poly]:
        F = self.a.F
        out = [Poly.zero(F)] * (self.degree + 1)
        for e, c in self.terms:
            out[e] = c
        return out


def reversed_carlitz(a: Poly) -> ReversedCarlitz:
    if a.is_zero():
        raise ValueError("reversed Carlitz polynomial of 0 is undefined")
    C = carlitz_action(a)
    F = a.F
    top = F.q ** a.deg
    terms = [(top - F.q ** i, c) for i, c in enumerate(C.coeffs) if not c.is_zero()]
    return ReversedCarlitz(a, tuple(sorted(terms, key=lambda t: t[0])))


class _Memo:
    """Per-field memo table with idempotent, lock-protected fill."""

    def __init__(self):
        self._lock = threading.RLock()
        self._data: dict = {}

    def get(self, key, build):
        val = self._data.get(key)
        if val is None:
            with self._lock:
                val = self._data.get(key)
                if val is None:
                    val = build()
                    self._data[key] = val
        return val


_D = _Memo()


def bracket(F: GF, i: int) -> Poly:
    """[i] = θ^{q^i} − θ."""
    return Poly.theta(F, F.q ** i) - Poly.theta(F)


def carlitz_d(F: GF, i: int) -> Poly:
    """D_i = [i]·D_{i-1}^q, D_0 = 1."""
    def build():
        if i == 0:
            return Poly.const(F, 1)
        return bracket(F, i) * carlitz_d(F, i - 1).frob_theta(1)
    return _D.get((F.p, F.n, i), build)


def exp_coeffs(F: GF, bound: int) -> dict[int, RatF]:
    """{q^i: 1/D_i} for q^i < bound."""
    out = {}
    i = 0
    while F.q ** i < bound:
        out[F.q ** i] = RatF(Poly.const(F, 1), carlitz_d(F, i))
        i += 1
    return out


_Z = _Memo()


def _inverse_exp_series(F: GF, kmax: int) -> list[RatF]:
    """Coefficients c_t of X/e_C(X) = Σ c_t X^t for t ≤ kmax."""
    ex = exp_coeffs(F, kmax + 2)
    w = {e - 1: c for e, c in ex.items() if e > 1}
    c = [RatF.one(F)]
    for t in range(1, kmax + 1):
        acc = RatF.zero(F)
        for s, ws in w.items():
            if s <= t and not c[t - s].is_zero():
                acc = acc - ws * c[t - s]
        c.append(acc)
    return c


def zeta_norm(F: GF, k: int) -> RatF:
    """ζ̃(k) = [X^{k-1}](1/e_C(X) − 1/X); zero unless (q−1) | k."""
    if k < 1:
        raise ValueError("k must be positive")
    if k % (F.q - 1):
        return RatF.zero(F)

    def build():
        return _inverse_exp_series(F, k)[k]
    return _Z.get((F.p, F.n, k), build)


# ---------------------------------------------------------------------------
# K_θ = K[λ]/(λ^{q−1} + θ)


class CycloElem:
    """Element Σ c_i λ^i (0 ≤ i < q−1) of K[λ]/(λ^{q−1}+θ)."""

    __slots__ = ("F", "c")

    def __init__(self, F: GF, coeffs):
        coeffs = list(coeffs)
        d = F.q - 1
        if len(coeffs) > d:
            raise ValueError("too many coefficients; reduce first")
        coeffs += [RatF.zero(F)] * (d - len(coeffs))
        self.F = F
        self.c = tuple(x if isinstance(x, RatF) else RatF(x) if isinstance(x, Poly)
                       else RatF.const(F, F.from_int(x)) for x in coeffs)

    @classmethod
    def scalar(cls, F: GF, x) -> "CycloElem":
        return cls(F, [x])

    @classmethod
    def lam(cls, F: GF, e: int = 1) -> "CycloElem":
        """λ^e (any e ≥ 0)."""
        return cls.from_list(F, [RatF.zero(F)] * e + [RatF.one(F)])

    @classmethod
    def from_list(cls, F: GF, coeffs) -> "CycloElem":
        """Reduce an arbitrary-length coefficient list with λ^{q−1} = −θ."""
        d = F.q - 1
        out = [RatF.zero(F)] * d
        minus_theta = -RatF.theta(F)
        for j, x in enumerate(coeffs):
            if not x.is_zero():
                out[j % d] = out[j % d] + x * minus_theta ** (j // d)
        return cls(F, out)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.c)

    def _lift(self, other):
        if isinstance(other, CycloElem):
            return other
        if isinstance(other, (RatF, Poly, int)):
            return CycloElem.scalar(self.F, other)
        return NotImplemented

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return CycloElem(self.F, [a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.F, [-a for a in self.c])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        d = self.F.q - 1
        prod = [RatF.zero(self.F)] * (2 * d - 1)
        for i, a in enumerate(self.c):
            if a.is_zero():
                continue
            for j, b in enumerate(other.c):
                if not b.is_zero():
                    prod[i + j] = prod[i + j] + a * b
        return CycloElem.from_list(self.F, prod)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        out = CycloElem.scalar(self.F, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def matrix(self) -> list[list[RatF]]:
        """Matrix of multiplication by self in the basis 1, λ, …, λ^{q−2} (columns = images)."""
        d = self.F.q - 1
        cols = [(self * CycloElem.lam(self.F, j)).c for j in range(d)]
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def inv(self) -> "CycloElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in K_θ")
        d = self.F.q - 1
        rhs = [RatF.one(self.F)] + [RatF.zero(self.F)] * (d - 1)
        return CycloElem(self.F, solve_linear(self.matrix(), rhs))

    def __truediv__(self, other):
        return self * self._lift(other).inv()

    def __repr__(self):
        return f"CycloElem({self})"

    def __str__(self):
        parts = []
        for i, x in enumerate(self.c):
            if i == 0:
                parts.append(f"{format_ratf(x)}" if x.is_poly() else f"({format_ratf(x)})")
            else:
                s = format_ratf(x)
                parts.append(f"({s})*λ^{i}" if i > 1 else f"({s})*λ")
        return " + ".join(parts)


def solve_linear(M: list[list[RatF]], b: list[RatF]) -> list[RatF]:
    """Solve the square system M x = b over K by Gaussian elimination."""
    n = len(M)
    A = [list(row) + [b[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not A[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inv()
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


def lambda_poly(x: Poly) -> Poly:
    """Image of a ∈ A in F_q[λ] under θ ↦ −λ^{q−1}."""
    F = x.F
    d = F.q - 1
    out = Poly.zero(F)
    mt = -Poly.theta(F, d)
    for i, c in enumerate(x.codes()):
        if c:
            out = out + (mt ** i).scale(c)
    return out


def lambda_ratf(x: RatF) -> RatF:
    return RatF(lambda_poly(x.num), lambda_poly(x.den))


def cyclo_from_lambda(x: RatF) -> CycloElem:
    """Convert a rational function in λ into the basis form of K_θ."""
    F = x.F
    num = CycloElem.from_list(F, [RatF.const(F, c) for c in x.num.codes()])
    den = CycloElem.from_list(F, [RatF.const(F, c) for c in x.den.codes()])
    return num / den
