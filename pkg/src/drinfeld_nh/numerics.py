"""Non-archimedean numerics: truncated Puiseux–Laurent series in θ^{−1/e}
over F_{q^m}, the Carlitz period and exponential, evaluation of u-series,
and the quadratic extensions carrying the automorphism ψ.

Valuations follow val(θ) = −1.  A PuiseuxNum stores digits in the
uniformizer t = θ^{−1/e}; ``start`` and ``prec`` are t-exponents, and
``prec`` (absolute, exclusive) is None for exact values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .carlitz import carlitz_d
from .field import GF, Poly, RatF, embedding, field
from .kron import convolve
from .useries import PrecisionError, USeries


class NumericsError(ValueError):
    """Input outside the convergence or validity region of an evaluator."""


_INF = float("inf")


class PuiseuxNum:
    __slots__ = ("K", "q", "e", "start", "digits", "prec")

    def __init__(self, K: GF, q: int, e: int, start: int, digits: np.ndarray, prec: int | None):
        digits = np.asarray(digits, dtype=np.int64).reshape(-1, K.n)
        if prec is not None and start + digits.shape[0] > prec:
            digits = digits[: max(prec - start, 0)]
        nz = np.nonzero(digits.any(axis=1))[0]
        if len(nz):
            digits = digits[nz[0]: nz[-1] + 1]
            start += int(nz[0])
        else:
            digits = digits[:0]
            start = prec if prec is not None else 0
        self.K, self.q, self.e = K, q, e
        self.start, self.digits, self.prec = start, digits, prec

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, K: GF, q: int, e: int = 1, prec: int | None = None) -> "PuiseuxNum":
        return cls(K, q, e, 0, np.zeros((0, K.n)), prec)

    @classmethod
    def from_terms(cls, K: GF, q: int, e: int, terms: dict, prec: int | None = None) -> "PuiseuxNum":
        """{t-exponent: code in K}."""
        terms = {i: c for i, c in terms.items() if c}
        if not terms:
            return cls.zero(K, q, e, prec)
        lo, hi = min(terms), max(terms)
        d = np.zeros((hi - lo + 1, K.n), dtype=np.int64)
        for i, c in terms.items():
            d[i - lo] = K.vec(c)
        return cls(K, q, e, lo, d, prec)

    @classmethod
    def const(cls, K: GF, q: int, c: int, e: int = 1, prec: int | None = None) -> "PuiseuxNum":
        return cls.from_terms(K, q, e, {0: c}, prec)

    @classmethod
    def theta_power(cls, K: GF, q: int, k: int, e: int = 1) -> "PuiseuxNum":
        return cls.from_terms(K, q, e, {-k * e: 1})

    @classmethod
    def from_poly(cls, a: Poly, K: GF, e: int = 1) -> "PuiseuxNum":
        emb = embedding(a.F, K)
        q = a.F.q
        return cls.from_terms(K, q, e, {-i * e: emb[c] for i, c in enumerate(a.codes())})

    @classmethod
    def from_ratf(cls, x: RatF, K: GF, e: int, prec: int) -> "PuiseuxNum":
        num = cls.from_poly(x.num, K, e)
        if x.den.deg == 0:
            return num.scale(K.inv(embedding(x.F, K)[x.den.lead()]))
        den = cls.from_poly(x.den, K, e)
        return num * den.inverse(prec - num.start + den.start + 1)

    # -- accessors ----------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        return self.digits.shape[0] == 0

    def val_index(self) -> float:
        """t-exponent of the leading digit (prec, or ∞, when zero)."""
        if self.is_zero():
            return _INF if self.prec is None else self.prec
        return self.start

    def valuation(self) -> Fraction | None:
        if self.is_zero():
            return None
        return Fraction(self.start, self.e)

    def coeff(self, i: int) -> int:
        if self.prec is not None and i >= self.prec:
            raise PrecisionError(f"digit t^{i} beyond precision {self.prec}")
        j = i - self.start
        if 0 <= j < self.digits.shape[0]:
            return self.K.code(self.digits[j])
        return 0

    def terms(self) -> dict:
        codes = self.K.codes(self.digits)
        return {self.start + i: int(c) for i, c in enumerate(codes) if c}

    def precision(self) -> Fraction | None:
        """Absolute precision in θ-units (None if exact)."""
        return None if self.prec is None else Fraction(self.prec, self.e)

    def with_e(self, e: int) -> "PuiseuxNum":
        if e == self.e:
            return self
        if e % self.e:
            raise ValueError("ramification index can only be refined")
        s = e // self.e
        d = np.zeros(((self.digits.shape[0] - 1) * s + 1 if len(self.digits) else 0, self.K.n), dtype=np.int64)
        d[::s] = self.digits
        return PuiseuxNum(self.K, self.q, e, self.start * s, d,
                          None if self.prec is None else self.prec * s)

    def truncate(self, prec: int) -> "PuiseuxNum":
        if self.prec is not None and self.prec <= prec:
            return self
        return PuiseuxNum(self.K, self.q, self.e, self.start, self.digits, prec)

    # -- arithmetic ---------------------------------------------------------

    def _align(self, other: "PuiseuxNum"):
        if isinstance(other, int):
            other = PuiseuxNum.const(self.K, self.q, self.K.from_int(other), self.e)
        if other.K != self.K:
            raise ValueError("mismatched coefficient fields")
        if other.e != self.e:
            import math
            e = self.e * other.e // math.gcd(self.e, other.e)
            return self.with_e(e), other.with_e(e)
        return self, other

    @staticmethod
    def _min_prec(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def _combine(self, other, sign):
        a, b = self._align(other)
        prec = self._min_prec(a.prec, b.prec)
        if a.is_zero() and b.is_zero():
            return PuiseuxNum.zero(a.K, a.q, a.e, prec)
        lo = min(x.start for x in (a, b) if not x.is_zero())
        hi = max(x.start + x.digits.shape[0] for x in (a, b) if not x.is_zero())
        d = np.zeros((hi - lo, a.K.n), dtype=np.int64)
        if not a.is_zero():
            d[a.start - lo: a.start - lo + len(a.digits)] += a.digits
        if not b.is_zero():
            d[b.start - lo: b.start - lo + len(b.digits)] += sign * b.digits
        return PuiseuxNum(a.K, a.q, a.e, lo, d % a.K.p, prec)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return PuiseuxNum(self.K, self.q, self.e, self.start, (-self.digits) % self.K.p, self.prec)

    def scale(self, c: int) -> "PuiseuxNum":
        """Multiply by the K-element with code c."""
        return PuiseuxNum(self.K, self.q, self.e, self.start, self.K.scale(self.digits, c), self.prec)

    def shift(self, k: int) -> "PuiseuxNum":
        """Multiply by t^k."""
        return PuiseuxNum(self.K, self.q, self.e, self.start + k, self.digits,
                          None if self.prec is None else self.prec + k)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(self.K.from_int(other))
        a, b = self._align(other)
        va, vb = a.val_index(), b.val_index()
        cands = []
        if a.prec is not None:
            cands.append(a.prec + vb)
        if b.prec is not None:
            cands.append(b.prec + va)
        prec = None
        if cands:
            m = min(cands)
            prec = int(m) if m != _INF else None
        if a.is_zero() or b.is_zero():
            return PuiseuxNum.zero(a.K, a.q, a.e, prec)
        trunc = None if prec is None else max(prec - a.start - b.start, 0)
        raw = convolve(a.digits, b.digits, a.K.p - 1, trunc=trunc)
        return PuiseuxNum(a.K, a.q, a.e, a.start + b.start, a.K.reduce(raw), prec)

    __rmul__ = __mul__

    def inverse(self, rel: int | None = None) -> "PuiseuxNum":
        """1/x; exact inputs need a relative precision ``rel`` (digits)."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of a zero (or unresolved) Puiseux number")
        K = self.K
        v = self.start
        if self.prec is not None:
            R = self.prec - v
        elif self.digits.shape[0] == 1:
            return PuiseuxNum(K, self.q, self.e, -v, K.vec(K.inv(self.coeff(v)))[None], None)
        elif rel is None:
            raise PrecisionError("inverse of an exact non-monomial needs a precision")
        else:
            R = rel
        c0inv = K.inv(self.coeff(v))
        f = K.scale(self.digits, c0inv)
        f = np.concatenate([f, np.zeros((max(R - len(f), 0), K.n), dtype=np.int64)])[:R]
        g = np.zeros((1, K.n), dtype=np.int64)
        g[0] = K.vec(1)
        k = 1
        while k < R:
            k = min(2 * k, R)
            fg = K.reduce(convolve(f[:k], g, K.p - 1, trunc=k))
            err = (-fg) % K.p
            err[0] = (err[0] + K.vec(1)) % K.p
            corr = K.reduce(convolve(g, err, K.p - 1, trunc=k))
            gk = np.zeros((k, K.n), dtype=np.int64)
            gk[: len(g)] = g
            g = (gk + corr) % K.p
        g = K.scale(g, c0inv)
        return PuiseuxNum(K, self.q, self.e, -v, g, -v + R)

    def __truediv__(self, other):
        if isinstance(other, int):
            return self.scale(self.K.inv(self.K.from_int(other)))
        a, b = self._align(other)
        rel = None
        if b.prec is None and a.prec is not None:
            rel = a.prec - a.val_index() + 1
            rel = int(rel) if rel != _INF else None
        return a * b.inverse(rel)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = PuiseuxNum.const(self.K, self.q, 1, self.e)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def frob_power(self, k: int = 1) -> "PuiseuxNum":
        """x^{p^k}: stretch t-exponents and raise digits (additive in characteristic p)."""
        K = self.K
        s = K.p ** k
        codes = [K.frob(int(c), k) for c in K.codes(self.digits)]
        d = np.zeros(((len(codes) - 1) * s + 1 if codes else 0, K.n), dtype=np.int64)
        for i, c in enumerate(codes):
            d[i * s] = K.vec(c)
        return PuiseuxNum(K, self.q, self.e, self.start * s, d, None if self.prec is None else self.prec * s)

    def qth_power(self) -> "PuiseuxNum":
        """x^q for the base q."""
        k = round(np.log(self.q) / np.log(self.K.p))
        return self.frob_power(k)

    def coeff_frob(self) -> "PuiseuxNum":
        """Coefficient-wise a ↦ a^q, exponents fixed."""
        K = self.K
        codes = [K.pow(int(c), self.q) for c in K.codes(self.digits)]
        d = np.array([K.vec(c) for c in codes], dtype=np.int64).reshape(-1, K.n)
        return PuiseuxNum(K, self.q, self.e, self.start, d, self.prec)

    # -- comparison ---------------------------------------------------------

    def agreement(self, other: "PuiseuxNum") -> Fraction | float:
        """Digits (θ-units) to which self and other are known to agree."""
        d = self - other
        if d.is_zero():
            return _INF if d.prec is None else Fraction(d.prec, d.e)
        return Fraction(d.start, d.e)

    def __eq__(self, other):
        if not isinstance(other, PuiseuxNum):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def in_base_field(self) -> bool:
        """All digits lie in F_q and the ramification is trivial on the support."""
        K = self.K
        for i, c in self.terms().items():
            if i % self.e or K.pow(c, self.q) != c:
                return False
        return True

    # -- text ---------------------------------------------------------------

    def to_json(self) -> dict:
        m = self.K.n // field(self.q).n
        digits = []
        for i, c in sorted(self.terms().items()):
            f = Fraction(i, self.e)
            digits.append([f.numerator, f.denominator, c])
        return {"e": self.e, "m": m, "q": self.q, "digits": digits,
                "prec": None if self.prec is None else str(Fraction(self.prec, self.e))}

    @classmethod
    def from_json(cls, data) -> "PuiseuxNum":
        if isinstance(data, str):
            data = json.loads(data)
        q, m, e = data["q"], data["m"], data["e"]
        base = field(q)
        K = GF(base.p, base.n * m) if m > 1 else base
        terms = {}
        for num, den, c in data["digits"]:
            idx = Fraction(num, den) * e
            if idx.denominator != 1:
                raise ValueError("exponent incompatible with the ramification index")
            terms[int(idx)] = c
        prec = data.get("prec")
        prec = None if prec is None else Fraction(prec) * e
        if prec is not None and prec.denominator != 1:
            raise ValueError("precision incompatible with the ramification index")
        return cls.from_terms(K, q, e, terms, None if prec is None else int(prec))

    def __repr__(self):
        shown = []
        for i, c in list(sorted(self.terms().items()))[:5]:
            shown.append(f"{c}·θ^{-Fraction(i, self.e)}")
        body = " + ".join(shown) if shown else "0"
        tail = "" if self.prec is None else f" + O(θ^{-Fraction(self.prec, self.e)})"
        return f"Puiseux[{self.K.q},e={self.e}]({body}{tail})"


# ---------------------------------------------------------------------------
# fields and special constants


def ext_field(q: int, m: int = 2) -> GF:
    base = field(q)
    return GF(base.p, base.n * m)


def root_of_minus_one(q: int, K: GF) -> int:
    """Smallest code ζ ∈ K with ζ^{q−1} = −1."""
    for c in range(1, K.q):
        if K.pow(c, q - 1) == K.neg_one:
            return c
    raise NumericsError("no (q−1)-st root of −1 in the coefficient field")


def sigma(x: PuiseuxNum) -> PuiseuxNum:
    """σ(Σ a_i θ^{−i}) = Σ a_i^q θ^{−i} on unramified numbers."""
    if x.e != 1:
        nonint = any(i % x.e for i in x.terms())
        if nonint:
            raise NumericsError("σ is defined here on unramified numbers only")
    return x.coeff_frob()


def pitilde(q: int, V: int, m: int = 2) -> PuiseuxNum:
    """Carlitz period θ(−θ)^{1/(q−1)}∏_{i≥1}(1−θ^{1−q^i})^{−1} to V θ-digits past its leading term.

    (−θ)^{1/(q−1)} is ζ·θ^{1/(q−1)} with ζ the smallest root of ζ^{q−1} = −1.
    """
    K = ext_field(q, m)
    e = q - 1
    R = V * e + 1
    zeta = root_of_minus_one(q, K)
    lead = PuiseuxNum.from_terms(K, q, e, {-e - 1: zeta})
    prod = PuiseuxNum.const(K, q, 1, e, prec=R)
    i = 1
    while e * (q ** i - 1) < R:
        fac = PuiseuxNum.from_terms(K, q, e, {0: 1, e * (q ** i - 1): K.neg_one})
        prod = prod * fac
        i += 1
    return lead * prod.inverse()


@lru_cache(maxsize=None)
def _d_inverse(q: int, m: int, e: int, i: int, rel: int) -> PuiseuxNum:
    F = field(q)
    K = ext_field(q, m)
    return PuiseuxNum.from_poly(carlitz_d(F, i), K, e).inverse(rel)


def carlitz_exp_eval(x: PuiseuxNum, target: int | None = None, max_terms: int = 64) -> PuiseuxNum:
    """e_C(x) = Σ x^{q^i}/D_i, summed until the omitted tail lies beyond ``target``.

    ``target`` is an absolute t-exponent (defaults to the precision of x).
    """
    if x.is_zero():
        return PuiseuxNum.zero(x.K, x.q, x.e, x.prec)
    q, e = x.q, x.e
    if target is None:
        if x.prec is None:
            raise PrecisionError("exact input needs a target precision")
        target = x.prec
    m = x.K.n // field(q).n
    v = x.start
    out = None
    xp = x
    for i in range(max_terms):
        tv = (q ** i) * v + e * i * (q ** i)   # t-valuation of x^{q^i}/D_i
        if tv >= target and v + e * i > 0:
            prec = target if out.prec is None else min(out.prec, target)
            return out.truncate(prec)
        rel = max(target - tv, 1) + 1
        term = xp * _d_inverse(q, m, e, i, rel) if i else xp
        out = term if out is None else out + term
        xp = xp.qth_power()
    raise NumericsError("Carlitz exponential did not converge within the term budget")


def u_eval(z: PuiseuxNum, V: int) -> PuiseuxNum:
    """u(z) = 1/e_C(π̃z) to V θ-digits."""
    q = z.q
    m = z.K.n // field(q).n
    pt = pitilde(q, V + 4, m)
    zz = z.with_e(pt.e) if pt.e % z.e == 0 else z
    w = pt * zz
    guard = 4 * pt.e
    ex = carlitz_exp_eval(w, target=V * pt.e + guard + 2 * abs(w.start))
    return ex.inverse()


def eval_useries(f: USeries, u0: PuiseuxNum, V: int | None = None) -> PuiseuxNum:
    """Σ f_n u0^n by Horner, with an extrapolated tail estimate.

    The omitted tail is estimated as the least valuation among the upper
    half of the computed coefficients plus prec·val(u0); the result's
    precision is capped there, and PrecisionError is raised if that falls
    short of V θ-digits.
    """
    K, q, e = u0.K, u0.q, u0.e
    if f.val < 0:
        raise NumericsError("Laurent tails are not evaluated")
    if not u0.is_zero() and u0.start <= 0:
        raise NumericsError("evaluation needs |u0| < 1")
    N = f.prec
    polys = [f._num_poly(i) for i in range(N - f.val)]
    coeff_vals = {f.val + i: -p.deg * e for i, p in enumerate(polys) if not p.is_zero()}
    den_val = -f.den.deg * e
    upper = [v for n, v in coeff_vals.items() if n >= N // 2]
    step = u0.start if not u0.is_zero() else N * e
    tail = (min(upper) if upper else 0) - den_val + N * step
    if V is not None and tail < V * e:
        raise PrecisionError(f"tail estimate reaches only {Fraction(tail, e)} of {V} digits")
    lowest = min(coeff_vals.values(), default=0) - den_val
    u = u0.truncate(tail - lowest + e)
    acc = PuiseuxNum.zero(K, q, e)
    for i in range(len(polys) - 1, -1, -1):
        acc = acc * u + PuiseuxNum.from_poly(polys[i], K, e)
    acc = acc * (u ** f.val)
    if f.den.deg or f.den.lead() != 1:
        rel = tail - int(acc.val_index()) + 2 * e if not acc.is_zero() else 2 * e
        acc = acc * PuiseuxNum.from_poly(f.den, K, e).inverse(max(rel, 1))
    return acc.truncate(tail)


# ---------------------------------------------------------------------------
# E inversion law at an inert point


def inert_point(q: int, K: GF) -> int:
    """ξ ∈ F_{q²}\\F_q: the smallest root of x^{q−1} = −1 for odd q, α for even q."""
    if q % 2:
        return root_of_minus_one(q, K)
    eps = find_epsilon(field(q).n)
    return find_alpha(eps, q)


def verify_inversion_law(z0: PuiseuxNum, V: int = 20, perturb: int = 1) -> tuple[bool, Fraction]:
    """E(1/z0) = −z0²(E(z0) − 1/(π̃ z0)), both sides through independent evaluations.

    ``perturb`` multiplies the 1/(π̃z0) correction (1 is the true law).
    Returns (agree to V digits, digits of agreement).
    """
    from .forms import false_eisenstein
    q = z0.q
    F = field(q)
    m = z0.K.n // F.n
    e = q - 1
    z = z0.with_e(e) if z0.e != e else z0
    guard = 6
    Vw = V + guard
    N = 2 * Vw + 8
    E = false_eisenstein(F, N)
    pt = pitilde(q, Vw + 4, m)
    zi = z.inverse(Vw * e + 4 * e)
    u1 = u_eval(z, Vw + 2)
    u2 = u_eval(zi, Vw + 2)
    lhs = eval_useries(E, u2, None)
    corr = (pt * z).inverse(Vw * e + 4 * e)
    if perturb != 1:
        corr = corr.scale(z0.K.from_int(perturb))
    rhs = -(z * z) * (eval_useries(E, u1, None) - corr)
    agree = lhs.agreement(rhs)
    lp = min(x for x in (lhs.precision(), rhs.precision()) if x is not None)
    return bool(agree >= V and lp >= V), min(agree, lp)


# ---------------------------------------------------------------------------
# Appendix-A quadratic extensions


def find_epsilon(n: int) -> int:
    """Smallest ε ∈ F_{2^n} with Tr_{F_{2^n}/F_2}(ε) = 1 (code in field(2^n))."""
    F = field(2 ** n)
    for c in range(1, F.q):
        if F.trace_to_prime(c) == 1:
            return c
    raise RuntimeError("no trace-one element")


def find_alpha(eps: int, q: int) -> int:
    """Root α ∈ F_{q²} of x² + x + ε (smallest code), with α^q = α + 1."""
    F = field(q)
    if F.p != 2:
        raise ValueError("α is defined in even characteristic only")
    K = ext_field(q, 2)
    emb = embedding(F, K)
    ec = emb[eps]
    for a in range(K.q):
        if K.add(K.add(K.mul(a, a), a), ec) == 0:
            if K.pow(a, q) != K.add(a, 1):
                raise RuntimeError("root of x²+x+ε is not a root of x^q+x+1")
            return a
    raise RuntimeError("x² + x + ε has no root in F_{q²}")


@dataclass(frozen=True)
class PsiSpec:
    """variant ∈ {"even", "odd-I", "odd-II"}; even needs B (in K_∞) and α."""

    variant: str
    q: int
    B: PuiseuxNum | None = None
    alpha: int | None = None
    xi: int | None = None

    def __post_init__(self):
        p = field(self.q).p
        if self.variant == "even":
            if p != 2:
                raise ValueError("even variant needs characteristic 2")
            if self.B is None or self.alpha is None:
                raise ValueError("even variant needs B and α")
            vb = self.B.valuation()
            if not self.B.in_base_field() or vb is None or vb >= 0 or vb.denominator != 1 or vb.numerator % 2 == 0:
                raise ValueError("B must lie in K_∞ with negative odd valuation (val 𝔠 ∉ ℤ)")
        elif self.variant in ("odd-I", "odd-II"):
            if p == 2:
                raise ValueError("odd variants need odd characteristic")
        else:
            raise ValueError(f"unknown ψ variant {self.variant!r}")

    @property
    def kind(self) -> str:
        return "even" if self.variant == "even" else "odd"

    def gen_valuation(self) -> Fraction:
        return self.B.valuation() / 2 if self.kind == "even" else Fraction(1, 2)


def default_spec(q: int, variant: str | None = None) -> PsiSpec:
    """Standard spec: even uses B = θ, ε and α from find_epsilon/find_alpha."""
    F = field(q)
    K = ext_field(q, 2)
    if F.p == 2:
        B = PuiseuxNum.theta_power(K, q, 1)
        alpha = find_alpha(find_epsilon(F.n), q)
        return PsiSpec("even", q, B=B, alpha=alpha)
    return PsiSpec(variant or "odd-I", q, xi=root_of_minus_one(q, K))


class QuadExtElem:
    """a + b·gen with gen² + gen + B = 0 (even) or gen² = 1/θ (odd)."""

    __slots__ = ("a", "b", "spec")

    def __init__(self, a: PuiseuxNum, b: PuiseuxNum, spec: PsiSpec):
        if a.e != 1 or b.e != 1:
            raise ValueError("components must be unramified")
        self.a, self.b, self.spec = a, b, spec

    def _gen_sq(self):
        """(c0, c1) with gen² = c0 + c1·gen."""
        K, q = self.a.K, self.a.q
        if self.spec.kind == "even":
            return self.spec.B, PuiseuxNum.const(K, q, 1)
        return PuiseuxNum.theta_power(K, q, -1), PuiseuxNum.zero(K, q)

    def __add__(self, o):
        return QuadExtElem(self.a + o.a, self.b + o.b, self.spec)

    def __sub__(self, o):
        return QuadExtElem(self.a - o.a, self.b - o.b, self.spec)

    def __neg__(self):
        return QuadExtElem(-self.a, -self.b, self.spec)

    def __mul__(self, o):
        if isinstance(o, PuiseuxNum):
            return QuadExtElem(self.a * o, self.b * o, self.spec)
        c0, c1 = self._gen_sq()
        bd = self.b * o.b
        return QuadExtElem(self.a * o.a + bd * c0, self.a * o.b + self.b * o.a + bd * c1, self.spec)

    def __eq__(self, o):
        if not isinstance(o, QuadExtElem):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    __hash__ = None

    def valuation(self) -> Fraction | None:
        """min(val a, val b + val gen); the two never tie since val gen ∉ ℤ."""
        va, vb = self.a.valuation(), self.b.valuation()
        cands = [v for v in (va, None if vb is None else vb + self.spec.gen_valuation()) if v is not None]
        return min(cands) if cands else None

    def in_K_inf(self) -> bool:
        return self.b.is_zero() and self.a.in_base_field()

    def __repr__(self):
        return f"QuadExtElem({self.a!r} + ({self.b!r})·gen)"


def psi_apply(spec: PsiSpec, z: QuadExtElem) -> QuadExtElem:
    if z.spec.variant != spec.variant:
        raise ValueError("element and ψ variant do not match")
    sa, sb = sigma(z.a), sigma(z.b)
    if spec.variant == "even":
        return QuadExtElem(sa + sb, sb, spec)
    if spec.variant == "odd-I":
        return QuadExtElem(sa, -sb, spec)
    return QuadExtElem(sa, sb, spec)


def fixed_field_test(spec: PsiSpec, z: QuadExtElem) -> bool:
    """Membership in Fix(ψ) by the component criteria (not by applying ψ)."""
    a, b = z.a, z.b
    if spec.variant == "even":
        return b.in_base_field() and (a - b.scale(spec.alpha)).in_base_field()
    if spec.variant == "odd-I":
        xi = spec.xi if spec.xi is not None else root_of_minus_one(spec.q, a.K)
        return a.in_base_field() and b.scale(a.K.inv(xi)).in_base_field()
    return a.in_base_field() and b.in_base_field()


def _unramified_trace_norm(a: PuiseuxNum):
    """Trace and norm to K_∞ of a ∈ F_{q²}((1/θ)) via a basis {1, ω} of F_{q²}/F_q."""
    K, q = a.K, a.q
    F = field(q)
    emb = embedding(F, K)
    sub = set(emb)
    omega = next(c for c in range(K.q) if c not in sub)
    # ω² = −N − Tω with T, N ∈ F_q (minimal polynomial by search)
    w2 = K.mul(omega, omega)
    TN = next((t, n) for t in emb for n in emb
              if K.add(K.add(w2, K.mul(t, omega)), n) == 0)
    T, N = TN
    split = {}
    for c0 in emb:
        for c1 in emb:
            split[K.add(c0, K.mul(c1, omega))] = (c0, c1)
    t0, t1 = {}, {}
    for i, c in a.terms().items():
        x0, x1 = split[c]
        if x0:
            t0[i] = x0
        if x1:
            t1[i] = x1
    a0 = PuiseuxNum.from_terms(K, q, a.e, t0, a.prec)
    a1 = PuiseuxNum.from_terms(K, q, a.e, t1, a.prec)
    tr = a0 * 2 - a1.scale(T)
    nr = a0 * a0 - (a0 * a1).scale(T) + (a1 * a1).scale(N)
    return tr, nr


def trace_norm(z0: QuadExtElem):
    """Tr and Nr of z0 over K_∞ from the minimal polynomial of the generator."""
    a, b = z0.a, z0.b
    if b.is_zero():
        if a.in_base_field():
            raise NumericsError("z0 lies in K_∞")
        return _unramified_trace_norm(a)
    if not (a.in_base_field() and b.in_base_field()):
        raise NumericsError("z0 must be K_∞-rational in the generator basis or unramified")
    c0, c1 = z0._gen_sq()       # gen² = c0 + c1·gen, conj(gen) = c1 − gen
    tr = a * 2 + b * c1
    nr = a * a + a * b * c1 - b * b * c0
    return tr, nr


def cm_evaluation_identity(z0: QuadExtElem, psi=None) -> bool:
    """det(ρ)·j(ρ; z0)^{−2} = ψ(z0)/z0 for ρ = [[Tr z0, −Nr z0], [1, 0]], i.e. Nr(z0) = z0·ψ(z0).

    ``psi`` overrides ψ (negative controls).
    """
    _, nr = trace_norm(z0)
    psi = psi or (lambda z: psi_apply(z0.spec, z))
    K, q = z0.a.K, z0.a.q
    lhs = QuadExtElem(nr, PuiseuxNum.zero(K, q), z0.spec)
    return lhs == z0 * psi(z0)
