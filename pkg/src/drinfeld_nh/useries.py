"""Truncated u-series over K with a common denominator.

A series is stored as ``u^val · (Σ_i num[i](θ) u^i) / den(θ)`` with
``num`` a digit array of shape (rows, θ-degree, n) and ``den`` a monic
polynomial.  Coefficients of u^e are known for val ≤ e < prec.

Products go through one Kronecker-packed big-integer multiplication, so the
whole (u, θ, x) convolution runs inside GMP.
"""

from __future__ import annotations

import json
import threading

import numpy as np

from .carlitz import exp_coeffs, reversed_carlitz
from .field import (GF, Poly, RatF, binom_signed_mod_p, format_ratf, parse_ratf)
from .kron import convolve


class PrecisionError(ValueError):
    """Raised when a computation needs more u-adic precision than is available."""


def _fq_mul_vec(F: GF, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Broadcast product of digit vectors (last axis) in F_q."""
    if F.n == 1:
        return (a * b) % F.p
    n = F.n
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (2 * n - 1,)
    out = np.zeros(shape, dtype=np.int64)
    for i in range(n):
        out[..., i:i + n] += a[..., i:i + 1] * b
    return F.reduce(out)


def _batch_divmod(F: GF, arr: np.ndarray, d: Poly):
    """Divide every θ-polynomial in arr (shape (L, D, n)) by monic d."""
    m = d.deg
    L, D, n = arr.shape
    if D <= m:
        return np.zeros((L, 0, n), dtype=np.int64), arr
    r = arr.copy()
    quo = np.zeros((L, D - m, n), dtype=np.int64)
    b = d.c
    for i in range(D - 1, m - 1, -1):
        c = r[:, i, :]
        if c.any():
            quo[:, i - m] = c
            r[:, i - m:i + 1, :] = (r[:, i - m:i + 1, :] - _fq_mul_vec(F, c[:, None, :], b[None, :, :])) % F.p
    return quo, r[:, :m, :]


def _trim_theta(arr: np.ndarray) -> np.ndarray:
    if arr.shape[1] == 0:
        return arr
    nz = np.nonzero(arr.any(axis=(0, 2)))[0]
    return arr[:, : nz[-1] + 1] if len(nz) else arr[:, :0]


class USeries:
    __slots__ = ("F", "num", "den", "val", "prec")

    def __init__(self, F: GF, num: np.ndarray, den: Poly | None = None, val: int = 0,
                 prec: int | None = None, normalize: bool = True):
        num = np.asarray(num, dtype=np.int64)
        if num.ndim != 3:
            raise ValueError("numerator must have shape (rows, θ-degree, n)")
        if prec is None:
            prec = val + num.shape[0]
        rows = prec - val
        if rows < 0:
            rows = 0
            prec = val
        if num.shape[0] > rows:
            num = num[:rows]
        elif num.shape[0] < rows:
            num = np.concatenate([num, np.zeros((rows - num.shape[0],) + num.shape[1:], dtype=np.int64)])
        self.F = F
        self.num = _trim_theta(num)
        self.den = den if den is not None else Poly.const(F, 1)
        self.val = val
        self.prec = prec
        if normalize and self.den.deg > 0:
            self._reduce()

    # -- construction -------------------------------------------------------

    @classmethod
    def from_coeffs(cls, F: GF, coeffs, prec: int | None = None, val: int = 0) -> "USeries":
        """Build from a list of RatF / Poly / int coefficients (exponents val, val+1, ...)."""
        cs = []
        for c in coeffs:
            if isinstance(c, int):
                c = RatF.const(F, F.from_int(c))
            elif isinstance(c, Poly):
                c = RatF(c, reduced=True)
            cs.append(c)
        den = Poly.const(F, 1)
        for c in cs:
            if c.den.deg > 0:
                den = den * (c.den // den.gcd(c.den))
        polys = [c.num * (den // c.den) for c in cs]
        D = max((p.deg + 1 for p in polys), default=0)
        num = np.zeros((len(polys), D, F.n), dtype=np.int64)
        for i, p in enumerate(polys):
            num[i, : p.deg + 1] = p.c
        if prec is None:
            prec = val + len(cs)
        return cls(F, num, den, val, prec)

    @classmethod
    def zero(cls, F: GF, prec: int, val: int = 0) -> "USeries":
        return cls(F, np.zeros((0, 0, F.n), dtype=np.int64), None, val, prec)

    @classmethod
    def const(cls, F: GF, c, prec: int) -> "USeries":
        return cls.from_coeffs(F, [c], prec)

    @classmethod
    def one(cls, F: GF, prec: int) -> "USeries":
        return cls.const(F, 1, prec)

    @classmethod
    def monomial(cls, F: GF, e: int, prec: int, c=1) -> "USeries":
        if e >= prec:
            return cls.zero(F, prec)
        return cls.from_coeffs(F, [0] * e + [c], prec)

    @classmethod
    def u(cls, F: GF, prec: int) -> "USeries":
        return cls.monomial(F, 1, prec)

    @classmethod
    def from_poly_coeffs(cls, F: GF, polys: dict[int, Poly], prec: int) -> "USeries":
        """Sparse constructor {exponent: Poly} for polynomials in u over A."""
        D = max((p.deg + 1 for p in polys.values()), default=0)
        num = np.zeros((prec, D, F.n), dtype=np.int64)
        for e, p in polys.items():
            if 0 <= e < prec and not p.is_zero():
                num[e, : p.deg + 1] = p.c
        return cls(F, num, None, 0, prec)

    # -- basic accessors ----------------------------------------------------

    @property
    def rows(self) -> int:
        return self.prec - self.val

    def _num_poly(self, i: int) -> Poly:
        return Poly(self.F, self.num[i]) if i < self.num.shape[0] else Poly.zero(self.F)

    def coeff(self, e: int) -> RatF:
        if e >= self.prec:
            raise PrecisionError(f"coefficient u^{e} beyond precision {self.prec}")
        if e < self.val:
            return RatF.zero(self.F)
        return RatF(self._num_poly(e - self.val), self.den)

    def __getitem__(self, e: int) -> RatF:
        return self.coeff(e)

    def coeffs(self) -> list[RatF]:
        """Coefficients for exponents val .. prec−1."""
        return [self.coeff(e) for e in range(self.val, self.prec)]

    def is_zero(self) -> bool:
        return not self.num.any()

    def valuation(self) -> int | None:
        """Exponent of the first nonzero coefficient (None if zero to precision)."""
        nz = np.nonzero(self.num.any(axis=(1, 2)))[0]
        return self.val + int(nz[0]) if len(nz) else None

    def leading(self) -> RatF:
        v = self.valuation()
        if v is None:
            raise ValueError("zero series has no leading coefficient")
        return self.coeff(v)

    def truncate(self, prec: int) -> "USeries":
        if prec >= self.prec:
            return self
        return USeries(self.F, self.num[: max(prec - self.val, 0)], self.den, self.val, prec,
                       normalize=False)

    def with_val(self, val: int) -> "USeries":
        """Re-express with a lower starting exponent (pads leading zero rows)."""
        if val > self.val:
            if self.valuation() is not None and self.valuation() < val:
                raise ValueError("cannot raise start exponent above the valuation")
            return USeries(self.F, self.num[val - self.val:], self.den, val, self.prec, normalize=False)
        if val == self.val:
            return self
        pad = np.zeros((self.val - val,) + self.num.shape[1:], dtype=np.int64)
        return USeries(self.F, np.concatenate([pad, self.num]), self.den, val, self.prec, normalize=False)

    # -- denominators -------------------------------------------------------

    def _reduce(self):
        F = self.F
        d = self.den
        if d.deg <= 0 or self.num.size == 0 or not self.num.any():
            if not self.num.any():
                self.den = Poly.const(F, 1)
            return
        quo, rem = _batch_divmod(F, self.num, d)
        if not rem.any():
            self.num = _trim_theta(quo)
            self.den = Poly.const(F, 1)
            return
        g = d
        for i in np.nonzero(rem.any(axis=(1, 2)))[0]:
            g = g.gcd(Poly(F, rem[i]))
            if g.deg == 0:
                return
        # every coefficient is divisible by g
        quo, rem = _batch_divmod(F, self.num, g)
        assert not rem.any()
        self.num = _trim_theta(quo)
        self.den = d // g

    def _scale_num(self, p: Poly) -> np.ndarray:
        """num · p (p ∈ A) as a raw digit array."""
        if p.deg == 0 and p.lead() == 1:
            return self.num
        if p.is_zero() or self.num.size == 0:
            return np.zeros((self.num.shape[0], 0, self.F.n), dtype=np.int64)
        raw = convolve(self.num, p.c[None, :, :], self.F.p - 1)
        return self.F.reduce(raw)

    def _common(self, other: "USeries"):
        """Numerators over a shared denominator, aligned at a shared start and precision."""
        F = self.F
        val = min(self.val, other.val)
        prec = min(self.prec, other.prec)
        a, b = self.with_val(val), other.with_val(val)
        if a.den == b.den:
            den = a.den
            na, nb = a.num, b.num
        else:
            g = a.den.gcd(b.den)
            ca, cb = b.den // g, a.den // g
            den = a.den * ca
            na, nb = a._scale_num(ca), b._scale_num(cb)
        rows = max(prec - val, 0)
        D = max(na.shape[1], nb.shape[1])

        def fit(x):
            out = np.zeros((rows, D, F.n), dtype=np.int64)
            r = min(rows, x.shape[0])
            out[:r, : x.shape[1]] = x[:r]
            return out
        return fit(na), fit(nb), den, val, prec

    # -- ring operations ----------------------------------------------------

    def _lift(self, other):
        if isinstance(other, USeries):
            if other.F != self.F:
                raise ValueError("series over different fields")
            return other
        if isinstance(other, (int, Poly, RatF)):
            return USeries.const(self.F, other, self.prec)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        na, nb, den, val, prec = self._common(other)
        return USeries(self.F, (na + nb) % self.F.p, den, val, prec)

    __radd__ = __add__

    def __neg__(self):
        return USeries(self.F, (-self.num) % self.F.p, self.den, self.val, self.prec, normalize=False)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        na, nb, den, val, prec = self._common(other)
        return USeries(self.F, (na - nb) % self.F.p, den, val, prec)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Poly, RatF)):
            return self.scale(other)
        if not isinstance(other, USeries):
            return NotImplemented
        F = self.F
        val = self.val + other.val
        prec = val + min(self.rows, other.rows)
        rows = prec - val
        if self.num.size == 0 or other.num.size == 0 or rows <= 0:
            return USeries.zero(F, prec, val)
        raw = convolve(self.num, other.num, F.p - 1, trunc=rows)
        den = self.den * other.den if (self.den.deg or other.den.deg) else self.den
        return USeries(F, F.reduce(raw), den, val, prec)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> "USeries":
        F = self.F
        if isinstance(c, int):
            c = RatF.const(F, F.from_int(c))
        elif isinstance(c, Poly):
            c = RatF(c, reduced=True)
        if c.is_zero():
            return USeries.zero(F, self.prec, self.val)
        num = self._scale_num(c.num)
        den = self.den * c.den if c.den.deg > 0 else self.den
        return USeries(F, num, den, self.val, self.prec)

    def scale_fq(self, c: int) -> "USeries":
        """Multiply by the F_q element with code c."""
        return USeries(self.F, self.F.scale(self.num, c), self.den, self.val, self.prec, normalize=False)

    def shift(self, k: int) -> "USeries":
        """Multiply by u^k (k may be negative)."""
        return USeries(self.F, self.num, self.den, self.val + k, self.prec + k, normalize=False)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        if result is None:
            return USeries.one(self.F, self.prec - self.val if self.val >= 0 else self.prec)
        return result

    def inverse(self) -> "USeries":
        """Inverse of a series with a nonzero leading term (Laurent shift allowed)."""
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError("series is zero to working precision")
        F = self.F
        f = self.with_val(v).shift(-v)
        c0 = f.coeff(0)
        if not (c0.num.deg == 0 and c0.den.deg == 0):
            f = f.scale(c0.inv())
        else:
            c0inv = F.inv(c0.num.lead())
            f = f.scale_fq(c0inv)
        N = f.prec
        g = USeries.one(F, 1)
        k = 1
        while k < N:
            k = min(2 * k, N)
            fk = f.truncate(k)
            gk = USeries(F, g.num, g.den, 0, k, normalize=False)
            e = USeries.one(F, k) - fk * gk
            g = gk + gk * e
        if not (c0.num.deg == 0 and c0.den.deg == 0):
            g = g.scale(c0.inv())
        else:
            g = g.scale_fq(c0inv)
        return g.shift(-v)

    def __truediv__(self, other):
        if isinstance(other, (int, Poly, RatF)):
            if isinstance(other, int):
                other = RatF.const(self.F, self.F.from_int(other))
            elif isinstance(other, Poly):
                other = RatF(other, reduced=True)
            return self.scale(other.inv())
        return self * other.inverse()

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        na, nb, _, _, _ = self._common(other)
        return bool((na == nb).all())

    def __hash__(self):
        raise TypeError("USeries is unhashable")

    def frob(self, k: int = 1, prec: int | None = None) -> "USeries":
        """f^{q^k}: θ ↦ θ^{q^k} on coefficients and u^e ↦ u^{e q^k}."""
        F = self.F
        s = F.q ** k
        val = self.val * s
        full = self.val * s + self.rows * s
        prec = full if prec is None else min(prec, full)
        rows = max(prec - val, 0)
        D = self.num.shape[1]
        out = np.zeros((rows, (D - 1) * s + 1 if D else 0, F.n), dtype=np.int64)
        src = self.num[: (rows + s - 1) // s]
        if D:
            out[: src.shape[0] * s: s, ::s] = src
        return USeries(F, out, self.den.frob_theta(k), val, prec, normalize=False)

    def derivative_u(self) -> "USeries":
        """d/du, exponent by exponent."""
        F = self.F
        e = np.arange(self.val, self.prec, dtype=np.int64)[: self.num.shape[0]]
        num = (self.num * (e % F.p)[:, None, None]) % F.p
        return USeries(F, num, self.den, self.val, self.prec).shift(-1)

    def compose(self, s: "USeries", prec: int) -> "USeries":
        """Σ f_e s^e for a polynomial f (this series read as exact up to its precision)."""
        F = self.F
        if self.val < 0:
            raise ValueError("compose needs a power series")
        sv = s.valuation()
        if sv is not None and sv < 1:
            raise ValueError("substituted series must have positive valuation")
        out = USeries.zero(F, prec)
        powr = USeries.one(F, prec)
        for e in range(self.prec):
            if e:
                powr = (powr * s).truncate(prec)
            if powr.is_zero() and e:
                break
            c = self.coeff(e)
            if not c.is_zero():
                out = out + powr.scale(c)
        return out

    # -- text and JSON ------------------------------------------------------

    def to_json(self) -> dict:
        d = {"var": "u", "prec": self.prec, "coeffs": [format_ratf(c) for c in self.coeffs()]}
        if self.val:
            d["val"] = self.val
        return d

    @classmethod
    def from_json(cls, F: GF, data) -> "USeries":
        if isinstance(data, str):
            data = json.loads(data)
        coeffs = [parse_ratf(F, c) for c in data["coeffs"]]
        return cls.from_coeffs(F, coeffs, data["prec"], data.get("val", 0))

    def __repr__(self):
        shown = []
        for e in range(self.val, min(self.prec, self.val + 6)):
            c = self.coeff(e)
            if not c.is_zero():
                shown.append(f"({format_ratf(c)})*u^{e}")
        body = " + ".join(shown) if shown else "0"
        return f"USeries[{self.F.q}]({body} + O(u^{self.prec}))"


# ---------------------------------------------------------------------------
# hyperderivatives


class _EpsTable:
    """Coefficients e[m][n] = [ε^n] ẽ(ε)^m with ẽ(ε) = Σ ε^{q^i}/D_i."""

    def __init__(self):
        self._lock = threading.RLock()
        self._tabs: dict = {}

    def get(self, F: GF, nmax: int) -> list[list[RatF]]:
        key = (F.p, F.n)
        tab = self._tabs.get(key)
        if tab is not None and len(tab[0]) > nmax:
            return tab
        with self._lock:
            tab = self._tabs.get(key)
            if tab is not None and len(tab[0]) > nmax:
                return tab
            size = max(2 * nmax + 2, 8)
            et = sorted(exp_coeffs(F, size).items())
            rows = [[RatF.one(F)] + [RatF.zero(F)] * (size - 1)]
            for m in range(1, size):
                prev = rows[-1]
                cur = [RatF.zero(F)] * size
                for i, a in enumerate(prev):
                    if a.is_zero():
                        continue
                    for j, c in et:
                        if i + j < size:
                            cur[i + j] = cur[i + j] + a * c
                rows.append(cur)
            self._tabs[key] = rows
            return rows


_EPS = _EpsTable()


def eps_coeff(F: GF, m: int, n: int) -> RatF:
    """[ε^n] ẽ(ε)^m."""
    return _EPS.get(F, n)[m][n]


def hyper(n: int, f: USeries) -> USeries:
    """The n-th normalized hyperderivative ∂ⁿf.

    Uses u(z+ε) = u/(1 + u·ẽ(ε)), so that
    ∂ⁿ(u^j) = Σ_m binom(−j, m)·[εⁿ]ẽ^m·u^{j+m}.  The coefficient of u^t in
    ∂ⁿf only involves coefficients of f at exponents ≤ t, hence the result
    keeps the full precision of f.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    if n == 0:
        return f
    F = f.F
    p = F.p
    exps = np.arange(f.val, f.prec, dtype=np.int64)[: f.num.shape[0]]
    terms = []
    for m in range(1, n + 1):
        if (n - m) % (F.q - 1):
            continue
        c = eps_coeff(F, m, n)
        if c.is_zero():
            continue
        w = np.array([binom_signed_mod_p(-int(j), m, p) for j in exps], dtype=np.int64)
        if not w.any():
            continue
        part = USeries(F, (f.num * w[:, None, None]) % p, f.den, f.val, f.prec, normalize=False)
        terms.append(part.shift(m).truncate(f.prec).scale(c))
    out = USeries.zero(F, f.prec, f.val)
    for t in terms:
        out = out + t
    return out


def hyper_first_oracle(f: USeries) -> USeries:
    """∂¹f = −u²·df/du, the classical first-derivative shortcut."""
    return -(f.derivative_u() * USeries.monomial(f.F, 2, f.prec + 1))


def goss(F: GF, k: int) -> USeries:
    """𝒢_k = (−1)^{k−1} ∂^{k−1}(u) as a polynomial in u (exact up to u^k)."""
    if k < 1:
        raise ValueError("k must be positive")
    g = hyper(k - 1, USeries.u(F, k + 1))
    return g if (k - 1) % 2 == 0 else -g


# ---------------------------------------------------------------------------
# u(az)


def reversed_series(a: Poly, prec: int) -> USeries:
    rc = reversed_carlitz(a)
    return USeries.from_poly_coeffs(a.F, {e: c for e, c in rc.terms}, prec)


def u_of_az(a: Poly, prec: int) -> USeries:
    """u(az) = u^{|a|}/𝔠_a(u) to precision ``prec``."""
    if a.is_zero() or not a.is_monic():
        raise ValueError("u(az) is computed for monic a only")
    F = a.F
    top = a.norm()
    if top >= prec:
        return USeries.zero(F, prec)
    rc = reversed_carlitz(a)
    nontrivial = [e for e, _ in rc.terms if e > 0]
    if not nontrivial or top + min(nontrivial) >= prec:
        return USeries.monomial(F, top, prec)
    inv = reversed_series(a, prec - top).inverse()
    return inv.shift(top)


def subst_uaz(f: USeries, a: Poly, prec: int | None = None) -> USeries:
    """f(u(az)) for a polynomial (or truncated) series f and monic a."""
    if prec is None:
        prec = f.prec * a.norm()
    return f.compose(u_of_az(a, prec), prec)
