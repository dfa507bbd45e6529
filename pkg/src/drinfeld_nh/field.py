"""Finite fields F_{p^n}, the polynomial ring A = F_q[θ] and its fraction field K.

Field elements are small integers ("codes"): the code of Σ d_i x^i is Σ d_i p^i,
where x is a root of the field's modulus.  Array-level code works on digit
vectors instead (last axis of length n), which is what the Kronecker products
in :mod:`drinfeld_nh.kron` consume.
"""

from __future__ import annotations

import itertools
import math
import re
from functools import lru_cache

import gmpy2
import numpy as np

from .kron import convolve


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(math.isqrt(p)) + 1))


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, n) with q = p^n, or raise ValueError."""
    for p in range(2, q + 1):
        if q % p == 0:
            n, r = 0, q
            while r % p == 0:
                r //= p
                n += 1
            if r != 1 or not is_prime(p):
                break
            return p, n
    raise ValueError(f"{q} is not a prime power")


def _polymulmod(a, b, mod, p):
    """Multiply digit lists a, b modulo the monic polynomial ``mod`` over F_p."""
    n = len(mod) - 1
    res = [0] * (2 * n)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                res[i + j] = (res[i + j] + x * y) % p
    for d in range(2 * n - 1, n - 1, -1):
        c = res[d]
        if c:
            for i in range(n + 1):
                res[d - n + i] = (res[d - n + i] - c * mod[i]) % p
    return res[:n]


class GF:
    """The field F_{p^n} with a primitive modulus chosen deterministically.

    The modulus is the first monic primitive polynomial of degree n when
    candidates are enumerated by the integer Σ c_i p^i of their lower
    coefficients, so x is always a generator of the multiplicative group.
    """

    def __init__(self, p: int, n: int = 1):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p ** n > 2 ** 16:
            raise ValueError("field too large for table arithmetic")
        self.p, self.n, self.q = p, n, p ** n
        q = self.q
        self.pw = [p ** i for i in range(n)]
        self.digits = np.array([[(c // p ** i) % p for i in range(n)] for c in range(q)],
                               dtype=np.int64).reshape(q, n)
        self.modulus, self.exp = self._find_modulus()
        self.log = [-1] * q
        for i, c in enumerate(self.exp):
            self.log[c] = i
        self._add = None
        if q <= 256:
            d = self.digits
            tab = ((d[:, None, :] + d[None, :, :]) % p) @ np.array(self.pw)
            self._add = tab.tolist()
        self.neg_one = self.neg(1)

    def _find_modulus(self):
        p, n, q = self.p, self.n, self.q
        for low in range(p ** n):
            if n > 1 and low % p == 0:
                continue
            mod = [(low // p ** i) % p for i in range(n)] + [1]
            x = [0] * n
            if n == 1:
                x[0] = (-mod[0]) % p
            else:
                x[1] = 1
            cur = [1] + [0] * (n - 1)
            seen = []
            ok = True
            for _ in range(q - 1):
                code = sum(c * w for c, w in zip(cur, self.pw))
                if code == 0 or (seen and code == 1):
                    ok = False
                    break
                seen.append(code)
                cur = _polymulmod(cur, x, mod, p)
            if ok and sum(c * w for c, w in zip(cur, self.pw)) == 1 and len(set(seen)) == q - 1:
                return mod, seen
        raise RuntimeError("no primitive polynomial found")

    def __repr__(self):
        return f"GF({self.p}^{self.n})"

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    # scalar arithmetic on codes
    def add(self, a: int, b: int) -> int:
        if self._add is not None:
            return self._add[a][b]
        if self.p == 2:
            return a ^ b
        return int(((self.digits[a] + self.digits[b]) % self.p) @ self.pw)

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        return int(((-self.digits[a]) % self.p) @ self.pw)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e > 0 else 1
        return self.exp[(self.log[a] * e) % (self.q - 1)]

    def frob(self, a: int, k: int = 1) -> int:
        """a^(p^k)."""
        return self.pow(a, self.p ** k)

    def from_int(self, c: int) -> int:
        """Image of the integer c in the prime field."""
        return c % self.p

    def elements(self):
        return range(self.q)

    def trace_to_prime(self, a: int) -> int:
        s, x = 0, a
        for _ in range(self.n):
            s = self.add(s, x)
            x = self.frob(x)
        return s

    # digit-vector arithmetic
    def vec(self, a: int) -> np.ndarray:
        return self.digits[a]

    def code(self, v) -> int:
        return int(np.asarray(v) % self.p @ self.pw)

    def codes(self, arr: np.ndarray) -> np.ndarray:
        return (np.asarray(arr) % self.p) @ np.array(self.pw, dtype=np.int64)

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        """Reduce the last axis (polynomial in x of any length) mod p and mod the modulus."""
        arr = np.asarray(arr, dtype=np.int64) % self.p
        n = self.n
        L = arr.shape[-1]
        if L <= n:
            if L == n:
                return arr
            pad = [(0, 0)] * (arr.ndim - 1) + [(0, n - L)]
            return np.pad(arr, pad)
        arr = arr.copy()
        mod = np.array(self.modulus[:n], dtype=np.int64)
        for d in range(L - 1, n - 1, -1):
            c = arr[..., d]
            if c.any():
                arr[..., d - n:d] -= c[..., None] * mod
                arr[..., d - n:d] %= self.p
        return arr[..., :n]

    def scale(self, arr: np.ndarray, c: int) -> np.ndarray:
        """Multiply every digit vector of ``arr`` by the field element c."""
        if c == 1:
            return arr
        if c == 0:
            return np.zeros_like(arr)
        if self.n == 1:
            return (arr * c) % self.p
        v = self.digits[c]
        out = np.zeros(arr.shape[:-1] + (2 * self.n - 1,), dtype=np.int64)
        for i, d in enumerate(v):
            if d:
                out[..., i:i + self.n] += d * arr
        return self.reduce(out)


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    p, n = prime_power(q)
    return GF(p, n)


@lru_cache(maxsize=None)
def embedding(small: GF, big: GF) -> tuple[int, ...]:
    """Codes in ``big`` of the elements of ``small`` (an F_p-algebra embedding)."""
    if small.p != big.p or big.n % small.n:
        raise ValueError("no embedding")
    step = (big.q - 1) // (small.q - 1)
    mod = small.modulus
    for k in range(small.q - 1):
        y = big.exp[(k * step) % (big.q - 1)]
        acc, yp = 0, 1
        for c in mod:
            acc = big.add(acc, big.mul(big.from_int(c), yp))
            yp = big.mul(yp, y)
        if acc == 0:
            table = []
            for c in range(small.q):
                acc, yp = 0, 1
                for d in small.digits[c]:
                    acc = big.add(acc, big.mul(big.from_int(int(d)), yp))
                    yp = big.mul(yp, y)
                table.append(acc)
            return tuple(table)
    raise RuntimeError("embedding not found")


# ---------------------------------------------------------------------------
# A = F_q[θ]


class Poly:
    """Polynomial in θ over F_q, stored as digit array of shape (deg+1, n)."""

    __slots__ = ("F", "c")

    def __init__(self, F: GF, arr):
        arr = np.asarray(arr, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, F.n)
        nz = np.nonzero(arr.any(axis=1))[0]
        self.F = F
        self.c = arr[: nz[-1] + 1] if len(nz) else arr[:0]

    @classmethod
    def from_codes(cls, F: GF, codes) -> "Poly":
        codes = list(codes)
        if not codes:
            return cls(F, np.zeros((0, F.n), dtype=np.int64))
        return cls(F, F.digits[np.asarray(codes, dtype=np.int64)])

    @classmethod
    def const(cls, F: GF, c: int) -> "Poly":
        return cls.from_codes(F, [c])

    @classmethod
    def theta(cls, F: GF, e: int = 1) -> "Poly":
        return cls.from_codes(F, [0] * e + [1])

    @classmethod
    def zero(cls, F: GF) -> "Poly":
        return cls.from_codes(F, [])

    def codes(self) -> list[int]:
        return [int(x) for x in self.F.codes(self.c)] if len(self.c) else []

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return len(self.c) == 0

    def lead(self) -> int:
        return self.F.code(self.c[-1]) if len(self.c) else 0

    def coeff(self, i: int) -> int:
        return self.F.code(self.c[i]) if 0 <= i < len(self.c) else 0

    def norm(self) -> int:
        """|a| = q^deg a."""
        return self.F.q ** self.deg if not self.is_zero() else 0

    def is_monic(self) -> bool:
        return self.lead() == 1

    def is_const(self) -> bool:
        return len(self.c) <= 1

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.F, other) if other else Poly.zero(self.F)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.c.shape == other.c.shape and bool((self.c == other.c).all())

    def __hash__(self):
        return hash((self.F.p, self.F.n, self.c.tobytes()))

    def _lift(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, int):
            return Poly.const(self.F, self.F.from_int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        L = max(len(self.c), len(other.c))
        out = np.zeros((L, self.F.n), dtype=np.int64)
        out[: len(self.c)] += self.c
        out[: len(other.c)] += other.c
        return Poly(self.F, out % self.F.p)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.F, (-self.c) % self.F.p)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(self.F.from_int(other))
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.F)
        F = self.F
        raw = convolve(self.c, other.c, F.p - 1)
        return Poly(F, F.reduce(raw))

    __rmul__ = __mul__

    def scale(self, c: int) -> "Poly":
        """Multiply by the field element with code c."""
        return Poly(self.F, self.F.scale(self.c, c))

    def __pow__(self, e: int):
        result = Poly.const(self.F, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def frob_theta(self, k: int) -> "Poly":
        """a(θ^{q^k}) = a^{q^k} for a ∈ A."""
        if k == 0 or self.deg <= 0:
            return self
        step = self.F.q ** k
        out = np.zeros((self.deg * step + 1, self.F.n), dtype=np.int64)
        out[::step] = self.c
        return Poly(self.F, out)

    def shift(self, e: int) -> "Poly":
        if self.is_zero():
            return self
        return Poly(self.F, np.vstack([np.zeros((e, self.F.n), dtype=np.int64), self.c]))

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.F
        r = self.c.copy()
        dq = self.deg - other.deg
        if dq < 0:
            return Poly.zero(F), self
        inv = F.inv(other.lead())
        b = F.scale(other.c, inv)  # monic divisor
        quo = np.zeros((dq + 1, F.n), dtype=np.int64)
        m = other.deg
        for i in range(dq, -1, -1):
            cvec = r[i + m]
            if cvec.any():
                c = F.code(cvec)
                quo[i] = cvec
                r[i:i + m + 1] = (r[i:i + m + 1] - F.scale(b, c)) % F.p
        qpoly = Poly(F, quo).scale(inv)
        return qpoly, Poly(F, r[:m] if m > 0 else r[:0])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.F.inv(self.lead()))

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __call__(self, x: int) -> int:
        F = self.F
        acc = 0
        for c in reversed(self.codes()):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def __repr__(self):
        return f"Poly({format_poly(self)})"

    def __str__(self):
        return format_poly(self)


def _fmt_elem(F: GF, c: int) -> str:
    if F.n == 1:
        return str(c)
    return "[" + ",".join(str(int(d)) for d in F.digits[c]) + "]"


def format_poly(a: Poly) -> str:
    """Sparse text form "c*θ^e + ..." in decreasing degree; "0" for zero."""
    if a.is_zero():
        return "0"
    codes = a.codes()
    terms = [f"{_fmt_elem(a.F, c)}*θ^{e}" for e, c in reversed(list(enumerate(codes))) if c]
    return " + ".join(terms)


_TERM = re.compile(r"^\s*(\[[0-9,\s]*\]|-?\d+)\s*\*\s*θ\^(\d+)\s*$")


def parse_poly(F: GF, text: str) -> Poly:
    text = text.strip()
    if text == "0":
        return Poly.zero(F)
    acc: dict[int, int] = {}
    for term in text.split("+"):
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"malformed polynomial term: {term!r}")
        cs, e = m.group(1), int(m.group(2))
        if cs.startswith("["):
            ds = [int(x) for x in cs[1:-1].split(",") if x.strip()]
            if len(ds) != F.n:
                raise ValueError(f"expected {F.n} digits in {cs}")
            c = F.code(ds)
        else:
            c = F.from_int(int(cs))
        acc[e] = F.add(acc.get(e, 0), c)
    top = max(acc) if acc else -1
    return Poly.from_codes(F, [acc.get(i, 0) for i in range(top + 1)])


# ---------------------------------------------------------------------------
# K = F_q(θ)


class RatF:
    """Reduced fraction num/den with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduced: bool = False):
        F = num.F
        if den is None:
            den = Poly.const(F, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not reduced:
            if num.is_zero():
                den = Poly.const(F, 1)
            else:
                g = num.gcd(den)
                if g.deg > 0:
                    num, den = num // g, den // g
                lc = den.lead()
                if lc != 1:
                    inv = F.inv(lc)
                    num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @property
    def F(self) -> GF:
        return self.num.F

    @classmethod
    def const(cls, F: GF, c: int) -> "RatF":
        return cls(Poly.const(F, c) if c else Poly.zero(F), reduced=True)

    @classmethod
    def zero(cls, F: GF) -> "RatF":
        return cls(Poly.zero(F), reduced=True)

    @classmethod
    def one(cls, F: GF) -> "RatF":
        return cls.const(F, 1)

    @classmethod
    def theta(cls, F: GF, e: int = 1) -> "RatF":
        return cls(Poly.theta(F, e), reduced=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.deg == 0

    def _lift(self, other):
        if isinstance(other, RatF):
            return other
        if isinstance(other, Poly):
            return RatF(other, reduced=True)
        if isinstance(other, int):
            return RatF.const(self.F, self.F.from_int(other))
        return NotImplemented

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((hash(self.num), hash(self.den)))

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RatF(self.num + other.num, self.den)
        return RatF(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatF(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return RatF(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inv(self) -> "RatF":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in K")
        return RatF(self.den, self.num)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inv()

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return RatF(self.num ** e, self.den ** e, reduced=True)

    def frob_theta(self, k: int) -> "RatF":
        return RatF(self.num.frob_theta(k), self.den.frob_theta(k), reduced=True)

    def __repr__(self):
        return f"RatF({format_ratf(self)})"

    def __str__(self):
        return format_ratf(self)


def format_ratf(x: RatF) -> str:
    if x.den.deg == 0:
        return format_poly(x.num)
    return f"({format_poly(x.num)}) / ({format_poly(x.den)})"


def parse_ratf(F: GF, text: str) -> RatF:
    text = text.strip()
    if "/" in text:
        a, b = text.split("/", 1)
        return RatF(parse_poly(F, a.strip().strip("()")), parse_poly(F, b.strip().strip("()")))
    return RatF(parse_poly(F, text))


# ---------------------------------------------------------------------------
# integer binomials and enumeration


def binom_big(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ValueError("binom_big expects nonnegative arguments")
    return int(gmpy2.comb(n, k))


def binom_mod_p(n: int, k: int, p: int) -> int:
    """binom(n, k) mod p by Lucas' theorem (digit-wise in base p)."""
    if k < 0 or n < 0 or k > n:
        return 0
    r = 1
    while n or k:
        a, b = n % p, k % p
        if b > a:
            return 0
        r = r * math.comb(a, b) % p
        n //= p
        k //= p
    return r


def binom_signed_mod_p(n: int, k: int, p: int) -> int:
    """binom(n, k) mod p for any integer n (negative n via upper negation)."""
    if k < 0:
        return 0
    if n >= 0:
        return binom_mod_p(n, k, p)
    return (-1) ** k * binom_mod_p(k - n - 1, k, p) % p


def monic_polys(F: GF, d: int) -> list[Poly]:
    """All q^d monic polynomials of degree d, lower coefficients in code order."""
    out = []
    for low in itertools.product(range(F.q), repeat=d):
        out.append(Poly.from_codes(F, list(reversed(low)) + [1]))
    return out
