"""Generators E, g̃, Δ̃, h̃ of the quasi-modular algebra, graded polynomials in
them, membership testing and the formal slash model.

Every stored expansion is the π̃-rescaled one (weights: E ↦ 1, g ↦ q−1,
Δ ↦ q²−1, h ↦ q+1), so all coefficients lie in K.
"""

from __future__ import annotations

import json
import threading

import numpy as np

from .carlitz import bracket, zeta_norm
from .field import GF, Poly, RatF, binom_mod_p, binom_signed_mod_p, format_ratf, monic_polys, parse_ratf
from .useries import PrecisionError, USeries, goss, hyper, u_of_az


class InconsistentTruncation(ValueError):
    """The solving rows of a membership system fit, the verification rows do not."""


class GeneratorError(RuntimeError):
    """Internal consistency of the generator pipeline failed."""


# ---------------------------------------------------------------------------
# generator pipeline


def monic_upto(F: GF, prec: int):
    """Monic a with |a| < prec, by increasing degree."""
    d = 0
    while F.q ** d < prec:
        yield from monic_polys(F, d)
        d += 1


class GeneratorTable:
    """Write-once memo of the generator expansions for one (q, precision)."""

    def __init__(self, F: GF, prec: int):
        if prec < F.q ** 2:
            raise PrecisionError(f"generator pipeline needs precision ≥ q² = {F.q ** 2}")
        self.F = F
        self.prec = prec
        # working precision absorbs the valuation shifts of the h̃ root and j
        self.work = prec + F.q
        self._lock = threading.RLock()
        self._cache: dict = {}
        self.diagnostics: dict = {}

    def _get(self, key, build):
        val = self._cache.get(key)
        if val is None:
            with self._lock:
                val = self._cache.get(key)
                if val is None:
                    val = build()
                    self._cache[key] = val
        return val

    # u(az) for all monic a, and power sums Σ_a u(az)^j
    def _power_sums(self):
        def build():
            F, N = self.F, self.work
            jmax = F.q ** 2 - 1
            sums = {j: USeries.zero(F, N) for j in range(1, jmax + 1)}
            eis = USeries.zero(F, N)
            for a in monic_upto(F, N):
                ua = u_of_az(a, N)
                eis = eis + ua.scale(a)
                pw = ua
                for j in range(1, jmax + 1):
                    if pw.is_zero():
                        break
                    sums[j] = sums[j] + pw
                    if j < jmax:
                        pw = pw * ua
            return eis, sums
        return self._get("power_sums", build)

    def E(self) -> USeries:
        return self._power_sums()[0].truncate(self.prec)

    def eisenstein(self, k: int) -> USeries:
        """Ê_k = −ζ̃(k) − Σ_{a monic} 𝒢_k(u(az))."""
        F = self.F
        if k % (F.q - 1) or k < 1:
            raise ValueError("normalized Eisenstein series need (q−1) | k")
        if k > F.q ** 2 - 1:
            raise ValueError("only weights up to q²−1 are tabulated")

        def build():
            sums = self._power_sums()[1]
            G = goss(F, k)
            out = USeries.const(F, -zeta_norm(F, k), self.work)
            for j in range(1, k + 1):
                c = G.coeff(j)
                if not c.is_zero():
                    out = out - sums[j].scale(c)
            return out
        return self._get(("eis", k), build).truncate(self.prec)

    def _exp_coeffs(self):
        """T_n = [V^n] 1/(1 − Σ_t Ê_{t(q−1)} V^t), n ≤ q+1, with V = W^{q−1}."""
        def build():
            F, q = self.F, self.F.q
            T = [USeries.one(F, self.work)]
            for n in range(1, q + 2):
                acc = USeries.zero(F, self.work)
                for t in range(1, n + 1):
                    acc = acc + self.eisenstein(t * (q - 1)) * T[n - t]
                T.append(acc)
            self.diagnostics["nonlinear_exp_terms_vanish"] = all(T[n].is_zero() for n in range(2, q + 1))
            if not self.diagnostics["nonlinear_exp_terms_vanish"]:
                raise GeneratorError("normalized exponential has non-q-power terms")
            return T
        return self._get("T", build)

    def g(self) -> USeries:
        def build():
            T = self._exp_coeffs()
            return T[1].scale(bracket(self.F, 1))
        return self._get("g", build).truncate(self.prec)

    def delta(self) -> USeries:
        def build():
            F, q = self.F, self.F.q
            T = self._exp_coeffs()
            return T[q + 1].scale(bracket(F, 2)) - (T[1] ** (q + 1)).scale(bracket(F, 1))
        return self._get("delta", build).truncate(self.prec)

    def _full_delta(self) -> USeries:
        self.delta()
        return self._cache["delta"]

    def h(self) -> USeries:
        def build():
            F, q = self.F, self.F.q
            D = self._full_delta()
            lead = D.coeff(q - 1)
            if lead != RatF.const(F, F.neg_one):
                raise GeneratorError("leading coefficient of Δ̃ is not −1")
            unit = (-D).with_val(q - 1).shift(-(q - 1))  # 1 + w
            N = unit.prec
            prod = unit
            i = 1
            while q ** i < N:
                prod = prod * unit.frob(i, N)
                i += 1
            root = prod.inverse()  # (1+w)^{1/(q−1)}
            return (-root).shift(1)
        return self._get("h", build).truncate(self.prec)

    def j(self) -> USeries:
        def build():
            q = self.F.q
            self.g()
            return self._cache["g"] ** (q + 1) / self._full_delta()
        return self._get("j", build).truncate(self.prec)

    def gen(self, name: str) -> USeries:
        return {"E": self.E, "g": self.g, "h": self.h, "delta": self.delta, "j": self.j}[name]()

    def power(self, name: str, e: int) -> USeries:
        def build():
            if e == 0:
                return USeries.one(self.F, self.prec)
            if e == 1:
                return self.gen(name)
            half = self.power(name, e // 2)
            sq = half * half
            return sq * self.gen(name) if e % 2 else sq
        return self._get(("pow", name, e), build)

    def monomial(self, a: int, b: int, c: int, prec: int) -> USeries:
        """g^a h^b E^c to precision prec."""
        def build():
            s = None
            for name, k in (("g", a), ("h", b), ("E", c)):
                if k:
                    t = self.power(name, k)
                    s = t if s is None else s * t
            return s if s is not None else USeries.one(self.F, self.prec)
        return self._get(("mon", a, b, c), build).truncate(prec)


_TABLES: dict = {}
_TABLES_LOCK = threading.Lock()


def generators(F: GF, prec: int) -> GeneratorTable:
    """Shared GeneratorTable for q with precision at least prec.

    An existing table of higher precision is reused; callers truncate.
    """
    prec = max(prec, F.q ** 2)
    with _TABLES_LOCK:
        tabs = _TABLES.setdefault((F.p, F.n), {})
        fit = [p for p in tabs if p >= prec]
        if fit:
            return tabs[min(fit)]
        tab = tabs[prec] = GeneratorTable(F, prec)
    return tab


def false_eisenstein(F: GF, prec: int) -> USeries:
    """E = Σ_{a monic} a·u(az)."""
    if prec < F.q ** 2:
        out = USeries.zero(F, prec)
        for a in monic_upto(F, prec):
            out = out + u_of_az(a, prec).scale(a)
        return out
    return generators(F, prec).E().truncate(prec)


def eisenstein_norm(F: GF, k: int, prec: int) -> USeries:
    if k % (F.q - 1):
        raise ValueError("(q−1) must divide k")
    return generators(F, prec).eisenstein(k).truncate(prec)


def _need_q2(F: GF, prec: int):
    if prec < F.q ** 2:
        raise PrecisionError(f"generator extraction needs precision ≥ q² = {F.q ** 2}")


def generator_g(F: GF, prec: int) -> USeries:
    _need_q2(F, prec)
    return generators(F, prec).g().truncate(prec)


def generator_delta(F: GF, prec: int) -> USeries:
    _need_q2(F, prec)
    return generators(F, prec).delta().truncate(prec)


def generator_h(F: GF, prec: int) -> USeries:
    _need_q2(F, prec)
    return generators(F, prec).h().truncate(prec)


def j_invariant(F: GF, prec: int) -> USeries:
    _need_q2(F, prec)
    return generators(F, prec).j().truncate(prec)


# ---------------------------------------------------------------------------
# graded polynomials in g, h, E (plus Y and the slash variable X)

VARS = ("g", "h", "E", "Y", "X")


def monomial_weight(q: int, exps) -> int:
    a, b, c, y, x = exps
    return (q - 1) * a + (q + 1) * b + 2 * (c + y + x)


def monomial_type(q: int, exps) -> int:
    a, b, c, y, x = exps
    return (b + c + y + x) % (q - 1)


class GradedForm:
    """Homogeneous polynomial in g, h, E, Y, X with coefficients in K.

    Keys are exponent 5-tuples (g, h, E, Y, X).  Weight and type are those
    of every monomial; mixing weights raises ValueError.
    """

    __slots__ = ("F", "terms", "weight", "type")

    def __init__(self, F: GF, terms: dict, weight: int | None = None, type_: int | None = None):
        q = F.q
        clean = {}
        for e, c in terms.items():
            e = tuple(e) + (0,) * (5 - len(e))
            if isinstance(c, int):
                c = RatF.const(F, F.from_int(c))
            elif isinstance(c, Poly):
                c = RatF(c, reduced=True)
            if not c.is_zero():
                clean[e] = clean[e] + c if e in clean else c
                if clean[e].is_zero():
                    del clean[e]
        ws = {monomial_weight(q, e) for e in clean}
        ts = {monomial_type(q, e) for e in clean}
        if len(ws) > 1 or len(ts) > 1:
            raise ValueError("graded form mixes weights or types")
        if clean:
            w, t = ws.pop(), ts.pop()
            if weight is not None and weight != w:
                raise ValueError(f"monomials have weight {w}, not {weight}")
            if type_ is not None and type_ % (q - 1) != t:
                raise ValueError(f"monomials have type {t}, not {type_}")
            weight, type_ = w, t
        self.F = F
        self.terms = clean
        self.weight = 0 if weight is None else weight
        self.type = 0 if type_ is None else type_ % (q - 1)

    @classmethod
    def gen(cls, F: GF, name: str, power: int = 1) -> "GradedForm":
        e = [0] * 5
        e[VARS.index(name)] = power
        return cls(F, {tuple(e): 1})

    @classmethod
    def monomial(cls, F: GF, a=0, b=0, c=0, y=0, x=0, coeff=1) -> "GradedForm":
        return cls(F, {(a, b, c, y, x): coeff})

    @classmethod
    def zero(cls, F: GF, weight: int = 0, type_: int = 0) -> "GradedForm":
        return cls(F, {}, weight, type_)

    @classmethod
    def const(cls, F: GF, c) -> "GradedForm":
        return cls(F, {(0, 0, 0, 0, 0): c})

    def degree(self, var: str) -> int:
        i = VARS.index(var)
        return max((e[i] for e in self.terms), default=0)

    @property
    def depth(self) -> int:
        return self.degree("E")

    def is_zero(self) -> bool:
        return not self.terms

    def _lift(self, other):
        if isinstance(other, GradedForm):
            return other
        if isinstance(other, (int, Poly, RatF)):
            return GradedForm.const(self.F, other)
        return NotImplemented

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms and (
            not self.terms or (self.weight, self.type) == (other.weight, other.type))

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return GradedForm(self.F, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedForm(self.F, {e: -c for e, c in self.terms.items()}, self.weight, self.type)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                c = c1 * c2
                terms[e] = terms[e] + c if e in terms else c
        q = self.F.q
        if not terms:
            return GradedForm.zero(self.F, self.weight + other.weight, (self.type + other.type) % (q - 1))
        return GradedForm(self.F, terms)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = GradedForm.const(self.F, 1)
        for _ in range(e):
            out = out * self
        return out

    def scale(self, c) -> "GradedForm":
        return self * GradedForm.const(self.F, c)

    def coefficient_in(self, var: str, k: int) -> "GradedForm":
        """Coefficient of var^k, as a graded form in the remaining variables."""
        i = VARS.index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i] == k:
                e2 = list(e)
                e2[i] = 0
                terms[tuple(e2)] = c
        return GradedForm(self.F, terms)

    def substitute(self, images: dict) -> "GradedForm":
        """Replace variables by graded forms (missing variables stay)."""
        out = GradedForm.zero(self.F, self.weight, self.type)
        cache: dict = {}

        def powr(v, k):
            key = (v, k)
            if key not in cache:
                cache[key] = images[v] ** k if v in images else GradedForm.gen(self.F, v, k)
            return cache[key]
        for e, c in self.terms.items():
            term = GradedForm.const(self.F, c)
            for v, k in zip(VARS, e):
                if k:
                    term = term * powr(v, k)
            out = out + term
        return out

    def expand(self, prec: int) -> USeries:
        """Evaluate at the generator expansions (only g, h, E may occur)."""
        F = self.F
        if any(e[3] or e[4] for e in self.terms):
            raise ValueError("expand needs a polynomial in g, h, E only")
        tab = generators(F, prec)
        out = USeries.zero(F, prec)
        for (a, b, c, _, _), coeff in sorted(self.terms.items()):
            out = out + tab.monomial(a, b, c, prec).scale(coeff)
        return out

    def to_json(self) -> dict:
        mons = []
        for (a, b, c, y, x), coeff in sorted(self.terms.items()):
            m = {"g": a, "h": b, "E": c}
            if y:
                m["Y"] = y
            if x:
                m["X"] = x
            m["coeff"] = format_ratf(coeff)
            mons.append(m)
        return {"weight": self.weight, "type": self.type, "monomials": mons}

    @classmethod
    def from_json(cls, F: GF, data) -> "GradedForm":
        if isinstance(data, str):
            data = json.loads(data)
        terms = {}
        for m in data["monomials"]:
            e = (m.get("g", 0), m.get("h", 0), m.get("E", 0), m.get("Y", 0), m.get("X", 0))
            terms[e] = parse_ratf(F, m["coeff"])
        return cls(F, terms, data.get("weight"), data.get("type"))

    def __repr__(self):
        return f"GradedForm({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mon = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(VARS, e) if k)
            cs = format_ratf(c)
            if not mon:
                parts.append(f"({cs})")
            elif cs == "1*θ^0":
                parts.append(mon)
            else:
                parts.append(f"({cs})*{mon}")
        return " + ".join(parts)


def expand(f: GradedForm, prec: int) -> USeries:
    return f.expand(prec)


# ---------------------------------------------------------------------------
# membership


def modular_basis(q: int, k: int, m: int) -> list[tuple[int, int]]:
    """Exponents (a, b) with (q−1)a + (q+1)b = k and b ≡ m mod (q−1), sorted by b."""
    out = []
    b = 0
    while (q + 1) * b <= k:
        rest = k - (q + 1) * b
        if rest % (q - 1) == 0 and (b - m) % (q - 1) == 0:
            out.append((rest // (q - 1), b))
        b += 1
    return out


GUARD = 8


def membership_prec(q: int, k: int) -> int:
    """Smallest precision membership accepts at weight k (over all types)."""
    dim = max(len(modular_basis(q, k, m)) for m in range(max(q - 1, 1)))
    return 2 * dim + k


def membership(f: USeries, k: int, m: int) -> GradedForm | None:
    """Express f as a polynomial in g̃, h̃ of weight k and type m, or return None.

    The basis monomials g^a h^b have pairwise distinct valuations b and
    leading coefficients (−1)^b, so the system is triangular.  It is solved
    on the first max(b)+1+GUARD coefficients; every further coefficient is
    then checked, and a mismatch there raises InconsistentTruncation.
    """
    F = f.F
    q = F.q
    basis = modular_basis(q, k, m)
    if f.prec < 2 * len(basis) + k:
        raise PrecisionError(f"membership at weight {k} needs precision ≥ {2 * len(basis) + k}")
    if f.val < 0:
        return None
    tab = generators(F, f.prec)
    r = f
    coeffs = {}
    for a, b in basis:
        c = r.coeff(b)
        if b % 2 and F.p != 2:
            c = -c
        if c.is_zero():
            continue
        coeffs[(a, b, 0, 0, 0)] = c
        r = r - tab.monomial(a, b, 0, f.prec).scale(c)
    solve_rows = min(f.prec, (basis[-1][1] if basis else 0) + 1 + GUARD)
    nz = r.valuation()
    if nz is None:
        return GradedForm(F, coeffs, k, m)
    if nz < solve_rows:
        return None
    raise InconsistentTruncation(
        f"weight {k} type {m}: solving rows fit but coefficient u^{nz} does not")


def membership_matrix_rank(F: GF, k: int, m: int, rows: int) -> tuple[int, int]:
    """(rank, columns) of the coefficient matrix of the weight-k, type-m basis on the first rows."""
    basis = modular_basis(F.q, k, m)
    tab = generators(F, rows)
    piv = set()
    for a, b in basis:
        s = tab.monomial(a, b, 0, rows)
        v = s.valuation()
        if v is not None:
            piv.add(v)
    return len(piv), len(basis)


# ---------------------------------------------------------------------------
# formal slash model


def formal_slash(Fm: GradedForm, shift: GradedForm | None = None) -> GradedForm:
    """Substitute E ↦ E − X and Y ↦ Y − X (or a given shift in place of X).

    With the default shift the binomial expansion is applied to exponents
    directly; an explicit shift goes through general substitution.
    """
    F = Fm.F
    if shift is not None:
        return Fm.substitute({"E": GradedForm.gen(F, "E") - shift, "Y": GradedForm.gen(F, "Y") - shift})
    p = F.p
    parts: dict = {}
    for (a, b, c, y, x), coef in Fm.terms.items():
        for i in range(c + 1):
            bi = binom_mod_p(c, i, p)
            for j in range(y + 1) if bi else ():
                s = bi * binom_mod_p(y, j, p) % p
                if not s:
                    continue
                code = F.from_int(-s if (i + j) % 2 else s)
                parts.setdefault((a, b, c - i, y - j, x + i + j), []).append(
                    RatF(coef.num.scale(code), coef.den, reduced=True))
    terms = {}
    for key, cs in parts.items():
        total = cs[0]
        for t in cs[1:]:
            total = total + t
        terms[key] = total
    return GradedForm(F, terms, Fm.weight, Fm.type)


def x_coefficients(P: GradedForm) -> dict[int, GradedForm]:
    """{i: [X^i] P}."""
    return {i: P.coefficient_in("X", i) for i in range(P.degree("X") + 1)}


def hasse_x_power(F: GF, m: int, n: int) -> int:
    """Scalar s with ∂ⁿ(X^m) = s·X^{m+n}: (−1)ⁿ binom(m+n−1, n) mod p."""
    c = binom_signed_mod_p(m + n - 1, n, F.p)
    return (-c if n % 2 else c) % F.p


def hasse_on_X(n: int, P: dict, hyper_fn=None) -> dict:
    """∂ⁿ of Σ_m c_m X^m by Leibniz, X carrying ∂ʲX^m = (−1)ʲbinom(m+j−1, j)X^{m+j}.

    Coefficients c_m are USeries by default; pass ``hyper_fn(i, c)`` for
    other coefficient types.
    """
    hyper_fn = hyper_fn or hyper
    out: dict = {}
    for m, c in P.items():
        for i in range(n + 1):
            s = hasse_x_power(c.F, m, n - i)
            if s == 0:
                continue
            term = hyper_fn(i, c)
            term = term.scale(RatF.const(c.F, s)) if s != 1 else term
            key = m + n - i
            out[key] = out[key] + term if key in out else term
    return out


# ---------------------------------------------------------------------------
# level-θ Eisenstein series


def _theta_to_lambda(s: USeries) -> USeries:
    """Rewrite θ-coefficients in F_q[λ] via θ = −λ^{q−1}."""
    F = s.F
    d = F.q - 1
    D = s.num.shape[1]
    out = np.zeros((s.num.shape[0], (D - 1) * d + 1 if D else 0, F.n), dtype=np.int64)
    for i in range(D):
        blk = s.num[:, i, :]
        out[:, i * d, :] = F.scale(blk, F.pow(F.neg_one, i)) if i % 2 else blk
    den = Poly.zero(F)
    for i, c in enumerate(s.den.codes()):
        if c:
            den = den + Poly.theta(F, i * d).scale(F.mul(c, F.pow(F.neg_one, i)))
    return USeries(F, out, den, s.val, s.prec)


def eisenstein_level_theta(F: GF, c1: int, c2: int, prec: int) -> USeries:
    """E_u for u = (c1/θ, c2/θ), as a series in u_θ with coefficients in F_q(λ).

    The polynomial variable of the coefficients is λ (λ^{q−1} = −θ); use
    :func:`drinfeld_nh.carlitz.cyclo_from_lambda` to read them in the basis
    1, λ, …, λ^{q−2}.
    """
    if c1 == 0 and c2 == 0:
        raise ValueError("index pair must be nonzero")
    lam = RatF(Poly.theta(F))
    out = USeries.zero(F, prec)
    if c1 == 0:
        out = out + USeries.const(F, RatF(Poly.const(F, F.inv(c2)), Poly.theta(F)), prec)
    one = USeries.one(F, prec)
    shift = lam * RatF.const(F, c2)
    d = 0
    while F.q ** d < prec:
        for a in monic_polys(F, d):
            for z in range(1, F.q):
                ap = a.scale(z)
                if ap.coeff(0) != c1:
                    continue
                ua = _theta_to_lambda(u_of_az(a, prec)).scale_fq(F.inv(z))
                if ua.is_zero():
                    continue
                if c2:
                    term = ua * (one + ua.scale(shift)).inverse()
                else:
                    term = ua
                out = out + term
        d += 1
    return out


def level_theta_indices(F: GF) -> list[tuple[int, int]]:
    """Representatives of nonzero (θ^{-1}A/A)² modulo F_q^×."""
    return [(0, 1)] + [(1, c) for c in range(F.q)]


def h_from_level_theta(F: GF, prec: int) -> tuple[USeries, USeries]:
    """(∏ E_u over representatives, h̃ rewritten in u_θ), both over F_q(λ)."""
    prod = USeries.one(F, prec)
    for c1, c2 in level_theta_indices(F):
        prod = prod * eisenstein_level_theta(F, c1, c2, prec)
    q = F.q
    need = prec // q + 2
    h_l = _theta_to_lambda(generators(F, need).h()).truncate(need)
    # u = u_θ^q / (1 + θ u_θ^{q−1}) with θ = −λ^{q−1}
    den = USeries.from_poly_coeffs(F, {0: Poly.const(F, 1), q - 1: -Poly.theta(F, q - 1)}, prec)
    u_sub = den.inverse().shift(q).truncate(prec)
    return prod, h_l.compose(u_sub, prec)
