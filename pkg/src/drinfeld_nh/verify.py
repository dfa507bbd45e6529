"""Batch verification suites.

Each suite takes a VerifyConfig and returns CheckResults; ``run`` returns
them in canonical order, so reports are byte-identical for a fixed config.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Any, Callable

from . import combinatorics as comb
from .carlitz import bracket
from .field import Poly, RatF, binom_mod_p, embedding, field
from .forms import (GradedForm, formal_slash, generators, membership, membership_prec,
                    modular_basis)
from .nearly import (NHForm, decompose, delta_leibniz_check, e2, formal_equivariance_check,
                     iota, maass_shimura, reconstruct)
from .numerics import (PuiseuxNum, QuadExtElem, carlitz_exp_eval, cm_evaluation_identity,
                       default_spec, ext_field, find_alpha, find_epsilon, fixed_field_test,
                       inert_point, pitilde, psi_apply, sigma, u_eval, verify_inversion_law)
from .operators import (RCCoeffs, UCoeffs, perturbed_rc_table, perturbed_u_table, rc_bracket,
                        rc_bracket_nh_identity, u_operator, u_operator_nh_identity)
from .sampling import random_nh_layers, random_puiseux, random_quad, random_useries
from .useries import USeries, goss, hyper

SUITES = ("combinatorics", "generators", "rankin-cohen", "u-operators", "structure",
          "equivariance", "appendix-a", "numerics")


@dataclass
class VerifyConfig:
    q: int = 3
    prec: int = 300
    vdigits: int = 30
    seed: int = 0


@dataclass
class CheckResult:
    id: str
    anchor: str
    passed: bool
    detail: Any = dc_field(default=None)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "status": self.status, "detail": self.detail}


_SUP = str.maketrans("0123456789−", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def _sup(n) -> str:
    return str(n).replace("-", "−").translate(_SUP)


# ---------------------------------------------------------------------------


def suite_combinatorics(cfg: VerifyConfig) -> list[CheckResult]:
    p = field(cfg.q).p
    bad_shift = comb.check_shift_vanishing(p)
    bad_law = comb.check_coefficient_law(p)
    bad_lucas = comb.lucas_agreement(p, 10_000, 10 ** 6, cfg.seed)
    return [
        CheckResult(f"shifted binomial sum vanishes mod {p}, 1 ≤ k, r ≤ {3 * p}",
                    "binomial vanishing lemma", not bad_shift, {"failures": bad_shift[:5]}),
        CheckResult(f"Σ_j (−1)^j C(r−i+j, j) C(r, i−j) = −C(r, i), r ≤ {3 * p}",
                    "coefficient law of δ", not bad_law, {"failures": bad_law[:5]}),
        CheckResult(f"Lucas vs big-integer binomials mod {p}, 10⁴ pairs n ≤ 10⁶",
                    "Lucas theorem", not bad_lucas, {"seed": cfg.seed, "failures": bad_lucas[:5]}),
    ]


def _generator_ledger(q: int, N: int) -> dict[str, bool]:
    F = field(q)
    tab = generators(F, N)
    g, h, D, E = tab.g(), tab.h(), tab.delta(), tab.E().truncate(N)
    return {
        "Δ = −h^{q−1}": D == -(h ** (q - 1)),
        "∂Δ = E·Δ": hyper(1, D) == E * D,
        "∂h = −E·h": hyper(1, h) == -(E * h),
        "g(0) = 1": g.coeff(0) == RatF.const(F, 1),
        "Δ(0) = 0": D.coeff(0).is_zero(),
    }


def suite_generators(cfg: VerifyConfig) -> list[CheckResult]:
    q = cfg.q
    F = field(q)
    p = F.p
    out = []
    for N in (cfg.prec, 2 * cfg.prec):
        for name, ok in _generator_ledger(q, N).items():
            out.append(CheckResult(f"{name} at precision {N}", "generator identities", ok))
    for k in range(1, q + 1):
        gk = goss(F, k)
        out.append(CheckResult(f"𝒢_{k} = u{_sup(k)}", "Goss polynomials of low index",
                               gk == USeries.monomial(F, k, gk.prec)))
    rng = random.Random(cfg.seed)
    comp_bad, leib_bad = [], []
    for i in range(100):
        f = random_useries(F, rng, prec=16, allow_den=True)
        g = random_useries(F, rng, prec=16)
        m, n = rng.randint(0, 2 * p), rng.randint(0, 2 * p)
        if hyper(m, hyper(n, f)) != hyper(m + n, f).scale(RatF.const(F, F.from_int(binom_mod_p(m + n, n, p)))):
            comp_bad.append((i, m, n))
        order = rng.randint(0, 2 * p)
        rhs = USeries.zero(F, 16)
        for j in range(order + 1):
            rhs = rhs + hyper(j, f) * hyper(order - j, g)
        if hyper(order, f * g) != rhs:
            leib_bad.append((i, order))
    out.append(CheckResult(f"∂^m∂^n = C(m+n, n)∂^(m+n), 100 draws, orders ≤ {2 * p}",
                           "Hasse composition", not comp_bad, {"seed": cfg.seed, "failures": comp_bad[:5]}))
    out.append(CheckResult(f"Leibniz rule for ∂^n, 100 draws, n ≤ {2 * p}",
                           "hyperderivative product rule", not leib_bad,
                           {"seed": cfg.seed, "failures": leib_bad[:5]}))
    return out


_PAIR_NAMES = ("g", "h", "Δ", "g²", "gh")


def _rc_inputs(q: int, N: int):
    F = field(q)
    tab = generators(F, N)
    g, h = tab.g(), tab.h()
    return {
        "g": (g, q - 1, 0), "h": (h, q + 1, 1), "Δ": (tab.delta(), q * q - 1, 0),
        "g²": (g * g, 2 * q - 2, 0), "gh": (g * h, 2 * q, 1),
    }


def suite_rankin_cohen(cfg: VerifyConfig) -> list[CheckResult]:
    q = cfg.q
    base = max(40, min(cfg.prec, 80))
    top = max(base, membership_prec(q, 2 * (q * q - 1) + 2 * (q + 1)) + 8)
    forms = _rc_inputs(q, 2 * top)
    out = []
    for a, b in itertools.combinations_with_replacement(_PAIR_NAMES, 2):
        fa, ka, ma = forms[a]
        fb, kb, mb = forms[b]
        for r in range(q + 2):
            W, T = ka + kb + 2 * r, ma + mb + r
            N = max(base, membership_prec(q, W) + 8)
            P = membership(rc_bracket(fa.truncate(N), ka, fb.truncate(N), kb, r), W, T)
            certified = P is not None and P.expand(2 * N) == rc_bracket(
                fa.truncate(2 * N), ka, fb.truncate(2 * N), kb, r)
            out.append(CheckResult(f"[{a}, {b}]_{r} ∈ M_{{{W},{T % (q - 1) if q > 2 else 0}}}",
                                   "Rankin–Cohen brackets are modular", certified,
                                   {"precision": N, "form": None if P is None else str(P)}))
            ok = rc_bracket_nh_identity(fa.truncate(N), ka, fb.truncate(N), kb, r)
            out.append(CheckResult(f"δ-form of [{a}, {b}]_{r} has no Y-part",
                                   "Rankin–Cohen δ-form identity", ok))
    fg, kg, _ = forms["g"]
    fh, kh, _ = forms["h"]
    tab = RCCoeffs.compute(1, kg, kh, field(q).p)
    bad = rc_bracket_nh_identity(fg.truncate(base), kg, fh.truncate(base), kh, 1,
                                 perturbed_rc_table(tab, 0))
    out.append(CheckResult("perturbed β_{1,0} breaks the δ-form identity of [g, h]_1",
                           "negative control", not bad))
    return out


def suite_u_operators(cfg: VerifyConfig) -> list[CheckResult]:
    q = cfg.q
    F = field(q)
    N = cfg.prec
    tab = generators(F, N)
    g, h = tab.g(), tab.h()
    out = []
    lhs = u_operator(h, q + 1, q + 1)
    rhs = (h ** (q + 3)).scale(RatF(bracket(F, 1)).inv())
    out.append(CheckResult(f"U_{{{q + 1}}}^{{{q + 1}}}(h) = h^{{{q + 3}}}/(θ{_sup(q)}−θ)",
                           "U-operator value on h", lhs == rhs, {"precision": N}))
    for k in (q - 1, q + 1):
        for r in range(2, q + 1):
            res = u_operator(g, k, r)
            table = UCoeffs.compute(r, k, F.p)
            out.append(CheckResult(f"U_{{{k}}}^{{{r}}}(g) = 0", "U-operator vanishing on g",
                                   res.is_zero(), {"valuation": res.valuation(), "gcd": table.gcd,
                                                   "c": list(table.reduced)}))
    res = u_operator(g, q - 1, q + 1)
    out.append(CheckResult(f"U_{{{q - 1}}}^{{{q + 1}}}(g) = 0", "U-operator vanishing on g",
                           res.is_zero(), {"valuation": res.valuation()}))
    small = min(N, 60)
    out.append(CheckResult(f"δ-form of U_{{{q + 1}}}^{{{q + 1}}}(h) has no Y-part",
                           "U-operator δ-form identity", u_operator_nh_identity(h.truncate(small), q + 1, q + 1)))
    D = tab.delta().truncate(small)
    ut = UCoeffs.compute(3, q * q - 1, F.p)
    out.append(CheckResult(f"δ-form of U_{{{q * q - 1}}}^{{3}}(Δ) has no Y-part",
                           "U-operator δ-form identity", u_operator_nh_identity(D, q * q - 1, 3)))
    out.append(CheckResult("perturbed c_1 breaks the δ-form identity of U^3(Δ)", "negative control",
                           not u_operator_nh_identity(D, q * q - 1, 3, perturbed_u_table(ut, 1))))
    return out


def suite_structure(cfg: VerifyConfig) -> list[CheckResult]:
    q = cfg.q
    F = field(q)
    p = F.p
    k0 = q * q - 1
    N = max(60, membership_prec(q, 4 * q * q) + 8)
    tab = generators(F, N)
    Dnh = NHForm.from_series(tab.delta().truncate(N), k0, 0)
    dD = maass_shimura(Dnh, k0, 1)
    out = [CheckResult(f"δ_{{{k0}}}(Δ) = E₂·Δ", "Maass–Shimura derivative of Δ",
                       dD == e2(F, N) * Dnh)]
    layers = decompose(dD)
    expect = [GradedForm.zero(F, k0 + 2, 1), -GradedForm.gen(F, "h", q - 1)]
    out.append(CheckResult(f"decompose δ(Δ) = [0, −h{_sup(q - 1)}]", "Maass–Shimura derivative of Δ",
                           len(layers) == 2 and all((a - b).is_zero() for a, b in zip(layers, expect)),
                           [str(x) for x in layers]))
    rng = random.Random(cfg.seed)
    bad = []
    for i in range(50):
        layers, k, m = random_nh_layers(F, rng, max_weight=3 * q + 3, max_depth=2)
        r = rng.randint(0, p + 1)
        Nw = max(40, membership_prec(q, k + 2 * r) + 8)
        Fm = reconstruct(layers, k, m, Nw)
        lhs = iota(maass_shimura(Fm, k, r)).expand(Nw)
        rhs = hyper(r, iota(Fm).expand(Nw))
        if lhs != rhs:
            bad.append((i, k, m, r))
    out.append(CheckResult(f"ι∘δ_k^r = ∂^r∘ι, 50 draws, r ≤ {p + 1}", "ι intertwines δ and ∂",
                           not bad, {"seed": cfg.seed, "failures": bad}))
    bad = []
    for i in range(100):
        layers, k, m = random_nh_layers(F, rng, max_weight=4 * q, max_depth=3)
        Nw = max(40, membership_prec(q, k) + 8)
        back = decompose(reconstruct(layers, k, m, Nw))
        if len(back) != len(layers) or any(not (a - b).is_zero() for a, b in zip(back, layers)):
            bad.append((i, k, m, len(layers) - 1))
    out.append(CheckResult("decompose∘reconstruct = id, 100 draws", "E₂-layer decomposition",
                           not bad, {"seed": cfg.seed, "failures": bad}))
    g = NHForm.from_series(tab.g().truncate(40), q - 1, 0)
    E2 = e2(F, 40)
    out.append(CheckResult("δ(g·E₂) satisfies the Leibniz rule", "δ product rule",
                           delta_leibniz_check(g, q - 1, E2, 2)))
    return out


def equivariance_forms(q: int) -> dict[str, GradedForm]:
    F = field(q)
    g, h, E = (GradedForm.gen(F, v) for v in ("g", "h", "E"))
    return {"Δ": -(h ** (q - 1)), "E": E, "E²": E * E, "g·E": g * E}


def equivariance_cases(q: int):
    """(name, form) covering every weight k ≤ 2q² reachable as F·g^a h^b."""
    F = field(q)
    cases = []
    for name, f in equivariance_forms(q).items():
        for k in range(f.weight, 2 * q * q + 1):
            for m in range(max(q - 1, 1)):
                basis = modular_basis(q, k - f.weight, m)
                if basis:
                    a, b = basis[0]
                    mult = GradedForm.monomial(F, a, b)
                    label = name if (a, b) == (0, 0) else f"{name}·g{_sup(a)}h{_sup(b)}"
                    cases.append((label, f * mult))
                    break
    return cases


def suite_equivariance(cfg: VerifyConfig, r_max: int | None = None) -> list[CheckResult]:
    q = cfg.q
    F = field(q)
    p = F.p
    r_max = p * p + 1 if r_max is None else r_max
    out = []
    for label, f in equivariance_cases(q):
        bad = []
        # one precision for all orders, so cached ∂^s of the Y-coefficients are reused
        N = max(40, membership_prec(q, f.weight + 2 * r_max + 2 * f.degree("E")) + 8)
        cache: dict = {}
        for r in range(r_max + 1):
            if not formal_equivariance_check(f, f.weight, f.type, r, N, cache=cache):
                bad.append(r)
        out.append(CheckResult(f"δ_{{{f.weight}}}^r(slash F) = slash(δ^r F), F = {label}, r ≤ {r_max}",
                               "formal equivariance of δ", not bad, {"failing r": bad}))
    E2 = GradedForm.gen(F, "E") - GradedForm.gen(F, "Y")
    out.append(CheckResult("slash_X(E₂) = E₂", "E₂ slash invariance", (formal_slash(E2) - E2).is_zero()))
    E = GradedForm.gen(F, "E")
    out.append(CheckResult("slash_X(E) ≠ E", "negative control", not (formal_slash(E) - E).is_zero()))

    def wrong(n, i, pp):
        return (binom_mod_p(n, i, pp) + (1 if i == 1 else 0)) % pp

    Delta = equivariance_forms(q)["Δ"]
    bad = formal_equivariance_check(Delta, Delta.weight, Delta.type, 1,
                                    membership_prec(q, Delta.weight + 2) + 8, binom_fn=wrong)
    out.append(CheckResult("perturbed δ binomials break equivariance", "negative control", not bad))
    return out


def _in_base(x: PuiseuxNum) -> bool:
    return x.in_base_field()


def suite_appendix_a(cfg: VerifyConfig, draws: int = 1000) -> list[CheckResult]:
    q = cfg.q
    Fq = field(q)
    K = ext_field(q, 2)
    rng = random.Random(cfg.seed)
    variants = ["even"] if Fq.p == 2 else ["odd-I", "odd-II"]
    out = []
    for v in variants:
        spec = default_spec(q, v)
        psi = lambda z: psi_apply(spec, z)  # noqa: E731
        bad = {"automorphism": [], "isometry": [], "fixes K∞": [], "σ on unramified": []}
        zero = PuiseuxNum.zero(K, q)
        for i in range(draws):
            x, y = random_quad(spec, K, rng), random_quad(spec, K, rng)
            if psi(x * y) != psi(x) * psi(y) or psi(x + y) != psi(x) + psi(y):
                bad["automorphism"].append(i)
            if psi(x).valuation() != x.valuation():
                bad["isometry"].append(i)
            c = random_puiseux(K, q, rng, base_only=True)
            if psi(QuadExtElem(c, zero, spec)) != QuadExtElem(c, zero, spec):
                bad["fixes K∞"].append(i)
            a = random_puiseux(K, q, rng)
            if psi(QuadExtElem(a, zero, spec)) != QuadExtElem(sigma(a), zero, spec):
                bad["σ on unramified"].append(i)
        for name, fails in bad.items():
            out.append(CheckResult(f"ψ[{v}] {name}, {draws} draws", "properties of ψ", not fails,
                                   {"seed": cfg.seed, "failures": fails[:5]}))
        mism, fixed, total = [], 0, 0
        for ia, ib in itertools.product((-1, 0, 1), repeat=2):
            for ca, cb in itertools.product(range(K.q), repeat=2):
                z = QuadExtElem(PuiseuxNum.from_terms(K, q, 1, {ia: ca}),
                                PuiseuxNum.from_terms(K, q, 1, {ib: cb}), spec)
                t = fixed_field_test(spec, z)
                total += 1
                fixed += t
                if t != (psi(z) == z):
                    mism.append((ia, ca, ib, cb))
        out.append(CheckResult(f"ψ[{v}] fixed-field criterion = ψ-fixedness, {total} single-term elements",
                               "fixed field of ψ", not mism, {"fixed": fixed, "mismatches": mism[:5]}))
    if Fq.p == 2:
        eps = find_epsilon(Fq.n)
        out.append(CheckResult(f"Tr(ε) = 1 for ε = {eps} in F_{q}", "trace-one element",
                               Fq.trace_to_prime(eps) == 1))
        alpha = find_alpha(eps, q)
        emb = embedding(Fq, K)
        lhs = K.add(K.add(K.pow(alpha, q), alpha), 1)
        out.append(CheckResult("α^q + α + 1 = 0", "Artin–Schreier root α", lhs == 0 and alpha not in emb))
        out.append(CheckResult("α² + α + ε = 0", "Artin–Schreier root α",
                               K.add(K.add(K.mul(alpha, alpha), alpha), emb[eps]) == 0))
    return out


def suite_numerics(cfg: VerifyConfig) -> list[CheckResult]:
    q = cfg.q
    Fq = field(q)
    K = ext_field(q, 2)
    V = cfg.vdigits
    e = q - 1
    out = []
    pt = pitilde(q, V + 4)
    for name, a in (("1", Poly.const(Fq, 1)), ("θ", Poly.theta(Fq)),
                    ("(θ+1)", Poly.theta(Fq) + Poly.const(Fq, 1))):
        x = pt * PuiseuxNum.from_poly(a, K, e)
        ex = carlitz_exp_eval(x, target=(V + 2) * e)
        digits = ex.precision() if ex.is_zero() else ex.valuation()
        out.append(CheckResult(f"|e_C(π̃·{name})| < q^(−{V - 2})", "π̃ generates the kernel of e_C",
                               digits > V - 2, {"digits": str(digits)}))
    xi = inert_point(q, K)
    z = PuiseuxNum.const(K, q, xi, e)
    u0 = u_eval(z, V)
    for name, a in (("1", Poly.const(Fq, 1)), ("θ", Poly.theta(Fq)),
                    ("(θ+1)", Poly.theta(Fq) + Poly.const(Fq, 1))):
        agree = u0.agreement(u_eval(z + PuiseuxNum.from_poly(a, K, e), V))
        out.append(CheckResult(f"u(ξ + {name}) = u(ξ) to ≥ 20 digits", "A-periodicity of u",
                               agree >= 20, {"digits": str(agree)}))
    u2 = u_eval(z, 2 * V)
    agree = u0.agreement(u2)
    out.append(CheckResult("u(ξ) at V and 2V agree on the overlap", "numeric guard",
                           agree >= min(u0.precision(), u2.precision()), {"digits": str(agree)}))
    ok, digits = verify_inversion_law(z, 20)
    out.append(CheckResult("E(1/ξ) = −ξ²(E(ξ) − 1/(π̃ξ)) to ≥ 20 digits", "E transformation law",
                           ok, {"digits": str(digits)}))
    ok_bad, digits_bad = verify_inversion_law(z, 20, perturb=2 if Fq.p != 2 else 0)
    out.append(CheckResult("perturbed 1/(π̃ξ) term breaks the law", "negative control", not ok_bad,
                           {"digits": str(digits_bad)}))
    zero = PuiseuxNum.zero(K, q)
    if Fq.p == 2:
        spec = default_spec(q)
        z_ram, ram_name = QuadExtElem(zero, PuiseuxNum.const(K, q, 1), spec), "𝔠"
    else:
        spec = default_spec(q, "odd-I")
        z_ram, ram_name = QuadExtElem(zero, PuiseuxNum.theta_power(K, q, 1), spec), "√θ"
    z_un = QuadExtElem(PuiseuxNum.const(K, q, xi), zero, spec)
    for name, z0 in ((ram_name, z_ram), ("ξ", z_un)):
        out.append(CheckResult(f"det(ρ)j(ρ; z₀)⁻² = ψ(z₀)/z₀ at z₀ = {name}", "CM evaluation identity",
                               cm_evaluation_identity(z0)))
        out.append(CheckResult(f"ψ = id breaks the CM identity at z₀ = {name}", "negative control",
                               not cm_evaluation_identity(z0, psi=lambda w: w)))
    return out


_RUNNERS: dict[str, Callable[[VerifyConfig], list[CheckResult]]] = {
    "combinatorics": suite_combinatorics,
    "generators": suite_generators,
    "rankin-cohen": suite_rankin_cohen,
    "u-operators": suite_u_operators,
    "structure": suite_structure,
    "equivariance": suite_equivariance,
    "appendix-a": suite_appendix_a,
    "numerics": suite_numerics,
}


def run(suite: str, cfg: VerifyConfig) -> list[CheckResult]:
    names = SUITES if suite == "all" else (suite,)
    out = []
    for name in names:
        if name not in _RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
        for res in _RUNNERS[name](cfg):
            res.id = f"[q={cfg.q}] {name}: {res.id}"
            out.append(res)
    return out
