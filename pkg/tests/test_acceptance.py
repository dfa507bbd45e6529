"""Acceptance criteria 1–9 at their stated sizes and tolerances.

Each test records one PASS/FAIL line (shown in the terminal summary) and
asserts the criterion in full.  Criteria that do not hold as stated are
marked xfail with the reason; companion tests pin down exactly what was
observed so that a change in behaviour is noticed.
"""

import time
from functools import lru_cache

import pytest

from drinfeld_nh.field import field
from drinfeld_nh.verify import (VerifyConfig, suite_appendix_a, suite_combinatorics,
                                suite_equivariance, suite_generators, suite_numerics,
                                suite_rankin_cohen, suite_structure, suite_u_operators)

QS = (2, 3, 4, 5)
PREC = 300
VDIGITS = 30
SEED = 0


@lru_cache(maxsize=None)
def timed(suite, q):
    cfg = VerifyConfig(q=q, prec=PREC, vdigits=VDIGITS, seed=SEED)
    t0 = time.perf_counter()
    res = suite(cfg)
    return res, time.perf_counter() - t0


def record(log, n, ok, summary):
    log[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {summary}"


def failures(results):
    return [r.id for r in results if not r.passed]


# -- 1 ----------------------------------------------------------------------

G_VANISHING_FAILS = {2: {(1, 2), (3, 2)}, 3: {(2, 3), (4, 2), (4, 3)}, 4: {(3, 4), (5, 2), (5, 4)},
                     5: {(4, 5), (6, 2), (6, 3), (6, 4), (6, 5)}}


def _u_failures(q):
    res, _ = timed(suite_u_operators, q)
    out = set()
    for r in res:
        if not r.passed and "(g) = 0" in r.id:
            k, rr = r.id.split("U_{")[1].split("}^{")
            out.add((int(k), int(rr.split("}")[0])))
    return out


@pytest.mark.xfail(strict=True, reason="U-vanishing on g fails for gcd-normalized c_v; see decisions ledger")
def test_criterion_1(acceptance_log):
    bad, slow = {}, {}
    for q in QS:
        res, dt = timed(suite_u_operators, q)
        if failures(res):
            bad[q] = len(failures(res))
        if dt > 300:
            slow[q] = round(dt)
    ok = not bad and not slow
    record(acceptance_log, 1, ok,
           f"U_(q+1)^(q+1)(h) = h^(q+3)/[1] exact at prec {PREC}; U_(q−1)^(q+1)(g) = 0; "
           f"U^r(g) = 0 for 2 ≤ r ≤ q fails at (q: #cases) {bad}; over-budget q: {slow or 'none'}")
    assert ok


@pytest.mark.parametrize("q", QS)
def test_criterion_1_confirmed_parts(q):
    res, dt = timed(suite_u_operators, q)
    passed = {r.id for r in res if r.passed}
    assert any("(h) = h^" in i for i in passed)
    assert any(f"U_{{{q - 1}}}^{{{q + 1}}}(g) = 0" in i for i in passed)
    assert all(r.passed for r in res if "δ-form" in r.id or "negative control" in r.anchor)
    assert dt <= 300


@pytest.mark.parametrize("q", QS)
def test_criterion_1_observed_failures(q):
    assert _u_failures(q) == G_VANISHING_FAILS[q]


# -- 2, 7 ---------------------------------------------------------------------

def _split_generators(q):
    res, _ = timed(suite_generators, q)
    ledger = [r for r in res if r.anchor == "generator identities"]
    return ledger, [r for r in res if r not in ledger]


def test_criterion_2(acceptance_log):
    bad = {q: failures(_split_generators(q)[0]) for q in QS}
    bad = {q: v for q, v in bad.items() if v}
    precs = {int(r.id.rsplit(" ", 1)[1]) for r in _split_generators(2)[0]}
    record(acceptance_log, 2, not bad,
           f"Δ = −h^(q−1), ∂Δ = EΔ, ∂h = −Eh, g(0) = 1, Δ(0) = 0 exact at precisions {sorted(precs)}; "
           f"failures {bad or 'none'}")
    assert precs == {PREC, 2 * PREC}
    assert not bad


def test_criterion_7(acceptance_log):
    bad = {q: failures(_split_generators(q)[1]) for q in QS}
    bad = {q: v for q, v in bad.items() if v}
    record(acceptance_log, 7, not bad,
           f"Hasse composition and Leibniz on 100 draws (orders ≤ 2p), 𝒢_k = u^k for k ≤ q; "
           f"failures {bad or 'none'}")
    assert not bad


# -- 3 ----------------------------------------------------------------------

def test_criterion_3(acceptance_log):
    bad = {q: failures(timed(suite_structure, q)[0]) for q in QS}
    bad = {q: v for q, v in bad.items() if v}
    record(acceptance_log, 3, not bad,
           f"δ(Δ) = E₂Δ, 50 draws of ι∘δ^r = ∂^r∘ι (r ≤ p+1), 100 decompose/reconstruct round trips; "
           f"failures {bad or 'none'}")
    assert not bad


# -- 4 ----------------------------------------------------------------------

def test_criterion_4(acceptance_log):
    bad, counts = {}, {}
    for q in QS:
        res, _ = timed(suite_equivariance, q)
        counts[q] = len(res)
        if failures(res):
            bad[q] = failures(res)
    record(acceptance_log, 4, not bad,
           f"formal equivariance for F ∈ {{Δ, E, E², gE}}·g^a h^b at every weight ≤ 2q², r ≤ p²+1, "
           f"E₂ slash invariance, controls; checks per q {counts}; failures {bad or 'none'}")
    assert not bad


# -- 5 ----------------------------------------------------------------------

def test_criterion_5(acceptance_log):
    bad, counts = {}, {}
    for q in QS:
        res, _ = timed(suite_rankin_cohen, q)
        counts[q] = len(res)
        if failures(res):
            bad[q] = failures(res)
    record(acceptance_log, 5, not bad,
           f"15 pairs × 0 ≤ r ≤ q+1: membership certified at doubled precision and δ-form Y-parts cancel; "
           f"checks per q {counts}; failures {bad or 'none'}")
    assert not bad


# -- 6 ----------------------------------------------------------------------

PRIMES = sorted({field(q).p for q in QS})


def _combinatorics():
    out = {}
    for p in PRIMES:
        res, t = timed(suite_combinatorics, p)
        out[p] = (failures(res), round(t, 1))
    return out


@pytest.mark.xfail(strict=False, reason="exact big-integer binomials at n ~ 10⁶ cost ~6.5 ms each on one CPU")
def test_criterion_6(acceptance_log):
    data = _combinatorics()
    bad = {p: f for p, (f, _) in data.items() if f}
    dt = {p: t for p, (_, t) in data.items()}
    fast = sum(dt.values()) < 60
    record(acceptance_log, 6, not bad and fast,
           f"binomial vanishing and coefficient law exhaustive for k, r ≤ 3p; Lucas vs big integers on "
           f"10⁴ pairs, n ≤ 10⁶, per p: failures {bad or 'none'}; runtime {dt} s "
           f"({'within' if fast else 'over'} a seconds-scale budget)")
    assert not bad and fast


def test_criterion_6_identities():
    assert all(not f for f, _ in _combinatorics().values())


# -- 8 ----------------------------------------------------------------------

def test_criterion_8(acceptance_log):
    bad = {q: failures(timed(suite_appendix_a, q)[0]) for q in QS}
    bad = {q: v for q, v in bad.items() if v}
    record(acceptance_log, 8, not bad,
           f"ψ automorphism, isometry, fixes K∞, equals σ on unramified (10³ draws per variant); "
           f"fixed-field criterion exhaustive on single-term elements; α and ε facts; failures {bad or 'none'}")
    assert not bad


# -- 9 ----------------------------------------------------------------------

def test_criterion_9(acceptance_log):
    bad, slow = {}, {}
    for q in QS:
        res, dt = timed(suite_numerics, q)
        if failures(res):
            bad[q] = failures(res)
        if dt > 60:
            slow[q] = round(dt)
    ok = not bad and not slow
    record(acceptance_log, 9, ok,
           f"e_C(π̃a) ≈ 0 at V = {VDIGITS}, u(ξ + a) = u(ξ) and the E inversion law to ≥ 20 digits, "
           f"CM identity at the ramified generator and ξ; failures {bad or 'none'}; over-budget q {slow or 'none'}")
    assert ok
