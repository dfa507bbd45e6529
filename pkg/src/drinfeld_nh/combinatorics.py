"""Binomial identities behind the Maass–Shimura calculus, checked in F_p."""

from __future__ import annotations

import random

from .field import binom_big, binom_mod_p


def _b(n: int, k: int) -> int:
    return binom_big(n, k) if 0 <= k <= n else 0


def shift_sum(k: int, r: int, j: int, l: int) -> int:
    """Σ_i (−1)^{i−ℓ} C(k+r−1, i) C(k+r−1−i, r−j−i) C(i, ℓ) over the integers."""
    total = 0
    for i in range(r + 1):
        term = _b(k + r - 1, i) * _b(k + r - 1 - i, r - j - i) * _b(i, l)
        total += -term if (i - l) % 2 else term
    return total


def shift_sum_mod_p(k: int, r: int, j: int, l: int, p: int) -> int:
    total = 0
    for i in range(r + 1):
        term = binom_mod_p(k + r - 1, i, p) * binom_mod_p(k + r - 1 - i, r - j - i, p) * binom_mod_p(i, l, p)
        total += -term if (i - l) % 2 else term
    return total % p


def check_shift_vanishing(p: int, bound: int | None = None) -> list[tuple]:
    """All (k, r, j, ℓ) with 1 ≤ k, r ≤ bound, j+ℓ ≤ r−1 where the sum fails to vanish mod p."""
    bound = bound or 3 * p
    bad = []
    for k in range(1, bound + 1):
        for r in range(1, bound + 1):
            for j in range(r):
                for l in range(r - j):
                    if shift_sum_mod_p(k, r, j, l, p) or shift_sum(k, r, j, l) % p:
                        bad.append((k, r, j, l))
    return bad


def coefficient_law_sum(r: int, i: int) -> int:
    """Σ_{j=1}^{i} (−1)^j C(r−(i−j), j) C(r, i−j), which should equal −C(r, i)."""
    total = 0
    for j in range(1, i + 1):
        term = _b(r - (i - j), j) * _b(r, i - j)
        total += -term if j % 2 else term
    return total


def check_coefficient_law(p: int, bound: int | None = None) -> list[tuple]:
    """All (r, i), 1 ≤ i ≤ r ≤ bound, where the law fails over ℤ or mod p."""
    bound = bound or 3 * p
    bad = []
    for r in range(1, bound + 1):
        for i in range(1, r + 1):
            s = coefficient_law_sum(r, i)
            sp = 0
            for j in range(1, i + 1):
                t = binom_mod_p(r - (i - j), j, p) * binom_mod_p(r, i - j, p)
                sp += -t if j % 2 else t
            if s != -_b(r, i) or (sp + binom_mod_p(r, i, p)) % p:
                bad.append((r, i))
    return bad


def lucas_agreement(p: int, samples: int, nmax: int, seed: int) -> list[tuple]:
    """Random (n, k) with n ≤ nmax where Lucas disagrees with the big-integer binomial."""
    rng = random.Random(seed)
    bad = []
    for _ in range(samples):
        n = rng.randint(0, nmax)
        k = rng.randint(0, n)
        if binom_mod_p(n, k, p) != binom_big(n, k) % p:
            bad.append((n, k))
    return bad
