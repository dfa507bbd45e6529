import pytest

from drinfeld_nh import combinatorics as comb


@pytest.mark.parametrize("p", (2, 3, 5))
def test_shift_sums_vanish(p):
    assert comb.check_shift_vanishing(p) == []


def test_shift_sum_example():
    # k = 1, r = 1, j = 0, ℓ = 0: C(1,0)C(1,1) − C(1,1)C(0,0) = 0
    assert comb.shift_sum(1, 1, 0, 0) == 0


@pytest.mark.parametrize("p", (2, 3, 5, 7))
def test_coefficient_law(p):
    assert comb.check_coefficient_law(p) == []


def test_coefficient_law_values():
    for r in range(1, 12):
        for i in range(1, r + 1):
            assert comb.coefficient_law_sum(r, i) == -comb._b(r, i)


@pytest.mark.parametrize("p", (2, 3, 5))
def test_lucas_agreement_small_sample(p):
    assert comb.lucas_agreement(p, 300, 10 ** 6, seed=1) == []
