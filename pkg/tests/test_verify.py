import json

import pytest

from drinfeld_nh import verify
from drinfeld_nh.verify import VerifyConfig


def test_suite_names():
    assert verify.SUITES == ("combinatorics", "generators", "rankin-cohen", "u-operators",
                             "structure", "equivariance", "appendix-a", "numerics")
    with pytest.raises(ValueError):
        verify.run("nonsense", VerifyConfig())


@pytest.mark.parametrize("suite", ["generators", "structure", "rankin-cohen"])
def test_small_suites_pass_q2(suite):
    res = verify.run(suite, VerifyConfig(q=2, prec=40))
    assert res and all(r.passed for r in res), [r.id for r in res if not r.passed]
    assert all(r.id.startswith(f"[q=2] {suite}: ") for r in res)


def test_appendix_a_is_deterministic():
    a = verify.suite_appendix_a(VerifyConfig(q=3, seed=4), draws=30)
    b = verify.suite_appendix_a(VerifyConfig(q=3, seed=4), draws=30)
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    assert all(r.passed for r in a)
    json.dumps([r.to_json() for r in a], default=str)


def test_equivariance_low_order():
    res = verify.suite_equivariance(VerifyConfig(q=2, prec=40), r_max=2)
    assert all(r.passed for r in res)


def test_equivariance_cases_cover_weights():
    q = 3
    weights = {f.weight for _, f in verify.equivariance_cases(q)}
    assert max(weights) <= 2 * q * q
    assert {q * q - 1, 2, 4, q + 1} <= weights


def test_u_operator_report_names_the_gcd():
    res = verify.suite_u_operators(VerifyConfig(q=2, prec=40))
    vanish = [r for r in res if "(g) = 0" in r.id]
    assert vanish and all("valuation" in r.detail for r in vanish)
