"""Evaluate π̃, u(ξ), and the E inversion law at the inert point ξ for a chosen q."""

import argparse

from drinfeld_nh.field import Poly, field
from drinfeld_nh.numerics import (PuiseuxNum, carlitz_exp_eval, ext_field, inert_point, pitilde,
                                  u_eval, verify_inversion_law)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--vdigits", type=int, default=30)
    args = ap.parse_args()
    q, V = args.q, args.vdigits
    K = ext_field(q)
    e = q - 1
    pt = pitilde(q, V)
    print(f"π̃ has valuation {pt.valuation()}; leading coefficient code {pt.coeff(pt.start)}")
    for name, a in (("1", Poly.const(field(q), 1)), ("θ", Poly.theta(field(q)))):
        ex = carlitz_exp_eval(pt * PuiseuxNum.from_poly(a, K, e), target=(V - 2) * e)
        print(f"e_C(π̃·{name}) vanishes to {ex.precision()} θ-digits")
    xi = PuiseuxNum.const(K, q, inert_point(q, K), e)
    u0 = u_eval(xi, V)
    print(f"u(ξ) has valuation {u0.valuation()}, known to {u0.precision()} θ-digits")
    shifted = u_eval(xi + PuiseuxNum.const(K, q, 1, e), V)
    print(f"u(ξ + 1) agrees with u(ξ) to {u0.agreement(shifted)} digits")
    ok, digits = verify_inversion_law(xi, 20)
    print(f"E inversion law at ξ: {'holds' if ok else 'fails'} to {digits} digits")


if __name__ == "__main__":
    main()
