"""Tabulate U_k^r(g) for k ∈ {q−1, q+1}, 2 ≤ r ≤ q+1 under two coefficient normalizations.

"gcd" divides the integer coefficients c̃_v by their gcd before reducing mod p;
"raw" reduces c̃_v mod p directly.  Prints the valuation of the result
(None means the series vanishes to the working precision).
"""

import argparse

from drinfeld_nh.field import field
from drinfeld_nh.forms import generators
from drinfeld_nh.operators import UCoeffs, u_operator


def raw_table(r: int, k: int, p: int) -> UCoeffs:
    t = UCoeffs.compute(r, k, p)
    return UCoeffs(r, k, p, t.tilde, 1, tuple(c % p for c in t.tilde))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--prec", type=int, default=120)
    args = ap.parse_args()
    print("q  k  r  c̃_v                          gcd  gcd-valuation  raw-valuation")
    for q in args.q:
        F = field(q)
        g = generators(F, args.prec).g()
        for k in (q - 1, q + 1):
            for r in range(2, q + 2):
                t = UCoeffs.compute(r, k, F.p)
                v_gcd = u_operator(g, k, r, t).valuation()
                v_raw = u_operator(g, k, r, raw_table(r, k, F.p)).valuation()
                print(f"{q}  {k}  {r}  {str(t.tilde):28} {t.gcd:4}  {str(v_gcd):13}  {v_raw}")


if __name__ == "__main__":
    main()
