"""Run every verification suite for a list of q and print one line per check with timings.

    python scripts/run_acceptance.py --q 2 3 --prec 300
"""

import argparse
import time

from drinfeld_nh.verify import SUITES, VerifyConfig, run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--prec", type=int, default=300)
    ap.add_argument("--vdigits", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--suite", nargs="+", default=list(SUITES), choices=SUITES)
    args = ap.parse_args()
    failed = 0
    for q in args.q:
        cfg = VerifyConfig(q=q, prec=args.prec, vdigits=args.vdigits, seed=args.seed)
        for suite in args.suite:
            t0 = time.perf_counter()
            results = run(suite, cfg)
            dt = time.perf_counter() - t0
            for r in results:
                print(f"{r.status.upper():4}  {r.id}")
            bad = sum(not r.passed for r in results)
            failed += bad
            print(f"      -> {len(results) - bad}/{len(results)} passed in {dt:.1f} s")
    print(f"total failures: {failed}")


if __name__ == "__main__":
    main()
