"""Green operator traces: the A/B/C recursions verbatim and as corrected,
the exact birth-by-birth enumeration, and the float eigenvalue limits."""
import argparse

from sgop.decimation import (GREEN_L2_NORM_SQ, GREEN_TRACE, STATED_GREEN_L2_NORM_SQ, birth_sums,
                             direct_sums, exact_birth_limits, trace_recursions)

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-generation", type=int, default=45)
    ap.add_argument("--direct-generation", type=int, default=10)
    args = ap.parse_args()
    M = args.max_generation
    fixed, verbatim = trace_recursions(M), trace_recursions(M, verbatim=True)
    print(f"{'m':>3} {'1/6 - A_m':>12} {'A_m verbatim':>14} {'B_m':>12} {'B_m verbatim':>14}")
    for a, b in zip(fixed, verbatim):
        if a.m in (1, 2, 3, 5, 10, 20, 30, 38, 39, 40, 41, 42) or a.m == M:
            print(f"{a.m:3d} {float(GREEN_TRACE - a.A):12.4e} {float(b.A):14.10f} "
                  f"{float(a.B):12.10f} {float(b.B):14.10f}")
    t1, t2 = exact_birth_limits()
    print(f"closed-form totals: trace {t1}, sum 1/lambda^2 {t2} (stated {STATED_GREEN_L2_NORM_SQ})")
    e1, e2 = birth_sums(40)
    print(f"enumeration to generation 40: 1/6 - S1 = {float(GREEN_TRACE - e1):.4e}, "
          f"7/1620 - S2 = {float(GREEN_L2_NORM_SQ - e2):.4e}")
    d1, d2 = direct_sums(args.direct_generation)
    print(f"float limits, generation {args.direct_generation}: S1 = {float(d1):.12f}, "
          f"S2 = {float(d2):.15f}")
