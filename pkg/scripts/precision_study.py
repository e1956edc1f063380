"""How far apart the Gram-Schmidt and three-term constructions drift in float
mode, against the exact rational family, as the working precision grows."""
import argparse
import math

from sgop.inner import P3, gram
from sgop.jets import compute_jet_sequences
from sgop.numeric import FLOAT, PrecisionConfig
from sgop.ortho import gram_schmidt, route_gap, three_term_build


def study(N, bits_list, family=P3):
    rows = []
    for bits in bits_list:
        cfg = PrecisionConfig(FLOAT, bits)
        jt = compute_jet_sequences(2 * N + 2, cfg)
        G = gram(family, N, jt)
        gs, tt = gram_schmidt(family, N, G), three_term_build(family, N, G, jt)
        rows.append((bits, route_gap(gs, tt), route_gap(gs, tt, relative=True)))
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-degree", type=int, default=50)
    ap.add_argument("--bits", type=int, nargs="+", default=[512, 768, 1024])
    args = ap.parse_args()
    for bits, ab, rel in study(args.max_degree, args.bits):
        print(f"bits {bits:5d}: |GS - 3T| = 2^{math.log2(ab):.1f}, relative 2^{math.log2(rel):.1f}, "
              f"target 2^-{bits // 2}")
