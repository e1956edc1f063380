"""Coefficient tables of the antisymmetric family p_j and the symmetric family
s_j for j <= 6, in three significant digits, plus d_k^-2, b_k, c_k."""
import argparse
from pathlib import Path

from sgop.cli import build_family, coefficient_table, recursion_csv
from sgop.inner import P3, RHO, RHO_L2, RHO_SIXFOLD
from sgop.numeric import EXACT

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-degree", type=int, default=6)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()
    runs = {"a3": (P3, RHO_SIXFOLD), "sym": (RHO, RHO_SIXFOLD), "sym_l2": (RHO, RHO_L2)}
    for name, (fam, conv) in runs.items():
        _, _, opf = build_family(fam, args.max_degree, EXACT, conv)
        table = coefficient_table(opf)
        print(f"# {name}\n{table}")
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"{name}_table.csv").write_text(table)
            (args.out / f"{name}_recursion.csv").write_text(recursion_csv(opf))
