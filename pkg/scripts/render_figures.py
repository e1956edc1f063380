"""Surface, edge, nodal and coefficient plots at desk scale (level 7)."""
import argparse
from pathlib import Path

from sgop.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--level", type=int, default=7)
    args = ap.parse_args()
    f = ["--mode", "float", "--level", str(args.level)]
    status = 0
    for fam, degrees in (("a3", (0, 3, 4, 7)), ("sym", (0, 3, 5, 6))):
        for k in degrees:
            status |= main(["plot", "--family", fam, "--degree", str(k), "--kind", "surface",
                            "--out", str(args.out / f"surface_{fam}_{k}.svg")] + f)
    for fam, degrees in (("a3", (1, 2, 3, 4)), ("sym", (1, 2, 3, 4))):
        for k in degrees:
            for edge in ("bottom", "side0"):
                status |= main(["plot", "--family", fam, "--degree", str(k), "--kind", "edge",
                                "--edge", edge, "--out", str(args.out / f"edge_{fam}_{k}_{edge}.svg")] + f)
    status |= main(["plot", "--kind", "coeff-series", "--max-degree", "50", "--mode", "float",
                    "--out", str(args.out / "coefficients_a3.svg")])
    status |= main(["plot", "--kind", "jacobi-det", "--max-degree", "50", "--mode", "float",
                    "--out", str(args.out / "jacobi_a3.svg")])
    raise SystemExit(status)
