"""Count nodal domains of Q_k and S_k, k <= 19, on the level-7 graph and
freeze them as the regression baseline used by the test suite."""
import argparse
import json
import time
from pathlib import Path

from sgop.cli import RunConfig, mesh_polynomials
from sgop.mesh import nodal_domains
from sgop.numeric import FLOAT, PrecisionConfig

DEFAULT_OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "nodal_baseline.json"


def baseline(level=7, max_degree=19, bits=512):
    out = {"level": level, "mode": FLOAT, "bits": bits, "rho_convention": "l2", "nu": {}}
    for fam in ("a3", "sym"):
        cfg = RunConfig("nodal", fam, max_degree, level, PrecisionConfig(FLOAT, bits)).validate()
        _, vals = mesh_polynomials(cfg, list(range(max_degree + 1)))
        out["nu"][fam] = [nodal_domains(mv).count for mv in vals]
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--level", type=int, default=7)
    ap.add_argument("--max-degree", type=int, default=19)
    ap.add_argument("--bits", type=int, default=512)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()
    t = time.time()
    doc = baseline(args.level, args.max_degree, args.bits)
    args.out.write_text(json.dumps(doc, indent=2) + "\n")
    for fam, nu in doc["nu"].items():
        print(fam, nu)
    print(f"wrote {args.out} in {time.time() - t:.1f}s")
