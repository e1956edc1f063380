"""Command line front end: sequences, green, build, plot, nodal.

Exit status: 0 when every internal cross-check passed, 1 when a check failed
(route disagreement, precision loss, symmetry defect), 2 for invalid options.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .decimation import green_report, trace_recursions, trace_recursions_csv
from .inner import P3, RHO, RHO_L2, RHO_SIXFOLD, gram
from .jets import compute_jet_sequences
from .mesh import (EDGES, edge_restriction, evaluate_many, mesh, nodal_domains,
                   symmetry_defect)
from .numeric import FLOAT, RATIONAL, PrecisionConfig, RouteDisagreement, to_decimal_string, to_text
from .ortho import (MonomialVector, OPFamily, PrecisionLoss, combined_onb, gram_schmidt, jacobi,
                    orthonormal_rows, route_gap, three_term_build, with_recursion)
from .plots import line_svg, nodal_svg, surface_svg

COMMANDS = ("sequences", "green", "build", "plot", "nodal")
FAMILIES = {"a3": P3, "sym": RHO, "combined": None}
PLOT_KINDS = ("surface", "edge", "nodal", "coeff-series", "jacobi-det")
MAX_RENDER_LEVEL = 9
OK, CHECK_FAILED, BAD_OPTIONS = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str = "a3"
    max_degree: int = 20
    level: int = 7
    precision: PrecisionConfig = PrecisionConfig()
    out: str | None = None
    max_generation: int = 40
    kind: str = "surface"
    degree: int = 0
    edge: str = "bottom"
    rho_convention: str | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {sorted(FAMILIES)}")
        if self.family == "combined" and self.command != "build":
            raise ConfigError("family 'combined' is only available for build")
        if self.max_degree < 0 or self.level < 0 or self.degree < 0:
            raise ConfigError("degrees and levels must be non-negative")
        if self.max_generation < 1:
            raise ConfigError("max-generation must be >= 1")
        if self.kind not in PLOT_KINDS:
            raise ConfigError(f"kind must be one of {PLOT_KINDS}")
        if self.edge not in EDGES:
            raise ConfigError(f"edge must be one of {EDGES}")
        conv = self.rho_convention
        if conv is not None:
            if conv not in (RHO_SIXFOLD, RHO_L2):
                raise ConfigError(f"rho convention must be {RHO_SIXFOLD!r} or {RHO_L2!r}")
            if self.family == "a3":
                raise ConfigError("--rho-convention applies to the symmetric family only")
            if self.family == "combined" and conv != RHO_L2:
                raise ConfigError("the combined system needs --rho-convention l2")
        if self.command == "build" and self.max_degree < 1:
            raise ConfigError("build needs --max-degree >= 1")
        if self.command in ("plot", "nodal"):
            if self.command == "nodal" or self.kind in ("surface", "nodal"):
                if self.level > MAX_RENDER_LEVEL:
                    raise ConfigError(f"level {self.level} exceeds the render limit {MAX_RENDER_LEVEL}")
            if self.command == "plot" and self.kind in ("surface", "edge", "nodal") \
                    and self.degree > self.max_degree:
                raise ConfigError("--degree exceeds --max-degree")
            if self.command == "plot" and self.kind == "jacobi-det" and self.precision.exact:
                raise ConfigError("jacobi-det needs --mode float (square roots of c_k)")
        return self

    @property
    def convention(self) -> str:
        if self.rho_convention:
            return self.rho_convention
        # tables use the sixfold Gram; mesh work wants the true L2 orthogonal family
        return RHO_SIXFOLD if self.command == "build" and self.family == "sym" else RHO_L2


# ---------------------------------------------------------------- library glue

def build_family(family: str, N: int, cfg: PrecisionConfig, convention: str = RHO_L2):
    """(jet table, Gram matrix, Gram-Schmidt family with b_k, c_k attached)."""
    jt = compute_jet_sequences(2 * N + 2, cfg)
    G = gram(family, N, jt, convention)
    opf = with_recursion(gram_schmidt(family, N, G), G, jt)
    return jt, G, opf


def route_tolerance(cfg: PrecisionConfig):
    return 0 if cfg.exact else 2 ** (-(cfg.bits // 2))


def table_cell(x) -> str:
    """Three significant digits in the x.xxE-yy layout; exact 0 and 1 stay bare."""
    if x == 0:
        return "0"
    if x == 1:
        return "1"
    return to_decimal_string(x, 3)


def coefficient_table(opf: OPFamily, rows: int | None = None) -> str:
    n = opf.N + 1 if rows is None else min(rows, opf.N + 1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    label = "p" if opf.family == P3 else "s"
    basis = "P_{},3" if opf.family == P3 else "rho_{}"
    w.writerow([""] + [basis.format(l) for l in range(n)])
    for j in range(n):
        w.writerow([f"{label}_{j}"] + [table_cell(opf.omega[j][l]) if l <= j else "0"
                                      for l in range(n)])
    return buf.getvalue()


def recursion_csv(opf: OPFamily) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "d_inv_sq", "b", "c"])
    for k in range(opf.N + 1):
        w.writerow([k, to_text(opf.d_inv_sq[k]),
                    to_text(opf.b[k]) if k < len(opf.b) else "",
                    to_text(opf.c[k]) if 0 < k < len(opf.c) else ""])
    return buf.getvalue()


def mesh_polynomials(cfg: RunConfig, degrees) -> tuple:
    """Mesh values of Q_k (float mode) or the monic p_k (rational mode)."""
    fam = FAMILIES[cfg.family]
    N = max(max(degrees), 1)
    jt, G, opf = build_family(fam, N, cfg.precision, cfg.convention)
    rows = opf.omega if cfg.precision.exact else orthonormal_rows(opf)
    vals = evaluate_many([MonomialVector(fam, rows[k]) for k in degrees], cfg.level, jt)
    return opf, vals


def _emit(text: str, out: str | None, name: str | None = None):
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if name is not None:
        path.mkdir(parents=True, exist_ok=True)
        path = path / name
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ---------------------------------------------------------------- commands

def cmd_sequences(cfg: RunConfig) -> int:
    jt = compute_jet_sequences(cfg.max_degree, cfg.precision)
    _emit(jt.to_csv(), cfg.out)
    return OK


def cmd_green(cfg: RunConfig) -> int:
    M = cfg.max_generation
    trace = green_report("trace", M, direct_generation=None)
    hs = green_report("hs_norm_sq", M, direct_generation=min(12, M))
    doc = {"trace": trace.to_json(), "hs_norm_sq": hs.to_json()}
    if cfg.out is None:
        _emit(json.dumps(doc, indent=2) + "\n", None)
    else:
        _emit(json.dumps(doc, indent=2) + "\n", cfg.out, "green.json")
        _emit(trace_recursions_csv(trace_recursions(M)), cfg.out, "recursions.csv")
        _emit(trace_recursions_csv(trace_recursions(M, verbatim=True)), cfg.out,
              "recursions_verbatim.csv")
    for r in (trace, hs):
        if not r.agree:
            print(f"{r.name}: routes disagree {json.dumps(r.to_json()['abs_error'])}", file=sys.stderr)
    return OK if trace.agree and hs.agree else CHECK_FAILED


def cmd_build(cfg: RunConfig) -> int:
    p = cfg.precision
    N = cfg.max_degree
    if cfg.family == "combined":
        jt, _, a = build_family(P3, N, p)
        _, _, s = build_family(RHO, N, p, RHO_L2)
        rep = combined_onb(a, s, jt)
        defect = rep.max_phi_defect()
        ok = defect <= route_tolerance(p)
        doc = {"family": "combined", "N": N, "mode": p.mode, "exact_cross_terms": rep.exact,
               "max_phi_defect": to_text(defect), "ok": bool(ok)}
        _emit(json.dumps(doc, indent=2) + "\n", cfg.out, None if cfg.out is None else "combined.json")
        return OK if ok else CHECK_FAILED
    fam = FAMILIES[cfg.family]
    conv = cfg.convention
    jt, G, gs = build_family(fam, N, p, conv)
    doc = gs.to_json()
    ok = True
    if fam == P3 or conv == RHO_L2:
        tt = three_term_build(fam, N, G, jt)
        gap = route_gap(gs, tt)
        ok = gap <= route_tolerance(p)
        doc["route_gap"] = to_text(gap)
        doc["route_gap_log2"] = None if gap == 0 else round(math.log2(gap), 2)
    else:
        # the sixfold Gram is not the L2 Gram of rho_j, so the Green operator
        # route does not apply to it
        doc["route_gap"] = None
        doc["route_note"] = "three-term route requires --rho-convention l2"
    doc["routes_agree"] = bool(ok)
    if cfg.out is None:
        _emit(json.dumps(doc, indent=2) + "\n", None)
    else:
        _emit(json.dumps(doc, indent=2) + "\n", cfg.out, f"{cfg.family}.json")
        _emit(coefficient_table(gs), cfg.out, f"{cfg.family}_table.csv")
        _emit(recursion_csv(gs), cfg.out, f"{cfg.family}_recursion.csv")
    return OK if ok else CHECK_FAILED


def cmd_plot(cfg: RunConfig) -> int:
    kind = cfg.kind
    name = "Q" if cfg.family == "a3" else "S"
    if cfg.precision.exact:
        name = name.lower()
    if kind in ("coeff-series", "jacobi-det"):
        _, _, opf = build_family(FAMILIES[cfg.family], cfg.max_degree, cfg.precision, cfg.convention)
        if kind == "coeff-series":
            series = {
                "log10 d_k^2": [(k, -_log10(opf.d_inv_sq[k])) for k in range(opf.N + 1)],
                "log10 (-b_k)": [(k, _log10(-opf.b[k])) for k in range(len(opf.b)) if opf.b[k] < 0],
                "log10 c_k": [(k, _log10(opf.c[k])) for k in range(1, len(opf.c))],
            }
            svg = line_svg(series, f"recursion coefficients ({cfg.family})", "k", "log10")
        else:
            J = jacobi(opf, opf.N)
            series = {"log10 |D_k|": [(k, _log10(abs(d))) for k, d in enumerate(J.det_recursion)
                                      if d != 0]}
            svg = line_svg(series, f"Jacobi determinants ({cfg.family})", "k", "log10 |D_k|")
        _emit(svg, cfg.out)
        return OK
    _, (mv,) = mesh_polynomials(cfg, [cfg.degree])
    parity = -1 if cfg.family == "a3" else 1
    defect = symmetry_defect(mv, parity)
    scale = max(abs(v) for v in mv.values)
    ok = defect <= route_tolerance(cfg.precision) * (scale if scale else 1)
    title = f"{name}_{cfg.degree} on level {cfg.level}"
    if kind == "surface":
        svg = surface_svg(mv, title)
    elif kind == "nodal":
        svg = nodal_svg(mv, nodal_domains(mv), title)
    else:
        svg = line_svg({cfg.edge: [(t, v) for t, v in edge_restriction(mv, cfg.edge)]},
                       f"{title}, {cfg.edge} edge", "t", "value")
    _emit(svg, cfg.out)
    if not ok:
        print(f"symmetry check failed: defect {to_text(defect)}", file=sys.stderr)
    return OK if ok else CHECK_FAILED


def cmd_nodal(cfg: RunConfig) -> int:
    degrees = list(range(cfg.max_degree + 1))
    _, vals = mesh_polynomials(cfg, degrees)
    results = [nodal_domains(mv) for mv in vals]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "nu"])
    for k, r in zip(degrees, results):
        w.writerow([k, r.count])
    if cfg.out is None:
        _emit(buf.getvalue(), None)
        return OK
    _emit(buf.getvalue(), cfg.out, f"nodal_{cfg.family}.csv")
    lab = io.StringIO()
    w = csv.writer(lab, lineterminator="\n")
    w.writerow(["word", "corner"] + [f"k{k}" for k in degrees])
    g = mesh(cfg.level)
    for n, addr in enumerate(g.addresses):
        w.writerow(["".join(map(str, addr.word)), addr.corner] + [r.labels[n] for r in results])
    _emit(lab.getvalue(), cfg.out, f"labels_{cfg.family}.csv")
    name = "Q" if cfg.family == "a3" else "S"
    for k, mv, r in zip(degrees, vals, results):
        _emit(nodal_svg(mv, r, f"{name}_{k}, level {cfg.level}"), cfg.out,
              f"nodal_{cfg.family}_{k:02d}.svg")
    return OK


def _log10(x) -> float:
    from gmpy2 import log10, mpfr

    return float(log10(mpfr(x)))


HANDLERS = {"sequences": cmd_sequences, "green": cmd_green, "build": cmd_build,
            "plot": cmd_plot, "nodal": cmd_nodal}


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sgop", description="orthogonal polynomials on the Sierpinski gasket")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--family", default="a3", choices=sorted(FAMILIES))
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--degree", type=int, default=0, help="polynomial plotted by 'plot'")
    p.add_argument("--level", type=int, default=7)
    p.add_argument("--mode", default=RATIONAL, choices=(RATIONAL, FLOAT))
    p.add_argument("--bits", type=int, default=512)
    p.add_argument("--digits", type=int, default=20)
    p.add_argument("--out", default=None)
    p.add_argument("--max-generation", type=int, default=40)
    p.add_argument("--kind", default="surface", choices=PLOT_KINDS)
    p.add_argument("--edge", default="bottom", choices=EDGES)
    p.add_argument("--rho-convention", default=None, choices=(RHO_SIXFOLD, RHO_L2))
    return p


def config_from_args(argv=None) -> RunConfig:
    a = parser().parse_args(argv)
    try:
        prec = PrecisionConfig(a.mode, a.bits, a.digits)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    max_degree = a.max_degree
    if max_degree is None:
        max_degree = max(a.degree, 6 if a.command in ("build", "sequences") else 19)
    return RunConfig(a.command, a.family, max_degree, a.level, prec, a.out, a.max_generation,
                     a.kind, a.degree, a.edge, a.rho_convention).validate()


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except ConfigError as e:
        print(f"sgop: {e}", file=sys.stderr)
        return BAD_OPTIONS
    try:
        return HANDLERS[cfg.command](cfg)
    except (PrecisionLoss, RouteDisagreement) as e:
        print(f"sgop: {e}", file=sys.stderr)
        return CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
