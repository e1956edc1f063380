"""One test per acceptance criterion. Each prints a single
``ACCEPTANCE n: PASS|FAIL  detail`` line and then asserts the verdict."""
import csv
import json
import time
from fractions import Fraction
from pathlib import Path

import pytest
from gmpy2 import mpq

from sgop.cli import RunConfig, build_family, coefficient_table, mesh_polynomials
from sgop.decimation import (GREEN_L2_NORM_SQ, GREEN_TRACE, STATED_GREEN_L2_NORM_SQ, birth_sums,
                             direct_sums, trace_recursions)
from sgop.inner import P1, P2, P3, RHO, RHO_L2, RHO_SIXFOLD, frame_analysis, gram
from sgop.mesh import (boundary_dominance, cd_kernel_check, edge_restriction,
                       evaluate_exact, graph_laplacian, mesh, nodal_domains, quadrature,
                       sibling_mismatches, symmetry_defect)
from sgop.numeric import EXACT, FLOAT, PrecisionConfig, RouteDisagreement
from sgop.ortho import (MonomialVector, cd_all, combined_onb, gram_schmidt, jacobi,
                        orthogonality_defect, route_gap, three_term_build)
from sgop.plots import line_svg, surface_svg

DATA = Path(__file__).parent / "data"
F512 = PrecisionConfig(FLOAT, 512)


@pytest.fixture
def verdict(capsys):
    def report(n, ok, detail=""):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return report


def _sci(x):
    return f"{float(x):.3e}"


def test_green_trace(verdict):
    t = time.perf_counter()
    rec = trace_recursions(40)[-1].A
    enum, _ = birth_sums(40)
    elapsed = time.perf_counter() - t
    e_rec, e_enum = abs(rec - GREEN_TRACE), abs(enum - GREEN_TRACE)
    ok = e_rec <= 1e-10 and e_enum <= 1e-10 and elapsed < 10
    verdict(1, ok, f"|A_40 - 1/6| = {_sci(e_rec)}, |enumeration - 1/6| = {_sci(e_enum)}, "
                   f"tol 1e-10, {elapsed:.2f}s")


def test_green_hilbert_schmidt(verdict):
    t = time.perf_counter()
    rec = trace_recursions(40)[-1].B
    _, direct = direct_sums(12)
    elapsed = time.perf_counter() - t
    direct = Fraction(*map(int, direct.as_integer_ratio()))
    target = STATED_GREEN_L2_NORM_SQ
    e_dir, e_rec = abs(direct - target), abs(rec - target)
    ok = e_dir <= 1e-6 and e_rec <= 1e-10 and elapsed < 30
    verdict(2, ok, f"target 45389/3564000: direct err {_sci(e_dir)} (tol 1e-6), "
                   f"recursion err {_sci(e_rec)} (tol 1e-10); both routes give 7/1620 "
                   f"(direct {_sci(abs(direct - GREEN_L2_NORM_SQ))}, "
                   f"recursion {_sci(abs(rec - GREEN_L2_NORM_SQ))}), {elapsed:.2f}s")


def _table_cells(text):
    rows = list(csv.reader(text.splitlines()))[1:]
    return {(j, l): row[l + 1] for j, row in enumerate(rows) if j >= 1 for l in range(j + 1)}


def _compare_table(family, name):
    _, _, opf = build_family(family, 6, EXACT, RHO_SIXFOLD)
    got = _table_cells(coefficient_table(opf))
    want = _table_cells((DATA / f"table_{name}.csv").read_text())
    bad = [(k, got[k], v) for k, v in want.items() if got[k] != v]
    return opf, len(want), bad


def test_table_antisymmetric(verdict):
    t = time.perf_counter()
    opf, n, bad = _compare_table(P3, "a3")
    elapsed = time.perf_counter() - t
    ok = n == 27 and not bad and opf.omega[1][0] == mpq(-11, 540) and elapsed < 5
    verdict(3, ok, f"{n - len(bad)}/{n} entries match, "
                   f"omega_10 = {opf.omega[1][0]}, {elapsed:.2f}s")


def test_table_symmetric(verdict):
    _, n, bad = _compare_table(RHO, "sym")
    verdict(4, not bad, f"{n - len(bad)}/{n} entries match {bad[:3]}")


def test_dual_route_agreement(verdict, jt_exact, a3_exact, sym_exact, jt_float):
    exact_gaps = []
    for G, opf in (a3_exact, sym_exact):
        exact_gaps.append(route_gap(opf, three_term_build(opf.family, 12, G, jt_exact)))
    G = gram(P3, 50, jt_float)
    gap = route_gap(gram_schmidt(P3, 50, G), three_term_build(P3, 50, G, jt_float))
    ok = all(g == 0 for g in exact_gaps) and gap <= Fraction(1, 2 ** 256)
    verdict(5, ok, f"rational N<=12 gaps {[str(g) for g in exact_gaps]}; "
                   f"float 512-bit N=50 gap {_sci(gap)} vs 2^-256 = {2.0 ** -256:.3e}")


def test_orthonormality(verdict, jt_exact, a3_exact, sym_exact, sym_sixfold_exact):
    defects = [orthogonality_defect(opf, G) for G, opf in (a3_exact, sym_exact, sym_sixfold_exact)]
    Ga = gram(P3, 8, jt_exact)
    Gs = gram(RHO, 8, jt_exact, RHO_L2)
    rep = combined_onb(gram_schmidt(P3, 8, Ga), gram_schmidt(RHO, 8, Gs), jt_exact)
    ok = all(d == 0 for d in defects) and rep.exact and rep.max_phi_defect() == 0
    verdict(6, ok, f"max off-diagonal {[str(d) for d in defects]}, "
                   f"combined phi Gram defect {rep.max_phi_defect()} (exact={rep.exact})")


def test_coefficient_bounds(verdict, a3_float50):
    _, opf = a3_float50
    cfg = opf.cfg
    with cfg.context():
        g2 = cfg.scalar(STATED_GREEN_L2_NORM_SQ)
        g = cfg.sqrt(g2)
        fails = []
        prod = opf.d_inv_sq[0]
        for k in range(opf.N):
            if not (-g <= opf.b[k] < 0):
                fails.append(("b", k))
        for k in range(1, opf.N + 1):
            if not (0 < opf.c[k] <= g2):
                fails.append(("c", k))
            # d_k^{-1} = sqrt(d_inv_sq[k]); the ratio bound is c_k <= ||G||^2
            if not cfg.sqrt(opf.d_inv_sq[k]) <= g * cfg.sqrt(opf.d_inv_sq[k - 1]):
                fails.append(("d", k))
            prod *= opf.c[k]
            if abs(prod - opf.d_inv_sq[k]) > 2 ** -400 * opf.d_inv_sq[k]:
                fails.append(("prod", k))
        cmax = max(opf.c[1:])
    verdict(7, not fails, f"k <= 50, max c_k = {_sci(cmax)} <= ||G||^2 = {_sci(g2)}, "
                          f"violations {fails[:5]}")


def test_christoffel_darboux(verdict, a3_float50, jt_float):
    _, opf = a3_float50
    try:
        cds = cd_all(opf, 30)  # raises unless both coefficient routes agree
        agree = True
    except RouteDisagreement:
        cds, agree = [], False
    positive = bool(cds) and all(e.positive() for e in cds)
    tol = 2.0 ** -(opf.cfg.bits // 2)
    worst = max(float(cd_kernel_check(opf, N, 6, jt_float).max_rel_discrepancy) for N in range(4))
    ok = agree and positive and worst <= tol
    verdict(8, ok, f"A^(k) > 0 for k <= 30: {positive}, routes agree: {agree}, "
                   f"kernel identity on V_6 N <= 3: max rel {worst:.1e} (tol {tol:.1e})")


def test_tight_frame(verdict, jt_exact):
    reps = [frame_analysis(j, jt_exact) for j in range(11)]
    ok = all(r.exact_pattern and r.eigenvalues == (0, 3 * r.a / 2, 3 * r.a / 2) for r in reps)
    verdict(9, ok, "frame Gram spectrum {0, 3a/2, 3a/2} for j <= 10: "
                   f"{sum(r.exact_pattern for r in reps)}/11 exact")


def test_jacobi_determinants(verdict, a3_float50):
    _, opf = a3_float50
    try:
        J = jacobi(opf, 50)  # raises unless recursion and direct determinants agree
    except RouteDisagreement as e:
        verdict(10, False, str(e))
        return
    from gmpy2 import log2
    logs = [log2(abs(d)) for d in J.det_recursion]
    decreasing = all(logs[k + 1] < logs[k] for k in range(5, 50))
    verdict(10, decreasing, f"det routes agree for n <= 50; log2|D_k| from "
                            f"{float(logs[5]):.1f} to {float(logs[50]):.1f}, strictly decreasing: {decreasing}")


def test_mesh_exactness(verdict, jt_exact):
    t = time.perf_counter()
    mismatches = sum(sibling_mismatches(MonomialVector(f, (mpq(0),) * j + (mpq(1),)), 5, jt_exact)
                     for f in (P1, P2, P3) for j in range(7))
    const_ok = all(set(evaluate_exact(MonomialVector(P1, (mpq(1),)), m, jt_exact).values) == {1}
                   for m in range(7))
    harmonic_ok = True
    for f in (P1, P2, P3):
        for base in range(3):
            mv = evaluate_exact(MonomialVector(f, (mpq(1),)), 6, jt_exact, base)
            harmonic_ok &= all(v == 0 for v in graph_laplacian(mv).values())
    p = evaluate_exact(MonomialVector(P3, (mpq(1),)), 8, jt_exact)
    q = quadrature(p, p)
    rel = abs(q - mpq(1, 30)) * 30
    elapsed = time.perf_counter() - t
    ok = mismatches == 0 and const_ok and harmonic_ok and rel <= mpq(1, 100) and elapsed < 60
    verdict(11, ok, f"sibling mismatches {mismatches}, P01 == 1: {const_ok}, harmonic annihilated: "
                    f"{harmonic_ok}, quadrature(P03,P03) at m=8 = {float(q):.7f} "
                    f"(rel {float(rel):.1e} from 1/30, {float(abs(q - mpq(3, 10)) * 10 / 3):.2f} from 3/10), "
                    f"{elapsed:.1f}s")


def test_figures(verdict, tmp_path):
    bad, dominance = [], []
    n_svg = 0
    for fam, degrees in (("a3", [0, 3, 4, 7]), ("sym", [0, 3, 5, 6])):
        cfg = RunConfig("plot", fam, 7, 7, F512).validate()
        _, vals = mesh_polynomials(cfg, degrees)
        g = mesh(7)
        perms = [(g.reflection(), -1 if fam == "a3" else 1)]
        if fam == "sym":
            perms.append((g.rotation(), 1))
        for k, mv in zip(degrees, vals):
            scale = max(abs(v) for v in mv.values)
            for perm, parity in perms:
                if symmetry_defect(mv, parity, perm) > 2 ** -256 * scale:
                    bad.append((fam, k))
            name = "Q" if fam == "a3" else "S"
            (tmp_path / f"{name}{k}.svg").write_text(surface_svg(mv, f"{name}_{k}"))
            edges = {e: edge_restriction(mv, e) for e in ("bottom", "side0")}
            (tmp_path / f"{name}{k}_edges.svg").write_text(line_svg(edges, f"{name}_{k} edges"))
            n_svg += 2
            if fam == "a3":
                b, i = boundary_dominance(mv)
                dominance.append(b > i)
    ok = not bad and n_svg == 16
    verdict(12, ok, f"{n_svg} SVGs, symmetry failures {bad}; boundary dominance "
                    f"(report only) {sum(dominance)}/{len(dominance)}")


def test_nodal_baselines(verdict):
    frozen = json.loads((DATA / "nodal_baseline.json").read_text())
    cfg_prec = PrecisionConfig(FLOAT, frozen["bits"])
    got = {}
    for fam in ("a3", "sym"):
        cfg = RunConfig("nodal", fam, 19, frozen["level"], cfg_prec).validate()
        _, vals = mesh_polynomials(cfg, list(range(20)))
        got[fam] = [nodal_domains(mv).count for mv in vals]
    ok = got == frozen["nu"]
    verdict(13, ok, f"level {frozen['level']}: a3 {got['a3']}, sym {got['sym']}")
