"""Graph approximations Gamma_m of the gasket and polynomial evaluation on them.

Points are stored on the integer lattice 2^m * (barycentric coordinates of
q_1, q_2): q_0 = (0, 0), q_1 = (2^m, 0), q_2 = (0, 2^m), and
F_{w_1} ... F_{w_m}(q_i) = sum_t 2^{m-1-t} q_{w_t} + q_i.

Two evaluation routes:

* ``evaluate_exact`` pushes the jet of the polynomial at the base corner of
  each cell down to its children. A jet is the vector
  (Delta^m u, d_n Delta^m u, d_T Delta^m u)_{m=0..J} at one corner; moving it
  to another corner of the same cell uses the monomial boundary data, moving
  into the child F_i uses the scalings 5^{-m} (1, 3/5, 1/5).
* ``evaluate_discrete`` solves (3/2) 5^m Delta_m u = Delta u degree by degree
  with exact boundary data, by eliminating midpoints level by level.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from flint import arb, arb_mat, fmpq, fmpq_mat
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .inner import FAMILY_INDEX, RHO
from .jets import JET_SCALE, JetTable, corner_data
from .numeric import PrecisionConfig, Scalar, arb_precision, arb_to_mpfr, as_rational, to_text

Q_LATTICE = ((0, 0), (1, 0), (0, 1))
EDGES = ("bottom", "side0", "side1")
EXACT_JET, DISCRETE = "exact-jet", "discrete-solve"


@dataclass(frozen=True, order=True)
class VertexAddress:
    word: tuple
    corner: int

    def __str__(self):
        return "".join(map(str, self.word)) + f":{self.corner}"


def _point(word, i, m):
    a = b = 0
    for t, w in enumerate(word):
        s = 1 << (m - 1 - t)
        a += s * Q_LATTICE[w][0]
        b += s * Q_LATTICE[w][1]
    return a + Q_LATTICE[i][0] * (1 << (m - len(word))), b + Q_LATTICE[i][1] * (1 << (m - len(word)))


class SGMesh:
    """Vertices, cells and edges of Gamma_m in canonical order."""

    def __init__(self, m: int):
        if m < 0:
            raise ValueError("level must be >= 0")
        self.m = m
        self.scale = 1 << m
        words = [()]
        for _ in range(m):
            words = [w + (c,) for w in words for c in range(3)]
        self.cells = words
        index, addresses, points = {}, [], []
        cell_corners = []
        for w in words:
            corners = []
            for i in range(3):
                p = _point(w, i, m)
                if p not in index:
                    index[p] = len(points)
                    points.append(p)
                    addresses.append(VertexAddress(w, i))
                corners.append(index[p])
            cell_corners.append(tuple(corners))
        self.index = index
        self.points = points
        self.addresses = addresses
        self.cell_corners = cell_corners
        self.cell_index = {w: n for n, w in enumerate(words)}
        edges = set()
        for c in cell_corners:
            for a, b in ((0, 1), (1, 2), (0, 2)):
                edges.add((min(c[a], c[b]), max(c[a], c[b])))
        self.edges = sorted(edges)
        self.boundary = tuple(index[p] for p in ((0, 0), (self.scale, 0), (0, self.scale)))

    @property
    def size(self) -> int:
        return len(self.points)

    def xy(self, n: int) -> tuple:
        """Equilateral embedding: q_0 at the apex, q_1 bottom right, q_2 bottom left."""
        a, b = self.points[n]
        s = self.scale
        return 0.5 + 0.5 * (a - b) / s, math.sqrt(3) / 2 * (1 - (a + b) / s)

    def reflection(self) -> list:
        """Vertex permutation of the reflection fixing q_0 and swapping q_1, q_2."""
        return [self.index[(b, a)] for a, b in self.points]

    def rotation(self) -> list:
        """Vertex permutation of the rotation q_0 -> q_1 -> q_2 -> q_0."""
        s = self.scale
        return [self.index[(s - a - b, a)] for a, b in self.points]

    def edge_vertices(self, edge: str) -> list:
        """(t, vertex) along a boundary edge, t in [0, 1] increasing."""
        s = self.scale
        out = []
        for n, (a, b) in enumerate(self.points):
            if edge == "bottom" and a + b == s:
                out.append((Fraction(b, s), n))
            elif edge == "side0" and b == 0:
                out.append((Fraction(a, s), n))
            elif edge == "side1" and a == 0:
                out.append((Fraction(b, s), n))
        if edge not in EDGES:
            raise ValueError(f"edge must be one of {EDGES}")
        return sorted(out)


@lru_cache(maxsize=12)
def mesh(m: int) -> SGMesh:
    return SGMesh(m)


def vertex_set(m: int) -> list:
    return list(mesh(m).addresses)


@dataclass(frozen=True)
class MeshValues:
    level: int
    values: tuple
    provenance: str
    cfg: PrecisionConfig

    @property
    def mesh(self) -> SGMesh:
        return mesh(self.level)

    def __getitem__(self, n):
        return self.values[n]

    def scaled(self, s) -> "MeshValues":
        with self.cfg.context():
            return MeshValues(self.level, tuple(s * v for v in self.values), self.provenance, self.cfg)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["word", "corner", "x", "y", "value"])
        g = self.mesh
        for n, addr in enumerate(g.addresses):
            x, y = g.xy(n)
            w.writerow(["".join(map(str, addr.word)), addr.corner, f"{x:.12g}", f"{y:.12g}",
                        to_text(self.values[n])])
        return buf.getvalue()


# ---------------------------------------------------------------- jet transfer

def jet_transfer_matrices(jt: JetTable, J: int) -> tuple:
    """(M_0, M_1, M_2, D): M_r moves a jet from a cell's base corner to the corner
    r steps further round; D rescales a jet into the child cell at that corner.

    Jet index 3m + tau with tau = 0 value, 1 normal, 2 tangential derivative
    of Delta^m u. Entry M_r[3m+tau, 3l+k-1] is the tau-datum of P_{(l-m)k} at
    relative corner r.
    """
    if J > jt.max_degree:
        raise ValueError(f"jet table has degree {jt.max_degree}, need {J}")
    d = 3 * (J + 1)
    mats = []
    for r in range(3):
        M = [[jt.cfg.zero()] * d for _ in range(d)]
        for m in range(J + 1):
            for l in range(m, J + 1):
                for k in (1, 2, 3):
                    data = corner_data(jt, k, l - m, r, 0)
                    for tau in range(3):
                        M[3 * m + tau][3 * l + k - 1] = data[tau]
        mats.append(M)
    scale = [Fraction(1, 5 ** m) * (Fraction(*s) if isinstance(s, tuple) else s)
             for m in range(J + 1) for s in JET_SCALE]
    return mats[0], mats[1], mats[2], scale


def root_jet(v, jt: JetTable, base: int = 0) -> list:
    """Jet at q_0 of a monomial combination. ``v`` is a MonomialVector of
    family P1/P2/P3 (based at ``base``) or RHO (sum over the three bases)."""
    J = v.degree
    bases = (0, 1, 2) if v.family == RHO else (base,)
    k = 1 if v.family == RHO else FAMILY_INDEX[v.family]
    out = [jt.cfg.zero()] * (3 * (J + 1))
    with jt.cfg.context():
        for j, c in enumerate(v.coeffs):
            if c == 0:
                continue
            for m in range(j + 1):
                for b in bases:
                    data = corner_data(jt, k, j - m, 0, b)
                    for tau in range(3):
                        if data[tau] != 0:
                            out[3 * m + tau] += c * data[tau]
    return out


def _to_fmpq(x) -> fmpq:
    q = as_rational(x)
    return fmpq(int(q.numerator), int(q.denominator))


class _Backend:
    """fmpq_mat in rational mode, arb_mat at raised precision in float mode."""

    def __init__(self, cfg: PrecisionConfig):
        self.cfg = cfg
        self.prec = 2 * cfg.bits + 64

    def mat(self, rows):
        if self.cfg.exact:
            return fmpq_mat([[_to_fmpq(x) for x in r] for r in rows])
        with arb_precision(self.prec):
            return arb_mat([[arb(_to_fmpq(x)) for x in r] for r in rows])

    def mul(self, A, B):
        if self.cfg.exact:
            return A * B
        with arb_precision(self.prec):
            return A * B

    def scalar(self, x):
        if self.cfg.exact:
            return as_rational_from_fmpq(x)
        if not x.is_exact() and not x.contains(0) and x.rel_accuracy_bits() < self.cfg.bits:
            raise ArithmeticError(f"mesh value kept only {x.rel_accuracy_bits()} bits; "
                                  "increase --bits")
        return arb_to_mpfr(x, self.cfg.bits)


def as_rational_from_fmpq(x):
    from gmpy2 import mpq

    return mpq(int(x.p), int(x.q))


class SiblingMismatch(ArithmeticError):
    """A vertex shared by two cells received different values."""


def evaluate_many(vectors, m: int, jt: JetTable, base: int = 0) -> list:
    """Evaluate several monomial combinations of one family at every vertex of V_m."""
    out, bad = _propagate(vectors, m, jt, base)
    if bad:
        raise SiblingMismatch(f"{len(bad)} shared vertices disagree, first at "
                              f"{mesh(m).addresses[bad[0]]}")
    return [MeshValues(m, tuple(vals), EXACT_JET, jt.cfg) for vals in out]


def sibling_mismatches(v, m: int, jt: JetTable, base: int = 0) -> int:
    """Number of junction points whose two cell expansions disagree."""
    return len(_propagate([v], m, jt, base)[1])


def _propagate(vectors, m, jt, base):
    if m < 0:
        raise ValueError("level must be >= 0")
    if not vectors:
        return [], []
    J = max(v.degree for v in vectors)
    cfg = jt.cfg
    be = _Backend(cfg)
    M0, M1, M2, scale = jet_transfer_matrices(jt, J)
    d = 3 * (J + 1)
    D = be.mat([[scale[i] if i == j else 0 for j in range(d)] for i in range(d)])
    DM = [D, be.mul(D, be.mat(M1)), be.mul(D, be.mat(M2))]
    P = len(vectors)
    cols = []
    for v in vectors:
        r = root_jet(v, jt, base)
        cols.append(r + [cfg.zero()] * (d - len(r)))
    # one d x P jet block per cell; the child at letter (b + r) % 3 of a cell
    # with base corner b receives D M_r times the parent block
    blocks = [((), 0, be.mat([[cols[p][i] for p in range(P)] for i in range(d)]))]
    for _ in range(m):
        blocks = [(w + ((b + r) % 3,), (b + r) % 3, be.mul(DM[r], X))
                  for w, b, X in blocks for r in range(3)]
    rows = [be.mat([M0[0]]), be.mat([M1[0]]), be.mat([M2[0]])]
    g = mesh(m)
    out = [[None] * g.size for _ in range(P)]
    bad = []
    tol = cfg.tolerance()
    for w, b, X in blocks:
        corners = g.cell_corners[g.cell_index[w]]
        for r in range(3):
            vert = corners[(b + r) % 3]
            vals = be.mul(rows[r], X)
            for p in range(P):
                x = be.scalar(vals[0, p])
                prev = out[p][vert]
                if prev is None:
                    out[p][vert] = x
                elif prev != x and (cfg.exact or abs(prev - x) > tol * (1 + abs(x))):
                    bad.append(vert)
    return out, bad


def evaluate_exact(v, m: int, jt: JetTable, base: int = 0) -> MeshValues:
    return evaluate_many([v], m, jt, base)[0]


def boundary_values(v, jt: JetTable, base: int = 0) -> list:
    """bv[i][n] = Delta^i v at q_n, read off the root jet."""
    J = v.degree
    M = jet_transfer_matrices(jt, J)[:3]
    r = root_jet(v, jt, base)
    with jt.cfg.context():
        out = []
        for i in range(J + 1):
            row = []
            for n in range(3):
                corner = (n - 0) % 3
                row.append(sum((M[corner][3 * i][c] * r[c] for c in range(len(r)) if r[c] != 0),
                               jt.cfg.zero()))
            out.append(row)
    return out


# ---------------------------------------------------------------- discrete route

@lru_cache(maxsize=12)
def _coarsening(m: int) -> tuple:
    """For each level-(m-1) cell: fine indices of its corners and of the
    midpoints z_i opposite corner i, plus the coarse -> fine vertex map."""
    fine, coarse = mesh(m), mesh(m - 1)
    up = [fine.index[(2 * a, 2 * b)] for a, b in coarse.points]
    cells = []
    for corners in coarse.cell_corners:
        pts = [coarse.points[c] for c in corners]
        mids = []
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            mids.append(fine.index[(pts[j][0] + pts[k][0], pts[j][1] + pts[k][1])])
        cells.append((tuple(up[c] for c in corners), tuple(mids), corners))
    return tuple(up), tuple(cells)


def solve_dirichlet(m: int, g: list, boundary: tuple, cfg: PrecisionConfig) -> list:
    """u on V_m with Delta_m u = g at interior vertices and u(q_n) = boundary[n].

    Eliminating the three midpoints of every level-(m-1) cell leaves
    Delta_{m-1} u(a) = (5/3) [g(a) + (1/5) sum (g(z_opp) + 2 g(z_adj) + 2 g(z_adj'))]
    at the coarse vertices; the midpoints are then
    z_i = (u_j + u_k - g_i)/5 + (2 U - G)/10.
    """
    if m == 0:
        return list(boundary)
    up, cells = _coarsening(m)
    coarse = mesh(m - 1)
    with cfg.context():
        gc = [g[up[n]] for n in range(coarse.size)]
        for _, mids, corners in cells:
            gz = [g[z] for z in mids]
            for i in range(3):
                j, k = (i + 1) % 3, (i + 2) % 3
                gc[corners[i]] += (gz[i] + 2 * gz[j] + 2 * gz[k]) / 5
        gc = [x * 5 / 3 for x in gc]
        uc = solve_dirichlet(m - 1, gc, boundary, cfg)
        u = [None] * mesh(m).size
        for n, f in enumerate(up):
            u[f] = uc[n]
        for _, mids, corners in cells:
            uu = [uc[c] for c in corners]
            gz = [g[z] for z in mids]
            U, G = sum(uu), sum(gz)
            for i in range(3):
                j, k = (i + 1) % 3, (i + 2) % 3
                u[mids[i]] = (uu[j] + uu[k] - gz[i]) / 5 + (2 * U - G) / 10
    return u


def evaluate_discrete(v, m: int, jt: JetTable, base: int = 0) -> MeshValues:
    """Solve (3/2) 5^m Delta_m w_i = w_{i+1} from w_J (harmonic) down to w_0 = v."""
    if m < 1:
        raise ValueError("level must be >= 1")
    cfg = jt.cfg
    bv = boundary_values(v, jt, base)
    n = mesh(m).size
    w = [cfg.zero()] * n
    with cfg.context():
        factor = cfg.scalar(2) / 3 / cfg.scalar(5) ** m
        for i in range(v.degree, -1, -1):
            g = [factor * x for x in w]
            w = solve_dirichlet(m, g, tuple(bv[i]), cfg)
    return MeshValues(m, tuple(w), DISCRETE, cfg)


def graph_laplacian(mv: MeshValues) -> dict:
    """Delta_m at every interior vertex."""
    g = mv.mesh
    acc = {}
    with mv.cfg.context():
        for a, b in g.edges:
            d = mv.values[b] - mv.values[a]
            acc[a] = acc.get(a, 0) + d
            acc[b] = acc.get(b, 0) - d
    for q in g.boundary:
        acc.pop(q, None)
    return acc


def max_abs_difference(a: MeshValues, b: MeshValues):
    if a.level != b.level:
        raise ValueError("level mismatch")
    with a.cfg.context():
        return max(abs(x - y) for x, y in zip(a.values, b.values))


# ---------------------------------------------------------------- analysis

def quadrature(a: MeshValues, b: MeshValues) -> Scalar:
    """sum over cells of 3^{-m} times the mean of a*b over the cell's corners."""
    if a.level != b.level:
        raise ValueError(f"level mismatch: {a.level} != {b.level}")
    cfg = a.cfg
    g = a.mesh
    with cfg.context():
        acc = cfg.zero()
        for c in g.cell_corners:
            for n in c:
                acc += a.values[n] * b.values[n]
        return acc / (3 * cfg.scalar(3) ** a.level)


def edge_restriction(mv: MeshValues, edge: str) -> list:
    """[(t, value)] along a boundary edge: bottom from q_1 (t=0) to q_2,
    side0 from q_0 to q_1, side1 from q_0 to q_2."""
    return [(t, mv.values[n]) for t, n in mv.mesh.edge_vertices(edge)]


def edge_series_csv(series) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value"])
    for t, v in series:
        w.writerow([f"{t.numerator}/{t.denominator}" if t.denominator != 1 else str(t.numerator),
                    to_text(v)])
    return buf.getvalue()


def signs(mv: MeshValues, zero_tol=None) -> list:
    """+1/-1/0 per vertex. In float mode values below zero_tol (default
    2^-(bits/2) times the largest magnitude) count as zero."""
    if zero_tol is None:
        zero_tol = 0
        if not mv.cfg.exact:
            zero_tol = mv.cfg.tolerance() * max(abs(x) for x in mv.values)
    return [0 if abs(x) <= zero_tol else (1 if x > 0 else -1) for x in mv.values]


def zero_crossings(mv: MeshValues, zero_tol=None) -> list:
    s = signs(mv, zero_tol)
    return [(a, b) for a, b in mv.mesh.edges if s[a] * s[b] < 0]


@dataclass(frozen=True)
class NodalResult:
    count: int
    labels: tuple   # component per vertex, -1 on zeros; numbered by smallest vertex


def nodal_domains(mv: MeshValues, zero_tol=None) -> NodalResult:
    s = signs(mv, zero_tol)
    g = mv.mesh
    n = g.size
    rows = [a for a, b in g.edges if s[a] != 0 and s[a] == s[b]]
    cols = [b for a, b in g.edges if s[a] != 0 and s[a] == s[b]]
    A = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, raw = connected_components(A, directed=False)
    relabel, labels = {}, []
    for v in range(n):
        if s[v] == 0:
            labels.append(-1)
            continue
        labels.append(relabel.setdefault(raw[v], len(relabel)))
    return NodalResult(len(relabel), tuple(labels))


def symmetry_defect(mv: MeshValues, parity: int, perm: list | None = None):
    """max |u(R x) - parity u(x)| for the reflection R (or any vertex permutation)."""
    perm = perm or mv.mesh.reflection()
    with mv.cfg.context():
        return max(abs(mv.values[perm[n]] - parity * mv.values[n]) for n in range(len(perm)))


def boundary_dominance(mv: MeshValues) -> tuple:
    """(max |u| on V_0, max |u| elsewhere)."""
    b = set(mv.mesh.boundary)
    return (max(abs(mv.values[n]) for n in b),
            max(abs(x) for n, x in enumerate(mv.values) if n not in b))


# ---------------------------------------------------------------- kernel identity

@dataclass(frozen=True)
class KernelReport:
    N: int
    level: int
    max_rel_discrepancy: Scalar
    lhs_integral: Scalar


def cd_kernel_check(opf, N: int, m: int, jt: JetTable) -> KernelReport:
    """Both sides of K_N(x, x) = sqrt(c_{N+1}) [Q_N dQ_{N+1} - Q_{N+1} dQ_N](x)
    + sum_k f~_{k+1}(x) dQ_k(x) at every vertex of V_m (d = Laplacian,
    f~_{k+1} the zero-boundary solution of Delta f = Q_k)."""
    from .ortho import MonomialVector, green_apply, orthonormal_rows

    cfg = opf.cfg
    if cfg.exact:
        raise ValueError("the kernel identity involves sqrt(c_k); use float mode")
    if N + 1 > opf.N:
        raise ValueError("family too short")
    Q = [MonomialVector(opf.family, row) for row in orthonormal_rows(opf)[: N + 2]]
    dQ = [q.shift_down() for q in Q]
    ft = [green_apply(Q[k], jt) for k in range(N + 1)]
    vals = evaluate_many(Q + dQ + ft, m, jt)
    q, dq, f = vals[: N + 2], vals[N + 2: 2 * N + 4], vals[2 * N + 4:]
    worst = cfg.zero()
    lhs_vals = []
    with cfg.context():
        sc = cfg.sqrt(opf.c[N + 1])
        for x in range(mesh(m).size):
            lhs = sum((q[k][x] ** 2 for k in range(N + 1)), cfg.zero())
            rhs = sc * (q[N][x] * dq[N + 1][x] - q[N + 1][x] * dq[N][x])
            rhs += sum((f[k][x] * dq[k][x] for k in range(N + 1)), cfg.zero())
            worst = max(worst, abs(lhs - rhs) / max(abs(lhs), cfg.tolerance()))
            lhs_vals.append(lhs)
    ones = MeshValues(m, tuple([cfg.one()] * mesh(m).size), EXACT_JET, cfg)
    integral = quadrature(MeshValues(m, tuple(lhs_vals), EXACT_JET, cfg), ones)
    return KernelReport(N, m, worst, integral)
