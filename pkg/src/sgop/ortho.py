"""Orthogonal polynomial families over a monomial basis.

Two construction routes are kept side by side:

* ``gram_schmidt`` orthogonalizes against an exact Gram matrix;
* ``three_term_build`` runs p_{k+1} = f_{k+1} - b_k p_k - c_k p_{k-1}
  with f_{k+1} = green_apply(p_k), i.e. the solution of Delta f = p_k
  vanishing on the boundary.

They agree exactly whenever the Gram matrix is the true L2 one, because the
Green operator is then self-adjoint. Disagreement is reported, not hidden.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from flint import fmpq, fmpq_mat

from .inner import P3, RHO, RHO_L2, GramMatrix, gram, inner_general
from .jets import JetTable
from .numeric import PrecisionConfig, RouteDisagreement, Scalar, as_rational, to_text


class PrecisionLoss(ArithmeticError):
    """A Gram-Schmidt pivot lost positivity; more bits are needed."""

    def __init__(self, degree: int, pivot, bits: int):
        self.degree, self.pivot, self.bits = degree, pivot, bits
        super().__init__(f"pivot {pivot} at degree {degree} is not positive; "
                         f"precision died at {bits} bits, increase --bits")


@dataclass(frozen=True)
class MonomialVector:
    family: str
    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def shift_down(self) -> "MonomialVector":
        """Laplacian: Delta P_j = P_{j-1}, Delta P_0 = 0."""
        if len(self.coeffs) <= 1:
            return MonomialVector(self.family, (self.coeffs[0] * 0,))
        return MonomialVector(self.family, tuple(self.coeffs[1:]))

    def scaled(self, s) -> "MonomialVector":
        return MonomialVector(self.family, tuple(s * x for x in self.coeffs))


@dataclass(frozen=True)
class OPFamily:
    family: str
    N: int
    cfg: PrecisionConfig
    omega: tuple        # omega[j] = coefficients of monic p_j, length j+1
    d_inv_sq: tuple     # ||p_j||^2
    b: tuple = ()       # b_0 .. b_{N-1}
    c: tuple = ()       # c[0] unused (None), c_1 .. c_N
    route: str = ""
    convention: str = ""

    def p(self, j: int) -> MonomialVector:
        return MonomialVector(self.family, self.omega[j])

    def to_json(self) -> dict:
        return {
            "family": self.family, "route": self.route, "convention": self.convention,
            "mode": self.cfg.mode, "bits": self.cfg.bits if not self.cfg.exact else None,
            "N": self.N,
            "omega": [[to_text(x) for x in row] for row in self.omega],
            "d_inv_sq": [to_text(x) for x in self.d_inv_sq],
            "b": [to_text(x) for x in self.b],
            "c": [to_text(x) for x in self.c[1:]],
        }


def _qform(u, v, G: GramMatrix):
    acc = G.cfg.zero()
    for a, x in enumerate(u):
        if x == 0:
            continue
        row = G.entries[a]
        for b, y in enumerate(v):
            acc += x * y * row[b]
    return acc


def _check_pivot(nr, j, cfg):
    if not nr > 0:
        raise PrecisionLoss(j, nr, cfg.bits if not cfg.exact else 0)


def gram_schmidt(family: str, N: int, G: GramMatrix) -> OPFamily:
    if G.size < N + 1:
        raise ValueError(f"Gram matrix of size {G.size} cannot give degree {N}")
    cfg = G.cfg
    omega, nr = [], []
    with cfg.context():
        for j in range(N + 1):
            p = [cfg.zero()] * (j + 1)
            p[j] = cfg.one()
            row = G.entries[j]
            for l in range(j):
                proj = sum((omega[l][i] * row[i] for i in range(l + 1)), cfg.zero()) / nr[l]
                for i in range(l + 1):
                    p[i] -= proj * omega[l][i]
            # p is orthogonal to lower degrees, so <p, p> = <p, P_j>
            n = sum((p[i] * row[i] for i in range(j + 1)), cfg.zero())
            _check_pivot(n, j, cfg)
            omega.append(tuple(p))
            nr.append(n)
    return OPFamily(family, N, cfg, tuple(omega), tuple(nr), route="gram-schmidt",
                    convention=G.convention)


def green_correction(family: str, jt: JetTable, ell: int) -> Scalar:
    """Coefficient on the degree-0 monomial that makes P_{ell+1} vanish on the boundary."""
    with jt.cfg.context():
        if family == P3:
            return -jt.gamma[ell + 1] / jt.gamma[0]
        if family == RHO:
            # rho_{l+1} has constant boundary value 2 alpha_{l+1}; rho_0 is the constant 3
            return -2 * jt.alpha[ell + 1] / 3
    raise ValueError(f"no Green correction for family {family!r}")


def green_apply(v: MonomialVector, jt: JetTable) -> MonomialVector:
    """The solution f of Delta f = v with f = 0 on the boundary."""
    if v.degree + 1 > jt.max_degree:
        raise ValueError("jet table too short for green_apply")
    with jt.cfg.context():
        zeta = jt.cfg.zero()
        for l, x in enumerate(v.coeffs):
            zeta += x * green_correction(v.family, jt, l)
    return MonomialVector(v.family, (zeta,) + tuple(v.coeffs))


def boundary_value(v: MonomialVector, jt: JetTable) -> Scalar:
    """Value at q_1 (the family's boundary values are determined by it)."""
    with jt.cfg.context():
        if v.family == P3:
            return sum((x * jt.gamma[l] for l, x in enumerate(v.coeffs)), jt.cfg.zero())
        if v.family == RHO:
            vals = [jt.cfg.scalar(3)] + [2 * jt.alpha[l] for l in range(1, len(v.coeffs))]
            return sum((x * vals[l] for l, x in enumerate(v.coeffs)), jt.cfg.zero())
    raise ValueError(v.family)


def _sub(u, v, s):
    out = list(u)
    for i, x in enumerate(v):
        out[i] -= s * x
    return out


def three_term_build(family: str, N: int, G: GramMatrix, jt: JetTable) -> OPFamily:
    if N < 1:
        raise ValueError("three-term construction needs N >= 1")
    if G.size < N + 1:
        raise ValueError("Gram matrix too small")
    cfg = G.cfg
    omega = [(cfg.one(),)]
    nr = [G.entries[0][0]]
    b, c = [], [None]
    with cfg.context():
        for k in range(N):
            pk = omega[k]
            f = list(green_apply(MonomialVector(family, pk), jt).coeffs)
            bk = _qform(f, pk, G) / nr[k]
            new = _sub(f, pk, bk)
            if k >= 1:
                ck = nr[k] / nr[k - 1]
                new = _sub(new, omega[k - 1], ck)
            n = _qform(new, new, G)
            _check_pivot(n, k + 1, cfg)
            b.append(bk)
            omega.append(tuple(new))
            nr.append(n)
        for k in range(1, N + 1):
            c.append(nr[k] / nr[k - 1])
    return OPFamily(family, N, cfg, tuple(omega), tuple(nr), tuple(b), tuple(c),
                    route="three-term", convention=G.convention)


def with_recursion(opf: OPFamily, G: GramMatrix, jt: JetTable) -> OPFamily:
    """Attach b_k = <f_{k+1}, p_k>/||p_k||^2 and c_k = ||p_k||^2/||p_{k-1}||^2."""
    cfg = opf.cfg
    b, c = [], [None]
    with cfg.context():
        for k in range(opf.N):
            f = green_apply(opf.p(k), jt).coeffs
            b.append(_qform(f, opf.omega[k], G) / opf.d_inv_sq[k])
        for k in range(1, opf.N + 1):
            c.append(opf.d_inv_sq[k] / opf.d_inv_sq[k - 1])
    return OPFamily(opf.family, opf.N, cfg, opf.omega, opf.d_inv_sq, tuple(b), tuple(c),
                    opf.route, opf.convention)


def route_gap(a: OPFamily, b: OPFamily, relative: bool = False):
    """Largest coefficient discrepancy between two constructions (as an exact rational)."""
    worst = Fraction(0)
    for ra, rb in zip(a.omega, b.omega):
        for x, y in zip(ra, rb):
            d = abs(as_rational(x) - as_rational(y))
            if relative and y != 0:
                d /= abs(as_rational(y))
            worst = max(worst, Fraction(int(d.numerator), int(d.denominator)))
    return worst


def orthogonality_defect(opf: OPFamily, G: GramMatrix):
    """max_{j != k} |<p_j, p_k>|."""
    worst = abs(G.cfg.zero())
    with G.cfg.context():
        for j in range(opf.N + 1):
            for k in range(j):
                worst = max(worst, abs(_qform(opf.omega[j], opf.omega[k], G)))
    return worst


# ---------------------------------------------------------------- Jacobi

@dataclass(frozen=True)
class JacobiMatrix:
    n: int
    diag: tuple
    off: tuple
    det_recursion: tuple  # det J_0 = 1, det J_1, ..., det J_n
    det_direct: tuple


def jacobi(opf: OPFamily, n: int) -> JacobiMatrix:
    """J_n with diagonal b_0..b_{n-1} and off-diagonal sqrt(c_1)..sqrt(c_{n-1}).

    Determinants by the recursion det J_{m+1} = b_m det J_m - c_m det J_{m-1}
    and, independently, by an exact rational determinant of the rounded
    matrix itself.
    """
    cfg = opf.cfg
    if cfg.exact:
        raise ValueError("Jacobi matrices need float mode (square roots)")
    if n > opf.N or len(opf.b) < n:
        raise ValueError("family too short")
    diag = opf.b[:n]
    off = tuple(cfg.sqrt(opf.c[i]) for i in range(1, n))
    with cfg.context():
        rec = [cfg.one(), diag[0]] if n else [cfg.one()]
        for m in range(1, n):
            rec.append(diag[m] * rec[m] - opf.c[m] * rec[m - 1])
    direct = [cfg.one()]
    for size in range(1, n + 1):
        M = fmpq_mat(size, size)
        for i in range(size):
            M[i, i] = _fq(diag[i])
            if i + 1 < size:
                M[i, i + 1] = M[i + 1, i] = _fq(off[i])
        d = M.det()
        direct.append(cfg.scalar(Fraction(int(d.p), int(d.q))))
    tol = cfg.tolerance()
    for k, (x, y) in enumerate(zip(rec, direct)):
        if abs(x - y) > tol * abs(y):
            raise RouteDisagreement(f"det J_{k}", x, y)
    return JacobiMatrix(n, tuple(diag), off, tuple(rec), tuple(direct))


def _fq(x) -> fmpq:
    q = as_rational(x)
    return fmpq(int(q.numerator), int(q.denominator))


# ---------------------------------------------------------------- Christoffel-Darboux

@dataclass(frozen=True)
class CDExpansion:
    k: int
    A: tuple            # recursion route
    A_shift: tuple      # triangular solve of the shifted-down Q_k
    A_two_term: tuple   # A_l^{(k)} = -A_l^{(k-1)} b_{k-1}/sqrt(c_k), stated variant

    def positive(self) -> bool:
        return all(a > 0 for a in self.A)


def orthonormal_rows(opf: OPFamily) -> list:
    """Coefficient rows of Q_j = p_j / ||p_j||."""
    cfg = opf.cfg
    with cfg.context():
        return [tuple(x / cfg.sqrt(opf.d_inv_sq[j]) for x in row) for j, row in enumerate(opf.omega)]


def cd_all(opf: OPFamily, kmax: int) -> list:
    """CD expansions for k = 1..kmax.

    Applying Delta to sqrt(c_{k+1}) Q_{k+1} = f~_{k+1} - b_k Q_k - sqrt(c_k) Q_{k-1}
    and using Delta f~_{k+1} = Q_k gives
    A^{(k+1)}_l = (-b_k A^{(k)}_l - sqrt(c_k) A^{(k-1)}_l) / sqrt(c_{k+1}), A^{(k+1)}_k = 1/sqrt(c_{k+1}).
    """
    cfg = opf.cfg
    if cfg.exact:
        raise ValueError("Christoffel-Darboux coefficients need float mode")
    if kmax > opf.N or len(opf.b) < kmax:
        raise ValueError("family too short")
    Q = orthonormal_rows(opf)
    sc = [None] + [cfg.sqrt(opf.c[i]) for i in range(1, kmax + 1)]
    out = []
    prev, cur = [], []
    two = []
    tol = cfg.tolerance()
    with cfg.context():
        for k in range(1, kmax + 1):
            if k == 1:
                new = [1 / sc[1]]
                two = [1 / sc[1]]
            else:
                b = opf.b[k - 1]
                new = [(-b * cur[l] - sc[k - 1] * (prev[l] if l < len(prev) else 0)) / sc[k]
                       for l in range(k - 1)] + [1 / sc[k]]
                two = [-a * b / sc[k] for a in two] + [1 / sc[k]]
            shift = _solve_shift(Q, k)
            for x, y in zip(new, shift):
                if abs(x - y) > tol * max(abs(y), max(abs(s) for s in shift)):
                    raise RouteDisagreement(f"CD coefficients k={k}", new, shift)
            out.append(CDExpansion(k, tuple(new), tuple(shift), tuple(two)))
            prev, cur = cur, new
    return out


def cd_coefficients(opf: OPFamily, k: int) -> CDExpansion:
    return cd_all(opf, k)[-1]


def _solve_shift(Q, k):
    """Expand Delta Q_k (shifted-down coefficients) over Q_0..Q_{k-1}."""
    target = list(Q[k][1:])  # length k
    A = [0] * k
    for l in range(k - 1, -1, -1):
        A[l] = target[l] / Q[l][l]
        for i in range(l + 1):
            target[i] -= A[l] * Q[l][i]
    return A


# ---------------------------------------------------------------- combined system

@dataclass
class CombinedReport:
    N: int
    q_same: list = field(default_factory=list)     # <Q^{(i)}_j, Q^{(i)}_k>
    q_cross: list = field(default_factory=list)    # <Q^{(i)}_j, Q^{(l)}_k>, i != l
    qs_numerators: list = field(default_factory=list)  # <p^{(i)}_j, s_k>
    phi_gram: list = field(default_factory=list)   # indexed by (i, j)
    exact: bool = True

    def max_phi_defect(self):
        worst = 0
        n = len(self.phi_gram)
        for a in range(n):
            for b in range(n):
                worst = max(worst, abs(self.phi_gram[a][b] - (1 if a == b else 0)))
        return worst


def combined_onb(antisym: OPFamily, sym: OPFamily, jt: JetTable) -> CombinedReport:
    """Gram matrix of phi^{(i)}_j = sqrt(2/3) Q^{(i)}_j + sqrt(1/3) S_j, i = 0,1,2.

    Every entry is assembled from monomial inner products with rotated base
    points. When the symmetric/antisymmetric cross terms vanish exactly the
    square roots drop out and the Gram is exact.
    """
    if antisym.family != P3 or sym.family != RHO:
        raise ValueError("need the antisymmetric family and the symmetric family")
    if sym.convention != RHO_L2:
        raise ValueError("symmetric family must be orthonormal in L2 (rho convention 'l2')")
    cfg = jt.cfg
    N = min(antisym.N, sym.N)
    T33 = {(a, b): {} for a in range(3) for b in range(3)}
    T31 = {(a, b): {} for a in range(3) for b in range(3)}
    for x in range(N + 1):
        for y in range(N + 1):
            for a in range(3):
                for b in range(3):
                    T33[a, b][x, y] = inner_general(3, x, 3, y, jt, a, b)
                    T31[a, b][x, y] = inner_general(3, x, 1, y, jt, a, b)
    rep = CombinedReport(N)
    with cfg.context():
        def pp(i, j, l, k):
            return sum((u * v * T33[i, l][x, y] for x, u in enumerate(antisym.omega[j])
                        for y, v in enumerate(antisym.omega[k])), cfg.zero())

        def ps(i, j, k):
            return sum((u * v * T31[i, n][x, y] for x, u in enumerate(antisym.omega[j])
                        for y, v in enumerate(sym.omega[k]) for n in range(3)), cfg.zero())

        for i in range(3):
            for j in range(N + 1):
                for k in range(N + 1):
                    rep.qs_numerators.append(((i, j, k), ps(i, j, k)))
        rep.exact = all(v == 0 for _, v in rep.qs_numerators)
        na = antisym.d_inv_sq
        ns = sym.d_inv_sq

        def qq(i, j, l, k):
            num = pp(i, j, l, k)
            if num == 0:
                return num
            if j == k:
                return num / na[j]
            return num / (cfg.sqrt(na[j]) * cfg.sqrt(na[k]))

        GR = gram(RHO, N, jt, RHO_L2)

        def ss(j, k):
            num = _qform(sym.omega[j], sym.omega[k], GR)
            if num == 0:
                return num
            return num / ns[j] if j == k else num / (cfg.sqrt(ns[j]) * cfg.sqrt(ns[k]))

        S = [[ss(j, k) for k in range(N + 1)] for j in range(N + 1)]
        idx = [(i, j) for i in range(3) for j in range(N + 1)]
        G = []
        for (i, j) in idx:
            row = []
            for (l, k) in idx:
                q = qq(i, j, l, k)
                (rep.q_same if i == l else rep.q_cross).append(((i, j, l, k), q))
                val = cfg.scalar(Fraction(2, 3)) * q + cfg.scalar(Fraction(1, 3)) * S[j][k]
                if not rep.exact:
                    x1 = dict(rep.qs_numerators)[(i, j, k)]
                    x2 = dict(rep.qs_numerators)[(l, k, j)]
                    r2 = cfg.sqrt(cfg.scalar(2)) / 3
                    val += r2 * (x1 / (cfg.sqrt(na[j]) * cfg.sqrt(ns[k]))
                                 + x2 / (cfg.sqrt(na[k]) * cfg.sqrt(ns[j])))
                row.append(val)
            G.append(row)
        rep.phi_gram = G
    return rep

