"""Exact sequence, twist, normal elements, endomorphism order, subalgebra growth, Koszul numerics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import ExampleSpec, ParameterConstraintViolated, builtin, right_only
from .dedata import EndoMap, Unsupported, det_map, det_sigma
from .exactla import Echelon, ExactMatrix, PrimeField, kernel_basis, rank, rref, solve
from .extension import ExtensionBuild
from .ncalg import NcPoly, ReductionSystem, Word, substitute
from .report import FAIL, PASS, CertReport

__all__ = ["NotTrimmed", "NotQuadratic", "NormalCert", "ExceedsBound", "exact_sequence_check",
           "g_twist_check", "check_normal", "enumerate_normal", "endo_order",
           "subalgebra_dims", "pencil_triple", "koszul_numeric_check", "map_residuals",
           "builtin", "right_only", "ExampleSpec", "ParameterConstraintViolated"]


class NotTrimmed(ValueError):
    pass


class NotQuadratic(ValueError):
    pass


@dataclass(frozen=True)
class ExceedsBound:
    bound: int

    def __bool__(self):
        return False

    def __str__(self):
        return f"exceeds bound {self.bound}"


def _mono(b: ExtensionBuild, w: Word) -> NcPoly:
    return NcPoly.monomial(w, b.field.one)


def _matrix(b: ExtensionBuild, images: list[NcPoly], target: list[Word]) -> ExactMatrix:
    idx = {w: i for i, w in enumerate(target)}
    cols = [b.presentation.coordinates(p, idx, len(target)) for p in images]
    return ExactMatrix.from_columns(b.field, cols, len(target))


def _require_trimmed(b: ExtensionBuild):
    if not b.data.trimmed:
        raise NotTrimmed("this check needs trimmed data (delta = 0, tau = 0); apply trim first")


# --- the four-term sequence --------------------------------------------------------

def exact_sequence_check(b: ExtensionBuild, max_degree: int) -> CertReport:
    """0 -> B(-dy1-dy2) -g-> B(-dy1) + B(-dy2) -f-> B -eps-> A -> 0, degree by degree."""
    _require_trimmed(b)
    d = b.data
    F = b.field
    dy1, dy2 = d.dy1, d.dy2
    y1, y2 = b.y
    Y1, Y2 = _mono(b, (y1,)), _mono(b, (y2,))
    u = Y1.scale(d.p11) - Y2        # first component of g
    v = Y1.scale(d.p12)             # second component of g
    witnesses = []
    rows = []
    for deg in range(max_degree + 1):
        B0 = b.basis(deg - dy1 - dy2)
        Ba, Bb = b.basis(deg - dy1), b.basis(deg - dy2)
        Bd = b.basis(deg)
        Ad = b.base_basis(deg)
        mid = [(0, w) for w in Ba] + [(1, w) for w in Bb]
        mid_idx = {m: i for i, m in enumerate(mid)}
        # g: columns indexed by B0, rows by mid
        gcols = []
        for c in B0:
            col = [F.zero] * len(mid)
            for k, comp in ((0, b.nf(_mono(b, c) * u)), (1, b.nf(_mono(b, c) * v))):
                for w, coef in comp.terms.items():
                    col[mid_idx[(k, w)]] += coef
            gcols.append(col)
        G = ExactMatrix.from_columns(F, gcols, len(mid))
        fimgs = [b.nf(_mono(b, w) * (Y1 if k == 0 else Y2)) for k, w in mid]
        Fm = _matrix(b, fimgs, Bd)
        a_idx = {w: i for i, w in enumerate(Ad)}
        ecols = []
        for w in Bd:
            col = [F.zero] * len(Ad)
            if w in a_idx:
                col[a_idx[w]] = F.one
            ecols.append(col)
        E = ExactMatrix.from_columns(F, ecols, len(Ad))
        rg, rf, re = rank(G), rank(Fm), rank(E)
        fg_zero = (Fm @ G).is_zero() if B0 and mid and Bd else True
        ef_zero = (E @ Fm).is_zero() if mid and Bd and Ad else True
        euler = len(B0) - len(Ba) - len(Bb) + len(Bd)
        row = {"degree": deg, "dims": [len(B0), len(mid), len(Bd), len(Ad)],
               "ranks": [rg, rf, re], "euler": euler}
        rows.append(row)
        problems = []
        if not fg_zero:
            problems.append("f o g != 0")
        if not ef_zero:
            problems.append("eps o f != 0")
        if rg != len(B0):
            problems.append("g not injective")
        if rg != len(mid) - rf:
            problems.append("not exact at B(-dy1)+B(-dy2)")
        if rf != len(Bd) - re:
            problems.append("not exact at B")
        if re != len(Ad):
            problems.append("eps not surjective")
        if euler != len(Ad):
            problems.append("dimension identity fails")
        if problems:
            witnesses.append({"degree": deg, "problems": problems, **row})
    return CertReport("exact_sequence_check", FAIL if witnesses else PASS, bound=max_degree,
                      witnesses=witnesses, details={"degrees": rows})


def g_twist_check(b: ExtensionBuild, max_degree: int, det_override=None) -> CertReport:
    """g(c) * r = g(c det(r)) with (u, v) * r = (u s11(r) + v s21(r), u s12(r) + v s22(r)).

    ``det_override`` (a callable on base elements) replaces det sigma; it exists
    for negative controls.
    """
    _require_trimmed(b)
    d = b.data
    F = b.field
    alpha = b.alphabet
    det = det_override or (lambda r: det_map(d, r))
    y1, y2 = b.y
    Y1, Y2 = _mono(b, (y1,)), _mono(b, (y2,))
    u = Y1.scale(d.p11) - Y2
    v = Y1.scale(d.p12)
    nf = b.nf
    witnesses = []
    n = len(d.base.alphabet)
    checked = 0
    for g in range(n):
        r = NcPoly.monomial((g,), F.one)
        s11, s12, s21, s22 = d.s(1, 1, r), d.s(1, 2, r), d.s(2, 1, r), d.s(2, 2, r)
        dr = det(r)
        for k, lhs, rhs in ((1, nf(u * s11 + v * s21), nf(dr * u)),
                            (2, nf(u * s12 + v * s22), nf(dr * v))):
            if lhs != rhs:
                witnesses.append({"identity": k, "generator": alpha.names[g],
                                  "lhs": lhs.render(alpha), "rhs": rhs.render(alpha),
                                  "residual": (lhs - rhs).render(alpha)})
        rdeg = d.base.alphabet.degrees[g]
        for cdeg in range(max_degree - rdeg - d.dy1 - d.dy2 + 1):
            for w in b.basis(cdeg):
                c = _mono(b, w)
                gu, gv = nf(c * u), nf(c * v)
                left = (nf(gu * s11 + gv * s21), nf(gu * s12 + gv * s22))
                cd = nf(c * dr)
                right = (nf(cd * u), nf(cd * v))
                checked += 1
                if left != right:
                    witnesses.append({"monomial": alpha.word_str(w), "generator": alpha.names[g],
                                      "residual": [(x - y).render(alpha)
                                                   for x, y in zip(left, right)]})
    return CertReport("g_twist_check", FAIL if witnesses else PASS, bound=max_degree,
                      witnesses=witnesses[:20], details={"monomials_checked": checked})


# --- normal elements ------------------------------------------------------------------

@dataclass
class NormalCert:
    """z with w*z = z*m_w for every generator w."""

    element: NcPoly
    multipliers: dict[str, NcPoly]
    build: ExtensionBuild

    def verify(self) -> bool:
        b = self.build
        z = self.element
        return all(b.nf(b.letter(name) * z - z * m) == 0 for name, m in self.multipliers.items())

    def render(self) -> dict:
        alpha = self.build.alphabet
        return {"element": self.element.render(alpha),
                "multipliers": {k: m.render(alpha) for k, m in self.multipliers.items()}}


def check_normal(b: ExtensionBuild, z: NcPoly):
    """NormalCert for z, or None when z is not normal."""
    alpha = b.alphabet
    z = b.nf(z)
    deg = z.homogeneous_degree(alpha)
    if deg is None:
        raise ValueError("check_normal needs a nonzero homogeneous element")
    mults = {}
    for g, name in enumerate(alpha.names):
        dw = alpha.degrees[g]
        basis = b.basis(dw)
        target = b.basis(deg + dw)
        M = _matrix(b, [b.nf(z * _mono(b, w)) for w in basis], target)
        idx = {w: i for i, w in enumerate(target)}
        rhs = b.presentation.coordinates(_mono(b, (g,)) * z, idx, len(target))
        x = solve(M, rhs)
        if x is None:
            return None
        mults[name] = NcPoly({basis[i]: c for i, c in enumerate(x) if c})
    return NormalCert(z, mults, b)


def _int_matrix(b: ExtensionBuild, images: list[NcPoly], target: list[Word], p: int) -> np.ndarray:
    idx = {w: i for i, w in enumerate(target)}
    out = np.zeros((len(target), len(images)), dtype=np.int64)
    for j, img in enumerate(images):
        for w, c in img.terms.items():
            out[idx[w], j] = int(c) % p
    return out


def _in_column_span(mats: np.ndarray, p: int, inv: np.ndarray) -> np.ndarray:
    """Batch test: is the last column of each (N x (m+1)) matrix in the span of the others?"""
    A = mats.astype(np.int32)
    nb, N, C = A.shape
    r = np.zeros(nb, dtype=np.int64)
    rows = np.arange(N)
    for j in range(C - 1):
        cand = (A[:, :, j] != 0) & (rows[None, :] >= r[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        sel = np.flatnonzero(has)
        sub = A[sel]
        rr = r[sel]
        pr = cand[sel].argmax(axis=1)
        k = np.arange(sel.size)
        tmp = sub[k, pr, :].copy()
        sub[k, pr, :] = sub[k, rr, :]
        pivrow = (tmp * inv[tmp[:, j]][:, None]) % p
        sub[k, rr, :] = pivrow
        factors = sub[:, :, j].copy()
        factors[k, rr] = 0
        sub -= factors[:, :, None] * pivrow[:, None, :]
        sub %= p
        A[sel] = sub
        r[sel] += 1
    rest = (A[:, :, C - 1] != 0) & (rows[None, :] >= r[:, None])
    return ~rest.any(axis=1)


def _projective_points(n: int, p: int, chunk: int):
    """Yield integer arrays of normalized vectors (first nonzero coordinate 1)."""
    for lead in range(n):
        tail = n - lead - 1
        total = p ** tail
        powers = p ** np.arange(tail - 1, -1, -1, dtype=np.int64) if tail else np.zeros(0, np.int64)
        for start in range(0, total, chunk):
            ids = np.arange(start, min(total, start + chunk), dtype=np.int64)
            pts = np.zeros((ids.size, n), dtype=np.int64)
            pts[:, lead] = 1
            if tail:
                pts[:, lead + 1:] = (ids[:, None] // powers[None, :]) % p
            yield pts


def enumerate_normal(b: ExtensionBuild, degree: int, chunk: int = 100_000):
    """All normal elements of B_degree up to scalars, by exhaustive search over F_p.

    A vector z is normal iff for each generator w, w*z lies in the span of the
    z*b_k (b_k a basis of B_{deg w}).  Candidates are screened with batched
    modular elimination and then re-certified exactly with :func:`check_normal`.
    """
    F = b.field
    if not isinstance(F, PrimeField):
        return Unsupported("exhaustive enumeration needs a prime field; use check_normal")
    p = F.p
    alpha = b.alphabet
    basis = b.basis(degree)
    n = len(basis)
    inv = np.zeros(p, dtype=np.int32)
    inv[1:] = [pow(i, -1, p) for i in range(1, p)]
    tests = []
    for g in range(len(alpha)):
        dw = alpha.degrees[g]
        bw = b.basis(dw)
        target = b.basis(degree + dw)
        Lw = _int_matrix(b, [b.nf(_mono(b, (g,) + u)) for u in basis], target, p)
        Rk = [_int_matrix(b, [b.nf(_mono(b, u + w)) for u in basis], target, p) for w in bw]
        tests.append((Lw, Rk))
    found = []
    for pts in _projective_points(n, p, chunk):
        keep = pts
        for Lw, Rk in tests:
            if keep.shape[0] == 0:
                break
            cols = [(keep @ R.T) % p for R in Rk] + [(keep @ Lw.T) % p]
            mats = np.stack(cols, axis=2)
            keep = keep[_in_column_span(mats, p, inv)]
        for vec in keep:
            z = NcPoly({basis[i]: F(int(c)) for i, c in enumerate(vec) if c})
            cert = check_normal(b, z)
            if cert is not None:
                found.append(cert)
    return found


def projective_count(n: int, p: int) -> int:
    return (p ** n - 1) // (p - 1)


# --- endomorphism order and subalgebras -----------------------------------------------

def endo_order(e: EndoMap, max_n: int):
    """Smallest n <= max_n with e^n = id on generators, else ExceedsBound."""
    cur = e
    for n in range(1, max_n + 1):
        if cur.is_identity():
            return n
        cur = e.compose(cur)
    return ExceedsBound(max_n)


def subalgebra_dims(b: ExtensionBuild, elements: list[NcPoly], max_degree: int) -> list[int]:
    """Dimension per degree of the subalgebra generated by homogeneous elements."""
    alpha = b.alphabet
    zs = []
    for z in elements:
        z = b.nf(z)
        dz = z.homogeneous_degree(alpha)
        if dz is None or dz < 1:
            raise ValueError("subalgebra generators must be nonzero homogeneous of positive degree")
        zs.append((dz, z))
    spans: list[list[NcPoly]] = [[NcPoly.scalar(b.field.one)]]
    dims = [1]
    for deg in range(1, max_degree + 1):
        ech = Echelon(b.field)
        new = []
        for dz, z in zs:
            if dz > deg:
                continue
            for s in spans[deg - dz]:
                prod = b.nf(s * z)
                if ech.add(prod.terms):
                    new.append(prod)
        spans.append(new)
        dims.append(len(new))
    return dims


def pencil_triple(b: ExtensionBuild, a, bb, c) -> list[NcPoly]:
    """(x1 + a y2, x2 + b y2, y1 + c y2) in B(h)."""
    F = b.field
    x1, x2, y1, y2 = (b.letter(n) for n in ("x1", "x2", "y1", "y2"))
    return [x1 + y2.scale(F(a)), x2 + y2.scale(F(bb)), y1 + y2.scale(F(c))]


# --- Koszul numerics ---------------------------------------------------------------

def koszul_dual_dims(rs: ReductionSystem, max_degree: int) -> list[int]:
    """Hilbert function of the quadratic dual T(V*)/(R-perp), degree by degree."""
    alpha = rs.alphabet
    F = rs.field
    n = len(alpha)
    if any(dg != 1 for dg in alpha.degrees):
        raise NotQuadratic("all generators must have degree 1")
    rel_rows = []
    for r in rs.rules:
        if len(r.lead) != 2 or any(len(w) != 2 for w in r.rhs.terms):
            raise NotQuadratic(f"rule {rs.rule_str(r)} is not quadratic")
        row = [F.zero] * (n * n)
        row[r.lead[0] * n + r.lead[1]] += F.one
        for w, c in r.rhs.terms.items():
            row[w[0] * n + w[1]] -= c
        rel_rows.append(row)
    if rel_rows:
        perp = kernel_basis(ExactMatrix.from_rows(F, rel_rows, n * n))
    else:
        perp = [[F.one if i == j else F.zero for i in range(n * n)] for j in range(n * n)]
    dims = [1, n]
    # quotient maps q[k]: V (x) A!_{k-1} -> A!_k as dense matrices (rows: A!_k coords)
    q = {1: [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]}
    for k in range(2, max_degree + 1):
        dk1, dk2 = dims[k - 1], dims[k - 2]
        N = n * dk1
        if N == 0:
            dims.append(0)
            continue
        prev = q[k - 1]  # shape dk1 x (n * dk2)
        W = []
        for phi in perp:
            for i in range(dk2):
                vec = [F.zero] * N
                for a in range(n):
                    for bb in range(n):
                        c = phi[a * n + bb]
                        if not c:
                            continue
                        src = bb * dk2 + i
                        for j in range(dk1):
                            e = prev[j][src]
                            if e:
                                vec[a * dk1 + j] += c * e
                W.append(vec)
        if W:
            rk, pivots, red = rref(ExactMatrix.from_rows(F, W, N))
        else:
            rk, pivots, red = 0, [], None
        free = [j for j in range(N) if j not in set(pivots)]
        dims.append(len(free))
        # q_k(v) = v - sum v[pivot] * row, read on the free coordinates
        qk = [[F.zero] * N for _ in free]
        for t, j in enumerate(free):
            qk[t][j] = F.one
        for ri, pc in enumerate(pivots):
            for t, j in enumerate(free):
                e = red[ri, j]
                if e:
                    qk[t][pc] -= e
        q[k] = qk
    return dims[:max_degree + 1]


def koszul_numeric_check(b: ExtensionBuild | ReductionSystem, max_degree: int) -> CertReport:
    """H_{B!}(-t) H_B(t) = 1 up to the bound: a necessary condition for Koszulity only."""
    rs = b.presentation if isinstance(b, ExtensionBuild) else b
    dual = koszul_dual_dims(rs, max_degree)
    hb = rs.hilbert_function(max_degree)
    witnesses = []
    for deg in range(1, max_degree + 1):
        s = sum((-1) ** i * dual[i] * hb[deg - i] for i in range(deg + 1))
        if s:
            witnesses.append({"degree": deg, "coefficient": s})
    return CertReport("koszul_numeric_check", FAIL if witnesses else PASS, bound=max_degree,
                      witnesses=witnesses, details={"dual": dual, "hilbert": hb},
                      notes=["necessary condition only"])


# --- substitutions ------------------------------------------------------------------

def map_residuals(source: ReductionSystem, images: dict[int, NcPoly], target: ReductionSystem,
                  reverse: bool = False) -> list[str]:
    """Rules of ``source`` whose image under letter -> image is nonzero in ``target``."""
    bad = []
    one = source.field.one
    for r in source.rules:
        rel = NcPoly.monomial(r.lead, one) - r.rhs
        if substitute(rel, images, target, reverse=reverse):
            bad.append(source.rule_str(r))
    return bad
