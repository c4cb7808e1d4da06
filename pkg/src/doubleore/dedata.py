"""DE-data {P, sigma, delta, tau} over a presented graded algebra A, and its validators.

sigma and delta are stored on generators only and extended on demand.  The
3x3 matrix ``sigma_hat`` packs both:

    [[r,        0,        0       ],
     [delta1,   sigma11,  sigma12 ],
     [delta2,   sigma21,  sigma22 ]]

so that ``(1, y1, y2)^T r = sigma_hat(r) (1, y1, y2)^T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .exactla import ExactMatrix, inverse, solve
from .ncalg import NcPoly, ReductionSystem, Word, substitute
from .report import FAIL, PASS, UNSUPPORTED, CertReport


class NonHomogeneous(ValueError):
    pass


class EndomorphismViolation(ValueError):
    pass


@dataclass(frozen=True)
class Unsupported:
    """Returned (not raised) when an operation does not cover the input."""

    reason: str

    def __bool__(self):
        return False


def _mat_mul(a, b, nf):
    n, m, k = len(a), len(b[0]), len(b)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = NcPoly()
            for t in range(k):
                x, y = a[i][t], b[t][j]
                if x and y:
                    acc = acc + x * y
            row.append(nf(acc))
        out.append(row)
    return out


def _mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _mat_scale(a, c):
    return [[x.scale(c) for x in r] for r in a]


def _mat_is_zero(a) -> bool:
    return not any(x for r in a for x in r)


class MatHom:
    """A homomorphism A -> M_n(A) given by matrices on the generators.

    ``extend`` works on free-algebra words (products of generator matrices)
    so that substituting a base relation really tests the homomorphism law.
    """

    def __init__(self, base: ReductionSystem, images: dict[int, list[list[NcPoly]]], n: int):
        self.base = base
        self.n = n
        self.images = images
        self._memo: dict[Word, list] = {}

    def identity(self):
        one = NcPoly.scalar(self.base.field.one)
        return [[one if i == j else NcPoly() for j in range(self.n)] for i in range(self.n)]

    def word(self, w: Word):
        hit = self._memo.get(w)
        if hit is not None:
            return hit
        if not w:
            res = self.identity()
        else:
            res = _mat_mul(self.word(w[:-1]), self.images[w[-1]], self.base.normal_form)
        self._memo[w] = res
        return res

    def extend(self, p: NcPoly):
        out = [[NcPoly() for _ in range(self.n)] for _ in range(self.n)]
        for w, c in p.terms.items():
            out = _mat_add(out, _mat_scale(self.word(w), c))
        return out

    def entry(self, i: int, j: int, p: NcPoly) -> NcPoly:
        acc = NcPoly()
        for w, c in p.terms.items():
            acc = acc + self.word(w)[i][j].scale(c)
        return acc


@dataclass
class DEData:
    """DE-data of a (right) double extension of ``base``.

    ``sigma[g]`` is the 2x2 matrix sigma(x_g), ``delta[g]`` the column
    delta(x_g), ``tau`` the triple (tau1, tau2, tau0).  Entries are stored in
    normal form; homogeneity is enforced on construction.
    """

    base: ReductionSystem
    p12: object
    p11: object
    sigma: dict[int, list[list[NcPoly]]]
    delta: dict[int, list[NcPoly]] = field(default_factory=dict)
    tau: tuple = (NcPoly(), NcPoly(), NcPoly())
    dy1: int = 1
    dy2: int = 1
    y_names: tuple = ("y1", "y2")
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        F = self.base.field
        self.p12 = F(self.p12)
        self.p11 = F(self.p11)
        nf = self.base.normal_form
        alpha = self.base.alphabet
        ngen = len(alpha)
        if set(self.sigma) != set(range(ngen)):
            raise ValueError("sigma must be given on every base generator")
        self.sigma = {g: [[nf(e) for e in row] for row in m] for g, m in self.sigma.items()}
        for g, m in self.sigma.items():
            if len(m) != 2 or any(len(r) != 2 for r in m):
                raise ValueError(f"sigma({alpha.names[g]}) must be a 2x2 matrix")
        self.delta = {g: [nf(e) for e in self.delta.get(g, [NcPoly(), NcPoly()])]
                      for g in range(ngen)}
        for g, col in self.delta.items():
            if len(col) != 2:
                raise ValueError(f"delta({alpha.names[g]}) must be a 2-column")
        if len(self.tau) != 3:
            raise ValueError("tau must be a triple (tau1, tau2, tau0)")
        self.tau = tuple(nf(t) for t in self.tau)
        if self.dy1 < 1 or self.dy2 < 1:
            raise ValueError("deg y1 and deg y2 must be positive")
        self._check_homogeneous()

    def _check_homogeneous(self):
        alpha = self.base.alphabet
        dy = (self.dy1, self.dy2)
        for g in range(len(alpha)):
            dx = alpha.degrees[g]
            for i in range(2):
                for j in range(2):
                    e = self.sigma[g][i][j]
                    want = dx + dy[i] - dy[j]
                    if e and (want < 0 or not e.is_homogeneous(alpha, want)):
                        raise NonHomogeneous(f"sigma({alpha.names[g]})[{i + 1}{j + 1}] must have degree {want}")
                e = self.delta[g][i]
                if e and not e.is_homogeneous(alpha, dx + dy[i]):
                    raise NonHomogeneous(f"delta({alpha.names[g]})[{i + 1}] must have degree {dx + dy[i]}")
        for t, want, name in zip(self.tau, (self.dy2, self.dy1, self.dy1 + self.dy2),
                                 ("tau1", "tau2", "tau0")):
            if t and not t.is_homogeneous(alpha, want):
                raise NonHomogeneous(f"{name} must have degree {want}")
        if self.p11 and self.dy1 != self.dy2:
            raise NonHomogeneous("p11 != 0 requires deg y1 = deg y2")

    @property
    def field(self):
        return self.base.field

    @property
    def trimmed(self) -> bool:
        return (not any(e for col in self.delta.values() for e in col)
                and not any(self.tau))

    def copy(self, **changes) -> "DEData":
        kw = dict(base=self.base, p12=self.p12, p11=self.p11, sigma=self.sigma,
                  delta=self.delta, tau=self.tau, dy1=self.dy1, dy2=self.dy2,
                  y_names=self.y_names)
        kw.update(changes)
        return DEData(**kw)

    # cached extensions --------------------------------------------------

    def sigma_hom(self) -> MatHom:
        if "sigma" not in self._cache:
            self._cache["sigma"] = MatHom(self.base, self.sigma, 2)
        return self._cache["sigma"]

    def sigma_hat_hom(self) -> MatHom:
        if "hat" not in self._cache:
            F = self.field
            imgs = {}
            for g in self.sigma:
                x = NcPoly.monomial((g,), F.one)
                s, d = self.sigma[g], self.delta[g]
                imgs[g] = [[x, NcPoly(), NcPoly()],
                           [d[0], s[0][0], s[0][1]],
                           [d[1], s[1][0], s[1][1]]]
            self._cache["hat"] = MatHom(self.base, imgs, 3)
        return self._cache["hat"]

    def s(self, i: int, j: int, p: NcPoly) -> NcPoly:
        """sigma_ij(p) with the index convention sigma_00 = id, sigma_i0 = delta_i."""
        return self.sigma_hat_hom().entry(i, j, p)


# --- extension operations --------------------------------------------------

def extend_sigma(d: DEData, p: NcPoly):
    for w in p.terms:
        d.base.alphabet.check(w)
    return d.sigma_hom().extend(p)


def extend_delta(d: DEData, p: NcPoly) -> list[NcPoly]:
    """delta(uv) = sigma(u) delta(v) + delta(u) v, applied word by word."""
    for w in p.terms:
        d.base.alphabet.check(w)
    memo = d._cache.setdefault("delta", {})
    nf = d.base.normal_form
    F = d.field
    sig = d.sigma_hom()

    def word(w: Word):
        hit = memo.get(w)
        if hit is not None:
            return hit
        if not w:
            res = [NcPoly(), NcPoly()]
        else:
            u, g = w[:-1], w[-1]
            su = sig.word(u)
            dg = d.delta[g]
            du = word(u)
            x = NcPoly.monomial((g,), F.one)
            res = [nf(su[i][0] * dg[0] + su[i][1] * dg[1] + du[i] * x) for i in range(2)]
        memo[w] = res
        return res

    out = [NcPoly(), NcPoly()]
    for w, c in p.terms.items():
        col = word(w)
        out = [out[0] + col[0].scale(c), out[1] + col[1].scale(c)]
    return out


def extend_sigma_hat(d: DEData, p: NcPoly):
    for w in p.terms:
        d.base.alphabet.check(w)
    return d.sigma_hat_hom().extend(p)


# --- validators ------------------------------------------------------------

def validate_hom(d: DEData) -> CertReport:
    """sigma_hat must send every base relation to the zero 3x3 matrix."""
    base = d.base
    alpha = base.alphabet
    hat = d.sigma_hat_hom()
    witnesses = []
    for r in base.rules:
        rel = NcPoly.monomial(r.lead, d.field.one) - r.rhs
        m = hat.extend(rel)
        for i in range(3):
            for j in range(3):
                if m[i][j]:
                    witnesses.append({"relation": base.rule_str(r), "entry": [i, j],
                                      "residual": m[i][j].render(alpha)})
    return CertReport("validate_hom", FAIL if witnesses else PASS, witnesses=witnesses,
                      details={"relations_checked": len(base.rules)})


def r3_sides(d: DEData, r: NcPoly) -> list[tuple[NcPoly, NcPoly]]:
    """Both sides of the six compatibility relations at the element r.

    Products with tau keep tau on the right of sigma(sigma(r)); that is the
    order produced when the y2*y1 factor is rewritten inside y2*(y1*r).
    """
    s = d.s
    nf = d.base.normal_form
    p11, p12 = d.p11, d.p12
    t1, t2, t0 = d.tau
    s11 = s(1, 1, r)
    s12 = s(1, 2, r)
    s21 = s(2, 1, r)
    s22 = s(2, 2, r)
    s10 = s(1, 0, r)
    s20 = s(2, 0, r)

    def m(a, b):
        return nf(a * b)

    sides = []
    # y1^2
    L = s(2, 1, s11) + s(2, 2, s11).scale(p11)
    R = (s(1, 1, s11).scale(p11) + s(1, 2, s11).scale(p11 * p11)
         + s(1, 1, s21).scale(p12) + s(1, 2, s21).scale(p11 * p12))
    sides.append((L, R))
    # y1 y2
    L = s(2, 1, s12) + s(2, 2, s11).scale(p12)
    R = (s(1, 1, s12).scale(p11) + s(1, 2, s11).scale(p11 * p12)
         + s(1, 1, s22).scale(p12) + s(1, 2, s21).scale(p12 * p12))
    sides.append((L, R))
    # y2^2
    L = s(2, 2, s12)
    R = s(1, 2, s12).scale(p11) + s(1, 2, s22).scale(p12)
    sides.append((L, R))
    # y1
    L = s(2, 0, s11) + s(2, 1, s10) + m(s(2, 2, s11), t1)
    R = ((s(1, 0, s11) + s(1, 1, s10) + m(s(1, 2, s11), t1)).scale(p11)
         + (s(1, 0, s21) + s(1, 1, s20) + m(s(1, 2, s21), t1)).scale(p12)
         + m(t1, s11) + m(t2, s21))
    sides.append((L, R))
    # y2
    L = s(2, 0, s12) + s(2, 2, s10) + m(s(2, 2, s11), t2)
    R = ((s(1, 0, s12) + s(1, 2, s10) + m(s(1, 2, s11), t2)).scale(p11)
         + (s(1, 0, s22) + s(1, 2, s20) + m(s(1, 2, s21), t2)).scale(p12)
         + m(t1, s12) + m(t2, s22))
    sides.append((L, R))
    # 1
    L = s(2, 0, s10) + m(s(2, 2, s11), t0)
    R = ((s(1, 0, s10) + m(s(1, 2, s11), t0)).scale(p11)
         + (s(1, 0, s20) + m(s(1, 2, s21), t0)).scale(p12)
         + m(t1, s10) + m(t2, s20) + m(t0, r))
    sides.append((L, R))
    return [(nf(a), nf(b)) for a, b in sides]


def check_r3_formulas(d: DEData) -> CertReport:
    alpha = d.base.alphabet
    witnesses = []
    for g in range(len(alpha)):
        r = NcPoly.monomial((g,), d.field.one)
        for k, (L, R) in enumerate(r3_sides(d, r), start=1):
            if L != R:
                witnesses.append({"relation": f"R3.{k}", "generator": alpha.names[g],
                                  "lhs": L.render(alpha), "rhs": R.render(alpha),
                                  "residual": (L - R).render(alpha)})
    return CertReport("check_r3_formulas", FAIL if witnesses else PASS, witnesses=witnesses,
                      details={"generators_checked": len(alpha)})


def check_r3_by_ambiguity(d: DEData) -> CertReport:
    """Resolve (y2 y1) x and y2 (y1 x) in the presentation and compare."""
    from .extension import presentation

    rs = presentation(d)
    alpha = rs.alphabet
    n = len(d.base.alphabet)
    y1, y2 = n, n + 1
    r1 = rs._by_lead[(y2, y1)]
    witnesses = []
    for g in range(n):
        r2 = rs._by_lead[(y1, g)]
        left, right = rs.resolve(r1, r2, (y2, y1, g), 1)
        if left != right:
            witnesses.append({"overlap": alpha.word_str((y2, y1, g)),
                              "generator": alpha.names[g],
                              "via_R1_first": left.render(alpha),
                              "via_R2_first": right.render(alpha),
                              "residual": (left - right).render(alpha)})
    return CertReport("check_r3_by_ambiguity", FAIL if witnesses else PASS,
                      witnesses=witnesses, details={"generators_checked": n})


# --- endomorphisms -----------------------------------------------------------

class EndoMap:
    """Graded algebra endomorphism of A given by generator images."""

    def __init__(self, base: ReductionSystem, images: dict[int, NcPoly]):
        self.base = base
        self.images = {g: base.normal_form(p) for g, p in images.items()}

    def __call__(self, p: NcPoly) -> NcPoly:
        return substitute(p, self.images, self.base)

    def __eq__(self, other):
        return isinstance(other, EndoMap) and self.images == other.images

    def compose(self, other: "EndoMap") -> "EndoMap":
        """self o other."""
        return EndoMap(self.base, {g: self(p) for g, p in other.images.items()})

    def is_identity(self) -> bool:
        F = self.base.field
        return all(p == NcPoly.monomial((g,), F.one) for g, p in self.images.items())

    def relation_residuals(self) -> list[tuple[str, NcPoly]]:
        out = []
        for r in self.base.rules:
            rel = NcPoly.monomial(r.lead, self.base.field.one) - r.rhs
            res = self(rel)
            if res:
                out.append((self.base.rule_str(r), res))
        return out

    def is_graded(self) -> bool:
        alpha = self.base.alphabet
        return all(p.is_homogeneous(alpha, alpha.degrees[g]) for g, p in self.images.items())

    def matrix(self, degree: int) -> tuple[ExactMatrix, list[Word]]:
        """Action on the degree piece A_d, columns indexed by the irreducible basis."""
        basis = self.base.irreducible_monomials(degree)
        idx = {w: i for i, w in enumerate(basis)}
        F = self.base.field
        cols = [self.base.coordinates(self(NcPoly.monomial(w, F.one)), idx, len(basis))
                for w in basis]
        return ExactMatrix.from_columns(F, cols, len(basis)), basis

    def render(self) -> dict[str, str]:
        alpha = self.base.alphabet
        return {alpha.names[g]: p.render(alpha) for g, p in sorted(self.images.items())}

    @classmethod
    def identity(cls, base: ReductionSystem) -> "EndoMap":
        F = base.field
        return cls(base, {g: NcPoly.monomial((g,), F.one) for g in range(len(base.alphabet))})


def det_map(d: DEData, r: NcPoly) -> NcPoly:
    """r -> -p11 s12(s11 r) + s22(s11 r) - p12 s12(s21 r), on any element."""
    s = d.s
    s11 = s(1, 1, r)
    out = s(1, 2, s11).scale(-d.p11) + s(2, 2, s11) + s(1, 2, s(2, 1, r)).scale(-d.p12)
    return d.base.normal_form(out)


def det_sigma(d: DEData, check_degree: int = 4) -> EndoMap:
    """Generator images of det sigma, certified multiplicative to ``check_degree``.

    Multiplicativity det(uv) = det(u) det(v) is checked with the formula map
    on every pair of basis monomials u, v of degree <= check_degree.
    """
    base = d.base
    F = d.field
    e = EndoMap(base, {g: det_map(d, NcPoly.monomial((g,), F.one)) for g in range(len(base.alphabet))})
    bad = e.relation_residuals()
    if bad:
        raise EndomorphismViolation(f"det sigma does not kill {bad[0][0]}")
    if not e.is_graded():
        raise EndomorphismViolation("det sigma is not degree preserving")
    viol = det_multiplicativity(d, check_degree)
    if viol:
        raise EndomorphismViolation(f"det sigma not multiplicative on {viol[0]}")
    d._cache["det_checked_to"] = check_degree
    return e


def det_multiplicativity(d: DEData, max_degree: int) -> list[str]:
    base = d.base
    F = d.field
    alpha = base.alphabet
    mons = [w for k in range(max_degree + 1) for w in base.irreducible_monomials(k)]
    dets = {w: det_map(d, NcPoly.monomial(w, F.one)) for w in mons}
    bad = []
    for u in mons:
        for v in mons:
            uv = base.normal_form(NcPoly.monomial(u + v, F.one))
            if det_map(d, uv) != base.normal_form(dets[u] * dets[v]):
                bad.append(f"({alpha.word_str(u)}, {alpha.word_str(v)})")
    return bad


def naive_det_variants(d: DEData) -> dict:
    """Compare det sigma with four composition formulas on the generators.

    ``naive_a``: s22 s11 - p12 s21 s12 and ``naive_b``: s11 s22 - p12^-1 s12 s21
    swap the inner/outer order and are wrong in general; ``definition`` and
    ``rewritten`` are the defining formula and its rewriting through the second
    compatibility relation (p12 != 0).
    """
    s = d.s
    base = d.base
    alpha = base.alphabet
    F = d.field
    p11, p12 = d.p11, d.p12
    gens = [NcPoly.monomial((g,), F.one) for g in range(len(alpha))]
    det = [det_map(d, x) for x in gens]
    variants = {}

    def record(name, formula, fn):
        if fn is None:
            variants[name] = {"formula": formula, "defined": False}
            return
        imgs = [base.normal_form(fn(x)) for x in gens]
        variants[name] = {
            "formula": formula,
            "defined": True,
            "images": {alpha.names[g]: p.render(alpha) for g, p in enumerate(imgs)},
            "equals_det": imgs == det,
        }

    record("naive_a", "s22.s11 - p12 s21.s12",
           lambda x: s(2, 2, s(1, 1, x)) + s(2, 1, s(1, 2, x)).scale(-p12))
    record("naive_b", "s11.s22 - p12^-1 s12.s21",
           None if not p12 else lambda x: s(1, 1, s(2, 2, x)) + s(1, 2, s(2, 1, x)).scale(-1 / p12))
    record("definition", "-p11 s12.s11 + s22.s11 - p12 s12.s21",
           lambda x: det_map(d, x))
    record("rewritten", "-p12^-1 p11 s11.s12 - p12^-1 s21.s12 + s11.s22",
           None if not p12 else lambda x: (s(1, 1, s(1, 2, x)).scale(-p11 / p12)
                                           + s(2, 1, s(1, 2, x)).scale(-1 / p12)
                                           + s(1, 1, s(2, 2, x))))
    return {"det": {alpha.names[g]: p.render(alpha) for g, p in enumerate(det)},
            "variants": variants}


def invert_endo(e: EndoMap, base: ReductionSystem | None = None):
    """Inverse of a graded endomorphism, or None when it is not invertible.

    Degree pieces up to the largest generator degree are inverted; generator
    preimages are read off, then the candidate is certified to be an
    endomorphism and a two-sided inverse on generators.
    """
    base = base or e.base
    F = base.field
    alpha = base.alphabet
    if not alpha.names:
        return EndoMap(base, {})
    top = max(alpha.degrees)
    inv_images = {}
    for deg in range(1, top + 1):
        m, basis = e.matrix(deg)
        if m.rows and inverse(m) is None:
            return None
        idx = {w: i for i, w in enumerate(basis)}
        for g in range(len(alpha)):
            if alpha.degrees[g] != deg:
                continue
            target = base.coordinates(NcPoly.monomial((g,), F.one), idx, len(basis))
            x = solve(m, target)
            if x is None:
                return None
            inv_images[g] = NcPoly({basis[i]: c for i, c in enumerate(x) if c})
    cand = EndoMap(base, inv_images)
    if cand.relation_residuals():
        return None
    if not (cand.compose(e).is_identity() and e.compose(cand).is_identity()):
        return None
    return cand


def right_inverse_phi(d: DEData, det_inv: EndoMap | None = None):
    """phi = [[s22 d^-1, -p s21 d^-1], [-p^-1 s12 d^-1, s11 d^-1]] for P = (p, 0).

    Returns a 2x2 :class:`MatHom` or :class:`Unsupported`.
    """
    if d.p11:
        return Unsupported("p11 != 0: no closed formula; supply phi and use verify_phi")
    if not d.p12:
        return Unsupported("p12 = 0: formula needs p12 invertible")
    if det_inv is None:
        det_inv = invert_endo(det_sigma(d))
        if det_inv is None:
            return Unsupported("det sigma is not invertible")
    p = d.p12
    s = d.s
    imgs = {}
    for g, dinv in det_inv.images.items():
        imgs[g] = [[s(2, 2, dinv), s(2, 1, dinv).scale(-p)],
                   [s(1, 2, dinv).scale(-1 / p), s(1, 1, dinv)]]
    return MatHom(d.base, imgs, 2)


def verify_phi(d: DEData, phi: MatHom, sweep_degree: int = 3) -> CertReport:
    """Check phi is a homomorphism and a two-sided inverse of sigma.

    Conditions  sum_k phi_jk(s_ik(r)) = [i=j] r  and  sum_k s_kj(phi_ki(r)) = [i=j] r
    are tested on generators and on every basis monomial up to ``sweep_degree``.
    """
    base = d.base
    alpha = base.alphabet
    F = d.field
    nf = base.normal_form
    witnesses = []
    for rule in base.rules:
        rel = NcPoly.monomial(rule.lead, F.one) - rule.rhs
        m = phi.extend(rel)
        if not _mat_is_zero(m):
            witnesses.append({"condition": "homomorphism", "relation": base.rule_str(rule)})
    s = d.s
    mons = [w for k in range(1, sweep_degree + 1) for w in base.irreducible_monomials(k)]
    for g in range(len(alpha)):
        if (g,) not in mons:
            mons.append((g,))
    for w in mons:
        r = NcPoly.monomial(w, F.one)
        for i in (1, 2):
            for j in (1, 2):
                want = r if i == j else NcPoly()
                a = nf(sum((phi.entry(j - 1, k - 1, s(i, k, r)) for k in (1, 2)), NcPoly()))
                b = nf(sum((s(k, j, phi.entry(k - 1, i - 1, r)) for k in (1, 2)), NcPoly()))
                if a != want:
                    witnesses.append({"condition": "phi.sigma", "element": alpha.word_str(w),
                                      "index": [i, j], "value": a.render(alpha)})
                if b != want:
                    witnesses.append({"condition": "sigma.phi", "element": alpha.word_str(w),
                                      "index": [i, j], "value": b.render(alpha)})
    return CertReport("verify_phi", FAIL if witnesses else PASS, bound=sweep_degree,
                      witnesses=witnesses, details={"elements_checked": len(mons)})


# --- transforms --------------------------------------------------------------

def trim(d: DEData) -> DEData:
    """Zero delta and tau; P and sigma unchanged."""
    return d.copy(delta={}, tau=(NcPoly(), NcPoly(), NcPoly()))


def linear_change(d: DEData, M: Sequence[Sequence]) -> DEData:
    """Re-express the data in new variables y' = M y (M invertible, scalar).

    sigma' = M sigma M^-1 and delta' = M delta; the quadratic relation is
    rewritten in y' and rescaled so its y2'y1' coefficient is 1.
    """
    F = d.field
    M = [[F(x) for x in r] for r in M]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    if not det:
        raise ValueError("linear change of variables must be invertible")
    Mi = [[M[1][1] / det, -M[0][1] / det], [-M[1][0] / det, M[0][0] / det]]
    if (M[0][1] or M[1][0]) and d.dy1 != d.dy2:
        raise NonHomogeneous("mixing y1 and y2 needs deg y1 = deg y2")

    def lin(mat, vec):  # scalar matrix times column of polys
        return [vec[0].scale(mat[i][0]) + vec[1].scale(mat[i][1]) for i in range(2)]

    sigma = {}
    for g, s in d.sigma.items():
        ms = [[s[0][0].scale(M[i][0]) + s[1][0].scale(M[i][1]),
               s[0][1].scale(M[i][0]) + s[1][1].scale(M[i][1])] for i in range(2)]
        sigma[g] = [[ms[i][0].scale(Mi[0][j]) + ms[i][1].scale(Mi[1][j]) for j in range(2)]
                    for i in range(2)]
    delta = {g: lin(M, col) for g, col in d.delta.items()}
    # y = Mi y'.  Quadratic form Q (q = sum Q_ab y_a y_b) of y2y1 - p12 y1y2 - p11 y1^2.
    Q = [[-d.p11, -d.p12], [F.one, F.zero]]
    Qn = [[sum((Mi[a][c] * Q[a][b] * Mi[b][e] for a in range(2) for b in range(2)), F.zero)
           for e in range(2)] for c in range(2)]
    if Qn[1][1] or not Qn[1][0]:
        raise ValueError("transformation does not keep y2'y1' as the leading product")
    lead = Qn[1][0]
    t1, t2, t0 = d.tau
    # linear part: -(t1 y1 + t2 y2) = -(t1 (Mi y')_1 + t2 (Mi y')_2)
    lin1 = t1.scale(Mi[0][0]) + t2.scale(Mi[1][0])
    lin2 = t1.scale(Mi[0][1]) + t2.scale(Mi[1][1])
    inv = F.one / lead
    return d.copy(p12=-Qn[0][1] * inv, p11=-Qn[0][0] * inv, sigma=sigma, delta=delta,
                  tau=(lin1.scale(inv), lin2.scale(inv), t0.scale(inv)))


def normalize_parameters(d: DEData) -> tuple[DEData, list[list]]:
    """Change variables so that P is (0,0), (1,1) or (p,0).  Returns (data, M)."""
    F = d.field
    p12, p11 = d.p12, d.p11
    one, zero = F.one, F.zero
    if not p11:
        M = [[one, zero], [zero, one]]
    elif p12 != one:
        # y2' = y2 + lam y1 kills p11
        lam = p11 / (p12 - one)
        M = [[one, zero], [lam, one]]
    else:
        # y2' = y2 / p11 turns (1, p11) into (1, 1)
        M = [[one, zero], [zero, one / p11]]
    return linear_change(d, M), M
