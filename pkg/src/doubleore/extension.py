"""Presentation of B = A_P[y1, y2; sigma, delta, tau] and its degree-wise certificates."""
from __future__ import annotations

from dataclasses import dataclass, field

from .dedata import (DEData, MatHom, Unsupported, check_r3_formulas, right_inverse_phi,
                     trim, validate_hom, verify_phi)
from .exactla import ExactMatrix, rank, solve
from .ncalg import NcPoly, ReductionSystem, Rule, Word, series_quotient_check
from .report import FAIL, INCONCLUSIVE, PASS, UNSUPPORTED, CertReport, combine

__all__ = ["ExtensionBuild", "ValidationFailed", "presentation", "build", "certify_pbw",
           "certify_hilbert", "certify_free_rank3", "certify_double", "trim",
           "factor_ring_check", "noetherian_condition"]


class ValidationFailed(ValueError):
    def __init__(self, report: CertReport):
        super().__init__(f"{report.check} failed: {report.witnesses[0] if report.witnesses else ''}")
        self.report = report


def presentation(d: DEData) -> ReductionSystem:
    """Rules of B without validating the data: base rules, R1 on y2*y1, R2 on y_i*x_j."""
    base = d.base
    F = d.field
    n = len(base.alphabet)
    alpha = base.alphabet.extend(d.y_names, (d.dy1, d.dy2))
    y1, y2 = n, n + 1
    Y = (NcPoly.monomial((y1,), F.one), NcPoly.monomial((y2,), F.one))
    rules = [Rule(r.lead, r.rhs, "base") for r in base.rules]
    t1, t2, t0 = d.tau
    r1 = (NcPoly.monomial((y1, y2), d.p12) + NcPoly.monomial((y1, y1), d.p11)
          + t1 * Y[0] + t2 * Y[1] + t0)
    rules.append(Rule((y2, y1), r1, "R1"))
    for i in range(2):
        for g in range(n):
            s = d.sigma[g][i]
            rhs = s[0] * Y[0] + s[1] * Y[1] + d.delta[g][i]
            rules.append(Rule((n + i, g), rhs, "R2"))
    return ReductionSystem(alpha, rules, field=F)


@dataclass
class ExtensionBuild:
    data: DEData
    presentation: ReductionSystem
    reports: list[CertReport] = field(default_factory=list)

    @property
    def provenance(self) -> list[str]:
        return [r.tag for r in self.presentation.rules]

    @property
    def field(self):
        return self.data.field

    @property
    def alphabet(self):
        return self.presentation.alphabet

    @property
    def y(self) -> tuple[int, int]:
        n = len(self.data.base.alphabet)
        return n, n + 1

    def nf(self, p: NcPoly) -> NcPoly:
        return self.presentation.normal_form(p)

    def letter(self, name: str) -> NcPoly:
        return self.presentation.gen(name)

    def basis(self, degree: int) -> list[Word]:
        if degree < 0:
            return []
        return self.presentation.irreducible_monomials(degree)

    def base_basis(self, degree: int) -> list[Word]:
        if degree < 0:
            return []
        return self.data.base.irreducible_monomials(degree)

    def rules_text(self) -> list[str]:
        return [self.presentation.rule_str(r) for r in self.presentation.rules]


def build(d: DEData) -> ExtensionBuild:
    """Validate the data (homomorphism law and R3) and assemble B."""
    reports = [validate_hom(d), check_r3_formulas(d)]
    for r in reports:
        if r.verdict == FAIL:
            raise ValidationFailed(r)
    return ExtensionBuild(d, presentation(d), reports)


# --- helpers -------------------------------------------------------------------

def _coords(b: ExtensionBuild, p: NcPoly, index: dict[Word, int]) -> list:
    return b.presentation.coordinates(p, index, len(index))


def _matrix(b: ExtensionBuild, images: list[NcPoly], target: list[Word]) -> ExactMatrix:
    idx = {w: i for i, w in enumerate(target)}
    cols = [_coords(b, p, idx) for p in images]
    return ExactMatrix.from_columns(b.field, cols, len(target))


def _mono(b: ExtensionBuild, w: Word) -> NcPoly:
    return NcPoly.monomial(w, b.field.one)


def _pbw_words(b: ExtensionBuild, degree: int) -> set[Word]:
    """{m * y1^n1 * y2^n2 : m in Basis_A} in the given degree."""
    d = b.data
    y1, y2 = b.y
    out = set()
    for n1 in range(degree // d.dy1 + 1):
        for n2 in range((degree - n1 * d.dy1) // d.dy2 + 1):
            rest = degree - n1 * d.dy1 - n2 * d.dy2
            for m in b.base_basis(rest):
                out.add(m + (y1,) * n1 + (y2,) * n2)
    return out


# --- certificates ----------------------------------------------------------------

def certify_pbw(b: ExtensionBuild, max_degree: int) -> CertReport:
    """Confluence to ``max_degree`` and irreducible words = Basis_A * y1^n1 * y2^n2."""
    conf = b.presentation.check_confluence(max_degree)
    alpha = b.alphabet
    witnesses = []
    counts = []
    for deg in range(max_degree + 1):
        got = set(b.basis(deg))
        want = _pbw_words(b, deg)
        counts.append(len(got))
        if got != want:
            extra = sorted(got - want, reverse=True)
            missing = sorted(want - got, reverse=True)
            witnesses.append({"degree": deg,
                              "unexpected": [alpha.word_str(w) for w in extra[:5]],
                              "missing": [alpha.word_str(w) for w in missing[:5]]})
    basis_rep = CertReport("pbw_basis", FAIL if witnesses else PASS, bound=max_degree,
                           witnesses=witnesses, details={"counts": counts})
    rep = combine("certify_pbw", [conf, basis_rep], bound=max_degree, details={"counts": counts})
    rep.notes.append(f"certified for degrees <= {max_degree} only")
    return rep


def certify_hilbert(b: ExtensionBuild, max_degree: int) -> CertReport:
    hA = b.data.base.hilbert_function(max_degree)
    hB = b.presentation.hilbert_function(max_degree)
    rep = series_quotient_check(hA, b.data.dy1, b.data.dy2, hB, check="certify_hilbert")
    rep.details["base"] = hA
    return rep


def certify_free_rank3(b: ExtensionBuild, max_degree: int) -> CertReport:
    """y1 A + y2 A + A is free of rank 3 and equals A y1 + A y2 + A, degree by degree."""
    d = b.data
    y1, y2 = b.y
    Y1, Y2 = _mono(b, (y1,)), _mono(b, (y2,))
    witnesses = []
    ranks = []
    for deg in range(max_degree + 1):
        target = b.basis(deg)
        blocks = [(Y1, b.base_basis(deg - d.dy1)), (Y2, b.base_basis(deg - d.dy2)),
                  (None, b.base_basis(deg))]
        left, right = [], []
        for y, mons in blocks:
            for m in mons:
                a = _mono(b, m)
                left.append(b.nf(y * a) if y is not None else a)
                right.append(b.nf(a * y) if y is not None else a)
        if not left:
            ranks.append(0)
            continue
        L = _matrix(b, left, target)
        R = _matrix(b, right, target)
        both = _matrix(b, left + right, target)
        rl, rr, rb = rank(L), rank(R), rank(both)
        ranks.append(rl)
        if rl < len(left):
            witnesses.append({"degree": deg, "reason": "left map not injective",
                              "rank": rl, "domain": len(left)})
        elif not (rl == rr == rb):
            witnesses.append({"degree": deg, "reason": "left and right spans differ",
                              "rank_left": rl, "rank_right": rr, "rank_union": rb})
    return CertReport("certify_free_rank3", FAIL if witnesses else PASS, bound=max_degree,
                      witnesses=witnesses, details={"ranks": ranks})


def _right_basis_check(b: ExtensionBuild, max_degree: int) -> CertReport:
    """{NF(y2^n1 y1^n2 m)} spans B_d with exactly dim B_d elements."""
    d = b.data
    y1, y2 = b.y
    witnesses = []
    for deg in range(max_degree + 1):
        elems = []
        for n1 in range(deg // d.dy2 + 1):
            for n2 in range((deg - n1 * d.dy2) // d.dy1 + 1):
                rest = deg - n1 * d.dy2 - n2 * d.dy1
                for m in b.base_basis(rest):
                    elems.append(b.nf(_mono(b, (y2,) * n1 + (y1,) * n2 + m)))
        target = b.basis(deg)
        r = rank(_matrix(b, elems, target)) if elems else 0
        if r != len(target) or len(elems) != len(target):
            witnesses.append({"degree": deg, "elements": len(elems), "rank": r,
                              "dimension": len(target)})
    return CertReport("right_basis", FAIL if witnesses else PASS, bound=max_degree,
                      witnesses=witnesses)


def left_form(b: ExtensionBuild) -> dict | None:
    """Coefficients of y1*y2 = p12' y2y1 + p11' y2^2 + y1 tau1' + y2 tau2' + tau0'."""
    d = b.data
    F = b.field
    y1, y2 = b.y
    alpha = b.alphabet
    deg = d.dy1 + d.dy2
    labels, elems = [], []
    for n1 in range(deg // d.dy2 + 1):
        for n2 in range((deg - n1 * d.dy2) // d.dy1 + 1):
            rest = deg - n1 * d.dy2 - n2 * d.dy1
            for m in b.base_basis(rest):
                labels.append(((y2,) * n1 + (y1,) * n2, m))
                elems.append(b.nf(_mono(b, (y2,) * n1 + (y1,) * n2 + m)))
    target = b.basis(deg)
    idx = {w: i for i, w in enumerate(target)}
    lhs = b.nf(_mono(b, (y1, y2)))
    x = solve(_matrix(b, elems, target), _coords(b, lhs, idx))
    if x is None:
        return None
    parts = {"p12'": F.zero, "p11'": F.zero, "tau1'": NcPoly(), "tau2'": NcPoly(),
             "tau0'": NcPoly()}
    for (ys, m), c in zip(labels, x):
        if not c:
            continue
        if ys == (y2, y1):
            parts["p12'"] += c
        elif ys == (y2, y2):
            parts["p11'"] += c
        elif ys == (y1,):
            parts["tau1'"] = parts["tau1'"] + NcPoly.monomial(m, c)
        elif ys == (y2,):
            parts["tau2'"] = parts["tau2'"] + NcPoly.monomial(m, c)
        elif ys == ():
            parts["tau0'"] = parts["tau0'"] + NcPoly.monomial(m, c)
        else:
            return None
    # re-substitute and compare with NF(y1 y2)
    Y1, Y2 = _mono(b, (y1,)), _mono(b, (y2,))
    back = (_mono(b, (y2, y1)).scale(parts["p12'"]) + _mono(b, (y2, y2)).scale(parts["p11'"])
            + Y1 * parts["tau1'"] + Y2 * parts["tau2'"] + parts["tau0'"])
    parts["resubstitution_ok"] = b.nf(back) == lhs
    return parts


def _render_left_form(b: ExtensionBuild, parts: dict) -> dict:
    from .exactla import scalar_str
    base_alpha = b.alphabet
    out = {}
    for k, v in parts.items():
        if isinstance(v, NcPoly):
            out[k] = v.render(base_alpha)
        elif isinstance(v, bool):
            out[k] = v
        else:
            out[k] = scalar_str(v)
    return out


def certify_double(b: ExtensionBuild, max_degree: int, phi: MatHom | None = None) -> CertReport:
    """p12 != 0, sigma invertible, rank-3 freeness and the right basis, up to the bound."""
    d = b.data
    parts = []
    notes = []
    if d.p12:
        parts.append(CertReport("p12_nonzero", PASS))
    else:
        parts.append(CertReport("p12_nonzero", FAIL, witnesses=[{"reason": "p12 = 0"}]))
    if phi is None and d.p12:
        phi = right_inverse_phi(d)
    if isinstance(phi, Unsupported):
        if d.p11:
            notes.append(f"sigma inverse not constructed ({phi.reason}); "
                         "verdict rests on the remaining checks")
        else:
            parts.append(CertReport("verify_phi", FAIL, witnesses=[{"reason": phi.reason}]))
    elif phi is not None:
        parts.append(verify_phi(d, phi, sweep_degree=min(3, max_degree)))
    parts.append(certify_free_rank3(b, max_degree))
    parts.append(_right_basis_check(b, max_degree))
    details = {}
    if d.p12:
        lf = left_form(b)
        if lf is not None:
            details["left_form"] = _render_left_form(b, lf)
    rep = combine("certify_double", parts, bound=max_degree, details=details)
    rep.notes.extend(notes)
    return rep


def factor_ring_check(b: ExtensionBuild) -> CertReport:
    """B/(A>=1): drop every base letter and keep the y-only part of R1."""
    d = b.data
    alpha = b.alphabet
    n = len(d.base.alphabet)
    scalar_entries = [alpha.names[g] for g, m in d.sigma.items()
                      for row in m for e in row if () in e.terms]
    if d.dy1 != d.dy2 and scalar_entries:
        return CertReport("factor_ring_check", INCONCLUSIVE, bound=0,
                          notes=["sigma(A>=1) not inside M2(A>=1) and deg y1 != deg y2"])
    y1, y2 = b.y
    quotient = []
    for r in b.presentation.rules:
        if any(i < n for i in r.lead):
            continue
        kept = NcPoly({w: c for w, c in r.rhs.terms.items() if all(i >= n for i in w)})
        quotient.append((r.lead, kept))
    expected = [((y2, y1), NcPoly({(y1, y2): d.p12, (y1, y1): d.p11}))]
    witnesses = []
    if quotient != expected:
        witnesses.append({"found": [f"{alpha.word_str(l)} -> {p.render(alpha)}" for l, p in quotient],
                          "expected": f"y2*y1 -> {expected[0][1].render(alpha)}"})
    rel = NcPoly.monomial((y2, y1), d.field.one) - expected[0][1]
    rep = CertReport("factor_ring_check", FAIL if witnesses else PASS, witnesses=witnesses,
                     details={"relation": rel.render(alpha),
                              "noetherian_necessary_condition": bool(d.p12)})
    if not d.p12:
        rep.notes.append("fails noetherian necessary condition (p12 = 0)")
    return rep


def noetherian_condition(b: ExtensionBuild) -> CertReport:
    """The necessary condition p12 != 0 for B to be noetherian."""
    if b.data.p12:
        return CertReport("noetherian_necessary_condition", PASS)
    return CertReport("noetherian_necessary_condition", FAIL,
                      witnesses=[{"reason": "p12 = 0", "relation":
                                  factor_ring_check(b).details.get("relation", "")}])
