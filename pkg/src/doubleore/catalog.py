"""Builtin example extensions and their parameter constraints."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dedata import DEData
from .exactla import QQ
from .ncalg import Alphabet, NcPoly, ReductionSystem, Rule


class ParameterConstraintViolated(ValueError):
    pass


@dataclass
class ExampleSpec:
    name: str
    params: dict
    data: DEData


# name -> (parameter names, defaults)
PARAMS = {
    "trivial": (("p12", "p11", "a1", "a2", "a3"), (1, 0, 0, 0, 0)),
    "B1": (("p", "a", "b", "c"), (2, 1, 3, 0)),
    "B2": (("a", "b", "c"), (1, 1, 0)),
    "B3": (("a",), (2,)),
    "B4": (("a", "b", "c"), (1, 1, 1)),
    "Bh": (("h",), (2,)),
}


def _scalar(field, v):
    if isinstance(v, str):
        v = Fraction(v.strip())
    return field(v)


def polynomial_ring(field, name: str = "x") -> ReductionSystem:
    """k[x], one generator of degree 1 and no relations."""
    return ReductionSystem(Alphabet([name]), [], field=field)


def skew_plane(field) -> ReductionSystem:
    """k_{-1}[x1, x2]: x2*x1 = -x1*x2."""
    alpha = Alphabet(["x1", "x2"])
    return ReductionSystem(alpha, [Rule((1, 0), NcPoly({(0, 1): -field.one}))], field=field)


def free_algebra(field, names=("x1", "x2")) -> ReductionSystem:
    return ReductionSystem(Alphabet(list(names)), [], field=field)


def ground_field(field) -> ReductionSystem:
    return ReductionSystem(Alphabet([]), [], field=field)


def builtin(name: str, params: dict | None = None, field=QQ) -> ExampleSpec:
    """Build a catalog example; missing parameters take the defaults in ``PARAMS``."""
    if name not in PARAMS:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(PARAMS)}")
    names, defaults = PARAMS[name]
    params = dict(params or {})
    unknown = set(params) - set(names)
    if unknown:
        raise ParameterConstraintViolated(f"{name} has no parameter(s) {sorted(unknown)}")
    vals = {k: _scalar(field, params.get(k, dv)) for k, dv in zip(names, defaults)}
    data = _RECIPES[name](field, **vals)
    return ExampleSpec(name, vals, data)


def _trivial(F, p12, p11, a1, a2, a3):
    base = ground_field(F)
    # over A = k the tail is scalar; homogeneity forces it to vanish
    return DEData(base, p12, p11, {}, {},
                  (NcPoly.scalar(a1), NcPoly.scalar(a2), NcPoly.scalar(a3)))


def _b1(F, p, a, b, c):
    if not p:
        raise ParameterConstraintViolated("B1 needs p != 0")
    if not b or b == F.one:
        raise ParameterConstraintViolated("B1 needs b not in {0, 1}")
    base = polynomial_ring(F)
    x, x2 = (0,), (0, 0)
    sigma = {0: [[NcPoly({x: b}), NcPoly()], [NcPoly(), NcPoly({x: 1 / b})]]}
    delta = {0: [NcPoly(), NcPoly({x2: c})]}
    t1 = NcPoly({x: b * c / (F.one - b) * (p * b - F.one)})
    tau = (t1, NcPoly(), NcPoly({x2: a}))
    return DEData(base, p, 0, sigma, delta, tau)


def _b2(F, a, b, c):
    if not b:
        raise ParameterConstraintViolated("B2 needs b != 0")
    base = polynomial_ring(F)
    x, x2 = (0,), (0, 0)
    sigma = {0: [[NcPoly(), NcPoly({x: 1 / b})], [NcPoly({x: b}), NcPoly()]]}
    delta = {0: [NcPoly({x2: c}), NcPoly({x2: -b * c})]}
    return DEData(base, -1, 0, sigma, delta, (NcPoly(), NcPoly(), NcPoly({x2: a})))


def _b3(F, a):
    if not a:
        raise ParameterConstraintViolated("B3 needs a != 0")
    base = polynomial_ring(F)
    x = (0,)
    sigma = {0: [[NcPoly({x: a}), NcPoly({x: F.one})], [NcPoly(), NcPoly({x: a})]]}
    return DEData(base, 1, 0, sigma)


def _b4(F, a, b, c):
    if b == -F.one:
        raise ParameterConstraintViolated("B4 needs b != -1")
    if not b:
        raise ParameterConstraintViolated("B4 needs b != 0 (2 + 2/b appears in sigma)")
    base = polynomial_ring(F)
    x, x2 = (0,), (0, 0)
    sigma = {0: [[NcPoly({x: F.one}), NcPoly()],
                 [NcPoly({x: 2 + 2 / b}), NcPoly({x: F.one})]]}
    delta = {0: [NcPoly({x2: b}), NcPoly()]}
    tau = (NcPoly({x: a}), NcPoly({x: b / (1 + b)}), NcPoly({x2: c}))
    return DEData(base, 1, 1, sigma, delta, tau)


def _bh(F, h):
    if not h:
        raise ParameterConstraintViolated("B(h) needs h != 0")
    base = skew_plane(F)
    x1, x2 = (0,), (1,)
    sigma = {
        0: [[NcPoly({x1: h, x2: h}), NcPoly({x1: h})], [NcPoly({x2: h}), NcPoly()]],
        1: [[NcPoly(), NcPoly({x1: h})], [NcPoly({x2: -h}), NcPoly({x1: -h, x2: h})]],
    }
    return DEData(base, -1, 0, sigma)


_RECIPES = {"trivial": _trivial, "B1": _b1, "B2": _b2, "B3": _b3, "B4": _b4, "Bh": _bh}


def right_only(field=QQ) -> DEData:
    """A right double extension of the free algebra k<x1, x2> with p12 = 0 that is not a left one.

    y1 x_i = x_i y1 and y2 x_i = 0, with y2 y1 = 0.
    """
    base = free_algebra(field)
    sigma = {g: [[NcPoly({(g,): field.one}), NcPoly()], [NcPoly(), NcPoly()]] for g in (0, 1)}
    return DEData(base, 0, 0, sigma)
