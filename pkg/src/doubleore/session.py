"""Session files: a small line-oriented format describing A and the DE-data.

    # comments start with '#'
    field = q                      # or fp:<prime>
    [base]
    generators = x1:1, x2:1
    relation = x2*x1 + x1*x2       # 'lhs = rhs' is accepted too; repeatable
    [extension]
    y = y1:1, y2:1                 # optional, this is the default
    p12 = -1
    p11 = 0
    tau = [0, 0, 0]
    sigma(x1) = [[2*x1 + 2*x2, 2*x1], [2*x2, 0]]
    delta(x1) = [0, 0]             # optional, zero by default
    [options]
    max_degree = 5
    checks = validate, pbw

Expressions: ``expr := term (('+'|'-') term)*``, ``term := factor ('*' factor)*``,
``factor := scalar | name | '(' expr ')' | '-' factor``, ``scalar := int ['/' int]``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from dataclasses import field as dc_field
from fractions import Fraction

from .dedata import DEData
from .exactla import FieldError, field_from_name
from .ncalg import Alphabet, NcPoly, ReductionSystem, RuleError


class SessionError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        loc = f"line {line}, column {col}: " if line else ""
        super().__init__(loc + msg)
        self.line, self.col = line, col


Pos = tuple


def _pos():
    return dc_field(default=(0, 0), compare=False, repr=False)


# --- expression AST -----------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: Pos = _pos()


@dataclass(frozen=True)
class Name:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Neg:
    arg: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class Prod:
    factors: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class Sum:
    terms: tuple   # ((sign, node), ...), sign in {+1, -1}
    pos: Pos = _pos()


def render_expr(node) -> str:
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Neg):
        return "-" + _factor_str(node.arg)
    if isinstance(node, Prod):
        return "*".join(_factor_str(f) for f in node.factors)
    if isinstance(node, Sum):
        wrap = lambda t: f"({render_expr(t)})" if isinstance(t, Sum) else render_expr(t)  # noqa: E731
        out = wrap(node.terms[0][1])
        for sign, t in node.terms[1:]:
            out += (" + " if sign > 0 else " - ") + wrap(t)
        return out
    raise TypeError(node)


def _factor_str(node) -> str:
    if isinstance(node, (Sum, Prod)):
        return f"({render_expr(node)})"
    return render_expr(node)


# --- session AST -----------------------------------------------------------------

@dataclass
class Relation:
    lhs: object
    rhs: object | None = None
    pos: Pos = _pos()


@dataclass
class ExtensionBlock:
    y: list = dc_field(default_factory=lambda: [("y1", 1), ("y2", 1)])
    p12: object = None
    p11: object = None
    tau: list | None = None
    sigma: dict = dc_field(default_factory=dict)
    delta: dict = dc_field(default_factory=dict)
    pos: dict = dc_field(default_factory=dict, compare=False, repr=False)  # key -> (line, col)


@dataclass
class SessionFile:
    field: str = "q"
    generators: list = dc_field(default_factory=list)
    relations: list = dc_field(default_factory=list)
    extension: ExtensionBlock | None = None
    options: dict = dc_field(default_factory=dict)


# --- tokenizer and expression parser ----------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokens(text: str, line: int, col0: int):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            out.append(("int", m.group(1), col0 + m.start(1)))
        elif m.group(2):
            out.append(("name", m.group(2), col0 + m.start(2)))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/()[],=":
                raise SessionError(f"unexpected character {ch!r}", line, col0 + m.start(3) + 1)
            out.append((ch, ch, col0 + m.start(3)))
        pos = m.end()
    out.append(("end", "", col0 + len(text)))
    return out


class _Parser:
    def __init__(self, text: str, line: int, col0: int):
        self.toks = _tokens(text, line, col0)
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        t = self.toks[self.i]
        if kind is not None and t[0] != kind:
            want = "end of line" if kind == "end" else repr(kind)
            got = "end of line" if t[0] == "end" else repr(t[1])
            raise SessionError(f"expected {want}, found {got}", self.line, t[2] + 1)
        self.i += 1
        return t

    def where(self):
        return (self.line, self.peek()[2] + 1)

    def expr(self):
        pos = self.where()
        terms = [(1, self.term())]
        while self.peek()[0] in ("+", "-"):
            sign = 1 if self.take()[0] == "+" else -1
            terms.append((sign, self.term()))
        if len(terms) == 1:
            return terms[0][1]
        return Sum(tuple(terms), pos)

    def term(self):
        pos = self.where()
        fs = [self.factor()]
        while self.peek()[0] == "*":
            self.take()
            fs.append(self.factor())
        return fs[0] if len(fs) == 1 else Prod(tuple(fs), pos)

    def factor(self):
        pos = self.where()
        kind, val, col = self.peek()
        if kind == "-":
            self.take()
            return Neg(self.factor(), pos)
        if kind == "int":
            self.take()
            num = int(val)
            den = 1
            if self.peek()[0] == "/":
                self.take()
                den = int(self.take("int")[1])
                if den == 0:
                    raise SessionError("zero denominator", self.line, col + 1)
            return Num(Fraction(num, den), pos)
        if kind == "name":
            self.take()
            return Name(val, pos)
        if kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        got = "end of line" if kind == "end" else repr(val)
        raise SessionError(f"expected a scalar, generator or '(', found {got}", self.line, col + 1)

    def bracket(self, shape):
        """Parse '[e, ...]' (shape = n) or '[[..],[..]]' (shape = (r, c))."""
        if isinstance(shape, tuple):
            r, c = shape
            start = self.where()
            self.take("[")
            rows = [self.bracket(c)]
            while self.peek()[0] == ",":
                self.take()
                rows.append(self.bracket(c))
            self.take("]")
            if len(rows) != r:
                raise SessionError(f"expected a {r}x{c} matrix, found {len(rows)} rows", *start)
            return rows
        start = self.where()
        if self.peek()[0] != "[":
            raise SessionError(f"expected a list of {shape} entries in brackets", *start)
        self.take("[")
        items = [self.expr()]
        while self.peek()[0] == ",":
            self.take()
            items.append(self.expr())
        self.take("]")
        if len(items) != shape:
            raise SessionError(f"expected {shape} entries, found {len(items)}", *start)
        return items


def parse_expression(text: str, line: int = 1, col0: int = 0):
    p = _Parser(text, line, col0)
    e = p.expr()
    p.take("end")
    return e


# --- file parser ------------------------------------------------------------------

_KEY = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*\))?\s*=")


def _gen_list(text: str, line: int, col0: int) -> list:
    out = []
    for m in re.finditer(r"[^,]+", text):
        item = m.group(0).strip()
        if not item:
            continue
        mm = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*(?::\s*(\d+))?", item)
        if not mm:
            raise SessionError(f"bad generator declaration {item!r}", line, col0 + m.start() + 1)
        out.append((mm.group(1), int(mm.group(2) or 1)))
    return out


def parse(text: str, field_override: str | None = None) -> SessionFile:
    """Parse and check a session file.  Raises :class:`SessionError` with a position."""
    s = SessionFile()
    section = None
    seen_field = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        st = line.strip()
        if st.startswith("["):
            name = st.strip("[] ").lower()
            if not st.endswith("]") or name not in ("base", "extension", "options"):
                raise SessionError(f"unknown section {st!r}", ln, raw.index("[") + 1)
            section = name
            if name == "extension" and s.extension is None:
                s.extension = ExtensionBlock()
                s.extension.pos["[extension]"] = (ln, raw.index("[") + 1)
            continue
        m = _KEY.match(line)
        if not m:
            raise SessionError("expected 'key = value'", ln, len(line) - len(line.lstrip()) + 1)
        key, arg = m.group(1), m.group(2)
        vcol = m.end()
        value = line[vcol:]
        if section is None:
            if key != "field" or arg:
                raise SessionError(f"unexpected key {key!r} before any section", ln, m.start(1) + 1)
            s.field = value.strip().lower()
            seen_field = True
            continue
        if section == "base":
            if key == "generators":
                s.generators.extend(_gen_list(value, ln, vcol))
            elif key == "relation":
                p = _Parser(value, ln, vcol)
                lhs = p.expr()
                rhs = None
                if p.peek()[0] == "=":
                    p.take()
                    rhs = p.expr()
                p.take("end")
                s.relations.append(Relation(lhs, rhs, (ln, vcol + 1)))
            else:
                raise SessionError(f"unknown base key {key!r}", ln, m.start(1) + 1)
        elif section == "extension":
            ext = s.extension
            ext.pos[f"{key}({arg})" if arg else key] = (ln, m.start(1) + 1)
            if key == "y":
                ext.y = _gen_list(value, ln, vcol)
                if len(ext.y) != 2:
                    raise SessionError("exactly two y generators are required", ln, vcol + 1)
            elif key in ("p12", "p11"):
                setattr(ext, key, parse_expression(value, ln, vcol))
            elif key == "tau":
                p = _Parser(value, ln, vcol)
                ext.tau = p.bracket(3)
                p.take("end")
            elif key in ("sigma", "delta"):
                if not arg:
                    raise SessionError(f"{key} needs a generator, as in {key}(x1)", ln, m.start(1) + 1)
                p = _Parser(value, ln, vcol)
                val = p.bracket((2, 2)) if key == "sigma" else p.bracket(2)
                p.take("end")
                target = ext.sigma if key == "sigma" else ext.delta
                if arg in target:
                    raise SessionError(f"{key}({arg}) given twice", ln, m.start(1) + 1)
                target[arg] = val
            else:
                raise SessionError(f"unknown extension key {key!r}", ln, m.start(1) + 1)
        else:
            v = value.strip()
            if key == "max_degree":
                if not v.isdigit():
                    raise SessionError("max_degree must be a nonnegative integer", ln, vcol + 1)
                s.options[key] = int(v)
            elif key == "checks":
                s.options[key] = [c.strip() for c in v.split(",") if c.strip()]
            else:
                raise SessionError(f"unknown option {key!r}", ln, m.start(1) + 1)
    if field_override:
        s.field = field_override
    try:
        field_from_name(s.field)
    except FieldError as e:
        raise SessionError(str(e), 1 if seen_field else 0, 1) from None
    check(s)
    return s


# --- semantics ----------------------------------------------------------------------

def evaluate(node, alphabet: Alphabet, F) -> NcPoly:
    """Evaluate an expression AST to a free-algebra element over ``F``."""
    if isinstance(node, Num):
        try:
            return NcPoly.scalar(F.literal(node.value.numerator, node.value.denominator))
        except FieldError as e:
            raise SessionError(str(e), *node.pos) from None
    if isinstance(node, Name):
        if node.name not in alphabet.index:
            raise SessionError(f"unknown generator {node.name!r}", *node.pos)
        return NcPoly.monomial((alphabet.index[node.name],), F.one)
    if isinstance(node, Neg):
        return -evaluate(node.arg, alphabet, F)
    if isinstance(node, Prod):
        out = evaluate(node.factors[0], alphabet, F)
        for f in node.factors[1:]:
            out = out * evaluate(f, alphabet, F)
        return out
    if isinstance(node, Sum):
        out = NcPoly()
        for sign, t in node.terms:
            v = evaluate(t, alphabet, F)
            out = out + (v if sign > 0 else -v)
        return out
    raise TypeError(node)


def _relation_poly(r: Relation, alphabet, F) -> NcPoly:
    f = evaluate(r.lhs, alphabet, F)
    if r.rhs is not None:
        f = f - evaluate(r.rhs, alphabet, F)
    return f


def _base_alphabet(s: SessionFile) -> Alphabet:
    try:
        return Alphabet([n for n, _ in s.generators], [d for _, d in s.generators])
    except ValueError as e:
        raise SessionError(str(e)) from None


def check(s: SessionFile):
    """Semantic checks: names, homogeneity, literals valid in the field."""
    F = field_from_name(s.field)
    alpha = _base_alphabet(s)
    for r in s.relations:
        f = _relation_poly(r, alpha, F)
        if f and not f.is_homogeneous(alpha):
            raise SessionError("relation is not homogeneous", *r.pos)
    ext = s.extension
    if ext is None:
        return
    for key in ("p12", "p11"):
        node = getattr(ext, key)
        if node is None:
            raise SessionError(f"extension block is missing {key}",
                               *ext.pos.get("[extension]", (0, 0)))
        v = evaluate(node, Alphabet([]), F)
        if v.terms and set(v.terms) != {()}:
            raise SessionError(f"{key} must be a scalar", *node.pos)
    for key, table in (("sigma", ext.sigma), ("delta", ext.delta)):
        for g in table:
            if g not in alpha.index:
                raise SessionError(f"{key}({g}): unknown base generator",
                                   *ext.pos.get(f"{key}({g})", (0, 0)))
    missing = [n for n in alpha.names if n not in ext.sigma]
    if missing:
        raise SessionError(f"sigma is not given on {', '.join(missing)}",
                           *ext.pos.get("[extension]", (0, 0)))
    nodes = [e for m in ext.sigma.values() for row in m for e in row]
    nodes += [e for col in ext.delta.values() for e in col]
    nodes += list(ext.tau or [])
    for e in nodes:
        evaluate(e, alpha, F)


def to_data(s: SessionFile) -> DEData:
    """Build the base reduction system and the DE-data described by a session."""
    F = field_from_name(s.field)
    alpha = _base_alphabet(s)
    rels = [_relation_poly(r, alpha, F) for r in s.relations]
    try:
        base = ReductionSystem.from_relations(alpha, rels, field=F, tag="base")
    except RuleError as e:
        raise SessionError(f"base relations: {e}") from None
    ext = s.extension
    if ext is None:
        raise SessionError("no [extension] block")
    nf = base.normal_form
    ev = lambda e: nf(evaluate(e, alpha, F))  # noqa: E731
    sigma = {alpha.index[g]: [[ev(e) for e in row] for row in m] for g, m in ext.sigma.items()}
    delta = {alpha.index[g]: [ev(e) for e in col] for g, col in ext.delta.items()}
    tau = tuple(ev(e) for e in ext.tau) if ext.tau else (NcPoly(), NcPoly(), NcPoly())
    scal = lambda e: evaluate(e, Alphabet([]), F).coeff((), F.zero)  # noqa: E731
    (n1, d1), (n2, d2) = ext.y
    return DEData(base, scal(ext.p12), scal(ext.p11), sigma, delta, tau,
                  dy1=d1, dy2=d2, y_names=(n1, n2))


def base_system(s: SessionFile) -> ReductionSystem:
    F = field_from_name(s.field)
    alpha = _base_alphabet(s)
    rels = [_relation_poly(r, alpha, F) for r in s.relations]
    return ReductionSystem.from_relations(alpha, rels, field=F, tag="base")


# --- rendering ------------------------------------------------------------------------

def render(s: SessionFile) -> str:
    out = [f"field = {s.field}", "[base]"]
    if s.generators:
        out.append("generators = " + ", ".join(f"{n}:{d}" for n, d in s.generators))
    for r in s.relations:
        txt = render_expr(r.lhs)
        if r.rhs is not None:
            txt += " = " + render_expr(r.rhs)
        out.append(f"relation = {txt}")
    ext = s.extension
    if ext is not None:
        out.append("[extension]")
        out.append("y = " + ", ".join(f"{n}:{d}" for n, d in ext.y))
        out.append(f"p12 = {render_expr(ext.p12)}")
        out.append(f"p11 = {render_expr(ext.p11)}")
        if ext.tau is not None:
            out.append("tau = [" + ", ".join(render_expr(e) for e in ext.tau) + "]")
        for g, m in ext.sigma.items():
            rows = ", ".join("[" + ", ".join(render_expr(e) for e in row) + "]" for row in m)
            out.append(f"sigma({g}) = [{rows}]")
        for g, col in ext.delta.items():
            out.append(f"delta({g}) = [" + ", ".join(render_expr(e) for e in col) + "]")
    if s.options:
        out.append("[options]")
        if "max_degree" in s.options:
            out.append(f"max_degree = {s.options['max_degree']}")
        if "checks" in s.options:
            out.append("checks = " + ", ".join(s.options["checks"]))
    return "\n".join(out) + "\n"


def from_data(d: DEData) -> SessionFile:
    """Session describing existing data (canonical polynomial text for every entry)."""
    from .exactla import scalar_str

    base = d.base
    alpha = base.alphabet
    F = d.field
    s = SessionFile(field=F.name, generators=list(zip(alpha.names, alpha.degrees)))
    for r in base.rules:
        rel = NcPoly.monomial(r.lead, F.one) - r.rhs
        s.relations.append(Relation(parse_expression(rel.render(alpha))))
    ex = lambda p: parse_expression(p.render(alpha))  # noqa: E731
    ext = ExtensionBlock(y=[(d.y_names[0], d.dy1), (d.y_names[1], d.dy2)],
                         p12=parse_expression(scalar_str(d.p12)),
                         p11=parse_expression(scalar_str(d.p11)),
                         tau=[ex(t) for t in d.tau])
    for g in range(len(alpha)):
        ext.sigma[alpha.names[g]] = [[ex(e) for e in row] for row in d.sigma[g]]
        if any(d.delta[g]):
            ext.delta[alpha.names[g]] = [ex(e) for e in d.delta[g]]
    s.extension = ext
    return s
