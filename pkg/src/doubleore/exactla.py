"""Exact scalars and dense linear algebra over Q or F_p.

Two field backends share one small interface:

    field(x)        coerce an int / Fraction / literal into the field
    field.zero, field.one
    field.literal(num, den)

Rationals are plain :class:`fractions.Fraction` values.  Prime-field values
are :class:`Fp` instances.  Both support ``+ - * /``, unary minus, ``==`` and
truth testing, so the rest of the package is written once for both.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class FieldError(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Fp:
    """Element of the prime field F_p, stored as an int in [0, p)."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other) -> int:
        if isinstance(other, Fp):
            if other.p != self.p:
                raise FieldError(f"mixing F_{self.p} and F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise FieldError(f"{other} has no image in F_{self.p}")
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return Fp(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.v == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return Fp(o * pow(self.v, -1, self.p), self.p)

    def __pow__(self, n: int):
        if n < 0:
            if self.v == 0:
                raise ZeroDivisionError(f"division by zero in F_{self.p}")
            return Fp(pow(pow(self.v, -1, self.p), -n, self.p), self.p)
        return Fp(pow(self.v, n, self.p), self.p)

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __pos__(self):
        return self

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.v == other.v
        if isinstance(other, (int, Fraction)):
            try:
                return self.v == self._coerce(other) % self.p
            except FieldError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"Fp({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class Rationals:
    """The field Q, backed by :class:`fractions.Fraction`."""

    name = "q"
    characteristic = 0

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __call__(self, x) -> Fraction:
        if isinstance(x, Fp):
            raise FieldError("cannot coerce an F_p element into Q")
        return Fraction(x)

    def literal(self, num: int, den: int = 1) -> Fraction:
        if den == 0:
            raise FieldError("zero denominator in literal")
        return Fraction(num, den)

    def elements(self):
        raise FieldError("Q is infinite; enumeration is only available over F_p")

    def is_finite(self) -> bool:
        return False

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Rationals()"


class PrimeField:
    """The field F_p for a prime p < 2**31."""

    def __init__(self, p: int):
        if not (_is_prime(p) and p < 2**31):
            raise FieldError(f"{p} is not a prime below 2^31")
        self.p = p
        self.characteristic = p
        self.name = f"fp:{p}"
        self.zero = Fp(0, p)
        self.one = Fp(1, p)

    def __call__(self, x) -> Fp:
        if isinstance(x, Fp):
            if x.p != self.p:
                raise FieldError(f"mixing F_{self.p} and F_{x.p}")
            return x
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldError(f"{x} has no image in F_{self.p}")
            return Fp(x.numerator * pow(x.denominator, -1, self.p), self.p)
        return Fp(int(x), self.p)

    def literal(self, num: int, den: int = 1) -> Fp:
        if den % self.p == 0:
            raise FieldError(f"literal {num}/{den} has no image in F_{self.p}")
        return Fp(num * pow(den, -1, self.p), self.p)

    def elements(self):
        return [Fp(v, self.p) for v in range(self.p)]

    def is_finite(self) -> bool:
        return True

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


QQ = Rationals()


def field_from_name(name: str):
    """Parse ``q`` or ``fp:<prime>``."""
    name = name.strip().lower()
    if name in ("q", "qq", "rationals"):
        return QQ
    if name.startswith("fp:"):
        try:
            p = int(name[3:])
        except ValueError:
            raise FieldError(f"bad field name {name!r}") from None
        return PrimeField(p)
    raise FieldError(f"unknown field {name!r}; use 'q' or 'fp:<prime>'")


def scalar_str(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)


class ExactMatrix:
    """Dense row-major matrix over an exact field.  Treat as immutable."""

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field, rows: int, cols: int, entries: Sequence[Sequence] | None = None):
        self.field = field
        self.rows = rows
        self.cols = cols
        if entries is None:
            self.entries = [[field.zero] * cols for _ in range(rows)]
        else:
            if len(entries) != rows or any(len(r) != cols for r in entries):
                raise DimensionMismatch(f"entries do not form a {rows}x{cols} matrix")
            self.entries = [[field(x) for x in r] for r in entries]

    @classmethod
    def from_rows(cls, field, rows: Sequence[Sequence], cols: int | None = None):
        rows = list(rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(field, len(rows), cols, rows)

    @classmethod
    def from_columns(cls, field, columns: Sequence[Sequence], rows: int):
        columns = list(columns)
        ent = [[columns[j][i] for j in range(len(columns))] for i in range(rows)]
        return cls(field, rows, len(columns), ent)

    @classmethod
    def identity(cls, field, n: int):
        m = cls(field, n, n)
        for i in range(n):
            m.entries[i][i] = field.one
        return m

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    def __repr__(self):
        body = "; ".join(" ".join(scalar_str(x) for x in r) for r in self.entries)
        return f"ExactMatrix({self.rows}x{self.cols}: [{body}])"

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.cols, self.rows,
                           [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        zero = self.field.zero
        out = []
        ocols = other.cols
        oent = other.entries
        for r in self.entries:
            row = [zero] * ocols
            for k, a in enumerate(r):
                if not a:
                    continue
                brow = oent[k]
                for j in range(ocols):
                    b = brow[j]
                    if b:
                        row[j] = row[j] + a * b
            out.append(row)
        return ExactMatrix(self.field, self.rows, ocols, out)

    def apply(self, vec: Sequence) -> list:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.cols} columns")
        zero = self.field.zero
        out = []
        for r in self.entries:
            s = zero
            for a, b in zip(r, vec):
                if a and b:
                    s = s + a * b
            out.append(s)
        return out

    def is_zero(self) -> bool:
        return not any(x for r in self.entries for x in r)


def rref(m: ExactMatrix) -> tuple[int, list[int], ExactMatrix]:
    """Reduced row-echelon form: ``(rank, pivot columns, reduced matrix)``."""
    field = m.field
    a = [list(r) for r in m.entries]
    pivots: list[int] = []
    prow = 0
    for col in range(m.cols):
        if prow == m.rows:
            break
        sel = next((i for i in range(prow, m.rows) if a[i][col]), None)
        if sel is None:
            continue
        a[prow], a[sel] = a[sel], a[prow]
        inv = field.one / a[prow][col]
        piv = [x * inv if x else x for x in a[prow]]
        a[prow] = piv
        nz = [j for j in range(col, m.cols) if piv[j]]
        for i in range(m.rows):
            if i == prow:
                continue
            f = a[i][col]
            if not f:
                continue
            row = a[i]
            for j in nz:
                row[j] = row[j] - f * piv[j]
        pivots.append(col)
        prow += 1
    return len(pivots), pivots, ExactMatrix(field, m.rows, m.cols, a)


def rank(m: ExactMatrix) -> int:
    return rref(m)[0]


def solve(m: ExactMatrix, b: Sequence):
    """Return some x with ``m x = b`` (free variables set to 0), or None if inconsistent."""
    if len(b) != m.rows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {m.rows} rows")
    field = m.field
    aug = ExactMatrix(field, m.rows, m.cols + 1,
                      [list(r) + [field(bi)] for r, bi in zip(m.entries, b)])
    r, pivots, red = rref(aug)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [field.zero] * m.cols
    for i, c in enumerate(pivots):
        x[c] = red.entries[i][m.cols]
    return x


def kernel_basis(m: ExactMatrix) -> list[list]:
    """Basis of the right nullspace ``{x : m x = 0}``."""
    field = m.field
    r, pivots, red = rref(m)
    pivset = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = [field.zero] * m.cols
        v[free] = field.one
        for i, c in enumerate(pivots):
            v[c] = -red.entries[i][free]
        basis.append(v)
    return basis


def inverse(m: ExactMatrix):
    """Two-sided inverse of a square matrix, or None when singular."""
    if m.rows != m.cols:
        raise DimensionMismatch("inverse of a non-square matrix")
    n = m.rows
    field = m.field
    aug = ExactMatrix(field, n, 2 * n,
                      [list(r) + [field.one if i == j else field.zero for j in range(n)]
                       for i, r in enumerate(m.entries)])
    _, pivots, red = rref(aug)
    if pivots != list(range(n)):
        return None
    return ExactMatrix(field, n, n, [row[n:] for row in red.entries])


class Echelon:
    """Incremental row space.  Rows are sparse dicts ``{column: scalar}``.

    Used wherever a span is grown one vector at a time (subalgebra growth,
    quotient constructions); reduction is exact and canonical per pivot.
    """

    def __init__(self, field):
        self.field = field
        self.pivots: dict[int, dict] = {}

    def reduce(self, vec: dict) -> dict:
        v = {k: c for k, c in vec.items() if c}
        if not self.pivots:
            return v
        while True:
            hit = None
            for k in v:
                if k in self.pivots and (hit is None or k < hit):
                    hit = k
            if hit is None:
                return v
            f = v[hit]
            for k, c in self.pivots[hit].items():
                nv = v.get(k, self.field.zero) - f * c
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)

    def add(self, vec: dict) -> bool:
        """Insert a vector; True if it enlarged the span."""
        v = self.reduce(vec)
        if not v:
            return False
        p = min(v)
        inv = self.field.one / v[p]
        v = {k: c * inv for k, c in v.items()}
        # keep existing pivot rows free of the new pivot column
        for q, row in self.pivots.items():
            f = row.get(p)
            if f:
                for k, c in v.items():
                    nv = row.get(k, self.field.zero) - f * c
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        self.pivots[p] = v
        return True

    def __len__(self):
        return len(self.pivots)

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)


def vec_to_dense(v: dict, n: int, field) -> list:
    out = [field.zero] * n
    for k, c in v.items():
        out[k] = c
    return out


def dense_to_vec(v: Iterable) -> dict:
    return {i: c for i, c in enumerate(v) if c}
