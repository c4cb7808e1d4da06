"""Free-algebra elements, deglex order, reduction systems and the diamond lemma.

Words are tuples of letter indices into an :class:`Alphabet`.  Letter order is
the alphabet order; monomials compare by weighted degree first and then
left-to-right by letter.  Equal-weight words are never proper prefixes of
each other (all letter degrees are positive), so plain tuple comparison
finishes the job.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .exactla import scalar_str
from .report import FAIL, PASS, CertReport

Word = tuple


class AlphabetMismatch(ValueError):
    pass


class RuleError(ValueError):
    pass


class Alphabet:
    """Ordered generator names with positive integer degrees."""

    def __init__(self, names: Sequence[str], degrees: Sequence[int] | None = None):
        names = list(names)
        if degrees is None:
            degrees = [1] * len(names)
        degrees = list(degrees)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        if len(degrees) != len(names):
            raise ValueError("one degree per generator required")
        if any(d < 1 for d in degrees):
            raise ValueError("generator degrees must be >= 1")
        self.names = names
        self.degrees = degrees
        self.index = {n: i for i, n in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.names == other.names and self.degrees == other.degrees

    def __hash__(self):
        return hash((tuple(self.names), tuple(self.degrees)))

    def __repr__(self):
        return f"Alphabet({self.names}, {self.degrees})"

    def extend(self, names: Sequence[str], degrees: Sequence[int]) -> "Alphabet":
        return Alphabet(self.names + list(names), self.degrees + list(degrees))

    def weight(self, word: Word) -> int:
        degs = self.degrees
        return sum(degs[i] for i in word)

    def key(self, word: Word):
        return (self.weight(word), word)

    def check(self, word: Word):
        n = len(self.names)
        for i in word:
            if not (0 <= i < n):
                raise AlphabetMismatch(f"letter index {i} outside alphabet {self.names}")

    def word(self, *names: str) -> Word:
        try:
            return tuple(self.index[n] for n in names)
        except KeyError as e:
            raise AlphabetMismatch(f"unknown generator {e.args[0]!r}") from None

    def word_str(self, word: Word) -> str:
        if not word:
            return "1"
        return "*".join(self.names[i] for i in word)

    def words(self, degree: int) -> Iterator[Word]:
        """All words of the given weighted degree, ascending."""
        if degree == 0:
            yield ()
            return
        for i, d in enumerate(self.degrees):
            if d <= degree:
                for rest in self.words(degree - d):
                    yield (i,) + rest


def compare(a: Word, b: Word, alphabet: Alphabet) -> int:
    """-1, 0, 1 as ``a`` is less than, equal to or greater than ``b``."""
    alphabet.check(a)
    alphabet.check(b)
    ka, kb = alphabet.key(a), alphabet.key(b)
    return (ka > kb) - (ka < kb)


class NcPoly:
    """Finite linear combination of words.  Zero coefficients are never stored.

    Instances are treated as immutable values; arithmetic returns new objects.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    @classmethod
    def monomial(cls, word: Word, coeff) -> "NcPoly":
        return cls({tuple(word): coeff})

    @classmethod
    def scalar(cls, c) -> "NcPoly":
        return cls({(): c})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, NcPoly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "NcPoly") -> "NcPoly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w)
            v = c if v is None else v + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        r = NcPoly.__new__(NcPoly)
        r.terms = out
        return r

    def __neg__(self) -> "NcPoly":
        r = NcPoly.__new__(NcPoly)
        r.terms = {w: -c for w, c in self.terms.items()}
        return r

    def __sub__(self, other: "NcPoly") -> "NcPoly":
        return self + (-other)

    def scale(self, c) -> "NcPoly":
        if not c:
            return NcPoly()
        r = NcPoly.__new__(NcPoly)
        r.terms = {w: c * v for w, v in self.terms.items()}
        return r

    def __mul__(self, other):
        if isinstance(other, NcPoly):
            out: dict = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    v = out.get(w)
                    v = c1 * c2 if v is None else v + c1 * c2
                    if v:
                        out[w] = v
                    else:
                        out.pop(w, None)
            r = NcPoly.__new__(NcPoly)
            r.terms = out
            return r
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def coeff(self, word: Word, zero=0):
        return self.terms.get(tuple(word), zero)

    def words(self):
        return self.terms.keys()

    def degrees(self, alphabet: Alphabet) -> set:
        return {alphabet.weight(w) for w in self.terms}

    def homogeneous_degree(self, alphabet: Alphabet) -> int | None:
        """The common degree of all terms, or None (zero or mixed degrees)."""
        ds = self.degrees(alphabet)
        return ds.pop() if len(ds) == 1 else None

    def is_homogeneous(self, alphabet: Alphabet, degree: int | None = None) -> bool:
        ds = self.degrees(alphabet)
        if not ds:
            return True
        return len(ds) == 1 and (degree is None or degree in ds)

    def sorted_terms(self, alphabet: Alphabet):
        return sorted(self.terms.items(), key=lambda t: alphabet.key(t[0]), reverse=True)

    def leading(self, alphabet: Alphabet):
        w = max(self.terms, key=alphabet.key)
        return w, self.terms[w]

    def render(self, alphabet: Alphabet) -> str:
        """Canonical text: descending monomial order, letters joined by '*'."""
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms(alphabet):
            s = scalar_str(c)
            neg = s.startswith("-")
            if neg:
                s = s[1:]
            if w:
                body = alphabet.word_str(w) if s == "1" else f"{s}*{alphabet.word_str(w)}"
            else:
                body = s
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        items = ", ".join(f"{w}: {scalar_str(c)}" for w, c in self.terms.items())
        return f"NcPoly({{{items}}})"


def multiply(p: NcPoly, q: NcPoly, alphabet: Alphabet | None = None) -> NcPoly:
    """Concatenation product, optionally checking letters against an alphabet."""
    if alphabet is not None:
        for w in list(p.terms) + list(q.terms):
            alphabet.check(w)
    return p * q


@dataclass(frozen=True)
class Rule:
    lead: Word
    rhs: NcPoly
    tag: str = ""


class ReductionSystem:
    """Generators plus oriented rewrite rules ``lead -> rhs``.

    Rules must be inter-reduced (no lead is a subword of another) and every
    rhs monomial must be smaller than its lead.  With ``graded=True`` rules
    must also be homogeneous.  Normal forms are memoized per word.
    """

    def __init__(self, alphabet: Alphabet, rules: Iterable[Rule] = (), field=None,
                 graded: bool = True):
        self.alphabet = alphabet
        self.rules = list(rules)
        self.field = field
        self.graded = graded
        self._by_lead: dict[Word, Rule] = {}
        for r in self.rules:
            alphabet.check(r.lead)
            if not r.lead:
                raise RuleError("a rule cannot rewrite the empty word")
            if r.lead in self._by_lead:
                raise RuleError(f"two rules share the lead {alphabet.word_str(r.lead)}")
            lk = alphabet.key(r.lead)
            for w in r.rhs.terms:
                alphabet.check(w)
                if alphabet.key(w) >= lk:
                    raise RuleError(f"rule for {alphabet.word_str(r.lead)}: rhs term "
                                    f"{alphabet.word_str(w)} is not smaller than the lead")
            if graded and r.rhs and not r.rhs.is_homogeneous(alphabet, alphabet.weight(r.lead)):
                raise RuleError(f"rule for {alphabet.word_str(r.lead)} is not homogeneous")
            self._by_lead[r.lead] = r
        for a in self.rules:
            for b in self.rules:
                if a is not b and _contains(a.lead, b.lead):
                    raise RuleError(f"rules are not inter-reduced: {alphabet.word_str(b.lead)} "
                                    f"occurs in {alphabet.word_str(a.lead)}")
        self._lead_lengths = sorted({len(r.lead) for r in self.rules})
        self._nf: dict[Word, NcPoly] = {}

    @classmethod
    def from_relations(cls, alphabet: Alphabet, relations: Iterable[NcPoly], field=None,
                       graded: bool = True, tag: str = "") -> "ReductionSystem":
        """Orient each relation ``f = 0`` with its largest monomial as lead."""
        rules = []
        for f in relations:
            if not f:
                continue
            rules.append(orient(f, alphabet, tag))
        return cls(alphabet, rules, field=field, graded=graded)

    def __repr__(self):
        return f"ReductionSystem({len(self.rules)} rules over {self.alphabet.names})"

    def rule_str(self, r: Rule) -> str:
        return f"{self.alphabet.word_str(r.lead)} -> {r.rhs.render(self.alphabet)}"

    # -- reduction -----------------------------------------------------------

    def find_lead(self, word: Word):
        """Leftmost occurrence ``(position, rule)`` of a rule lead in ``word``."""
        n = len(word)
        by_lead = self._by_lead
        for i in range(n):
            for L in self._lead_lengths:
                if i + L > n:
                    break
                r = by_lead.get(word[i:i + L])
                if r is not None:
                    return i, r
        return None

    def is_irreducible(self, word: Word) -> bool:
        return self.find_lead(word) is None

    def _nf_word(self, word: Word) -> NcPoly:
        hit = self._nf.get(word)
        if hit is not None:
            return hit
        found = self.find_lead(word)
        if found is None:
            res = NcPoly.monomial(word, self.field.one if self.field else 1)
        else:
            i, r = found
            pre, post = word[:i], word[i + len(r.lead):]
            acc: dict = {}
            for w, c in r.rhs.terms.items():
                for w2, c2 in self._nf_word(pre + w + post).terms.items():
                    v = acc.get(w2)
                    v = c * c2 if v is None else v + c * c2
                    if v:
                        acc[w2] = v
                    else:
                        acc.pop(w2)
            res = NcPoly.__new__(NcPoly)
            res.terms = acc
        self._nf[word] = res
        return res

    def normal_form(self, p: NcPoly) -> NcPoly:
        acc: dict = {}
        for w, c in p.terms.items():
            for w2, c2 in self._nf_word(w).terms.items():
                v = acc.get(w2)
                v = c * c2 if v is None else v + c * c2
                if v:
                    acc[w2] = v
                else:
                    acc.pop(w2)
        res = NcPoly.__new__(NcPoly)
        res.terms = acc
        return res

    nf = normal_form

    def mul(self, *ps: NcPoly) -> NcPoly:
        """Normal form of a product, reducing after each factor."""
        out = self.normal_form(ps[0])
        for q in ps[1:]:
            out = self.normal_form(out * q)
        return out

    def word_poly(self, *names: str) -> NcPoly:
        return NcPoly.monomial(self.alphabet.word(*names), self.field.one)

    def gen(self, name: str) -> NcPoly:
        return self.word_poly(name)

    def one(self) -> NcPoly:
        return NcPoly.scalar(self.field.one)

    # -- diamond lemma -------------------------------------------------------

    def overlaps(self) -> list[tuple[Rule, Rule, Word, int]]:
        """All overlap and inclusion ambiguities ``(ruleA, ruleB, word, offset)``.

        For an overlap, ``word = leadA + leadB[k:]`` and ruleB's lead starts at
        ``offset = len(leadA) - k``.  For an inclusion, leadB sits inside leadA
        at ``offset``.
        """
        out = []
        for a in self.rules:
            la = a.lead
            for b in self.rules:
                lb = b.lead
                for k in range(1, min(len(la), len(lb))):
                    if la[-k:] == lb[:k]:
                        out.append((a, b, la + lb[k:], len(la) - k))
                if a is not b and len(lb) < len(la):
                    for off in range(len(la) - len(lb) + 1):
                        if la[off:off + len(lb)] == lb:
                            out.append((a, b, la, off))
        out.sort(key=lambda t: (self.alphabet.key(t[2]), t[3]))
        return out

    def resolve(self, a: Rule, b: Rule, word: Word, offset: int) -> tuple[NcPoly, NcPoly]:
        """Reduce an ambiguity both ways: rule a at 0 vs rule b at offset."""
        one = self.field.one if self.field else 1
        left = a.rhs * NcPoly.monomial(word[len(a.lead):], one)
        right = (NcPoly.monomial(word[:offset], one) * b.rhs
                 * NcPoly.monomial(word[offset + len(b.lead):], one))
        return self.normal_form(left), self.normal_form(right)

    def check_confluence(self, max_degree: int, check: str = "confluence") -> CertReport:
        amb = self.overlaps()
        witnesses = []
        checked = skipped = 0
        for a, b, word, off in amb:
            if self.alphabet.weight(word) > max_degree:
                skipped += 1
                continue
            checked += 1
            left, right = self.resolve(a, b, word, off)
            if left != right:
                witnesses.append({
                    "overlap": self.alphabet.word_str(word),
                    "degree": self.alphabet.weight(word),
                    "rules": [self.rule_str(a), self.rule_str(b)],
                    "nf_left": left.render(self.alphabet),
                    "nf_right": right.render(self.alphabet),
                    "residual": (left - right).render(self.alphabet),
                })
        notes = []
        if skipped:
            notes.append(f"{skipped} ambiguities above degree {max_degree} not checked")
        return CertReport(check, FAIL if witnesses else PASS, bound=max_degree,
                          witnesses=witnesses,
                          details={"ambiguities_checked": checked,
                                   "ambiguities_skipped": skipped},
                          notes=notes)

    # -- bases and Hilbert functions ----------------------------------------

    def irreducible_monomials(self, degree: int) -> list[Word]:
        """Degree-d words avoiding every lead, in descending order."""
        degs = self.alphabet.degrees
        leads = self._by_lead
        lengths = self._lead_lengths
        out: list[Word] = []

        def grow(prefix: Word, remaining: int):
            if remaining == 0:
                out.append(prefix)
                return
            for i, d in enumerate(degs):
                if d > remaining:
                    continue
                w = prefix + (i,)
                n = len(w)
                if any(L <= n and w[n - L:] in leads for L in lengths):
                    continue
                grow(w, remaining - d)

        grow((), degree)
        out.sort(reverse=True)
        return out

    def hilbert_function(self, max_degree: int) -> list[int]:
        return [len(self.irreducible_monomials(d)) for d in range(max_degree + 1)]

    def coordinates(self, p: NcPoly, basis_index: dict[Word, int], n: int) -> list:
        """Dense coordinate vector of NF(p) in a basis given by a word index."""
        zero = self.field.zero
        v = [zero] * n
        for w, c in self.normal_form(p).terms.items():
            v[basis_index[w]] = c
        return v


def _contains(big: Word, small: Word) -> bool:
    L = len(small)
    return any(big[i:i + L] == small for i in range(len(big) - L + 1))


def orient(f: NcPoly, alphabet: Alphabet, tag: str = "") -> Rule:
    """Turn the relation ``f = 0`` into a monic rule on its largest monomial."""
    lead, c = f.leading(alphabet)
    inv = 1 / c
    rhs = NcPoly({w: -(v * inv) for w, v in f.terms.items() if w != lead})
    return Rule(lead, rhs, tag)


def series_quotient_check(hA: Sequence[int], dy1: int, dy2: int, hB: Sequence[int],
                          check: str = "series_quotient") -> CertReport:
    """Compare hB with hA / ((1 - t^dy1)(1 - t^dy2)) coefficient-wise."""
    if len(hA) != len(hB):
        raise ValueError("Hilbert coefficient lists must have equal length")
    n = len(hA)
    expected = list(hA)
    for dy in (dy1, dy2):
        # multiply by 1/(1 - t^dy)
        for i in range(dy, n):
            expected[i] += expected[i - dy]
    witnesses = []
    for d, (e, got) in enumerate(zip(expected, hB)):
        if e != got:
            witnesses.append({"degree": d, "expected": e, "found": got})
            break
    return CertReport(check, FAIL if witnesses else PASS, bound=n - 1, witnesses=witnesses,
                      details={"expected": expected, "found": list(hB)})


def substitute(p: NcPoly, images: dict[int, NcPoly], target: ReductionSystem,
               reverse: bool = False) -> NcPoly:
    """Apply the algebra map letter -> image (anti-map when ``reverse``) and reduce."""
    out = NcPoly()
    one = NcPoly.scalar(target.field.one)
    for w, c in p.terms.items():
        acc = one
        letters = reversed(w) if reverse else w
        for i in letters:
            acc = target.normal_form(acc * images[i])
        out = out + acc.scale(c)
    return target.normal_form(out)
