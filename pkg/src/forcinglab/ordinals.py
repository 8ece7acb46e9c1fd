"""Two-tier ordinal notations ``k*a + b`` with ``a`` and ``b`` in Cantor normal form.

``k`` stands for an uncountable regular cardinal that is never enumerated.

>>> Ordinal.parse("k*w^2*3+k*5+w*2+7")
Ordinal('k*w^2*3+k*5+w*2+7')
>>> Ordinal.parse("w*2").fundamental(5)
Ordinal('w+5')
"""
from __future__ import annotations

import enum
import itertools
import re
from functools import total_ordering
from typing import Iterator

# A countable notation: tuple of (exponent, coefficient), exponents strictly descending.
CNF = tuple[tuple[int, int], ...]


class NotationError(ValueError):
    pass


class Cof(enum.Enum):
    ZERO = "Zero"
    SUCCESSOR = "Successor"
    SMALL_LIMIT = "SmallLimit"
    LARGE_LIMIT = "LargeLimit"


def check_cnf(terms: CNF) -> CNF:
    terms = tuple((int(e), int(c)) for e, c in terms)
    for i, (e, c) in enumerate(terms):
        if e < 0 or c < 1:
            raise NotationError(f"term w^{e}*{c}: exponent must be >= 0 and coefficient >= 1")
        if i and terms[i - 1][0] <= e:
            raise NotationError(
                f"exponents not strictly descending ({terms[i - 1][0]} then {e}); "
                f"normal form would be {format_cnf(normalize_cnf(terms))}"
            )
    return terms


def normalize_cnf(terms) -> CNF:
    """Collapse an arbitrary sum of ``w^e*c`` terms into normal form."""
    out: list[list[int]] = []
    for e, c in terms:
        if c == 0:
            continue
        while out and out[-1][0] < e:
            out.pop()
        if out and out[-1][0] == e:
            out[-1][1] += c
        else:
            out.append([e, c])
    return tuple((e, c) for e, c in out)


def _format_term(e: int, c: int) -> str:
    if e == 0:
        return str(c)
    base = "w" if e == 1 else f"w^{e}"
    return base if c == 1 else f"{base}*{c}"


def _format_kappa_term(e: int, c: int) -> str:
    if e == 0:
        return "k" if c == 1 else f"k*{c}"
    return "k*" + _format_term(e, c)


def format_cnf(terms: CNF, prefix: str = "") -> str:
    return "+".join(prefix + _format_term(e, c) for e, c in terms)


def cnf_is_limit(terms: CNF) -> bool:
    return bool(terms) and terms[-1][0] > 0


def cnf_add_nat(terms: CNF, n: int) -> CNF:
    if n == 0:
        return terms
    if terms and terms[-1][0] == 0:
        return terms[:-1] + ((0, terms[-1][1] + n),)
    return terms + ((0, n),)


def cnf_fundamental(terms: CNF, i: int) -> CNF:
    if not cnf_is_limit(terms):
        raise NotationError(f"{format_cnf(terms) or '0'} is not a limit")
    e, c = terms[-1]
    head = terms[:-1] + (((e, c - 1),) if c > 1 else ())
    return head + (((e - 1, i),) if i > 0 else ())


@total_ordering
class Ordinal:
    """The ordinal ``k*a + b``; ``a`` is ``kappa_part`` and ``b`` is ``tail_part``."""

    __slots__ = ("kappa_part", "tail_part")

    def __init__(self, kappa_part: CNF = (), tail_part: CNF = ()):
        self.kappa_part = check_cnf(kappa_part)
        self.tail_part = check_cnf(tail_part)

    @classmethod
    def nat(cls, n: int) -> "Ordinal":
        if n < 0:
            raise NotationError("negative natural")
        return cls((), ((0, n),) if n else ())

    @classmethod
    def omega(cls, e: int = 1, c: int = 1) -> "Ordinal":
        return cls((), ((e, c),))

    @classmethod
    def kappa(cls, a: "Ordinal | int" = 1, b: "Ordinal | int" = 0) -> "Ordinal":
        a = cls.nat(a) if isinstance(a, int) else a
        b = cls.nat(b) if isinstance(b, int) else b
        if a.kappa_part or b.kappa_part:
            raise NotationError("coefficients of k must be countable")
        return cls(a.tail_part, b.tail_part)

    _TERM = re.compile(r"^(k\*?)?(?:(w)(?:\^(\d+))?(?:\*(\d+))?|(\d+))$")

    @classmethod
    def parse(cls, text: str) -> "Ordinal":
        src = re.sub(r"\s+", "", text)
        if src == "0":
            return cls()
        if not src:
            raise NotationError("empty ordinal")
        kappa: list[tuple[int, int]] = []
        tail: list[tuple[int, int]] = []
        for raw in src.split("+"):
            if raw == "k":
                kappa.append((0, 1))
                continue
            m = cls._TERM.match(raw)
            if not m:
                raise NotationError(f"cannot parse term {raw!r}")
            has_k, w, exp, coeff, num = m.groups()
            if w:
                term = (int(exp) if exp is not None else 1, int(coeff) if coeff is not None else 1)
            else:
                term = (0, int(num))
            if has_k:
                if tail:
                    raise NotationError(f"k-term {raw!r} after a countable term; write k-terms first")
                kappa.append(term)
            else:
                tail.append(term)
        return cls(tuple(kappa), tuple(tail))

    def __str__(self) -> str:
        parts = []
        if self.kappa_part:
            parts.append("+".join(_format_kappa_term(e, c) for e, c in self.kappa_part))
        if self.tail_part:
            parts.append(format_cnf(self.tail_part))
        return "+".join(parts) or "0"

    def __repr__(self) -> str:
        return f"Ordinal({str(self)!r})"

    def _key(self):
        return (self.kappa_part, self.tail_part)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Ordinal.nat(other)
        return isinstance(other, Ordinal) and self._key() == other._key()

    def __lt__(self, other) -> bool:
        if isinstance(other, int):
            other = Ordinal.nat(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def compare(self, other: "Ordinal") -> int:
        return (self > other) - (self < other)

    def __add__(self, n: int) -> "Ordinal":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        return Ordinal(self.kappa_part, cnf_add_nat(self.tail_part, n))

    def is_zero(self) -> bool:
        return not self.kappa_part and not self.tail_part

    @property
    def is_finite(self) -> bool:
        return not self.kappa_part and (not self.tail_part or self.tail_part[0][0] == 0)

    def as_int(self) -> int:
        if not self.is_finite:
            raise NotationError(f"{self} is not finite")
        return self.tail_part[0][1] if self.tail_part else 0

    def cof(self) -> Cof:
        if self.is_zero():
            return Cof.ZERO
        if self.tail_part:
            return Cof.SUCCESSOR if self.tail_part[-1][0] == 0 else Cof.SMALL_LIMIT
        return Cof.SMALL_LIMIT if cnf_is_limit(self.kappa_part) else Cof.LARGE_LIMIT

    def is_successor(self) -> bool:
        return self.cof() is Cof.SUCCESSOR

    def is_limit(self) -> bool:
        return self.cof() in (Cof.SMALL_LIMIT, Cof.LARGE_LIMIT)

    def predecessor(self) -> "Ordinal":
        if not self.is_successor():
            raise NotationError(f"{self} is not a successor")
        *head, (_, c) = self.tail_part
        return Ordinal(self.kappa_part, tuple(head) + (((0, c - 1),) if c > 1 else ()))

    def fundamental(self, i: int) -> "Ordinal":
        """The ``i``-th entry of the fixed cofinal sequence of a limit."""
        if i < 0:
            raise NotationError("negative index")
        kind = self.cof()
        if kind is Cof.SMALL_LIMIT:
            if self.tail_part:
                return Ordinal(self.kappa_part, cnf_fundamental(self.tail_part, i))
            return Ordinal(cnf_fundamental(self.kappa_part, i), ())
        if kind is Cof.LARGE_LIMIT:
            return Ordinal(self.kappa_part[:-1] + _decrement_last(self.kappa_part), ((0, i),) if i else ())
        raise NotationError(f"{self} is not a limit ({kind.value})")


def _decrement_last(terms: CNF) -> CNF:
    e, c = terms[-1]
    return ((e, c - 1),) if c > 1 else ()


def ord_compare(a: Ordinal, b: Ordinal) -> int:
    return a.compare(b)


def ord_add_natural(a: Ordinal, n: int) -> Ordinal:
    return a + n


def cof_class(a: Ordinal) -> Cof:
    return a.cof()


def fundamental_sequence(delta: Ordinal, i: int) -> Ordinal:
    return delta.fundamental(i)


def as_ordinal(value) -> Ordinal:
    if isinstance(value, Ordinal):
        return value
    if isinstance(value, int):
        return Ordinal.nat(value)
    if isinstance(value, str):
        return Ordinal.parse(value)
    raise TypeError(f"cannot read {value!r} as an ordinal")


def bounded_cnfs(max_exp: int = 3, max_coeff: int = 3) -> Iterator[CNF]:
    """All normal forms with exponents <= max_exp and coefficients <= max_coeff."""
    choices = [range(max_coeff + 1)] * (max_exp + 1)
    for coeffs in itertools.product(*choices):
        yield tuple((e, coeffs[e]) for e in range(max_exp, -1, -1) if coeffs[e])


def bounded_universe(max_exp: int = 3, max_coeff: int = 3, kappa_coeff: int = 2) -> list[Ordinal]:
    tails = list(bounded_cnfs(max_exp, max_coeff))
    heads = list(bounded_cnfs(max_exp, kappa_coeff))
    return sorted(Ordinal(a, b) for a in heads for b in tails)
