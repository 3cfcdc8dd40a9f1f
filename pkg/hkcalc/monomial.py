"""
Monomials, the deglex order and disjoint-term trinomials.

Variables are x1..xm with x1 ⊴ x2 ⊴ ... ⊴ xm. deglex compares total degree first and
breaks ties lexicographically reading exponents from xm down to x1.
"""

import dataclasses
import enum
from typing import Iterator, List, Sequence, Tuple

from hkcalc.errors import (
    ConstantTermError,
    ContractError,
    InputError,
    NonCoprimeTermsError,
    PolynomialSyntaxError,
    TermCountError,
    ZeroCoefficientError,
)


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Monomial(tuple):
    """Exponent vector, position i holds the exponent of x_{i+1}"""

    def __new__(cls, exponents: Sequence[int] = ()):
        exponents = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exponents):
            raise ContractError("negative exponent in %r" % (exponents,))
        return super().__new__(cls, exponents)

    @classmethod
    def one(cls, m: int) -> "Monomial":
        return cls((0,) * m)

    @property
    def m(self) -> int:
        return len(self)

    @property
    def degree(self) -> int:
        return sum(self)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, e in enumerate(self) if e)

    def divides(self, other: "Monomial") -> bool:
        return divides(self, other)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return multiply(self, other)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return divide(self, other)

    def __repr__(self):
        return "Monomial(%s)" % format_monomial(self)

    def __str__(self):
        return format_monomial(self)


def _check_same_m(a: Sequence[int], b: Sequence[int]):
    if len(a) != len(b):
        raise ContractError("monomials over %d and %d variables" % (len(a), len(b)))


def deglex_key(a: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    return (sum(a), tuple(reversed(a)))


def deglex_cmp(a: Sequence[int], b: Sequence[int]) -> Ordering:
    _check_same_m(a, b)
    key_a, key_b = deglex_key(a), deglex_key(b)
    if key_a < key_b:
        return Ordering.LESS
    if key_a > key_b:
        return Ordering.GREATER
    return Ordering.EQUAL


def divides(d: Sequence[int], a: Sequence[int]) -> bool:
    _check_same_m(d, a)
    return all(x <= y for x, y in zip(d, a))


def multiply(a: Sequence[int], b: Sequence[int]) -> Monomial:
    _check_same_m(a, b)
    return Monomial(x + y for x, y in zip(a, b))


def divide(a: Sequence[int], d: Sequence[int]) -> Monomial:
    if not divides(d, a):
        raise ContractError("%s does not divide %s" % (format_monomial(d), format_monomial(a)))
    return Monomial(x - y for x, y in zip(a, d))


def format_monomial(a: Sequence[int]) -> str:
    factors = []
    for index, exp in enumerate(a, start=1):
        if exp == 1:
            factors.append("x%d" % index)
        elif exp > 1:
            factors.append("x%d^%d" % (index, exp))
    return "*".join(factors) or "1"


def iter_monomials_desc(m: int, q: int, degree: int = None) -> Iterator[Monomial]:
    """All monomials with every exponent < q in decreasing deglex; optionally one degree only"""
    top = m * (q - 1)
    degrees = range(top, -1, -1) if degree is None else [degree]
    for total in degrees:
        for reading in _compositions_desc(total, m, q - 1):
            yield Monomial(reversed(reading))


def _compositions_desc(total: int, slots: int, cap: int) -> Iterator[Tuple[int, ...]]:
    # exponents listed from the largest variable down, lexicographically decreasing
    if slots == 0:
        if total == 0:
            yield ()
        return
    high = min(cap, total)
    low = max(0, total - cap * (slots - 1))
    for exp in range(high, low - 1, -1):
        for rest in _compositions_desc(total - exp, slots - 1, cap):
            yield (exp,) + rest


# =====
@dataclasses.dataclass(frozen=True)
class Term:
    coefficient: int
    monomial: Monomial

    def __post_init__(self):
        if self.coefficient == 0:
            raise ContractError("zero coefficient")
        if self.monomial.degree < 1:
            raise ContractError("constant term")

    def serialize(self) -> str:
        body = format_monomial(self.monomial)
        if self.coefficient == 1:
            return body
        return "%d*%s" % (self.coefficient, body)


@dataclasses.dataclass(frozen=True)
class Trinomial:
    """f = [1] + [2] + [3] with pairwise coprime terms and [1] ⊴ [2] ⊴ [3]"""
    t1: Term
    t2: Term
    t3: Term
    p: int

    @property
    def terms(self) -> Tuple[Term, Term, Term]:
        return (self.t1, self.t2, self.t3)

    @property
    def m(self) -> int:
        return self.t1.monomial.m

    def with_coefficients(self, coefficients: Sequence[int]) -> "Trinomial":
        return build_trinomial(
            [(c, t.monomial) for c, t in zip(coefficients, self.terms)],
            self.p,
        )

    def serialize(self) -> str:
        return " + ".join(t.serialize() for t in self.terms)

    def __str__(self):
        return self.serialize()


def build_trinomial(terms: Sequence[Tuple[int, Sequence[int]]], p: int) -> Trinomial:
    """Validates raw (coefficient, exponents) pairs and labels them by deglex"""
    if len(terms) != 3:
        raise TermCountError("a trinomial needs exactly 3 terms, got %d" % len(terms))
    m = max(len(exps) for _, exps in terms)
    checked: List[Term] = []
    for coefficient, exps in terms:
        monomial = Monomial(tuple(exps) + (0,) * (m - len(exps)))
        if monomial.degree == 0:
            raise ConstantTermError("constant term %d is not allowed" % coefficient)
        if coefficient % p == 0:
            raise ZeroCoefficientError(
                "coefficient %d of %s vanishes mod %d" % (coefficient, format_monomial(monomial), p)
            )
        checked.append(Term(coefficient % p, monomial))
    for i in range(3):
        for j in range(i + 1, 3):
            shared = set(checked[i].monomial.support) & set(checked[j].monomial.support)
            if shared:
                raise NonCoprimeTermsError("terms %s and %s share %s: GCD is not 1" % (
                    format_monomial(checked[i].monomial),
                    format_monomial(checked[j].monomial),
                    ", ".join("x%d" % (v + 1) for v in sorted(shared)),
                ))
    checked.sort(key=lambda term: deglex_key(term.monomial))
    return Trinomial(checked[0], checked[1], checked[2], p)


# ===== parsing
class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos:self.pos + 1]

    def expect(self, char: str):
        if self.peek() != char:
            self.fail("expected %r" % char)
        self.pos += 1

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("expected an integer")
        return int(self.text[start:self.pos])

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def fail(self, reason: str):
        raise PolynomialSyntaxError(self.text, self.pos, reason)


def _parse_factors(scanner: _Scanner, exps: dict):
    while True:
        scanner.expect("x")
        if not scanner.peek().isdigit():
            scanner.fail("expected a variable index")
        index = scanner.integer()
        if index < 1:
            scanner.fail("variable indices start at 1")
        exp = 1
        if scanner.peek() == "^":
            scanner.pos += 1
            exp = scanner.integer()
        exps[index] = exps.get(index, 0) + exp
        if scanner.peek() != "*":
            return
        scanner.pos += 1


def _parse_term(scanner: _Scanner) -> Tuple[int, dict]:
    coefficient = 1
    exps: dict = {}
    if scanner.peek().isdigit():
        coefficient = scanner.integer()
        if scanner.peek() != "*":
            return coefficient, exps
        scanner.pos += 1
    _parse_factors(scanner, exps)
    return coefficient, exps


def _to_vector(exps: dict, m: int) -> Tuple[int, ...]:
    return tuple(exps.get(index, 0) for index in range(1, m + 1))


def parse_trinomial(text: str, p: int) -> Trinomial:
    scanner = _Scanner(text)
    raw = [_parse_term(scanner)]
    while not scanner.at_end():
        scanner.expect("+")
        raw.append(_parse_term(scanner))
    m = max((max(exps) for _, exps in raw if exps), default=0)
    return build_trinomial([(coefficient, _to_vector(exps, m)) for coefficient, exps in raw], p)


def parse_monomial(text: str, m: int) -> Monomial:
    scanner = _Scanner(text)
    if scanner.peek() == "1":
        scanner.integer()
        exps: dict = {}
    else:
        exps = {}
        _parse_factors(scanner, exps)
    if not scanner.at_end():
        scanner.fail("unexpected trailing input")
    if exps and max(exps) > m:
        raise InputError("x%d is not a variable of a ring with m=%d" % (max(exps), m))
    return Monomial(_to_vector(exps, m))
