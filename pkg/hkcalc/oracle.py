"""
Brute-force membership oracle over S/m^[q].

The relation matrix has one row per g in the quotient basis, holding g·f with every
monomial that has an exponent >= q deleted. Its columns are ordered by INCREASING deglex,
so the first nonzero entry of a row vector is its deglex-smallest monomial. Elimination
from the left then yields pivot columns that are exactly the leading monomials of the
row space, which are the monomials A with A ∈ A_c + (f) where A_c holds the monomials
above A and the Frobenius powers.
"""

import time
from typing import FrozenSet, Iterator, Optional, Sequence

import numpy as np
import psutil
from contextlog import get_logger

from hkcalc.errors import BudgetError, ContractError
from hkcalc.field import UPDATE_CHUNK_BYTES, FpMatrix, in_row_space
from hkcalc.monomial import Monomial, Trinomial


class QuotientBasis:
    """
    Monomials with all exponents < q, indexed 0..q^m-1 in DECREASING deglex.

    Exponent vectors are encoded as mixed-radix codes sum(e_i * q^i) for lookups.
    """

    def __init__(self, m: int, q: int):
        self.m = m
        self.q = q
        self.size = q ** m
        exps = np.indices((q,) * m).reshape(m, -1).T.astype(np.int64)
        self._radix = q ** np.arange(m, dtype=np.int64)
        degree = exps.sum(axis=1)
        # lexsort: the last key is primary; ascending by degree then x_m, x_{m-1}, ...
        order = np.lexsort(tuple(exps[:, i] for i in range(m)) + (degree,))[::-1]
        self.exponents = exps[order]
        self._position = np.empty(self.size, dtype=np.int64)
        self._position[self.exponents @ self._radix] = np.arange(self.size, dtype=np.int64)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Monomial]:
        for row in self.exponents:
            yield Monomial(row.tolist())

    def monomial(self, index: int) -> Monomial:
        return Monomial(self.exponents[index].tolist())

    def index(self, a: Sequence[int]) -> int:
        if len(a) != self.m or any(not 0 <= e < self.q for e in a):
            raise ContractError("%r is not in the quotient basis for m=%d q=%d" % (tuple(a), self.m, self.q))
        return int(self._position[int(np.dot(a, self._radix))])

    def indices(self, exps: np.ndarray) -> np.ndarray:
        return self._position[exps @ self._radix]

    def column(self, index: int) -> int:
        return self.size - 1 - index


def is_frobenius_trivial(f: Trinomial, q: int) -> bool:
    """Every term has an exponent >= q, so f already lies in m^[q]"""
    return all(any(e >= q for e in term.monomial) for term in f.terms)


# copies of the relation matrix alive at once: the matrix, a column restriction,
# the restriction with one appended row and the elimination work copy
MATRIX_COPIES = 4


def peak_memory(f: Trinomial, q: int) -> int:
    """Bytes the oracle may hold at its peak for q^m rows and columns"""
    size = q ** f.m
    return MATRIX_COPIES * FpMatrix.storage_bytes(f.p, size, size) + 4 * UPDATE_CHUNK_BYTES


def check_budget(f: Trinomial, q: int, budget: Optional[int], what: str = "oracle"):
    required = q ** f.m
    if budget is not None and required > budget:
        raise BudgetError(what, required, budget)
    needed = peak_memory(f, q)
    available = psutil.virtual_memory().available
    if needed > available:
        raise BudgetError("%s matrix memory" % what, needed, available, unit="bytes")


class MembershipOracle:
    def __init__(self, f: Trinomial, n: int, budget: Optional[int] = None):
        if n < 1:
            raise ContractError("n must be positive, got %d" % n)
        self.f = f
        self.p = f.p
        self.n = n
        self.q = f.p ** n
        check_budget(f, self.q, budget)
        self.basis = QuotientBasis(f.m, self.q)
        self.trivial = is_frobenius_trivial(f, self.q)
        self._matrix: Optional[FpMatrix] = None
        self._members: Optional[FrozenSet[int]] = None
        self._logger = get_logger(p=self.p, n=n, poly=f.serialize())

    @property
    def matrix(self) -> FpMatrix:
        if self._matrix is None:
            self._matrix = self._build_matrix()
        return self._matrix

    def _build_matrix(self) -> FpMatrix:
        size = self.basis.size
        rows = np.arange(size)
        row_idx, col_idx, values = [], [], []
        for term in self.f.terms:
            shifted = self.basis.exponents + np.asarray(term.monomial, dtype=np.int64)
            alive = (shifted < self.q).all(axis=1)
            row_idx.append(rows[alive])
            col_idx.append(size - 1 - self.basis.indices(shifted[alive]))
            values.append(np.full(int(alive.sum()), term.coefficient, dtype=np.int64))
        # g·[1], g·[2], g·[3] are distinct monomials, no entry is written twice
        matrix = FpMatrix.from_entries(
            self.p, size, size, np.concatenate(row_idx), np.concatenate(col_idx), np.concatenate(values),
        )
        self._logger.debug("relation matrix %dx%d built", size, size)
        return matrix

    def members(self) -> FrozenSet[int]:
        """Basis indices of all members, from a single elimination pass"""
        if self._members is None:
            if self.trivial:
                self._members = frozenset()
            else:
                started = time.monotonic()
                pivots = self.matrix.echelon_pivots()
                self._members = frozenset(self.basis.size - 1 - col for col in pivots)
                self._logger.info(
                    "eliminated %d rows, rank %d in %.2fs",
                    self.basis.size, len(pivots), time.monotonic() - started,
                )
        return self._members

    def global_dimension(self) -> int:
        if self.trivial:
            self._logger.info("f lies in the Frobenius power, length is q^m=%d", self.basis.size)
            return self.basis.size
        return self.basis.size - len(self.members())

    def member(self, a: Sequence[int]) -> bool:
        return self.basis.index(a) in self.members()

    def member_direct(self, a: Sequence[int]) -> bool:
        """From scratch: is e_A in the span of the rows restricted to monomials ⊴ A"""
        column = self.basis.column(self.basis.index(a))
        if self.trivial:
            return False
        restricted = self.matrix.first_cols(column + 1)
        return in_row_space(restricted, [0] * column + [1])


def global_dimension(f: Trinomial, p: int, n: int, budget: Optional[int] = None) -> int:
    if p != f.p:
        raise ContractError("trinomial was parsed over F_%d, not F_%d" % (f.p, p))
    return MembershipOracle(f, n, budget).global_dimension()


def member(a: Monomial, f: Trinomial, p: int, n: int, budget: Optional[int] = None) -> bool:
    if p != f.p:
        raise ContractError("trinomial was parsed over F_%d, not F_%d" % (f.p, p))
    return MembershipOracle(f, n, budget).member_direct(a)
