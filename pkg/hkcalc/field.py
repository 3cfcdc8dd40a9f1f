"""
Arithmetic over the prime field F_p and dense matrices with rank/solvability.

Storage is chosen by characteristic: for p = 2 every row is packed into uint64 words
(little-endian bit order, column c lives in word c // 64, bit c % 64) and row operations
are XORs; for p > 2 entries are kept one per byte (wider for large p).
"""

import math
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence

import numpy as np
import sympy
from contextlog import get_logger

from hkcalc.errors import ContractError, InputError


# an element of F_p is an int in [0, p-1]; the modulus travels alongside
FpScalar = int

WORD_BITS = 64

# int64 scratch allowed per elimination update step
UPDATE_CHUNK_BYTES = 8 << 20


@lru_cache(maxsize=64)
def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 2 or not sympy.isprime(p):
        raise InputError("p=%r is not a prime" % (p,))
    return p


def binom_mod_p(n: int, k: int, p: int) -> FpScalar:
    """C(n, k) mod p by Lucas' theorem: the product of digit-wise binomials in base p"""
    if k < 0 or n < 0 or k > n:
        return 0
    result = 1
    while k:
        n, n_digit = divmod(n, p)
        k, k_digit = divmod(k, p)
        if k_digit > n_digit:
            return 0
        result = result * math.comb(n_digit, k_digit) % p
    return result


def sign(power: int) -> int:
    return -1 if power % 2 else 1


def _storage_dtype(p: int):
    return np.uint8 if p < 256 else np.int64


def _pack_bits(dense: np.ndarray) -> np.ndarray:
    rows, cols = dense.shape
    words = -(-cols // WORD_BITS)
    if rows == 0 or words == 0:
        return np.zeros((rows, words), dtype=np.uint64)
    padded = np.zeros((rows, words * WORD_BITS), dtype=np.uint8)
    padded[:, :cols] = dense & 1
    return np.ascontiguousarray(np.packbits(padded, axis=-1, bitorder="little")).view(np.uint64)


def _unpack_bits(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    bits = np.unpackbits(np.ascontiguousarray(words).view(np.uint8), axis=-1, bitorder="little")
    return bits[:, :cols]


class FpMatrix:
    """Dense rows x cols matrix over F_p. Instances are treated as immutable."""

    __slots__ = ("p", "rows", "cols", "_data")

    def __init__(self, p: int, rows: int, cols: int, data: np.ndarray):
        self.p = p
        self.rows = rows
        self.cols = cols
        self._data = data

    # ----- constructors
    @classmethod
    def from_array(cls, p: int, array) -> "FpMatrix":
        dense = np.asarray(array)
        if dense.dtype.kind not in "iu" or (p >= 256 and dense.dtype != np.int64):
            dense = dense.astype(np.int64)
        if dense.ndim != 2:
            raise ContractError("expected a 2-d array, got shape %r" % (dense.shape,))
        rows, cols = dense.shape
        if p == 2:
            # two's complement keeps the parity in the lowest bit
            return cls(p, rows, cols, _pack_bits((dense & 1).astype(np.uint8)))
        return cls(p, rows, cols, np.mod(dense, p).astype(_storage_dtype(p)))

    @classmethod
    def from_rows(cls, p: int, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "FpMatrix":
        rows = [list(row) for row in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(row) != cols for row in rows):
            raise ContractError("ragged rows, expected %d columns" % cols)
        return cls.from_array(p, np.array(rows, dtype=np.int64).reshape(len(rows), cols))

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "FpMatrix":
        if p == 2:
            return cls(p, rows, cols, np.zeros((rows, -(-cols // WORD_BITS)), dtype=np.uint64))
        return cls(p, rows, cols, np.zeros((rows, cols), dtype=_storage_dtype(p)))

    @classmethod
    def from_entries(cls, p: int, rows: int, cols: int, row_idx, col_idx, values) -> "FpMatrix":
        """
        Writes (row, col, value) triples straight into the packed storage, without a dense
        intermediate. A position must not occur twice.
        """
        row_idx = np.asarray(row_idx, dtype=np.int64)
        col_idx = np.asarray(col_idx, dtype=np.int64)
        values = np.mod(np.asarray(values, dtype=np.int64), p)
        matrix = cls.zeros(p, rows, cols)
        if p == 2:
            odd = values == 1
            bits = np.left_shift(np.uint64(1), (col_idx[odd] % WORD_BITS).astype(np.uint64))
            np.bitwise_or.at(matrix._data, (row_idx[odd], col_idx[odd] // WORD_BITS), bits)
        else:
            matrix._data[row_idx, col_idx] = values
        return matrix

    @staticmethod
    def storage_bytes(p: int, rows: int, cols: int) -> int:
        if p == 2:
            return rows * -(-cols // WORD_BITS) * 8
        return rows * cols * np.dtype(_storage_dtype(p)).itemsize

    # ----- views
    def to_array(self) -> np.ndarray:
        if self.p == 2:
            return _unpack_bits(self._data, self.cols).astype(np.int64)
        return self._data.astype(np.int64)

    def tolist(self) -> List[List[int]]:
        return self.to_array().tolist()

    def __getitem__(self, pos) -> FpScalar:
        row, col = pos
        if self.p == 2:
            word, bit = divmod(col, WORD_BITS)
            return int((self._data[row, word] >> np.uint64(bit)) & np.uint64(1))
        return int(self._data[row, col])

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and np.array_equal(self.to_array(), other.to_array())

    def __repr__(self):
        return "FpMatrix(p=%d, %dx%d, %r)" % (self.p, self.rows, self.cols, self.tolist())

    def take_rows(self, indices: Iterable[int]) -> "FpMatrix":
        indices = list(indices)
        return FpMatrix.from_array(self.p, self.to_array()[indices].reshape(len(indices), self.cols))

    def last_rows(self, count: int) -> "FpMatrix":
        count = max(0, min(count, self.rows))
        return self.take_rows(range(self.rows - count, self.rows))

    def augment(self, column: Sequence[int]) -> "FpMatrix":
        column = np.asarray(list(column), dtype=np.int64).reshape(-1, 1)
        if column.shape[0] != self.rows:
            raise ContractError("vector of length %d does not fit %d rows" % (column.shape[0], self.rows))
        return FpMatrix.from_array(self.p, np.hstack([self.to_array(), column]))

    def first_cols(self, count: int) -> "FpMatrix":
        count = max(0, min(count, self.cols))
        if self.p == 2:
            data = self._data[:, :-(-count // WORD_BITS)].copy()
            if count % WORD_BITS and data.size:
                data[:, -1] &= np.uint64((1 << (count % WORD_BITS)) - 1)
        else:
            data = self._data[:, :count].copy()
        return FpMatrix(self.p, self.rows, count, data)

    def append_row(self, row: Sequence[int]) -> "FpMatrix":
        extra = FpMatrix.from_rows(self.p, [row], self.cols)
        return FpMatrix(self.p, self.rows + 1, self.cols, np.vstack([self._data, extra._data]))

    # ----- elimination
    def echelon_pivots(self) -> List[int]:
        """
        Column indices of the pivots of a row echelon form, scanning columns left to right
        and taking the first row with a nonzero entry as pivot. The pivot set is exactly the
        set of leading positions of nonzero vectors of the row space.
        """
        if self.rows == 0 or self.cols == 0:
            return []
        if self.p == 2:
            return _echelon_gf2(self._data, self.cols)
        return _echelon_fp(self._data, self.p)

    def dump(self, header: str) -> str:
        lines = [header]
        lines.extend(" ".join(str(value) for value in row) for row in self.tolist())
        return "\n".join(lines) + "\n"


def _row_chunks(rows: np.ndarray, row_bytes: int):
    step = max(1, UPDATE_CHUNK_BYTES // max(1, row_bytes))
    for start in range(0, rows.size, step):
        yield rows[start:start + step]


def _echelon_gf2(packed: np.ndarray, cols: int) -> List[int]:
    work = packed.copy()
    nrows = work.shape[0]
    pivots = []
    lead = 0
    one = np.uint64(1)
    for col in range(cols):
        if lead == nrows:
            break
        word, bit = divmod(col, WORD_BITS)
        hits = np.flatnonzero((work[lead:, word] >> np.uint64(bit)) & one)
        if not hits.size:
            continue
        pivot = lead + hits[0]
        if pivot != lead:
            work[[lead, pivot]] = work[[pivot, lead]]
        others = lead + hits[1:]
        for chunk in _row_chunks(others, (work.shape[1] - word) * 8):
            work[chunk, word:] ^= work[lead, word:]
        pivots.append(col)
        lead += 1
    return pivots


def _echelon_fp(dense: np.ndarray, p: int) -> List[int]:
    # fraction-free: row_i <- lead * row_i - a_i * pivot_row, no inverses needed
    work = dense.copy()
    nrows, cols = work.shape
    pivots = []
    lead = 0
    for col in range(cols):
        if lead == nrows:
            break
        hits = np.flatnonzero(work[lead:, col])
        if not hits.size:
            continue
        pivot = lead + hits[0]
        if pivot != lead:
            work[[lead, pivot]] = work[[pivot, lead]]
        others = lead + hits[1:]
        pivot_row = work[lead, col:].astype(np.int64)
        lead_value = int(work[lead, col])
        for chunk in _row_chunks(others, (cols - col) * 8):
            factors = work[chunk, col].astype(np.int64)[:, None]
            block = work[chunk, col:].astype(np.int64)
            work[chunk, col:] = np.mod(lead_value * block - factors * pivot_row, p).astype(work.dtype)
        pivots.append(col)
        lead += 1
    return pivots


def rank(matrix: FpMatrix) -> int:
    return len(matrix.echelon_pivots())


def is_solvable(matrix: FpMatrix, vector: Sequence[int]) -> bool:
    vector = list(vector)
    if len(vector) != matrix.rows:
        raise ContractError("right-hand side has %d entries for %d rows" % (len(vector), matrix.rows))
    if not any(value % matrix.p for value in vector):
        return True
    solvable = rank(matrix) == rank(matrix.augment(vector))
    get_logger().debug("solvability of %dx%d system over F_%d: %s", matrix.rows, matrix.cols, matrix.p, solvable)
    return solvable


def in_row_space(matrix: FpMatrix, vector: Sequence[int]) -> bool:
    """Is vector a combination of the rows, i.e. is the transposed system solvable"""
    vector = list(vector)
    if len(vector) != matrix.cols:
        raise ContractError("vector has %d entries for %d columns" % (len(vector), matrix.cols))
    if not any(value % matrix.p for value in vector):
        return True
    return rank(matrix) == rank(matrix.append_row(vector))
