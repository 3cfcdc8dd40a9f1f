"""
Combinatorial matrices deciding membership through rank tests.

Two routes lead to the same final system C·Y = e:

* closed form (``build_C``): the entries of C are written down directly as
  convolutions of signed binomials (tables T5, T6, T8);
* staged (``build_B_partA`` / ``build_B_partB_lower`` + ``reduce_stages``): the
  known blocks of the full system are built and the row operations
  "replace a row by the row just above it plus itself" are applied stage by stage.

Row bookkeeping for the B blocks uses integer heights instead of symbolic labels:

    diamond rows  ◆_j = A[-3/1]^{1min}[-3/2]^j       j = two_min-1 .. 1, top of part A only
    star rows     ★_r = A[-3/1]^r[-3/2]              height t = r + 1
    bottom row    A[-2/1] (case I) / A[-3/1] (case II)  height t = 0

Lower rows are ordered top to bottom by decreasing height. A row or column whose label
would need a negative exponent does not exist (truncation), so the topmost lower row has
height T = min(one_min, neg3_max).
"""

import dataclasses
import enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from contextlog import get_logger

from hkcalc.errors import ContractError
from hkcalc.field import FpMatrix, FpScalar, binom_mod_p, is_solvable, sign


class Subcase(enum.Enum):
    T5 = "T5"
    T6 = "T6"
    T8 = "T8"


class Case(enum.Enum):
    I = "I"  # noqa: E741
    II = "II"


@dataclasses.dataclass(frozen=True)
class EntryContext:
    one_min: int
    two_min: int
    neg2_max: int
    neg3_max: int
    p: int

    @classmethod
    def from_invariants(cls, invariants, p: int) -> "EntryContext":
        return cls(invariants.one_min, invariants.two_min, invariants.neg2_max, invariants.neg3_max, p)

    @property
    def k2(self) -> int:
        return self.neg3_max - self.two_min

    @property
    def k(self) -> int:
        return self.one_min - self.neg3_max

    @property
    def k_prime(self) -> int:
        return self.neg3_max - self.two_min

    @property
    def case(self) -> Case:
        return Case.I if self.neg2_max >= 1 else Case.II

    def check(self, subcase: Subcase):
        one, two, neg2, neg3 = self.one_min, self.two_min, self.neg2_max, self.neg3_max
        low, high = max(one, two), one + two - 1
        if subcase == Subcase.T5:
            ok = neg2 >= 1 and low <= neg3 < high
        elif subcase == Subcase.T8:
            ok = neg2 == 0 and low <= neg3 < high
        else:
            ok = neg2 >= 1 and two <= neg3 < one
        if not ok:
            raise ContractError("%r does not satisfy the preconditions of %s" % (self, subcase.value))

    def header(self, table: str) -> str:
        return "table=%s p=%d one_min=%d two_min=%d neg2=%d neg3=%d" % (
            table, self.p, self.one_min, self.two_min, self.neg2_max, self.neg3_max,
        )


# ===== entries
def alpha(i: int, ctx: EntryContext) -> FpScalar:
    return sign(ctx.two_min + 1) * binom_mod_p(ctx.two_min - 1, i, ctx.p) % ctx.p


def delta(l: int, ctx: EntryContext) -> FpScalar:  # noqa: E741
    return binom_mod_p(ctx.neg2_max + 1, l, ctx.p)


def _convolve(ctx: EntryContext, length: int, shift: int) -> FpScalar:
    # sum_{s=0..length} alpha_s * delta_{length + shift - s}
    if length < 0:
        return 0
    return sum(alpha(s, ctx) * delta(length + shift - s, ctx) for s in range(length + 1)) % ctx.p


def beta(j: int, ctx: EntryContext) -> FpScalar:
    return _convolve(ctx, j, 0)


def beta0(j: int, ctx: EntryContext) -> FpScalar:
    if j < 0:
        return 0
    return (alpha(j - 1, ctx) + alpha(j, ctx)) % ctx.p


def blacksquare(j: int, ctx: EntryContext) -> FpScalar:
    return _convolve(ctx, ctx.one_min - (ctx.k + 1) - j, 0)


def heart(i: int, r: int, ctx: EntryContext) -> FpScalar:
    return _convolve(ctx, ctx.one_min - (ctx.k + 1) - r, i)


# ===== closed form
@dataclasses.dataclass(frozen=True)
class SolvableSystem:
    C: FpMatrix
    e: Tuple[int, ...]
    table: str
    clamped: bool = False

    def dump(self, ctx: EntryContext) -> str:
        return self.C.dump(ctx.header(self.table))


def _unit_vector(rows: int) -> Tuple[int, ...]:
    return tuple(1 if row == rows - 1 else 0 for row in range(rows))


def build_C(ctx: EntryContext, subcase: Subcase) -> SolvableSystem:
    ctx.check(subcase)
    clamped = False
    if subcase == Subcase.T5:
        rows, cols = ctx.one_min - ctx.neg2_max, ctx.k2 + 1
        entries = [[beta(ctx.one_min - 1 - r - c, ctx) for c in range(cols)] for r in range(rows)]
    elif subcase == Subcase.T8:
        rows, cols = ctx.one_min, ctx.k2 + 1
        entries = [[beta0(ctx.one_min - 1 - r - c, ctx) for c in range(cols)] for r in range(rows)]
    else:
        entries, clamped = _table6(ctx)
        rows, cols = len(entries), ctx.k_prime + 1
    return SolvableSystem(FpMatrix.from_rows(ctx.p, entries, cols), _unit_vector(rows), subcase.value, clamped)


def _table6(ctx: EntryContext) -> Tuple[List[List[int]], bool]:
    # heart rows i = k..1 on top, then blacksquare rows whose diagonal runs into the bottom row
    k, cols = ctx.k, ctx.k_prime + 1
    rows = max(0, ctx.one_min - ctx.neg2_max)
    listed = k + max(0, ctx.one_min - ctx.neg2_max - k - 1) + 1
    clamped = listed != rows
    if clamped:
        get_logger(table="T6").warning(
            "row inventory of %d rows clamped to %d for one_min=%d neg2=%d neg3=%d",
            listed, rows, ctx.one_min, ctx.neg2_max, ctx.neg3_max,
        )
    entries = []
    for row in range(rows):
        if row < k:
            entries.append([heart(k - row, c, ctx) for c in range(cols)])
        else:
            entries.append([blacksquare(c + row - k, ctx) for c in range(cols)])
    return entries, clamped


def is_member_by_rank(system: SolvableSystem) -> bool:
    # the unit of e sits in the last row; with every row clamped away it has nowhere to go
    if system.C.rows == 0:
        return False
    return is_solvable(system.C, system.e)


# ===== staged route
@dataclasses.dataclass(frozen=True)
class _Layout:
    top: int                      # height T of the topmost lower row
    diamonds: Tuple[int, ...]     # j of diamond rows, top to bottom
    type_a: Tuple[int, ...]       # i of the A[-2/1]^i[-3/1]^{1min-i} columns, left to right
    partb_cols: Tuple[int, ...]   # c of the A[-3/2]^{2min}[-3/1]^c columns

    @property
    def heights(self) -> range:
        return range(self.top, -1, -1)


def _layout(ctx: EntryContext, case: Case) -> _Layout:
    if ctx.neg3_max < 1:
        raise ContractError("[3] must divide A, got neg3_max=%d" % ctx.neg3_max)
    if (case == Case.I) != (ctx.neg2_max >= 1):
        raise ContractError("case %s does not match neg2_max=%d" % (case.value, ctx.neg2_max))
    j_max = min(ctx.two_min - 1, ctx.neg3_max - ctx.one_min)
    low = max(0, ctx.one_min - ctx.neg3_max)
    high = min(ctx.neg2_max, ctx.one_min) if case == Case.I else 0
    return _Layout(
        top=min(ctx.one_min, ctx.neg3_max),
        diamonds=tuple(range(j_max, 0, -1)),
        type_a=tuple(range(high, low - 1, -1)),
        partb_cols=tuple(range(0, min(ctx.one_min - 1, ctx.neg3_max - ctx.two_min) + 1)),
    )


def _type_a_entry(ctx: EntryContext, height: int, i: int) -> int:
    return sign(ctx.one_min - height + 1) * binom_mod_p(ctx.one_min - height, i, ctx.p)


def build_B_partA(ctx: EntryContext, case: Case) -> FpMatrix:
    """
    Part A: signed binomial strings under the type A columns, antidiagonal ones for the
    diamond block. Case II comes out already transformed (the row A[-3/2] minus the
    bottom row), so its right-hand side has a single nonzero entry.
    """
    layout = _layout(ctx, case)
    width = len(layout.type_a) + len(layout.diamonds)
    rows = []
    for j in layout.diamonds:
        row = [0] * width
        row[len(layout.type_a) + j - 1] = 1
        rows.append(row)
    for height in layout.heights:
        row = [_type_a_entry(ctx, height, i) for i in layout.type_a] + [0] * len(layout.diamonds)
        rows.append(row)
    if case == Case.II:
        _transform_case_ii(rows, layout)
    return FpMatrix.from_rows(ctx.p, rows, width)


def _transform_case_ii(rows: List[List[int]], layout: _Layout):
    # raw system has 0 at (A[-3/2], A[-3/1]^{1min}) and e_A in its last two rows
    if layout.top < 1 or not layout.type_a:
        return
    star0, bottom = rows[-2], rows[-1]
    star0[0] = 0
    rows[-2] = [a - b for a, b in zip(star0, bottom)]


def build_B_partB_lower(ctx: EntryContext, case: Case) -> FpMatrix:
    """Below the double line: alpha strings starting one row lower per column, zero bottom row"""
    layout = _layout(ctx, case)
    rows = []
    for height in layout.heights:
        if height == 0:
            rows.append([0] * len(layout.partb_cols))
        else:
            rows.append([alpha(height - 1 - c, ctx) for c in layout.partb_cols])
    return FpMatrix.from_rows(ctx.p, rows, len(layout.partb_cols))


@dataclasses.dataclass(frozen=True)
class BBlocks:
    part_a: FpMatrix
    part_b_lower: FpMatrix
    diamond_rows: int


def build_B(ctx: EntryContext, case: Case) -> BBlocks:
    layout = _layout(ctx, case)
    return BBlocks(build_B_partA(ctx, case), build_B_partB_lower(ctx, case), len(layout.diamonds))


def stage_schedule(ctx: EntryContext, case: Case) -> List[int]:
    """
    Heights h of the stages: every lower row with height <= h is replaced by the row above
    plus itself. Case I runs neg2_max + 1 stages below ★_{1min-1}, ★_{1min-2}, ...; case II
    runs one. A stage below a truncated row acts below the topmost existing row, so a
    truncated block repeats its first stage until the descending thresholds come in range.
    """
    top = min(ctx.one_min, ctx.neg3_max)
    count = ctx.neg2_max + 1 if case == Case.I else 1
    return [min(ctx.one_min - stage, top - 1) for stage in range(1, count + 1)]


@dataclasses.dataclass(frozen=True)
class StagedBlocks:
    part_a: FpMatrix
    part_b_lower: FpMatrix
    diamond_rows: int
    ctx: EntryContext
    case: Case

    @property
    def identified_rows(self) -> int:
        if self.case == Case.I:
            return self.ctx.one_min - self.ctx.neg2_max
        return self.ctx.one_min

    def c_rows(self) -> FpMatrix:
        return self.part_b_lower.last_rows(self.identified_rows)

    def c_system(self, table: str = "C") -> SolvableSystem:
        rows = self.c_rows()
        return SolvableSystem(rows, _unit_vector(rows.rows), table)

    def lower_system(self) -> SolvableSystem:
        lower_a = self.part_a.last_rows(self.part_b_lower.rows).to_array()
        combined = np.hstack([lower_a, self.part_b_lower.to_array()])
        return SolvableSystem(
            FpMatrix.from_array(self.ctx.p, combined), _unit_vector(self.part_b_lower.rows), "B",
        )


def _apply_stages(lower: np.ndarray, schedule: Sequence[int], top: int, p: int) -> np.ndarray:
    lower = lower.copy()
    for threshold in schedule:
        if threshold < 0:
            continue
        first = top - threshold
        # right-hand side is evaluated before assignment: every row sees the previous stage
        lower[first:] = np.mod(lower[first:] + lower[first - 1:-1], p)
    return lower


def reduce_stages(
    blocks: BBlocks,
    ctx: EntryContext,
    case: Case,
    subcase: Optional[Subcase] = None,
) -> StagedBlocks:
    if subcase is not None:
        ctx.check(subcase)
    top = min(ctx.one_min, ctx.neg3_max)
    schedule = stage_schedule(ctx, case)
    _logger = get_logger(case=case.value)
    _logger.debug("stage thresholds %s for top height %d", schedule, top)

    part_a = blocks.part_a.to_array()
    upper_a, lower_a = part_a[:blocks.diamond_rows], part_a[blocks.diamond_rows:]
    lower_a = _apply_stages(lower_a, schedule, top, ctx.p)
    lower_b = _apply_stages(blocks.part_b_lower.to_array(), schedule, top, ctx.p)
    return StagedBlocks(
        part_a=FpMatrix.from_array(ctx.p, np.vstack([upper_a, lower_a]).reshape(part_a.shape)),
        part_b_lower=FpMatrix.from_array(ctx.p, lower_b.reshape(blocks.part_b_lower.shape)),
        diamond_rows=blocks.diamond_rows,
        ctx=ctx,
        case=case,
    )


def dump_table(table: str, matrix: FpMatrix, ctx: EntryContext) -> str:
    return matrix.dump(ctx.header(table))
