import dataclasses
import json
import os
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence

import pygments
import pygments.formatters
import pygments.lexers.data
from adaptix import Retort, name_mapping
from contextlog import get_logger
from tabulate import tabulate

from hkcalc.engine import Explanation, HKSeries, VerifyReport, VerifyRow


# ===== documents
@dataclasses.dataclass
class PointDocument:
    n: int
    q: int
    hk: int
    multiplicity_numerator: int
    multiplicity_denominator: int


@dataclasses.dataclass
class SeriesDocument:
    p: int
    poly: str
    points: List[PointDocument]
    rank_test_count: int
    mismatch_points: Optional[List[int]] = None


@dataclasses.dataclass
class DisagreementDocument:
    exponents: List[int]
    branch: str
    classifier_verdict: str
    oracle_verdict: str
    rank_c: Optional[int]
    rank_ce: Optional[int]


@dataclasses.dataclass
class RankStatisticDocument:
    branch: str
    rank_c: int
    rank_ce: int
    rows: int
    cols: int
    count: int


@dataclasses.dataclass
class ReportDocument:
    p: int
    n: int
    q: int
    poly: str
    histogram: Dict[str, int]
    agreement: Dict[str, List[int]]
    disagreements: List[DisagreementDocument]
    clamp_log: List[List[int]]
    rank_statistics: List[RankStatisticDocument]


_retort = Retort(recipe=[
    name_mapping(
        PointDocument,
        map={
            "multiplicity_numerator": "mult_num",
            "multiplicity_denominator": "mult_den",
        },
    ),
    name_mapping(
        DisagreementDocument,
        map={"rank_c": "rankC", "rank_ce": "rankCe"},
    ),
    name_mapping(
        RankStatisticDocument,
        map={"rank_c": "rankC", "rank_ce": "rankCe"},
    ),
])


def series_to_dict(series: HKSeries) -> Dict[str, Any]:
    doc = SeriesDocument(
        p=series.p,
        poly=series.f.serialize(),
        points=[
            PointDocument(point.n, point.q, point.hk, point.multiplicity.numerator, point.multiplicity.denominator)
            for point in series.points
        ],
        rank_test_count=series.rank_test_count,
        mismatch_points=list(series.mismatch_points) or None,
    )
    data = _retort.dump(doc)
    if data.get("mismatch_points") is None:
        data.pop("mismatch_points", None)
    return data


def _witness_ranks(row: VerifyRow):
    witness = row.decision.rank_witness
    if witness is None:
        return None, None
    return witness.rank_c, witness.rank_ce


def report_to_dict(report: VerifyReport) -> Dict[str, Any]:
    doc = ReportDocument(
        p=report.p,
        n=report.n,
        q=report.q,
        poly=report.f.serialize(),
        histogram={branch.value: count for branch, count in report.histogram.items()},
        agreement={branch.value: list(pair) for branch, pair in report.agreement.items()},
        disagreements=[
            DisagreementDocument(
                list(row.monomial), row.decision.branch.value,
                row.decision.verdict.value, row.oracle_verdict.value, *_witness_ranks(row),
            )
            for row in report.disagreements
        ],
        clamp_log=[list(row.monomial) for row in report.clamp_log],
        rank_statistics=[
            RankStatisticDocument(branch.value, rank_c, rank_ce, rows, cols, count)
            for branch, stats in report.rank_statistics.items()
            for (rank_c, rank_ce, rows, cols), count in stats.items()
        ],
    )
    return _retort.dump(doc)


# ===== rows and tables
CSV_HEADER = ("exponents", "branch", "classifier_verdict", "oracle_verdict", "rankC", "rankCe")


def report_csv_rows(report: VerifyReport) -> List[List[str]]:
    rows = []
    for row in report.rows:
        rank_c, rank_ce = _witness_ranks(row)
        rows.append([
            ",".join(str(e) for e in row.monomial),
            row.decision.branch.value,
            row.decision.verdict.value,
            row.oracle_verdict.value,
            "" if rank_c is None else str(rank_c),
            "" if rank_ce is None else str(rank_ce),
        ])
    return rows


def series_table(series: HKSeries) -> str:
    return tabulate(
        [
            (point.n, point.q, point.hk, str(point.multiplicity), "%.6f" % point.multiplicity_decimal)
            for point in series.points
        ],
        headers=("n", "q", "HK(q)", "HK/q^(m-1)", "decimal"),
    ) + "\nrank-test monomials: %d\n" % series.rank_test_count


def report_tables(report: VerifyReport) -> str:
    lines = [
        "f = %s over F_%d, q = %d" % (report.f.serialize(), report.p, report.q),
        "",
        tabulate(
            [
                (branch.value, count, *report.agreement[branch])
                for branch, count in report.histogram.items()
            ],
            headers=("branch", "count", "agree", "disagree"),
        ),
    ]
    if report.rank_statistics:
        lines += ["", tabulate(
            [
                (branch.value, "%dx%d" % (rows, cols), rank_c, rank_ce, count)
                for branch, stats in report.rank_statistics.items()
                for (rank_c, rank_ce, rows, cols), count in stats.items()
            ],
            headers=("branch", "shape", "rank(C)", "rank([C|e])", "count"),
        )]
    lines += ["", "clamped rank tests: %d" % len(report.clamp_log), "disagreements: %d" % len(report.disagreements)]
    return "\n".join(lines) + "\n"


def explanation_text(explanation: Explanation) -> str:
    inv = explanation.invariants
    decision = explanation.decision
    rows = [
        ("monomial", str(explanation.monomial)),
        ("q", explanation.q),
        ("one_min", inv.one_min),
        ("two_min", inv.two_min),
        ("neg2_max", inv.neg2_max),
        ("neg3_max", inv.neg3_max),
        ("branch", decision.branch.value),
        ("verdict", decision.verdict.value),
    ]
    witness = decision.rank_witness
    if witness is not None:
        rows += [
            ("shape", "%dx%d" % witness.shape),
            ("rank(C)", witness.rank_c),
            ("rank([C|e])", witness.rank_ce),
            ("clamped", witness.clamped),
        ]
    if explanation.oracle_verdict is not None:
        rows.append(("oracle", explanation.oracle_verdict.value))
    return tabulate(rows, tablefmt="plain") + "\n"


# ===== writers
def print_as_json(data, fh=sys.stdout):
    """Keys keep their insertion order; a terminal gets highlighted output"""
    dump = json.dumps(data, ensure_ascii=False, indent=4) + "\n"
    if fh.isatty():
        pygments.highlight(
            code=dump,
            lexer=pygments.lexers.data.JsonLexer(),
            formatter=pygments.formatters.TerminalFormatter(bg="dark"),
            outfile=fh,
        )
    else:
        fh.write(dump)


class OutputWriter:
    def __init__(self, data):
        self.data = data

    def write(self, file):
        file.write(self.data)
        if self.data and self.data[-1:] != "\n":
            file.write("\n")


class JsonWriter(OutputWriter):
    def write(self, file):
        print_as_json(self.data, file)


class CsvWriter(OutputWriter):
    def __init__(self, rows: Iterable[Sequence[str]], header: Sequence[str] = CSV_HEADER):
        super().__init__(rows)
        self.header = header

    def write(self, file):
        file.write(";".join(self.header) + "\n")
        for row in self.data:
            file.write(";".join(row) + "\n")


class TextWriter(OutputWriter):
    pass


def write_output(dest: Optional[str], writer: OutputWriter):
    """'-' or an empty destination is stdout; missing parent directories are created"""
    if dest in (None, "", "-"):
        writer.write(sys.stdout)
        return
    pdir = os.path.dirname(dest)
    if pdir:
        os.makedirs(pdir, exist_ok=True)
    get_logger().info("writing '%s'", dest)
    with open(dest, "w") as file:
        writer.write(file)

