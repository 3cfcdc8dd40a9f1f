from valkit.common import valid_number

from hkcalc import lib
from hkcalc.argparse import Arg, ArgGroup, DefaultFromEnv
from hkcalc.engine import Mode
from hkcalc.field import check_prime


# ====
def valid_prime(value):
    return check_prime(valid_number(value, min=2, type=int))


def valid_positive(value):
    return valid_number(value, min=1, type=int)


def valid_nonnegative(value):
    return valid_number(value, min=0, type=int)


def _context_default(key):
    return lambda: lib.get_context()[key]


# ====
opt_poly = Arg(
    "--poly", required=True,
    help="A disjoint-term trinomial in x1..xm, e.g. 'x1^2 + 3*x2^3 + x3^5'"
)

opt_prime = Arg(
    "--prime", type=valid_prime, required=True,
    help="The characteristic p of the base field"
)

opt_n = Arg(
    "--n", type=valid_positive, default=1,
    help="Frobenius exponent, q = p^n"
)

opt_max_n = Arg(
    "--max-n", type=valid_positive, default=1,
    help="Compute HK(p^n) for every n from 1 up to this value"
)

opt_mode = Arg(
    "--mode", choices=Mode.ALL, default=Mode.CLASSIFIER,
    help="Count non-members with the classifier, eliminate with the oracle, or run both and compare"
)

opt_budget = Arg(
    "--budget", type=valid_positive, default=_context_default("oracle_budget"),
    help="Largest q^m the oracle may eliminate (env HK_ORACLE_BUDGET)"
)

opt_threads = Arg(
    "--threads", type=valid_nonnegative, default=DefaultFromEnv("HK_THREADS", "0"),
    help="Worker processes for the classifier, 0 means one per physical core"
)

opt_out = Arg(
    "--out", default="-",
    help="A file to write the result to, '-' for stdout"
)

opt_series_format = Arg(
    "--format", choices=["json", "text"], default="json",
    help="Output format of the series"
)

opt_report_format = Arg(
    "--format", choices=["csv", "json", "text"], default="csv",
    help="Output format of the verification report"
)

opt_monomial = Arg(
    "--monomial", required=True,
    help="A monomial of the quotient basis, e.g. 'x2*x3^2' or '1'"
)

opt_check = Arg(
    "--check", default=False,
    help="Also ask the oracle, from scratch, whether the monomial is a member"
)

opt_table = Arg(
    "--table", choices=["T5", "T6", "T8", "B_A", "B_B"], required=True,
    help="Closed-form system (T5, T6, T8) or a staged block of the full system (B_A, B_B)"
)

opt_staged = Arg(
    "--staged", default=False,
    help="Dump B_A/B_B after the stage row operations instead of as built"
)

opt_one_min = Arg("--one-min", type=valid_positive, required=True, help="Multiplications by [1] needed for overflow")
opt_two_min = Arg("--two-min", type=valid_positive, required=True, help="Multiplications by [2] needed for overflow")
opt_neg2 = Arg("--neg2", type=valid_nonnegative, required=True, help="Exact divisions by [2]")
opt_neg3 = Arg("--neg3", type=valid_nonnegative, required=True, help="Exact divisions by [3]")


# ====
class PolyOptions(ArgGroup):
    poly = opt_poly
    prime = opt_prime


class InstanceOptions(PolyOptions):
    n = opt_n


class SeriesOptions(PolyOptions):
    max_n = opt_max_n
    mode = opt_mode


class BudgetOptions(ArgGroup):
    budget = opt_budget
    threads = opt_threads


class SeriesOutOptions(ArgGroup):
    format = opt_series_format
    out = opt_out


class FileOutOptions(ArgGroup):
    format = opt_report_format
    out = opt_out


class ClassifyOptions(InstanceOptions, BudgetOptions):
    monomial = opt_monomial
    check = opt_check


class TablesOptions(ArgGroup):
    table = opt_table
    prime = opt_prime
    one_min = opt_one_min
    two_min = opt_two_min
    neg2 = opt_neg2
    neg3 = opt_neg3
    staged = opt_staged
