import argparse
import sys

from contextlog import get_logger
from valkit.python import valid_logging_level

from hkcalc import cli_args, engine, output
from hkcalc import tables as hk_tables
from hkcalc.argparse import ArgParser, subcommand
from hkcalc.errors import ContractError, InputError
from hkcalc.monomial import Trinomial, parse_monomial, parse_trinomial
from hkcalc.oracle import MembershipOracle


def fill_base_args(parser: ArgParser, pkg_name: str, logging_config: str):
    parser.add_argument("--log-level", default="WARN", type=valid_logging_level,
                        help="Log verbosity (DEBUG, INFO, WARN, ERROR, CRITICAL)")
    parser.add_argument("--pkg_name", default=pkg_name, help=argparse.SUPPRESS)
    parser.add_argument("--logging_config", default=logging_config, help=argparse.SUPPRESS)


def list_subcommands():
    return globals().copy()


def _trinomial(args: cli_args.PolyOptions) -> Trinomial:
    return parse_trinomial(args.poly, args.prime)


@subcommand(cli_args.SeriesOptions, cli_args.BudgetOptions, cli_args.SeriesOutOptions)
def compute(args: cli_args.SeriesOptions, budget: cli_args.BudgetOptions, arg_out: cli_args.SeriesOutOptions):
    """ Compute the Hilbert-Kunz function HK(p^n) for n = 1..max-n """
    f = _trinomial(args)
    series = engine.hk_function(
        f, args.prime, args.max_n, args.mode,
        oracle_budget=budget.budget, threads=budget.threads,
    )
    if arg_out.format == "json":
        writer = output.JsonWriter(output.series_to_dict(series))
    else:
        writer = output.TextWriter(output.series_table(series))
    output.write_output(arg_out.out, writer)


@subcommand(cli_args.InstanceOptions, cli_args.BudgetOptions, cli_args.FileOutOptions)
def verify(args: cli_args.InstanceOptions, budget: cli_args.BudgetOptions, arg_out: cli_args.FileOutOptions):
    """ Check every classifier decision against the oracle and report per monomial """
    f = _trinomial(args)
    report = engine.verify(f, args.prime, args.n, budget=budget.budget, threads=budget.threads)
    if arg_out.format == "csv":
        writer = output.CsvWriter(output.report_csv_rows(report))
    elif arg_out.format == "json":
        writer = output.JsonWriter(output.report_to_dict(report))
    else:
        writer = output.TextWriter(output.report_tables(report))
    output.write_output(arg_out.out, writer)


@subcommand(cli_args.InstanceOptions, cli_args.BudgetOptions)
def oracle_dim(args: cli_args.InstanceOptions, budget: cli_args.BudgetOptions):
    """ Print the colength of the Frobenius power plus (f) by brute-force elimination """
    f = _trinomial(args)
    print(MembershipOracle(f, args.n, budget.budget).global_dimension())


@subcommand(cli_args.ClassifyOptions)
def classify(args: cli_args.ClassifyOptions):
    """ Explain the decision for a single monomial """
    f = _trinomial(args)
    monomial = parse_monomial(args.monomial, f.m)
    explanation = engine.explain(f, args.prime, args.n, monomial, check=args.check, budget=args.budget)
    sys.stdout.write(output.explanation_text(explanation))


@subcommand(cli_args.TablesOptions)
def tables(args: cli_args.TablesOptions):
    """ Dump a rank-test matrix for the given invariants """
    ctx = hk_tables.EntryContext(args.one_min, args.two_min, args.neg2, args.neg3, args.prime)
    try:
        sys.stdout.write(_dump(ctx, args.table, args.staged))
    except ContractError as exc:
        raise InputError(str(exc))


def _dump(ctx: hk_tables.EntryContext, table: str, staged: bool) -> str:
    if table in ("T5", "T6", "T8"):
        return hk_tables.build_C(ctx, hk_tables.Subcase(table)).dump(ctx)
    blocks = hk_tables.build_B(ctx, ctx.case)
    if staged:
        blocks = hk_tables.reduce_stages(blocks, ctx, ctx.case)
        get_logger(table=table).debug("identified rows %d", blocks.identified_rows)
    matrix = blocks.part_a if table == "B_A" else blocks.part_b_lower
    return hk_tables.dump_table(table, matrix, ctx)
