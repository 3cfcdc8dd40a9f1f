#!/usr/bin/env python3
import sys
from typing import Optional, Sequence

from contextlog import get_logger

import hkcalc
from hkcalc import argparse, cli, lib
from hkcalc.errors import BudgetError, InputError


# =====
@lib.catch_ctrl_c
def main(argv: Optional[Sequence[str]] = None) -> int:
    hkcalc.assert_python_version()
    parser = argparse.ArgParser(prog="hkcalc")
    cli.fill_base_args(parser, hkcalc.__name__, "configs/logging.yaml")
    parser.add_commands(parser.find_subcommands(cli.list_subcommands()))
    try:
        parser.dispatch(pre_call=hkcalc.init, add_help_command=True, argv=argv)
    except InputError as exc:
        get_logger().error("input error: %s", exc)
        sys.stderr.write("error: %s\n" % exc)
        return 1
    except BudgetError as exc:
        get_logger().error("budget exceeded: %s", exc)
        sys.stderr.write("error: %s\n" % exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
