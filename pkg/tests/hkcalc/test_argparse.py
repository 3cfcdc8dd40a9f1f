from unittest.mock import MagicMock

import pytest

from hkcalc.argparse import Arg, ArgGroup, ArgParser, DefaultFromEnv, _reset_meta, subcommand
from hkcalc.errors import InputError


def test_dispatch_calls_command():
    p = MockParser()
    p.add_commands(["compute"])
    p.dispatch(["compute"])
    assert p.cmds["compute"].call_count == 1


def test_underscore_becomes_dash():
    p = MockParser()
    p.add_commands(["oracle_dim"])
    p.dispatch(["oracle-dim"])
    assert p.cmds["oracle_dim"].call_count == 1


def test_group_values():
    cmd = CmdBuilder("verify").with_param("--poly").build()
    p = MockParser()
    p.add_mock_command(cmd)
    p.dispatch(["verify", "--poly", "x1 + x2 + x3"])
    assert cmd.call_count == 1
    assert cmd.call_args[0][0].opt_poly == "x1 + x2 + x3"


def test_options_bind_by_position():
    class Group(ArgGroup):
        opt_table = Arg("--table")

    cmd = MagicMock()
    _reset_meta(cmd)
    cmd.__name__ = "Staged_Tables"
    cmd.__doc__ = "staged tables"
    cmd = subcommand(Arg("--prime", type=int, default=2), Group)(cmd)
    p = MockParser()
    p.add_mock_command(cmd)
    p.dispatch(["staged-tables", "--table", "B_A"])
    prime, group = cmd.call_args[0]
    assert prime == 2
    assert group.opt_table == "B_A"


def test_usage_error_is_input_error():
    p = MockParser()
    p.add_commands(["compute"])
    with pytest.raises(InputError):
        p.dispatch(["nonexistent"])
    with pytest.raises(InputError):
        p.dispatch([])


def test_help_command(capsys):
    p = MockParser()
    p.add_commands(["compute"])
    with pytest.raises(SystemExit) as err:
        p.dispatch(["help", "compute"])
    assert err.value.code == 0
    assert "usage" in capsys.readouterr().out


def test_default_from_env(monkeypatch):
    monkeypatch.setenv("HK_TEST_THREADS", "3")
    arg = Arg("--threads", type=int, default=DefaultFromEnv("HK_TEST_THREADS", "0"))
    arg._prepare()
    assert arg.default == 3
    assert "(default: 3)" in arg.kwargs["help"]

    monkeypatch.setenv("HK_TEST_THREADS", "many")
    with pytest.raises(InputError):
        Arg("--threads", type=int, default=DefaultFromEnv("HK_TEST_THREADS", "0"))._prepare()


def test_callable_default():
    arg = Arg("--budget", type=int, default=lambda: 4096)
    arg._prepare()
    assert arg.default == 4096


def test_flag_default():
    arg = Arg("--staged", default=False)
    arg._prepare()
    assert arg.kwargs["action"] == "store_true"


def test_group_rejects_unknown_option():
    class Options(ArgGroup):
        poly = Arg("--poly")
        prime = Arg("--prime", type=int, default=2)

    assert Options().prime == 2
    assert Options(poly="x1 + x2 + x3").poly == "x1 + x2 + x3"
    with pytest.raises(TypeError):
        Options(mode="oracle")


class MockParser:
    def __init__(self):
        self.parser = ArgParser(prog="hkcalc")
        self.cmds = {}

    def add_commands(self, names):
        self.add_mock_commands([CmdBuilder(name).build() for name in names])

    def add_mock_command(self, cmd_mock):
        self.add_mock_commands([cmd_mock])

    def add_mock_commands(self, cmd_mocks):
        for cmd_mock in cmd_mocks:
            self.cmds[cmd_mock.__name__] = cmd_mock
        self.parser.add_commands(cmd_mocks)

    def dispatch(self, argv):
        self.parser.dispatch(add_help_command=True, argv=argv)


class CmdBuilder:
    def __init__(self, name):
        class Group(ArgGroup):
            pass
        self.cls = Group
        self.name = name

    def with_param(self, param):
        arg = Arg(param)
        attr_name = "opt_" + param.strip("-").replace("-", "_")
        setattr(self.cls, attr_name, arg)
        return self

    def build(self):
        cmd = MagicMock()
        _reset_meta(cmd)
        cmd.__name__ = self.name
        cmd.__doc__ = "%s command" % self.name
        return subcommand(self.cls)(cmd)
