import re

import pytest

from superloops import commands
from superloops.config import Config
from superloops.environment import Environment
from superloops.errors import BindingError, ScriptSyntaxError
from superloops.report import Report
from superloops.script import Invocation, parse
from superloops.superalg import SuperPoly


def run(text: str, config: Config) -> Report:
    script = parse(text)
    return commands.Manager.run_command(Environment(script), script.command, config)


def test_run_command(config: Config):
    class DummyCommand(commands.Command):
        name = "dummy"
        usage = "dummy;"
        description = "test"

        def __init__(self):
            self.invoked = False

        def run(self, env, invocation, config, report) -> None:
            self.invoked = True
            report.check("dummy", True)

    command = commands.Manager.get_command("dummy")

    assert isinstance(command, DummyCommand)
    assert command.invoked is False

    report = run("dummy;", config)

    assert command.invoked is True
    assert report.command == "dummy;"
    assert report.passed

    commands.Manager._registry.pop(DummyCommand.name)


def test_commands_need_a_usage_line():
    with pytest.raises(NotImplementedError, match="usage not specified"):

        class Incomplete(commands.Command):
            name = "incomplete"
            description = "test"

            def run(self, env, invocation, config, report) -> None:
                pass


def test_duplicate_names_are_refused():
    with pytest.raises(ValueError, match="Duplicate command 'radon'"):

        class AnotherRadon(commands.Command):
            name = "radon"
            usage = "radon;"
            description = "test"

            def run(self, env, invocation, config, report) -> None:
                pass


def test_unknown_command(config: Config):
    env = Environment(parse("check sl12;"))

    with pytest.raises(ScriptSyntaxError, match="unknown command 'nope'"):
        commands.Manager.run_command(env, Invocation("nope"), config)


def test_every_command_has_a_description():
    for command in commands.Manager.list_commands():
        assert command.description
        assert command.usage.startswith(("check " + command.name, command.name))


def test_sl12(config: Config):
    report = run("check sl12;", config)

    assert report.inputs["base"] == ["x1", "x2", "xi"]
    assert report.passed, [c.details for c in report.checks]


def test_sl12_on_declared_variables(config: Config):
    report = run("even y1 y2;\nodd eta;\ncheck sl12;", config)

    assert report.inputs["base"] == ["y1", "y2", "eta"]
    assert report.passed


def test_closed(config: Config):
    report = run("even x1 x2;\nform w = d(x1^2 * d x2);\ncheck closed w;", config)

    assert report.results["d"].is_zero
    assert report.passed


def test_not_closed(config: Config):
    script = parse("even x1 x2;\nform w = x1 * dx2;\ncheck closed w;")
    env = Environment(script)

    report = commands.Manager.run_command(env, script.command, config)

    assert report.results["d"] == env.forms.twin("x1") * env.forms.twin("x2")
    assert not report.passed


def test_closed_needs_a_form(config: Config):
    with pytest.raises(ScriptSyntaxError, match=re.escape("usage: check closed <form>;")):
        run("even x;\ncheck closed;", config)


def test_radon_on_the_eps_loop(config: Config):
    script = parse(
        "even x1 x2;\n"
        "even eps cap 3;\n"
        "form w = d(x1^2 * x2 * d x2);\n"
        "loop g = [x1: eps * t^-1 + x1] [x2: x2 + eps * t];\n"
        "radon w g;\n"
    )
    env = Environment(script)
    ctx = env.loop_context.ctx
    eps, x1, x2 = (SuperPoly.variable(ctx, n) for n in ("eps", "x1", "x2"))

    report = commands.Manager.run_command(env, script.command, config)

    assert report.inputs["loop"] == "g"
    assert report.results["value"] == (eps**2 * x1 * x2).scale(2)


def test_transgress_matches_radon_of_the_derivative(config: Config):
    text = (
        "even x1 x2;\n"
        "even eps cap 3;\n"
        "form a = x1^2 * x2 * dx2;\n"
        "form w = d a;\n"
        "loop g = [x1: eps * t^-1 + x1] [x2: x2 + eps * t];\n"
    )

    transgressed = run(text + "transgress a g;", config)
    radon = run(text + "radon w g;", config)

    assert transgressed.results["value"] == radon.results["value"]


@pytest.mark.parametrize("command", ["radon w;", "radon w g h;", "transgress 2 g;"])
def test_loop_commands_need_a_form_and_a_loop(config: Config, command: str):
    text = "even x;\nform w = dx;\nloop g = [x: x];\n" + command

    with pytest.raises(ScriptSyntaxError, match="usage:"):
        run(text, config)


def test_hessian(config: Config):
    script = parse("even x1 x2;\nform w = dx1 * dx2;\nhessian w 2;")
    env = Environment(script)

    report = commands.Manager.run_command(env, script.command, config)

    assert report.inputs["n"] == 2
    assert report.results["form"] == env.form("w").scale(2)
    assert [c.name for c in report.checks] == ["skew symmetry", "round trip"]
    assert report.passed


def test_hessian_in_a_negative_mode(config: Config):
    script = parse("even x1 x2;\nform w = dx1 * dx2;\nhessian w -1;")
    env = Environment(script)

    report = commands.Manager.run_command(env, script.command, config)

    assert report.inputs["n"] == -1
    assert report.results["form"] == env.form("w").scale(-1)
    assert report.passed


def test_additivity_on_two_poles(config: Config):
    report = run("even x1 x2;\nform w = x1 * dx2;\nadditivity w two;", config)

    assert report.results["poles"] == 2
    assert all(v.is_zero for v in report.results["negative"].values())
    assert report.passed


def test_additivity_on_three_poles(config: Config):
    report = run("even x1 x2;\nform w = x1 * dx2;\nadditivity w three;", config)

    assert report.results["poles"] == 3
    assert report.passed


def test_additivity_on_the_degenerate_family(config: Config):
    report = run("even x1 x2;\nform w = x1 * dx2;\nadditivity w degenerate order=2;", config)

    assert [c.name for c in report.checks] == ["regular at lambda = 0", "specialization"]
    assert report.passed


def test_additivity_on_a_declared_family(config: Config):
    report = run(
        "even x1 x2;\n"
        "form w = x1 * dx2;\n"
        "poles p = [1: x1 = x2, x2 = 1] [1 + 2 * lambda: x1 = x2, x2 = 1];\n"
        "additivity w p;\n",
        config,
    )

    assert report.inputs["family"] == "p"
    assert report.passed


def test_additivity_on_an_unknown_family(config: Config):
    with pytest.raises(BindingError, match="neither a declared pole family"):
        run("even x1 x2;\nform w = x1 * dx2;\nadditivity w four;", config)


@pytest.mark.parametrize("nil_order", [2, 4])
def test_additivity_takes_the_nil_order(config: Config, nil_order: int):
    report = run(f"even x1 x2;\nform w = x1 * dx2;\nadditivity w three {nil_order};", config)

    assert report.inputs["nil_order"] == nil_order
    assert report.inputs["precision"] == 1
    assert report.passed


def test_additivity_defaults_to_the_environment_nil_order(config: Config):
    report = run("even x1 x2;\nform w = x1 * dx2;\nadditivity w two;", config)

    assert report.inputs["nil_order"] == 3


def test_declared_families_keep_their_nil_order(config: Config):
    with pytest.raises(BindingError, match="nil order"):
        run(
            "even x1 x2;\n"
            "form w = x1 * dx2;\n"
            "poles p = [1: x1 = x2, x2 = 1] [1 + 2 * lambda: x1 = x2, x2 = 1];\n"
            "additivity w p 2;\n",
            config,
        )


def test_psi_scaling(config: Config):
    report = run("even x1 x2;\nform w = dx1 * dx2;\npsi-scaling w 3;", config)

    assert report.inputs["n"] == 3
    assert report.passed


def test_psi_scaling_needs_n(config: Config):
    with pytest.raises(ScriptSyntaxError, match="usage:"):
        run("even x1 x2;\nform w = dx1 * dx2;\npsi-scaling w;", config)


def test_berezinian_of_declared_matrices(config: Config):
    report = run(
        "even x;\n"
        "odd xi;\n"
        "matrix m = 1|1 [[2, xi] [xi, 1]];\n"
        "matrix n = 1|1 [[1 + x, 0] [0, 1]];\n"
        "berezinian m n;\n",
        config,
    )

    assert report.results["berezinian"]["m"] == 2
    assert report.passed


def test_berezinian_property(config: Config):
    report = run("berezinian cases=3;", config)

    assert report.inputs == {"seed": config.seed, "cases": 3}
    assert report.passed


def test_kernel(config: Config):
    report = run("check kernel cases=3;", config)

    assert report.inputs["cases"] == 3
    assert len(report.checks) > 1
    assert report.passed


def test_chain_map(config: Config):
    report = run("check chain-map cases=2;", config)

    assert report.passed


def test_exactness(config: Config):
    report = run("even x;\ncheck exactness 2 rows=2;", config)

    assert report.inputs == {"base": ["x"], "cap": 2, "rows": 2}
    assert report.results["dimensions"]["0,0"] == 3
    assert [c.name for c in report.checks] == ["row 0", "row 1", "row 2", "grading", "swap"]
    assert report.passed


def test_exactness_on_unknown_variables(config: Config):
    with pytest.raises(BindingError):
        run("even x;\ncheck exactness y;", config)


def test_truncation(config: Config):
    report = run("even x;\ncheck truncation 1 2 depth=2;", config)

    assert report.inputs["p"] == 1
    assert report.passed


def test_truncation_needs_a_degree(config: Config):
    with pytest.raises(ScriptSyntaxError, match="usage:"):
        run("even x;\ncheck truncation x;", config)


def test_taylor(config: Config):
    report = run("even x1 x2;\nform w = dx1 * dx2;\ntaylor w;", config)

    assert report.checks[0].name == "omega-psi relations"
    assert report.passed
