from __future__ import annotations

import abc
from typing import Dict, List, Optional, Tuple, Type

from .bigraded import (
    build_bigraded_slice,
    exactness_report,
    grading_failures,
    swap_failures,
    truncation_cohomology_compare,
)
from .config import Config
from .constants import ODD
from .environment import Environment
from .errors import BindingError, ScriptSyntaxError
from .forms import de_rham_d, is_closed
from .loops import LoopPoint, transgress
from .poles import (
    PoleFamily,
    additivity_check,
    degenerate_family,
    three_pole_family,
    two_pole_family,
)
from .properties import (
    RandomSource,
    chain_map_suite,
    check_berezinian,
    kernel_suite,
    run_check,
)
from .radon import (
    RadonTransform,
    as_loop_function,
    hessian_matrix,
    omega_psi_residuals,
    psi_n_scaling_check,
    radon,
    skew_symmetry_defects,
    tangential_form,
    taylor_profile,
)
from .report import Report
from .script import Invocation, format_command
from .superalg import Context, SuperPoly, VarSpec, berezinian
from .weil import LocalSuperAlgebra, WeilContext, sl12_structure_check

BUILTIN_FAMILIES = ("two", "three", "degenerate")


def _is_integer(text: str) -> bool:
    return text.lstrip("-").isdigit()


class Manager:
    _registry: Dict[str, Command] = {}

    @classmethod
    def list_commands(cls):
        return cls._registry.values()

    @classmethod
    def get_command(cls, name: str) -> Optional[Command]:
        return cls._registry.get(name)

    @classmethod
    def register(cls, command: Type[Command]):
        if command.name in cls._registry:
            raise ValueError(f"Duplicate command {repr(command.name)}")

        cls._registry[command.name] = command()

    @classmethod
    def run_command(cls, env: Environment, invocation: Invocation, config: Config) -> Report:
        command = cls.get_command(invocation.name)
        if command is None:
            raise ScriptSyntaxError(f"unknown command {invocation.name!r}", *invocation.pos)
        report = Report(format_command(invocation))
        command.run(env, invocation, config, report)
        return report


class Command(abc.ABC):
    name: str
    usage: str
    description: str

    def __init_subclass__(cls, **kwargs) -> None:
        for field in ("name", "usage", "description"):
            if not hasattr(cls, field):
                raise NotImplementedError(f"{cls.__name__}: {field} not specified")

        super().__init_subclass__(**kwargs)
        Manager.register(cls)

    @abc.abstractmethod
    def run(
        self, env: Environment, invocation: Invocation, config: Config, report: Report
    ) -> None:
        """Fill ``report`` with inputs, results and checks."""

    def usage_error(self, invocation: Invocation) -> ScriptSyntaxError:
        return ScriptSyntaxError(f"usage: {self.usage}", *invocation.pos)

    def split_arguments(
        self, invocation: Invocation, names: int, numbers: int
    ) -> Tuple[List[str], List[int]]:
        """Identifiers then integers; at most ``names`` and ``numbers`` of each."""
        idents = [a for a in invocation.arguments if not _is_integer(a)]
        ints = [int(a) for a in invocation.arguments if _is_integer(a)]
        if len(idents) > names or len(ints) > numbers:
            raise self.usage_error(invocation)
        return idents, ints

    def form_argument(self, env: Environment, invocation: Invocation) -> SuperPoly:
        names, _ = self.split_arguments(invocation, 1, 1)
        if not names:
            raise self.usage_error(invocation)
        return env.form(names[0])


def _sl12_base(env: Environment) -> Context:
    if env.variables:
        return env.base
    return Context([VarSpec("x1"), VarSpec("x2"), VarSpec("xi", ODD)])


class SL12Command(Command):
    name = "sl12"
    usage = "check sl12;"
    description = "Verify the sl(1|2) bracket table three ways"

    def run(self, env, invocation, config, report):
        base = _sl12_base(env)
        check = sl12_structure_check(WeilContext(base, LocalSuperAlgebra.exterior(2)))
        report.inputs["base"] = list(base.names)
        report.results["brackets"] = len(check.table)
        report.results["parities"] = check.parities
        report.results["supertraces"] = check.supertraces
        report.results["rank"] = check.rank
        report.results["table"] = check.table
        report.check("sl12 structure", check.passed, check.failures)


class ClosedCommand(Command):
    name = "closed"
    usage = "check closed <form>;"
    description = "Check that a form is closed"

    def run(self, env, invocation, config, report):
        form = self.form_argument(env, invocation)
        report.inputs["form"] = form
        report.results["d"] = de_rham_d(form)
        report.check("closed", is_closed(form))


class KernelCommand(Command):
    name = "kernel"
    usage = "check kernel [cases=N];"
    description = "Seeded property suite for the algebra kernel"

    def run(self, env, invocation, config, report):
        cases = invocation.option("cases", 200)
        report.inputs.update(seed=config.seed, cases=cases)
        for result in kernel_suite(config.seed, cases):
            report.check(result.name, result.passed, result.failures)


class ChainMapCommand(Command):
    name = "chain-map"
    usage = "check chain-map [cases=N];"
    description = "Seeded check that transgression commutes with d"

    def run(self, env, invocation, config, report):
        cases = invocation.option("cases", 20)
        report.inputs.update(seed=config.seed, cases=cases)
        result = chain_map_suite(config.seed, cases)
        report.check(result.name, result.passed, result.failures)


class ExactnessCommand(Command):
    name = "exactness"
    usage = "check exactness [<var>...] [<cap>] [rows=N];"
    description = "Row cohomology of the double complex under D1"

    def run(self, env, invocation, config, report):
        names, ints = self.split_arguments(invocation, len(invocation.arguments), 1)
        cap = ints[0] if ints else config.caps
        rows = invocation.option("rows", 3)
        base = env.subcontext(names)
        piece = build_bigraded_slice(base, rows, cap=cap, max_basis_size=config.max_basis_size)
        report.inputs.update(base=list(base.names), cap=cap, rows=rows)
        report.results["dimensions"] = {
            f"{i},{j}": n for (i, j), n in sorted(piece.dimensions().items())
        }
        defects = {}
        for fixed in range(rows + 1):
            row = exactness_report(piece, fixed)
            defects[str(fixed)] = {
                str(p.position): p.defect for p in row.positions if p.verifiable
            }
            report.check(f"row {fixed}", row.passed, row.failures)
        report.results["defects"] = defects
        report.check("grading", *_verdict(grading_failures(piece)))
        report.check("swap", *_verdict(swap_failures(piece)))


class TruncationCommand(Command):
    name = "truncation"
    usage = "check truncation [<var>...] <p> [<cap>] [depth=N];"
    description = "Compare closed p-forms under D2 with the truncated de Rham complex"

    def run(self, env, invocation, config, report):
        names, ints = self.split_arguments(invocation, len(invocation.arguments), 2)
        if not ints:
            raise self.usage_error(invocation)
        p = ints[0]
        cap = ints[1] if len(ints) > 1 else config.caps
        depth = invocation.option("depth", 3)
        base = env.subcontext(names)
        compared = truncation_cohomology_compare(
            base, p, cap, depth, max_basis_size=config.max_basis_size
        )
        report.inputs.update(base=list(base.names), p=p, cap=cap, depth=depth)
        report.results["closed"] = compared.left
        report.results["truncated"] = compared.right
        report.results["flagged"] = len(compared.flagged)
        details = [f"slot {q},{w} differs" for q, w in compared.mismatches]
        report.check("quasi-isomorphism", compared.passed, details)


def _verdict(failures: List[str]) -> Tuple[bool, List[str]]:
    return not failures, failures


class TransgressCommand(Command):
    name = "transgress"
    usage = "transgress <form> <loop>;"
    description = "Residue of the pulled back form along a loop"

    def run(self, env, invocation, config, report):
        names, _ = self.split_arguments(invocation, 2, 0)
        if len(names) != 2:
            raise self.usage_error(invocation)
        form, loop = env.form(names[0]), env.loop(names[1])
        report.inputs.update(form=form, loop=names[1])
        report.results["value"] = transgress(form, loop)


class RadonCommand(Command):
    name = "radon"
    usage = "radon <closed form> <loop>;"
    description = "Transgression of the Euler primitive of a closed form"

    def run(self, env, invocation, config, report):
        names, _ = self.split_arguments(invocation, 2, 0)
        if len(names) != 2:
            raise self.usage_error(invocation)
        form, loop = env.form(names[0]), env.loop(names[1])
        report.inputs.update(form=form, loop=names[1])
        report.results["value"] = radon(form, loop)


class HessianCommand(Command):
    name = "hessian"
    usage = "hessian <closed 2-form> [<n>];"
    description = "Hessian of the radon transform and its inverse"

    def run(self, env, invocation, config, report):
        form = self.form_argument(env, invocation)
        _, ints = self.split_arguments(invocation, 1, 1)
        n = ints[0] if ints else 1
        hessian = hessian_matrix(RadonTransform(form), env.base, n)
        report.inputs.update(form=form, n=n)
        report.results["hessian"] = hessian
        defects = skew_symmetry_defects(hessian, env.base)
        report.check(
            "skew symmetry",
            not defects,
            [f"H_{i}{k} + H_{k}{i} = {value}" for (i, k), value in defects.items()],
        )
        recovered = tangential_form(hessian, env.forms)
        report.results["form"] = recovered
        expected = form.scale(n)
        report.check(
            "round trip",
            recovered == expected,
            [] if recovered == expected else [f"recovered {recovered}"],
        )


def _family(
    env: Environment, name: str, nil_order: int, order: int
) -> Tuple[PoleFamily, Optional[LoopPoint]]:
    if name in env.pole_families:
        return env.family(name), None
    if name == "two":
        return two_pole_family(env.base, nil_order), None
    if name == "three":
        return three_pole_family(env.base, nil_order), None
    if name == "degenerate":
        return degenerate_family(env.base, order, nil_order=nil_order)
    raise BindingError(
        f"{name!r} is neither a declared pole family nor one of {', '.join(BUILTIN_FAMILIES)}"
    )


class AdditivityCommand(Command):
    name = "additivity"
    usage = "additivity <form> <poles|two|three|degenerate> [<d>] [order=M];"
    description = "Sum a loop function over the poles of a family and expand in lambda"

    def run(self, env, invocation, config, report):
        names, ints = self.split_arguments(invocation, 2, 1)
        if len(names) != 2:
            raise self.usage_error(invocation)
        if ints and names[1] in env.pole_families:
            raise BindingError(f"The nil order of the declared family {names[1]!r} is fixed")
        nil_order = ints[0] if ints else env.nil_order
        if nil_order < 1:
            raise self.usage_error(invocation)
        form = env.form(names[0])
        function = as_loop_function(form)
        family, loop = _family(env, names[1], nil_order, invocation.option("order", 2))
        result = additivity_check(function, family)
        report.inputs.update(
            form=form, family=names[1], nil_order=nil_order, precision=result.precision
        )

        deepest = max([1] + [-e for e in result.total if e < 0])
        report.results["negative"] = {
            str(-k): result.total.get(-k) or SuperPoly.zero(family.context.ctx)
            for k in range(1, deepest + 1)
        }
        report.results["poles"] = len(family.poles)
        details = [f"lambda^{e}: {c}" for e, c in result.negative.items()]
        report.check("regular at lambda = 0", result.regular, details)
        if result.regular:
            report.results["value"] = result.value_at_zero(family.context.ctx)
        if loop is not None:
            expected = function(loop)
            matches = result.regular and report.results["value"] == expected
            report.check(
                "specialization", matches, [] if matches else [f"expected {expected}"]
            )


class PsiScalingCommand(Command):
    name = "psi-scaling"
    usage = "psi-scaling <form> <n>;"
    description = "Check omega^n = n omega^1 for the Hessians of a loop function"

    def run(self, env, invocation, config, report):
        names, ints = self.split_arguments(invocation, 1, 1)
        if len(names) != 1 or len(ints) != 1:
            raise self.usage_error(invocation)
        form = env.form(names[0])
        scaling = psi_n_scaling_check(as_loop_function(form), env.base, ints[0])
        report.inputs.update(form=form, n=ints[0])
        report.results["compared"] = scaling.compared
        report.check("scaling", scaling.passed, scaling.mismatches)


class BerezinianCommand(Command):
    name = "berezinian"
    usage = "berezinian [<matrix> [<matrix>]] [cases=N];"
    description = "Berezinian of a supermatrix, or its multiplicativity"

    def run(self, env, invocation, config, report):
        names, _ = self.split_arguments(invocation, 2, 0)
        if not names:
            cases = invocation.option("cases", 50)
            report.inputs.update(seed=config.seed, cases=cases)
            result = run_check("berezinian", check_berezinian, RandomSource(config.seed), cases)
            report.check(result.name, result.passed, result.failures)
            return
        matrices = [env.matrix(name) for name in names]
        values = [berezinian(m) for m in matrices]
        report.inputs["matrices"] = names
        report.results["berezinian"] = {name: v for name, v in zip(names, values)}
        if len(matrices) == 2:
            product = berezinian(matrices[0] @ matrices[1])
            report.results["product"] = product
            report.check("multiplicative", product == values[0] * values[1])


class TaylorCommand(Command):
    name = "taylor"
    usage = "taylor <form>;"
    description = "Low-order Taylor coefficients of a loop function and their relations"

    def run(self, env, invocation, config, report):
        form = self.form_argument(env, invocation)
        profile = taylor_profile(as_loop_function(form), env.base)
        report.inputs["form"] = form
        report.results["omega"] = profile.omega
        report.results["psi"] = profile.psi
        report.results["quasihomogeneous"] = profile.quasihomogeneous
        residuals = omega_psi_residuals(profile, env.base)
        failing = [
            f"relation {i},{j},{k}: {value}" for (i, j, k), value in residuals.items() if value
        ]
        report.check("omega-psi relations", not failing, failing)
