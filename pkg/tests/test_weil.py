from fractions import Fraction

import pytest

from superloops.constants import EVEN, ODD
from superloops.errors import ContextError, StructureError
from superloops.forms import FormContext, de_rham_d
from superloops.properties import RandomSource
from superloops.superalg import Context, Derivation, SuperPoly, VarSpec, substitute
from superloops.weil import (
    LocalSuperAlgebra,
    WeilContext,
    bracket_table,
    der_o_basis,
    forms_identification,
    induce,
    induced_automorphism,
    lie_bracket,
    sl12_basis,
    sl12_structure_check,
    swap_matrix,
    weil_expand,
    weil_name,
)


@pytest.fixture
def line() -> Context:
    return Context([VarSpec("x")])


def test_exterior_algebra_basis():
    algebra = LocalSuperAlgebra.exterior(2)

    assert algebra.dim == 4
    assert algebra.parities == (EVEN, ODD, ODD, EVEN)
    assert algebra.product(1, 2) == {3: 1}
    assert algebra.product(2, 1) == {3: -1}
    assert algebra.product(1, 1) == {}


def test_truncated_algebra_is_even():
    algebra = LocalSuperAlgebra.truncated(3)

    assert algebra.dim == 3
    assert algebra.parities == (EVEN, EVEN, EVEN)
    assert algebra.product(1, 1) == {2: 1}
    assert algebra.product(1, 2) == {}


def test_algebra_without_unit_is_rejected():
    with pytest.raises(StructureError, match="unit"):
        LocalSuperAlgebra(["a", "b"], [EVEN, EVEN], {(0, 0): {0: 1}, (1, 1): {}})


def test_non_nilpotent_ideal_is_rejected():
    table = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (1, 1): {1: 1}}

    with pytest.raises(StructureError, match="nilpotent"):
        LocalSuperAlgebra(["1", "e"], [EVEN, EVEN], table)


def test_weil_context_parities(line: Context):
    wctx = WeilContext(line, LocalSuperAlgebra.exterior(1))

    assert wctx.var(weil_name("x", 0)).parity == EVEN
    assert wctx.var(weil_name("x", 1)).parity == ODD


def test_weil_context_needs_free_generators():
    capped = Context([VarSpec("x", nil_cap=2)])

    with pytest.raises(ContextError, match="capped"):
        WeilContext(capped, LocalSuperAlgebra.exterior(1))


def test_weil_expand_square(line: Context):
    wctx = WeilContext(line, LocalSuperAlgebra.exterior(1))
    x = SuperPoly.variable(line, "x")
    x0, x1 = wctx.generator("x", 0), wctx.generator("x", 1)

    components = weil_expand(x * x, wctx)

    assert components == [x0 * x0, (x0 * x1).scale(2)]


def test_weil_expand_over_truncated_line(line: Context):
    wctx = WeilContext(line, LocalSuperAlgebra.truncated(3))
    x = SuperPoly.variable(line, "x")
    x0, x1, x2 = (wctx.generator("x", k) for k in range(3))

    components = weil_expand(x**3, wctx)

    assert components[0] == x0**3
    assert components[1] == (x0**2 * x1).scale(3)
    assert components[2] == (x0**2 * x2).scale(3) + (x0 * x1**2).scale(3)


def test_embed_sends_generators_to_the_zero_component(line: Context):
    wctx = WeilContext(line, LocalSuperAlgebra.exterior(1))

    assert wctx.embed(SuperPoly.variable(line, "x")) == wctx.generator("x", 0)


def test_bracket_table_covers_every_pair():
    table = bracket_table(sl12_basis())

    assert len(table) == 36


def test_odd_derivations_bracket_to_an_even_one():
    table = bracket_table(sl12_basis())

    assert table[("D1", "D1")] == {}
    assert table[("D1", "D1*")] == {"Theta2": Fraction(1)}
    assert table[("D1", "Theta1")] == {"D1": Fraction(-1)}


def test_lie_bracket_is_minus_the_commutator():
    d1, _, d1_star = (e.derivation for e in sl12_basis()[:3])

    assert lie_bracket(d1, d1_star) == -d1.bracket(d1_star)


def test_sl12_structure():
    report = sl12_structure_check()

    assert report.passed, report.failures
    assert report.rank == 8
    assert len(report.labels) == 8
    assert all(value == 0 for value in report.supertraces.values())
    assert [report.parities[label] for label in ("D1", "D2", "D1*", "D2*")] == [ODD] * 4


def test_sl12_structure_on_induced_operators():
    base = Context([VarSpec("x"), VarSpec("xi", ODD)])
    wctx = WeilContext(base, LocalSuperAlgebra.exterior(2))

    assert sl12_structure_check(wctx).passed


def test_swap_automorphism_exchanges_components():
    algebra = LocalSuperAlgebra.exterior(2)
    matrix = swap_matrix(algebra)

    assert matrix[1] == {2: 1}
    assert matrix[2] == {1: 1}
    assert matrix[3] == {3: -1}

    wctx = WeilContext(Context([VarSpec("x")]), algebra)
    mapping = induced_automorphism(wctx, matrix)
    assert mapping["x[1]"] == wctx.generator("x", 2)
    assert mapping["x[3]"] == -wctx.generator("x", 3)


def test_one_odd_direction_recovers_the_de_rham_differential():
    base = Context([VarSpec("x"), VarSpec("xi", ODD)])
    algebra = LocalSuperAlgebra.exterior(1)
    wctx = WeilContext(base, algebra)
    fctx = FormContext(base)
    eta_derivative = Derivation(algebra.context, ODD, {"eta1": SuperPoly.one(algebra.context)})
    delta = induce(wctx, eta_derivative)
    mapping = forms_identification(wctx, fctx)
    x0, x1 = wctx.generator("x", 0), wctx.generator("x", 1)
    xi0, xi1 = wctx.generator("xi", 0), wctx.generator("xi", 1)

    assert mapping["x[1]"] == -fctx.twin("x")
    assert mapping["xi[1]"] == fctx.twin("xi")
    for poly in (x0, xi0, x0 * x0 * xi0, x0 * x1 * xi1, x1 * xi0 + xi1 * xi1):
        image = substitute(poly, mapping, target=fctx)
        assert substitute(delta(poly), mapping, target=fctx) == de_rham_d(image)


def test_forms_identification_needs_one_odd_generator(line: Context):
    wctx = WeilContext(line, LocalSuperAlgebra.exterior(2))

    with pytest.raises(StructureError):
        forms_identification(wctx, FormContext(line))


def test_one_odd_direction_basis():
    algebra = LocalSuperAlgebra.exterior(1)
    d, theta = der_o_basis(1, algebra)

    assert (d.label, d.parity) == ("D", ODD)
    assert (theta.label, theta.parity) == ("Theta", EVEN)
    assert d.matrix(algebra) == {1: {0: 1}}
    assert theta.matrix(algebra) == {1: {1: 1}}
    assert lie_bracket(theta.derivation, d.derivation) == d.derivation


def test_two_odd_directions_basis_is_sl12():
    assert [e.label for e in der_o_basis(2)] == [e.label for e in sl12_basis()]


@pytest.mark.parametrize("n", [0, 3])
def test_derivation_basis_needs_one_or_two_directions(n: int):
    with pytest.raises(StructureError):
        der_o_basis(n)


def test_grading_derivation_counts_the_odd_direction():
    base = Context([VarSpec("x"), VarSpec("xi", ODD)])
    wctx = WeilContext(base, LocalSuperAlgebra.exterior(1))
    _, theta = der_o_basis(1)
    delta = induce(wctx, theta.derivation)

    for name in ("x", "xi"):
        assert delta(wctx.generator(name, 0)) == SuperPoly.zero(wctx)
        assert delta(wctx.generator(name, 1)) == wctx.generator(name, 1)


def test_grading_bracket_on_induced_operators():
    base = Context([VarSpec("x"), VarSpec("xi", ODD)])
    wctx = WeilContext(base, LocalSuperAlgebra.exterior(1))
    d, theta = der_o_basis(1)
    delta_d = induce(wctx, d.derivation)
    delta_theta = induce(wctx, theta.derivation)
    commutator = delta_theta.bracket(delta_d)

    assert commutator == delta_d
    assert induce(wctx, lie_bracket(theta.derivation, d.derivation)) == delta_d
    source = RandomSource(11)
    for _ in range(10):
        poly = source.poly(wctx, terms=4, max_degree=3)
        assert commutator(poly) == delta_d(poly)
