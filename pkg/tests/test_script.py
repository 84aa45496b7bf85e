import re
from fractions import Fraction

import pytest

from superloops.constants import EVEN, ODD
from superloops.errors import BindingError, LexError, ScriptSyntaxError
from superloops.script import (
    Differential,
    FormDecl,
    Invocation,
    LoopDecl,
    MatrixDecl,
    Name,
    Negate,
    Number,
    PolesDecl,
    Power,
    Product,
    Sum,
    VariableDecl,
    format_command,
    format_expr,
    format_script,
    names_in,
    parse,
    parse_expression,
    tokenize,
)

EXAMPLE = """\
even x1 x2;
odd xi cap 2;
form w = d(x1^2 * x2 * d x2) - 1/2 * xi;
loop g = [x1: eps * t^-1 + x1] [x2: x2 + eps * t];
poles p = [0: x1 = a, x2 = 1] [lambda: x1 = -a];
matrix m = 1|1 [[1 + x1, xi] [xi, 2]];
check radon w g;
"""


def test_tokens_carry_positions():
    tokens = tokenize("even x;\n  odd xi; # comment\n")

    assert [t.text for t in tokens] == ["even", "x", ";", "odd", "xi", ";", ""]
    assert (tokens[3].line, tokens[3].column) == (2, 3)
    assert tokens[-1].kind == "eof"


def test_unexpected_character():
    with pytest.raises(LexError) as exc_info:
        tokenize("even x $;")

    assert str(exc_info.value) == "1:8: unexpected character '$'"


def test_parse_declarations():
    script = parse(EXAMPLE)

    assert [type(d) for d in script.declarations] == [
        VariableDecl,
        VariableDecl,
        FormDecl,
        LoopDecl,
        PolesDecl,
        MatrixDecl,
    ]
    assert script.declarations[0] == VariableDecl(EVEN, ("x1", "x2"))
    assert script.declarations[1] == VariableDecl(ODD, ("xi",), 2)
    assert script.command == Invocation("radon", ("w", "g"), (), True)


def test_parse_loop_and_poles():
    script = parse(EXAMPLE)
    loop, poles = script.declarations[3], script.declarations[4]

    assert [name for name, _ in loop.coordinates] == ["x1", "x2"]
    assert loop.coordinates[0][1] == Sum(
        ((1, Product((Name("eps"), Power(Name("t"), -1)))), (1, Name("x1")))
    )
    assert len(poles.poles) == 2
    assert poles.poles[1].location == Name("lambda")
    assert poles.poles[1].residues == (("x1", Negate(Name("a"))),)


def test_parse_matrix():
    matrix = parse(EXAMPLE).declarations[5]

    assert (matrix.even_dim, matrix.odd_dim) == (1, 1)
    assert matrix.rows[1] == (Name("xi"), Number(Fraction(2)))


def test_differential_is_a_prefix_operator():
    assert parse_expression("d x") == Differential(Name("x"))
    assert parse_expression("d(x * y)") == Differential(Product((Name("x"), Name("y"))))
    assert parse_expression("d") == Name("d")
    assert parse_expression("d * x") == Product((Name("d"), Name("x")))


def test_precedence():
    expr = parse_expression("a + b * c^2 - -d x")

    assert expr == Sum(
        (
            (1, Name("a")),
            (1, Product((Name("b"), Power(Name("c"), 2)))),
            (-1, Negate(Differential(Name("x")))),
        )
    )


def test_rational_numbers():
    assert parse_expression("3/4") == Number(Fraction(3, 4))


def test_command_options():
    command = parse("check chain-map cases=5 shift=-2;").command

    assert command.name == "chain-map"
    assert command.check
    assert command.option("cases", 20) == 5
    assert command.option("shift", 0) == -2
    assert command.option("missing", 7) == 7


def test_command_arguments():
    command = parse("exactness x 2 rows=3;").command

    assert command == Invocation("exactness", ("x", "2"), (("rows", 3),), False)


def test_negative_command_arguments():
    command = parse("hessian w -2;").command

    assert command.arguments == ("w", "-2")
    assert format_command(command) == "hessian w -2;"


def test_names_in():
    expr = parse_expression("x * d(y + z^2) - 3")

    assert [n.name for n in names_in(expr)] == ["x", "y", "z"]


def test_syntax_errors_point_at_the_token():
    with pytest.raises(ScriptSyntaxError) as exc_info:
        parse("even x1;\nform w = x1 +;\ncheck closed w;\n")

    error = exc_info.value
    assert (error.line, error.column) == (2, 14)
    assert error.message == "expected one of number, identifier, '(', found ';'"


@pytest.mark.parametrize(
    "text, message",
    [
        ("even x;", "expected a command, found end of script"),
        ("check closed w; even", "expected end of script, found 'even'"),
        ("even x cap y;", "expected integer, found 'y'"),
        ("form w x;", "expected '=', found 'x'"),
        ("loop g = x;", "expected '[', found 'x'"),
    ],
)
def test_syntax_errors(text: str, message: str):
    with pytest.raises(ScriptSyntaxError, match=re.escape(message)):
        parse(text)


def test_reserved_names_cannot_be_bound():
    with pytest.raises(BindingError) as exc_info:
        parse("even x t;\ncheck sl12;")

    assert str(exc_info.value) == "1:8: 't' is reserved"


def test_names_remember_their_position():
    script = parse("even x y;\nform w = x * y;\ncheck closed w;\n")

    assert script.declarations[1].expr.factors[1].pos == (2, 14)


def test_format_expr_adds_needed_parentheses():
    assert format_expr(parse_expression("-(x + y) * z")) == "-(x + y) * z"
    assert format_expr(parse_expression("(x * y)^2")) == "(x * y)^2"
    assert format_expr(parse_expression("d(d x)")) == "d d x"


def test_format_round_trip():
    script = parse(EXAMPLE)

    assert format_script(script) == EXAMPLE
    assert parse(format_script(script)) == script
