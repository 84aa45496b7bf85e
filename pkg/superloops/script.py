"""Lexer, parser and printer for ``.sl`` verification scripts.

A script is a list of declarations followed by one command::

    even x1 x2;
    even eps cap 3;
    form w = d(x1^2 * x2 * d x2);
    loop g = [x1: eps*t^-1 + x1] [x2: x2 + eps*t];
    radon w g;
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from .constants import EVEN, LAMBDA, LOOP_PARAMETER, ODD
from .errors import BindingError, LexError, ScriptSyntaxError

DECLARATIONS = {"even", "odd", "form", "loop", "poles", "matrix"}
RESERVED = DECLARATIONS | {"cap", "check", "d", LOOP_PARAMETER, LAMBDA}
PUNCTUATION = ";=[]:,|()+-*^"

TOKEN_RE = re.compile(
    r"(?P<space>[ \t\r]+)|(?P<newline>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<number>\d+(?:/\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[" + re.escape(PUNCTUATION) + r"])"
)

Position = Tuple[int, int]


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of script"
        return repr(self.text)


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match is None:
            raise LexError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = match.lastgroup or ""
        if kind == "newline":
            line, start = line + 1, match.end()
        elif kind not in ("space", "comment"):
            tokens.append(Token(kind, match.group(), line, pos - start + 1))
        pos = match.end()
    tokens.append(Token("eof", "", line, pos - start + 1))
    return tokens


# expressions


@dataclass(frozen=True)
class Number:
    value: Fraction
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Name:
    name: str
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Negate:
    operand: Expr
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Differential:
    operand: Expr
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Power:
    base: Expr
    exponent: int
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Product:
    factors: Tuple[Expr, ...]
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Sum:
    """``terms[0] +- terms[1] +- ...``; the first sign is always ``+1``."""

    terms: Tuple[Tuple[int, Expr], ...]
    pos: Position = field(default=(0, 0), compare=False, repr=False)


Expr = Union[Number, Name, Negate, Differential, Power, Product, Sum]


def names_in(expr: Expr) -> Iterator[Name]:
    if isinstance(expr, Name):
        yield expr
    elif isinstance(expr, (Negate, Differential)):
        yield from names_in(expr.operand)
    elif isinstance(expr, Power):
        yield from names_in(expr.base)
    elif isinstance(expr, Product):
        for factor in expr.factors:
            yield from names_in(factor)
    elif isinstance(expr, Sum):
        for _, term in expr.terms:
            yield from names_in(term)


# declarations


@dataclass(frozen=True)
class VariableDecl:
    parity: int
    names: Tuple[str, ...]
    cap: Optional[int] = None
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class FormDecl:
    name: str
    expr: Expr
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class LoopDecl:
    name: str
    coordinates: Tuple[Tuple[str, Expr], ...]
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class PoleSpec:
    location: Expr
    residues: Tuple[Tuple[str, Expr], ...]
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class PolesDecl:
    name: str
    poles: Tuple[PoleSpec, ...]
    pos: Position = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class MatrixDecl:
    name: str
    even_dim: int
    odd_dim: int
    rows: Tuple[Tuple[Expr, ...], ...]
    pos: Position = field(default=(0, 0), compare=False, repr=False)


Declaration = Union[VariableDecl, FormDecl, LoopDecl, PolesDecl, MatrixDecl]


@dataclass(frozen=True)
class Invocation:
    name: str
    arguments: Tuple[str, ...] = ()
    options: Tuple[Tuple[str, int], ...] = ()
    check: bool = False
    pos: Position = field(default=(0, 0), compare=False, repr=False)

    def option(self, key: str, default: int) -> int:
        return dict(self.options).get(key, default)


@dataclass(frozen=True)
class Script:
    declarations: Tuple[Declaration, ...]
    command: Invocation


class Parser:
    """Recursive descent over the token list; one token of lookahead."""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        if token.kind != "eof":
            self.index += 1
        return token

    def error(self, expected: Sequence[str]) -> ScriptSyntaxError:
        token = self.current
        wanted = expected[0] if len(expected) == 1 else "one of " + ", ".join(expected)
        return ScriptSyntaxError(
            f"expected {wanted}, found {token.describe()}", token.line, token.column
        )

    def at(self, text: str) -> bool:
        token = self.current
        return token.kind in ("op", "ident") and token.text == text

    def accept(self, text: str) -> Optional[Token]:
        return self.advance() if self.at(text) else None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error([repr(text)])
        return self.advance()

    def expect_ident(self) -> Token:
        if self.current.kind != "ident":
            raise self.error(["identifier"])
        return self.advance()

    def expect_int(self, signed: bool = False) -> int:
        negative = signed and self.accept("-") is not None
        token = self.current
        if token.kind != "number" or "/" in token.text:
            raise self.error(["integer"])
        self.advance()
        return -int(token.text) if negative else int(token.text)

    def binding_name(self) -> str:
        token = self.expect_ident()
        if token.text in RESERVED:
            raise BindingError(f"{token.text!r} is reserved", token.line, token.column)
        return token.text

    # script

    def parse_script(self) -> Script:
        declarations = []
        while self.current.kind == "ident" and self.current.text in DECLARATIONS:
            declarations.append(self.parse_declaration())
        command = self.parse_command()
        if self.current.kind != "eof":
            raise self.error(["end of script"])
        return Script(tuple(declarations), command)

    def parse_declaration(self) -> Declaration:
        keyword = self.advance()
        pos = (keyword.line, keyword.column)
        if keyword.text in ("even", "odd"):
            names = [self.binding_name()]
            while self.current.kind == "ident" and not self.at("cap"):
                names.append(self.binding_name())
            cap = self.expect_int() if self.accept("cap") else None
            self.expect(";")
            parity = EVEN if keyword.text == "even" else ODD
            return VariableDecl(parity, tuple(names), cap, pos)

        name = self.binding_name()
        self.expect("=")
        decl: Declaration
        if keyword.text == "form":
            decl = FormDecl(name, self.parse_expr(), pos)
        elif keyword.text == "loop":
            coordinates = []
            while self.at("[") or not coordinates:
                self.expect("[")
                coordinate = self.expect_ident().text
                self.expect(":")
                coordinates.append((coordinate, self.parse_expr()))
                self.expect("]")
            decl = LoopDecl(name, tuple(coordinates), pos)
        elif keyword.text == "poles":
            poles = []
            while self.at("[") or not poles:
                poles.append(self.parse_pole())
            decl = PolesDecl(name, tuple(poles), pos)
        else:
            even_dim = self.expect_int()
            self.expect("|")
            odd_dim = self.expect_int()
            self.expect("[")
            rows = []
            while self.at("[") or not rows:
                self.expect("[")
                row = [self.parse_expr()]
                while self.accept(","):
                    row.append(self.parse_expr())
                self.expect("]")
                rows.append(tuple(row))
            self.expect("]")
            decl = MatrixDecl(name, even_dim, odd_dim, tuple(rows), pos)
        self.expect(";")
        return decl

    def parse_pole(self) -> PoleSpec:
        start = self.expect("[")
        location = self.parse_expr()
        self.expect(":")
        residues = []
        while True:
            coordinate = self.expect_ident().text
            self.expect("=")
            residues.append((coordinate, self.parse_expr()))
            if not self.accept(","):
                break
        self.expect("]")
        return PoleSpec(location, tuple(residues), (start.line, start.column))

    def parse_command(self) -> Invocation:
        if self.current.kind != "ident":
            raise self.error(["a command"])
        start = self.current
        check = self.accept("check") is not None
        parts = [self.expect_ident().text]
        while self.accept("-"):
            parts.append(self.expect_ident().text)

        arguments: List[str] = []
        options: List[Tuple[str, int]] = []
        while not self.at(";"):
            token = self.current
            if token.kind == "ident" and self.peek().text == "=":
                self.advance()
                self.advance()
                options.append((token.text, self.expect_int(signed=True)))
            elif token.kind in ("ident", "number"):
                arguments.append(self.advance().text)
            elif self.at("-") and self.peek().kind == "number":
                self.advance()
                arguments.append("-" + self.advance().text)
            else:
                raise self.error(["identifier", "integer", "option", "';'"])
        self.expect(";")
        return Invocation(
            "-".join(parts), tuple(arguments), tuple(options), check, (start.line, start.column)
        )

    # expressions

    def parse_expr(self) -> Expr:
        start = self.current
        terms = [(1, self.parse_term())]
        while self.at("+") or self.at("-"):
            sign = 1 if self.advance().text == "+" else -1
            terms.append((sign, self.parse_term()))
        if len(terms) == 1:
            return terms[0][1]
        return Sum(tuple(terms), (start.line, start.column))

    def parse_term(self) -> Expr:
        start = self.current
        factors = [self.parse_unary()]
        while self.accept("*"):
            factors.append(self.parse_unary())
        if len(factors) == 1:
            return factors[0]
        return Product(tuple(factors), (start.line, start.column))

    def _starts_operand(self, token: Token) -> bool:
        return token.kind in ("ident", "number") or token.text in ("(", "-")

    def parse_unary(self) -> Expr:
        token = self.current
        pos = (token.line, token.column)
        if self.accept("-"):
            return Negate(self.parse_unary(), pos)
        if self.at("d") and self._starts_operand(self.peek()):
            self.advance()
            return Differential(self.parse_unary(), pos)
        return self.parse_power()

    def parse_power(self) -> Expr:
        token = self.current
        base = self.parse_atom()
        if self.accept("^"):
            return Power(base, self.expect_int(signed=True), (token.line, token.column))
        return base

    def parse_atom(self) -> Expr:
        token = self.current
        pos = (token.line, token.column)
        if token.kind == "number":
            self.advance()
            return Number(Fraction(token.text), pos)
        if token.kind == "ident":
            self.advance()
            return Name(token.text, pos)
        if self.accept("("):
            inner = self.parse_expr()
            self.expect(")")
            return inner
        raise self.error(["number", "identifier", "'('"])


def parse(text: str) -> Script:
    return Parser(text).parse_script()


def parse_expression(text: str) -> Expr:
    parser = Parser(text)
    expr = parser.parse_expr()
    if parser.current.kind != "eof":
        raise parser.error(["end of expression"])
    return expr


# printing

SUM, PRODUCT, UNARY, POWER, ATOM = range(1, 6)


def _precedence(expr: Expr) -> int:
    if isinstance(expr, Sum):
        return SUM
    if isinstance(expr, Product):
        return PRODUCT
    if isinstance(expr, (Negate, Differential)):
        return UNARY
    if isinstance(expr, Power):
        return POWER
    return ATOM


def format_expr(expr: Expr, minimum: int = SUM) -> str:
    if _precedence(expr) < minimum:
        return f"({format_expr(expr)})"
    if isinstance(expr, Number):
        return str(expr.value)
    if isinstance(expr, Name):
        return expr.name
    if isinstance(expr, Negate):
        return "-" + format_expr(expr.operand, UNARY)
    if isinstance(expr, Differential):
        operand = format_expr(expr.operand, UNARY)
        return "d" + operand if operand.startswith("(") else "d " + operand
    if isinstance(expr, Power):
        return f"{format_expr(expr.base, ATOM)}^{expr.exponent}"
    if isinstance(expr, Product):
        return " * ".join(format_expr(f, UNARY) for f in expr.factors)
    parts = [format_expr(expr.terms[0][1], PRODUCT)]
    for sign, term in expr.terms[1:]:
        parts.append(("+ " if sign > 0 else "- ") + format_expr(term, PRODUCT))
    return " ".join(parts)


def _assignments(pairs: Sequence[Tuple[str, Expr]]) -> str:
    return ", ".join(f"{name} = {format_expr(expr)}" for name, expr in pairs)


def format_declaration(decl: Declaration) -> str:
    if isinstance(decl, VariableDecl):
        keyword = "even" if decl.parity == EVEN else "odd"
        cap = "" if decl.cap is None else f" cap {decl.cap}"
        return f"{keyword} {' '.join(decl.names)}{cap};"
    if isinstance(decl, FormDecl):
        return f"form {decl.name} = {format_expr(decl.expr)};"
    if isinstance(decl, LoopDecl):
        body = " ".join(f"[{name}: {format_expr(expr)}]" for name, expr in decl.coordinates)
        return f"loop {decl.name} = {body};"
    if isinstance(decl, PolesDecl):
        body = " ".join(
            f"[{format_expr(p.location)}: {_assignments(p.residues)}]" for p in decl.poles
        )
        return f"poles {decl.name} = {body};"
    rows = " ".join(
        "[" + ", ".join(format_expr(e) for e in row) + "]" for row in decl.rows
    )
    return f"matrix {decl.name} = {decl.even_dim}|{decl.odd_dim} [{rows}];"


def format_command(command: Invocation) -> str:
    words = (["check"] if command.check else []) + [command.name]
    words += list(command.arguments)
    words += [f"{key}={value}" for key, value in command.options]
    return " ".join(words) + ";"


def format_script(script: Script) -> str:
    lines = [format_declaration(d) for d in script.declarations]
    lines.append(format_command(script.command))
    return "\n".join(lines) + "\n"
