"""Bind a parsed script to contexts, forms, loops, pole families and matrices."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Callable, Dict, Generic, List, Optional, Set, Tuple, TypeVar

from .constants import DEFAULT_NIL_ORDER, DEFAULT_TWIN_CAP, EVEN, LAMBDA, LOOP_PARAMETER
from .errors import BindingError, ContextError, ParityError, ScriptParityError, ScriptSyntaxError
from .forms import FormContext, de_rham_d
from .loops import LoopContext, LoopPoint, NilLaurent
from .poles import PoleFamily, family_from_spec
from .script import (
    Differential,
    Expr,
    FormDecl,
    LoopDecl,
    MatrixDecl,
    Name,
    Negate,
    Number,
    PolesDecl,
    Position,
    Power,
    Product,
    Script,
    Sum,
    VariableDecl,
)
from .superalg import Context, SuperMatrix, SuperPoly, VarSpec

Value = TypeVar("Value", SuperPoly, NilLaurent)


class Evaluator(Generic[Value]):
    """Fold an expression tree with the arithmetic of ``SuperPoly`` or ``NilLaurent``."""

    def __init__(
        self,
        constant: Callable[[Fraction], Value],
        resolve: Callable[[Name], Value],
        differential: Optional[Callable[[Value], Value]] = None,
    ):
        self.constant = constant
        self.resolve = resolve
        self.differential = differential

    def __call__(self, expr: Expr) -> Value:
        if isinstance(expr, Number):
            return self.constant(expr.value)
        if isinstance(expr, Name):
            return self.resolve(expr)
        if isinstance(expr, Negate):
            return -self(expr.operand)
        if isinstance(expr, Differential):
            if self.differential is None:
                raise ScriptSyntaxError("'d' is only allowed in forms", *expr.pos)
            return self.differential(self(expr.operand))
        if isinstance(expr, Power):
            return self(expr.base) ** expr.exponent
        if isinstance(expr, Product):
            result = self(expr.factors[0])
            for factor in expr.factors[1:]:
                result = result * self(factor)
            return result
        total = self(expr.terms[0][1])
        for sign, term in expr.terms[1:]:
            total = total + self(term) if sign > 0 else total - self(term)
        return total


class Environment:
    """Everything a script declares, evaluated in declaration order.

    All variables form one base context; forms live on its form context and
    loops and pole families on loop contexts over it.
    """

    def __init__(
        self,
        script: Script,
        nil_order: int = DEFAULT_NIL_ORDER,
        twin_cap: int = DEFAULT_TWIN_CAP,
    ):
        self.script = script
        self.nil_order = nil_order
        self.variables: List[str] = []
        self._bound: Set[str] = set()

        specs = []
        for decl in script.declarations:
            if isinstance(decl, VariableDecl):
                for name in decl.names:
                    self._bind(name, decl.pos)
                    self.variables.append(name)
                    specs.append(VarSpec(name, decl.parity, nil_cap=decl.cap))
        self.base = Context(specs)
        try:
            self.forms = FormContext(self.base, twin_cap)
        except ContextError as exc:
            raise BindingError(str(exc)) from None
        self.loop_context = LoopContext(self.base, 0, 0, nil_order)
        self.pole_context = LoopContext(
            self.base, 0, 0, nil_order, params=[VarSpec(LAMBDA, EVEN, invertible=True)]
        )

        self.form_values: Dict[str, SuperPoly] = {}
        self.loops: Dict[str, LoopPoint] = {}
        self.pole_families: Dict[str, PoleFamily] = {}
        self.matrices: Dict[str, SuperMatrix] = {}

        for decl in script.declarations:
            self._declare(decl)
        logging.debug(
            f"bound {len(self.variables)} variables, {len(self.form_values)} forms, "
            f"{len(self.loops)} loops"
        )

    def _bind(self, name: str, pos: Position) -> None:
        if name in self._bound:
            raise BindingError(f"{name!r} is already declared", *pos)
        self._bound.add(name)

    def _declare(self, decl: object) -> None:
        if isinstance(decl, FormDecl):
            value = self.evaluate_form(decl.expr)
            self._bind(decl.name, decl.pos)
            self.form_values[decl.name] = value
        elif isinstance(decl, LoopDecl):
            loop = self._loop(decl)
            self._bind(decl.name, decl.pos)
            self.loops[decl.name] = loop
        elif isinstance(decl, PolesDecl):
            family = self._poles(decl)
            self._bind(decl.name, decl.pos)
            self.pole_families[decl.name] = family
        elif isinstance(decl, MatrixDecl):
            matrix = self._matrix(decl)
            self._bind(decl.name, decl.pos)
            self.matrices[decl.name] = matrix

    def _undeclared(self, name: Name) -> BindingError:
        return BindingError(f"{name.name!r} is not declared", *name.pos)

    def _coordinate(self, name: str, pos: Position) -> str:
        if name not in self.variables:
            raise BindingError(f"{name!r} is not a declared coordinate", *pos)
        return name

    # forms

    def evaluate_form(self, expr: Expr) -> SuperPoly:
        fctx = self.forms

        def resolve(name: Name) -> SuperPoly:
            if name.name in self.form_values:
                return self.form_values[name.name]
            if name.name in self.variables:
                return SuperPoly.variable(fctx, name.name)
            if name.name in fctx.base_of and fctx.base_of[name.name] in self.variables:
                return SuperPoly.variable(fctx, name.name)
            raise self._undeclared(name)

        evaluate = Evaluator(lambda c: SuperPoly.constant(fctx, c), resolve, de_rham_d)
        return evaluate(expr)

    def evaluate_function(
        self, expr: Expr, ctx: Context, allow_lambda: bool = False
    ) -> SuperPoly:
        """A polynomial in the declared variables, placed in ``ctx``."""

        def resolve(name: Name) -> SuperPoly:
            if name.name in self.variables:
                return SuperPoly.variable(ctx, name.name)
            if allow_lambda and name.name == LAMBDA:
                return SuperPoly.variable(ctx, LAMBDA)
            raise self._undeclared(name)

        return Evaluator(lambda c: SuperPoly.constant(ctx, c), resolve)(expr)

    # loops

    def evaluate_series(self, expr: Expr) -> NilLaurent:
        ctx = self.loop_context.ctx

        def resolve(name: Name) -> NilLaurent:
            if name.name == LOOP_PARAMETER:
                return NilLaurent.power_of_t(ctx, 1)
            if name.name in self.variables:
                return NilLaurent.constant(ctx, self.loop_context.var(name.name, 0))
            raise self._undeclared(name)

        return Evaluator(lambda c: NilLaurent.constant(ctx, c), resolve)(expr)

    def _check_parity(self, coordinate: str, values: List[SuperPoly], pos: Position) -> None:
        expected = self.base.var(coordinate).parity
        for value in values:
            if value and (not value.is_homogeneous() or value.parity != expected):
                kind = "odd" if expected else "even"
                raise ScriptParityError(
                    f"{coordinate!r} needs {kind} values, got {value}", *pos
                )

    def _loop(self, decl: LoopDecl) -> LoopPoint:
        coordinates = {}
        for coordinate, expr in decl.coordinates:
            self._coordinate(coordinate, decl.pos)
            if coordinate in coordinates:
                raise BindingError(f"{coordinate!r} is assigned twice", *decl.pos)
            series = self.evaluate_series(expr)
            self._check_parity(coordinate, [c for _, c in series], decl.pos)
            coordinates[coordinate] = series
        return self.loop_context.loop(coordinates)

    # pole families

    def _location(self, expr: Expr, pos: Position) -> Tuple[Fraction, Fraction]:
        ctx = self.pole_context.ctx
        value = self.evaluate_function(expr, ctx, allow_lambda=True)
        lam = ctx.index[LAMBDA]
        shift = slope = Fraction(0)
        for monomial, coeff in value.items():
            if monomial == ():
                shift = coeff
            elif monomial == ((lam, 1),):
                slope = coeff
            else:
                raise ScriptSyntaxError(
                    f"pole locations must be rational numbers plus multiples of {LAMBDA}", *pos
                )
        return shift, slope

    def _poles(self, decl: PolesDecl) -> PoleFamily:
        ctx = self.pole_context.ctx
        spec = []
        for pole in decl.poles:
            residues: Dict[str, SuperPoly] = {}
            for coordinate, expr in pole.residues:
                self._coordinate(coordinate, pole.pos)
                value = self.evaluate_function(expr, ctx)
                self._check_parity(coordinate, [value], pole.pos)
                residues[coordinate] = value
            spec.append((self._location(pole.location, pole.pos), residues))
        return family_from_spec(self.pole_context, spec)

    # matrices

    def _matrix(self, decl: MatrixDecl) -> SuperMatrix:
        rows = [[self.evaluate_function(e, self.base) for e in row] for row in decl.rows]
        try:
            return SuperMatrix.from_rows(self.base, decl.even_dim, decl.odd_dim, rows)
        except ParityError as exc:
            raise ScriptParityError(f"matrix {decl.name!r}: {exc}", *decl.pos) from None
        except ContextError as exc:
            raise ScriptSyntaxError(f"matrix {decl.name!r}: {exc}", *decl.pos) from None

    # lookups used by commands

    def _lookup(self, table: Dict, kind: str, name: str) -> object:
        if name not in table:
            raise BindingError(f"{name!r} is not a declared {kind}")
        return table[name]

    def form(self, name: str) -> SuperPoly:
        return self._lookup(self.form_values, "form", name)  # type: ignore[return-value]

    def loop(self, name: str) -> LoopPoint:
        return self._lookup(self.loops, "loop", name)  # type: ignore[return-value]

    def matrix(self, name: str) -> SuperMatrix:
        return self._lookup(self.matrices, "matrix", name)  # type: ignore[return-value]

    def family(self, name: str) -> PoleFamily:
        return self._lookup(self.pole_families, "pole family", name)  # type: ignore[return-value]

    def subcontext(self, names: List[str]) -> Context:
        """The declared variables ``names`` (all of them when empty), in declaration order."""
        for name in names:
            if name not in self.variables:
                raise BindingError(f"{name!r} is not a declared variable")
        chosen = set(names or self.variables)
        return Context(v for v in self.base.declared if v.name in chosen)

