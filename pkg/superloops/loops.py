"""Formal loops with nilpotent polar parts, evaluation pullback and transgression.

A loop is a tuple of Laurent series ``x(t) = sum_n x[n] t^n`` whose coefficients
live in the coefficient algebra of a :class:`LoopContext`.  Series are exact
or known up to ``valid_to``; every operation propagates how far its result is
known, and reading past that raises :class:`WindowError`.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .constants import DEFAULT_NIL_ORDER, DEFAULT_TWIN_CAP
from .errors import ContextError, FormDegreeError, WindowError
from .forms import FormContext
from .superalg import Context, Rational, SuperPoly, VarSpec


def min_valid(*values: Optional[int]) -> Optional[int]:
    known = [v for v in values if v is not None]
    return min(known) if known else None


class NilLaurent:
    """A Laurent series ``sum_n c_n t^n`` with coefficients in a context."""

    __slots__ = ("ctx", "_coefficients", "valid_to")

    def __init__(
        self,
        ctx: Context,
        coefficients: Optional[Mapping[int, SuperPoly]] = None,
        valid_to: Optional[int] = None,
    ):
        self.ctx = ctx
        self.valid_to = valid_to
        self._coefficients: Dict[int, SuperPoly] = {
            n: c
            for n, c in (coefficients or {}).items()
            if c and (valid_to is None or n <= valid_to)
        }

    @classmethod
    def zero(cls, ctx: Context) -> NilLaurent:
        return cls(ctx)

    @classmethod
    def constant(cls, ctx: Context, value: Union[SuperPoly, Rational]) -> NilLaurent:
        if not isinstance(value, SuperPoly):
            value = SuperPoly.constant(ctx, value)
        return cls(ctx, {0: value})

    @classmethod
    def power_of_t(cls, ctx: Context, n: int) -> NilLaurent:
        return cls(ctx, {n: SuperPoly.one(ctx)})

    def __iter__(self) -> Iterator[Tuple[int, SuperPoly]]:
        return iter(sorted(self._coefficients.items()))

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(sorted(self._coefficients))

    @property
    def is_zero(self) -> bool:
        return not self._coefficients

    @property
    def low(self) -> Optional[int]:
        return min(self._coefficients) if self._coefficients else None

    def _floor(self) -> Optional[int]:
        """Lowest exponent that may be nonzero; ``None`` for the exact zero series."""
        if self._coefficients:
            return min(self._coefficients)
        return None if self.valid_to is None else self.valid_to + 1

    def coefficient(self, n: int) -> SuperPoly:
        if self.valid_to is not None and n > self.valid_to:
            raise WindowError(
                f"Coefficient of t^{n} is unknown; series known up to t^{self.valid_to}"
            )
        return self._coefficients.get(n) or SuperPoly.zero(self.ctx)

    def truncated(self, valid_to: int) -> NilLaurent:
        return NilLaurent(self.ctx, self._coefficients, min_valid(self.valid_to, valid_to))

    def map(self, func: Callable[[SuperPoly], SuperPoly]) -> NilLaurent:
        return NilLaurent(
            self.ctx, {n: func(c) for n, c in self._coefficients.items()}, self.valid_to
        )

    def derivative(self) -> NilLaurent:
        valid = None if self.valid_to is None else self.valid_to - 1
        return NilLaurent(
            self.ctx, {n - 1: c.scale(n) for n, c in self._coefficients.items() if n}, valid
        )

    def twisted(self) -> NilLaurent:
        return self.map(SuperPoly.twisted)

    def _coerce(self, other: object) -> Optional[NilLaurent]:
        if isinstance(other, NilLaurent):
            return other
        if isinstance(other, (SuperPoly, int, Fraction)):
            return NilLaurent.constant(self.ctx, other)
        return None

    def __add__(self, other: object) -> NilLaurent:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        valid = min_valid(self.valid_to, rhs.valid_to)
        coefficients = dict(self._coefficients)
        for n, c in rhs._coefficients.items():
            coefficients[n] = coefficients[n] + c if n in coefficients else c
        return NilLaurent(self.ctx, coefficients, valid)

    __radd__ = __add__

    def __neg__(self) -> NilLaurent:
        return self.map(SuperPoly.__neg__)

    def __sub__(self, other: object) -> NilLaurent:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> NilLaurent:
        return (-self) + other

    def __mul__(self, other: object) -> NilLaurent:
        if isinstance(other, (int, Fraction)):
            return self.map(lambda c: c.scale(other))
        if isinstance(other, SuperPoly):
            return self.map(lambda c: c * other)
        if not isinstance(other, NilLaurent):
            return NotImplemented

        if self._floor() is None or other._floor() is None:
            return NilLaurent(self.ctx)
        candidates = []
        if self.valid_to is not None:
            candidates.append(self.valid_to + other._floor())
        if other.valid_to is not None:
            candidates.append(other.valid_to + self._floor())
        valid = min(candidates) if candidates else None

        coefficients: Dict[int, SuperPoly] = {}
        for n1, c1 in self._coefficients.items():
            for n2, c2 in other._coefficients.items():
                n = n1 + n2
                if valid is not None and n > valid:
                    continue
                product = c1 * c2
                if product:
                    coefficients[n] = coefficients[n] + product if n in coefficients else product
        return NilLaurent(self.ctx, coefficients, valid)

    def __rmul__(self, other: object) -> NilLaurent:
        if isinstance(other, (int, Fraction)):
            return self * other
        if isinstance(other, SuperPoly):
            return self.map(lambda c: other * c)
        return NotImplemented

    def __pow__(self, exponent: int) -> NilLaurent:
        if exponent < 0:
            if len(self._coefficients) == 1 and self.valid_to is None:
                (n, c), = self._coefficients.items()
                if c == 1:
                    return NilLaurent.power_of_t(self.ctx, n * exponent)
            raise ContextError("Only powers of t may be inverted")
        result = NilLaurent.constant(self.ctx, 1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NilLaurent):
            return NotImplemented
        return self.valid_to == other.valid_to and self._coefficients == other._coefficients

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        parts = [f"({c})*t^{n}" for n, c in self]
        if self.valid_to is not None:
            parts.append(f"O(t^{self.valid_to + 1})")
        return " + ".join(parts) or "0"

    def __repr__(self) -> str:
        return f"NilLaurent({self})"


@dataclass(frozen=True)
class FormLaurent:
    """``functions + dt_part * dt`` with ``dt`` kept rightmost."""

    functions: NilLaurent
    dt_part: NilLaurent

    @classmethod
    def function(cls, series: NilLaurent) -> FormLaurent:
        return cls(series, NilLaurent.zero(series.ctx))

    def __add__(self, other: FormLaurent) -> FormLaurent:
        return FormLaurent(self.functions + other.functions, self.dt_part + other.dt_part)

    def __mul__(self, other: FormLaurent) -> FormLaurent:
        # (P + Q dt)(R + S dt) = PR + (PS + Q R~) dt
        return FormLaurent(
            self.functions * other.functions,
            self.functions * other.dt_part + self.dt_part * other.functions.twisted(),
        )

    def scale(self, factor: Rational) -> FormLaurent:
        return FormLaurent(self.functions * factor, self.dt_part * factor)


def loop_name(name: str, n: int) -> str:
    """``x`` for the constant coefficient, ``x[n]`` otherwise."""
    return name if n == 0 else f"{name}[{n}]"


class LoopContext:
    """Coefficient algebra for loops in a base context.

    Holds loop coefficients ``x[n]`` for ``low <= n <= high`` (nilpotent of
    order ``nil_order`` for ``n < 0``), extra parameters, and their differentials.
    """

    def __init__(
        self,
        base: Context,
        low: int = -1,
        high: int = 1,
        nil_order: int = DEFAULT_NIL_ORDER,
        params: Sequence[VarSpec] = (),
        twin_cap: int = DEFAULT_TWIN_CAP,
    ):
        if low > 0 or high < 0:
            raise WindowError(f"Loop window [{low}, {high}] must contain 0")
        self.base = base
        self.low = low
        self.high = high
        self.nil_order = nil_order

        specs = []
        self._modes: Dict[str, Tuple[str, int]] = {}
        for j, v in enumerate(base.declared):
            for n in range(low, high + 1):
                if n < 0:
                    cap: Optional[int] = nil_order
                elif n == 0:
                    cap = v.nil_cap
                else:
                    cap = None
                name = loop_name(v.name, n)
                specs.append(VarSpec(name, v.parity, nil_cap=cap, sort_key=(1, n, j)))
                self._modes[name] = (v.name, n)
        for k, p in enumerate(params):
            specs.append(dataclasses.replace(p, sort_key=(0, k) + p.sort_key))

        self.coefficients = FormContext(Context(specs), twin_cap)
        self.params = tuple(p.name for p in params)

    @classmethod
    def for_form(
        cls, form: SuperPoly, low: int = -1, nil_order: int = DEFAULT_NIL_ORDER, **kwargs
    ) -> LoopContext:
        """A window wide enough to transgress ``form`` exactly on generic loops."""
        fctx = form.ctx
        if not isinstance(fctx, FormContext):
            raise ContextError("Expected a differential form")
        return cls(fctx.base, low, required_high(form, low), nil_order, **kwargs)

    @property
    def ctx(self) -> FormContext:
        return self.coefficients

    def mode_of(self, name: str) -> Optional[Tuple[str, int]]:
        """``(coordinate, n)`` for a loop coefficient, ``None`` for parameters."""
        return self._modes.get(name)

    def var(self, coordinate: str, n: int) -> SuperPoly:
        return SuperPoly.variable(self.coefficients, loop_name(coordinate, n))

    def param(self, name: str) -> SuperPoly:
        return SuperPoly.variable(self.coefficients, name)

    def series(
        self, terms: Mapping[int, Union[SuperPoly, Rational]], valid_to: Optional[int] = None
    ) -> NilLaurent:
        ctx = self.coefficients
        coefficients = {
            n: c if isinstance(c, SuperPoly) else SuperPoly.constant(ctx, c)
            for n, c in terms.items()
        }
        return NilLaurent(ctx, coefficients, valid_to)

    def generic_loop(self, exact: bool = False) -> LoopPoint:
        """``x(t) = sum_{low <= n <= high} x[n] t^n``; exact loops are polynomial in t."""
        valid = None if exact else self.high
        coordinates = {
            v.name: self.series(
                {n: self.var(v.name, n) for n in range(self.low, self.high + 1)}, valid
            )
            for v in self.base.declared
        }
        return LoopPoint(self, coordinates)

    def loop(self, coordinates: Mapping[str, NilLaurent]) -> LoopPoint:
        for name in coordinates:
            if name not in self.base:
                raise ContextError(f"{name!r} is not a coordinate")
        return LoopPoint(self, dict(coordinates))


@dataclass(frozen=True)
class LoopPoint:
    context: LoopContext
    coordinates: Mapping[str, NilLaurent]

    @property
    def ctx(self) -> FormContext:
        return self.context.coefficients

    @property
    def valid_to(self) -> Optional[int]:
        return min_valid(*(s.valid_to for s in self.coordinates.values()))

    def coordinate(self, name: str) -> NilLaurent:
        """Series of a coordinate; parameters of the coefficient algebra are constants."""
        if name in self.coordinates:
            return self.coordinates[name]
        if name in self.ctx:
            return NilLaurent.constant(self.ctx, SuperPoly.variable(self.ctx, name))
        raise ContextError(f"Loop does not assign {name!r}")


def required_high(form: SuperPoly, low: int = -1) -> int:
    """Highest coefficient a residue can reach when the lowest mode is ``low``."""
    depth = max(0, -low)
    factors = max((sum(e for _, e in m) for m, _ in form.items()), default=0)
    return max(0, (factors - 1) * depth)


def ev_pullback(form: SuperPoly, loop: LoopPoint) -> FormLaurent:
    """Pull a form back along ``ev: Spec R((t)) -> X``.

    ``x -> x(t)`` and ``dx -> sum_n t^n d(x[n]) + (-1)^{|x|} x'(t) dt``.
    """
    fctx = form.ctx
    if not isinstance(fctx, FormContext):
        raise ContextError("Expected a differential form")
    cctx = loop.ctx

    images: Dict[int, FormLaurent] = {}

    def image(i: int) -> FormLaurent:
        if i not in images:
            name = fctx.variables[i].name
            if name in fctx.base_of:
                series = loop.coordinate(fctx.base_of[name])
                images[i] = FormLaurent(series.map(cctx.d), series.derivative().twisted())
            else:
                images[i] = FormLaurent.function(loop.coordinate(name))
        return images[i]

    powers: Dict[Tuple[int, int], FormLaurent] = {}

    def power(i: int, e: int) -> FormLaurent:
        if (i, e) not in powers:
            powers[(i, e)] = image(i) if e == 1 else power(i, e - 1) * image(i)
        return powers[(i, e)]

    result = FormLaurent.function(NilLaurent.zero(cctx))
    for m, c in form.items():
        if any(e < 0 for _, e in m):
            raise ContextError("Forms with negative powers cannot be pulled back")
        term = FormLaurent.function(NilLaurent.constant(cctx, c))
        for i, e in m:
            term = term * power(i, e)
        result = result + term
    return result


def residue(value: FormLaurent) -> SuperPoly:
    """Coefficient of ``t^-1 dt``."""
    try:
        return value.dt_part.coefficient(-1)
    except WindowError as exc:
        raise WindowError(f"Loop window too narrow for the residue: {exc}") from None


def transgress(form: SuperPoly, loop: LoopPoint) -> SuperPoly:
    """``tau(eta) = Res_t`` of the dt-component of ``ev* eta``; lowers degree by one."""
    fctx = form.ctx
    if not isinstance(fctx, FormContext):
        raise ContextError("Expected a differential form")
    if form and min(fctx.form_degree(m) for m, _ in form.items()) < 1:
        raise FormDegreeError("Transgression needs forms of degree at least 1")
    logging.debug(f"transgressing {len(form)} terms on a loop known up to t^{loop.valid_to}")
    return residue(ev_pullback(form, loop))


def split_by_power(poly: SuperPoly, name: str) -> Dict[int, SuperPoly]:
    """Group terms by the exponent of an even variable and drop that variable."""
    ctx = poly.ctx
    position = ctx.position(name)
    grouped: Dict[int, Dict] = {}
    for m, c in poly.items():
        exponents = dict(m)
        e = exponents.pop(position, 0)
        grouped.setdefault(e, {})[tuple(sorted(exponents.items()))] = c
    return {e: SuperPoly(ctx, terms) for e, terms in sorted(grouped.items())}
