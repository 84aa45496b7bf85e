"""Rational loops with several simple poles and the additivity check.

A pole family is ``gamma(t) = tail(t) + sum_p r_p / (t - l_p)`` where every
location ``l_p = shift + slope * lambda`` shares the same shift.  Expanding
at each pole in a local coordinate ``u = orientation * (t - l_p)`` gives one
loop per pole; for an additive function the sum of its values over the poles
has no negative powers of ``lambda``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .constants import DEFAULT_NIL_ORDER, EVEN, LAMBDA
from .errors import PoleError, WindowError
from .loops import LoopContext, LoopPoint, NilLaurent, split_by_power
from .radon import LoopFunction, as_loop_function
from .superalg import Context, SuperPoly, VarSpec


@dataclass(frozen=True)
class Pole:
    shift: Fraction
    slope: Fraction
    residue: Mapping[str, SuperPoly]
    orientation: int = 1


def residue_param(letter: str, coordinate: str) -> str:
    return f"{letter}_{coordinate}"


@dataclass(frozen=True)
class PoleFamily:
    context: LoopContext
    poles: Tuple[Pole, ...]
    tail: Mapping[str, Mapping[int, SuperPoly]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        ctx = self.context.ctx
        if LAMBDA not in ctx or not ctx.var(LAMBDA).invertible:
            raise PoleError(f"Pole families need an invertible parameter {LAMBDA!r}")
        if not self.poles:
            raise PoleError("A pole family needs at least one pole")
        if len({p.shift for p in self.poles}) > 1:
            raise PoleError("Pole locations must differ by multiples of lambda")
        if len({p.slope for p in self.poles}) != len(self.poles):
            raise PoleError("Pole locations must be distinct")
        for pole in self.poles:
            if pole.orientation not in (1, -1):
                raise PoleError("Orientation must be +1 or -1")
            for name in pole.residue:
                if name not in self.context.base:
                    raise PoleError(f"{name!r} is not a coordinate")

    @property
    def coordinates(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.context.base.declared)

    def location(self, pole: Pole) -> SuperPoly:
        ctx = self.context.ctx
        return SuperPoly.variable(ctx, LAMBDA, pole.slope) + pole.shift

    def expand(self, index: int, precision: int) -> LoopPoint:
        """Local loop at pole ``index``, known up to ``u^precision``."""
        ctx = self.context.ctx
        pole = self.poles[index]
        sigma = pole.orientation
        location = self.location(pole)

        coordinates = {}
        for name in self.coordinates:
            terms: Dict[int, SuperPoly] = {}

            def add(n: int, value: SuperPoly) -> None:
                terms[n] = terms[n] + value if n in terms else value

            own = pole.residue.get(name)
            if own:
                add(-1, own.scale(sigma))

            # r / (l_p - l_q + sigma u) = sum_k r (-sigma)^k u^k / (l_p - l_q)^(k+1)
            for q, other in enumerate(self.poles):
                r = other.residue.get(name)
                if q == index or not r:
                    continue
                gap = pole.slope - other.slope
                for k in range(precision + 1):
                    factor = Fraction((-sigma) ** k) / gap ** (k + 1)
                    lam = SuperPoly.monomial(ctx, [(LAMBDA, -(k + 1))], factor)
                    add(k, r * lam)

            for n, coeff in self.tail.get(name, {}).items():
                for k in range(min(n, precision) + 1):
                    add(k, coeff * location ** (n - k) * (math.comb(n, k) * sigma**k))

            coordinates[name] = NilLaurent(ctx, terms, precision)
        return self.context.loop(coordinates)


@dataclass
class AdditivityReport:
    precision: int
    per_pole: List[Dict[int, SuperPoly]]
    total: Dict[int, SuperPoly]

    @property
    def negative(self) -> Dict[int, SuperPoly]:
        return {e: c for e, c in self.total.items() if e < 0 and c}

    @property
    def regular(self) -> bool:
        return not self.negative

    def value_at_zero(self, ctx: Context) -> SuperPoly:
        if not self.regular:
            raise PoleError("The family value has poles in lambda")
        return self.total.get(0) or SuperPoly.zero(ctx)


def additivity_check(
    f: object, family: PoleFamily, precision: Optional[int] = None
) -> AdditivityReport:
    function: LoopFunction = as_loop_function(f)
    needed = function.required_high(-1)
    if precision is None:
        precision = needed
    elif precision < needed:
        raise WindowError(f"Expansion precision {precision} is below the required {needed}")

    ctx = family.context.ctx
    per_pole = []
    total = SuperPoly.zero(ctx)
    for index in range(len(family.poles)):
        value = function(family.expand(index, precision))
        per_pole.append(split_by_power(value, LAMBDA))
        total = total + value
    logging.debug(f"additivity over {len(family.poles)} poles at precision {precision}")
    return AdditivityReport(precision, per_pole, split_by_power(total, LAMBDA))


def _residue_params(base: Context, letters: str, nil_order: int) -> List[VarSpec]:
    params = [VarSpec(LAMBDA, EVEN, invertible=True)]
    for letter in letters:
        for v in base.declared:
            params.append(VarSpec(residue_param(letter, v.name), v.parity, nil_cap=nil_order))
    return params


def _symbolic_tail(lctx: LoopContext) -> Dict[str, Dict[int, SuperPoly]]:
    return {v.name: {0: lctx.var(v.name, 0)} for v in lctx.base.declared}


def _residues(lctx: LoopContext, letter: str, sign: int) -> Dict[str, SuperPoly]:
    return {
        v.name: lctx.param(residue_param(letter, v.name)).scale(sign)
        for v in lctx.base.declared
    }


def two_pole_family(base: Context, nil_order: int = DEFAULT_NIL_ORDER) -> PoleFamily:
    """``x + a/t + b/(lambda - t)``, expanded in ``t`` and ``s = lambda - t``."""
    lctx = LoopContext(base, 0, 0, nil_order, params=_residue_params(base, "ab", nil_order))
    poles = (
        Pole(Fraction(0), Fraction(0), _residues(lctx, "a", 1)),
        Pole(Fraction(0), Fraction(1), _residues(lctx, "b", -1), orientation=-1),
    )
    return PoleFamily(lctx, poles, _symbolic_tail(lctx))


def three_pole_family(base: Context, nil_order: int = DEFAULT_NIL_ORDER) -> PoleFamily:
    """``x + a/t + b/(lambda - t) + c/(lambda + t)``."""
    lctx = LoopContext(base, 0, 0, nil_order, params=_residue_params(base, "abc", nil_order))
    poles = (
        Pole(Fraction(0), Fraction(0), _residues(lctx, "a", 1)),
        Pole(Fraction(0), Fraction(1), _residues(lctx, "b", -1), orientation=-1),
        Pole(Fraction(0), Fraction(-1), _residues(lctx, "c", 1)),
    )
    return PoleFamily(lctx, poles, _symbolic_tail(lctx))


def degenerate_family(
    base: Context,
    order: int,
    tail_degree: int = 1,
    nil_order: int = DEFAULT_NIL_ORDER,
) -> Tuple[PoleFamily, LoopPoint]:
    """Split a pole of order ``order`` into simple poles at ``0, -lambda, ...``.

    The family is ``sum_{p>=2} x[-p] / (t (t + lambda) ... (t + (p-1) lambda))
    + sum_{n>=-1} x[n] t^n``; returns it with the loop it specializes to at
    ``lambda = 0``.
    """
    if order < 2:
        raise PoleError("Pole order must be at least 2")
    lctx = LoopContext(
        base, -order, tail_degree, nil_order, params=[VarSpec(LAMBDA, EVEN, invertible=True)]
    )
    ctx = lctx.ctx

    poles = []
    for m in range(order):
        residue: Dict[str, SuperPoly] = {}
        for v in base.declared:
            value = lctx.var(v.name, -1) if m == 0 else SuperPoly.zero(ctx)
            for p in range(max(2, m + 1), order + 1):
                denominator = math.prod(l - m for l in range(p) if l != m)
                lam = SuperPoly.monomial(ctx, [(LAMBDA, -(p - 1))], Fraction(1, denominator))
                value = value + lctx.var(v.name, -p) * lam
            residue[v.name] = value
        poles.append(Pole(Fraction(0), Fraction(-m), residue))

    tail = {
        v.name: {n: lctx.var(v.name, n) for n in range(tail_degree + 1)}
        for v in base.declared
    }
    return PoleFamily(lctx, tuple(poles), tail), lctx.generic_loop(exact=True)


def family_from_spec(
    lctx: LoopContext,
    poles: Sequence[Tuple[Tuple[Fraction, Fraction], Mapping[str, SuperPoly]]],
) -> PoleFamily:
    """Family with the given ``((shift, slope), residues)`` and a symbolic base point."""
    return PoleFamily(
        lctx,
        tuple(Pole(shift, slope, residues) for (shift, slope), residues in poles),
        _symbolic_tail(lctx),
    )
