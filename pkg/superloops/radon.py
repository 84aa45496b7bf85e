"""Functions on loop spaces: transgressions, the radon transform of closed
2-forms, and the data read off their Taylor expansion in loop coefficients."""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .constants import EVEN
from .errors import ContextError, NotClosedError, WindowError
from .forms import FormContext, is_closed, poincare_homotopy
from .loops import LoopContext, LoopPoint, required_high, transgress
from .superalg import Context, Rational, SuperPoly, VarSpec, substitute

LEFT_PROBE = "<a>"
RIGHT_PROBE = "<b>"


class LoopFunction(abc.ABC):
    """A function on loops, evaluated on any :class:`LoopPoint`."""

    @abc.abstractmethod
    def __call__(self, loop: LoopPoint) -> SuperPoly:
        pass

    def required_high(self, low: int) -> int:
        return 0

    def __sub__(self, other: LoopFunction) -> LoopFunction:
        return Difference(self, other)


class Transgression(LoopFunction):
    def __init__(self, form: SuperPoly):
        if not isinstance(form.ctx, FormContext):
            raise ContextError("Expected a differential form")
        self.form = form

    def __call__(self, loop: LoopPoint) -> SuperPoly:
        return transgress(self.form, loop)

    def required_high(self, low: int) -> int:
        return required_high(self.form, low)


class RadonTransform(Transgression):
    """``tau(h(omega))`` for a closed form ``omega`` and its Euler primitive."""

    def __init__(self, omega: SuperPoly):
        if not isinstance(omega.ctx, FormContext):
            raise ContextError("Expected a differential form")
        if not is_closed(omega):
            raise NotClosedError(f"{omega} is not closed")
        self.omega = omega
        super().__init__(poincare_homotopy(omega))


class ProfileFunction(LoopFunction):
    """``sum_ij omega_ij(x[0]) x_i[-1] x_j[1]`` for a matrix of functions."""

    def __init__(self, omega: Mapping[Tuple[str, str], SuperPoly]):
        self.omega = dict(omega)

    def __call__(self, loop: LoopPoint) -> SuperPoly:
        ctx = loop.ctx
        total = SuperPoly.zero(ctx)
        for (i, j), entry in self.omega.items():
            point = {v: loop.coordinate(v).coefficient(0) for v in entry.ctx.names}
            value = substitute(entry, point, target=ctx)
            left = loop.coordinate(i).coefficient(-1)
            right = loop.coordinate(j).coefficient(1)
            total = total + value * left * right
        return total

    def required_high(self, low: int) -> int:
        return 1


class Difference(LoopFunction):
    def __init__(self, left: LoopFunction, right: LoopFunction):
        self.left = left
        self.right = right

    def __call__(self, loop: LoopPoint) -> SuperPoly:
        return self.left(loop) - self.right(loop)

    def required_high(self, low: int) -> int:
        return max(self.left.required_high(low), self.right.required_high(low))


def as_loop_function(value: object) -> LoopFunction:
    """Loop functions pass through and 1-forms transgress.

    Closed forms of higher degree go through the radon transform.
    """
    if isinstance(value, LoopFunction):
        return value
    if isinstance(value, SuperPoly) and isinstance(value.ctx, FormContext):
        if value.ctx.degree_of(value) == 1:
            return Transgression(value)
        return RadonTransform(value)
    raise ContextError(f"Cannot evaluate {value!r} on loops")


def radon(omega: SuperPoly, loop: LoopPoint) -> SuperPoly:
    return RadonTransform(omega)(loop)


def _coordinates(base: Context) -> Tuple[str, ...]:
    return tuple(v.name for v in base.declared)


def hessian_loop(
    base: Context,
    n: int,
    i: str,
    j: str,
    point: Optional[Sequence[Rational]] = None,
) -> LoopPoint:
    """``x + a e_i t^-n + b e_j t^n`` with probes ``a``, ``b`` squaring to zero."""
    if n == 0:
        raise WindowError("The Hessian is defined for nonzero modes only")
    probes = [
        VarSpec(LEFT_PROBE, base.var(i).parity, nil_cap=2),
        VarSpec(RIGHT_PROBE, base.var(j).parity, nil_cap=2),
    ]
    lctx = LoopContext(base, 0, 0, params=probes)
    names = _coordinates(base)
    if point is not None and len(point) != len(names):
        raise ContextError(f"Base point needs {len(names)} coordinates")

    coordinates = {}
    for k, name in enumerate(names):
        constant = lctx.var(name, 0) if point is None else Fraction(point[k])
        terms: Dict[int, Union[SuperPoly, Fraction]] = {0: constant}
        if name == i:
            terms[-n] = lctx.param(LEFT_PROBE)
        if name == j:
            terms[n] = lctx.param(RIGHT_PROBE)
        coordinates[name] = lctx.series(terms)
    return lctx.loop(coordinates)


def hessian_form(
    f: LoopFunction,
    base: Context,
    n: int,
    i: str,
    j: str,
    point: Optional[Sequence[Rational]] = None,
) -> SuperPoly:
    """``H_ij = dL_b dL_a f(x + a e_i t^-n + b e_j t^n)``, a function on the base."""
    loop = hessian_loop(base, n, i, j, point)
    value = f(loop).derivative(LEFT_PROBE).derivative(RIGHT_PROBE)
    return value.to_context(base)


def hessian_matrix(
    f: LoopFunction,
    base: Context,
    n: int = 1,
    point: Optional[Sequence[Rational]] = None,
) -> Dict[Tuple[str, str], SuperPoly]:
    names = _coordinates(base)
    return {(i, j): hessian_form(f, base, n, i, j, point) for i in names for j in names}


def tangential_form(
    hessian: Mapping[Tuple[str, str], SuperPoly], fctx: FormContext
) -> SuperPoly:
    """``1/2 sum_ik (-1)^{|H_ik| + |x_k|} dx_i dx_k H_ik``; inverts the Hessian of radon."""
    total = SuperPoly.zero(fctx)
    for (i, k), entry in hessian.items():
        d_k = fctx.var(k).parity
        dx_i, dx_k = fctx.twin(i), fctx.twin(k)
        for part in entry.to_context(fctx).split_parity():
            if part.is_zero:
                continue
            sign = -1 if (part.parity + d_k) % 2 else 1
            total = total + dx_i * dx_k * part.scale(Fraction(sign, 2))
    return total


def skew_symmetry_defects(
    hessian: Mapping[Tuple[str, str], SuperPoly], base: Context
) -> Dict[Tuple[str, str], SuperPoly]:
    """``H_ik + (-1)^{|x_i||x_k|} H_ki`` for every pair where it fails to vanish."""
    defects = {}
    for (i, k), entry in hessian.items():
        sign = -1 if base.var(i).parity and base.var(k).parity else 1
        defect = entry + hessian[(k, i)].scale(sign)
        if defect:
            defects[(i, k)] = defect
    return defects


@dataclass
class ScalingReport:
    n: int
    compared: int
    mismatches: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def psi_n_scaling_check(
    f: LoopFunction,
    base: Context,
    n: int,
    point: Optional[Sequence[Rational]] = None,
) -> ScalingReport:
    """Check ``omega^n = n omega^1`` and ``omega^-n = n omega^-1`` entrywise."""
    if n < 1:
        raise WindowError("Scaling is checked for positive n")
    report = ScalingReport(n=n, compared=0)
    for sign in (1, -1):
        unit = hessian_matrix(f, base, sign, point)
        scaled = hessian_matrix(f, base, sign * n, point)
        for key, value in unit.items():
            report.compared += 1
            if scaled[key] != value.scale(n):
                i, j = key
                report.mismatches.append(
                    f"omega^{sign * n}_{i}{j} = {scaled[key]} "
                    f"but {n}*omega^{sign}_{i}{j} = {value.scale(n)}"
                )
    return report


Pattern = Tuple[Tuple[int, str], ...]


@dataclass
class TaylorProfile:
    """Coefficients of ``f`` on ``x[-1] t^-1 + x + x[1] t + x[2] t^2``.

    Coefficients stand to the left of the loop monomial written in mode order.
    """

    coordinates: Tuple[str, ...]
    omega: Dict[Tuple[str, str], SuperPoly] = field(default_factory=dict)
    psi: Dict[Tuple[str, str, str], SuperPoly] = field(default_factory=dict)
    phi: Dict[Tuple[str, str, str, str], SuperPoly] = field(default_factory=dict)
    higher: Dict[Pattern, SuperPoly] = field(default_factory=dict)
    off_weight: Dict[Pattern, SuperPoly] = field(default_factory=dict)

    @property
    def quasihomogeneous(self) -> bool:
        return not self.off_weight

    @property
    def is_zero(self) -> bool:
        tables = (self.omega, self.psi, self.phi, self.higher, self.off_weight)
        return all(not v for table in tables for v in table.values())


def taylor_profile(f: LoopFunction, base: Context) -> TaylorProfile:
    lctx = LoopContext(base, -1, 2)
    loop = lctx.generic_loop(exact=True)
    value = f(loop)
    ctx = loop.ctx
    order = {name: k for k, name in enumerate(_coordinates(base))}

    def mode(index: int) -> Optional[Tuple[str, int]]:
        found = lctx.mode_of(ctx.variables[index].name)
        return found if found and found[1] != 0 else None

    def key(index: int) -> Tuple[int, ...]:
        found = mode(index)
        if found is None:
            return (0, index)
        return (1, found[1], order[found[0]])

    collected: Dict[Pattern, Dict] = {}
    for m, c in value.items():
        pattern: List[Tuple[int, str]] = []
        rest = []
        for index, e in m:
            found = mode(index)
            if found is None:
                rest.append((index, e))
            else:
                pattern.extend([(found[1], found[0])] * e)
        pattern.sort(key=lambda p: (p[0], order[p[1]]))
        sign = ctx.reorder_sign(m, key)
        bucket = collected.setdefault(tuple(pattern), {})
        monomial = tuple(rest)
        bucket[monomial] = bucket.get(monomial, 0) + sign * c

    profile = TaylorProfile(coordinates=_coordinates(base))
    for pattern, terms in collected.items():
        coefficient = SuperPoly(ctx, terms).to_context(base)
        if not coefficient:
            continue
        modes = tuple(n for n, _ in pattern)
        names = tuple(name for _, name in pattern)
        if sum(modes) != 0:
            profile.off_weight[pattern] = coefficient
        elif modes == (-1, 1):
            profile.omega[(names[0], names[1])] = coefficient
        elif modes == (-1, -1, 2):
            profile.psi[(names[0], names[1], names[2])] = coefficient
        elif modes == (-1, -1, 1, 1):
            profile.phi[(names[0], names[1], names[2], names[3])] = coefficient
        else:
            profile.higher[pattern] = coefficient
    return profile


def omega_psi_residuals(
    profile: TaylorProfile, base: Context
) -> Dict[Tuple[str, str, str], SuperPoly]:
    """Left sides of the relations tying psi to derivatives of omega; all vanish for
    additive functions.  For ``j < k``::

        (-1)^{d_i d_k + d_j d_k} d_k omega_ij + (-1)^{d_i d_j} d_j omega_ik
            + (-1)^{d_i d_j + d_i d_k} psi_jki

    and ``d_j omega_ij + psi_jji`` when ``j = k`` is even.
    """
    names = profile.coordinates
    zero = SuperPoly.zero(base)

    def omega(i: str, j: str) -> SuperPoly:
        return profile.omega.get((i, j), zero)

    def psi(i: str, j: str, k: str) -> SuperPoly:
        return profile.psi.get((i, j, k), zero)

    def parity(name: str) -> int:
        return base.var(name).parity

    residuals: Dict[Tuple[str, str, str], SuperPoly] = {}
    for i in names:
        for a, j in enumerate(names):
            for k in names[a:]:
                d_i, d_j, d_k = parity(i), parity(j), parity(k)
                if j == k:
                    if d_j != EVEN:
                        continue
                    value = omega(i, j).derivative(j) + psi(j, j, i)
                else:
                    value = (
                        omega(i, j).derivative(k).scale((-1) ** (d_i * d_k + d_j * d_k))
                        + omega(i, k).derivative(j).scale((-1) ** (d_i * d_j))
                        + psi(j, k, i).scale((-1) ** (d_i * d_j + d_i * d_k))
                    )
                residuals[(i, j, k)] = value
    return residuals


def closedness_coefficient(
    omega: Mapping[Tuple[str, str], SuperPoly], base: Context, i: str, j: str, k: str
) -> SuperPoly:
    """Predicted three-pole coefficient of ``a_i b_j c_k`` at ``lambda^-3``:
    half the cyclic sum whose vanishing is closedness of the profile 2-form."""
    zero = SuperPoly.zero(base)

    def twisted(p: str, q: str) -> SuperPoly:
        return omega.get((p, q), zero).scale((-1) ** base.var(p).parity)

    d_i, d_j, d_k = (base.var(n).parity for n in (i, j, k))
    return (
        twisted(i, j).derivative(k).scale((-1) ** (d_i + d_i * d_k + d_j * d_k))
        + twisted(i, k).derivative(j).scale((-1) ** (1 + d_i + d_i * d_j))
        + twisted(j, k).derivative(i).scale((-1) ** d_j)
    ).scale(Fraction(1, 2))
