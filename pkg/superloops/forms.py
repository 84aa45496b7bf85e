from __future__ import annotations

import dataclasses
from collections import defaultdict
from fractions import Fraction
from typing import Dict

from .constants import DEFAULT_TWIN_CAP, EVEN, ODD
from .errors import ContextError, FormDegreeError, NotClosedError, WindowError
from .superalg import Context, Derivation, Monomial, SuperPoly, VarSpec


class FormContext(Context):
    """Differential forms on a super context.

    Every base variable ``v`` gets a twin ``dv`` of opposite parity.  Twins of
    even variables are odd, so they square to zero; twins of odd variables are
    even and are truncated at ``twin_cap``.
    """

    def __init__(self, base: Context, twin_cap: int = DEFAULT_TWIN_CAP, prefix: str = "d"):
        specs = [dataclasses.replace(v, sort_key=(0,) + v.sort_key) for v in base.declared]
        twins: Dict[str, str] = {}
        for v in base.declared:
            twin = prefix + v.name
            if twin in base:
                raise ContextError(f"Twin name {twin!r} clashes with a base variable")
            specs.append(
                VarSpec(
                    twin,
                    ODD if v.parity == EVEN else EVEN,
                    nil_cap=twin_cap if v.parity == ODD else None,
                    sort_key=(1,) + v.sort_key,
                )
            )
            twins[v.name] = twin

        super().__init__(specs)
        self.base = base
        self.twin_cap = twin_cap
        self.twin_of = twins
        self.base_of = {t: b for b, t in twins.items()}
        self._twin_positions = frozenset(self.index[t] for t in twins.values())

        self.d = Derivation(
            self, ODD, {b: SuperPoly.variable(self, t) for b, t in twins.items()}
        )
        # dv -> v, v -> 0
        self.contraction = Derivation(
            self, ODD, {t: SuperPoly.variable(self, b) for b, t in twins.items()}
        )

    def lift(self, poly: SuperPoly) -> SuperPoly:
        return poly.to_context(self)

    def twin(self, name: str) -> SuperPoly:
        return SuperPoly.variable(self, self.twin_of[name])

    def form_degree(self, monomial: Monomial) -> int:
        return sum(e for i, e in monomial if i in self._twin_positions)

    @staticmethod
    def weight(monomial: Monomial) -> int:
        return sum(e for _, e in monomial)

    def components(self, form: SuperPoly) -> Dict[int, SuperPoly]:
        grouped: Dict[int, Dict[Monomial, Fraction]] = defaultdict(dict)
        for m, c in form.items():
            grouped[self.form_degree(m)][m] = c
        return {k: SuperPoly(self, terms) for k, terms in sorted(grouped.items())}

    def degree_of(self, form: SuperPoly) -> int:
        """Form degree of a homogeneous form."""
        degrees = {self.form_degree(m) for m, _ in form.items()}
        if len(degrees) > 1:
            raise FormDegreeError(f"{form} mixes form degrees {sorted(degrees)}")
        return degrees.pop() if degrees else 0


def _form_context(form: SuperPoly) -> FormContext:
    if not isinstance(form.ctx, FormContext):
        raise ContextError("Expected a differential form")
    return form.ctx


def de_rham_d(form: SuperPoly) -> SuperPoly:
    return _form_context(form).d(form)


def is_closed(form: SuperPoly) -> bool:
    return de_rham_d(form).is_zero


def homotopy(form: SuperPoly) -> SuperPoly:
    """Euler homotopy ``h = i_E / weight``; ``dh + hd`` is the identity on positive weight."""
    ctx = _form_context(form)
    by_weight: Dict[int, Dict[Monomial, Fraction]] = defaultdict(dict)
    for m, c in form.items():
        by_weight[ctx.weight(m)][m] = c

    result = SuperPoly.zero(ctx)
    for weight, terms in by_weight.items():
        if weight == 0:
            continue
        result = result + ctx.contraction(SuperPoly(ctx, terms)).scale(Fraction(1, weight))
    return result


def poincare_homotopy(form: SuperPoly) -> SuperPoly:
    """A primitive of a closed form of positive degree."""
    ctx = _form_context(form)
    if form.is_zero:
        return form
    if ctx.degree_of(form) < 1:
        raise FormDegreeError("Primitives exist only for forms of positive degree")
    if not is_closed(form):
        raise NotClosedError(f"{form} is not closed")
    primitive = homotopy(form)
    if de_rham_d(primitive) != form:
        raise WindowError(f"d of the primitive misses part of {form}; raise the twin cap")
    return primitive
