"""Seeded randomized property suites for the algebra kernel and transgression."""

from __future__ import annotations

import collections
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .constants import CHAIN_MAP_SIGN, DEFAULT_SEED, EVEN, ODD
from .forms import FormContext, de_rham_d, homotopy
from .loops import LoopContext, ev_pullback, min_valid, required_high, transgress
from .superalg import Context, Derivation, SuperMatrix, SuperPoly, VarSpec, berezinian


def kernel_context() -> Context:
    return Context(
        [VarSpec(f"x{i}") for i in range(1, 4)] + [VarSpec(f"xi{i}", ODD) for i in range(1, 4)]
    )


def odd_context(size: int = 6) -> Context:
    return Context(VarSpec(f"theta{i}", ODD) for i in range(1, size + 1))


def loop_base() -> Context:
    return Context([VarSpec("x1"), VarSpec("x2"), VarSpec("xi", ODD)])


class RandomSource:
    """Random polynomials, forms, derivations and supermatrices from one seed."""

    def __init__(self, seed: int = DEFAULT_SEED):
        self.random = random.Random(seed)

    def rational(self) -> Fraction:
        return Fraction(self.random.choice((-3, -2, -1, 1, 2, 3)), self.random.randint(1, 3))

    def factors(self, names: Sequence[str], degree: int) -> List[Tuple[str, int]]:
        counts = collections.Counter(self.random.choice(names) for _ in range(degree))
        return list(counts.items())

    def poly(
        self,
        ctx: Context,
        terms: int = 3,
        max_degree: int = 3,
        parity: Optional[int] = None,
        min_degree: int = 0,
        names: Optional[Sequence[str]] = None,
    ) -> SuperPoly:
        """Sum of random terms; with ``parity`` only terms of that parity are kept."""
        names = names or ctx.names
        total = SuperPoly.zero(ctx)
        for _ in range(terms):
            degree = self.random.randint(min_degree, max_degree)
            term = SuperPoly.monomial(ctx, self.factors(names, degree), self.rational())
            if parity is not None and term and term.parity != parity:
                continue
            total = total + term
        return total

    def form(
        self, fctx: FormContext, degree: int, terms: int = 3, max_weight: int = 3
    ) -> SuperPoly:
        """Random form of exact degree ``degree`` and positive weight."""
        base = fctx.base.names
        twins = [fctx.twin_of[name] for name in base]
        total = SuperPoly.zero(fctx)
        for _ in range(terms):
            low = 1 if degree == 0 else 0
            functions = self.factors(base, self.random.randint(low, max(low, max_weight - degree)))
            total = total + SuperPoly.monomial(
                fctx, functions + self.factors(twins, degree), self.rational()
            )
        return total

    def derivation(
        self, ctx: Context, parity: int, terms: int = 2, max_degree: int = 2
    ) -> Derivation:
        action = {}
        for spec in ctx.variables:
            if self.random.random() < 0.5:
                continue
            action[spec.name] = self.poly(
                ctx, terms, max_degree, parity=(spec.parity + parity) % 2
            )
        return Derivation(ctx, parity, action)

    def parity(self) -> int:
        return self.random.choice((EVEN, ODD))

    def supermatrix(self, ctx: Context) -> SuperMatrix:
        """A ``1|2`` matrix with invertible diagonal blocks and odd off-diagonal blocks."""
        def nilpotent() -> SuperPoly:
            return self.poly(ctx, 2, 2, parity=EVEN, min_degree=2)

        def odd() -> SuperPoly:
            return self.poly(ctx, 2, 3, parity=ODD, min_degree=1)

        while True:
            d = [[self.rational() if self.random.random() < 0.8 else Fraction(0) for _ in range(2)]
                 for _ in range(2)]
            if d[0][0] * d[1][1] - d[0][1] * d[1][0]:
                break
        rows = [
            [nilpotent() + self.rational(), odd(), odd()],
            [odd(), nilpotent() + d[0][0], nilpotent() + d[0][1]],
            [odd(), nilpotent() + d[1][0], nilpotent() + d[1][1]],
        ]
        return SuperMatrix.from_rows(ctx, 1, 2, rows)


@dataclass
class PropertyReport:
    name: str
    cases: int
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


Check = Callable[[RandomSource], Optional[str]]


def run_check(name: str, check: Check, source: RandomSource, cases: int) -> PropertyReport:
    report = PropertyReport(name, cases)
    for case in range(cases):
        problem = check(source)
        if problem:
            report.failures.append(f"case {case}: {problem}")
    logging.debug(f"{name}: {len(report.failures)} of {cases} cases failed")
    return report


def check_associativity(source: RandomSource) -> Optional[str]:
    ctx = kernel_context()
    p, q, r = (source.poly(ctx) for _ in range(3))
    if (p * q) * r != p * (q * r):
        return f"({p})({q})({r}) is not associative"
    return None


def check_commutativity(source: RandomSource) -> Optional[str]:
    ctx = kernel_context()
    p = source.poly(ctx, parity=source.parity())
    q = source.poly(ctx, parity=source.parity())
    if not p or not q:
        return None
    sign = -1 if p.parity and q.parity else 1
    if p * q != (q * p).scale(sign):
        return f"({p}) and ({q}) do not super-commute"
    return None


def check_leibniz(source: RandomSource) -> Optional[str]:
    ctx = kernel_context()
    delta = source.derivation(ctx, source.parity())
    p = source.poly(ctx, parity=source.parity())
    q = source.poly(ctx)
    if not p:
        return None
    sign = -1 if delta.parity and p.parity else 1
    if delta(p * q) != delta(p) * q + (p * delta(q)).scale(sign):
        return f"{delta} breaks the Leibniz rule on ({p})({q})"
    return None


def check_jacobi(source: RandomSource) -> Optional[str]:
    ctx = kernel_context()
    a, b, c = (source.derivation(ctx, source.parity()) for _ in range(3))
    sign = -1 if a.parity and b.parity else 1
    left = a.bracket(b.bracket(c))
    right = a.bracket(b).bracket(c) + b.bracket(a.bracket(c)).scale(sign)
    if left != right:
        return "graded Jacobi identity fails"
    p = source.poly(ctx)
    commutator = a(b(p)) - b(a(p)).scale(sign)
    if a.bracket(b)(p) != commutator:
        return "bracket does not act as the commutator"
    return None


def check_d_squared(source: RandomSource) -> Optional[str]:
    fctx = FormContext(kernel_context())
    form = source.form(fctx, source.random.randint(0, 3))
    if de_rham_d(de_rham_d(form)):
        return f"d(d({form})) is not zero"
    return None


def check_homotopy(source: RandomSource) -> Optional[str]:
    fctx = FormContext(kernel_context())
    form = source.form(fctx, source.random.randint(0, 3))
    if de_rham_d(homotopy(form)) + homotopy(de_rham_d(form)) != form:
        return f"dh + hd is not the identity on {form}"
    return None


def check_coefficient_product(source: RandomSource) -> Optional[str]:
    """``(ab)[m] = sum_{i+j=m} a[i] b[j]`` on a generic loop."""
    base = loop_base()
    fctx = FormContext(base)
    a = fctx.lift(source.poly(base, 2, 2))
    b = fctx.lift(source.poly(base, 2, 2))
    loop = LoopContext(base, -1, 2, nil_order=6).generic_loop()
    left = ev_pullback(a, loop).functions
    right = ev_pullback(b, loop).functions
    product = ev_pullback(a * b, loop).functions
    if left.low is None or right.low is None:
        return None
    known = min_valid(product.valid_to, (left * right).valid_to)
    if known is None:
        return None
    for m in range(left.low + right.low, known + 1):
        expected = SuperPoly.zero(loop.ctx)
        for i in left.exponents:
            expected = expected + left.coefficient(i) * right.coefficient(m - i)
        if product.coefficient(m) != expected:
            return f"coefficient {m} of ({a})({b}) breaks the product law"
    return None


def check_berezinian(source: RandomSource) -> Optional[str]:
    ctx = odd_context()
    g, h = source.supermatrix(ctx), source.supermatrix(ctx)
    if berezinian(g @ h) != berezinian(g) * berezinian(h):
        return "Berezinian is not multiplicative"
    return None


def check_chain_map(source: RandomSource) -> Optional[str]:
    fctx = FormContext(loop_base())
    eta = source.form(fctx, source.random.randint(1, 2), terms=2)
    closed = de_rham_d(eta)
    factors = max((sum(e for _, e in m) for m, _ in (eta + closed).items()), default=0)
    high = max(required_high(eta), required_high(closed))
    loop = LoopContext(fctx.base, -1, high, nil_order=factors + 1).generic_loop()
    lhs = transgress(closed, loop)
    rhs = de_rham_d(transgress(eta, loop)).scale(CHAIN_MAP_SIGN)
    if lhs != rhs:
        return f"tau(d eta) differs from d tau(eta) for eta = {eta}"
    return None


KERNEL_CHECKS: Dict[str, Check] = {
    "associativity": check_associativity,
    "commutativity": check_commutativity,
    "leibniz": check_leibniz,
    "jacobi": check_jacobi,
    "d-squared": check_d_squared,
    "homotopy": check_homotopy,
    "coefficient-product": check_coefficient_product,
    "berezinian": check_berezinian,
}


def kernel_suite(seed: int = DEFAULT_SEED, cases: int = 200) -> List[PropertyReport]:
    reports = []
    for name, check in KERNEL_CHECKS.items():
        reports.append(run_check(name, check, RandomSource(seed), cases))
    return reports


def chain_map_suite(seed: int = DEFAULT_SEED, cases: int = 20) -> PropertyReport:
    return run_check("chain-map", check_chain_map, RandomSource(seed), cases)
