"""Weil functor for finite-dimensional local superalgebras.

For a local superalgebra ``o`` with basis ``e_0 = 1, e_1, ...`` and a free
super context ``A``, the Weil algebra ``A^o`` has generators ``x[k]`` of parity
``|x| + |e_k|``.  A polynomial ``f`` expands as ``f(sum_k x[k] e_k) =
sum_k f[k] e_k`` and derivations of ``o`` induce derivations of ``A^o``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from .constants import EVEN, ODD
from .errors import ContextError, StructureError
from .linalg import from_sympy, rank, to_sympy
from .superalg import Context, Derivation, Monomial, Rational, SuperPoly, VarSpec, substitute

ProductTable = Dict[Tuple[int, int], Dict[int, Fraction]]
DerivationMatrix = Dict[int, Dict[int, Fraction]]


class LocalSuperAlgebra:
    def __init__(
        self,
        labels: Sequence[str],
        parities: Sequence[int],
        table: Mapping[Tuple[int, int], Mapping[int, Rational]],
        context: Optional[Context] = None,
        monomials: Sequence[Monomial] = (),
    ):
        self.labels = tuple(labels)
        self.parities = tuple(parities)
        self.table: ProductTable = {
            key: {k: Fraction(c) for k, c in row.items() if c} for key, row in table.items()
        }
        self.context = context
        self.monomials = tuple(monomials)
        self._validate()

    @property
    def dim(self) -> int:
        return len(self.labels)

    def product(self, i: int, j: int) -> Dict[int, Fraction]:
        return self.table.get((i, j), {})

    def _validate(self) -> None:
        n = self.dim
        if n == 0 or self.parities[0] != EVEN:
            raise StructureError("Basis must start with an even unit")
        for i in range(n):
            if self.product(0, i) != {i: 1} or self.product(i, 0) != {i: 1}:
                raise StructureError(f"e_0 is not a unit for {self.labels[i]}")

        for i, j in itertools.product(range(1, n), repeat=2):
            row = self.product(i, j)
            if 0 in row:
                raise StructureError("Maximal ideal is not closed under products")
            for k in row:
                if self.parities[k] != (self.parities[i] + self.parities[j]) % 2:
                    raise StructureError(f"Product e_{i} e_{j} breaks parity")
            sign = -1 if self.parities[i] and self.parities[j] else 1
            swapped = self.product(j, i)
            if {k: sign * c for k, c in row.items()} != swapped:
                raise StructureError(f"Product e_{i} e_{j} is not super-commutative")

        for i, j, k in itertools.product(range(1, n), repeat=3):
            left = self._multiply_vectors(self._multiply_vectors({i: 1}, {j: 1}), {k: 1})
            right = self._multiply_vectors({i: 1}, self._multiply_vectors({j: 1}, {k: 1}))
            if left != right:
                raise StructureError("Product is not associative")

        # the maximal ideal must be nilpotent
        layer = [{i: Fraction(1)} for i in range(1, n)]
        for _ in range(n):
            layer = [
                vec
                for vec in (
                    self._multiply_vectors(v, {j: 1}) for v in layer for j in range(1, n)
                )
                if vec
            ]
            if not layer:
                return
        raise StructureError("Maximal ideal is not nilpotent")

    def _multiply_vectors(
        self, left: Mapping[int, Rational], right: Mapping[int, Rational]
    ) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for i, a in left.items():
            for j, b in right.items():
                for k, c in self.product(i, j).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c}

    @classmethod
    def from_context(cls, ctx: Context) -> LocalSuperAlgebra:
        """The algebra spanned by the monomials of a fully capped context."""
        ranges = []
        for spec in ctx.variables:
            if spec.cap is None:
                raise StructureError(f"{spec.name} must be nilpotent to span a local algebra")
            ranges.append(range(spec.cap))

        monomials = []
        for exponents in itertools.product(*ranges):
            monomials.append(tuple((i, e) for i, e in enumerate(exponents) if e))
        monomials.sort(key=lambda m: (sum(e for _, e in m), m))
        position = {m: k for k, m in enumerate(monomials)}

        table: ProductTable = {}
        for (i, mi), (j, mj) in itertools.product(enumerate(monomials), repeat=2):
            sign, m = ctx.multiply(mi, mj)
            if sign:
                table[(i, j)] = {position[m]: Fraction(sign)}

        labels = [str(SuperPoly(ctx, {m: 1})) for m in monomials]
        parities = [ctx.parity_of(m) for m in monomials]
        return cls(labels, parities, table, context=ctx, monomials=monomials)

    @classmethod
    def exterior(cls, n: int, prefix: str = "eta") -> LocalSuperAlgebra:
        ctx = Context(VarSpec(f"{prefix}{i}", ODD) for i in range(1, n + 1))
        return cls.from_context(ctx)

    @classmethod
    def truncated(cls, order: int, name: str = "s") -> LocalSuperAlgebra:
        """``Q[s] / s^order``."""
        return cls.from_context(Context([VarSpec(name, EVEN, nil_cap=order)]))

    def basis_poly(self, k: int) -> SuperPoly:
        if self.context is None:
            raise StructureError("Algebra has no presenting context")
        return SuperPoly(self.context, {self.monomials[k]: 1})

    def coordinates(self, poly: SuperPoly) -> Dict[int, Fraction]:
        position = {m: k for k, m in enumerate(self.monomials)}
        return {position[m]: c for m, c in poly.items()}

    def derivation_matrix(self, derivation: Derivation) -> DerivationMatrix:
        """``d_i^k`` with ``delta(e_i) = sum_k d_i^k e_k``."""
        matrix: DerivationMatrix = {}
        for i in range(self.dim):
            row = self.coordinates(derivation(self.basis_poly(i)))
            if row:
                matrix[i] = row
        return matrix

    def is_derivation(self, matrix: Mapping[int, Mapping[int, Rational]], parity: int) -> bool:
        def apply(vec: Mapping[int, Rational]) -> Dict[int, Fraction]:
            out: Dict[int, Fraction] = {}
            for i, a in vec.items():
                for k, c in matrix.get(i, {}).items():
                    out[k] = out.get(k, 0) + a * c
            return {k: c for k, c in out.items() if c}

        for i, row in matrix.items():
            for k in row:
                if self.parities[k] != (self.parities[i] + parity) % 2:
                    return False

        for i, j in itertools.product(range(self.dim), repeat=2):
            lhs = apply(self.product(i, j))
            first = self._multiply_vectors(apply({i: 1}), {j: 1})
            second = self._multiply_vectors({i: 1}, apply({j: 1}))
            sign = -1 if parity and self.parities[i] else 1
            rhs = dict(first)
            for k, c in second.items():
                rhs[k] = rhs.get(k, 0) + sign * c
            if lhs != {k: c for k, c in rhs.items() if c}:
                return False
        return True


def weil_name(name: str, k: int) -> str:
    return f"{name}[{k}]"


class WeilContext(Context):
    """Generators ``x[k]`` for every base variable ``x`` and basis element ``e_k``."""

    def __init__(self, base: Context, algebra: LocalSuperAlgebra):
        specs = []
        for k in range(algebra.dim):
            for v in base.declared:
                if v.parity == EVEN and v.cap is not None:
                    raise ContextError(f"Weil expansion needs free generators, {v.name} is capped")
                if v.invertible:
                    raise ContextError(
                        f"Weil expansion needs free generators, {v.name} is invertible"
                    )
                specs.append(
                    VarSpec(
                        weil_name(v.name, k),
                        (v.parity + algebra.parities[k]) % 2,
                        sort_key=(k,) + v.sort_key,
                    )
                )
        super().__init__(specs)
        self.base = base
        self.algebra = algebra

    def generator(self, name: str, k: int) -> SuperPoly:
        return SuperPoly.variable(self, weil_name(name, k))

    def embed(self, poly: SuperPoly) -> SuperPoly:
        """``x -> x[0]``."""
        mapping = {v.name: self.generator(v.name, 0) for v in self.base.declared}
        return substitute(poly, mapping, target=self)


Tensor = List[SuperPoly]


def tensor_multiply(wctx: WeilContext, left: Tensor, right: Tensor) -> Tensor:
    """``(r (x) e_i)(r' (x) e_j) = (-1)^{|e_i||r'|} c_ij^k r r' (x) e_k``."""
    algebra = wctx.algebra
    out = [SuperPoly.zero(wctx) for _ in range(algebra.dim)]
    for i, r in enumerate(left):
        if r.is_zero:
            continue
        for j, r2 in enumerate(right):
            if r2.is_zero:
                continue
            row = algebra.product(i, j)
            if not row:
                continue
            rr = r * (r2.twisted() if algebra.parities[i] else r2)
            for k, c in row.items():
                out[k] = out[k] + rr.scale(c)
    return out


def weil_expand(poly: SuperPoly, wctx: WeilContext) -> Tensor:
    """Components ``f[k]`` of ``f(sum_k x[k] e_k)``."""
    if poly.ctx != wctx.base:
        poly = poly.to_context(wctx.base)
    dim = wctx.algebra.dim
    generators: Dict[int, Tensor] = {}
    for i, spec in enumerate(poly.ctx.variables):
        generators[i] = [wctx.generator(spec.name, k) for k in range(dim)]

    powers: Dict[Tuple[int, int], Tensor] = {}

    def power(i: int, e: int) -> Tensor:
        if (i, e) not in powers:
            if e == 1:
                powers[(i, e)] = generators[i]
            else:
                powers[(i, e)] = tensor_multiply(wctx, power(i, e - 1), generators[i])
        return powers[(i, e)]

    result = [SuperPoly.zero(wctx) for _ in range(dim)]
    for m, c in poly.items():
        term = [SuperPoly.constant(wctx, c)] + [SuperPoly.zero(wctx)] * (dim - 1)
        for i, e in m:
            term = tensor_multiply(wctx, term, power(i, e))
        result = [a + b for a, b in zip(result, term)]
    return result


def induced_derivation(
    wctx: WeilContext, matrix: Mapping[int, Mapping[int, Rational]], parity: int
) -> Derivation:
    """``Delta(a[k]) = sum_i (-1)^{|delta||a[i]|} d_i^k a[i]``."""
    if not wctx.algebra.is_derivation(matrix, parity):
        raise StructureError("Matrix does not define a derivation of the algebra")
    action: Dict[str, SuperPoly] = {}
    for v in wctx.base.declared:
        for k in range(wctx.algebra.dim):
            image = SuperPoly.zero(wctx)
            for i, row in matrix.items():
                c = row.get(k)
                if not c:
                    continue
                source = weil_name(v.name, i)
                sign = -1 if parity and wctx.var(source).parity else 1
                image = image + SuperPoly.variable(wctx, source, sign * Fraction(c))
            if image:
                action[weil_name(v.name, k)] = image
    return Derivation(wctx, parity, action)


def induce(wctx: WeilContext, derivation: Derivation) -> Derivation:
    return induced_derivation(
        wctx, wctx.algebra.derivation_matrix(derivation), derivation.parity
    )


def induced_automorphism(
    wctx: WeilContext, matrix: Mapping[int, Mapping[int, Rational]]
) -> Dict[str, SuperPoly]:
    """Substitution ``a[k] -> sum_i phi_i^k a[i]`` for an even automorphism ``phi``."""
    mapping: Dict[str, SuperPoly] = {}
    for v in wctx.base.declared:
        for k in range(wctx.algebra.dim):
            image = SuperPoly.zero(wctx)
            for i, row in matrix.items():
                if row.get(k):
                    image = image + SuperPoly.variable(wctx, weil_name(v.name, i), Fraction(row[k]))
            mapping[weil_name(v.name, k)] = image
    return mapping


def lie_bracket(a: Derivation, b: Derivation) -> Derivation:
    """Bracket of the group of automorphisms acting on near-points: minus the commutator."""
    return -a.bracket(b)


@dataclass(frozen=True)
class GElement:
    label: str
    derivation: Derivation

    @property
    def parity(self) -> int:
        return self.derivation.parity

    def matrix(self, algebra: LocalSuperAlgebra) -> DerivationMatrix:
        return algebra.derivation_matrix(self.derivation)


N1_LABELS = ("D", "Theta")
SL12_LABELS = ("D1", "D2", "D1*", "D2*", "Theta1", "Theta2", "E", "F")


def der_o_basis(n: int, algebra: Optional[LocalSuperAlgebra] = None) -> List[GElement]:
    """Named basis of the derivations of ``Lambda[eta1, ..., eta_n]`` for ``n`` 1 or 2.

    ``n = 1`` gives ``D = d/d eta`` and the grading ``Theta = eta d/d eta``.
    """
    if n not in (1, 2):
        raise StructureError(f"Derivation bases exist for 1 or 2 odd directions, not {n}")
    algebra = algebra or LocalSuperAlgebra.exterior(n)
    ctx = algebra.context
    if ctx is None or len(ctx) != n or not all(ctx.odd):
        raise StructureError(f"Expected the exterior algebra on {n} odd generators")
    one = SuperPoly.one(ctx)
    if n == 1:
        (name,) = ctx.names
        eta = SuperPoly.variable(ctx, name)
        labels: Sequence[str] = N1_LABELS
        actions: Sequence[Tuple[int, Dict[str, SuperPoly]]] = (
            (ODD, {name: one}),
            (EVEN, {name: eta}),
        )
    else:
        n1, n2 = ctx.names
        eta1, eta2 = SuperPoly.variable(ctx, n1), SuperPoly.variable(ctx, n2)
        labels = SL12_LABELS
        actions = (
            (ODD, {n1: one}),
            (ODD, {n2: one}),
            (ODD, {n2: eta2 * eta1}),
            (ODD, {n1: eta1 * eta2}),
            (EVEN, {n1: eta1}),
            (EVEN, {n2: eta2}),
            (EVEN, {n2: eta1}),
            (EVEN, {n1: eta2}),
        )
    return [
        GElement(label, Derivation(ctx, parity, action))
        for label, (parity, action) in zip(labels, actions)
    ]


def sl12_basis(algebra: Optional[LocalSuperAlgebra] = None) -> List[GElement]:
    """Basis of the derivations of ``Lambda[eta1, eta2]``."""
    return der_o_basis(2, algebra)


def decompose(derivation: Derivation, basis: Sequence[GElement]) -> Dict[str, Fraction]:
    """Coefficients of ``derivation`` in a basis whose members are single signed entries."""
    slots: Dict[Tuple[str, Monomial], Tuple[str, Fraction]] = {}
    for element in basis:
        entries = _entries(element.derivation)
        if len(entries) != 1:
            raise StructureError(f"{element.label} is not a single entry")
        (key, value), = entries.items()
        slots[key] = (element.label, value)

    result: Dict[str, Fraction] = {}
    for key, value in _entries(derivation).items():
        if key not in slots:
            raise StructureError(f"{derivation} is outside the span of the basis")
        label, unit = slots[key]
        result[label] = value / unit
    return result


def _entries(derivation: Derivation) -> Dict[Tuple[str, Monomial], Fraction]:
    entries = {}
    for name in derivation.support:
        for m, c in derivation.image(name).items():
            entries[(name, m)] = c
    return entries


def bracket_table(
    basis: Sequence[GElement],
) -> Dict[Tuple[str, str], Dict[str, Fraction]]:
    table = {}
    for a, b in itertools.combinations_with_replacement(basis, 2):
        table[(a.label, b.label)] = decompose(lie_bracket(a.derivation, b.derivation), basis)
    return table


def defining_matrix(derivation: Derivation, algebra: LocalSuperAlgebra) -> List[List[Fraction]]:
    """Matrix of ``-delta`` on ``o / Q.1`` in the basis ``(eta1 eta2 | eta1, eta2)``.

    Columns are images of basis vectors.
    """
    order = [algebra.dim - 1] + list(range(1, algebra.dim - 1))
    size = len(order)
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for col, k in enumerate(order):
        image = algebra.coordinates(derivation(algebra.basis_poly(k)))
        for row, target in enumerate(order):
            matrix[row][col] = -image.get(target, Fraction(0))
    return matrix


def supertrace(matrix: Sequence[Sequence[Fraction]], even_dim: int) -> Fraction:
    return sum(
        (matrix[i][i] if i < even_dim else -matrix[i][i] for i in range(len(matrix))),
        Fraction(0),
    )


@dataclass
class SL12Report:
    labels: List[str]
    parities: Dict[str, int]
    supertraces: Dict[str, Fraction]
    rank: int
    table: Dict[Tuple[str, str], Dict[str, Fraction]]
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def sl12_structure_check(wctx: Optional[WeilContext] = None) -> SL12Report:
    """Verify that the eight derivations of ``Lambda[eta1, eta2]`` form sl(1|2).

    With ``wctx`` the bracket table is also checked on the induced operators.
    """
    algebra = wctx.algebra if wctx else LocalSuperAlgebra.exterior(2)
    basis = sl12_basis(algebra)
    failures: List[str] = []

    table = bracket_table(basis)
    matrices = {e.label: to_sympy(defining_matrix(e.derivation, algebra)) for e in basis}
    supertraces = {
        e.label: supertrace(defining_matrix(e.derivation, algebra), 1) for e in basis
    }
    for label, value in supertraces.items():
        if value:
            failures.append(f"supertrace of {label} is {value}")

    flattened = {
        r: {c: from_sympy(v) for c, v in enumerate(matrices[e.label]) if v}
        for r, e in enumerate(basis)
    }
    independent = rank(flattened, (len(basis), 9))
    if independent != len(basis):
        failures.append(f"defining matrices span only {independent} dimensions")

    parities = {e.label: e.parity for e in basis}
    for (a, b), coefficients in table.items():
        sign = -1 if parities[a] and parities[b] else 1
        commutator = matrices[a] * matrices[b] - sign * matrices[b] * matrices[a]
        expected = sympy.zeros(3, 3)
        for label, c in coefficients.items():
            expected += matrices[label] * sympy.Rational(c.numerator, c.denominator)
        if commutator != expected:
            failures.append(f"defining representation breaks [{a}, {b}]")

    if wctx is not None:
        failures.extend(induced_bracket_failures(wctx, basis, table))

    logging.debug(f"sl(1|2) check finished with {len(failures)} failures")
    return SL12Report(
        labels=[e.label for e in basis],
        parities=parities,
        supertraces=supertraces,
        rank=independent,
        table=table,
        failures=failures,
    )


def induced_bracket_failures(
    wctx: WeilContext,
    basis: Sequence[GElement],
    table: Mapping[Tuple[str, str], Mapping[str, Fraction]],
) -> List[str]:
    """Compare ``[Delta_a, Delta_b]`` with ``Delta_[a,b]`` on the Weil generators."""
    induced = {e.label: induce(wctx, e.derivation) for e in basis}
    failures = []
    for (a, b), coefficients in table.items():
        expected = Derivation(wctx, (induced[a].parity + induced[b].parity) % 2, {})
        for label, c in coefficients.items():
            expected = expected + induced[label].scale(c)
        if induced[a].bracket(induced[b]) != expected:
            failures.append(f"induced operators break [{a}, {b}]")
    return failures


def swap_matrix(algebra: LocalSuperAlgebra) -> DerivationMatrix:
    """The automorphism ``eta1 <-> eta2`` of ``Lambda[eta1, eta2]``."""
    ctx = algebra.context
    if ctx is None or len(ctx) != 2:
        raise StructureError("Expected the exterior algebra on two odd generators")
    n1, n2 = ctx.names
    swapped = {
        n1: SuperPoly.variable(ctx, n2),
        n2: SuperPoly.variable(ctx, n1),
    }
    return {
        i: algebra.coordinates(substitute(algebra.basis_poly(i), swapped))
        for i in range(algebra.dim)
    }


def forms_identification(wctx: WeilContext, fctx: Context) -> Dict[str, SuperPoly]:
    """``x[0] -> x``, ``x[1] -> -dx`` for even ``x`` and ``xi[1] -> d xi`` for odd ``xi``.

    ``wctx`` must be built on ``Lambda[eta]``; it intertwines ``Delta_D`` with ``d``.
    """
    if wctx.algebra.dim != 2:
        raise StructureError("Expected the exterior algebra on one odd generator")
    mapping = {}
    for v in wctx.base.declared:
        mapping[weil_name(v.name, 0)] = SuperPoly.variable(fctx, v.name)
        twin = SuperPoly.variable(fctx, "d" + v.name)
        mapping[weil_name(v.name, 1)] = -twin if v.parity == EVEN else twin
    return mapping
