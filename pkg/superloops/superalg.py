"""Exact super-commutative polynomial arithmetic over the rationals.

Polynomials live in a :class:`Context`, an ordered set of even and odd
variables.  Even variables may carry a nilpotency cap (``x^cap = 0``) or be
marked invertible (negative exponents allowed); odd variables always square to
zero.  Monomials are stored in canonical order, evens before odds, as sorted
tuples of ``(index, exponent)`` pairs, and every reordering of odd factors is
accounted for with a Koszul sign.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

from .constants import EVEN, ODD
from .errors import ContextError, NotInvertibleError, ParityError

Rational = Union[int, Fraction]
Monomial = Tuple[Tuple[int, int], ...]

ONE: Monomial = ()


@dataclass(frozen=True)
class VarSpec:
    name: str
    parity: int = EVEN
    nil_cap: Optional[int] = None
    sort_key: Tuple[int, ...] = ()
    invertible: bool = False

    def __post_init__(self) -> None:
        if self.parity not in (EVEN, ODD):
            raise ParityError(f"{self.name}: parity must be 0 or 1, got {self.parity}")
        if self.nil_cap is not None and self.nil_cap < 1:
            raise ContextError(f"{self.name}: nilpotency cap must be positive")
        if self.invertible and (self.parity == ODD or self.nil_cap is not None):
            raise ContextError(f"{self.name}: only uncapped even variables are invertible")

    @property
    def cap(self) -> Optional[int]:
        """Smallest exponent at which the variable vanishes, if any."""
        if self.parity == ODD:
            return 2 if self.nil_cap is None else min(self.nil_cap, 2)
        return self.nil_cap


class Context:
    """An ordered, hashable set of variables.

    Canonical order is (parity, sort key, declaration position).
    """

    def __init__(self, variables: Iterable[VarSpec]):
        declared = tuple(variables)
        seen: Set[str] = set()
        for spec in declared:
            if spec.name in seen:
                raise ContextError(f"Duplicate variable {spec.name!r}")
            seen.add(spec.name)

        order = sorted(
            range(len(declared)),
            key=lambda k: (declared[k].parity, declared[k].sort_key, k),
        )
        self._declared = declared
        self.variables: Tuple[VarSpec, ...] = tuple(declared[k] for k in order)
        self.index: Dict[str, int] = {v.name: i for i, v in enumerate(self.variables)}
        self.odd: Tuple[bool, ...] = tuple(v.parity == ODD for v in self.variables)
        self.caps: Tuple[Optional[int], ...] = tuple(v.cap for v in self.variables)
        self.invertible: Tuple[bool, ...] = tuple(v.invertible for v in self.variables)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Context):
            return NotImplemented
        return self.variables == other.variables

    def __hash__(self) -> int:
        return hash(self.variables)

    def __len__(self) -> int:
        return len(self.variables)

    def __iter__(self) -> Iterator[VarSpec]:
        return iter(self.variables)

    def __contains__(self, name: object) -> bool:
        return name in self.index

    def __repr__(self) -> str:
        return f"Context({', '.join(self.names)})"

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def declared(self) -> Tuple[VarSpec, ...]:
        return self._declared

    def var(self, name: str) -> VarSpec:
        return self.variables[self.position(name)]

    def position(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise ContextError(f"Unknown variable {name!r}") from None

    def extend(self, more: Iterable[VarSpec]) -> Context:
        return Context(self._declared + tuple(more))

    def parity_of(self, monomial: Monomial) -> int:
        return sum(1 for i, _ in monomial if self.odd[i]) % 2

    def monomial_string(self, monomial: Monomial) -> str:
        factors = []
        for i, e in monomial:
            name = self.variables[i].name
            factors.append(name if e == 1 else f"{name}^{e}")
        return "*".join(factors)

    def multiply(self, left: Monomial, right: Monomial) -> Tuple[int, Monomial]:
        """Product of two canonical monomials as ``(sign, monomial)``; sign 0 means zero."""
        if not left:
            return 1, right
        if not right:
            return 1, left

        odd = self.odd
        left_odd = [i for i, _ in left if odd[i]]
        flips = 0
        for i, _ in right:
            if not odd[i]:
                continue
            pos = bisect.bisect_right(left_odd, i)
            if pos and left_odd[pos - 1] == i:
                return 0, ONE
            flips += len(left_odd) - pos

        merged = dict(left)
        for i, e in right:
            merged[i] = merged.get(i, 0) + e

        result = []
        for i in sorted(merged):
            e = merged[i]
            if e == 0:
                continue
            cap = self.caps[i]
            if cap is not None and e >= cap:
                return 0, ONE
            result.append((i, e))

        return (-1 if flips % 2 else 1), tuple(result)

    def normalize(self, factors: Iterable[Tuple[str, int]]) -> Tuple[int, Monomial]:
        """Canonical form of an ordered product of variable powers."""
        sign, monomial = 1, ONE
        for name, exp in factors:
            if exp == 0:
                continue
            i = self.position(name)
            if exp < 0 and not self.invertible[i]:
                raise ContextError(f"Negative power of non-invertible variable {name!r}")
            cap = self.caps[i]
            if cap is not None and exp >= cap:
                return 0, ONE
            s, monomial = self.multiply(monomial, ((i, exp),))
            if s == 0:
                return 0, ONE
            sign *= s
        return sign, monomial

    def reorder_sign(self, monomial: Monomial, key: Callable[[int], Any]) -> int:
        """Sign relating the canonical product to the product ordered by ``key``."""
        odd_keys = [key(i) for i, _ in monomial if self.odd[i]]
        inversions = sum(
            1
            for a, b in itertools.combinations(range(len(odd_keys)), 2)
            if odd_keys[a] > odd_keys[b]
        )
        return -1 if inversions % 2 else 1

    def nilpotency_bound(self, indices: Iterable[int]) -> int:
        return sum((self.caps[i] or 1) - 1 for i in set(indices))


def _as_fraction(value: Rational) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def _term_order(item: Tuple[Monomial, Fraction]) -> Tuple[int, Monomial]:
    monomial = item[0]
    return sum(e for _, e in monomial), monomial


class SuperPoly:
    """A finite sum of rational multiples of canonical monomials."""

    __slots__ = ("ctx", "_terms")

    def __init__(self, ctx: Context, terms: Optional[Mapping[Monomial, Rational]] = None):
        self.ctx = ctx
        self._terms: Dict[Monomial, Fraction] = {}
        if terms:
            for monomial, coeff in terms.items():
                if coeff:
                    self._terms[monomial] = _as_fraction(coeff)

    @classmethod
    def zero(cls, ctx: Context) -> SuperPoly:
        return cls(ctx)

    @classmethod
    def one(cls, ctx: Context) -> SuperPoly:
        return cls(ctx, {ONE: 1})

    @classmethod
    def constant(cls, ctx: Context, value: Rational) -> SuperPoly:
        return cls(ctx, {ONE: value})

    @classmethod
    def variable(cls, ctx: Context, name: str, coeff: Rational = 1) -> SuperPoly:
        return cls.monomial(ctx, [(name, 1)], coeff)

    @classmethod
    def monomial(
        cls, ctx: Context, factors: Iterable[Tuple[str, int]], coeff: Rational = 1
    ) -> SuperPoly:
        sign, monomial = ctx.normalize(factors)
        if sign == 0:
            return cls(ctx)
        return cls(ctx, {monomial: sign * _as_fraction(coeff)})

    # container protocol

    def items(self) -> List[Tuple[Monomial, Fraction]]:
        """Terms in serialization order."""
        return sorted(self._terms.items(), key=_term_order)

    def monomials(self) -> List[Monomial]:
        return [m for m, _ in self.items()]

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, monomial: Monomial) -> Fraction:
        return self._terms.get(monomial, Fraction(0))

    def variables(self) -> Set[str]:
        names = self.ctx.variables
        return {names[i].name for m in self._terms for i, _ in m}

    def degree(self, name: str) -> int:
        """Largest exponent of ``name`` across terms."""
        i = self.ctx.position(name)
        return max((dict(m).get(i, 0) for m in self._terms), default=0)

    # grading

    def is_homogeneous(self) -> bool:
        return len({self.ctx.parity_of(m) for m in self._terms}) <= 1

    @property
    def parity(self) -> Optional[int]:
        """Parity of a homogeneous element, ``None`` for zero."""
        parities = {self.ctx.parity_of(m) for m in self._terms}
        if not parities:
            return None
        if len(parities) > 1:
            raise ParityError(f"{self} is not of homogeneous parity")
        return parities.pop()

    def split_parity(self) -> Tuple[SuperPoly, SuperPoly]:
        even = self.filter(lambda m: self.ctx.parity_of(m) == EVEN)
        odd = self.filter(lambda m: self.ctx.parity_of(m) == ODD)
        return even, odd

    def twisted(self) -> SuperPoly:
        """Image under the parity automorphism: odd part changes sign."""
        parity_of = self.ctx.parity_of
        return SuperPoly(
            self.ctx, {m: -c if parity_of(m) else c for m, c in self._terms.items()}
        )

    def filter(self, predicate: Callable[[Monomial], bool]) -> SuperPoly:
        return SuperPoly(self.ctx, {m: c for m, c in self._terms.items() if predicate(m)})

    # arithmetic

    def _coerce(self, other: Any) -> Optional[SuperPoly]:
        if isinstance(other, SuperPoly):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ContextError("Polynomials belong to different contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return SuperPoly.constant(self.ctx, other)
        return None

    def __add__(self, other: Any) -> SuperPoly:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        terms = dict(self._terms)
        for m, c in rhs._terms.items():
            terms[m] = terms.get(m, 0) + c
        return SuperPoly(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self) -> SuperPoly:
        return SuperPoly(self.ctx, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Any) -> SuperPoly:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: Any) -> SuperPoly:
        return (-self) + other

    def scale(self, factor: Rational) -> SuperPoly:
        factor = _as_fraction(factor)
        return SuperPoly(self.ctx, {m: c * factor for m, c in self._terms.items()})

    def __mul__(self, other: Any) -> SuperPoly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented

        multiply = self.ctx.multiply
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in rhs._terms.items():
                sign, m = multiply(m1, m2)
                if sign:
                    terms[m] = terms.get(m, 0) + sign * c1 * c2
        return SuperPoly(self.ctx, terms)

    def __rmul__(self, other: Any) -> SuperPoly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other: Any) -> SuperPoly:
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / _as_fraction(other))
        if isinstance(other, SuperPoly):
            return self * invert_unit(other)
        return NotImplemented

    def __pow__(self, exponent: int) -> SuperPoly:
        if exponent < 0:
            return invert_unit(self) ** (-exponent)
        result = SuperPoly.one(self.ctx)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SuperPoly):
            return self.ctx == other.ctx and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == SuperPoly.constant(self.ctx, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # calculus

    def derivative(self, name: str) -> SuperPoly:
        """Left partial derivative with respect to ``name``."""
        ctx = self.ctx
        v = ctx.position(name)
        odd = ctx.odd
        terms: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            for pos, (i, e) in enumerate(m):
                if i == v:
                    break
            else:
                continue
            sign = 1
            if odd[v] and sum(1 for j, _ in m[:pos] if odd[j]) % 2:
                sign = -1
            rest = m[:pos] + (((v, e - 1),) if e != 1 else ()) + m[pos + 1 :]
            terms[rest] = terms.get(rest, 0) + sign * e * c
        return SuperPoly(ctx, terms)

    def to_context(self, target: Context) -> SuperPoly:
        """Re-express in another context that contains every variable used."""
        if target is self.ctx or target == self.ctx:
            return SuperPoly(target, self._terms)
        names = self.ctx.variables
        terms: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            sign, monomial = target.normalize((names[i].name, e) for i, e in m)
            if sign:
                terms[monomial] = terms.get(monomial, 0) + sign * c
        return SuperPoly(target, terms)

    # serialization

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: List[str] = []
        for m, c in self.items():
            mono = self.ctx.monomial_string(m)
            magnitude = abs(c)
            if not mono:
                body = str(magnitude)
            elif magnitude == 1:
                body = mono
            else:
                body = f"{magnitude}*{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"SuperPoly({self})"


def coerce(ctx: Context, value: Union[SuperPoly, Rational]) -> SuperPoly:
    if isinstance(value, SuperPoly):
        return value
    return SuperPoly.constant(ctx, value)


class Derivation:
    """A homogeneous derivation, determined by its values on generators.

    Applies as ``delta(p) = sum_v delta(v) * dL_v p``.
    """

    def __init__(self, ctx: Context, parity: int, action: Mapping[str, SuperPoly]):
        self.ctx = ctx
        self.parity = parity
        self._images: Dict[str, SuperPoly] = {}
        for name, image in action.items():
            spec = ctx.var(name)
            if image.is_zero:
                continue
            if image.ctx != ctx:
                image = image.to_context(ctx)
            if not image.is_homogeneous() or image.parity != (spec.parity + parity) % 2:
                raise ParityError(
                    f"Image of {name} has the wrong parity for a derivation of parity {parity}"
                )
            self._images[name] = image

    def image(self, name: str) -> SuperPoly:
        return self._images.get(name) or SuperPoly.zero(self.ctx)

    @property
    def support(self) -> Tuple[str, ...]:
        return tuple(n for n in self.ctx.names if n in self._images)

    @property
    def is_zero(self) -> bool:
        return not self._images

    def __call__(self, poly: SuperPoly) -> SuperPoly:
        result = SuperPoly.zero(self.ctx)
        for name, image in self._images.items():
            partial = poly.derivative(name)
            if partial:
                result = result + image * partial
        return result

    def bracket(self, other: Derivation) -> Derivation:
        """Super commutator ``self o other - (-1)^{|self||other|} other o self``."""
        sign = -1 if self.parity and other.parity else 1
        action = {}
        for name in self.ctx.names:
            value = self(other.image(name)) - other(self.image(name)) * sign
            if value:
                action[name] = value
        return Derivation(self.ctx, (self.parity + other.parity) % 2, action)

    def _combine(self, other: Derivation, factor: int) -> Derivation:
        if self.is_zero:
            return other.scale(factor)
        if other.is_zero:
            return self
        if self.parity != other.parity:
            raise ParityError("Cannot add derivations of different parity")
        action = dict(self._images)
        for name, image in other._images.items():
            action[name] = action.get(name, SuperPoly.zero(self.ctx)) + image * factor
        return Derivation(self.ctx, self.parity, action)

    def __add__(self, other: Derivation) -> Derivation:
        return self._combine(other, 1)

    def __sub__(self, other: Derivation) -> Derivation:
        return self._combine(other, -1)

    def __neg__(self) -> Derivation:
        return self.scale(-1)

    def scale(self, factor: Rational) -> Derivation:
        return Derivation(
            self.ctx, self.parity, {n: p.scale(factor) for n, p in self._images.items()}
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        if self.is_zero and other.is_zero:
            return True
        return self.parity == other.parity and self._images == other._images

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = ", ".join(f"{n} -> {self._images[n]}" for n in self.support)
        return f"Derivation[{self.parity}]({body})"


def invert_unit(poly: SuperPoly) -> SuperPoly:
    """Inverse of a unit ``u * (1 + n)`` with ``u`` a monomial in invertible variables
    and ``n`` nilpotent, via the terminating geometric series."""
    ctx = poly.ctx
    leading = [
        (m, c) for m, c in poly._terms.items() if all(ctx.invertible[i] for i, _ in m)
    ]
    if len(leading) != 1:
        raise NotInvertibleError(f"{poly} is not a unit")

    monomial, coeff = leading[0]
    lead_inverse = SuperPoly(ctx, {tuple((i, -e) for i, e in monomial): 1 / coeff})
    rest = lead_inverse * poly - 1

    nilpotent: Set[int] = set()
    for m in rest._terms:
        capped = [i for i, _ in m if ctx.caps[i] is not None]
        if not capped:
            raise NotInvertibleError(
                f"{poly} is not a unit: {ctx.monomial_string(m)} is not nilpotent"
            )
        nilpotent.update(capped)

    step = -rest
    total = SuperPoly.one(ctx)
    power = SuperPoly.one(ctx)
    for _ in range(ctx.nilpotency_bound(nilpotent)):
        power = power * step
        if power.is_zero:
            break
        total = total + power
    return total * lead_inverse


def substitute(
    poly: SuperPoly,
    mapping: Mapping[str, SuperPoly],
    target: Optional[Context] = None,
) -> SuperPoly:
    """Apply the ring homomorphism sending each variable to its image.

    Unmapped variables go to the same-named variable of ``target``.
    """
    target = target or poly.ctx
    source = poly.ctx.variables
    images: Dict[int, SuperPoly] = {}
    powers: Dict[Tuple[int, int], SuperPoly] = {}

    def image(i: int) -> SuperPoly:
        if i not in images:
            spec = source[i]
            value = mapping.get(spec.name)
            if value is None:
                value = SuperPoly.variable(target, spec.name)
            elif value.ctx != target:
                value = value.to_context(target)
            if value and (not value.is_homogeneous() or value.parity != spec.parity):
                raise ParityError(f"Image of {spec.name} must have parity {spec.parity}")
            images[i] = value
        return images[i]

    def power(i: int, e: int) -> SuperPoly:
        if (i, e) not in powers:
            powers[(i, e)] = image(i) ** e
        return powers[(i, e)]

    result = SuperPoly.zero(target)
    for m, c in poly._terms.items():
        term = SuperPoly.constant(target, c)
        for i, e in m:
            term = term * power(i, e)
            if term.is_zero:
                break
        result = result + term
    return result


def determinant(rows: Sequence[Sequence[SuperPoly]], ctx: Context) -> SuperPoly:
    """Leibniz expansion; entries must be even so that they commute."""
    n = len(rows)
    total = SuperPoly.one(ctx) if n == 0 else SuperPoly.zero(ctx)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        term = SuperPoly.constant(ctx, -1 if inversions % 2 else 1)
        for r, c in enumerate(perm):
            term = term * rows[r][c]
            if term.is_zero:
                break
        total = total + term
    return total


def _minor(rows: Sequence[Sequence[SuperPoly]], r: int, c: int) -> List[List[SuperPoly]]:
    return [[x for j, x in enumerate(row) if j != c] for i, row in enumerate(rows) if i != r]


def _matmul(
    left: Sequence[Sequence[SuperPoly]], right: Sequence[Sequence[SuperPoly]], ctx: Context
) -> List[List[SuperPoly]]:
    inner = len(right)
    cols = len(right[0]) if right else 0
    product = []
    for row in left:
        out = []
        for c in range(cols):
            acc = SuperPoly.zero(ctx)
            for k in range(inner):
                acc = acc + row[k] * right[k][c]
            out.append(acc)
        product.append(out)
    return product


@dataclass(frozen=True)
class SuperMatrix:
    """An (even_dim | odd_dim) square supermatrix with homogeneous block parities."""

    even_dim: int
    odd_dim: int
    entries: Tuple[Tuple[SuperPoly, ...], ...]

    def __post_init__(self) -> None:
        size = self.even_dim + self.odd_dim
        if self.even_dim < 0 or self.odd_dim < 0 or size == 0:
            raise ContextError(f"A supermatrix cannot have format {self.even_dim}|{self.odd_dim}")
        if len(self.entries) != size or any(len(row) != size for row in self.entries):
            raise ContextError(
                f"A {self.even_dim}|{self.odd_dim} matrix needs {size}x{size} entries"
            )
        for r, row in enumerate(self.entries):
            for c, entry in enumerate(row):
                expected = int(r >= self.even_dim) ^ int(c >= self.even_dim)
                if entry and (not entry.is_homogeneous() or entry.parity != expected):
                    kind = "odd" if expected else "even"
                    raise ParityError(f"Entry ({r}, {c}) must be {kind}")

    @classmethod
    def from_rows(
        cls,
        ctx: Context,
        even_dim: int,
        odd_dim: int,
        rows: Sequence[Sequence[Union[SuperPoly, Rational]]],
    ) -> SuperMatrix:
        return cls(even_dim, odd_dim, tuple(tuple(coerce(ctx, x) for x in row) for row in rows))

    @property
    def ctx(self) -> Context:
        return self.entries[0][0].ctx

    def blocks(self) -> Tuple[List[List[SuperPoly]], ...]:
        p = self.even_dim
        rows = [list(row) for row in self.entries]
        a = [row[:p] for row in rows[:p]]
        b = [row[p:] for row in rows[:p]]
        c = [row[:p] for row in rows[p:]]
        d = [row[p:] for row in rows[p:]]
        return a, b, c, d

    def __matmul__(self, other: SuperMatrix) -> SuperMatrix:
        if (self.even_dim, self.odd_dim) != (other.even_dim, other.odd_dim):
            raise ContextError("Supermatrix formats differ")
        product = _matmul(self.entries, other.entries, self.ctx)
        return SuperMatrix(self.even_dim, self.odd_dim, tuple(tuple(r) for r in product))


def berezinian(matrix: SuperMatrix) -> SuperPoly:
    """``det(A - B D^-1 C) * det(D)^-1``."""
    ctx = matrix.ctx
    a, b, c, d = matrix.blocks()

    det_d_inverse = invert_unit(determinant(d, ctx))
    if not a:
        return det_d_inverse
    invert_unit(determinant(a, ctx))

    q = len(d)
    d_inverse = [
        [
            _signed(determinant(_minor(d, col, row), ctx), row + col) * det_d_inverse
            for col in range(q)
        ]
        for row in range(q)
    ]
    correction = _matmul(_matmul(b, d_inverse, ctx), c, ctx)
    schur = [[a[i][j] - correction[i][j] for j in range(len(a))] for i in range(len(a))]
    return determinant(schur, ctx) * det_d_inverse


def _signed(poly: SuperPoly, exponent: int) -> SuperPoly:
    return -poly if exponent % 2 else poly
