"""Finite slices of the double de Rham complex and their exactness reports.

The complex is realized as the Weil algebra of ``A`` for ``Lambda[eta1, eta2]``:
``x[1]``, ``x[2]`` and ``x[3]`` carry bidegrees ``(1, 0)``, ``(0, 1)`` and
``(1, 1)``.  Every induced operator preserves the weight (total exponent), so a
slice is a collection of slots ``(i, j, weight)``.  Truncation is by internal
degree, the degree in the ``x[0]`` variables, and only slots that truncation
leaves complete are built.
"""

from __future__ import annotations

import collections
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from .constants import DEFAULT_INTERNAL_CAP, DEFAULT_MAX_BASIS_SIZE
from .errors import BasisSizeError, StructureError
from .linalg import SparseRows, matrices_equal, rank, stack, to_domain
from .superalg import Context, Derivation, Monomial, SuperPoly, substitute
from .weil import (
    LocalSuperAlgebra,
    WeilContext,
    induce,
    induced_automorphism,
    sl12_basis,
    swap_matrix,
    weil_name,
)

Bidegree = Tuple[int, int]
Slot = Tuple[int, int, int]

SHIFTS: Dict[str, Bidegree] = {
    "D1": (1, 0),
    "D2": (0, 1),
    "D1*": (-1, 0),
    "D2*": (0, -1),
    "Theta1": (0, 0),
    "Theta2": (0, 0),
    "E": (-1, 1),
    "F": (1, -1),
}

MODE_BIDEGREES: Tuple[Bidegree, ...] = ((0, 0), (1, 0), (0, 1), (1, 1))


def _monomials(ctx: Context, indices: Sequence[int], degree: int) -> Iterator[Dict[int, int]]:
    for combo in itertools.combinations_with_replacement(indices, degree):
        counts = collections.Counter(combo)
        if any(ctx.odd[i] and e > 1 for i, e in counts.items()):
            continue
        yield dict(counts)


class BigradedSlice:
    """Slots ``(i, j, weight)`` for the requested bidegrees, complete up to ``cap``.

    A slot is complete when ``weight - max(i, j) <= cap``: no monomial of that
    bidegree and weight has internal degree above the cap.
    """

    def __init__(
        self,
        base: Context,
        bidegrees: Iterable[Bidegree],
        cap: int = DEFAULT_INTERNAL_CAP,
        max_basis_size: int = DEFAULT_MAX_BASIS_SIZE,
    ):
        self.base = base
        self.cap = cap
        self.bidegrees = tuple(sorted(set(bidegrees)))
        self.wctx = WeilContext(base, LocalSuperAlgebra.exterior(2))
        self.operators: Dict[str, Derivation] = {
            e.label: induce(self.wctx, e.derivation) for e in sl12_basis(self.wctx.algebra)
        }
        self.bases: Dict[Slot, Tuple[Monomial, ...]] = {}
        for bidegree in self.bidegrees:
            self._enumerate(bidegree, max_basis_size)
        self._positions = {
            slot: {m: k for k, m in enumerate(basis)} for slot, basis in self.bases.items()
        }
        self._matrices: Dict[Tuple[str, Slot], SparseRows] = {}

    def _enumerate(self, bidegree: Bidegree, max_basis_size: int) -> None:
        i, j = bidegree
        if i < 0 or j < 0:
            raise StructureError(f"Bidegree {bidegree} is negative")
        ctx = self.wctx
        modes = [
            [ctx.position(weil_name(v.name, k)) for v in self.base.declared] for k in range(4)
        ]
        found: Dict[int, List[Monomial]] = collections.defaultdict(list)
        count = 0
        for n3 in range(min(i, j) + 1):
            for c3, c1, c2 in itertools.product(
                _monomials(ctx, modes[3], n3),
                _monomials(ctx, modes[1], i - n3),
                _monomials(ctx, modes[2], j - n3),
            ):
                for degree in range(self.cap - min(i, j) + n3 + 1):
                    for c0 in _monomials(ctx, modes[0], degree):
                        exponents = {**c0, **c1, **c2, **c3}
                        found[degree + i + j - n3].append(tuple(sorted(exponents.items())))
                        count += 1
                        if count > max_basis_size:
                            raise BasisSizeError(
                                f"Bidegree {bidegree} exceeds {max_basis_size} basis monomials"
                            )
        for weight in range(self.max_weight(i, j) + 1):
            self.bases[(i, j, weight)] = tuple(sorted(found.get(weight, ())))
        logging.debug(f"bidegree {bidegree}: {count} monomials")

    def max_weight(self, i: int, j: int) -> int:
        return self.cap + max(i, j)

    def has(self, slot: Slot) -> bool:
        return slot in self.bases

    def weights(self, i: int, j: int) -> List[int]:
        return [w for (a, b, w) in self.bases if (a, b) == (i, j)]

    def basis(self, i: int, j: int) -> List[Monomial]:
        return [m for w in self.weights(i, j) for m in self.bases[(i, j, w)]]

    def dim(self, slot: Slot) -> int:
        return len(self.bases.get(slot, ()))

    def dimensions(self) -> Dict[Bidegree, int]:
        return {(i, j): len(self.basis(i, j)) for i, j in self.bidegrees}

    def poly(self, monomial: Monomial) -> SuperPoly:
        return SuperPoly(self.wctx, {monomial: 1})

    def target(self, label: str, slot: Slot) -> Slot:
        di, dj = SHIFTS[label]
        return slot[0] + di, slot[1] + dj, slot[2]

    def maps(self, label: str, slot: Slot) -> bool:
        """Whether the matrix of ``label`` out of ``slot`` is exact in this slice."""
        target = self.target(label, slot)
        return self.has(slot) and (self.has(target) or target[0] < 0 or target[1] < 0)

    def matrix(self, label: str, slot: Slot) -> SparseRows:
        """Sparse rows of ``label`` from ``slot``; columns are images of basis monomials."""
        key = (label, slot)
        if key in self._matrices:
            return self._matrices[key]
        if not self.maps(label, slot):
            raise StructureError(f"{label} from {slot} leaves the slice")
        target = self.target(label, slot)
        rows: SparseRows = {}
        if self.has(target):
            positions = self._positions[target]
            operator = self.operators[label]
            for col, monomial in enumerate(self.bases[slot]):
                for m, c in operator(self.poly(monomial)).items():
                    if m not in positions:
                        raise StructureError(f"{label} maps {slot} outside its target slot")
                    rows.setdefault(positions[m], {})[col] = c
        self._matrices[key] = rows
        return rows

    def shape(self, label: str, slot: Slot) -> Tuple[int, int]:
        return self.dim(self.target(label, slot)), self.dim(slot)

    def domain_matrix(self, label: str, slot: Slot) -> DomainMatrix:
        return to_domain(self.matrix(label, slot), self.shape(label, slot))

    def rank(self, labels: Sequence[str], slot: Slot) -> int:
        """Rank of the operators ``labels`` stacked on top of each other."""
        rows, height = stack(
            [(self.matrix(label, slot), self.shape(label, slot)[0]) for label in labels]
        )
        return rank(rows, (height, self.dim(slot)))

    def kernel(self, labels: Sequence[str], slot: Slot) -> int:
        return self.dim(slot) - self.rank(labels, slot)

    def to_json(self, labels: Sequence[str] = ()) -> Dict[str, object]:
        data: Dict[str, object] = {
            "cap": self.cap,
            "dimensions": {f"{i},{j}": n for (i, j), n in self.dimensions().items()},
            "bases": {
                f"{i},{j}": [self.wctx.monomial_string(m) or "1" for m in self.basis(i, j)]
                for i, j in self.bidegrees
            },
        }
        matrices = {}
        for label in labels:
            for slot in self.bases:
                if self.maps(label, slot) and self.dim(slot):
                    rows = self.matrix(label, slot)
                    matrices[f"{label}@{slot[0]},{slot[1]},{slot[2]}"] = {
                        str(r): {str(c): str(v) for c, v in cols.items()}
                        for r, cols in rows.items()
                    }
        if labels:
            data["matrices"] = matrices
        return data


def build_bigraded_slice(
    base: Context,
    rows: int,
    columns: Optional[int] = None,
    cap: int = DEFAULT_INTERNAL_CAP,
    max_basis_size: int = DEFAULT_MAX_BASIS_SIZE,
) -> BigradedSlice:
    """Slice over all bidegrees ``(i, j)`` with ``i <= columns`` and ``j <= rows``."""
    columns = rows if columns is None else columns
    bidegrees = itertools.product(range(columns + 1), range(rows + 1))
    return BigradedSlice(base, bidegrees, cap, max_basis_size)


@dataclass
class PositionReport:
    position: int
    kernel: int
    image: int
    weights: Tuple[int, ...]
    verifiable: bool

    @property
    def defect(self) -> int:
        return self.kernel - self.image


@dataclass
class ExactnessReport:
    differential: str
    fixed: int
    positions: List[PositionReport]
    homotopy_failures: List[str] = field(default_factory=list)

    def expected_defect(self, position: int) -> int:
        return 1 if self.fixed == 0 and position == 0 else 0

    @property
    def failures(self) -> List[str]:
        failures = [
            f"{self.differential} defect {p.defect} at position {p.position}"
            for p in self.positions
            if p.verifiable and p.defect != self.expected_defect(p.position)
        ]
        return failures + self.homotopy_failures

    @property
    def passed(self) -> bool:
        return not self.failures


def _slot(differential: str, fixed: int, position: int, weight: int) -> Slot:
    if differential == "D1":
        return position, fixed, weight
    return fixed, position, weight


def exactness_report(
    piece: BigradedSlice, fixed: int, differential: str = "D1", homotopy: bool = True
) -> ExactnessReport:
    """Cohomology of row ``fixed`` under ``D1``, or of column ``fixed`` under ``D2``.

    Each position only counts weights whose source, middle and target slots are
    complete; positions whose target bidegree is outside the slice are marked
    unverifiable.
    """
    if differential not in ("D1", "D2"):
        raise StructureError(f"Unknown differential {differential!r}")
    axis = 0 if differential == "D1" else 1
    positions = sorted({b[axis] for b in piece.bidegrees if b[1 - axis] == fixed})

    reports = []
    for position in positions:
        kernel = image = 0
        weights = []
        i, j, _ = _slot(differential, fixed, position, 0)
        for weight in range(piece.max_weight(i, j) + 1):
            here = _slot(differential, fixed, position, weight)
            before = _slot(differential, fixed, position - 1, weight)
            if not piece.maps(differential, here):
                continue
            if position > 0 and not piece.maps(differential, before):
                continue
            kernel += piece.kernel([differential], here)
            if position > 0:
                image += piece.rank([differential], before)
            weights.append(weight)
        after = _slot(differential, fixed, position + 1, 0)
        verifiable = (after[0], after[1]) in piece.bidegrees
        reports.append(PositionReport(position, kernel, image, tuple(weights), verifiable))

    report = ExactnessReport(differential, fixed, reports)
    if homotopy:
        report.homotopy_failures = homotopy_failures(piece, fixed, differential)
    return report


def homotopy_failures(piece: BigradedSlice, fixed: int, differential: str = "D1") -> List[str]:
    """Check ``D D* + D* D`` against the grading of the fixed index on every slot."""
    adjoint = differential + "*"
    failures = []
    for slot in piece.bases:
        if slot[1 if differential == "D1" else 0] != fixed or not piece.dim(slot):
            continue
        if not (piece.maps(differential, slot) and piece.maps(adjoint, slot)):
            continue
        up = piece.target(differential, slot)
        down = piece.target(adjoint, slot)

        n = piece.dim(slot)
        expected = to_domain({r: {r: Fraction(fixed)} for r in range(n)}, (n, n))
        total = to_domain({}, (n, n))
        if piece.dim(up):
            total = total + piece.domain_matrix(adjoint, up).matmul(
                piece.domain_matrix(differential, slot)
            )
        if piece.dim(down):
            total = total + piece.domain_matrix(differential, down).matmul(
                piece.domain_matrix(adjoint, slot)
            )
        if not matrices_equal(total, expected):
            failures.append(f"[{differential}, {adjoint}] is not {fixed} on slot {slot}")
    return failures


def grading_failures(piece: BigradedSlice) -> List[str]:
    """``Theta1`` and ``Theta2`` must act as ``i`` and ``j`` on slot ``(i, j, w)``."""
    failures = []
    for slot, basis in piece.bases.items():
        for label, value in (("Theta1", slot[0]), ("Theta2", slot[1])):
            operator = piece.operators[label]
            for monomial in basis:
                poly = piece.poly(monomial)
                if operator(poly) != poly.scale(value):
                    failures.append(f"{label} is not {value} on {slot}")
                    break
    return failures


def swap_failures(piece: BigradedSlice) -> List[str]:
    """The swap ``eta1 <-> eta2`` must conjugate ``D1`` into ``D2``."""
    wctx = piece.wctx
    mapping = induced_automorphism(wctx, swap_matrix(wctx.algebra))
    first, second = piece.operators["D1"], piece.operators["D2"]
    failures = []
    for slot, basis in piece.bases.items():
        for monomial in basis:
            poly = piece.poly(monomial)
            if substitute(first(poly), mapping) != second(substitute(poly, mapping)):
                failures.append(f"swap does not conjugate D1 into D2 on {slot}")
                break
    return failures


@dataclass
class TruncationReport:
    p: int
    cap: int
    depth: int
    left: Dict[Tuple[int, int], int]
    right: Dict[Tuple[int, int], int]
    flagged: List[Tuple[int, int]]

    @property
    def mismatches(self) -> List[Tuple[int, int]]:
        return sorted(k for k in self.left if k in self.right and self.left[k] != self.right[k])

    @property
    def passed(self) -> bool:
        return not self.mismatches


def truncation_cohomology_compare(
    base: Context,
    p: int,
    cap: int = DEFAULT_INTERNAL_CAP,
    depth: int = 3,
    max_basis_size: int = DEFAULT_MAX_BASIS_SIZE,
) -> TruncationReport:
    """Compare closed ``p``-forms under ``D2`` with the truncated de Rham complex.

    The left complex has ``L^q = ker D1`` on ``V^{p,q}`` with differential
    ``D2``.  The right complex is ``ker d -> Omega^p -> Omega^{p+1} -> ...``
    placed in degrees ``0, 1, 2, ...``.  Dimensions are keyed by
    ``(degree, weight)``.
    """
    if p < 1:
        raise StructureError("The truncation degree must be positive")
    bidegrees = [(p, q) for q in range(depth + 1)]
    bidegrees += [(p + 1, q) for q in range(depth + 1)]
    bidegrees += [(p + k, 0) for k in range(depth + 1)]
    piece = BigradedSlice(base, bidegrees, cap, max_basis_size)

    def closed_pair(q: int, w: int) -> bool:
        return piece.maps("D1", (p, q, w)) and piece.maps("D2", (p, q, w))

    def left(q: int, w: int) -> Optional[int]:
        if not closed_pair(q, w) or (q > 0 and not closed_pair(q - 1, w)):
            return None
        both = piece.rank(["D1", "D2"], (p, q, w))
        kernel = piece.dim((p, q, w)) - both
        image = 0
        if q > 0:
            image = piece.rank(["D1", "D2"], (p, q - 1, w)) - piece.rank(["D1"], (p, q - 1, w))
        return kernel - image

    def right(k: int, w: int) -> Optional[int]:
        if k < 2:
            # ker d includes into Omega^p and is the kernel of the next map
            return 0 if piece.maps("D1", (p, 0, w)) else None
        here, before = (p + k - 1, 0, w), (p + k - 2, 0, w)
        if not (piece.maps("D1", here) and piece.maps("D1", before)):
            return None
        return piece.kernel(["D1"], here) - piece.rank(["D1"], before)

    left_dims: Dict[Tuple[int, int], int] = {}
    right_dims: Dict[Tuple[int, int], int] = {}
    flagged = []
    for q in range(depth):
        for w in range(cap + p + depth + 1):
            a, b = left(q, w), right(q, w)
            if a is not None:
                left_dims[(q, w)] = a
            if b is not None:
                right_dims[(q, w)] = b
            if a is None or b is None:
                flagged.append((q, w))
    logging.debug(f"truncation compare p={p}: {len(flagged)} slots flagged")
    return TruncationReport(p, cap, depth, left_dims, right_dims, flagged)
