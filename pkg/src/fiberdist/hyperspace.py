"""Nonempty subsets with the sup lift and the Hausdorff distance.

Couplings over a pair of subsets (A, B) are restricted to subsets of A x B
with full projections.  This loses nothing: intersecting any coupling with
A x B keeps both projections intact and can only shrink the sup of a
nonnegative table, so the minimum over the restricted fiber equals the
minimum over all couplings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .core import PairTable, ParseError
from .extension import ElementDomainError, Functor

DEFAULT_MAX_CELLS = 16


class FiberCapExceeded(RuntimeError):
    """|A| * |B| is too large for exhaustive coupling enumeration."""


@dataclass(frozen=True)
class Subset:
    members: tuple[int, ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("subsets must be nonempty")
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class SubsetCoupling:
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("couplings must be nonempty")
        object.__setattr__(self, "pairs", tuple(sorted(set(self.pairs))))


def sup_lift(fn, members: Iterable) -> Fraction:
    """Finite sup of fn over a nonempty collection of points or pairs."""
    return max(fn(m) for m in members)


def hausdorff(table: PairTable, a: Subset, b: Subset) -> Fraction:
    """Two-sided max-min evaluation of the envelope definition."""
    forward = max(min(table((x, y)) for y in b.members) for x in a.members)
    backward = max(min(table((x, y)) for x in a.members) for y in b.members)
    return max(forward, backward)


def optimal_coupling(table: PairTable, a: Subset, b: Subset) -> SubsetCoupling:
    """Pairs (x, y) where y is nearest to x in B or x is nearest to y in A.

    Always a valid coupling, and its sup equals the Hausdorff distance.
    """
    near_b = {x: min(table((x, y)) for y in b.members) for x in a.members}
    near_a = {y: min(table((x, y)) for x in a.members) for y in b.members}
    pairs = tuple(
        (x, y)
        for x in a.members
        for y in b.members
        if table((x, y)) == near_b[x] or table((x, y)) == near_a[y]
    )
    return SubsetCoupling(pairs)


def fiber_subsets(a: Subset, b: Subset, *, max_cells: int = DEFAULT_MAX_CELLS) -> Iterator[SubsetCoupling]:
    """Every subset of A x B whose projections are exactly A and B.

    Exhaustive, so it contains a minimizer of any lift.  Enumeration order
    (ascending bitmask over the row-major cell grid) is deterministic.
    """
    cells = [(x, y) for x in a.members for y in b.members]
    k = len(cells)
    if k > max_cells:
        raise FiberCapExceeded(f"{k} cells exceed the enumeration cap {max_cells}")
    na, nb = len(a.members), len(b.members)
    row_of = {x: r for r, x in enumerate(a.members)}
    col_of = {y: c for c, y in enumerate(b.members)}
    full_rows = (1 << na) - 1
    full_cols = (1 << nb) - 1
    for mask in range(1, 1 << k):
        rows = cols = 0
        m = mask
        while m:
            low = m & -m
            idx = low.bit_length() - 1
            x, y = cells[idx]
            rows |= 1 << row_of[x]
            cols |= 1 << col_of[y]
            m ^= low
        if rows == full_rows and cols == full_cols:
            yield SubsetCoupling(tuple(cells[i] for i in range(k) if mask >> i & 1))


class HyperspaceFunctor(Functor):
    name = "hyperspace"

    def __init__(self, max_cells: int = DEFAULT_MAX_CELLS):
        self.max_cells = max_cells

    def validate_element(self, elem, ctx) -> None:
        if not isinstance(elem, Subset):
            raise ElementDomainError(f"expected a Subset, got {elem!r}")
        if any(not 0 <= i < ctx.n for i in elem.members):
            raise ElementDomainError(f"subset {elem!r} not over a {ctx.n}-point space")

    def embed(self, ctx, i: int) -> Subset:
        return Subset((i,))

    def apply_map(self, fn, elem, dst_ctx=None):
        if isinstance(elem, SubsetCoupling):
            return Subset(tuple(fn(p) for p in elem.pairs))
        return Subset(tuple(fn(i) for i in elem.members))

    def swap_coupling(self, coupling, ctx):
        return SubsetCoupling(tuple((y, x) for (x, y) in coupling.pairs))

    def diagonal_coupling(self, elem, ctx):
        return SubsetCoupling(tuple((i, i) for i in elem.members))

    def fiber(self, a, b, ctx) -> Iterator[SubsetCoupling]:
        return fiber_subsets(a, b, max_cells=self.max_cells)

    def lift(self, fn, elem) -> Fraction:
        members = elem.pairs if isinstance(elem, SubsetCoupling) else elem.members
        return sup_lift(fn, members)

    def enumerate_elements(self, ctx, cap: int = 0) -> Iterator[Subset]:
        n = ctx.n
        for mask in range(1, 1 << n):
            yield Subset(tuple(i for i in range(n) if mask >> i & 1))

    def distance(self, ctx, table, a, b):
        from .extension import ExtensionResult

        value = hausdorff(table, a, b)
        witness = optimal_coupling(table, a, b)
        return ExtensionResult(value, witness, 1)

    def parse_element(self, obj, ctx) -> Subset:
        if not isinstance(obj, list) or not obj:
            raise ParseError("a subset element is a nonempty JSON array of labels")
        return Subset(tuple(ctx.index(label) for label in obj))

    def format_element(self, elem: Subset, ctx) -> list:
        return [ctx.points[i] for i in elem.members]

    def format_coupling(self, coupling: SubsetCoupling, ctx) -> list:
        return [[ctx.points[x], ctx.points[y]] for (x, y) in coupling.pairs]

    def parse_coupling(self, obj, ctx) -> SubsetCoupling:
        return SubsetCoupling(tuple((ctx.index(p[0]), ctx.index(p[1])) for p in obj))
