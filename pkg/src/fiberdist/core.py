"""Exact rational scalars and finite (pseudo-)metric spaces.

Every distance, mass and intermediate value in this package is a
``fractions.Fraction``, so equalities asserted by the test suites are exact
bit-for-bit comparisons, never tolerance checks.  Floating point shows up
only in the CLI's courtesy decimal renderings.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

_SCALAR_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")

MODES = ("metric", "pseudometric")


class ParseError(ValueError):
    """Malformed input text (scalar strings, element syntax, space files)."""


class SpaceValidationError(ValueError):
    """A candidate distance matrix violates a (pseudo-)metric axiom.

    ``axiom`` names the first violated axiom, ``witness`` holds the indices
    (or labels) exhibiting the violation.
    """

    def __init__(self, axiom: str, witness: tuple, message: str):
        super().__init__(message)
        self.axiom = axiom
        self.witness = witness


def parse_scalar(text: str) -> Fraction:
    """Parse "5", "-3" or "5/2"; decimal points are deliberately rejected."""
    s = text.strip()
    if not _SCALAR_RE.match(s):
        raise ParseError(f"not a rational scalar: {text!r}")
    if "/" in s:
        num, den = s.split("/")
        if int(den) == 0:
            raise ParseError(f"zero denominator: {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def format_scalar(x: Fraction) -> str:
    return str(x)


def decimal_str(x: Fraction, digits: int = 10) -> str:
    """Decimal rendering of an exact rational, rounded to `digits` places."""
    sign = "-" if x < 0 else ""
    x = abs(x)
    scale = 10**digits
    scaled = (x.numerator * scale * 2 + x.denominator) // (2 * x.denominator)
    whole, frac = divmod(scaled, scale)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}." + str(frac).rjust(digits, "0").rstrip("0")


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Labeled points with an exact symmetric distance matrix.

    Instances are built through :func:`validate_space` (or the JSON loader),
    which is the single gate enforcing the axioms for the requested mode.
    """

    points: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    mode: str = "metric"

    @property
    def n(self) -> int:
        return len(self.points)

    def index(self, label: str) -> int:
        try:
            return self.points.index(label)
        except ValueError:
            raise ParseError(f"unknown point label: {label!r}") from None

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    def pair_table(self) -> "PairTable":
        return PairTable(self.dist)

    def permuted(self, perm: Sequence[int]) -> "FiniteMetricSpace":
        """Relabeled copy: new position k holds old point perm[k]."""
        pts = tuple(self.points[p] for p in perm)
        mat = tuple(tuple(self.dist[pi][pj] for pj in perm) for pi in perm)
        return FiniteMetricSpace(pts, mat, self.mode)

    def to_obj(self) -> dict:
        return {
            "points": list(self.points),
            "matrix": [[format_scalar(v) for v in row] for row in self.dist],
            "mode": self.mode,
        }


def validate_space(
    points: Sequence[str],
    matrix: Sequence[Sequence[Fraction]],
    mode: str = "metric",
) -> FiniteMetricSpace:
    """Check the axioms for `mode` and return the space, else raise.

    Axioms are checked in a fixed order (shape, duplicate labels, negative
    entry, nonzero diagonal, asymmetry, separation for metric mode, triangle
    inequality) so the reported violation is deterministic.
    """
    if mode not in MODES:
        raise SpaceValidationError("mode", (mode,), f"unknown mode {mode!r}")
    n = len(points)
    if n == 0:
        raise SpaceValidationError("nonempty", (), "a space needs at least one point")
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise SpaceValidationError(
            "square_matrix", (n,), f"matrix must be {n}x{n} to match the labels"
        )
    seen: dict[str, int] = {}
    for i, label in enumerate(points):
        if not isinstance(label, str) or label == "":
            raise SpaceValidationError("label", (i,), f"bad label at position {i}")
        if label in seen:
            raise SpaceValidationError(
                "duplicate_labels", (seen[label], i), f"duplicate label {label!r}"
            )
        seen[label] = i
    for i in range(n):
        for j in range(n):
            if matrix[i][j] < 0:
                raise SpaceValidationError(
                    "negative_entry", (i, j), f"d({points[i]},{points[j]}) < 0"
                )
    for i in range(n):
        if matrix[i][i] != 0:
            raise SpaceValidationError(
                "nonzero_diagonal", (i,), f"d({points[i]},{points[i]}) != 0"
            )
    for i in range(n):
        for j in range(i + 1, n):
            if matrix[i][j] != matrix[j][i]:
                raise SpaceValidationError(
                    "asymmetric", (i, j), f"d({points[i]},{points[j]}) != d({points[j]},{points[i]})"
                )
    if mode == "metric":
        for i in range(n):
            for j in range(i + 1, n):
                if matrix[i][j] == 0:
                    raise SpaceValidationError(
                        "zero_distance_distinct",
                        (i, j),
                        f"distinct points {points[i]!r}, {points[j]!r} at distance 0 (use pseudometric mode)",
                    )
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if matrix[i][k] > matrix[i][j] + matrix[j][k]:
                    raise SpaceValidationError(
                        "triangle_violation",
                        (i, j, k),
                        f"d({points[i]},{points[k]}) > d({points[i]},{points[j]}) + d({points[j]},{points[k]})",
                    )
    rows = tuple(tuple(row) for row in matrix)
    return FiniteMetricSpace(tuple(points), rows, mode)


def space_from_obj(obj: dict) -> FiniteMetricSpace:
    if not isinstance(obj, dict):
        raise ParseError("space file must be a JSON object")
    for key in ("points", "matrix"):
        if key not in obj:
            raise ParseError(f"space file missing field {key!r}")
    points = obj["points"]
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise ParseError("field 'points' must be a list of strings")
    raw = obj["matrix"]
    if not isinstance(raw, list):
        raise ParseError("field 'matrix' must be a list of rows")
    matrix = []
    for row in raw:
        if not isinstance(row, list):
            raise ParseError("field 'matrix' must be a list of rows")
        matrix.append([parse_scalar(v) if isinstance(v, str) else _reject(v) for v in row])
    mode = obj.get("mode", "metric")
    return validate_space(points, matrix, mode)


def _reject(value) -> Fraction:
    raise ParseError(f"matrix entries must be rational strings, got {value!r}")


def space_from_json(text: str) -> FiniteMetricSpace:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return space_from_obj(obj)


def space_document_from_obj(obj: dict) -> tuple[FiniteMetricSpace, str | None]:
    """A space plus the optional basepoint label word distances need."""
    space = space_from_obj(obj)
    basepoint = obj.get("basepoint")
    if basepoint is not None:
        if not isinstance(basepoint, str):
            raise ParseError("field 'basepoint' must be a point label")
        space.index(basepoint)  # raises ParseError for unknown labels
    return space, basepoint


def canonical_space_json(space: FiniteMetricSpace, basepoint: str | None = None) -> str:
    """Canonical serialization; loading and re-emitting it is byte-identical."""
    obj = space.to_obj()
    if basepoint is not None:
        obj["basepoint"] = basepoint
    return json.dumps(obj, indent=2) + "\n"


@dataclass(frozen=True)
class PointMap:
    """A total map between spaces, stored as target indices per source index."""

    source: FiniteMetricSpace
    target: FiniteMetricSpace
    assignment: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.assignment[i]

    @property
    def is_injective(self) -> bool:
        return len(set(self.assignment)) == len(self.assignment)


def point_map(source: FiniteMetricSpace, target: FiniteMetricSpace, assignment: Sequence[int]) -> PointMap:
    if len(assignment) != source.n:
        raise ValueError("assignment must cover every source point")
    for img in assignment:
        if not 0 <= img < target.n:
            raise ValueError(f"image index {img} out of range for target space")
    return PointMap(source, target, tuple(assignment))


def identity_map(space: FiniteMetricSpace) -> PointMap:
    return PointMap(space, space, tuple(range(space.n)))


@dataclass(frozen=True)
class ProductSpace:
    """The labeled point set X x X with projections, diagonal and swap.

    No metric is put on the product; only functions on it are ever lifted.
    All four structure maps are plain assignment tuples over flat pair
    indices (row-major), mirroring :class:`PointMap`.
    """

    space: FiniteMetricSpace
    pairs: tuple[tuple[int, int], ...]
    labels: tuple[str, ...]
    pr1: tuple[int, ...]
    pr2: tuple[int, ...]
    diagonal: tuple[int, ...]
    swap: tuple[int, ...]

    def pair_index(self, i: int, j: int) -> int:
        return i * self.space.n + j


def product_space(space: FiniteMetricSpace) -> ProductSpace:
    n = space.n
    pairs = tuple((i, j) for i in range(n) for j in range(n))
    labels = tuple(f"({space.points[i]},{space.points[j]})" for (i, j) in pairs)
    pr1 = tuple(i for (i, j) in pairs)
    pr2 = tuple(j for (i, j) in pairs)
    diagonal = tuple(i * n + i for i in range(n))
    swap = tuple(j * n + i for (i, j) in pairs)
    return ProductSpace(space, pairs, labels, pr1, pr2, diagonal, swap)


@dataclass(frozen=True)
class PairTable:
    """A function on X x X with exact rational values, callable on (i, j)."""

    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(tuple(row) for row in self.values))

    @property
    def n(self) -> int:
        return len(self.values)

    def __call__(self, pair: tuple[int, int]) -> Fraction:
        return self.values[pair[0]][pair[1]]

    @classmethod
    def from_space(cls, space: FiniteMetricSpace) -> "PairTable":
        return cls(space.dist)

    @classmethod
    def from_function(cls, n: int, fn: Callable[[int, int], Fraction]) -> "PairTable":
        return cls(tuple(tuple(fn(i, j) for j in range(n)) for i in range(n)))

    def transposed(self) -> "PairTable":
        n = self.n
        return PairTable(tuple(tuple(self.values[j][i] for j in range(n)) for i in range(n)))

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for row in self.values for v in row)

    def is_symmetric(self) -> bool:
        n = self.n
        return all(self.values[i][j] == self.values[j][i] for i in range(n) for j in range(n))

    def has_zero_diagonal(self) -> bool:
        return all(self.values[i][i] == 0 for i in range(self.n))

    def satisfies_triangle(self) -> bool:
        n = self.n
        return all(
            self.values[i][k] <= self.values[i][j] + self.values[j][k]
            for i in range(n)
            for j in range(n)
            for k in range(n)
        )

    def is_pseudometric(self) -> bool:
        return (
            self.is_nonnegative()
            and self.has_zero_diagonal()
            and self.is_symmetric()
            and self.satisfies_triangle()
        )

    def add(self, other: "PairTable") -> "PairTable":
        n = self.n
        return PairTable(
            tuple(tuple(self.values[i][j] + other.values[i][j] for j in range(n)) for i in range(n))
        )

    def scale(self, k: Fraction) -> "PairTable":
        return PairTable(tuple(tuple(v * k for v in row) for row in self.values))


def all_pairs(n: int) -> Iterator[tuple[int, int]]:
    for i in range(n):
        for j in range(n):
            yield (i, j)
