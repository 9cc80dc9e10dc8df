"""Fixed-length tuples with max and p-power lifts.

For a finite exponent p the lifted value is stored as the exact rational sum
of p-th powers; the 1/p root is irrational in general and is taken only for
display.  Every comparison the package makes between two p-power values is
therefore exact, because the root is strictly monotone on nonnegative
reals.  Inequalities that genuinely mix rooted sums (triangle inequality,
semiadditivity of the lift) are decided by a cascade of exact criteria and,
as a last resort, interval enclosures of width 1e-31 per root; enclosures
too tight to decide are reported as undecided, never passed silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import PairTable, ParseError, decimal_str
from .extension import ElementDomainError, Functor

ROOT_SCALE_DIGITS = 31


@dataclass(frozen=True)
class PNorm:
    """Either the max norm (p is None) or an integer exponent p >= 1."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or isinstance(self.p, bool):
                raise ParseError(f"finite norm exponent must be an integer, got {self.p!r}")
            if self.p < 1:
                raise ParseError(f"finite norm exponent must be >= 1, got {self.p}")

    @property
    def is_max(self) -> bool:
        return self.p is None

    @classmethod
    def max_norm(cls) -> "PNorm":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "PNorm":
        s = text.strip()
        if s == "max":
            return cls(None)
        if s.startswith("p:"):
            body = s[2:]
            if not body.lstrip("+-").isdigit():
                raise ParseError(f"bad norm {text!r}: exponent must be an integer")
            return cls(int(body))
        raise ParseError(f"bad norm {text!r}: expected 'max' or 'p:<k>'")

    def format(self) -> str:
        return "max" if self.is_max else f"p:{self.p}"


def power_lift(fn, coords: Sequence, norm: PNorm) -> Fraction:
    """max of fn over coordinates, or the exact sum of its p-th powers."""
    values = [fn(c) for c in coords]
    for v in values:
        if v < 0:
            raise ValueError(f"power lifts require nonnegative values, got {v}")
    if norm.is_max:
        return max(values)
    return sum((v**norm.p for v in values), Fraction(0))


def power_distance(table: PairTable, s: Sequence[int], t: Sequence[int], norm: PNorm) -> Fraction:
    """Closed form: coordinatewise distances combined by the norm."""
    if len(s) != len(t):
        raise ValueError(f"tuple length mismatch: {len(s)} vs {len(t)}")
    return power_lift(table, list(zip(s, t)), norm)


def fiber_tuples(s: Sequence[int], t: Sequence[int]) -> Iterator[tuple[tuple[int, int], ...]]:
    """The one and only coupling: coordinatewise pairs."""
    if len(s) != len(t):
        raise ValueError(f"tuple length mismatch: {len(s)} vs {len(t)}")
    yield tuple(zip(s, t))


def int_nth_root(m: int, p: int) -> int:
    """floor(m ** (1/p)) for nonnegative integers, exactly."""
    if m < 0:
        raise ValueError("negative radicand")
    if m in (0, 1) or p == 1:
        return m
    x = 1 << ((m.bit_length() + p - 1) // p)
    while True:
        y = ((p - 1) * x + m // x ** (p - 1)) // p
        if y >= x:
            break
        x = y
    while x**p > m:
        x -= 1
    while (x + 1) ** p <= m:
        x += 1
    return x


def nth_root_interval(q: Fraction, p: int, digits: int = ROOT_SCALE_DIGITS) -> tuple[Fraction, Fraction]:
    """An enclosure [lo, hi] of q ** (1/p) with hi - lo <= 10**-digits."""
    if q < 0:
        raise ValueError("negative radicand")
    scale = 10**digits
    m = (q.numerator * scale**p) // q.denominator
    r = int_nth_root(m, p)
    return Fraction(r, scale), Fraction(r + 1, scale)


def rooted_sum_inequality(
    w_vec: Sequence[Fraction],
    u_vec: Sequence[Fraction],
    v_vec: Sequence[Fraction],
    p: int,
) -> bool | None:
    """Decide (sum w^p)^(1/p) <= (sum u^p)^(1/p) + (sum v^p)^(1/p).

    Exact criteria first:
      * W <= U + V in p-power form suffices, since t -> t^(1/p) is
        subadditive on nonnegative reals;
      * a zero side reduces the claim to a plain p-power comparison;
      * componentwise w = u + v with u and v proportional is the exact
        equality case.
    Otherwise interval enclosures decide, or return None when the margin is
    below the enclosure width.
    """
    W = sum((w**p for w in w_vec), Fraction(0))
    U = sum((u**p for u in u_vec), Fraction(0))
    V = sum((v**p for v in v_vec), Fraction(0))
    if W <= U + V:
        return True
    if U == 0:
        return W <= V
    if V == 0:
        return W <= U
    if all(w == u + v for w, u, v in zip(w_vec, u_vec, v_vec)):
        proportional = all(
            u_vec[i] * v_vec[j] == u_vec[j] * v_vec[i]
            for i in range(len(u_vec))
            for j in range(i + 1, len(u_vec))
        )
        if proportional:
            return True
    w_lo, w_hi = nth_root_interval(W, p)
    u_lo, u_hi = nth_root_interval(U, p)
    v_lo, v_hi = nth_root_interval(V, p)
    if w_hi <= u_lo + v_lo:
        return True
    if w_lo > u_hi + v_hi:
        return False
    return None


def root_decimal_str(power_value: Fraction, p: int, digits: int = 10) -> str:
    """Decimal rendering of power_value ** (1/p), truncated to `digits`."""
    if p == 1:
        return decimal_str(power_value, digits)
    scale = 10**digits
    m = (power_value.numerator * scale**p) // power_value.denominator
    r = int_nth_root(m, p)
    return decimal_str(Fraction(r, scale), digits)


class PowerFunctor(Functor):
    """n-tuples of points under a fixed norm; elements are plain int tuples."""

    def __init__(self, n: int, norm: PNorm):
        if n < 1:
            raise ValueError("tuple length must be >= 1")
        self.n = n
        self.norm = norm
        kind = norm.format().replace(":", "")
        self.name = f"power[n={n},{kind}]"

    def validate_element(self, elem, ctx) -> None:
        if not isinstance(elem, tuple) or len(elem) != self.n:
            raise ElementDomainError(f"expected a {self.n}-tuple, got {elem!r}")
        if any(not 0 <= i < ctx.n for i in elem):
            raise ElementDomainError(f"tuple {elem!r} not over a {ctx.n}-point space")

    def embed(self, ctx, i: int) -> tuple[int, ...]:
        return (i,) * self.n

    def apply_map(self, fn, elem, dst_ctx=None):
        return tuple(fn(c) for c in elem)

    def fiber(self, a, b, ctx) -> Iterator:
        return fiber_tuples(a, b)

    def lift(self, fn, elem) -> Fraction:
        return power_lift(fn, elem, self.norm)

    def enumerate_elements(self, ctx, cap: int = 0) -> Iterator[tuple[int, ...]]:
        import itertools

        return itertools.product(range(ctx.n), repeat=self.n)

    def distance(self, ctx, table, a, b):
        from .extension import ExtensionResult

        value = power_distance(table, a, b, self.norm)
        return ExtensionResult(value, tuple(zip(a, b)), 1)

    def ground_form(self, value: Fraction) -> Fraction:
        if self.norm.is_max:
            return value
        return value**self.norm.p

    def is_extension_instance(self) -> bool:
        # The p-power lift of a constant tuple is n * phi(x)^p, so for n >= 2
        # it does not restrict to the identity on embedded points.
        return self.norm.is_max or self.n == 1

    def triangle_check(self, ctx, table, a, b, c, dab, dbc, dac):
        if self.norm.is_max or self.norm.p == 1:
            return dac <= dab + dbc
        u = [table(pr) for pr in zip(a, b)]
        v = [table(pr) for pr in zip(b, c)]
        w = [table(pr) for pr in zip(a, c)]
        return rooted_sum_inequality(w, u, v, self.norm.p)

    def semiadditivity_check(self, phi, psi, elem):
        if self.norm.is_max or self.norm.p == 1:
            return super().semiadditivity_check(phi, psi, elem)
        u = [phi[i] for i in elem]
        v = [psi[i] for i in elem]
        w = [phi[i] + psi[i] for i in elem]
        return rooted_sum_inequality(w, u, v, self.norm.p)

    def parse_element(self, obj, ctx) -> tuple[int, ...]:
        if not isinstance(obj, list) or len(obj) != self.n:
            raise ParseError(f"a tuple element is a JSON array of exactly {self.n} labels")
        return tuple(ctx.index(label) for label in obj)

    def format_element(self, elem, ctx) -> list:
        return [ctx.points[i] for i in elem]

    def format_coupling(self, coupling, ctx) -> list:
        return [[ctx.points[x], ctx.points[y]] for (x, y) in coupling]

    def parse_coupling(self, obj, ctx):
        return tuple((ctx.index(p[0]), ctx.index(p[1])) for p in obj)
