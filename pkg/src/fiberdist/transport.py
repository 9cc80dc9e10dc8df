"""Finitely supported probability measures and exact optimal transport.

The Kantorovich distance is solved by successive shortest paths on a small
bipartite network with exact rational arithmetic: no scaling, no epsilons,
no degeneracy pivot rules.  Each augmentation saturates a supply or demand
arc (middle arcs have effectively infinite capacity), so the number of
rounds is at most the total support size.  Shortest paths are found by
Bellman-Ford over a fixed arc order, which keeps witnesses deterministic,
and Johnson-style potentials accumulated along the way provide an exact
dual certificate of optimality.

The independent oracle enumerates every vertex of the transportation
polytope by solving each spanning tree of the support grid, which is
exhaustive for minimizing any linear lift.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .core import PairTable, ParseError, format_scalar, parse_scalar
from .extension import ElementDomainError, Functor

DEFAULT_MAX_VERTEX_CELLS = 20


class UnbalancedMassError(ValueError):
    """Weights do not sum to exactly 1; never silently normalized."""


class FiberCapExceeded(RuntimeError):
    """Support grid too large for exhaustive vertex enumeration."""


class MiddleMarginalError(ValueError):
    """Two plans cannot be glued: the shared marginal differs."""


@dataclass(frozen=True)
class Distribution:
    """Probability measure with rational weights; zero weights are dropped."""

    mass: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        object.__setattr__(self, "mass", tuple(sorted(self.mass)))

    def items(self) -> tuple[tuple[int, Fraction], ...]:
        return self.mass

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.mass)

    def weight(self, i: int) -> Fraction:
        for j, w in self.mass:
            if j == i:
                return w
        return Fraction(0)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.mass)


def distribution(weights: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]]) -> Distribution:
    pairs = weights.items() if isinstance(weights, Mapping) else weights
    mass = []
    total = Fraction(0)
    for i, w in pairs:
        if w < 0:
            raise ValueError(f"negative weight {w} at point {i}")
        if w == 0:
            continue
        mass.append((i, w))
        total += w
    if total != 1:
        raise UnbalancedMassError(f"weights sum to {total}, expected exactly 1")
    if not mass:
        raise UnbalancedMassError("empty distribution")
    return Distribution(tuple(mass))


def point_mass(i: int) -> Distribution:
    return Distribution(((i, Fraction(1)),))


@dataclass(frozen=True)
class TransportPlan:
    """Joint rational weights on index pairs with prescribed marginals."""

    flow: tuple[tuple[tuple[int, int], Fraction], ...]

    def __post_init__(self):
        object.__setattr__(self, "flow", tuple(sorted(self.flow)))

    def items(self) -> tuple[tuple[tuple[int, int], Fraction], ...]:
        return self.flow

    @property
    def support(self) -> tuple[tuple[int, int], ...]:
        return tuple(c for c, _ in self.flow)

    def row_marginal(self) -> Distribution:
        acc: dict[int, Fraction] = {}
        for (i, _j), w in self.flow:
            acc[i] = acc.get(i, Fraction(0)) + w
        return distribution(acc)

    def col_marginal(self) -> Distribution:
        acc: dict[int, Fraction] = {}
        for (_i, j), w in self.flow:
            acc[j] = acc.get(j, Fraction(0)) + w
        return distribution(acc)


def transport_plan(flow: Mapping[tuple[int, int], Fraction] | Iterable) -> TransportPlan:
    pairs = flow.items() if isinstance(flow, Mapping) else flow
    cells = []
    total = Fraction(0)
    for cell, w in pairs:
        if w < 0:
            raise ValueError(f"negative flow {w} on cell {cell}")
        if w == 0:
            continue
        cells.append((tuple(cell), w))
        total += w
    if total != 1:
        raise UnbalancedMassError(f"flow sums to {total}, expected exactly 1")
    return TransportPlan(tuple(cells))


def integrate(fn, measure) -> Fraction:
    """Exact expected value of fn under a distribution or plan."""
    return sum((w * fn(point) for point, w in measure.items()), Fraction(0))


@dataclass(frozen=True)
class KantorovichResult:
    value: Fraction
    plan: TransportPlan
    dual_row: dict[int, Fraction]
    dual_col: dict[int, Fraction]


def dual_certificate(table: PairTable, mu: Distribution, nu: Distribution, plan: TransportPlan):
    """Feasible dual potentials with exact complementary slackness.

    Solves the difference constraints v_j - u_i <= d(i, j), with equality on
    the plan's support, by Bellman-Ford shortest distances; a negative cycle
    would mean the plan is not optimal, which is a solver invariant
    violation and raises.
    """
    rows = mu.support
    cols = nu.support
    support = set(plan.support)
    nodes = [("r", i) for i in rows] + [("c", j) for j in cols]
    dist = {node: Fraction(0) for node in nodes}
    arcs = []
    for i in rows:
        for j in cols:
            arcs.append((("r", i), ("c", j), table((i, j))))
            if (i, j) in support:
                arcs.append((("c", j), ("r", i), -table((i, j))))
    for _ in range(len(nodes) - 1):
        changed = False
        for u, v, w in arcs:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            break
    for u, v, w in arcs:
        if dist[u] + w < dist[v]:
            raise RuntimeError("negative dual cycle: transport plan is not optimal")
    dual_row = {i: dist[("r", i)] for i in rows}
    dual_col = {j: dist[("c", j)] for j in cols}
    return dual_row, dual_col


def kantorovich(table: PairTable, mu: Distribution, nu: Distribution) -> KantorovichResult:
    """Exact optimal transport between mu and nu under the given cost table.

    Returns the optimal value, an optimal plan with support at most
    m + n - 1 (cost-neutral support cycles are cancelled), and feasible dual
    potentials satisfying exact complementary slackness.
    """
    for total in (sum(w for _, w in mu.items()), sum(w for _, w in nu.items())):
        if total != 1:
            raise UnbalancedMassError(f"marginal sums to {total}, expected exactly 1")
    rows = mu.support
    cols = nu.support
    m, n = len(rows), len(cols)
    # Node ids: 0 = source, 1..m supplies, m+1..m+n demands, m+n+1 = sink.
    source, sink = 0, m + n + 1
    big = 1 + sum(w for _, w in mu.items())

    arcs: list[list] = []  # [tail, head, residual, cost]; arc k^1 is k's reverse

    def add_arc(u, v, cap, cost):
        arcs.append([u, v, cap, cost])
        arcs.append([v, u, Fraction(0), -cost])

    for a, (_, w) in enumerate(mu.items()):
        add_arc(source, 1 + a, w, Fraction(0))
    for b, (_, w) in enumerate(nu.items()):
        add_arc(m + 1 + b, sink, w, Fraction(0))
    for a, (i, _) in enumerate(mu.items()):
        for b, (j, _) in enumerate(nu.items()):
            add_arc(1 + a, m + 1 + b, big, table((i, j)))

    node_count = m + n + 2
    remaining = Fraction(1)
    while remaining > 0:
        dist = [None] * node_count
        parent_arc = [-1] * node_count
        dist[source] = Fraction(0)
        for _ in range(node_count - 1):
            changed = False
            for k, (u, v, residual, cost) in enumerate(arcs):
                if residual > 0 and dist[u] is not None:
                    cand = dist[u] + cost
                    if dist[v] is None or cand < dist[v]:
                        dist[v] = cand
                        parent_arc[v] = k
                        changed = True
            if not changed:
                break
        if dist[sink] is None:
            raise RuntimeError("no augmenting path; balanced marginals should prevent this")
        path = []
        v = sink
        while v != source:
            k = parent_arc[v]
            path.append(k)
            v = arcs[k][0]
        push = min(min(arcs[k][2] for k in path), remaining)
        for k in path:
            arcs[k][2] -= push
            arcs[k ^ 1][2] += push
        remaining -= push

    flow: dict[tuple[int, int], Fraction] = {}
    value = Fraction(0)
    for a, (i, _) in enumerate(mu.items()):
        for b, (j, _) in enumerate(nu.items()):
            k = 2 * (m + n) + 2 * (a * n + b)
            pushed = arcs[k ^ 1][2]
            if pushed > 0:
                flow[(i, j)] = pushed
                value += pushed * table((i, j))

    flow = _cancel_support_cycles(flow, table)
    plan = transport_plan(flow)
    assert integrate(table, plan) == value, "plan must re-integrate to the optimal value"
    dual_row, dual_col = dual_certificate(table, mu, nu, plan)
    return KantorovichResult(value, plan, dual_row, dual_col)


def _cancel_support_cycles(flow: dict[tuple[int, int], Fraction], table: PairTable) -> dict:
    """Push mass around cost-neutral support cycles until the support is a
    forest, guaranteeing the basic-solution support bound m + n - 1."""
    while True:
        cycle = _find_support_cycle(flow)
        if cycle is None:
            return flow
        signed = [(cell, 1 if idx % 2 == 0 else -1) for idx, cell in enumerate(cycle)]
        alt_cost = sum(sign * table(cell) for cell, sign in signed)
        if alt_cost != 0:
            raise RuntimeError("support cycle with nonzero alternating cost in an optimal plan")
        delta = min(flow[cell] for cell, sign in signed if sign < 0)
        for cell, sign in signed:
            flow[cell] = flow.get(cell, Fraction(0)) + sign * delta
            if flow[cell] == 0:
                del flow[cell]


def _find_support_cycle(flow: dict[tuple[int, int], Fraction]):
    """A cycle in the bipartite support graph as an even list of cells, each
    consecutive pair (cyclically) sharing a row or a column in alternation,
    or None if the support is a forest.

    Strips degree <= 1 nodes until only the 2-core remains, then walks it.
    """
    adjacency: dict[tuple, set] = {}
    for i, j in flow:
        adjacency.setdefault(("r", i), set()).add((i, j))
        adjacency.setdefault(("c", j), set()).add((i, j))
    queue = [node for node, edges in adjacency.items() if len(edges) <= 1]
    while queue:
        node = queue.pop()
        edges = adjacency.pop(node, set())
        for cell in edges:
            other = ("c", cell[1]) if node[0] == "r" else ("r", cell[0])
            if other in adjacency:
                adjacency[other].discard(cell)
                if len(adjacency[other]) == 1:
                    queue.append(other)
    if not adjacency:
        return None
    # Every remaining node has degree >= 2; walk until a node repeats.
    start = min(adjacency)
    seen_at = {start: 0}
    cells = []
    node, incoming = start, None
    while True:
        cell = min(c for c in adjacency[node] if c != incoming)
        cells.append(cell)
        node = ("c", cell[1]) if node[0] == "r" else ("r", cell[0])
        incoming = cell
        if node in seen_at:
            return cells[seen_at[node] :]
        seen_at[node] = len(cells)


def fiber_vertices(
    mu: Distribution, nu: Distribution, *, max_cells: int = DEFAULT_MAX_VERTEX_CELLS
) -> Iterator[TransportPlan]:
    """All vertices of the transportation polytope of (mu, nu).

    Every spanning tree of the complete bipartite support grid determines a
    unique flow by leaf stripping; the nonnegative ones are exactly the
    basic feasible solutions, i.e. the vertices.  Degenerate vertices arise
    from several trees and are deduplicated.
    """
    rows = mu.support
    cols = nu.support
    m, n = len(rows), len(cols)
    if m * n > max_cells:
        raise FiberCapExceeded(f"{m}x{n} support exceeds the vertex enumeration cap {max_cells}")
    cells = [(a, b) for a in range(m) for b in range(n)]
    need = m + n - 1
    seen = set()
    mu_w = [w for _, w in mu.items()]
    nu_w = [w for _, w in nu.items()]
    for tree in itertools.combinations(cells, need):
        if not _is_spanning_tree(tree, m, n):
            continue
        masses = _solve_tree(tree, mu_w, nu_w, m, n)
        if masses is None:
            continue
        flow = tuple(
            sorted(((rows[a], cols[b]), w) for (a, b), w in zip(tree, masses) if w > 0)
        )
        if flow in seen:
            continue
        seen.add(flow)
        yield TransportPlan(flow)


def _is_spanning_tree(tree, m, n) -> bool:
    parent = list(range(m + n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merged = 0
    for a, b in tree:
        ra, rb = find(a), find(m + b)
        if ra == rb:
            return False
        parent[ra] = rb
        merged += 1
    return merged == m + n - 1


def _solve_tree(tree, mu_w, nu_w, m, n):
    """Unique flow carried by a spanning tree, or None if any mass < 0."""
    need_row = list(mu_w)
    need_col = list(nu_w)
    adj: dict = {("r", a): [] for a in range(m)}
    adj.update({("c", b): [] for b in range(n)})
    for idx, (a, b) in enumerate(tree):
        adj[("r", a)].append((("c", b), idx))
        adj[("c", b)].append((("r", a), idx))
    masses = [None] * len(tree)
    degree = {node: len(edges) for node, edges in adj.items()}
    leaves = [node for node, dcount in degree.items() if dcount == 1]
    removed = [False] * len(tree)
    while leaves:
        node = leaves.pop()
        live = [(other, idx) for other, idx in adj[node] if not removed[idx]]
        if not live:
            continue
        (other, idx) = live[0]
        kind, pos = node
        w = need_row[pos] if kind == "r" else need_col[pos]
        if w < 0:
            return None
        masses[idx] = w
        a, b = tree[idx]
        need_row[a] -= w
        need_col[b] -= w
        removed[idx] = True
        degree[other] -= 1
        if degree[other] == 1:
            leaves.append(other)
    if any(w is None for w in masses) or any(w < 0 for w in masses):
        return None
    return masses


def glue_plans(plan_ab: TransportPlan, plan_bc: TransportPlan) -> TransportPlan:
    """Compose two plans through their shared middle marginal.

    The three-way weights eta1[i,k] * eta2[k,j] / nu[k] are summed over the
    middle index; when the cost table satisfies the triangle inequality the
    glued cost is at most the sum of the two costs.
    """
    middle_out = plan_ab.col_marginal()
    middle_in = plan_bc.row_marginal()
    if middle_out != middle_in:
        raise MiddleMarginalError(
            f"middle marginals differ: {middle_out.mass} vs {middle_in.mass}"
        )
    nu = middle_out.as_dict()
    acc: dict[tuple[int, int], Fraction] = {}
    for (i, k), w1 in plan_ab.items():
        for (k2, j), w2 in plan_bc.items():
            if k2 != k:
                continue
            acc[(i, j)] = acc.get((i, j), Fraction(0)) + w1 * w2 / nu[k]
    return transport_plan(acc)


class TransportFunctor(Functor):
    name = "transport"

    def __init__(self, max_cells: int = DEFAULT_MAX_VERTEX_CELLS, element_cap: int = 4):
        self.max_cells = max_cells
        self.element_cap = element_cap

    def validate_element(self, elem, ctx) -> None:
        if not isinstance(elem, Distribution):
            raise ElementDomainError(f"expected a Distribution, got {elem!r}")
        if any(not 0 <= i < ctx.n for i in elem.support):
            raise ElementDomainError(f"distribution {elem!r} not over a {ctx.n}-point space")

    def embed(self, ctx, i: int) -> Distribution:
        return point_mass(i)

    def apply_map(self, fn, elem, dst_ctx=None):
        acc: dict = {}
        for point, w in elem.items():
            image = fn(point)
            acc[image] = acc.get(image, Fraction(0)) + w
        return distribution(acc)

    def swap_coupling(self, coupling: TransportPlan, ctx) -> TransportPlan:
        return TransportPlan(tuple(((j, i), w) for (i, j), w in coupling.items()))

    def diagonal_coupling(self, elem: Distribution, ctx) -> TransportPlan:
        return TransportPlan(tuple(((i, i), w) for i, w in elem.items()))

    def fiber(self, a, b, ctx) -> Iterator[TransportPlan]:
        return fiber_vertices(a, b, max_cells=self.max_cells)

    def lift(self, fn, elem) -> Fraction:
        return integrate(fn, elem)

    def enumerate_elements(self, ctx, cap: int = 0) -> Iterator[Distribution]:
        """All distributions whose weights share a denominator <= cap."""
        cap = cap or self.element_cap
        n = ctx.n
        seen = set()
        for q in range(1, cap + 1):
            for parts in _compositions(q, n):
                d = distribution({i: Fraction(k, q) for i, k in enumerate(parts) if k})
                if d not in seen:
                    seen.add(d)
                    yield d

    def distance(self, ctx, table, a, b):
        from .extension import ExtensionResult

        result = kantorovich(table, a, b)
        return ExtensionResult(result.value, result.plan, 1)

    def parse_element(self, obj, ctx) -> Distribution:
        if not isinstance(obj, dict) or not obj:
            raise ParseError("a distribution element is a JSON object of label -> rational mass")
        return distribution({ctx.index(k): parse_scalar(v) for k, v in obj.items()})

    def format_element(self, elem: Distribution, ctx) -> dict:
        return {ctx.points[i]: format_scalar(w) for i, w in elem.items()}

    def format_coupling(self, coupling: TransportPlan, ctx) -> list:
        return [[ctx.points[i], ctx.points[j], format_scalar(w)] for (i, j), w in coupling.items()]

    def parse_coupling(self, obj, ctx) -> TransportPlan:
        return transport_plan(
            {(ctx.index(row[0]), ctx.index(row[1])): parse_scalar(row[2]) for row in obj}
        )


def _compositions(total: int, bins: int) -> Iterator[tuple[int, ...]]:
    if bins == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, bins - 1):
            yield (first,) + rest
