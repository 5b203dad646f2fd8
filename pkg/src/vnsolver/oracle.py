"""Exact Hamiltonian-cycle decision used to label corpora."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .graph import Graph, is_connected

DEFAULT_BUDGET = 10**8
BRUTE_FORCE_MAX_N = 10


class OracleUndecided(RuntimeError):
    """The search exhausted its node-expansion budget without an answer."""

    def __init__(self, budget: int):
        super().__init__(f"Hamiltonicity undecided after {budget} node expansions")
        self.budget = budget


@dataclass(frozen=True)
class OracleResult:
    hamiltonian: bool
    witness: tuple[int, ...] | None
    nodes_expanded: int


def verify_cycle(g: Graph, cycle) -> bool:
    """True iff ``cycle`` visits every node once and consecutive nodes
    (wrapping around) are adjacent."""
    cycle = list(cycle)
    if g.n < 3 or len(cycle) != g.n or sorted(cycle) != list(range(g.n)):
        return False
    return all(g.has_edge(cycle[i], cycle[(i + 1) % g.n]) for i in range(g.n))


def articulation_points(g: Graph) -> set[int]:
    """Cut vertices via iterative Hopcroft-Tarjan low-link DFS."""
    n = g.n
    disc = [-1] * n
    low = [0] * n
    points: set[int] = set()
    t = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = t
        t += 1
        root_children = 0
        stack = [(root, -1, iter(g.adj[root]))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for u in it:
                if disc[u] == -1:
                    disc[u] = low[u] = t
                    t += 1
                    if v == root:
                        root_children += 1
                    stack.append((u, v, iter(g.adj[u])))
                    advanced = True
                    break
                if u != parent:
                    low[v] = min(low[v], disc[u])
            if advanced:
                continue
            stack.pop()
            if parent != -1:
                low[parent] = min(low[parent], low[v])
                if parent != root and low[v] >= disc[parent]:
                    points.add(parent)
        if root_children > 1:
            points.add(root)
    return points


def necessary_condition_check(g: Graph) -> bool | None:
    """Return ``False`` when ``g`` is certainly not Hamiltonian, else ``None``.

    Checks: fewer than 3 nodes, a node of degree < 2, disconnection, and the
    presence of an articulation point.
    """
    if g.n < 3:
        return False
    if min(len(nb) for nb in g.adj) < 2:
        return False
    if not is_connected(g):
        return False
    if articulation_points(g):
        return False
    return None


def brute_force_hamiltonian(g: Graph) -> bool:
    """Enumerate cyclic orders with node 0 fixed first. Only for ``n <= 10``."""
    if g.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {g.n}")
    n = g.n
    if n < 3:
        return False
    adj = [set(nb) for nb in g.adj]
    for perm in itertools.permutations(range(1, n)):
        prev = 0
        ok = True
        for v in perm:
            if v not in adj[prev]:
                ok = False
                break
            prev = v
        if ok and 0 in adj[prev]:
            return True
    return False


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _reachable(masks, start: int, allowed: int) -> int:
    """Bitmask of nodes reachable from ``start`` inside ``allowed``."""
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= masks[low.bit_length() - 1]
            f ^= low
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def is_hamiltonian(g: Graph, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Decide Hamiltonicity exactly by pruned backtracking from node 0.

    Raises :class:`OracleUndecided` when more than ``budget`` partial paths
    would have to be expanded.
    """
    if necessary_condition_check(g) is False:
        return OracleResult(False, None, 0)

    n = g.n
    masks = g.masks
    full = (1 << n) - 1
    deg = [len(nb) for nb in g.adj]
    start_mask = masks[0]
    path = [0]
    expanded = 0

    def dead_end(end: int, unvisited: int) -> bool:
        # the cycle must be able to close back to node 0
        if not start_mask & unvisited:
            return True
        avail = unvisited | (1 << end) | 1
        u = unvisited
        while u:
            low = u & -u
            v = low.bit_length() - 1
            if _popcount(masks[v] & avail) < 2:
                return True
            u ^= low
        reach = _reachable(masks, end, unvisited | (1 << end))
        return reach & unvisited != unvisited

    def extend(end: int, unvisited: int) -> bool:
        nonlocal expanded
        expanded += 1
        if expanded > budget:
            raise OracleUndecided(budget)
        if not unvisited:
            return bool(masks[end] & 1)
        if dead_end(end, unvisited):
            return False
        cand = masks[end] & unvisited
        options = []
        while cand:
            low = cand & -cand
            options.append(low.bit_length() - 1)
            cand ^= low
        options.sort(key=lambda v: (deg[v], v))
        for v in options:
            path.append(v)
            if extend(v, unvisited & ~(1 << v)):
                return True
            path.pop()
        return False

    found = extend(0, full & ~1)
    return OracleResult(found, tuple(path) if found else None, expanded)
