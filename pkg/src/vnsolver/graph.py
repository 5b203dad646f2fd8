"""Undirected simple graphs and graph6 I/O."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, Sequence

MAX_NODES = 10_000


class GraphError(ValueError):
    """Invalid graph construction input."""


class Graph6Error(ValueError):
    """Malformed graph6 record; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class Graph:
    """Immutable undirected simple graph on nodes ``0..n-1``.

    ``adj[v]`` is the sorted tuple of neighbours of ``v``.
    """

    __slots__ = ("n", "adj", "_masks")

    def __init__(self, n: int, adj: Sequence[Iterable[int]]):
        if n < 0 or n > MAX_NODES:
            raise GraphError(f"node count {n} outside [0, {MAX_NODES}]")
        if len(adj) != n:
            raise GraphError(f"adjacency has {len(adj)} rows, expected {n}")
        rows = tuple(tuple(sorted(set(nb))) for nb in adj)
        for v, nb in enumerate(rows):
            for u in nb:
                if not 0 <= u < n:
                    raise GraphError(f"neighbour {u} of node {v} out of range")
                if u == v:
                    raise GraphError(f"self-loop on node {v}")
        for v, nb in enumerate(rows):
            for u in nb:
                if v not in rows[u]:
                    raise GraphError(f"asymmetric adjacency between {v} and {u}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "adj", rows)
        object.__setattr__(self, "_masks", None)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"

    @property
    def num_edges(self) -> int:
        return sum(len(nb) for nb in self.adj) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield edges ``(u, v)`` with ``u < v`` in sorted order."""
        for u, nb in enumerate(self.adj):
            for v in nb:
                if v > u:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    @property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhoods as integer bitmasks (bit ``u`` set iff ``u`` is adjacent)."""
        if self._masks is None:
            masks = tuple(sum(1 << u for u in nb) for nb in self.adj)
            object.__setattr__(self, "_masks", masks)
        return self._masks


def from_edge_list(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a graph from node pairs. Duplicates collapse; self-loops are rejected."""
    if n < 0 or n > MAX_NODES:
        raise GraphError(f"node count {n} outside [0, {MAX_NODES}]")
    adj: list[set[int]] = [set() for _ in range(n)]
    for pair in edges:
        u, v = (int(x) for x in pair)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has endpoint outside 0..{n - 1}")
        if u == v:
            raise GraphError(f"self-loop ({u}, {v}) not allowed")
        adj[u].add(v)
        adj[v].add(u)
    return Graph(n, adj)


def from_adjacency_matrix(matrix: Sequence[Sequence[int]]) -> Graph:
    n = len(matrix)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if matrix[i][j]]
    for i in range(n):
        if len(matrix[i]) != n:
            raise GraphError("adjacency matrix is not square")
        if matrix[i][i]:
            raise GraphError(f"self-loop on node {i}")
        for j in range(n):
            if bool(matrix[i][j]) != bool(matrix[j][i]):
                raise GraphError(f"adjacency matrix not symmetric at ({i}, {j})")
    return from_edge_list(n, edges)


def degree(g: Graph, v: int) -> int:
    if not 0 <= v < g.n:
        raise GraphError(f"node {v} out of range for n={g.n}")
    return len(g.adj[v])


def is_connected(g: Graph) -> bool:
    """Breadth-first connectivity from node 0. The empty graph counts as disconnected."""
    if g.n == 0:
        return False
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        v = queue.popleft()
        for u in g.adj[v]:
            if not seen[u]:
                seen[u] = True
                count += 1
                queue.append(u)
    return count == g.n


# graph6 ---------------------------------------------------------------------

GRAPH6_HEADER = ">>graph6<<"


def _encode_n(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def encode_graph6(g: Graph) -> str:
    """Canonical graph6 record for ``g`` (no header, no trailing newline)."""
    bits = []
    for j in range(1, g.n):
        nb = g.adj[j]
        for i in range(j):
            bits.append(1 if i in nb else 0)
    bits.extend([0] * (-len(bits) % 6))
    out = [_encode_n(g.n)]
    for k in range(0, len(bits), 6):
        val = 0
        for b in bits[k:k + 6]:
            val = (val << 1) | b
        out.append(chr(val + 63))
    return "".join(out)


def parse_graph6(line: str | bytes) -> Graph:
    """Decode one graph6 record. An optional ``>>graph6<<`` prefix and trailing
    whitespace are tolerated."""
    if isinstance(line, bytes):
        try:
            line = line.decode("ascii")
        except UnicodeDecodeError as exc:
            raise Graph6Error("non-ASCII byte", exc.start) from None
    base = 0
    if line.startswith(GRAPH6_HEADER):
        base = len(GRAPH6_HEADER)
        line = line[base:]
    line = line.rstrip("\r\n")
    data = []
    for k, ch in enumerate(line):
        c = ord(ch)
        if not 63 <= c <= 126:
            raise Graph6Error(f"invalid graph6 character {ch!r}", base + k)
        data.append(c - 63)
    if not data:
        raise Graph6Error("empty graph6 record", base)

    pos = 0
    if data[0] != 63:
        n = data[0]
        pos = 1
    elif len(data) >= 2 and data[1] == 63:
        if len(data) < 8:
            raise Graph6Error("truncated 8-byte size field", base + len(data))
        n = 0
        for d in data[2:8]:
            n = (n << 6) | d
        pos = 8
    else:
        if len(data) < 4:
            raise Graph6Error("truncated 4-byte size field", base + len(data))
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        pos = 4
    if n > MAX_NODES:
        raise Graph6Error(f"node count {n} exceeds cap {MAX_NODES}", base)

    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    body = data[pos:]
    if len(body) != need:
        kind = "truncated" if len(body) < need else "overlong"
        raise Graph6Error(
            f"{kind} record: expected {need} data bytes for n={n}, got {len(body)}",
            base + pos + min(len(body), need),
        )

    adj: list[list[int]] = [[] for _ in range(n)]
    k = 0
    for j in range(1, n):
        for i in range(j):
            if (body[k // 6] >> (5 - k % 6)) & 1:
                adj[i].append(j)
                adj[j].append(i)
            k += 1
    if nbits % 6 and body[-1] & ((1 << (6 - nbits % 6)) - 1):
        raise Graph6Error("nonzero padding bits", base + pos + need - 1)
    return Graph(n, adj)


def read_graph6_file(path) -> list[Graph]:
    """Read every record of a graph6 file, skipping the optional header line
    and blank lines."""
    graphs = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line == GRAPH6_HEADER:
                continue
            try:
                graphs.append(parse_graph6(line))
            except Graph6Error as exc:
                raise Graph6Error(f"{path}:{lineno}: {exc}", exc.offset) from None
    return graphs


def write_graph6_file(path, graphs: Iterable[Graph], header: bool = False) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        if header:
            fh.write(GRAPH6_HEADER + "\n")
        for g in graphs:
            fh.write(encode_graph6(g) + "\n")
