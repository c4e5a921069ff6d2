"""Finite connected weighted graphs, bounded subgraphs, and vertex fields.

A graph carries a positive measure mu on vertices and symmetric positive
weights on undirected edges.  A bounded subgraph is an interior vertex set
together with its derived vertex boundary (the outside vertices adjacent to
the interior) and the edges having at least one interior endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "GraphParseError",
    "WeightedGraph",
    "BoundedSubgraph",
    "VertexField",
    "check_connected",
    "parse_graph",
    "serialize_graph",
    "generate",
    "induce_bounded_subgraph",
]


class GraphError(ValueError):
    """Invalid graph structure or graph parameters."""


class GraphParseError(GraphError):
    """Malformed graph file; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def check_connected(vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> bool:
    """True iff every vertex is reachable from the first one via the edges.

    An empty or single-vertex set counts as connected.
    """
    verts = list(vertices)
    if not verts:
        return True
    adj: dict[str, list[str]] = {v: [] for v in verts}
    for a, b in edges:
        if a not in adj or b not in adj:
            raise GraphError(f"edge ({a!r}, {b!r}) mentions a vertex outside the vertex set")
        adj[a].append(b)
        adj[b].append(a)
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(verts)


class WeightedGraph:
    """Finite connected graph with positive vertex measure and symmetric
    positive edge weights.

    Vertices are strings and keep their construction order; every
    array-valued attribute is aligned with that order.  Instances are
    immutable after construction and safe to share across workers.
    """

    def __init__(
        self,
        vertices: Sequence[str],
        measures: Mapping[str, float],
        edges: Iterable[tuple[str, str, float]],
    ):
        verts = list(vertices)
        if not verts:
            raise GraphError("graph has no vertices")
        index: dict[str, int] = {}
        for v in verts:
            if not isinstance(v, str):
                raise GraphError(f"vertex identifier {v!r} is not a string")
            if v in index:
                raise GraphError(f"duplicate vertex {v!r}")
            index[v] = len(index)

        unknown = [k for k in measures if k not in index]
        if unknown:
            raise GraphError(f"measure given for unknown vertex {unknown[0]!r}")
        mu = np.empty(len(verts), dtype=float)
        for v, i in index.items():
            if v not in measures:
                raise GraphError(f"no measure for vertex {v!r}")
            m = float(measures[v])
            if not np.isfinite(m) or m <= 0.0:
                raise GraphError(f"measure of vertex {v!r} must be positive (got {m!r})")
            mu[i] = m

        tails: list[int] = []
        heads: list[int] = []
        weights: list[float] = []
        by_pair: dict[tuple[int, int], float] = {}
        for a, b, w in edges:
            if a not in index:
                raise GraphError(f"edge endpoint {a!r} is not a declared vertex")
            if b not in index:
                raise GraphError(f"edge endpoint {b!r} is not a declared vertex")
            i, j = index[a], index[b]
            if i == j:
                raise GraphError(f"self-loop at vertex {a!r}")
            key = (i, j) if i < j else (j, i)
            if key in by_pair:
                raise GraphError(f"duplicate edge {{{a!r}, {b!r}}}")
            wf = float(w)
            if not np.isfinite(wf) or wf <= 0.0:
                raise GraphError(f"weight of edge {{{a!r}, {b!r}}} must be positive (got {wf!r})")
            by_pair[key] = wf
            tails.append(i)
            heads.append(j)
            weights.append(wf)

        self.vertices: tuple[str, ...] = tuple(verts)
        self._index = index
        self.mu = mu
        self.edge_tail = np.asarray(tails, dtype=np.intp)
        self.edge_head = np.asarray(heads, dtype=np.intp)
        self.edge_weight = np.asarray(weights, dtype=float)
        self._weight_by_pair = by_pair
        for arr in (self.mu, self.edge_tail, self.edge_head, self.edge_weight):
            arr.setflags(write=False)

        adj: list[list[tuple[int, float]]] = [[] for _ in verts]
        for i, j, wf in zip(tails, heads, weights):
            adj[i].append((j, wf))
            adj[j].append((i, wf))
        self._adjacency: tuple[tuple[tuple[int, float], ...], ...] = tuple(
            tuple(nbrs) for nbrs in adj
        )

        if not check_connected(self.vertices, self.edge_pairs()):
            raise GraphError("graph is disconnected")

    # -- basic queries ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edge_weight)

    @property
    def total_measure(self) -> float:
        return float(self.mu.sum())

    def index(self, vertex: str) -> int:
        try:
            return self._index[vertex]
        except KeyError:
            raise GraphError(f"unknown vertex {vertex!r}") from None

    def measure(self, vertex: str) -> float:
        return float(self.mu[self.index(vertex)])

    def has_edge(self, a: str, b: str) -> bool:
        i, j = self.index(a), self.index(b)
        key = (i, j) if i < j else (j, i)
        return key in self._weight_by_pair

    def weight(self, a: str, b: str) -> float:
        i, j = self.index(a), self.index(b)
        key = (i, j) if i < j else (j, i)
        try:
            return self._weight_by_pair[key]
        except KeyError:
            raise GraphError(f"no edge between {a!r} and {b!r}") from None

    def neighbors(self, vertex: str) -> tuple[str, ...]:
        i = self.index(vertex)
        return tuple(self.vertices[j] for j, _ in self._adjacency[i])

    def adjacency(self, vertex: str) -> tuple[tuple[str, float], ...]:
        """Neighbors of a vertex with the connecting edge weights."""
        i = self.index(vertex)
        return tuple((self.vertices[j], w) for j, w in self._adjacency[i])

    def edge_list(self) -> list[tuple[str, str, float]]:
        return [
            (self.vertices[i], self.vertices[j], float(w))
            for i, j, w in zip(self.edge_tail, self.edge_head, self.edge_weight)
        ]

    def edge_pairs(self) -> list[tuple[str, str]]:
        return [(self.vertices[i], self.vertices[j]) for i, j in zip(self.edge_tail, self.edge_head)]

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        """Per-vertex sum of incident edge weights."""
        deg = np.bincount(self.edge_tail, weights=self.edge_weight, minlength=self.n)
        deg += np.bincount(self.edge_head, weights=self.edge_weight, minlength=self.n)
        deg.setflags(write=False)
        return deg

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, edges={self.edge_count})"


class BoundedSubgraph:
    """An interior vertex set, its derived boundary, and the domain graph
    they span.

    The domain (``closure``) contains the interior and boundary vertices and
    every parent edge with at least one interior endpoint; edges joining two
    boundary vertices are excluded.  Consequently every neighbor of a
    boundary vertex inside the domain is an interior vertex.  Built via
    :func:`induce_bounded_subgraph`.
    """

    def __init__(self, parent: WeightedGraph, interior: tuple[str, ...],
                 boundary: tuple[str, ...], closure: WeightedGraph):
        self.parent = parent
        self.interior = interior
        self.boundary = boundary
        self.closure = closure
        self.interior_count = len(interior)

    # Domain protocol: delegate to the closure graph, whose vertex order is
    # interior first (parent order), then boundary (parent order).

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.closure.vertices

    @property
    def mu(self) -> np.ndarray:
        return self.closure.mu

    @property
    def total_measure(self) -> float:
        return self.closure.total_measure

    def index(self, vertex: str) -> int:
        return self.closure.index(vertex)

    def is_interior(self, vertex: str) -> bool:
        return self.closure.index(vertex) < self.interior_count

    def is_boundary(self, vertex: str) -> bool:
        return self.closure.index(vertex) >= self.interior_count

    @cached_property
    def boundary_coupling(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense (boundary x interior) weight matrix and its row sums.

        Row z holds w_zy for the interior neighbors y of boundary vertex z;
        in the closure all neighbors of a boundary vertex are interior.
        """
        ni = self.interior_count
        nb = len(self.boundary)
        w = np.zeros((nb, ni), dtype=float)
        for k, z in enumerate(self.boundary):
            for j, wt in self.closure._adjacency[self.closure.index(z)]:
                w[k, j] = wt
        sums = w.sum(axis=1)
        w.setflags(write=False)
        sums.setflags(write=False)
        return w, sums

    @cached_property
    def boundary_average(self) -> np.ndarray:
        """Row-stochastic matrix mapping interior values to the boundary
        values that zero out every outward normal derivative."""
        w, sums = self.boundary_coupling
        avg = w / sums[:, None]
        avg.setflags(write=False)
        return avg

    def __repr__(self) -> str:
        return (f"BoundedSubgraph(interior={self.interior_count}, "
                f"boundary={len(self.boundary)})")


def induce_bounded_subgraph(g: WeightedGraph, interior: Iterable[str]) -> BoundedSubgraph:
    """Derive the vertex boundary and domain graph of an interior vertex set.

    The boundary is every vertex outside the interior adjacent to it.  The
    domain keeps parent edges with at least one interior endpoint and must
    be connected.
    """
    ids = list(interior)
    if not ids:
        raise GraphError("interior is empty")
    seen: set[str] = set()
    for v in ids:
        if v not in g._index:
            raise GraphError(f"interior vertex {v!r} is not in the graph")
        if v in seen:
            raise GraphError(f"duplicate interior vertex {v!r}")
        seen.add(v)
    if len(seen) == g.n:
        raise GraphError("interior equals the whole vertex set")

    interior_ordered = tuple(v for v in g.vertices if v in seen)
    boundary = tuple(
        v for v in g.vertices
        if v not in seen and any(nbr in seen for nbr in g.neighbors(v))
    )
    domain_vertices = interior_ordered + boundary
    edges = [(a, b, w) for a, b, w in g.edge_list() if a in seen or b in seen]
    if not check_connected(domain_vertices, [(a, b) for a, b, _ in edges]):
        raise GraphError("bounded subgraph domain is disconnected")
    closure = WeightedGraph(
        domain_vertices, {v: g.measure(v) for v in domain_vertices}, edges
    )
    return BoundedSubgraph(g, interior_ordered, boundary, closure)


# -- construction helpers ------------------------------------------------


def generate(kind: str, n: int | None = None, rows: int | None = None,
             cols: int | None = None, *, weight: float = 1.0,
             measure: float = 1.0) -> WeightedGraph:
    """Build a named topology with uniform weights and measures.

    Kinds: ``path``, ``cycle``, ``complete``, ``star`` (sized by ``n``) and
    ``grid`` (sized by ``rows`` x ``cols``).  Grid vertices are named
    ``r{i}c{j}``; the others ``1`` .. ``n``.
    """
    if weight <= 0:
        raise GraphError(f"weight must be positive (got {weight!r})")
    if measure <= 0:
        raise GraphError(f"measure must be positive (got {measure!r})")

    def _size(value, minimum, name):
        if value is None or int(value) != value:
            raise GraphError(f"{kind} requires an integer {name}")
        value = int(value)
        if value < minimum:
            raise GraphError(f"{kind} requires {name} >= {minimum} (got {value})")
        return value

    edges: list[tuple[str, str, float]]
    if kind in ("path", "cycle", "complete", "star"):
        if rows is not None or cols is not None:
            raise GraphError(f"{kind} is sized by n, not rows/cols")
        size = _size(n, 3 if kind == "cycle" else 2, "n")
        verts = [str(k) for k in range(1, size + 1)]
        if kind == "path":
            edges = [(verts[k], verts[k + 1], weight) for k in range(size - 1)]
        elif kind == "cycle":
            edges = [(verts[k], verts[k + 1], weight) for k in range(size - 1)]
            edges.append((verts[-1], verts[0], weight))
        elif kind == "complete":
            edges = [
                (verts[i], verts[j], weight)
                for i in range(size) for j in range(i + 1, size)
            ]
        else:  # star: first vertex is the hub
            edges = [(verts[0], verts[k], weight) for k in range(1, size)]
    elif kind == "grid":
        if n is not None:
            raise GraphError("grid is sized by rows and cols, not n")
        nr = _size(rows, 2, "rows")
        nc = _size(cols, 2, "cols")
        verts = [f"r{i}c{j}" for i in range(1, nr + 1) for j in range(1, nc + 1)]
        edges = []
        for i in range(1, nr + 1):
            for j in range(1, nc + 1):
                if j < nc:
                    edges.append((f"r{i}c{j}", f"r{i}c{j + 1}", weight))
                if i < nr:
                    edges.append((f"r{i}c{j}", f"r{i + 1}c{j}", weight))
    else:
        raise GraphError(f"unknown graph kind {kind!r}")

    return WeightedGraph(verts, {v: measure for v in verts}, edges)


def parse_graph(text: str) -> WeightedGraph:
    """Parse the line-oriented graph file format.

    Directives: ``v <id> <mu>``, ``e <id1> <id2> <w>``, and optional
    ``b <id>`` boundary marks.  ``#`` starts a comment.  Edges may only
    reference previously declared vertices.  When boundary marks are
    present, the set of unmarked vertices must induce exactly the marked
    set as its derived boundary.
    """
    verts: list[str] = []
    measures: dict[str, float] = {}
    edges: list[tuple[str, str, float]] = []
    edge_keys: set[frozenset[str]] = set()
    marks: list[str] = []

    def _num(token: str, line_no: int, what: str) -> float:
        try:
            return float(token)
        except ValueError:
            raise GraphParseError(line_no, f"bad {what} {token!r}") from None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "v":
            if len(tok) != 3:
                raise GraphParseError(line_no, "expected: v <id> <mu>")
            vid = tok[1]
            if vid in measures:
                raise GraphParseError(line_no, f"duplicate vertex {vid!r}")
            m = _num(tok[2], line_no, "measure")
            if not (m > 0.0) or not np.isfinite(m):
                raise GraphParseError(line_no, f"nonpositive measure for vertex {vid!r}")
            verts.append(vid)
            measures[vid] = m
        elif tok[0] == "e":
            if len(tok) != 4:
                raise GraphParseError(line_no, "expected: e <id1> <id2> <w>")
            a, b = tok[1], tok[2]
            for vid in (a, b):
                if vid not in measures:
                    raise GraphParseError(line_no, f"edge references undeclared vertex {vid!r}")
            if a == b:
                raise GraphParseError(line_no, f"self-loop at vertex {a!r}")
            key = frozenset((a, b))
            if key in edge_keys:
                raise GraphParseError(line_no, f"duplicate edge {{{a!r}, {b!r}}}")
            w = _num(tok[3], line_no, "weight")
            if not (w > 0.0) or not np.isfinite(w):
                raise GraphParseError(line_no, f"nonpositive weight on edge {{{a!r}, {b!r}}}")
            edge_keys.add(key)
            edges.append((a, b, w))
        elif tok[0] == "b":
            if len(tok) != 2:
                raise GraphParseError(line_no, "expected: b <id>")
            vid = tok[1]
            if vid not in measures:
                raise GraphParseError(line_no, f"boundary mark for undeclared vertex {vid!r}")
            if vid in marks:
                raise GraphParseError(line_no, f"duplicate boundary mark {vid!r}")
            marks.append(vid)
        else:
            raise GraphParseError(line_no, f"unknown directive {tok[0]!r}")

    if not verts:
        raise GraphError("graph file declares no vertices")
    g = WeightedGraph(verts, measures, edges)

    if marks:
        marked = set(marks)
        interior = [v for v in verts if v not in marked]
        if not interior:
            raise GraphError("boundary marks cover every vertex; no interior remains")
        derived = set(induce_bounded_subgraph(g, interior).boundary)
        if derived != marked:
            raise GraphError(
                "marked boundary does not match the derived boundary: "
                f"marked {sorted(marked)}, derived {sorted(derived)}"
            )
    return g


def serialize_graph(g: WeightedGraph) -> str:
    """Graph file text whose parse reproduces the graph bit-for-bit."""
    lines = [f"v {v} {float(g.mu[i])!r}" for i, v in enumerate(g.vertices)]
    lines += [f"e {a} {b} {w!r}" for a, b, w in g.edge_list()]
    return "\n".join(lines) + "\n"


# -- fields ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VertexField:
    """Real-valued function on the vertices of a graph or bounded subgraph.

    Values are aligned with the domain's vertex order and immutable.
    """

    domain: WeightedGraph | BoundedSubgraph
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True).reshape(-1)
        n = len(self.domain.vertices)
        if vals.shape != (n,):
            raise ValueError(
                f"field has {vals.shape[0]} values for a domain of {n} vertices"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, domain, value: float) -> "VertexField":
        return cls(domain, np.full(len(domain.vertices), float(value)))

    @classmethod
    def from_dict(cls, domain, mapping: Mapping[str, float]) -> "VertexField":
        missing = [v for v in domain.vertices if v not in mapping]
        if missing:
            raise ValueError(f"field is missing a value for vertex {missing[0]!r}")
        known = set(domain.vertices)
        extra = [k for k in mapping if k not in known]
        if extra:
            raise ValueError(f"field has a value for unknown vertex {extra[0]!r}")
        return cls(domain, np.array([mapping[v] for v in domain.vertices], dtype=float))

    def __getitem__(self, vertex: str) -> float:
        return float(self.values[self.domain.index(vertex)])

    def as_dict(self) -> dict[str, float]:
        return {v: float(x) for v, x in zip(self.domain.vertices, self.values)}

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())
