"""Hypergraphs, beta-acyclicity machinery and tree decompositions.

Vertices can be any hashable, sortable values (ints in practice, CNF
variables when a formula is viewed as a hypergraph).  Edges form a
sequence, so duplicate edges are allowed and edge identity is positional.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence


class Graph:
    """Undirected graph with deterministic iteration order."""

    def __init__(self, nodes: Iterable = ()) -> None:
        self._adj: dict = {}
        for n in nodes:
            self.add_node(n)

    def add_node(self, n) -> None:
        if n not in self._adj:
            self._adj[n] = set()

    def add_edge(self, u, v) -> None:
        if u == v:
            raise ValueError("self-loops are not supported")
        self.add_node(u)
        self.add_node(v)
        self._adj[u].add(v)
        self._adj[v].add(u)

    def has_node(self, n) -> bool:
        return n in self._adj

    def has_edge(self, u, v) -> bool:
        return u in self._adj and v in self._adj[u]

    def neighbors(self, n) -> tuple:
        return tuple(sorted(self._adj[n]))

    def degree(self, n) -> int:
        return len(self._adj[n])

    @property
    def nodes(self) -> tuple:
        return tuple(self._adj)

    def edges(self) -> list:
        out = []
        for u in self._adj:
            for v in self._adj[u]:
                if u < v:
                    out.append((u, v))
        return sorted(out)

    @property
    def node_count(self) -> int:
        return len(self._adj)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self._adj.values()) // 2

    def copy(self) -> "Graph":
        g = Graph()
        g._adj = {n: set(s) for n, s in self._adj.items()}
        return g


class Hypergraph:
    """A (multi)hypergraph: ordered vertices plus a sequence of edges."""

    def __init__(self, vertices: Iterable, edges: Iterable[Iterable] = (),
                 allow_empty_edges: bool = False) -> None:
        self.vertices = tuple(dict.fromkeys(vertices))
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValueError("unhashable or duplicate vertices")
        frozen = []
        for e in edges:
            fe = frozenset(e)
            if not fe and not allow_empty_edges:
                raise ValueError("empty edge rejected")
            if not fe <= vset:
                raise ValueError(f"edge {sorted(fe)} mentions undeclared vertices")
            frozen.append(fe)
        self.edges = tuple(frozen)
        self._vpos = {v: i for i, v in enumerate(self.vertices)}

    def __repr__(self) -> str:
        return f"Hypergraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def vertex_position(self, v) -> int:
        return self._vpos[v]

    def edge_vertices(self, i: int) -> tuple:
        """Vertices of edge i in declared vertex order."""
        return tuple(sorted(self.edges[i], key=self._vpos.__getitem__))

    def edges_containing(self, v) -> list:
        return [i for i, e in enumerate(self.edges) if v in e]


@dataclass(frozen=True)
class LiteralInstance:
    """A binary polynomial over literals: hypergraph, polarities, profits.

    ``sigma[i][v]`` is 1 when edge i uses the plain variable for v and 0
    when it uses the complement 1-x(v).  A plain instance has every
    polarity equal to 1.
    """

    hypergraph: Hypergraph
    sigma: tuple
    profit: tuple

    def __post_init__(self):
        h = self.hypergraph
        if len(self.sigma) != len(h.edges) or len(self.profit) != len(h.edges):
            raise ValueError("sigma and profit must have one entry per edge")
        for i, e in enumerate(h.edges):
            if set(self.sigma[i]) != set(e):
                raise ValueError(f"sigma of edge {i} must be defined exactly on its vertices")
            if any(b not in (0, 1) for b in self.sigma[i].values()):
                raise ValueError("polarities must be 0/1 bits")

    @staticmethod
    def plain(hypergraph: Hypergraph, profit: Sequence) -> "LiteralInstance":
        """Instance with all-positive polarities (an ordinary polynomial)."""
        sigma = tuple({v: 1 for v in e} for e in hypergraph.edges)
        return LiteralInstance(hypergraph, sigma, tuple(Fraction(p) for p in profit))

    def value_at(self, point: Mapping) -> Fraction:
        """Evaluate the polynomial at a 0/1 point, directly from the terms."""
        total = Fraction(0)
        for i, e in enumerate(self.hypergraph.edges):
            term = 1
            for v in e:
                bit = point[v]
                if (bit if self.sigma[i][v] == 1 else 1 - bit) == 0:
                    term = 0
                    break
            if term:
                total += self.profit[i]
        return total


class TreeDecomposition:
    """A tree over bag ids with a vertex set per bag."""

    def __init__(self, bags: Mapping[int, Iterable], tree_edges: Iterable[tuple]) -> None:
        self.bags = {b: frozenset(s) for b, s in bags.items()}
        self.tree: dict[int, set] = {b: set() for b in self.bags}
        for a, b in tree_edges:
            if a not in self.bags or b not in self.bags:
                raise ValueError("tree edge mentions unknown bag")
            self.tree[a].add(b)
            self.tree[b].add(a)

    @property
    def width(self) -> int:
        return max((len(s) for s in self.bags.values()), default=0) - 1

    def bags_with(self, v) -> list[int]:
        return sorted(b for b, s in self.bags.items() if v in s)

    def _is_tree(self) -> bool:
        if not self.bags:
            return False
        n_edges = sum(len(s) for s in self.tree.values()) // 2
        if n_edges != len(self.bags) - 1:
            return False
        seen = set()
        queue = deque([next(iter(self.bags))])
        while queue:
            b = queue.popleft()
            if b in seen:
                continue
            seen.add(b)
            queue.extend(self.tree[b] - seen)
        return len(seen) == len(self.bags)

    def check_connected(self, v) -> bool:
        """The bags containing v must induce a connected subtree."""
        holding = {b for b, s in self.bags.items() if v in s}
        if not holding:
            return False
        seen = set()
        queue = deque([min(holding)])
        while queue:
            b = queue.popleft()
            if b in seen:
                continue
            seen.add(b)
            queue.extend((self.tree[b] & holding) - seen)
        return seen == holding

    def validate(self, graph: Graph) -> None:
        """Raise ValueError unless this is a valid decomposition of graph."""
        if not self._is_tree():
            raise ValueError("bag graph is not a tree")
        covered = set()
        for s in self.bags.values():
            covered |= s
        missing = set(graph.nodes) - covered
        if missing:
            raise ValueError(f"nodes never covered: {sorted(missing)[:5]}")
        for u, v in graph.edges():
            if not any(u in s and v in s for s in self.bags.values()):
                raise ValueError(f"edge ({u}, {v}) not covered by any bag")
        for v in graph.nodes:
            if not self.check_connected(v):
                raise ValueError(f"bags containing {v} are not connected")

    def is_valid_for(self, graph: Graph) -> bool:
        try:
            self.validate(graph)
        except ValueError:
            return False
        return True


# ---------------------------------------------------------------------------
# beta-acyclicity


def _is_nest_point(v, edges: Sequence[frozenset]) -> bool:
    incident = [e for e in edges if v in e]
    incident.sort(key=len)
    for a, b in zip(incident, incident[1:]):
        if not a <= b:
            return False
    return True


def beta_elimination_order(h: Hypergraph) -> Optional[tuple]:
    """Greedy nest-point elimination, lowest vertex first on ties.

    Returns an order (v1, ..., vn) where each vi is a nest point of the
    hypergraph restricted to the not-yet-eliminated vertices, or None when
    no such order exists.  Eliminating any available nest point is safe,
    so the greedy search is complete.
    """
    remaining = list(h.vertices)
    edges = [e for e in h.edges]
    order = []
    while remaining:
        pick = None
        for v in sorted(remaining):
            if _is_nest_point(v, edges):
                pick = v
                break
        if pick is None:
            return None
        order.append(pick)
        remaining.remove(pick)
        edges = [e - {pick} for e in edges]
        edges = [e for e in edges if e]
    return tuple(order)


def is_beta_acyclic(h: Hypergraph) -> bool:
    return beta_elimination_order(h) is not None


def is_valid_elimination_order(h: Hypergraph, order: Sequence) -> bool:
    """Check a proposed beta-elimination order vertex by vertex."""
    if sorted(order, key=repr) != sorted(h.vertices, key=repr):
        return False
    edges = [e for e in h.edges]
    for v in order:
        if not _is_nest_point(v, edges):
            return False
        edges = [e - {v} for e in edges]
        edges = [e for e in edges if e]
    return True


# ---------------------------------------------------------------------------
# incidence graphs

# Incidence-graph nodes are tagged tuples so vertex and edge nodes never
# collide: ('v', vertex) and ('e', edge position).


def vertex_node(v) -> tuple:
    return ("v", v)


def edge_node(i: int) -> tuple:
    return ("e", i)


def incidence_graph(h: Hypergraph) -> Graph:
    """Bipartite graph between vertices and edge occurrences."""
    g = Graph()
    for v in h.vertices:
        g.add_node(vertex_node(v))
    for i, e in enumerate(h.edges):
        g.add_node(edge_node(i))
        for v in sorted(e, key=h.vertex_position):
            g.add_edge(vertex_node(v), edge_node(i))
    return g


# ---------------------------------------------------------------------------
# cycle hypergraphs


def cycle_decomposition(h: Hypergraph) -> Optional[TreeDecomposition]:
    """Width-2 decomposition of the incidence graph of a cycle hypergraph.

    A cycle hypergraph has edges e0..e{n-1} (n >= 3) where ei and ej meet
    exactly when j = i+1 mod n.  For n = 3 a vertex shared by all three
    edges is additionally rejected: with such a vertex the incidence graph
    has a K4 minor, so no width-2 decomposition exists at all.
    Returns None when h is not (detectably) a cycle hypergraph.
    """
    m = len(h.edges)
    if m < 3:
        return None
    inter = Graph(range(m))
    for i in range(m):
        for j in range(i + 1, m):
            if h.edges[i] & h.edges[j]:
                inter.add_edge(i, j)
    if any(inter.degree(i) != 2 for i in range(m)):
        return None
    # 2-regular and connected means a single cycle; walk it.
    cyc = [0]
    prev = None
    while True:
        nxts = [x for x in inter.neighbors(cyc[-1]) if x != prev]
        prev = cyc[-1]
        cyc.append(min(nxts))
        if cyc[-1] == 0:
            break
    cyc.pop()
    if len(cyc) != m:
        return None
    if m == 3 and (h.edges[0] & h.edges[1] & h.edges[2]):
        return None

    e = [edge_node(i) for i in cyc]
    ordered = [h.edges[i] for i in cyc]
    bags: dict[int, frozenset] = {}
    edges_t: list[tuple] = []
    bags[0] = frozenset({e[0], e[1]})
    for i in range(1, m - 1):
        bags[i] = frozenset({e[0], e[i], e[i + 1]})
        edges_t.append((i - 1, i))
    bags[m - 1] = frozenset({e[0], e[m - 1]})
    edges_t.append((m - 2, m - 1))
    nxt = m

    def attach(to_bag: int, content: frozenset):
        nonlocal nxt
        bags[nxt] = content
        edges_t.append((to_bag, nxt))
        nxt += 1

    for i in range(m):
        j = (i + 1) % m
        prv = (i - 1) % m
        for v in sorted(ordered[i] & ordered[j], key=h.vertex_position):
            attach(i, frozenset({e[i], e[j], vertex_node(v)}))
        for v in sorted(ordered[i] - (ordered[prv] | ordered[j]), key=h.vertex_position):
            attach(i, frozenset({e[i], vertex_node(v)}))
    covered = set()
    for i in range(m):
        covered |= h.edges[i]
    for v in h.vertices:
        if v not in covered:
            attach(0, frozenset({vertex_node(v)}))
    return TreeDecomposition(bags, edges_t)


# ---------------------------------------------------------------------------
# incidence structure of the basic CNF encoding

# The basic encoding of an instance over hypergraph h has, per edge e,
# one clause per vertex of e (the y-to-vertex links, emitted in vertex
# order) followed by one wide clause tying all of e to y_e.  Its incidence
# graph is fully determined by h; clause nodes are numbered in emission
# order so they line up with the encoder output.


def encoding_clause_index(h: Hypergraph, edge: int, v=None) -> int:
    """Index of a clause of the basic encoding: link clause of (edge, v),
    or the wide clause of the edge when v is None."""
    base = sum(len(h.edges[j]) + 1 for j in range(edge))
    if v is None:
        return base + len(h.edges[edge])
    return base + h.edge_vertices(edge).index(v)


def encoding_incidence_graph(h: Hypergraph) -> Graph:
    """Incidence graph of the basic encoding, built structurally from h."""
    from .cnf import CnfVariable  # local import; cnf depends on this module

    g = Graph()
    for v in h.vertices:
        g.add_node(vertex_node(CnfVariable("x", v)))
    for i in range(len(h.edges)):
        g.add_node(vertex_node(CnfVariable("y", i)))
    for i in range(len(h.edges)):
        ye = vertex_node(CnfVariable("y", i))
        for v in h.edge_vertices(i):
            c = ("c", encoding_clause_index(h, i, v))
            g.add_edge(c, ye)
            g.add_edge(c, vertex_node(CnfVariable("x", v)))
        r = ("c", encoding_clause_index(h, i))
        g.add_edge(r, ye)
        for v in h.edge_vertices(i):
            g.add_edge(r, vertex_node(CnfVariable("x", v)))
    return g


def lift_decomposition(td: TreeDecomposition, h: Hypergraph) -> TreeDecomposition:
    """Lift a decomposition of incidence_graph(h) to one of the incidence
    graph of the basic encoding, of width at most 2*(1 + input width).

    Every bag is expanded by duplicating each edge node into the pair
    (wide clause node, y variable node), then each link clause is hung off
    a bag already containing its y variable and x variable.
    """
    from .cnf import CnfVariable

    td.validate(incidence_graph(h))
    xn = lambda v: vertex_node(CnfVariable("x", v))
    yn = lambda i: vertex_node(CnfVariable("y", i))
    rn = lambda i: ("c", encoding_clause_index(h, i))
    ln = lambda i, v: ("c", encoding_clause_index(h, i, v))

    bags: dict[int, frozenset] = {}
    for b in sorted(td.bags):
        content = set()
        for node in td.bags[b]:
            kind, payload = node
            if kind == "v":
                content.add(xn(payload))
            else:
                content.add(rn(payload))
                content.add(yn(payload))
        bags[b] = frozenset(content)
    edges_t = [(a, b) for a in sorted(td.tree) for b in sorted(td.tree[a]) if a < b]

    nxt = max(bags) + 1
    for i in range(len(h.edges)):
        for v in h.edge_vertices(i):
            host = min(b for b in sorted(td.bags)
                       if edge_node(i) in td.bags[b] and vertex_node(v) in td.bags[b])
            bags[nxt] = frozenset({yn(i), xn(v), ln(i, v)})
            edges_t.append((host, nxt))
            nxt += 1
    lifted = TreeDecomposition(bags, edges_t)
    bound = 2 * (1 + td.width)
    if lifted.width > bound:
        raise AssertionError(f"lifted width {lifted.width} exceeds bound {bound}")
    return lifted


# ---------------------------------------------------------------------------
# min-fill tree decompositions


def minfill_decomposition(g: Graph) -> TreeDecomposition:
    """Tree decomposition from min-fill elimination, lowest node on ties.

    The width is only an upper bound on the treewidth of g.  Nodes are
    relabeled to integers internally and fill counts are refreshed only
    where an elimination changed a neighborhood.
    """
    if g.node_count == 0:
        return TreeDecomposition({0: frozenset()}, [])
    names = sorted(g.nodes)
    index = {n: i for i, n in enumerate(names)}
    adj = [set(index[m] for m in g.neighbors(n)) for n in names]

    def fill_of(u: int) -> int:
        nb = adj[u]
        k = len(nb)
        if k < 2:
            return 0
        present = sum(len(adj[w] & nb) for w in nb) // 2
        return k * (k - 1) // 2 - present

    fill = {u: fill_of(u) for u in range(len(names))}
    alive = set(range(len(names)))
    order: list[int] = []
    cliques: list[tuple] = []
    while alive:
        best = min(alive, key=lambda u: (fill[u], u))
        nb = sorted(adj[best])
        dirty = set(nb)
        for ai, a in enumerate(nb):
            for b in nb[ai + 1:]:
                if b not in adj[a]:
                    dirty |= adj[a] & adj[b]
                    adj[a].add(b)
                    adj[b].add(a)
        for u in nb:
            adj[u].discard(best)
        alive.discard(best)
        del fill[best]
        for u in dirty:
            if u in alive:
                fill[u] = fill_of(u)
        order.append(best)
        cliques.append(tuple(nb))

    # Bags in reverse elimination order; attach each to the bag of the
    # first-eliminated member of its clique, whose bag must contain it.
    n = len(order)
    pos = {v: i for i, v in enumerate(order)}
    bags = {i: frozenset({names[order[i]], *(names[u] for u in cliques[i])})
            for i in range(n)}
    edges_t = []
    for i in range(n):
        if cliques[i]:
            edges_t.append((i, min(pos[u] for u in cliques[i])))
        elif i + 1 < n:
            edges_t.append((i, i + 1))
    return TreeDecomposition(bags, edges_t)
