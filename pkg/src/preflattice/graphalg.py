"""Graph and poset algorithms shared by the analysis modules.

Closures and reach matrices, Hamiltonian path enumeration, maximal
circuit-free sub-bigraphs, the E/W/T relations a bigraph induces,
antichain/chain decomposition of posets, and take-grant connectivity.
Everything here is desk-scale and exact; enumeration routines carry caps.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Bigraph, LabeledMatrix, Order, bigraph
from .errors import (
    CapExceeded,
    CyclicRelation,
    DuplicateLabel,
    InputError,
    UnknownVertex,
    vertex_cap,
)

HAMILTONIAN_CAP = 10


@dataclass(frozen=True)
class Digraph:
    vertices: tuple[str, ...]
    edges: frozenset  # of (u, v)

    def __post_init__(self):
        known = set(self.vertices)
        if len(known) != len(self.vertices):
            raise InputError("duplicate digraph vertex")
        for u, v in self.edges:
            if u not in known or v not in known:
                raise UnknownVertex(f"edge ({u!r},{v!r}) uses unknown vertex")


def digraph(vertices, edges) -> Digraph:
    return Digraph(tuple(vertices), frozenset((u, v) for u, v in edges))


def digraph_from_dict(data) -> Digraph:
    try:
        return digraph(data["vertices"], [tuple(e) for e in data["edges"]])
    except (KeyError, TypeError) as exc:
        raise InputError(f"digraph JSON needs 'vertices' and 'edges': {exc}") from None


def _adjacency(g: Digraph):
    adj = {v: set() for v in g.vertices}
    for u, v in g.edges:
        adj[u].add(v)
    return adj


def transitive_closure(g: Digraph) -> Digraph:
    """Edge (u,v) present iff a directed path u -> v exists in g."""
    adj = _adjacency(g)
    order = list(g.vertices)
    reach = {v: set(adj[v]) for v in order}
    for k in order:
        rk = reach[k]
        for u in order:
            if k in reach[u]:
                reach[u] |= rk
    return digraph(g.vertices, [(u, v) for u in order for v in reach[u]])


def reach_matrix(g: Digraph) -> LabeledMatrix:
    """M[u][v] = 1 iff v is reachable from u by a path of length >= 1.

    The diagonal is therefore zero unless the vertex lies on a cycle.
    """
    closed = transitive_closure(g)
    idx = {v: i for i, v in enumerate(g.vertices)}
    n = len(g.vertices)
    rows = [[0] * n for _ in range(n)]
    for u, v in closed.edges:
        rows[idx[u]][idx[v]] = 1
    return LabeledMatrix(g.vertices, tuple(tuple(r) for r in rows))


def hamiltonian_paths(g: Digraph):
    """All directed paths visiting every vertex exactly once.

    Deterministic: start vertices and extensions follow the declared
    vertex order. Capped (default 10 vertices).
    """
    cap = vertex_cap(HAMILTONIAN_CAP)
    if len(g.vertices) > cap:
        raise CapExceeded(
            f"hamiltonian path search over {len(g.vertices)} vertices exceeds the cap of {cap}"
        )
    adj = _adjacency(g)
    verts = list(g.vertices)
    n = len(verts)
    paths = []
    path = []
    used = set()

    def extend(v):
        path.append(v)
        used.add(v)
        if len(path) == n:
            paths.append(tuple(path))
        else:
            for w in verts:
                if w not in used and w in adj[v]:
                    extend(w)
        path.pop()
        used.remove(v)

    for s in verts:
        extend(s)
    return paths


def count_hamiltonian_paths(g: Digraph) -> int:
    """Subset-DP count of Hamiltonian paths (no enumeration)."""
    cap = vertex_cap(HAMILTONIAN_CAP)
    n = len(g.vertices)
    if n > cap:
        raise CapExceeded(f"path count over {n} vertices exceeds the cap of {cap}")
    idx = {v: i for i, v in enumerate(g.vertices)}
    succ = [0] * n
    for u, v in g.edges:
        succ[idx[u]] |= 1 << idx[v]
    # dp[mask][v] = number of paths covering mask and ending at v
    dp = [dict() for _ in range(1 << n)]
    for v in range(n):
        dp[1 << v][v] = 1
    total = 0
    full = (1 << n) - 1
    for mask in range(1 << n):
        for v, cnt in dp[mask].items():
            if mask == full:
                total += cnt
                continue
            nxt = succ[v] & ~mask
            while nxt:
                low = nxt & -nxt
                w = low.bit_length() - 1
                m2 = mask | low
                dp[m2][w] = dp[m2].get(w, 0) + cnt
                nxt ^= low
    return total if n > 0 else 0


# ---------------------------------------------------------------------------
# bigraphs: circuits, maximal circuit-free sub-bigraphs, derived relations

def _mixed_adjacency(b: Bigraph):
    """Directed view of C u D: C edges are traversable both ways."""
    adj = {v: set() for v in b.vertices}
    for u, v in b.d_edges:
        adj[u].add(v)
    for pair in b.c_edges:
        u, v = tuple(pair)
        adj[u].add(v)
        adj[v].add(u)
    return adj


def _mixed_reachable(adj, start, goal):
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        if v == goal:
            return True
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def has_circuit(b: Bigraph) -> bool:
    """A circuit is a closed walk on distinct vertices using at least one
    directed edge, with C edges traversable in both directions.

    One exists iff some D edge (u,v) has u reachable from v in the mixed
    graph: the return walk plus the edge closes a circuit, and any closed
    walk through a D edge contains such a configuration.
    """
    adj = _mixed_adjacency(b)
    return any(_mixed_reachable(adj, v, u) for u, v in b.d_edges)


def completed_bigraph(b: Bigraph) -> tuple[Bigraph, frozenset]:
    """Add filler C edges so every vertex pair is joined; returns the filled
    bigraph and the set of filler pairs (they carry no preference data)."""
    have = {frozenset((u, v)) for u, v in b.d_edges} | set(b.c_edges)
    fillers = set()
    verts = list(b.vertices)
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            pair = frozenset((u, v))
            if pair not in have:
                fillers.add(pair)
    return (
        bigraph(b.vertices, b.d_edges, set(b.c_edges) | fillers),
        frozenset(fillers),
    )


def _path_to_order(path, c_pairs) -> Order:
    """Collapse maximal runs of C steps along a path into tie-groups."""
    groups = [[path[0]]]
    for a, z in zip(path, path[1:]):
        if frozenset((a, z)) in c_pairs:
            groups[-1].append(z)
        else:
            groups.append([z])
    return Order(tuple(tuple(sorted(g)) for g in groups))


def _compatible_subbigraph(b: Bigraph, order: Order) -> Bigraph:
    rank = order.ranks()
    d_keep = {(u, v) for u, v in b.d_edges if rank[u] < rank[v]}
    c_keep = {p for p in b.c_edges if len({rank[x] for x in p}) == 1}
    return Bigraph(b.vertices, frozenset(d_keep), frozenset(c_keep))


def maximal_circuit_free_subbigraphs(b: Bigraph):
    """Enumerate the maximal circuit-free sub-bigraphs of b.

    Each corresponds to a Hamiltonian path of the completed bigraph (missing
    pairs are filled with indifference edges for the traversal only). Paths
    that induce the same weak order describe the same sub-bigraph, so the
    result is deduplicated by order: a list of (sub-bigraph, order) pairs,
    where the sub-bigraph keeps exactly the original edges compatible with
    the order.
    """
    filled, _ = completed_bigraph(b)
    walk_pairs = {frozenset((u, v)) for u, v in filled.d_edges} | set(filled.c_edges)
    adj = {v: set() for v in filled.vertices}
    for pair in walk_pairs:
        u, v = tuple(pair)
        adj[u].add(v)
        adj[v].add(u)
    # only D edges constrain direction: a D edge may be walked u -> v only
    for u, v in filled.d_edges:
        if (v, u) not in filled.d_edges:
            adj[v].discard(u)

    cap = vertex_cap(HAMILTONIAN_CAP)
    verts = list(b.vertices)
    if len(verts) > cap:
        raise CapExceeded(
            f"sub-bigraph enumeration over {len(verts)} vertices exceeds the cap of {cap}"
        )

    paths = []
    path = []
    used = set()

    def extend(v):
        path.append(v)
        used.add(v)
        if len(path) == len(verts):
            paths.append(tuple(path))
        else:
            for w in verts:
                if w not in used and w in adj[v]:
                    extend(w)
        path.pop()
        used.remove(v)

    for s in verts:
        extend(s)

    seen = {}
    for p in paths:
        order = _path_to_order(p, set(filled.c_edges))
        if order not in seen:
            seen[order] = _compatible_subbigraph(b, order)
    return [(sub, order) for order, sub in seen.items()]


def bigraph_matrix(b: Bigraph) -> LabeledMatrix:
    """0/1 matrix of a bigraph under the closed-preference reading: M[u][v]
    is 1 when u = v, when (u,v) is a D edge, or when {u,v} is a C edge."""
    verts = list(b.vertices)
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 1
    for u, v in b.d_edges:
        rows[idx[u]][idx[v]] = 1
    for pair in b.c_edges:
        u, v = tuple(pair)
        rows[idx[u]][idx[v]] = 1
        rows[idx[v]][idx[u]] = 1
    return LabeledMatrix(tuple(verts), tuple(tuple(r) for r in rows))


def strongly_connected_components(g: Digraph):
    """Tarjan's algorithm, iterative; components listed with sorted members,
    in a deterministic order."""
    adj = _adjacency(g)
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = [0]

    for root in g.vertices:
        if root in index:
            continue
        work = [(root, iter(sorted(adj[root])))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(adj[w]))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
    return comps


def weak_components(g: Digraph):
    """Connected components with edge directions ignored; sorted members."""
    adj = {v: set() for v in g.vertices}
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = set()
    comps = []
    for s in g.vertices:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        comps.append(tuple(sorted(comp)))
    return comps


def transitive_reduction(g: Digraph) -> Digraph:
    """Smallest edge set with the same reachability; requires g acyclic."""
    closed = transitive_closure(g)
    for u, v in closed.edges:
        if (v, u) in closed.edges:
            raise CyclicRelation("transitive reduction needs an acyclic digraph")
    reach = {v: set() for v in g.vertices}
    for u, v in closed.edges:
        reach[u].add(v)
    kept = set()
    for u, v in g.edges:
        if u == v:
            continue
        if not any(v in reach[w] for w in reach[u] if w != v):
            kept.add((u, v))
    return digraph(g.vertices, kept)


@dataclass(frozen=True)
class DerivedRelations:
    """The equivalence (E), weak (W), and transitive (T) relations of a bigraph."""

    E: frozenset
    W: frozenset
    T: frozenset


def derive_relations(b: Bigraph) -> DerivedRelations:
    """E: equal or on a common loop of C u D (a loop is a closed walk on
    distinct vertices, edge directions ignored, no edge reused).
    W: equal or joined by a mixed path (D directed, C either way).
    T: joined by a directed path of D edges.
    """
    verts = list(b.vertices)

    # T: transitive closure of D, paths of length >= 1
    d_adj = {v: set() for v in verts}
    for u, v in b.d_edges:
        d_adj[u].add(v)
    t_pairs = set()
    for s in verts:
        seen = set()
        stack = [s]
        while stack:
            x = stack.pop()
            for y in d_adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        t_pairs.update((s, y) for y in seen)

    # W: reflexive mixed reachability
    m_adj = _mixed_adjacency(b)
    w_pairs = set()
    for s in verts:
        seen = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in m_adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        w_pairs.update((s, y) for y in seen)

    # E: vertices sharing a biconnected block that contains a cycle.
    # Edges are undirected and individually identified so that a directed
    # 2-cycle (or a D plus C pair) forms a genuine loop of two edges.
    edge_list = []
    for u, v in b.d_edges:
        edge_list.append((u, v))
    for pair in b.c_edges:
        u, v = tuple(pair)
        edge_list.append((u, v))
    incident = {v: [] for v in verts}
    for eid, (u, v) in enumerate(edge_list):
        incident[u].append((v, eid))
        incident[v].append((u, eid))

    e_pairs = {(v, v) for v in verts}
    disc, low = {}, {}
    counter = [0]
    stack = []

    def block_found(edges):
        if len(edges) < 2:
            return  # a bridge is not a loop
        members = set()
        for eid in edges:
            members.update(edge_list[eid])
        for x in members:
            for y in members:
                e_pairs.add((x, y))

    def dfs(root):
        # iterative biconnected-components walk keyed by edge ids
        work = [(root, None, iter(incident[root]))]
        disc[root] = low[root] = counter[0]
        counter[0] += 1
        while work:
            v, pe, it = work[-1]
            advanced = False
            for w, eid in it:
                if eid == pe:
                    continue
                if w not in disc:
                    stack.append(eid)
                    disc[w] = low[w] = counter[0]
                    counter[0] += 1
                    work.append((w, eid, iter(incident[w])))
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    stack.append(eid)
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
                if low[v] >= disc[parent]:
                    comp = []
                    while stack:
                        comp.append(stack.pop())
                        if comp[-1] == pe:
                            break
                    block_found(comp)

    for v in verts:
        if v not in disc:
            dfs(v)

    return DerivedRelations(frozenset(e_pairs), frozenset(w_pairs), frozenset(t_pairs))


# ---------------------------------------------------------------------------
# posets: Dilworth decomposition

@dataclass(frozen=True)
class Poset:
    """A finite partial order; ``below`` holds the strict pairs (u, v) = u < v."""

    elements: tuple[str, ...]
    below: frozenset


def poset(elements, pairs) -> Poset:
    """Build a poset from comparabilities (u <= v), closing transitively and
    rejecting cycles."""
    elems = tuple(elements)
    known = set(elems)
    if len(known) != len(elems):
        raise InputError("duplicate poset element")
    strict = set()
    for u, v in pairs:
        if u not in known or v not in known:
            raise UnknownVertex(f"pair ({u!r},{v!r}) uses unknown element")
        if u != v:
            strict.add((u, v))
    closed = transitive_closure(digraph(elems, strict))
    for u, v in closed.edges:
        if (v, u) in closed.edges:
            raise CyclicRelation(f"{u!r} and {v!r} are mutually below each other")
    return Poset(elems, frozenset(closed.edges))


def max_antichain(p: Poset):
    """Largest antichain and a minimum chain partition (they have equal size).

    Uses the matching construction: elements are split into left/right
    copies, comparabilities become bipartite edges, and a maximum matching
    yields n - |matching| chains; the complement of a minimum vertex cover
    gives an antichain of the same size.
    """
    elems = list(p.elements)
    idx = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    succ = [[] for _ in range(n)]
    for u, v in p.below:
        succ[idx[u]].append(idx[v])
    for s in succ:
        s.sort()

    match_right = [None] * n  # right vertex -> matched left vertex
    match_left = [None] * n

    def try_augment(u, visited):
        for v in succ[u]:
            if visited[v]:
                continue
            visited[v] = True
            if match_right[v] is None or try_augment(match_right[v], visited):
                match_right[v] = u
                match_left[u] = v
                return True
        return False

    for u in range(n):
        try_augment(u, [False] * n)

    # chains: follow matched successors from chain heads
    heads = [v for v in range(n) if match_right[v] is None]
    chains = []
    for h in heads:
        chain = [h]
        while match_left[chain[-1]] is not None:
            chain.append(match_left[chain[-1]])
        chains.append([elems[i] for i in chain])

    # Koenig: alternate from unmatched left vertices; cover = (L not reached) + (R reached)
    reached_left = [False] * n
    reached_right = [False] * n
    frontier = [u for u in range(n) if match_left[u] is None]
    for u in frontier:
        reached_left[u] = True
    while frontier:
        nxt = []
        for u in frontier:
            for v in succ[u]:
                if not reached_right[v]:
                    reached_right[v] = True
                    w = match_right[v]
                    if w is not None and not reached_left[w]:
                        reached_left[w] = True
                        nxt.append(w)
        frontier = nxt
    antichain = [
        elems[i] for i in range(n) if reached_left[i] and not reached_right[i]
    ]

    assert len(antichain) == len(chains), "matching construction out of step"
    return len(antichain), antichain, chains


# ---------------------------------------------------------------------------
# take-grant connectivity

TG_LABELS = ("take", "grant", "read", "write")
TG_KINDS = ("subject", "object")


@dataclass(frozen=True)
class TgGraph:
    kinds: dict  # vertex -> "subject" | "object"
    edges: tuple  # of (u, v, label)

    def __post_init__(self):
        for v, kind in self.kinds.items():
            if kind not in TG_KINDS:
                raise InputError(f"vertex {v!r} has unknown kind {kind!r}")
        for u, v, label in self.edges:
            if label not in TG_LABELS:
                raise InputError(f"edge label {label!r} not in {TG_LABELS}")
            if u not in self.kinds or v not in self.kinds:
                raise UnknownVertex(f"edge ({u!r},{v!r}) uses unknown vertex")


def tg_graph_from_dict(data) -> TgGraph:
    """``{"vertices": [{"id": ..., "kind": "subject"|"object"}, ...],
    "edges": [{"from": ..., "to": ..., "label": "take"|...}, ...]}``"""
    try:
        kinds = {v["id"]: v["kind"] for v in data["vertices"]}
        edges = tuple((e["from"], e["to"], e["label"]) for e in data["edges"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"take-grant JSON malformed: {exc}") from None
    if len(kinds) != len(data["vertices"]):
        raise DuplicateLabel("duplicate take-grant vertex id")
    return TgGraph(kinds, edges)


def tg_connected(g: TgGraph, s, o):
    """True iff a path joins s and o using only take/grant edges, directions
    ignored; returns the witness vertex path when one exists."""
    if s not in g.kinds:
        raise UnknownVertex(f"unknown vertex {s!r}")
    if o not in g.kinds:
        raise UnknownVertex(f"unknown vertex {o!r}")
    adj = {v: set() for v in g.kinds}
    for u, v, label in g.edges:
        if label in ("take", "grant"):
            adj[u].add(v)
            adj[v].add(u)
    prev = {s: None}
    queue = [s]
    qi = 0
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        if v == o:
            path = []
            while v is not None:
                path.append(v)
                v = prev[v]
            return True, path[::-1]
        for w in sorted(adj[v]):
            if w not in prev:
                prev[w] = v
                queue.append(w)
    return False, None
