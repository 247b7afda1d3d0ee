"""Abstract multigraphs (loops and parallel edges allowed) and their
polynomial invariants: the Yamada polynomial H by deletion-contraction, an
independent subset-expansion route, and the integer flow polynomial.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .errors import YamadaError
from .laurent import LaurentPoly, sigma


class UnknownEdge(YamadaError):
    pass


class ContractLoop(YamadaError):
    pass


class TooLarge(YamadaError):
    pass


Edge = tuple[int, int, int]  # (edge id, endpoint, endpoint)


@dataclass(frozen=True)
class Multigraph:
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]

    def edge_count(self) -> int:
        return len(self.edges)

    def vertex_count(self) -> int:
        return len(self.vertices)

    def find_edge(self, eid: int) -> Edge:
        for e in self.edges:
            if e[0] == eid:
                return e
        raise UnknownEdge(f"no edge with id {eid}")


def make_graph(vertices: Iterable[int], edges: Iterable[tuple[int, int, int]]) -> Multigraph:
    vs = tuple(sorted(set(vertices)))
    vset = set(vs)
    es = []
    seen = set()
    for eid, u, v in edges:
        if eid in seen:
            raise ValueError(f"duplicate edge id {eid}")
        seen.add(eid)
        if u not in vset or v not in vset:
            raise ValueError(f"edge {eid} has endpoint outside the vertex set")
        es.append((eid, u, v))
    es.sort()
    return Multigraph(vs, tuple(es))


def delete_edge(g: Multigraph, eid: int) -> Multigraph:
    g.find_edge(eid)
    return Multigraph(g.vertices, tuple(e for e in g.edges if e[0] != eid))


def contract_edge(g: Multigraph, eid: int) -> Multigraph:
    _, u, v = g.find_edge(eid)
    if u == v:
        raise ContractLoop(f"edge {eid} is a loop")
    keep, drop = min(u, v), max(u, v)

    def moved(w: int) -> int:
        return keep if w == drop else w

    edges = tuple(
        (i, moved(a), moved(b)) for i, a, b in g.edges if i != eid
    )
    vertices = tuple(w for w in g.vertices if w != drop)
    return Multigraph(vertices, edges)


def components_betti(g: Multigraph) -> tuple[int, int]:
    """(number of connected components, first Betti number q - p + mu)."""
    parent = {v: v for v in g.vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    mu = len({find(v) for v in g.vertices})
    beta = len(g.edges) - len(g.vertices) + mu
    return mu, beta


def _has_bridge(edges: list[Edge], vertices: set[int]) -> bool:
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in vertices}
    for eid, u, v in edges:
        if u == v:
            continue
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    index = {}
    low = {}
    counter = [0]

    for root in vertices:
        if root in index:
            continue
        # iterative DFS tracking the edge used to enter each vertex, so a
        # parallel copy of the entry edge still gives a back edge
        stack = [(root, -1, iter(adj[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        while stack:
            v, in_edge, it = stack[-1]
            advanced = False
            for w, eid in it:
                if eid == in_edge:
                    continue
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append((w, eid, iter(adj[w])))
                    advanced = True
                    break
                low[v] = min(low[v], index[w])
            if not advanced:
                stack.pop()
                if stack:
                    pv = stack[-1][0]
                    low[pv] = min(low[pv], low[v])
                    if low[v] > index[pv]:
                        return True
        continue
    return False


def _h_recursive(
    edges: list[Edge], vertices: set[int], memo: dict
) -> LaurentPoly:
    sig = sigma()
    loops = [e for e in edges if e[1] == e[2]]
    core = [e for e in edges if e[1] != e[2]]
    factor_sign = 1
    factor = LaurentPoly.one()
    if loops:
        factor = (-sig) ** len(loops)
    touched = set()
    for _, u, v in core:
        touched.add(u)
        touched.add(v)
    isolated = len(vertices) - len(touched)
    if isolated % 2:
        factor_sign = -1
    if not core:
        return factor * factor_sign
    verts = touched
    # delete and contract commute, so the recursion revisits the same
    # minor along many branch orders; cache on the stripped core
    key = tuple(core)
    hit = memo.get(key)
    if hit is None:
        if _has_bridge(core, verts):
            hit = LaurentPoly.zero()
        else:
            eid, u, v = min(core)
            rest = [e for e in core if e[0] != eid]
            deleted = _h_recursive(rest, verts, memo)
            keep, drop = min(u, v), max(u, v)
            merged = [
                (i, keep if a == drop else a, keep if b == drop else b)
                for i, a, b in rest
            ]
            contracted = _h_recursive(merged, verts - {drop}, memo)
            hit = contracted + deleted
        memo[key] = hit
    return factor * factor_sign * hit


def yamada_h(
    g: Multigraph, max_edges: int | None = 16, memo: dict | None = None
) -> LaurentPoly:
    """Yamada polynomial H of an abstract multigraph.

    Deletion-contraction with the single-vertex graph valued at -1, loops
    contributing a factor of -sigma, and any isthmus collapsing the whole
    polynomial to zero.  Exponential in the worst case; max_edges is the
    recursion guard (None disables it).  A memo dictionary may be passed
    in to share reached minors across many related calls.
    """
    if max_edges is not None and len(g.edges) > max_edges:
        raise TooLarge(f"{len(g.edges)} edges exceeds the guard {max_edges}")
    return _h_recursive(list(g.edges), set(g.vertices), {} if memo is None else memo)


def yamada_h_subset_sum(g: Multigraph, max_edges: int | None = 14) -> LaurentPoly:
    """Independent route to H: expand over all edge subsets F, weighting
    G - F by (-1)^(mu+beta) (sigma+1)^beta.  Exponential by construction;
    used as an oracle against yamada_h.
    """
    q = len(g.edges)
    if max_edges is not None and q > max_edges:
        raise TooLarge(f"{q} edges exceeds the guard {max_edges}")
    sig1 = sigma() + 1
    powers = [LaurentPoly.one()]
    for _ in range(q):
        powers.append(powers[-1] * sig1)
    vs = list(g.vertices)
    vindex = {v: i for i, v in enumerate(vs)}
    p = len(vs)
    total = LaurentPoly.zero()
    for mask in range(1 << q):
        parent = list(range(p))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        kept = 0
        for i, (_, u, v) in enumerate(g.edges):
            if mask >> i & 1:
                continue
            kept += 1
            ru, rv = find(vindex[u]), find(vindex[v])
            if ru != rv:
                parent[ru] = rv
        mu = sum(1 for i in range(p) if find(i) == i)
        beta = kept - p + mu
        term = powers[beta] if (mu + beta) % 2 == 0 else -powers[beta]
        total = total + term
    return total


def _flow_recursive(edges: list[Edge]) -> LaurentPoly:
    t_minus_1 = LaurentPoly({1: 1, 0: -1})
    loops = sum(1 for e in edges if e[1] == e[2])
    core = [e for e in edges if e[1] != e[2]]
    factor = t_minus_1 ** loops if loops else LaurentPoly.one()
    if not core:
        return factor
    verts = {u for _, u, v in core for u in (u, v)}
    if _has_bridge(core, verts):
        return LaurentPoly.zero()
    eid, u, v = min(core)
    rest = [e for e in core if e[0] != eid]
    keep, drop = min(u, v), max(u, v)
    merged = [
        (i, keep if a == drop else a, keep if b == drop else b)
        for i, a, b in rest
    ]
    return factor * (_flow_recursive(merged) - _flow_recursive(rest))


def flow_polynomial(g: Multigraph, max_edges: int | None = 16) -> LaurentPoly:
    """Integer flow polynomial in the variable t: 1 on edgeless graphs,
    0 whenever a bridge exists, factor (t-1) per loop, else contract minus
    delete on the smallest edge id."""
    if max_edges is not None and len(g.edges) > max_edges:
        raise TooLarge(f"{len(g.edges)} edges exceeds the guard {max_edges}")
    return _flow_recursive(list(g.edges))


def graph_to_dict(g: Multigraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [list(e) for e in g.edges],
    }


def graph_from_dict(d: dict) -> Multigraph:
    try:
        vertices = d["vertices"]
        edges = [tuple(e) for e in d["edges"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph object: {exc}") from exc
    for e in edges:
        if len(e) != 3:
            raise ValueError(f"edge entries must be [id, u, v], got {list(e)}")
    return make_graph(vertices, edges)


def graph_to_json(g: Multigraph) -> str:
    return json.dumps(graph_to_dict(g), sort_keys=True)


def graph_from_json(text: str) -> Multigraph:
    return graph_from_dict(json.loads(text))


def cycle_graph(n: int) -> Multigraph:
    if n < 1:
        raise ValueError("cycle needs at least one edge")
    return make_graph(range(n), [(i, i, (i + 1) % n) for i in range(n)])


def bouquet_graph(q: int) -> Multigraph:
    return make_graph([0], [(i, 0, 0) for i in range(q)])


def theta_graph(s: int) -> Multigraph:
    if s < 1:
        raise ValueError("theta needs at least one strand")
    return make_graph([0, 1], [(i, 0, 1) for i in range(s)])


def tree_graph(edges: int) -> Multigraph:
    return make_graph(range(edges + 1), [(i, i, i + 1) for i in range(edges)])
