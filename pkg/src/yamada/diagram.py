"""Combinatorial diagram codes for spatial graphs and their state-sum
Yamada polynomial R.

A code lists graph vertices and crossings, each carrying counterclockwise
cyclic lists of half-edge ids, plus arcs pairing up all half-edges.  Each
crossing designates one opposite pair of its ends as the over strand.

Smoothing convention, frozen by the calibration test R[one positive
twist] = A^-2 * sigma: with ends counterclockwise [e0, e1, e2, e3] and the
over pair at positions (i, i+2), the +1 spin welds (e_i, e_{i+1}) and
(e_{i+2}, e_{i+3}), the -1 spin welds the clockwise pairs, and the 0 spin
turns the crossing into a degree-4 graph vertex.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import YamadaError
from .laurent import LaurentPoly
from .multigraph import Multigraph, TooLarge, yamada_h


class DanglingHalfEdge(YamadaError):
    pass


class BadCrossingArity(YamadaError):
    """The four ends or the over designation of a crossing are malformed."""


class DuplicateHalfEdge(YamadaError):
    pass


class DuplicateSiteId(YamadaError):
    pass


class PartialAssignment(YamadaError):
    pass


class NoAttachPair(YamadaError):
    pass


class MoveNotApplicable(YamadaError):
    pass


Vertex = tuple[int, tuple[int, ...]]
Crossing = tuple[int, tuple[int, int, int, int], tuple[int, int]]


def _rotate_min_first(ends: tuple[int, ...]) -> tuple[int, ...]:
    if not ends:
        return ends
    i = ends.index(min(ends))
    return ends[i:] + ends[:i]


@dataclass(frozen=True)
class DiagramCode:
    vertices: tuple[Vertex, ...]
    crossings: tuple[Crossing, ...]
    arcs: tuple[tuple[int, int], ...]
    attach: tuple[int, int] | None = None

    def crossing_ids(self) -> list[int]:
        return [c[0] for c in self.crossings]

    def half_edges(self) -> list[int]:
        out = []
        for _, ends in self.vertices:
            out.extend(ends)
        for _, ends, _ in self.crossings:
            out.extend(ends)
        return out

    def find_crossing(self, cid: int) -> Crossing:
        for c in self.crossings:
            if c[0] == cid:
                return c
        raise MoveNotApplicable(f"no crossing with id {cid}")


def make_code(
    vertices: Iterable[tuple[int, Iterable[int]]],
    crossings: Iterable[tuple[int, Iterable[int], Iterable[int]]],
    arcs: Iterable[tuple[int, int]],
    attach: tuple[int, int] | None = None,
) -> DiagramCode:
    """Canonicalize: cyclic lists rotated so the minimum id comes first,
    arc pairs and the arc list sorted, sites sorted by id."""
    vs = tuple(
        sorted((vid, _rotate_min_first(tuple(ends))) for vid, ends in vertices)
    )
    cs = []
    for cid, ends, over in crossings:
        ends = _rotate_min_first(tuple(ends))
        over = tuple(sorted(over))
        cs.append((cid, ends, over))
    arcs_norm = tuple(sorted(tuple(sorted(a)) for a in arcs))
    return DiagramCode(vs, tuple(sorted(cs)), arcs_norm, attach)


@dataclass(frozen=True)
class DiagramReport:
    faces: int
    genus: int
    planar: bool


def validate(code: DiagramCode) -> DiagramReport:
    """Check the structural identities and diagnose planarity.

    Structural violations raise; a nonzero genus only clears the planar
    flag, since the state sum never looks at the embedding.
    """
    site_ids = [vid for vid, _ in code.vertices] + [c[0] for c in code.crossings]
    if len(site_ids) != len(set(site_ids)):
        raise DuplicateSiteId("vertex and crossing ids must be distinct")
    seen: dict[int, int] = {}
    for vid, ends in code.vertices:
        for h in ends:
            if h in seen:
                raise DuplicateHalfEdge(f"half-edge {h} appears on two sites")
            seen[h] = vid
    for cid, ends, over in code.crossings:
        if len(ends) != 4 or len(set(ends)) != 4:
            raise BadCrossingArity(f"crossing {cid} needs four distinct ends")
        for h in ends:
            if h in seen:
                raise DuplicateHalfEdge(f"half-edge {h} appears on two sites")
            seen[h] = cid
        if len(over) != 2 or not set(over) <= set(ends):
            raise BadCrossingArity(f"crossing {cid} over pair must be two of its ends")
        if (ends.index(over[1]) - ends.index(over[0])) % 4 != 2:
            raise BadCrossingArity(
                f"crossing {cid} over pair must be opposite in the cyclic order"
            )
    in_arcs: set[int] = set()
    for a, b in code.arcs:
        for h in (a, b):
            if h not in seen:
                raise DanglingHalfEdge(f"arc end {h} sits on no site")
            if h in in_arcs:
                raise DuplicateHalfEdge(f"half-edge {h} appears in two arcs")
            in_arcs.add(h)
    missing = set(seen) - in_arcs
    if missing:
        raise DanglingHalfEdge(f"half-edges not covered by arcs: {sorted(missing)}")
    if code.attach is not None:
        u, v = code.attach
        vertex_ids = {vid for vid, _ in code.vertices}
        if u == v or u not in vertex_ids or v not in vertex_ids:
            raise NoAttachPair(f"attach pair {code.attach} must name two distinct vertices")
    faces = _face_count(code)
    v_count = len(code.vertices) + len(code.crossings)
    e_count = len(code.arcs)
    mu = _site_components(code)
    genus2 = 2 * mu - (v_count - e_count + faces)
    genus = genus2 // 2
    return DiagramReport(faces=faces, genus=genus, planar=genus == 0)


def _face_count(code: DiagramCode) -> int:
    ccw_next: dict[int, int] = {}
    for _, ends in code.vertices:
        for i, h in enumerate(ends):
            ccw_next[h] = ends[(i + 1) % len(ends)]
    for _, ends, _ in code.crossings:
        for i, h in enumerate(ends):
            ccw_next[h] = ends[(i + 1) % len(ends)]
    mate: dict[int, int] = {}
    for a, b in code.arcs:
        mate[a] = b
        mate[b] = a
    unvisited = set(mate)
    faces = 0
    while unvisited:
        h = min(unvisited)
        faces += 1
        cur = h
        while cur in unvisited:
            unvisited.discard(cur)
            cur = mate[ccw_next[cur]]
    return faces


def _site_components(code: DiagramCode) -> int:
    site_of: dict[int, int] = {}
    for vid, ends in code.vertices:
        for h in ends:
            site_of[h] = vid
    for cid, ends, _ in code.crossings:
        for h in ends:
            site_of[h] = cid
    ids = [vid for vid, _ in code.vertices] + [c[0] for c in code.crossings]
    parent = {i: i for i in ids}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in code.arcs:
        ra, rb = find(site_of[a]), find(site_of[b])
        if ra != rb:
            parent[ra] = rb
    return len({find(i) for i in ids})


def _smoothing_pairs(ends: tuple[int, ...], over: tuple[int, int], spin: int):
    i = ends.index(over[0])
    if i >= 2:
        i -= 2
    if spin == 1:
        return (
            (ends[i], ends[(i + 1) % 4]),
            (ends[(i + 2) % 4], ends[(i + 3) % 4]),
        )
    return (
        (ends[i], ends[(i - 1) % 4]),
        (ends[(i + 2) % 4], ends[(i + 1) % 4]),
    )


class _HalfEdgeUnion:
    def __init__(self, items: Iterable[int]):
        self.parent = {h: h for h in items}

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def components(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for h in self.parent:
            out.setdefault(self.find(h), []).append(h)
        return out


def resolve(code: DiagramCode, spins: Mapping[int, int]) -> Multigraph:
    """Replace every crossing according to its spin and return the abstract
    multigraph of the state.  Strands that close up without touching any
    vertex become an isolated vertex carrying one loop, which contributes
    the same factor of sigma to H as a free circle."""
    cids = set(code.crossing_ids())
    if set(spins) != cids or any(spins[c] not in (-1, 0, 1) for c in cids):
        raise PartialAssignment("spins must map every crossing to -1, 0 or +1")
    anchor_site: dict[int, int] = {}
    for vid, ends in code.vertices:
        for h in ends:
            anchor_site[h] = vid
    for cid, ends, over in code.crossings:
        if spins[cid] == 0:
            for h in ends:
                anchor_site[h] = cid
    uf = _HalfEdgeUnion(code.half_edges())
    for a, b in code.arcs:
        uf.union(a, b)
    for cid, ends, over in code.crossings:
        spin = spins[cid]
        if spin != 0:
            for a, b in _smoothing_pairs(ends, over, spin):
                uf.union(a, b)
    site_ids = [vid for vid, _ in code.vertices] + [
        cid for cid in sorted(cids) if spins[cid] == 0
    ]
    next_free = max(site_ids, default=0) + 1
    strands = []
    circles = []
    for root, members in sorted(uf.components().items(), key=lambda kv: min(kv[1])):
        ends_here = sorted(h for h in members if h in anchor_site)
        if len(ends_here) == 2:
            strands.append((anchor_site[ends_here[0]], anchor_site[ends_here[1]]))
        elif not ends_here:
            circles.append(min(members))
        else:
            raise AssertionError("strand with an odd number of anchored ends")
    vertices = list(site_ids)
    edges = [(i, u, v) for i, (u, v) in enumerate(strands)]
    for c_min in sorted(circles):
        vertices.append(next_free)
        edges.append((len(edges), next_free, next_free))
        next_free += 1
    return Multigraph(tuple(sorted(vertices)), tuple(edges))


def yamada_r(code: DiagramCode, max_crossings: int | None = 14) -> LaurentPoly:
    """State-sum Yamada polynomial over all 3^c spin assignments, each state
    weighted by A^(plus spins - minus spins)."""
    cids = sorted(code.crossing_ids())
    if max_crossings is not None and len(cids) > max_crossings:
        raise TooLarge(
            f"{len(cids)} crossings exceeds the guard {max_crossings}"
        )
    total = LaurentPoly.zero()
    memo: dict = {}
    for combo in itertools.product((1, -1, 0), repeat=len(cids)):
        spins = dict(zip(cids, combo))
        weight = sum(s for s in combo if s != 0)
        state_h = yamada_h(resolve(code, spins), max_edges=None, memo=memo)
        total = total + LaurentPoly.monomial(1, weight) * state_h
    return total


def smooth_crossing(code: DiagramCode, cid: int, spin: int) -> DiagramCode:
    """Partial resolution of one crossing as a new code: spin 0 turns it
    into a graph vertex, spins +-1 weld its ends pairwise."""
    crossing = code.find_crossing(cid)
    _, ends, over = crossing
    rest = tuple(c for c in code.crossings if c[0] != cid)
    if spin == 0:
        return make_code(
            list(code.vertices) + [(cid, ends)], rest, code.arcs, code.attach
        )
    if spin not in (1, -1):
        raise PartialAssignment(f"spin must be -1, 0 or +1, got {spin}")
    welds = _smoothing_pairs(ends, over, spin)
    return _eliminate(code, {cid}, welds)


def _eliminate(
    code: DiagramCode, removed: set[int], welds: Iterable[tuple[int, int]]
) -> DiagramCode:
    """Drop the given crossings, welding their half-edges along the given
    pairs, and rebuild the arc list.  Weld chains that close on themselves
    become a fresh degree-2 vertex holding a self-arc (a free circle)."""
    keep_vertices = list(code.vertices)
    keep_crossings = tuple(c for c in code.crossings if c[0] not in removed)
    gone_ends = set()
    for c in code.crossings:
        if c[0] in removed:
            gone_ends.update(c[1])
    uf = _HalfEdgeUnion(code.half_edges())
    for a, b in code.arcs:
        uf.union(a, b)
    for a, b in welds:
        uf.union(a, b)
    new_arcs = []
    used_ids = set(code.half_edges()) | {vid for vid, _ in code.vertices}
    used_ids.update(c[0] for c in code.crossings)
    next_id = max(used_ids, default=0) + 1
    for root, members in sorted(uf.components().items(), key=lambda kv: min(kv[1])):
        outer = sorted(h for h in members if h not in gone_ends)
        if len(outer) == 2:
            new_arcs.append((outer[0], outer[1]))
        elif not outer:
            keep_vertices.append((next_id, (next_id + 1, next_id + 2)))
            new_arcs.append((next_id + 1, next_id + 2))
            next_id += 3
        else:
            raise AssertionError("weld chain with an odd number of open ends")
    return make_code(keep_vertices, keep_crossings, new_arcs, code.attach)


def mirror(code: DiagramCode) -> DiagramCode:
    """Swap every over designation to the other diagonal."""
    cs = []
    for cid, ends, over in code.crossings:
        other = tuple(h for h in ends if h not in over)
        cs.append((cid, ends, other))
    return make_code(code.vertices, cs, code.arcs, code.attach)


def close_piece(code: DiagramCode) -> DiagramCode:
    """Merge the two attachment vertices into one, concatenating their
    counterclockwise end lists."""
    if code.attach is None:
        raise NoAttachPair("code has no attach pair")
    u, v = code.attach
    u_ends = v_ends = None
    rest = []
    for vid, ends in code.vertices:
        if vid == u:
            u_ends = ends
        elif vid == v:
            v_ends = ends
        else:
            rest.append((vid, ends))
    if u_ends is None or v_ends is None:
        raise NoAttachPair(f"attach pair {code.attach} must name two distinct vertices")
    rest.append((u, u_ends + v_ends))
    return make_code(rest, code.crossings, code.arcs, None)


def build_twist(k: int, sign: str = "+") -> DiagramCode:
    """Open twist piece: two attachment vertices joined by a band of k
    crossings of the given sign.  k = 0 is the plain edge piece."""
    if k < 0:
        raise ValueError("twist length must be nonnegative")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if k == 0:
        return make_code(
            [(1, (10,)), (2, (11,))], [], [(10, 11)], attach=(1, 2)
        )
    vertices = [(1, (10, 11)), (2, (12, 13))]
    crossings = []
    arcs = []
    # crossing i has ends counterclockwise [NW, SW, SE, NE]
    def ends_of(i: int) -> tuple[int, int, int, int]:
        base = 14 + 4 * (i - 1)
        return (base, base + 1, base + 2, base + 3)

    for i in range(1, k + 1):
        nw, sw, se, ne = ends_of(i)
        over = (sw, ne) if sign == "+" else (nw, se)
        crossings.append((100 + i, (nw, sw, se, ne), over))
    first = ends_of(1)
    arcs.append((10, first[0]))
    arcs.append((11, first[1]))
    for i in range(1, k):
        cur, nxt = ends_of(i), ends_of(i + 1)
        arcs.append((cur[2], nxt[1]))  # SE to next SW
        arcs.append((cur[3], nxt[0]))  # NE to next NW
    last = ends_of(k)
    arcs.append((last[2], 12))
    arcs.append((last[3], 13))
    return make_code(vertices, crossings, arcs, attach=(1, 2))


def apply_move(code: DiagramCode, move: str, **args) -> DiagramCode:
    """Executable local moves.  Insertions allocate fresh ids; removals
    check the local pattern and raise MoveNotApplicable when it is absent.
    The face-sharing premise of r2_insert is the caller's responsibility.
    """
    if move == "r1_insert":
        return _r1_insert(code, tuple(args["arc"]), args.get("sign", "+"))
    if move == "r1_remove":
        return _r1_remove(code, args["crossing"])
    if move == "r2_insert":
        return _r2_insert(code, tuple(args["arc_a"]), tuple(args["arc_b"]))
    if move == "r2_remove":
        return _r2_remove(code, args["crossing_a"], args["crossing_b"])
    raise MoveNotApplicable(f"unknown move {move!r}")


def _fresh_ids(code: DiagramCode, count: int) -> list[int]:
    used = set(code.half_edges())
    used.update(vid for vid, _ in code.vertices)
    used.update(c[0] for c in code.crossings)
    start = max(used, default=0) + 1
    return list(range(start, start + count))


def _find_arc(code: DiagramCode, arc: tuple[int, int]) -> tuple[int, int]:
    key = tuple(sorted(arc))
    if key not in code.arcs:
        raise MoveNotApplicable(f"arc {arc} not in the code")
    return key


def _r1_insert(code: DiagramCode, arc: tuple[int, int], sign: str) -> DiagramCode:
    h1, h2 = _find_arc(code, arc)
    if sign not in ("+", "-"):
        raise MoveNotApplicable("r1_insert sign must be '+' or '-'")
    cid, e0, e1, e2, e3 = _fresh_ids(code, 5)
    # kink: strand h1 -> e0, loop arc (e1, e2), strand e3 -> h2; the strand
    # passes the crossing on the diagonals (e0,e2) and (e1,e3)
    over = (e0, e2) if sign == "+" else (e1, e3)
    arcs = [a for a in code.arcs if a != (h1, h2)]
    arcs += [(h1, e0), (e1, e2), (e3, h2)]
    crossings = list(code.crossings) + [(cid, (e0, e1, e2, e3), over)]
    return make_code(code.vertices, crossings, arcs, code.attach)


def _kink_arc(code: DiagramCode, crossing: Crossing) -> tuple[int, int] | None:
    cid, ends, _ = crossing
    for a, b in code.arcs:
        if a in ends and b in ends:
            i, j = ends.index(a), ends.index(b)
            if (i - j) % 4 in (1, 3):
                return (a, b)
    return None


def _r1_remove(code: DiagramCode, cid: int) -> DiagramCode:
    crossing = code.find_crossing(cid)
    if _kink_arc(code, crossing) is None:
        raise MoveNotApplicable(f"crossing {cid} is not a kink")
    _, ends, _ = crossing
    welds = ((ends[0], ends[2]), (ends[1], ends[3]))
    return _eliminate(code, {cid}, welds)


def _r2_insert(code: DiagramCode, arc_a: tuple[int, int], arc_b: tuple[int, int]) -> DiagramCode:
    a_key = _find_arc(code, arc_a)
    b_key = _find_arc(code, arc_b)
    if a_key == b_key:
        raise MoveNotApplicable("r2_insert needs two distinct arcs")
    a1, a2 = a_key
    b1, b2 = b_key
    ids = _fresh_ids(code, 10)
    c_id, d_id = ids[0], ids[1]
    ce, cn, cw, cs = ids[2:6]
    de, dn, dw, ds = ids[6:10]
    # strand a passes under-side positions west-east at both crossings and
    # is the over strand at both; strand b passes south-north
    crossings = list(code.crossings) + [
        (c_id, (ce, cn, cw, cs), (ce, cw)),
        (d_id, (de, dn, dw, ds), (de, dw)),
    ]
    arcs = [x for x in code.arcs if x not in (a_key, b_key)]
    arcs += [
        (a1, cw), (ce, de), (dw, a2),
        (b1, cs), (cn, ds), (dn, b2),
    ]
    return make_code(code.vertices, crossings, arcs, code.attach)


def _r2_remove(code: DiagramCode, cid_a: int, cid_b: int) -> DiagramCode:
    ca = code.find_crossing(cid_a)
    cb = code.find_crossing(cid_b)
    if cid_a == cid_b:
        raise MoveNotApplicable("r2_remove needs two distinct crossings")
    _, ends_a, over_a = ca
    _, ends_b, over_b = cb
    bigon = [
        (x, y)
        for x, y in code.arcs
        if (x in ends_a and y in ends_b) or (x in ends_b and y in ends_a)
    ]
    for (p, q), (p2, q2) in itertools.combinations(bigon, 2):
        if p in ends_b:
            p, q = q, p
        if p2 in ends_b:
            p2, q2 = q2, p2
        ia, ia2 = ends_a.index(p), ends_a.index(p2)
        ib, ib2 = ends_b.index(q), ends_b.index(q2)
        if (ia2 - ia) % 4 not in (1, 3) or (ib2 - ib) % 4 not in (1, 3):
            continue
        # the bigon must be orientation coherent: counterclockwise at one
        # crossing pairs with clockwise at the other
        if (ia2 - ia) % 4 == (ib2 - ib) % 4:
            continue
        over_p = p in over_a
        over_q = q in over_b
        over_p2 = p2 in over_a
        over_q2 = q2 in over_b
        if over_p != over_q or over_p2 != over_q2 or over_p == over_p2:
            continue
        welds = (
            (ends_a[0], ends_a[2]),
            (ends_a[1], ends_a[3]),
            (ends_b[0], ends_b[2]),
            (ends_b[1], ends_b[3]),
        )
        return _eliminate(code, {cid_a, cid_b}, welds)
    raise MoveNotApplicable(
        f"crossings {cid_a} and {cid_b} do not bound a removable bigon"
    )


def code_to_dict(code: DiagramCode) -> dict:
    d = {
        "vertices": [
            {"id": vid, "ends": list(ends)} for vid, ends in code.vertices
        ],
        "crossings": [
            {"id": cid, "ends": list(ends), "over": list(over)}
            for cid, ends, over in code.crossings
        ],
        "arcs": [list(a) for a in code.arcs],
    }
    if code.attach is not None:
        d["attach"] = list(code.attach)
    return d


def code_from_dict(d: dict) -> DiagramCode:
    try:
        vertices = [(v["id"], tuple(v["ends"])) for v in d.get("vertices", [])]
        crossings = [
            (c["id"], tuple(c["ends"]), tuple(c["over"]))
            for c in d.get("crossings", [])
        ]
        arcs = [tuple(a) for a in d["arcs"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed diagram object: {exc}") from exc
    attach = tuple(d["attach"]) if "attach" in d and d["attach"] is not None else None
    for a in arcs:
        if len(a) != 2:
            raise ValueError(f"arcs must be pairs, got {list(a)}")
    if attach is not None and len(attach) != 2:
        raise ValueError("attach must be a pair of vertex ids")
    return make_code(vertices, crossings, arcs, attach)


def code_to_json(code: DiagramCode) -> str:
    return json.dumps(code_to_dict(code), sort_keys=True)


def code_from_json(text: str) -> DiagramCode:
    return code_from_dict(json.loads(text))
