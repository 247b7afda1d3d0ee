"""Regenerate the frozen fixtures under tests/fixtures.

Every fixture is verified before it is written: pair relations are
recomputed from scratch and the script refuses to freeze anything that
does not satisfy its claimed relation.  Running it twice produces
byte-identical files.
"""

from __future__ import annotations

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from yamada.diagram import DiagramCode, code_to_dict, make_code, yamada_r
from yamada.laurent import compare_up_to_unit
from yamada.roots import omega_member

OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures"


class _Ids:
    def __init__(self, start: int = 100):
        self.next = start

    def take(self, count: int = 1):
        out = list(range(self.next, self.next + count))
        self.next += count
        return out if count > 1 else out[0]


def braid_through(word, entries, ids):
    """Thread the strands in `entries` (top half-edge ids, left to right)
    through the positive braid word (list of 1-based generator indices).
    The strand right of each generator passes over.  Returns crossings,
    arcs, and the exposed bottom ids."""
    entries = list(entries)
    crossings = []
    arcs = []
    for pos in word:
        i = pos - 1
        cid = ids.take()
        nw, sw, se, ne = ids.take(4)
        crossings.append((cid, (nw, sw, se, ne), (sw, ne)))
        arcs.append((entries[i], nw))
        arcs.append((entries[i + 1], ne))
        entries[i] = sw
        entries[i + 1] = se
    return crossings, arcs, entries


def braid_closure(word, strands: int) -> DiagramCode:
    """Plat-free closure of a positive braid word: each strand's bottom
    is joined back to its own top around the side."""
    ids = _Ids()
    firsts = [None] * strands
    carriers = [None] * strands
    crossings = []
    arcs = []
    for pos in word:
        i = pos - 1
        cid = ids.take()
        nw, sw, se, ne = ids.take(4)
        crossings.append((cid, (nw, sw, se, ne), (sw, ne)))
        for slot, top in ((i, nw), (i + 1, ne)):
            if carriers[slot] is None:
                firsts[slot] = top
            else:
                arcs.append((carriers[slot], top))
        carriers[i] = sw
        carriers[i + 1] = se
    for j in range(strands):
        if firsts[j] is None:
            raise ValueError(f"strand {j + 1} never crosses; closure would "
                             "add a free loop")
        arcs.append((carriers[j], firsts[j]))
    return make_code([], crossings, arcs)


def flat_theta(edges: int = 3) -> DiagramCode:
    ids = _Ids()
    a = ids.take(edges)
    b = ids.take(edges)
    return make_code(
        [(1, tuple(a)), (2, tuple(b))], [], [(a[i], b[i]) for i in range(edges)]
    )


def twisted_theta(edges: int = 3) -> DiagramCode:
    """Theta bundle with a positive half twist at the top vertex: the
    strands run from vertex 2 through the half-twist braid (every pair
    crosses once) and on to vertex 1."""
    ids = _Ids()
    a = ids.take(edges)
    b = ids.take(edges)
    word = []
    for width in range(edges - 1, 0, -1):
        word.extend(range(1, width + 1))
    crossings, arcs, bottoms = braid_through(word, b, ids)
    arcs = arcs + [(bottoms[i], a[i]) for i in range(edges)]
    return make_code([(1, tuple(a)), (2, tuple(b))], crossings, arcs)


def encircled_theta(edges: int = 3) -> DiagramCode:
    """Theta bundle with a circle around its neck, passing under every
    strand once; sliding the circle off over a vertex frees it."""
    ids = _Ids()
    a = ids.take(edges)
    b = ids.take(edges)
    w1, w2 = ids.take(2)
    crossings = []
    arcs = []
    carrier = w1
    for i in range(edges):
        cid = ids.take()
        top, left, bottom, right = ids.take(4)
        crossings.append((cid, (top, left, bottom, right), (top, bottom)))
        arcs.append((a[i], bottom))
        arcs.append((top, b[i]))
        arcs.append((carrier, left))
        carrier = right
    arcs.append((carrier, w2))
    return make_code(
        [(1, tuple(a)), (2, tuple(b)), (3, (w1, w2))], crossings, arcs
    )


def theta_beside_circle(edges: int = 3) -> DiagramCode:
    """Theta bundle and a disjoint marked circle."""
    ids = _Ids()
    a = ids.take(edges)
    b = ids.take(edges)
    w1, w2 = ids.take(2)
    arcs = [(a[i], b[i]) for i in range(edges)] + [(w1, w2)]
    return make_code(
        [(1, tuple(a)), (2, tuple(b)), (3, (w1, w2))], [], arcs
    )


def find_omega_false_point() -> dict:
    """Scan the square [-2, 2]^2 for a point outside the dominance
    region; the scan order makes the hit deterministic."""
    step = 0.05
    span = 80
    for iy in range(span + 1):
        for ix in range(span + 1):
            z = complex(-2.0 + ix * step, -2.0 + iy * step)
            if abs(z) < 1e-9:
                continue
            if not omega_member(z):
                return {
                    "re": z.real,
                    "im": z.imag,
                    "grid": {"min": -2.0, "max": 2.0, "step": step},
                }
    raise RuntimeError("no point outside the region in the scanned square")


def freeze_pair(name: str, move: str, relation: str, left, right) -> None:
    rl = yamada_r(left)
    rr = yamada_r(right)
    if relation == "exact":
        if rl != rr:
            raise RuntimeError(f"{name}: pair is not exactly equal")
    elif relation == "unit":
        if compare_up_to_unit(rl, rr) is None:
            raise RuntimeError(f"{name}: pair is not unit-equivalent")
    else:
        raise ValueError(relation)
    payload = {
        "move": move,
        "relation": relation,
        "left": code_to_dict(left),
        "right": code_to_dict(right),
    }
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    print(f"wrote {path.name} ({relation})")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    freeze_pair(
        "move_pair_r3",
        "r3",
        "exact",
        braid_closure([1, 2, 1], 3),
        braid_closure([2, 1, 2], 3),
    )
    freeze_pair(
        "move_pair_r4", "r4", "exact", encircled_theta(), theta_beside_circle()
    )
    freeze_pair(
        "move_pair_r5", "r5", "unit", twisted_theta(), flat_theta()
    )

    point = find_omega_false_point()
    path = OUT / "omega_false_point.json"
    path.write_text(json.dumps(point, sort_keys=True, indent=1) + "\n")
    print(f"wrote {path.name} at {point['re']:+.2f}{point['im']:+.2f}i")


if __name__ == "__main__":
    main()
