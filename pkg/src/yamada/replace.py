"""Composition laws: gluing invariants of spatial-graph pieces into the
invariant of the assembled object.

A piece is an open spatial graph with two marked posts.  Everything here
works from its pair of invariants (open value, value after the posts are
identified): two-vertex unions, cycle/theta/bouquet assemblies of beads,
chain-polynomial edge replacement, closed forms for twist bands, and the
cycle-of-theta-of-twists family whose roots the `roots` module chases.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .chain import chain_polynomial
from .diagram import DiagramCode, make_code
from .errors import YamadaError
from .laurent import LaurentPoly, RationalFn, exact_div, sigma
from .multigraph import Multigraph, TooLarge


class ArityMismatch(YamadaError):
    pass


class BetaZero(YamadaError):
    pass


class DegreeCap(YamadaError):
    pass


@dataclass(frozen=True)
class PieceInvariants:
    """Open value and closed (posts identified) value of a two-post piece."""

    r: LaurentPoly
    r_closed: LaurentPoly

    def mirrored(self) -> "PieceInvariants":
        return PieceInvariants(self.r.mirror(), self.r_closed.mirror())


class AlphaBetaGamma:
    """The substitution data of a piece for the chain-polynomial route.

    alpha = ((sigma+1)*r + r_closed) / sigma and beta = (r + r_closed) / sigma
    recover the inputs through r = alpha - beta and r_closed =
    (sigma+1)*beta - alpha.  gamma = 1 - alpha/beta exists only when beta
    is nonzero and is computed on demand.
    """

    def __init__(self, alpha: RationalFn, beta: RationalFn):
        self.alpha = alpha
        self.beta = beta

    @property
    def gamma(self) -> RationalFn:
        if self.beta == RationalFn.from_int(0):
            raise BetaZero("gamma undefined: beta of the piece is zero")
        return RationalFn.from_int(1) - self.alpha / self.beta


def alpha_beta_gamma(piece: PieceInvariants) -> AlphaBetaGamma:
    s = RationalFn.from_laurent(sigma())
    r = RationalFn.from_laurent(piece.r)
    rc = RationalFn.from_laurent(piece.r_closed)
    one = RationalFn.from_int(1)
    alpha = ((s + one) * r + rc) / s
    beta = (r + rc) / s
    return AlphaBetaGamma(alpha, beta)


def two_vertex_h(
    h1: LaurentPoly, h2: LaurentPoly, k1: LaurentPoly, k2: LaurentPoly
) -> LaurentPoly:
    """Invariant of the union of two pieces sharing both posts.

    h1, h2 are the open values, k1, k2 the closed ones; the combination
    [k1*k2 + (sigma+1)*h1*h2 + k1*h2 + k2*h1] is divisible by sigma
    whenever the inputs really come from pieces.
    """
    s = sigma()
    num = k1 * k2 + (s + 1) * (h1 * h2) + k1 * h2 + k2 * h1
    return exact_div(num, s)


def two_vertex_r(
    r1: LaurentPoly, r2: LaurentPoly, k1: LaurentPoly, k2: LaurentPoly
) -> LaurentPoly:
    """Same combination at the diagram level."""
    return two_vertex_h(r1, r2, k1, k2)


def r_compose(shape: str, pieces: Sequence[PieceInvariants]) -> LaurentPoly:
    """Assemble pieces into a cycle, a theta bundle, or a bouquet.

    cycle:   [sigma^(n-1) * prod(-r_i) + prod(r_i + k_i)] / sigma^(n-1)
    theta:   [(-1)^s sigma^(s-1) prod(k_i) + prod((sigma+1) r_i + k_i)]
             / [sigma^(s-1) (1 + sigma)]
    bouquet: (-1)^(q-1) prod(k_i)

    The divisions are exact for genuine piece invariants; a remainder
    signals inconsistent inputs and surfaces as NonExactDivision.
    """
    n = len(pieces)
    if n < 1:
        raise ArityMismatch(f"{shape} needs at least one piece")
    s = sigma()
    prod_k = LaurentPoly.one()
    for p in pieces:
        prod_k = prod_k * p.r_closed
    if shape == "bouquet":
        return prod_k * (-1) ** (n - 1)
    if shape == "cycle":
        prod_neg_r = LaurentPoly.one()
        prod_rk = LaurentPoly.one()
        for p in pieces:
            prod_neg_r = prod_neg_r * (-p.r)
            prod_rk = prod_rk * (p.r + p.r_closed)
        return exact_div(s ** (n - 1) * prod_neg_r + prod_rk, s ** (n - 1))
    if shape == "theta":
        prod_mixed = LaurentPoly.one()
        for p in pieces:
            prod_mixed = prod_mixed * ((s + 1) * p.r + p.r_closed)
        num = prod_k * s ** (n - 1) * (-1) ** n + prod_mixed
        return exact_div(num, s ** (n - 1) * (s + 1))
    raise ValueError(f"unknown shape {shape!r}")


def twist_scale(k: int) -> LaurentPoly:
    """The closed-form modulus factor (-1)^(k-1) A^-k (A + A^-1) of a
    positive twist band of length k >= 1."""
    a = LaurentPoly.monomial(1, 1)
    return (a + a ** -1) * a ** -k * (-1) ** (k - 1)


def infinity_closed_form(k: int, sign: str = "+") -> PieceInvariants:
    """Exact invariants of the twist band with k crossings.

    k = 0 is the plain edge (0, sigma): extrapolating the k >= 1 closed
    form down to zero would give the two-strand band instead, which is a
    different piece.
    """
    if k < 0:
        raise ValueError("twist length must be nonnegative")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    s = sigma()
    if k == 0:
        return PieceInvariants(LaurentPoly.zero(), s)
    a = LaurentPoly.monomial(1, 1)
    r = s * a ** (-2 * k)
    r_closed = s * twist_scale(k) - r
    piece = PieceInvariants(r, r_closed)
    return piece if sign == "+" else piece.mirrored()


@lru_cache(maxsize=None)
def _bead_invariants(s: int, k: int, sign: str) -> PieceInvariants:
    # every n of a family sweep reuses the same bead, and the degree
    # estimate is called once per n, so this cache carries the grid scans
    tw = infinity_closed_form(k, sign)
    bead_r = r_compose("theta", [tw] * s)
    bead_closed = r_compose("bouquet", [tw] * s)
    return PieceInvariants(bead_r, bead_closed)


def family_polynomial(
    n: int, s: int, k: int, sign: str = "+", degree_cap: int | None = 4000
) -> LaurentPoly:
    """Exact invariant of the n-cycle of theta bundles of s twist bands of
    length k.  The degree estimate is checked before the expensive cycle
    powers are formed."""
    if n < 1 or s < 1 or k < 1:
        raise ValueError("family parameters must all be at least 1")
    bead = _bead_invariants(s, k, sign)
    sig = sigma()
    estimate = max(
        n * bead.r.span(),
        n * (bead.r + bead.r_closed).span() - 2 * (n - 1) + 2,
    )
    if degree_cap is not None and estimate > degree_cap:
        raise DegreeCap(
            f"predicted degree {estimate} exceeds the cap {degree_cap}"
        )
    beta_bead = exact_div(bead.r + bead.r_closed, sig)
    return (-bead.r) ** n + sig * beta_bead ** n


def family_degree_estimate(n: int, s: int, k: int, sign: str = "+") -> int:
    """Upper bound on the coefficient span of family_polynomial, cheap
    enough to drive sweep planning without forming the cycle powers."""
    bead = _bead_invariants(s, k, sign)
    return max(
        n * bead.r.span(),
        n * (bead.r + bead.r_closed).span() - 2 * (n - 1) + 2,
    )


def h_edge_replace(
    g: Multigraph,
    labels: Mapping[int, str],
    pieces: Mapping[str, PieceInvariants],
) -> LaurentPoly:
    """Replace every edge of a labelled graph by the piece assigned to its
    label, through the chain polynomial: substitute w -> -sigma and each
    label variable -> gamma of its piece, then scale by the product of the
    betas and the parity sign (-1)^(edges - vertices)."""
    used = {labels[eid] for eid, _, _ in g.edges}
    table: dict[str, AlphaBetaGamma] = {}
    zero = RationalFn.from_int(0)
    for lab in sorted(used):
        if lab not in pieces:
            raise KeyError(f"no piece assigned to label {lab!r}")
        table[lab] = alpha_beta_gamma(pieces[lab])
        if table[lab].beta == zero:
            raise BetaZero(f"piece for label {lab!r} has beta = 0")
    ch = chain_polynomial(g, labels)
    values: dict[str, RationalFn] = {
        "w": RationalFn.from_laurent(-sigma())
    }
    for lab, abg in table.items():
        values[lab] = abg.gamma
    rat = ch.substitute(values)
    prod_beta = RationalFn.from_int((-1) ** (len(g.edges) - len(g.vertices)))
    for eid, _, _ in g.edges:
        rat = rat * table[labels[eid]].beta
    rat = rat * prod_beta
    return rat.to_laurent()


def build_family_diagram(
    n: int, s: int, k: int, max_crossings: int | None = 14
) -> DiagramCode:
    """Explicit diagram code of the (n, s, k) family member: n junction
    vertices in a cycle, adjacent junctions joined by a bundle of s bands,
    each band a chain of k positive crossings.

    Junction rotation: walking counterclockwise, first the outgoing
    bundle's bands bottom-to-top (lower strand end before upper), then the
    incoming bundle's bands top-to-bottom (upper before lower); this is
    the planar layout, confirmed by the genus diagnostic.
    """
    if n < 1 or s < 1 or k < 0:
        raise ValueError("family diagram needs n, s >= 1 and k >= 0")
    if max_crossings is not None and n * s * k > max_crossings:
        raise TooLarge(
            f"{n * s * k} crossings exceeds the guard {max_crossings}"
        )
    counter = n  # junction vertices take ids 1..n
    def fresh() -> int:
        nonlocal counter
        counter += 1
        return counter

    arcs = []
    crossings = []
    # per bead i (between junction i and i+1) and band j:
    # left_ends[i][j] = (low, up) at junction i, right_ends likewise
    left_ends = [[None] * s for _ in range(n)]
    right_ends = [[None] * s for _ in range(n)]
    for i in range(n):
        for j in range(s):
            if k == 0:
                lo = fresh()
                hi = fresh()
                arcs.append((lo, hi))
                left_ends[i][j] = (lo,)
                right_ends[i][j] = (hi,)
                continue
            l_up, l_low = fresh(), fresh()
            left_ends[i][j] = (l_low, l_up)
            prev_se, prev_ne = l_low, l_up
            for c in range(k):
                nw, sw, se, ne = fresh(), fresh(), fresh(), fresh()
                crossings.append((fresh(), (nw, sw, se, ne), (sw, ne)))
                arcs.append((prev_ne, nw))
                arcs.append((prev_se, sw))
                prev_se, prev_ne = se, ne
            r_low, r_up = fresh(), fresh()
            arcs.append((prev_se, r_low))
            arcs.append((prev_ne, r_up))
            right_ends[i][j] = (r_low, r_up)
    vertices = []
    for i in range(n):
        outgoing = []  # bead i, bands bottom (j = s-1) to top (j = 0)
        for j in reversed(range(s)):
            outgoing.extend(left_ends[i][j])
        incoming = []  # bead i-1, bands top to bottom, upper end first
        for j in range(s):
            incoming.extend(reversed(right_ends[(i - 1) % n][j]))
        vertices.append((i + 1, tuple(outgoing + incoming)))
    return make_code(vertices, crossings, arcs)
