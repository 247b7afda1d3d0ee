"""Composition formulas, twist closed forms, and the family builder."""

import itertools

import pytest

from yamada.laurent import (
    LaurentPoly,
    NonExactDivision,
    RationalFn,
    exact_div,
    sigma,
    variable,
)
from yamada.multigraph import (
    TooLarge,
    cycle_graph,
    make_graph,
    theta_graph,
    yamada_h,
)
from yamada.diagram import build_twist, close_piece, validate, yamada_r
from yamada.replace import (
    AlphaBetaGamma,
    ArityMismatch,
    BetaZero,
    DegreeCap,
    PieceInvariants,
    alpha_beta_gamma,
    build_family_diagram,
    family_polynomial,
    h_edge_replace,
    infinity_closed_form,
    r_compose,
    twist_scale,
    two_vertex_h,
    two_vertex_r,
)

A = variable()
S = sigma()


def theta_piece(s):
    """Bundle of s plain strands as a piece: open it is the theta graph,
    closed it is the bouquet."""
    return PieceInvariants(yamada_h(theta_graph(s)), (-1) ** (s - 1) * S ** s)


def test_twist_closed_forms_match_state_sum():
    for sign in "+-":
        for k in range(5):
            piece = infinity_closed_form(k, sign)
            code = build_twist(k, sign)
            assert piece.r == yamada_r(code)
            assert piece.r_closed == yamada_r(close_piece(code))


def test_twist_closed_form_instances():
    p1 = infinity_closed_form(1, "+")
    assert p1.r == S * A ** -2
    assert p1.r_closed == S
    p2 = infinity_closed_form(2, "+")
    assert p2.r == S * A ** -4
    assert p2.r_closed == -(S * A ** -2 * (A + A ** -1)) - S * A ** -4


def test_alpha_beta_gamma_single_edge():
    abg = alpha_beta_gamma(infinity_closed_form(0))
    one = RationalFn.from_int(1)
    assert abg.alpha == one
    assert abg.beta == one
    assert abg.gamma == RationalFn.from_int(0)


def test_alpha_beta_gamma_twist():
    for k in range(1, 5):
        abg = alpha_beta_gamma(infinity_closed_form(k, "+"))
        m_k = twist_scale(k)
        assert abg.beta == RationalFn.from_laurent(m_k)
        assert abg.gamma == RationalFn(-(S * A ** (-2 * k)), m_k)


def test_alpha_beta_recover_inputs():
    piece = theta_piece(3)
    abg = alpha_beta_gamma(piece)
    s = RationalFn.from_laurent(S)
    one = RationalFn.from_int(1)
    assert abg.alpha - abg.beta == RationalFn.from_laurent(piece.r)
    assert (s + one) * abg.beta - abg.alpha == RationalFn.from_laurent(
        piece.r_closed
    )


def test_beta_zero_is_lazy():
    degenerate = PieceInvariants(S, -S)
    abg = alpha_beta_gamma(degenerate)
    assert abg.beta == RationalFn.from_int(0)
    with pytest.raises(BetaZero):
        abg.gamma


def test_two_vertex_values():
    # two single edges glued at both ends form a 2-cycle
    zero = LaurentPoly.zero()
    assert two_vertex_h(zero, zero, S, S) == S
    # doubled strand against a single edge forms the 3-banana
    assert two_vertex_h(S, zero, -(S ** 2), S) == S - S ** 2
    assert two_vertex_h(zero, S, zero, S).is_zero()
    assert two_vertex_r(zero, zero, S, S) == S


def test_compose_identity_pieces():
    edge = infinity_closed_form(0)
    for n in range(1, 7):
        assert r_compose("cycle", [edge] * n) == S
        assert r_compose("bouquet", [edge] * n) == (-1) ** (n - 1) * S ** n
        assert r_compose("theta", [edge] * n) == yamada_h(theta_graph(n))


def test_compose_twist_goldens():
    tw = infinity_closed_form(1, "+")
    inner = S * A ** -2 + S
    for n in range(1, 6):
        expect = (-(S * A ** -2)) ** n + S * (A ** -2 + 1) ** n
        assert r_compose("cycle", [tw] * n) == expect
    for s in range(1, 6):
        num = (-S) ** s + S * ((S + 1) * A ** -2 + 1) ** s
        assert r_compose("theta", [tw] * s) == exact_div(num, S + 1)
    for q in range(1, 6):
        assert r_compose("bouquet", [tw] * q) == (-1) ** (q - 1) * S ** q


def test_compose_cycle_permutation_invariant():
    pieces = [
        infinity_closed_form(1, "+"),
        infinity_closed_form(2, "-"),
        theta_piece(2),
    ]
    values = {
        r_compose("cycle", list(perm)) for perm in itertools.permutations(pieces)
    }
    baseline = r_compose("cycle", pieces)
    assert all(v == baseline for v in values)


def test_compose_arity_and_shape_checks():
    with pytest.raises(ArityMismatch):
        r_compose("cycle", [])
    with pytest.raises(ValueError):
        r_compose("wheel", [infinity_closed_form(1)])


def test_family_small_instances():
    tw = infinity_closed_form(1, "+")
    for n in range(1, 6):
        assert family_polynomial(n, 1, 1, "+") == r_compose("cycle", [tw] * n)
    assert family_polynomial(3, 2, 2, "-") == family_polynomial(
        3, 2, 2, "+"
    ).mirror()


def test_family_matches_diagram_state_sum():
    triples = [
        (n, s, k)
        for n in range(1, 9)
        for s in range(1, 9)
        for k in range(1, 9)
        if n * s * k <= 8
    ]
    for n, s, k in triples:
        code = build_family_diagram(n, s, k)
        validate(code)
        assert family_polynomial(n, s, k, "+") == yamada_r(code)


def test_family_degree_cap():
    with pytest.raises(DegreeCap):
        family_polynomial(20, 4, 6, "+", degree_cap=100)
    # cap of None disables the check
    p = family_polynomial(4, 2, 2, "+", degree_cap=None)
    assert not p.is_zero()


def test_build_family_diagram_shape():
    code = build_family_diagram(2, 1, 1)
    assert len(code.crossings) == 2
    assert len(code.vertices) == 2
    assert validate(build_family_diagram(2, 2, 1)).planar
    with pytest.raises(TooLarge):
        build_family_diagram(4, 4, 4)


def test_build_family_diagram_crossing_free_base():
    # k = 0 bands give the plain cycle-of-thetas graph
    code = build_family_diagram(3, 2, 0)
    piece = theta_piece(2)
    assert yamada_r(code) == r_compose("cycle", [piece] * 3)


def test_h_edge_replace_doubled_cycles():
    piece = theta_piece(2)
    for n in (2, 3):
        base = cycle_graph(n)
        labels = {eid: f"a{eid}" for eid, _, _ in base.edges}
        pieces = {lab: piece for lab in labels.values()}
        # explicit doubled graph: every cycle edge becomes two parallels
        doubled = make_graph(
            base.vertices,
            [
                (2 * i + half, u, v)
                for i, (_, u, v) in enumerate(base.edges)
                for half in (0, 1)
            ],
        )
        assert h_edge_replace(base, labels, pieces) == yamada_h(doubled)
        assert h_edge_replace(base, labels, pieces) == r_compose(
            "cycle", [piece] * n
        )


def test_h_edge_replace_shared_labels():
    base = cycle_graph(2)
    piece = theta_piece(2)
    shared = h_edge_replace(base, {0: "a", 1: "a"}, {"a": piece})
    split = h_edge_replace(base, {0: "a", 1: "b"}, {"a": piece, "b": piece})
    assert shared == split == S - S ** 2 + S ** 3


def test_h_edge_replace_worked_form():
    # n-cycle of s-bundles: (-h)^n + sigma^(1-n) (h + (-1)^(s-1) sigma^s)^n
    for n, s in ((2, 2), (3, 2), (2, 3)):
        piece = theta_piece(s)
        base = cycle_graph(n)
        labels = {eid: "a" for eid, _, _ in base.edges}
        got = h_edge_replace(base, labels, {"a": piece})
        expect = exact_div(
            S ** (n - 1) * (-piece.r) ** n + (piece.r + piece.r_closed) ** n,
            S ** (n - 1),
        )
        assert got == expect


def test_h_edge_replace_rejects_beta_zero():
    base = cycle_graph(2)
    labels = {0: "a", 1: "a"}
    with pytest.raises(BetaZero):
        h_edge_replace(base, labels, {"a": PieceInvariants(S, -S)})
    with pytest.raises(KeyError):
        h_edge_replace(base, labels, {"b": theta_piece(2)})
