import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scott_tiler.geom import BASEPOINT, IsometryKind, Point, classify_isometry, hyperbolic_distance
from scott_tiler.trigroup import (
    INFINITE,
    BallTooLarge,
    Geometry,
    InvalidIndex,
    NonHyperbolicSignature,
    NoWitnessFound,
    Word,
    WordSyntaxError,
    build_generators,
    classify_signature,
    cone_point_incidence,
    element_order,
    evaluate_word,
    group_ball,
    lemma25_candidates,
    lemma25_search,
    normalize_signature,
    orbit_ball,
    scott_axis,
    scott_element,
    scott_trace_oracle,
    scott_word,
    word,
)
from scott_tiler.lines import foot_of_basepoint

# acosh((1 + 2 sqrt 2) / 3), mpmath at 40 digits
D_XY_334 = 0.7270398393505147092759027808221962796218


def group(p, q, r):
    return build_generators(classify_signature(p, q, r))


def hyperbolic_triples(limit):
    for t in itertools.product(range(2, limit + 1), repeat=3):
        if classify_signature(*t).geometry is Geometry.HYPERBOLIC:
            yield t


# ---------------------------------------------------------------------------
# signatures


def test_geometry_classification():
    assert classify_signature(2, 3, 5).geometry is Geometry.SPHERICAL
    assert classify_signature(2, 4, 4).geometry is Geometry.EUCLIDEAN
    assert classify_signature(3, 3, 3).geometry is Geometry.EUCLIDEAN
    assert classify_signature(2, 3, 7).geometry is Geometry.HYPERBOLIC


@pytest.mark.parametrize("bad", [(1, 3, 7), (0, 4, 5), (2.5, 4, 5)])
def test_invalid_indices(bad):
    with pytest.raises(InvalidIndex):
        classify_signature(*bad)


def test_non_hyperbolic_rejected():
    with pytest.raises(NonHyperbolicSignature):
        build_generators(classify_signature(2, 4, 4))
    with pytest.raises(NonHyperbolicSignature):
        normalize_signature(classify_signature(2, 3, 5))


def test_every_hyperbolic_signature_is_covered():
    for t in hyperbolic_triples(12):
        n = normalize_signature(classify_signature(*t))
        assert sorted(n.sig.indices) == sorted(t)
        assert n.case in (1, 2, 3)


@pytest.mark.parametrize(
    "given_, expected, case",
    [
        ((2, 7, 3), (3, 7, 2), 3),
        ((7, 2, 3), (3, 7, 2), 3),
        ((5, 4, 2), (4, 5, 2), 2),
        ((2, 5, 4), (4, 5, 2), 2),
        ((5, 6, 2), (5, 6, 2), 1),
        ((4, 5, 6), (4, 5, 6), 1),
        ((5, 4, 3), (5, 4, 3), 1),
    ],
)
def test_normalization(given_, expected, case):
    n = normalize_signature(classify_signature(*given_))
    assert n.sig.indices == expected
    assert n.case == case
    assert tuple(given_[k] for k in n.permutation) == expected


def test_scott_words():
    assert str(scott_word(classify_signature(3, 7, 2))) == "x y^-2"
    assert str(scott_word(classify_signature(4, 5, 2))) == "x y^-1"
    assert str(scott_word(classify_signature(4, 5, 6))) == "x y^-1"


def test_scott_element_needs_normalized_group():
    with pytest.raises(ValueError):
        scott_element(group(7, 3, 2))


# ---------------------------------------------------------------------------
# words


def test_word_reduction_and_printing():
    assert len(word("x x^-1")) == 0
    assert str(word("x x^-1")) == "1"
    assert str(word("x x y^-1 y^-1 z")) == "x^2 y^-2 z"
    w = word("x y^-2 z^3")
    assert (w * w.inverse()) == Word()
    assert str(w**-1) == "z^-3 y^2 x^-1"


@pytest.mark.parametrize(
    "text, position",
    [("x y^0", 2), ("x w", 2), ("x^", 0), ("  q", 2), ("x y^1.5", 2)],
)
def test_word_syntax_errors(text, position):
    with pytest.raises(WordSyntaxError) as info:
        word(text)
    assert info.value.position == position


# ---------------------------------------------------------------------------
# generators


def test_side_length_oracle():
    G = group(3, 3, 4)
    assert hyperbolic_distance(G.X, G.Y) == pytest.approx(D_XY_334, abs=1e-12)


def test_basepoint_and_orientation():
    G = group(4, 5, 6)
    assert G.X == BASEPOINT
    assert G.Y.u == 0.0 and G.Y.v > 1
    assert G.Z.u > 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(list(hyperbolic_triples(11))))
def test_relations(t):
    G = group(*t)
    p, q, r = t
    assert (G.x**p).is_identity(1e-9)
    assert (G.y**q).is_identity(1e-9)
    assert (G.z**r).is_identity(1e-9)
    assert evaluate_word(G, word("x y z")).is_identity(1e-9)


def test_generator_orders_by_brute_force():
    G = group(4, 5, 6)
    assert element_order(G, G.x) == 4
    assert element_order(G, G.y) == 5
    assert element_order(G, G.z) == 6
    # xy = z^-1
    assert element_order(G, evaluate_word(G, word("x y"))) == 6
    assert element_order(G, evaluate_word(G, word("x y^-1"))) == INFINITE
    assert element_order(G, evaluate_word(G, Word())) == 1


def test_rotation_angles():
    G = group(3, 7, 2)
    for g, n in ((G.x, 3), (G.y, 7), (G.z, 2)):
        c = classify_isometry(g)
        assert c.kind is IsometryKind.ELLIPTIC
        assert c.angle == pytest.approx(2 * math.pi / n, abs=1e-12)


# ---------------------------------------------------------------------------
# Scott element


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(list(hyperbolic_triples(9))))
def test_scott_element_is_hyperbolic_and_matches_oracle(t):
    n = normalize_signature(classify_signature(*t))
    G = build_generators(n.sig)
    g = scott_element(G)
    assert abs(g.trace) > 2 + 1e-6
    assert abs(g.trace) == pytest.approx(scott_trace_oracle(n.sig), abs=1e-9)


def test_scott_axis_is_invariant():
    G = group(4, 5, 2)
    axis = scott_axis(G)
    assert scott_element(G).apply_geodesic(axis).same_as(axis, 1e-9)


# ---------------------------------------------------------------------------
# balls


def brute_force_ball(G, N):
    gens = [G.x, G.x.inverse(), G.y, G.y.inverse(), G.z, G.z.inverse()]
    found = [evaluate_word(G, Word())]
    frontier = list(found)
    for _ in range(N):
        nxt = []
        for h in frontier:
            for g in gens:
                c = h @ g
                if all(c.distance(o) > 1e-8 for o in found):
                    found.append(c)
                    nxt.append(c)
        frontier = nxt
    return found


def test_ball_of_radius_one():
    assert len(group_ball(group(4, 5, 6), 1)) == 7
    assert len(group_ball(group(4, 5, 2), 1)) == 6  # z is an involution


@pytest.mark.parametrize("sig", [(4, 5, 6), (3, 7, 2), (4, 5, 2)])
def test_ball_matches_brute_force(sig):
    G = group(*sig)
    ball = group_ball(G, 4)
    assert len(ball) == len(brute_force_ball(G, 4))
    for m, w in list(ball)[:200]:
        assert evaluate_word(G, w).distance(m) < 1e-9


def test_ball_grows_incrementally():
    G = group(3, 4, 5)
    small = group_ball(G, 3)
    grown = group_ball(G, 5, _grow_from=small)
    direct = group_ball(G, 5)
    assert len(grown) == len(direct)
    assert [str(w) for w in grown.words] == [str(w) for w in direct.words]


def test_ball_cap():
    with pytest.raises(BallTooLarge):
        group_ball(group(4, 5, 6), 8, cap=1000)


def test_orbit_ball_contains_near_elements():
    G = group(4, 5, 6)
    R = 2.0
    orbit = orbit_ball(G, BASEPOINT, R)
    ball = group_ball(G, 6)
    near = [m for m, _ in ball if hyperbolic_distance(m(G.Y), BASEPOINT) <= R]
    assert near
    for m in near:
        assert min(m.distance(o) for o, _ in orbit) < 1e-8


# ---------------------------------------------------------------------------
# witness search


def test_lemma25_examples():
    assert str(lemma25_search(group(3, 3, 4), word("x"), word("y"))) == "x y^-1"
    w = lemma25_search(group(4, 5, 2), word("x"), word("y"))
    assert abs(evaluate_word(group(4, 5, 2), w).trace) > 2
    w = lemma25_search(group(3, 7, 2), word("x"), word("y"))
    assert abs(evaluate_word(group(3, 7, 2), w).trace) > 2


def test_lemma25_same_generator_has_no_witness():
    with pytest.raises(NoWitnessFound):
        lemma25_search(group(3, 7, 2), word("x"), word("x"))


def test_lemma25_requires_finite_order_inputs():
    with pytest.raises(ValueError):
        lemma25_search(group(4, 5, 6), word("x y^-1"), word("y"))


def test_lemma25_candidate_shapes():
    cands = lemma25_candidates(word("x"), word("y"))
    assert cands[0] == word("x")
    assert word("x y^-2") in cands and word("x y^2") in cands
    assert len(cands) == 3 * (1 + 3 * 4)


# ---------------------------------------------------------------------------
# cone points


def incidence(sig):
    G = group(*sig)
    axis = scott_axis(G)
    tau = classify_isometry(scott_element(G)).translation_length
    R = hyperbolic_distance(BASEPOINT, foot_of_basepoint(axis)) + tau / 2 + 2.5
    inc = cone_point_incidence(G, [axis], R, orbit_ball(G, BASEPOINT, R))
    return {k: v.status for k, v in inc.items()}


@pytest.mark.parametrize(
    "sig, expected",
    [
        ((4, 5, 2), {"X": "incident", "Y": "separated", "Z": "incident"}),
        ((4, 7, 2), {"X": "incident", "Y": "separated", "Z": "incident"}),
        ((3, 7, 2), {"X": "separated", "Y": "separated", "Z": "incident"}),
        ((3, 8, 2), {"X": "separated", "Y": "separated", "Z": "incident"}),
        ((4, 5, 6), {"X": "separated", "Y": "separated", "Z": "separated"}),
        ((5, 5, 5), {"X": "separated", "Y": "separated", "Z": "separated"}),
    ],
)
def test_cone_point_incidence(sig, expected):
    assert incidence(sig) == expected


def test_cone_point_incidence_input_checks():
    G = group(4, 5, 2)
    with pytest.raises(ValueError):
        cone_point_incidence(G, [], 2.0)
    with pytest.raises(ValueError):
        cone_point_incidence(G, [scott_axis(G)], 0.0)


def test_orbit_points_are_distinct():
    from scott_tiler.trigroup import orbit_points

    G = group(4, 5, 2)
    pts = orbit_points(G, G.Z, 2.5, orbit_ball(G, BASEPOINT, 2.5))
    z = np.array([p.z for p in pts])
    gaps = np.abs(z[:, None] - z[None, :]) + np.eye(len(z))
    assert gaps.min() > 1e-6
    assert all(hyperbolic_distance(p, BASEPOINT) <= 2.5 + 1e-12 for p in pts)
    assert any(hyperbolic_distance(p, Point(G.Z.u, G.Z.v)) < 1e-12 for p in pts)
