import math

import numpy as np
import pytest

from scott_tiler.arrangement import build_arrangement
from scott_tiler.coloring import Coloring, greedy_color, polygon_growth, verify_coloring
from scott_tiler.tiling import SymmetricTiling

from conftest import built, family_from_angles


def test_single_line_one_color():
    A = build_arrangement(family_from_angles([(0.2, 2.9)]))
    c = greedy_color(A, {})
    assert c.colors == {0: 1}
    assert verify_coloring(A, c).passed


def test_adversarial_coloring_fails_with_pair():
    A = build_arrangement(family_from_angles([(0.0, math.pi), (math.pi / 2, 3 * math.pi / 2), (0.1, 0.9)]))
    # rows sort to (0, pi), (0.1, 0.9), (pi/2, 3pi/2); lines 0 and 2 cross
    check = verify_coloring(A, {0: 1, 1: 2, 2: 1})
    assert not check.passed
    assert check.witness == (0, 2)


def test_permuted_coloring_still_proper():
    _, fam, A = built((4, 5, 2))
    c = greedy_color(A, {})
    assert verify_coloring(A, c).passed
    k = c.colors_used
    perm = {i + 1: (i + 2) % k + 1 for i in range(k)}
    assert verify_coloring(A, {l: perm[col] for l, col in c.colors.items()}).passed


def test_missing_colors_rejected():
    A = build_arrangement(family_from_angles([(0.2, 2.9), (1.0, 4.0)]))
    with pytest.raises(ValueError):
        verify_coloring(A, {0: 1})


def test_unassigned_lines_go_last():
    _, _, A = built((4, 5, 2))
    gen = {5: 0, 2: 1}
    c = greedy_color(A, gen)
    assert c.order[:2] == [5, 2]
    assert c.assigned == frozenset(gen)


def test_greedy_is_deterministic():
    _, _, A = built((3, 8, 2))
    g = polygon_growth(A)
    a = greedy_color(A, g.generation)
    b = greedy_color(A, g.generation)
    assert a.colors == b.colors and a.order == b.order


def test_step_zero_is_the_seed_tile():
    _, _, A = built((4, 5, 6))
    g = polygon_growth(A, steps=0)
    assert g.generations == 1
    s = g.states[0]
    assert s.convex and len(s.tiles) == 1
    seed = next(iter(s.tiles))
    assert set(g.generation) == set(A.tiles[seed].key)
    assert set(g.generation.values()) == {0}


def test_generation_zero_lines_are_seed_lines():
    G, _, A = built((3, 7, 2))
    T = SymmetricTiling(G, A)
    g = polygon_growth(T, steps=2)
    seed = T.seed()
    assert {l for l, n in g.generation.items() if n == 0} == set(T.tile_lines(seed))
    # generations follow the nested polygons
    for st, nxt in zip(g.states, g.states[1:]):
        assert st.tiles < nxt.tiles


def test_no_fixups_without_triangles():
    G, _, A = built((4, 5, 6))
    g = polygon_growth(SymmetricTiling(G, A), steps=2)
    assert g.all_convex
    assert g.total_fixups == 0


def test_fixups_with_triangles():
    G, _, A = built((3, 7, 2))
    g = polygon_growth(SymmetricTiling(G, A), steps=2)
    assert g.total_fixups > 0
    assert g.all_convex
    assert g.max_edge_interior_points <= 2
    for st in g.states:
        assert st.max_angle < math.pi


@pytest.mark.parametrize("sig", [(3, 7, 2), (3, 8, 2)])
def test_disk_and_symmetric_growth_agree(sig):
    G, _, A = built(sig)
    disk = polygon_growth(A)
    assert disk.generations >= 3
    T = SymmetricTiling(G, A)
    sym = polygon_growth(T, steps=disk.generations - 1)
    assert [len(s.tiles) for s in disk.states] == [len(s.tiles) for s in sym.states]
    assert [s.fixup_rounds for s in disk.states] == [s.fixup_rounds for s in sym.states]
    angles = A.line_angles
    by_angle = {tuple(np.round(angles[l], 9)): n for l, n in disk.generation.items()}
    sym_angles = T.line_angles
    assert by_angle == {tuple(np.round(sym_angles[l], 9)): n for l, n in sym.generation.items()}


def test_disk_growth_stays_in_complete_tiles():
    _, _, A = built((4, 5, 6))
    g = polygon_growth(A)
    assert g.stop_reason == "exhausted"
    for st in g.states:
        assert all(A.tiles[t].complete for t in st.tiles)


def test_coloring_bounds_on_growth_order():
    G, _, A = built((4, 5, 2))
    T = SymmetricTiling(G, A)
    g = polygon_growth(T, steps=2)
    c = greedy_color(T, g.generation)
    assert isinstance(c, Coloring)
    assert verify_coloring(T, c).passed
    assert c.colors_used_assigned <= 5
    assert c.max_backward_conflicts <= 4
