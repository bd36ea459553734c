import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scott_tiler.geom import BASEPOINT, INFINITY, Geodesic, distance_point_to_geodesic
from scott_tiler.lines import NotStabilized, build_line_family, foot_of_basepoint, meets_disk
from scott_tiler.trigroup import evaluate_word, scott_axis

from conftest import built

SIGS = [(4, 5, 6), (4, 5, 2), (3, 7, 2)]


@pytest.mark.parametrize("sig", SIGS)
def test_orbit_and_wordlength_methods_agree(sig):
    G, _, _ = built(sig)
    axis = scott_axis(G)
    orbit = build_line_family(G, axis, 3.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotStabilized)
        words = build_line_family(G, axis, 3.0, method="wordlength")
    assert words.stabilized
    assert len(orbit) == len(words)
    assert np.allclose(orbit.angles, words.angles, atol=1e-9)


@pytest.mark.parametrize("sig", SIGS)
def test_family_lines_meet_disk_and_are_distinct(sig):
    G, fam, _ = built(sig)
    assert fam.stabilized
    for line in fam.lines[:: max(1, len(fam) // 50)]:
        assert distance_point_to_geodesic(BASEPOINT, line) <= fam.region_radius + 1e-9
    a = fam.angles
    assert np.all(np.diff(a[:, 0]) >= 0)
    keys = np.round(a, 9)
    assert len({tuple(k) for k in keys}) == len(fam)


@pytest.mark.parametrize("sig", SIGS)
def test_witness_words_carry_the_axis(sig):
    G, fam, _ = built(sig, 3.0)
    axis = scott_axis(G)
    for i in range(0, len(fam), max(1, len(fam) // 25)):
        image = evaluate_word(G, fam.witnesses[i]).apply_geodesic(axis)
        assert image.same_as(fam.lines[i], 1e-7)


def test_not_stabilized_warning():
    G, _, _ = built((4, 5, 6))
    with pytest.warns(NotStabilized):
        fam = build_line_family(G, scott_axis(G), 4.0, N_max=2, method="wordlength")
    assert not fam.stabilized
    assert fam.warnings


def test_bad_arguments():
    G, _, _ = built((4, 5, 6))
    with pytest.raises(ValueError):
        build_line_family(G, scott_axis(G), 0.0)
    with pytest.raises(ValueError):
        build_line_family(G, scott_axis(G), 2.0, method="guess")


def test_foot_of_basepoint_is_closest_point():
    line = Geodesic(1.0, INFINITY)
    foot = foot_of_basepoint(line)
    assert foot.u == pytest.approx(1.0)
    assert foot.v == pytest.approx(math.sqrt(2))


@given(st.floats(-20, 20), st.floats(-20, 20), st.floats(0.1, 4))
def test_meets_disk_matches_distance(a, b, R):
    if abs(a - b) < 1e-3:
        return
    line = Geodesic(a, b)
    d = distance_point_to_geodesic(BASEPOINT, line)
    if abs(d - R) < 1e-9:
        return
    assert bool(meets_disk(np.array([line.angles]), R)[0]) == (d <= R)
