import functools

import numpy as np
import pytest

from scott_tiler.arrangement import build_arrangement
from scott_tiler.geom import Geodesic, boundary_from_angle
from scott_tiler.lines import LineFamily, build_line_family
from scott_tiler.report import DEFAULT_RADIUS, run_analysis
from scott_tiler.trigroup import build_generators, classify_signature, normalize_signature, scott_axis

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def built(sig, R=DEFAULT_RADIUS):
    """(group, family, arrangement) for a signature, cached across tests."""
    G = build_generators(normalize_signature(classify_signature(*sig)).sig)
    fam = build_line_family(G, scott_axis(G), R)
    return G, fam, build_arrangement(fam)


@functools.lru_cache(maxsize=None)
def analysis(sig):
    return run_analysis(*sig)


def family_from_angles(pairs, R=2.0, sig=(4, 5, 6)):
    """A hand-made family of chords, for arrangement tests."""
    angles = np.sort(np.array(pairs, dtype=float).reshape(-1, 2), axis=1)
    angles = angles[np.lexsort((angles[:, 1], angles[:, 0]))]
    lines = [Geodesic(boundary_from_angle(a), boundary_from_angle(b)) for a, b in angles]
    return LineFamily(lines, angles, {}, classify_signature(*sig), R, 0, True)


@pytest.fixture(scope="session")
def build():
    return built


@pytest.fixture(scope="session")
def analyzed():
    return analysis


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
