"""Convex polygon growth through the tiling and the greedy line coloring it orders.

Starting from a seed tile ``P_0``, each step adjoins every tile meeting the
current polygon. If the union has reflex corners, each must sit at the apex
of a triangle tile whose opposite (fourth) tile is then adjoined; this repeats
until the union is convex. A line's generation is the first step whose
polygon it touches, and lines are colored greedily in generation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arrangement import crossing_pairs_of
from .checks import IntersectionGraph

CONVEX_TOL = 1e-9


class GrowthError(Exception):
    pass


class NonConvexUnfixable(GrowthError):
    """A reflex corner not explained by a triangle tile."""


@dataclass
class GrowthState:
    tiles: frozenset[int]
    generation: int
    boundary: list[int]  # boundary vertices, counterclockwise
    corners: list[int]  # boundary vertices with interior angle < pi
    edge_interior_points: list[int]  # tiling vertices inside each polygon side
    convex: bool
    fixup_rounds: int = 0
    fixup_tiles: list[int] = field(default_factory=list)
    max_angle: float = 0.0  # largest interior angle at a corner, radians


@dataclass
class Growth:
    states: list[GrowthState]
    generation: dict[int, int]  # line -> generation; absent lines are unassigned
    stop_reason: str

    @property
    def generations(self) -> int:
        return len(self.states)

    @property
    def total_fixups(self) -> int:
        return sum(s.fixup_rounds for s in self.states)

    @property
    def all_convex(self) -> bool:
        return all(s.convex for s in self.states)

    @property
    def max_edge_interior_points(self) -> int:
        return max((max(s.edge_interior_points, default=0) for s in self.states), default=0)


def _boundary(T, S: frozenset[int]) -> list[int] | None:
    """Counterclockwise boundary cycle of the union, or None if not a disk."""
    edges = set()
    for t in S:
        vs = T.tile_vertices(t)
        edges.update(zip(vs, vs[1:] + vs[:1]))
    nxt = {}
    for a, b in edges:
        if (b, a) in edges:
            continue
        if a in nxt:
            return None  # pinch vertex
        nxt[a] = b
    start = min(nxt)
    cycle = [start]
    v = nxt[start]
    while v != start:
        cycle.append(v)
        v = nxt[v]
        if len(cycle) > len(nxt):
            return None
    return cycle if len(cycle) == len(nxt) else None


def _interior_angle(T, S: frozenset[int], v: int) -> float:
    return sum(T.corner_angle_at(t, v) for t in set(T.tiles_around(v)) if t is not None and t in S)


def _state(T, S: frozenset[int], gen: int) -> tuple[GrowthState, list[int]]:
    cycle = _boundary(T, S)
    if cycle is None:
        raise NonConvexUnfixable(f"union at generation {gen} is not a disk")
    reflex, corners, kinds = [], [], []
    max_angle = 0.0
    for v in cycle:
        k = sum(1 for t in T.tiles_around(v) if t is not None and t in S)
        angle = _interior_angle(T, S, v)
        if k == 1:
            corners.append(v)
            max_angle = max(max_angle, angle)
            if angle >= math.pi - CONVEX_TOL:
                raise GrowthError(f"tile corner at vertex {v} has angle {angle}")
        elif k == 3:
            reflex.append(v)
            if angle <= math.pi + CONVEX_TOL:
                raise GrowthError(f"reflex vertex {v} has angle {angle}")
        elif abs(angle - math.pi) > 1e-6:
            raise GrowthError(f"straight boundary vertex {v} has angle {angle}")
        kinds.append(k)
    # tiling vertices strictly inside each side between consecutive corners
    counts = []
    if corners:
        first = cycle.index(corners[0])
        rolled = kinds[first:] + kinds[:first]
        run = 0
        for k in rolled[1:] + [1]:
            if k == 1:
                counts.append(run)
                run = 0
            else:
                run += 1
    state = GrowthState(S, gen, cycle, corners, counts, not reflex, max_angle=max_angle)
    return state, reflex


def _usable(T, t) -> bool:
    return t is not None and T.tile_usable(t)


def _grow_once(T, S: frozenset[int]) -> frozenset[int] | None:
    new = set(S)
    for t in S:
        for v in T.tile_vertices(t):
            for u in T.tiles_around(v):
                if not _usable(T, u):
                    return None
                new.add(u)
    return frozenset(new)


def polygon_growth(T, steps: int | None = None, seed: int | None = None, max_tiles: int = 20_000) -> Growth:
    """Grow ``P_0 ⊂ P_1 ⊂ ...`` through a tile complex.

    ``T`` is an :class:`Arrangement` (growth stays inside its complete
    tiles) or a :class:`~scott_tiler.tiling.SymmetricTiling`. Stops after
    ``steps`` steps, when a step would need a tile that is not available,
    or when a polygon would exceed ``max_tiles`` tiles; ``stop_reason``
    records which.
    """
    if seed is None:
        seed = T.seed()
    S = frozenset([seed])
    state, reflex = _state(T, S, 0)
    if reflex:
        raise NonConvexUnfixable("seed tile is not convex")
    states = [state]
    stop = "steps"
    while steps is None or len(states) <= steps:
        if len(S) > max_tiles:
            stop = "budget"
            break
        grown = _grow_once(T, S)
        if grown is None:
            stop = "exhausted"
            break
        rounds, added = 0, []
        while True:
            state, reflex = _state(T, grown, len(states))
            if not reflex:
                break
            rounds += 1
            extra = set()
            for v in reflex:
                around = T.tiles_around(v)
                missing = [i for i, t in enumerate(around) if t is None or t not in grown]
                if len(around) != 4 or len(missing) != 1:
                    raise NonConvexUnfixable(f"reflex vertex {v} is not a simple crossing")
                m = missing[0]
                opposite = around[(m + 2) % 4]
                if len(T.tile_vertices(opposite)) != 3:
                    raise NonConvexUnfixable(f"reflex vertex {v} is not the apex of a triangle tile")
                fourth = around[m]
                if not _usable(T, fourth):
                    extra = None
                    break
                extra.add(fourth)
            if extra is None:
                grown = None
                break
            added.extend(sorted(extra))
            grown = grown | extra
        if grown is None:
            stop = "exhausted"
            break
        state.fixup_rounds = rounds
        state.fixup_tiles = added
        states.append(state)
        S = grown
    generation: dict[int, int] = {}
    for st in states:
        for t in sorted(st.tiles):
            for l in T.tile_lines(t):
                generation.setdefault(l, st.generation)
    return Growth(states, generation, stop)


# ---------------------------------------------------------------------------
# coloring


@dataclass
class Coloring:
    colors: dict[int, int]  # line -> color in 1..c
    order: list[int]
    backward_conflicts: dict[int, int]
    assigned: frozenset[int]  # lines with a generation

    @property
    def colors_used(self) -> int:
        return len(set(self.colors.values()))

    @property
    def colors_used_assigned(self) -> int:
        return len({self.colors[l] for l in self.assigned})

    @property
    def max_backward_conflicts(self) -> int:
        return max((self.backward_conflicts[l] for l in self.assigned), default=0)


def greedy_color(T, generation: dict[int, int], graph: IntersectionGraph | None = None) -> Coloring:
    """Smallest free color, lines taken by generation then canonical order.

    The canonical order sorts lines by their endpoint angles, which for an
    arrangement is the line index. Lines without a generation go last and
    are excluded from the bounds.
    """
    angles = T.line_angles
    if graph is None:
        graph = IntersectionGraph.from_angles(angles)
    n = len(angles)
    order = sorted(range(n), key=lambda l: (l not in generation, generation.get(l, 0), tuple(angles[l]), l))
    colors: dict[int, int] = {}
    backward = {}
    for l in order:
        taken = {colors[m] for m in graph.adj[l] if m in colors}
        backward[l] = sum(1 for m in graph.adj[l] if m in colors)
        c = 1
        while c in taken:
            c += 1
        colors[l] = c
    return Coloring(colors, order, backward, frozenset(generation))


@dataclass(frozen=True)
class ColoringCheck:
    passed: bool
    witness: tuple[int, int] | None = None


def verify_coloring(T, colors: dict[int, int] | Coloring) -> ColoringCheck:
    """Brute-force scan of every crossing pair of lines."""
    if isinstance(colors, Coloring):
        colors = colors.colors
    angles = T.line_angles
    n = len(angles)
    missing = [l for l in range(n) if l not in colors]
    if missing:
        raise ValueError(f"lines {missing[:5]} have no color")
    c = np.array([colors[l] for l in range(n)])
    for i, j in crossing_pairs_of(angles):
        clash = np.nonzero(c[i] == c[j])[0]
        if len(clash):
            return ColoringCheck(False, (int(i[clash[0]]), int(j[clash[0]])))
    return ColoringCheck(True)
