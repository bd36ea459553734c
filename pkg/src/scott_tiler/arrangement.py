"""Planar subdivision of a hyperbolic disk by a finite family of geodesics.

The subdivision is built in the Klein chart centred on the basepoint, where
geodesics are straight chords and the hyperbolic disk of radius ``R`` is the
Euclidean disk of radius ``tanh R``. Cyclic orders, incidences and convexity
are the same in every model, so the combinatorics read off this chart are
those of the hyperbolic tiling; metric quantities are computed in the
upper half-plane.
"""

from __future__ import annotations

import cmath
import math
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geom import (
    BASEPOINT,
    EPS_PT,
    Point,
    angle_at,
    hyperbolic_distance,
    klein_to_point,
)
from .lines import LineFamily, meets_disk

ARC = -1
TRUST_MARGIN = 1.0


def default_trusted_radius(R: float) -> float:
    """Radius of the sub-disk where census and growth claims are made."""
    return max(R / 2, R - TRUST_MARGIN)


class ArrangementError(Exception):
    pass


class TriplePointDetected(ArrangementError):
    def __init__(self, lines, location):
        super().__init__(f"lines {sorted(lines)} meet within tolerance at {location}")
        self.lines = tuple(sorted(lines))
        self.location = location


class NoCompleteTiles(ArrangementError):
    pass


@dataclass
class ArrVertex:
    klein: complex
    lines: tuple[int, ...]
    clip: bool = False

    @property
    def location(self) -> Point:
        return klein_to_point(self.klein)


@dataclass
class Tile:
    """A face of the subdivision, traversed counterclockwise."""

    index: int
    vertices: list[int]
    halfedges: list[int]
    lines: tuple[int, ...]  # line of each side (ARC for circle arcs)
    clipped: bool
    complete: bool = False

    @property
    def side_count(self) -> int:
        return len(self.vertices)

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(sorted(set(l for l in self.lines if l != ARC)))


@dataclass
class Arrangement:
    family: LineFamily
    vertices: list[ArrVertex]
    # half-edge arrays: origin, target, twin, line (ARC for circle arcs), face
    he_origin: list[int]
    he_target: list[int]
    he_twin: list[int]
    he_line: list[int]
    he_face: list[int]
    tiles: list[Tile]  # every bounded face
    outer_face: int  # index into faces, not tiles
    face_to_tile: dict[int, int]
    trusted_radius: float
    crossing_pairs: dict[tuple[int, int], int] = field(default_factory=dict)
    merged: list[tuple[int, ...]] = field(default_factory=list)
    _out: list[list[int]] = field(default_factory=list, repr=False)

    @property
    def num_edges(self) -> int:
        return len(self.he_origin) // 2

    @property
    def num_faces(self) -> int:
        return len(self.tiles) + 1

    def interior_vertices(self) -> list[int]:
        return [i for i, v in enumerate(self.vertices) if not v.clip]

    def outgoing(self, v: int) -> list[int]:
        return self._out[v]

    def vertex_faces(self, v: int) -> list[int]:
        """Faces around ``v`` in counterclockwise order (may repeat)."""
        return [self.he_face[h] for h in self._out[v]]

    def vertex_tiles(self, v: int) -> list[int]:
        return [self.face_to_tile[f] for f in self.vertex_faces(v) if f in self.face_to_tile]

    def complete_tiles(self) -> list[Tile]:
        return [t for t in self.tiles if t.complete]

    def tile_neighbors(self, t: int) -> list[int]:
        """Tiles sharing an edge with tile ``t`` (one entry per shared edge)."""
        out = []
        for h in self.tiles[t].halfedges:
            if self.he_line[h] == ARC:
                continue
            f = self.he_face[self.he_twin[h]]
            if f in self.face_to_tile:
                out.append(self.face_to_tile[f])
        return out

    def interior_edges(self):
        """Yield ``(tile_a, tile_b, line)`` for every segment edge between tiles."""
        for h in range(0, len(self.he_origin), 2):
            if self.he_line[h] == ARC:
                continue
            fa, fb = self.he_face[h], self.he_face[h + 1]
            if fa in self.face_to_tile and fb in self.face_to_tile:
                yield self.face_to_tile[fa], self.face_to_tile[fb], self.he_line[h]

    def corner_angle(self, t: int, k: int) -> float:
        """Hyperbolic interior angle of tile ``t`` at its ``k``-th vertex."""
        vs = self.tiles[t].vertices
        p = self.vertices[vs[k]].location
        prev = self.vertices[vs[k - 1]].location
        nxt = self.vertices[vs[(k + 1) % len(vs)]].location
        return angle_at(p, prev, nxt)

    def distance_to_basepoint(self, v: int) -> float:
        return math.atanh(min(abs(self.vertices[v].klein), 1 - 1e-16))

    # tile complex interface shared with the symmetric tiling

    @property
    def line_angles(self) -> np.ndarray:
        return self.family.angles

    def seed(self) -> int:
        return seed_tile(self)

    def tiles_around(self, v: int) -> list[int | None]:
        """Tiles around ``v`` counterclockwise, ``None`` for the outer face."""
        return [self.face_to_tile.get(f) for f in self.vertex_faces(v)]

    def tile_vertices(self, t: int) -> list[int]:
        return self.tiles[t].vertices

    def tile_lines(self, t: int) -> tuple[int, ...]:
        return self.tiles[t].key

    def tile_usable(self, t: int) -> bool:
        return self.tiles[t].complete

    def corner_angle_at(self, t: int, v: int) -> float:
        return self.corner_angle(t, self.tiles[t].vertices.index(v))


def _chord_circle(a: complex, b: complex, rho: float) -> tuple[float, float] | None:
    """Parameters t of the points a + t(b - a) on the circle of radius rho."""
    d = b - a
    A = abs(d) ** 2
    B = 2 * (a.real * d.real + a.imag * d.imag)
    C = abs(a) ** 2 - rho * rho
    disc = B * B - 4 * A * C
    if disc <= 0:
        return None
    s = math.sqrt(disc)
    return (-B - s) / (2 * A), (-B + s) / (2 * A)


def crossing_block(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Boolean matrix: chord ``a[i]`` crosses chord ``b[j]`` (anywhere)."""
    a1, a2 = a[:, 0][:, None], a[:, 1][:, None]
    b1, b2 = b[:, 0][None, :], b[:, 1][None, :]
    in1 = (a1 < b1) & (b1 < a2)
    in2 = (a1 < b2) & (b2 < a2)
    m = in1 != in2
    # shared ideal endpoints never cross
    for x in (a[:, 0], a[:, 1]):
        for y in (b[:, 0], b[:, 1]):
            gap = np.abs(x[:, None] - y[None, :])
            m &= np.minimum(gap, 2 * math.pi - gap) > 1e-12
    return m


def crossing_matrix(angles: np.ndarray) -> np.ndarray:
    """Boolean matrix: chords with these endpoint angles cross (anywhere)."""
    m = crossing_block(angles, angles)
    np.fill_diagonal(m, False)
    return m


def scan_threads() -> int:
    """Worker count for crossing scans, from ``SCOTT_TILER_THREADS`` (default 1)."""
    raw = os.environ.get("SCOTT_TILER_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SCOTT_TILER_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"SCOTT_TILER_THREADS must be a positive integer, got {raw!r}")
    return n


def crossing_pairs_of(angles: np.ndarray, chunk: int = 1024):
    """Yield index arrays ``(i, j)``, ``i < j``, of crossing chords, in blocks."""

    def block(start):
        m = crossing_block(angles[start : start + chunk], angles)
        i, j = np.nonzero(m)
        i = i + start
        keep = i < j
        return i[keep], j[keep]

    starts = range(0, len(angles), chunk)
    threads = scan_threads()
    if threads == 1 or len(starts) < 2:
        yield from map(block, starts)
        return
    with ThreadPoolExecutor(threads) as pool:
        yield from pool.map(block, starts)


def build_arrangement(
    family: LineFamily,
    trusted_radius: float | None = None,
    eps_pt: float = EPS_PT,
    strict: bool = True,
) -> Arrangement:
    """Subdivide the disk of radius ``family.region_radius`` by the family's lines.

    Crossing points closer than ``eps_pt`` are merged into one vertex; with
    ``strict`` set such a merge raises :class:`TriplePointDetected`.
    """
    n = len(family.lines)
    if n == 0:
        raise ValueError("empty line family")
    R = family.region_radius
    rho = math.tanh(R)
    missing = np.nonzero(~meets_disk(family.angles, R))[0]
    if len(missing):
        raise ValueError(f"lines {missing[:5].tolist()} do not meet the disk of radius {R}")
    ends = [(cmath.exp(1j * a), cmath.exp(1j * b)) for a, b in family.angles]

    vertices: list[ArrVertex] = []
    on_line: dict[int, list[tuple[float, int]]] = defaultdict(list)
    crossing_pairs: dict[tuple[int, int], int] = {}

    # crossings inside the clip disk
    raw = []
    pairs = [np.stack(block, axis=1) for block in crossing_pairs_of(family.angles)]
    for i, j in np.concatenate(pairs) if pairs else []:
        (p1, p2), (q1, q2) = ends[i], ends[j]
        dp, dq = p2 - p1, q2 - q1
        den = dp.real * dq.imag - dp.imag * dq.real
        w = q1 - p1
        s = (w.real * dq.imag - w.imag * dq.real) / den
        t = (w.real * dp.imag - w.imag * dp.real) / den
        k = p1 + s * dp
        if abs(k) < rho:
            raw.append((k, int(i), int(j), s, t))

    # cluster coincident crossings (triple points)
    merged = []
    if raw:
        pts = [klein_to_point(k) for k, *_ in raw]
        parent = list(range(len(raw)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        order = sorted(range(len(raw)), key=lambda m: raw[m][0].real)
        for a_pos, a in enumerate(order):
            for b in order[a_pos + 1 :]:
                if raw[b][0].real - raw[a][0].real > 1e-6:
                    break
                if hyperbolic_distance(pts[a], pts[b]) <= eps_pt:
                    parent[find(a)] = find(b)
        groups: dict[int, list[int]] = defaultdict(list)
        for m in range(len(raw)):
            groups[find(m)].append(m)
        for root in sorted(groups, key=lambda g: min(groups[g])):
            members = groups[root]
            lines = sorted({raw[m][1] for m in members} | {raw[m][2] for m in members})
            k = raw[members[0]][0]
            if len(lines) > 2:
                if strict:
                    raise TriplePointDetected(lines, klein_to_point(k))
                merged.append(tuple(lines))
            vid = len(vertices)
            vertices.append(ArrVertex(k, tuple(lines)))
            for m in members:
                _, i, j, s, t = raw[m]
                crossing_pairs[(i, j)] = vid
            params = {}
            for m in members:
                _, i, j, s, t = raw[m]
                params.setdefault(i, s)
                params.setdefault(j, t)
            for l, s in params.items():
                on_line[l].append((s, vid))

    # clip points
    circle: list[tuple[float, int]] = []
    for l, (a, b) in enumerate(ends):
        ts = _chord_circle(a, b, rho)
        if ts is None:
            continue
        for t in ts:
            k = a + t * (b - a)
            vid = len(vertices)
            vertices.append(ArrVertex(k, (l,), clip=True))
            on_line[l].append((t, vid))
            circle.append((cmath.phase(k) % (2 * math.pi), vid))

    he_origin: list[int] = []
    he_target: list[int] = []
    he_line: list[int] = []

    def add_edge(u, v, line):
        he_origin.extend([u, v])
        he_target.extend([v, u])
        he_line.extend([line, line])

    for l in range(n):
        seq = sorted(on_line[l])
        for (_, u), (_, v) in zip(seq, seq[1:]):
            add_edge(u, v, l)
    circle.sort()
    for (_, u), (_, v) in zip(circle, circle[1:] + circle[:1]):
        add_edge(u, v, ARC)  # even half-edge runs counterclockwise

    nh = len(he_origin)
    he_twin = [h ^ 1 for h in range(nh)]

    def direction(h):
        u, v = he_origin[h], he_target[h]
        ku, kv = vertices[u].klein, vertices[v].klein
        if he_line[h] == ARC:
            tangent = 1j * ku if h % 2 == 0 else -1j * ku
            return cmath.phase(tangent)
        return cmath.phase(kv - ku)

    out: list[list[int]] = [[] for _ in vertices]
    for h in range(nh):
        out[he_origin[h]].append(h)
    for v in range(len(vertices)):
        out[v].sort(key=direction)
    pos = {}
    for v, hs in enumerate(out):
        for k, h in enumerate(hs):
            pos[h] = k

    def nxt(h):
        # next half-edge of the face on the left: turn as far right as possible
        t = he_twin[h]
        hs = out[he_origin[t]]
        return hs[(pos[t] - 1) % len(hs)]

    he_face = [-1] * nh
    faces: list[list[int]] = []
    for h0 in range(nh):
        if he_face[h0] != -1:
            continue
        f = len(faces)
        cyc = []
        h = h0
        while he_face[h] == -1:
            he_face[h] = f
            cyc.append(h)
            h = nxt(h)
        faces.append(cyc)

    outer = [f for f, cyc in enumerate(faces) if all(he_line[h] == ARC and h % 2 == 1 for h in cyc)]
    if len(outer) != 1:
        raise ArrangementError(f"expected one outer face, found {len(outer)}")
    outer_face = outer[0]

    trusted = default_trusted_radius(R) if trusted_radius is None else trusted_radius
    k_trusted = math.tanh(trusted)
    tiles = []
    face_to_tile = {}
    for f, cyc in enumerate(faces):
        if f == outer_face:
            continue
        vs = [he_origin[h] for h in cyc]
        lines = tuple(he_line[h] for h in cyc)
        clipped = ARC in lines
        tile = Tile(len(tiles), vs, list(cyc), lines, clipped)
        tile.complete = (not clipped) and all(abs(vertices[v].klein) <= k_trusted for v in vs)
        face_to_tile[f] = len(tiles)
        tiles.append(tile)

    arr = Arrangement(
        family,
        vertices,
        he_origin,
        he_target,
        he_twin,
        he_line,
        he_face,
        tiles,
        outer_face,
        face_to_tile,
        trusted,
        crossing_pairs,
        merged,
        out,
    )
    return arr


def seed_tile(A: Arrangement) -> int:
    """Complete tile nearest the basepoint; ties broken by the tile key."""
    best = None
    for t in A.complete_tiles():
        k = np.mean([A.vertices[v].klein for v in t.vertices])
        d = hyperbolic_distance(BASEPOINT, klein_to_point(k))
        cand = (round(d, 9), t.key, t.index)
        if best is None or cand < best:
            best = cand
    if best is None:
        raise NoCompleteTiles("no complete tile in the trusted sub-disk")
    return best[2]
