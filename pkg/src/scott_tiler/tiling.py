"""The tiling cut out by all translates of the Scott axis, built on demand.

Tiles far from the basepoint are translates of tiles near it: a far vertex
is carried back near the basepoint by a group element, the tiles around it
are read off a base arrangement, and the result is carried out again. This
reaches convex polygons whose corners lie far outside any disk one could
afford to subdivide directly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .arrangement import Arrangement, seed_tile
from .geom import BASEPOINT, Point, angle_at, hyperbolic_distance
from .lines import _symmetric_keys
from .trigroup import TriangleGroup, orbit_ball

LINE_TOL = 1e-10
_CELL = 1e-7


class TilingError(Exception):
    pass


class BaseTooSmall(TilingError):
    """The base arrangement does not contain every tile near the basepoint."""


@dataclass
class LTile:
    index: int
    vertices: list[int]  # counterclockwise
    lines: tuple[int, ...]  # line of the side leaving each vertex

    @property
    def side_count(self) -> int:
        return len(self.vertices)

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.lines)))


def _map_angles(m: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Boundary angles moved by the matrix ``m`` (projectively, no overflow)."""
    half = angles / 2.0
    vec = np.stack([np.cos(half), -np.sin(half)])
    n, k = m @ vec
    return np.mod(-2.0 * np.arctan2(k, n), 2 * math.pi)


def _mobius(m: np.ndarray, z: complex) -> complex:
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def _dist_to_i(z: np.ndarray) -> np.ndarray:
    return 2 * np.arcsinh(np.abs(z - 1j) / (2 * np.sqrt(z.imag)))


class SymmetricTiling:
    """Lazily generated tiles of the full line family.

    ``base`` must contain, unclipped, every tile around every vertex within
    the covering radius of the basepoint's orbit; this is checked up front.
    """

    def __init__(self, G: TriangleGroup, base: Arrangement):
        self.G = G
        self.base = base
        self.cover = max(hyperbolic_distance(G.X, G.Y), hyperbolic_distance(G.X, G.Z)) + 1e-6
        near = [v for v in base.interior_vertices() if base.distance_to_basepoint(v) <= self.cover + 0.05]
        for v in near:
            around = [base.face_to_tile.get(f) for f in base.vertex_faces(v)]
            if len(around) != 4 or any(t is None or base.tiles[t].clipped for t in around):
                raise BaseTooSmall(f"tiles around base vertex {v} are clipped; enlarge the base radius")
        self._near = np.array(near)
        self._near_z = np.array([base.vertices[v].location.z for v in near])
        ball = orbit_ball(G, BASEPOINT, 2 * self.cover + 0.1)
        mats = ball.matrices
        inv = np.stack([mats[:, 1, 1], -mats[:, 0, 1], -mats[:, 1, 0], mats[:, 0, 0]], axis=1).reshape(-1, 2, 2)
        self._reducers = np.concatenate([mats, inv])
        self.line_list: list[tuple[float, float]] = []
        self._line_cells: dict[tuple, list[int]] = {}
        self._line_keys: list[np.ndarray] = []
        self.points: list[complex] = []
        self._vertex_ids: dict[tuple[int, int], int] = {}
        self.tiles: list[LTile] = []
        self._tile_ids: dict[frozenset, int] = {}
        self._around: dict[int, list[int]] = {}
        self._seed: int | None = None

    # -- registries -------------------------------------------------------

    def find_line(self, pair) -> int | None:
        """Index of an already generated line with these endpoint angles."""
        key = _symmetric_keys(np.sort(np.asarray(pair, dtype=float))[None, :])[0]
        lo = np.floor((key - LINE_TOL) / _CELL).astype(int)
        hi = np.floor((key + LINE_TOL) / _CELL).astype(int)
        for cell in itertools.product(*[sorted({a, b}) for a, b in zip(lo, hi)]):
            for i in self._line_cells.get(cell, ()):
                if np.abs(self._line_keys[i] - key).max() <= LINE_TOL:
                    return i
        return None

    def transfer(self, values: dict[int, int], angles: np.ndarray) -> dict[int, int]:
        """Re-index per-line values onto another list of lines (e.g. a disk family)."""
        out = {}
        for j, pair in enumerate(angles):
            i = self.find_line(pair)
            if i is not None and i in values:
                out[j] = values[i]
        return out

    def _line_id(self, pair: np.ndarray) -> int:
        pair = np.sort(pair)
        found = self.find_line(pair)
        if found is not None:
            return found
        key = _symmetric_keys(pair[None, :])[0]
        i = len(self.line_list)
        self.line_list.append((float(pair[0]), float(pair[1])))
        self._line_keys.append(key)
        cell = tuple(np.floor(key / _CELL).astype(int))
        self._line_cells.setdefault(cell, []).append(i)
        return i

    def _vertex_id(self, la: int, lb: int, z: complex) -> int:
        key = (min(la, lb), max(la, lb))
        v = self._vertex_ids.get(key)
        if v is None:
            v = len(self.points)
            self._vertex_ids[key] = v
            self.points.append(z)
        return v

    @property
    def line_angles(self) -> np.ndarray:
        return np.array(self.line_list).reshape(-1, 2)

    # -- local structure --------------------------------------------------

    def reduce(self, z: complex) -> tuple[np.ndarray, complex]:
        """Group element ``g`` (as a matrix) with ``g . z`` near the basepoint."""
        g = np.eye(2)
        d = _dist_to_i(np.array([z]))[0]
        R = self._reducers
        while True:
            imgs = (R[:, 0, 0] * z + R[:, 0, 1]) / (R[:, 1, 0] * z + R[:, 1, 1])
            ds = _dist_to_i(imgs)
            j = int(np.argmin(ds))
            if ds[j] >= d - 1e-9:
                return g, z
            z, d, g = imgs[j], ds[j], R[j] @ g

    def _import(self, g_inv: np.ndarray, bt: int, vmap: dict[int, int], lmap: dict[int, int]) -> int:
        base = self.base
        tile = base.tiles[bt]
        for l in tile.lines:
            if l not in lmap:
                lmap[l] = self._line_id(_map_angles(g_inv, base.family.angles[l]))
        vids = []
        for k, v in enumerate(tile.vertices):
            if v not in vmap:
                la, lb = tile.lines[k - 1], tile.lines[k]
                z = _mobius(g_inv, base.vertices[v].location.z)
                vmap[v] = self._vertex_id(lmap[la], lmap[lb], z)
            vids.append(vmap[v])
        key = frozenset(vids)
        t = self._tile_ids.get(key)
        if t is None:
            t = len(self.tiles)
            self._tile_ids[key] = t
            self.tiles.append(LTile(t, vids, tuple(lmap[l] for l in tile.lines)))
        return t

    def tiles_around(self, v: int) -> list[int]:
        got = self._around.get(v)
        if got is not None:
            return got
        g, z = self.reduce(self.points[v])
        d = 2 * np.arcsinh(np.abs(self._near_z - z) / (2 * np.sqrt(self._near_z.imag * z.imag)))
        j = int(np.argmin(d))
        if d[j] > 1e-6:
            raise TilingError(f"vertex {v} reduces to no base vertex (gap {d[j]:.3g})")
        bv = int(self._near[j])
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        g_inv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / det
        vmap: dict[int, int] = {}
        lmap: dict[int, int] = {}
        base = self.base
        around = [self._import(g_inv, base.face_to_tile[f], vmap, lmap) for f in base.vertex_faces(bv)]
        if vmap.get(bv) != v:
            raise TilingError(f"vertex {v} was matched to a different crossing")
        self._around[v] = around
        return around

    # -- tile complex interface --------------------------------------------

    def seed(self, base_tile: int | None = None) -> int:
        """The tiling's copy of a base tile (default: the base seed tile)."""
        if base_tile is None:
            if self._seed is None:
                self._seed = self._import(np.eye(2), seed_tile(self.base), {}, {})
            return self._seed
        if not self.base.tiles[base_tile].complete:
            raise TilingError(f"base tile {base_tile} is not complete")
        return self._import(np.eye(2), base_tile, {}, {})

    def tile_vertices(self, t: int) -> list[int]:
        return self.tiles[t].vertices

    def tile_lines(self, t: int) -> tuple[int, ...]:
        return self.tiles[t].key

    def tile_usable(self, t: int) -> bool:
        return True

    def corner_angle_at(self, t: int, v: int) -> float:
        vs = self.tiles[t].vertices
        k = vs.index(v)
        pts = [Point.from_complex(self.points[vs[i % len(vs)]]) for i in (k - 1, k, k + 1)]
        return angle_at(pts[1], pts[0], pts[2])

    def distance_to_basepoint(self, v: int) -> float:
        return hyperbolic_distance(BASEPOINT, Point.from_complex(self.points[v]))
