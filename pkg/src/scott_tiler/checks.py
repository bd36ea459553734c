"""Combinatorial checks on an arrangement: crossing axioms, tile census,
adjacency rules, plane properties and local degree bounds."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .arrangement import ARC, Arrangement, NoCompleteTiles, crossing_pairs_of, seed_tile
from .geom import EPS_PT, angle_between_at, hyperbolic_distance
from .trigroup import Signature, normalize_signature


@dataclass
class IntersectionGraph:
    """Lines as nodes, an edge whenever two lines cross somewhere in the plane."""

    adj: list[set[int]]

    @classmethod
    def from_family(cls, family) -> IntersectionGraph:
        return cls.from_angles(family.angles)

    @classmethod
    def from_angles(cls, angles: np.ndarray) -> IntersectionGraph:
        adj: list[set[int]] = [set() for _ in range(len(angles))]
        for i, j in crossing_pairs_of(angles):
            for a, b in zip(i.tolist(), j.tolist()):
                adj[a].add(b)
                adj[b].add(a)
        return cls(adj)

    def __len__(self):
        return len(self.adj)

    def edges(self):
        for u, nbrs in enumerate(self.adj):
            for v in nbrs:
                if u < v:
                    yield u, v

    def triangles(self):
        for u in range(len(self.adj)):
            for v in sorted(w for w in self.adj[u] if w > u):
                for w in sorted(self.adj[u] & self.adj[v]):
                    if w > v:
                        yield u, v, w


# ---------------------------------------------------------------------------
# crossing axioms


@dataclass
class AxiomReport:
    max_pair_intersections: int
    pair_ok: bool
    min_vertex_separation: float
    triple_points: list[tuple[int, ...]]
    separation_ok: bool
    degree_violations: list[int]
    vertex_degree_ok: bool
    euler: int
    euler_ok: bool

    @property
    def ok(self) -> bool:
        return self.pair_ok and self.separation_ok and self.vertex_degree_ok and self.euler_ok


def min_pairwise_distance(points) -> float:
    """Smallest hyperbolic distance between distinct points (brute force)."""
    if len(points) < 2:
        return math.inf
    z = np.array([p.z for p in points])
    best = math.inf
    for start in range(0, len(z), 512):
        chunk = z[start : start + 512]
        diff = np.abs(chunk[:, None] - z[None, :])
        d = 2 * np.arcsinh(diff / (2 * np.sqrt(chunk.imag[:, None] * z.imag[None, :])))
        idx = np.arange(start, start + len(chunk))
        d[np.arange(len(chunk)), idx] = math.inf
        best = min(best, float(d.min()))
    return best


def verify_crossing_axioms(A: Arrangement, sep_tol: float = EPS_PT) -> AxiomReport:
    interior = A.interior_vertices()
    # two geodesics meet at most once: each crossing pair maps to one vertex
    per_pair = Counter(A.crossing_pairs.keys())
    max_pair = max(per_pair.values(), default=0)
    pts = [A.vertices[v].location for v in interior]
    sep = min_pairwise_distance(pts)
    triples = [tuple(A.vertices[v].lines) for v in interior if len(A.vertices[v].lines) > 2]
    bad_degree = [v for v in interior if len(set(A.vertex_faces(v))) != 4]
    euler = len(A.vertices) - A.num_edges + A.num_faces
    return AxiomReport(
        max_pair,
        max_pair <= 1,
        sep,
        triples,
        sep > sep_tol and not triples,
        bad_degree,
        not bad_degree,
        euler,
        euler == 2,
    )


def crossing_angles(A: Arrangement) -> list[float]:
    out = []
    for v in A.interior_vertices():
        vert = A.vertices[v]
        a, b = vert.lines[:2]
        out.append(angle_between_at(A.family.lines[a], A.family.lines[b], vert.location, tol=1e-6))
    return out


# ---------------------------------------------------------------------------
# census


def tile_census(A: Arrangement) -> dict[int, int]:
    tiles = A.complete_tiles()
    if not tiles:
        raise NoCompleteTiles("no complete tile in the trusted sub-disk")
    return dict(sorted(Counter(t.side_count for t in tiles).items()))


CASE_LABELS = {"1.1": "case 1.1", "1.2": "case 1.2", "2": "case 2", "3": "case 3"}


@dataclass(frozen=True)
class ExpectedCensus:
    allowed: frozenset[int]
    case: int
    subcase: str
    exact: bool  # the observed support must equal ``allowed`` rather than sit inside it

    @property
    def label(self) -> str:
        return CASE_LABELS[self.subcase]

    def matches(self, census: dict[int, int]) -> bool:
        support = set(census)
        return support == self.allowed if self.exact else support <= self.allowed


def expected_census(sig: Signature) -> ExpectedCensus:
    n = normalize_signature(sig)
    p, q, r = n.sig.indices
    if n.case == 2:
        return ExpectedCensus(frozenset({q}), 2, n.subcase, True)
    if n.case == 3:
        return ExpectedCensus(frozenset({3, q}), 3, n.subcase, True)
    return ExpectedCensus(frozenset({p, q, 2 * r}), 1, n.subcase, False)


# ---------------------------------------------------------------------------
# adjacency


@dataclass
class AdjacencyReport:
    obs2_ok: bool  # no two quadrilaterals share an edge
    obs3_ok: bool  # triangle neighbours are 2r-gons, 2r >= 6
    case3_edge_rule_ok: bool  # every interior edge: triangle | q-gon
    applicable: dict[str, bool]
    violations: dict[str, list] = field(default_factory=dict)
    edges_checked: int = 0


def adjacency_observations(A: Arrangement) -> AdjacencyReport:
    n = normalize_signature(A.family.sig)
    p, q, r = n.sig.indices
    viol: dict[str, list] = {"obs2": [], "obs3": [], "case3": []}
    checked = 0
    for a, b, _ in A.interior_edges():
        ta, tb = A.tiles[a], A.tiles[b]
        if not (ta.complete and tb.complete):
            continue
        checked += 1
        sa, sb = ta.side_count, tb.side_count
        if n.case == 1:
            if sa == 4 and sb == 4:
                viol["obs2"].append((a, b))
            for s1, s2 in ((sa, sb), (sb, sa)):
                if s1 == 3 and not (s2 == 2 * r and s2 >= 6):
                    viol["obs3"].append((a, b))
        if n.case == 3 and sorted((sa, sb)) != sorted((3, q)):
            viol["case3"].append((a, b))
    applicable = {"obs2": n.case == 1, "obs3": n.case == 1, "case3": n.case == 3}
    return AdjacencyReport(
        not viol["obs2"],
        not viol["obs3"],
        not viol["case3"],
        applicable,
        {k: v for k, v in viol.items() if v},
        checked,
    )


# ---------------------------------------------------------------------------
# plane properties


@dataclass(frozen=True)
class PlaneCheck:
    k: int
    passed: bool
    witness: tuple[int, ...] | None = None


def check_k_plane(graph: IntersectionGraph, k: int) -> PlaneCheck:
    """Pass iff no ``k`` lines pairwise cross (the graph has no ``k``-clique)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    adj = graph.adj

    def extend(clique: tuple[int, ...], cands: set[int]):
        if len(clique) == k:
            return clique
        for v in sorted(cands):
            found = extend(clique + (v,), {w for w in cands & adj[v] if w > v})
            if found:
                return found
        return None

    if k == 2:
        for e in graph.edges():
            return PlaneCheck(k, False, e)
        return PlaneCheck(k, True)
    for tri in graph.triangles():
        if k == 3:
            return PlaneCheck(k, False, tri)
        u, v, w = tri
        found = extend(tri, {x for x in adj[u] & adj[v] & adj[w] if x > w})
        if found:
            return PlaneCheck(k, False, found)
    return PlaneCheck(k, True)


# ---------------------------------------------------------------------------
# seed-tile degree bound and triangles


@dataclass
class LocalReport:
    seed: int
    seed_lines: tuple[int, ...]
    max_seed_degree: int
    degree_ok: bool
    cliques_checked: int
    clique_violations: list[tuple[int, int, int]]
    cliques_ok: bool


def local_degree_and_clique_checks(A: Arrangement, graph: IntersectionGraph | None = None, seed: int | None = None) -> LocalReport:
    if graph is None:
        graph = IntersectionGraph.from_family(A.family)
    if seed is None:
        seed = seed_tile(A)
    seed_lines = A.tiles[seed].key
    s = set(seed_lines)
    degrees = [len(graph.adj[l] & s) for l in seed_lines]
    max_deg = max(degrees, default=0)

    triangles = {}
    for t in A.complete_tiles():
        if t.side_count == 3:
            triangles[tuple(sorted(t.lines))] = t.index
    k_trusted = math.tanh(A.trusted_radius)
    checked = 0
    bad = []
    for tri in graph.triangles():
        pts = []
        for a, b in itertools.combinations(tri, 2):
            v = A.crossing_pairs.get((a, b))
            if v is None:
                break
            pts.append(A.vertices[v].klein)
        if len(pts) < 3 or any(abs(k) > k_trusted for k in pts):
            continue
        checked += 1
        if tri not in triangles:
            bad.append(tri)
    return LocalReport(seed, seed_lines, max_deg, max_deg <= 4, checked, bad, not bad)
