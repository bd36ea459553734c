"""End-to-end analysis of one signature, collected into a JSON-ready report."""

from __future__ import annotations

import dataclasses
import json
import math
import os
import tempfile
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .arrangement import build_arrangement, seed_tile
from .checks import (
    IntersectionGraph,
    adjacency_observations,
    check_k_plane,
    crossing_angles,
    expected_census,
    local_degree_and_clique_checks,
    tile_census,
    verify_crossing_axioms,
)
from .coloring import greedy_color, polygon_growth, verify_coloring
from .geom import BASEPOINT, EPS_MAT, EPS_PT, classify_isometry, hyperbolic_distance
from .lines import NotStabilized, build_line_family, foot_of_basepoint
from .tiling import SymmetricTiling
from .trigroup import (
    Geometry,
    build_generators,
    classify_signature,
    cone_point_incidence,
    evaluate_word,
    normalize_signature,
    orbit_ball,
    scott_axis,
    scott_element,
    scott_trace_oracle,
    scott_word,
    word,
)

SCHEMA_VERSION = 1
DEFAULT_RADIUS = 6.0
GROWTH_STEPS = 2

ACCEPTANCE_FAMILIES = ((4, 5, 6), (3, 4, 5), (5, 5, 5), (4, 5, 2), (4, 7, 2), (3, 7, 2), (3, 8, 2))


@dataclass
class AnalysisOptions:
    radius: float = DEFAULT_RADIUS
    max_wordlen: int = 14
    tol_point: float = EPS_PT
    tol_matrix: float = EPS_MAT
    seed_tile: int | str = "auto"
    method: str = "orbit"  # or "wordlength"
    trusted_radius: float | None = None
    growth: str = "symmetric"  # or "disk": grow inside the arrangement only
    growth_steps: int = GROWTH_STEPS


@dataclass
class AnalysisReport:
    signature: dict
    scott: dict
    family: dict
    axioms: dict
    cone_incidence: dict
    census: dict
    adjacency: dict
    planes: dict
    coloring: dict
    growth: dict
    checks: dict
    timings: dict
    warnings: list
    schema_version: int = SCHEMA_VERSION

    @property
    def ok(self) -> bool:
        stalled = any(w.startswith("NotStabilized") for w in self.warnings)
        return all(self.checks.values()) and not stalled

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> AnalysisReport:
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        names = {f.name for f in dataclasses.fields(cls)}
        missing = names - set(d)
        if missing:
            raise ValueError(f"report is missing {sorted(missing)}")
        return cls(**{k: d[k] for k in names})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> AnalysisReport:
        return cls.from_dict(json.loads(text))

    def canonical(self) -> dict:
        """The report without wall-clock timings, for run-to-run comparison."""
        d = self.to_dict()
        d.pop("timings")
        return d


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write the whole file or nothing: temp file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def error_object(exc: BaseException, exit_code: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "error": {"type": type(exc).__name__, "message": str(exc)},
        "exit_code": exit_code,
    }


def color_bounds(subcase: str) -> tuple[int, int]:
    """(color bound, backward-conflict bound) for a case label."""
    return (5, 4) if subcase in ("1.1", "2") else (7, 6)


def _finite(x: float) -> float | None:
    return x if math.isfinite(x) else None


@dataclass
class Analysis:
    """Everything ``analyze`` built, for callers that want more than the report."""

    report: AnalysisReport
    group: object
    arrangement: object
    tiling: object = None
    growth: object = None
    coloring: object = None
    graph: object = None
    extras: dict = field(default_factory=dict)


def analyze(p: int, q: int, r: int, options: AnalysisOptions | None = None) -> AnalysisReport:
    return run_analysis(p, q, r, options).report


def run_analysis(p: int, q: int, r: int, options: AnalysisOptions | None = None) -> Analysis:
    opts = options or AnalysisOptions()
    timings: dict[str, float] = {}
    notes: list[str] = []
    clock = time.perf_counter()

    def lap(name):
        nonlocal clock
        now = time.perf_counter()
        timings[name] = round(now - clock, 6)
        clock = now

    sig = classify_signature(p, q, r)
    norm = normalize_signature(sig)
    G = build_generators(norm.sig)
    g = scott_element(G)
    axis = scott_axis(G)
    cls = classify_isometry(g, eps_mat=opts.tol_matrix)
    oracle = scott_trace_oracle(norm.sig)
    lap("group")

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NotStabilized)
        fam = build_line_family(G, axis, opts.radius, N_max=opts.max_wordlen, eps_pt=opts.tol_point, method=opts.method)
    notes.extend(str(w.message) for w in caught if issubclass(w.category, NotStabilized))
    lap("family")

    A = build_arrangement(fam, trusted_radius=opts.trusted_radius, eps_pt=opts.tol_point)
    lap("arrangement")

    axioms = verify_crossing_axioms(A, sep_tol=max(opts.tol_point, 1e-6))
    census = tile_census(A)
    expected = expected_census(norm.sig)
    angles = crossing_angles(A)
    right_angle = norm.case == 2 or (norm.case == 1 and norm.sig.r == 2)
    adj = adjacency_observations(A)
    graph = IntersectionGraph.from_family(fam)
    k4 = check_k_plane(graph, 4)
    k3 = check_k_plane(graph, 3)
    seed = seed_tile(A) if opts.seed_tile == "auto" else int(opts.seed_tile)
    local = local_degree_and_clique_checks(A, graph, seed)
    lap("checks")

    tau = cls.translation_length
    reach = hyperbolic_distance(BASEPOINT, foot_of_basepoint(axis)) + tau / 2
    reach += max(hyperbolic_distance(G.X, G.Y), hyperbolic_distance(G.X, G.Z)) + 0.5
    incidence = cone_point_incidence(G, [axis], reach, orbit_ball(G, BASEPOINT, reach), eps_pt=opts.tol_point)
    lap("cone_points")

    if opts.growth == "symmetric":
        T = SymmetricTiling(G, A)
        start = T.seed(None if opts.seed_tile == "auto" else seed)
    elif opts.growth == "disk":
        T, start = A, seed
    else:
        raise ValueError(f"unknown growth mode {opts.growth!r}")
    growth = polygon_growth(T, steps=opts.growth_steps, seed=start)
    lap("growth")

    coloring = greedy_color(T, growth.generation)
    proper = verify_coloring(T, coloring)
    bound, conflict_bound = color_bounds(norm.subcase)
    lap("coloring")

    has_triangles = 3 in census
    checks = {
        "scott_infinite_order": abs(g.trace) > 2 + 1e-6,
        "trace_oracle_agrees": abs(abs(g.trace) - oracle) <= opts.tol_matrix,
        "family_stabilized": fam.stabilized,
        "pair_intersections_ok": axioms.pair_ok,
        "vertex_separation_ok": axioms.separation_ok,
        "vertex_degree_ok": axioms.vertex_degree_ok,
        "euler_ok": axioms.euler_ok,
        "census_match": expected.matches(census),
        "right_angles_ok": (not right_angle) or all(abs(a - math.pi / 2) <= 1e-6 for a in angles),
        "obs2_ok": adj.obs2_ok or not adj.applicable["obs2"],
        "obs3_ok": adj.obs3_ok or not adj.applicable["obs3"],
        "case3_edge_rule_ok": adj.case3_edge_rule_ok or not adj.applicable["case3"],
        "k4_pass": k4.passed,
        "k3_matches_triangles": k3.passed == (not has_triangles),
        "cliques_bound_triangles": local.cliques_ok,
        "seed_degree_ok": local.degree_ok,
        "growth_convex": growth.all_convex,
        "growth_fixups_ok": has_triangles or growth.total_fixups == 0,
        "observation4_ok": growth.max_edge_interior_points <= 2,
        "coloring_proper": proper.passed,
        "colors_within_bound": coloring.colors_used_assigned <= bound,
        "conflicts_within_bound": coloring.max_backward_conflicts <= conflict_bound,
    }

    report = AnalysisReport(
        signature={
            "p": p,
            "q": q,
            "r": r,
            "normalized": list(norm.sig.indices),
            "geometry": sig.geometry.value,
            "case_label": expected.label,
        },
        scott={
            "word": str(scott_word(norm.sig)),
            "trace": g.trace,
            "oracle_abs_trace": oracle,
            "class": cls.kind.value,
            "translation_length": tau,
        },
        family={
            "num_lines": len(fam),
            "word_length": fam.word_length,
            "stabilized": fam.stabilized,
            "region_radius": fam.region_radius,
            "trusted_radius": A.trusted_radius,
            "method": opts.method,
        },
        axioms={
            "triple_points": [list(t) for t in axioms.triple_points],
            "min_vertex_separation": _finite(axioms.min_vertex_separation),
            "separation_ok": axioms.separation_ok,
            "vertex_degree_ok": axioms.vertex_degree_ok,
            "euler_ok": axioms.euler_ok,
            "euler": axioms.euler,
            "max_pair_intersections": axioms.max_pair_intersections,
            "interior_vertices": len(A.interior_vertices()),
            "min_crossing_angle": min(angles, default=None),
            "max_crossing_angle": max(angles, default=None),
        },
        cone_incidence={
            k: {"status": v.status, "min_distance": v.min_distance, "orbit_points": v.orbit_points}
            for k, v in incidence.items()
        },
        census={
            "observed": {str(k): v for k, v in census.items()},
            "expected": sorted(expected.allowed),
            "exact": expected.exact,
            "match": expected.matches(census),
            "complete_tiles": sum(census.values()),
            # the census is taken on the axis family itself; no parallel strips are collapsed
            "strips_collapsed": False,
        },
        adjacency={
            "obs2_ok": adj.obs2_ok,
            "obs3_ok": adj.obs3_ok,
            "case3_edge_rule_ok": adj.case3_edge_rule_ok,
            "applicable": adj.applicable,
            "edges_checked": adj.edges_checked,
        },
        planes={
            "k4_pass": k4.passed,
            "k3_pass": k3.passed,
            "k3_witness": list(k3.witness) if k3.witness else None,
            "cliques_checked": local.cliques_checked,
            "cliques_ok": local.cliques_ok,
            "seed_tile": seed,
            "max_seed_degree": local.max_seed_degree,
        },
        coloring={
            "colors_used": coloring.colors_used_assigned,
            "colors_used_all": coloring.colors_used,
            "bound": bound,
            "proper": proper.passed,
            "max_backward_conflicts": coloring.max_backward_conflicts,
            "conflict_bound": conflict_bound,
            "assigned_lines": len(coloring.assigned),
            "total_lines": len(coloring.colors),
        },
        growth={
            "mode": opts.growth,
            "generations": growth.generations,
            "fixups": growth.total_fixups,
            "max_fixup_rounds": max((st.fixup_rounds for st in growth.states), default=0),
            "all_convex": growth.all_convex,
            "tiles": [len(s.tiles) for s in growth.states],
            "max_edge_interior_points": growth.max_edge_interior_points,
            "stop_reason": growth.stop_reason,
        },
        checks=checks,
        timings=timings,
        warnings=notes,
    )
    return Analysis(report, G, A, T, growth, coloring, graph)


# ---------------------------------------------------------------------------
# signature grid


def signature_grid(max_index: int = 9) -> list[tuple[int, int, int]]:
    """Sorted hyperbolic signatures with every index at most ``max_index``."""
    out = []
    for a in range(2, max_index + 1):
        for b in range(a, max_index + 1):
            for c in range(b, max_index + 1):
                if classify_signature(a, b, c).geometry is Geometry.HYPERBOLIC:
                    out.append((a, b, c))
    return out


def algebra_checks(p: int, q: int, r: int, tol_matrix: float = EPS_MAT) -> dict:
    """Scott element order, group relations and the trace oracle for one signature."""
    norm = normalize_signature(classify_signature(p, q, r))
    G = build_generators(norm.sig)
    g = scott_element(G)
    a, b, c = norm.sig.indices
    relations = {
        "x^p": (G.x**a).is_identity(tol_matrix),
        "y^q": (G.y**b).is_identity(tol_matrix),
        "z^r": (G.z**c).is_identity(tol_matrix),
        "xyz": evaluate_word(G, word("x y z")).is_identity(tol_matrix),
    }
    oracle = scott_trace_oracle(norm.sig)
    return {
        "signature": [p, q, r],
        "normalized": list(norm.sig.indices),
        "case_label": expected_census(norm.sig).label,
        "trace": g.trace,
        "oracle_abs_trace": oracle,
        "infinite_order": abs(g.trace) > 2 + 1e-6,
        "relations": relations,
        "relations_ok": all(relations.values()),
        "oracle_ok": abs(abs(g.trace) - oracle) <= tol_matrix,
    }
