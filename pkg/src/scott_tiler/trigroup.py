"""Hyperbolic triangle groups, words in their generators, and the Scott word.

The base triangle has X at the basepoint ``i``, Y straight above it on the
imaginary axis and Z to the right, so that the clockwise rotations
``x, y, z`` through ``2pi/p, 2pi/q, 2pi/r`` satisfy ``x y z = 1``.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geom import (
    BASEPOINT,
    EPS_MAT,
    EPS_PT,
    Geodesic,
    Isometry,
    IsometryKind,
    Point,
    axis_of,
    classify_isometry,
    distance_point_to_geodesic,
    hyperbolic_distance,
    klein_to_point,
    point_to_klein,
    rotation_about,
)

log = logging.getLogger(__name__)

GENERATORS = ("x", "y", "z")
DEFAULT_BALL_CAP = 200_000


class TriGroupError(Exception):
    pass


class InvalidIndex(TriGroupError, ValueError):
    pass


class NonHyperbolicSignature(TriGroupError):
    pass


class UncoveredSignature(TriGroupError):
    pass


class OrderExceedsCap(TriGroupError):
    pass


class BallTooLarge(TriGroupError):
    pass


class NoWitnessFound(TriGroupError):
    pass


class WordSyntaxError(TriGroupError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ConsistencyFailure(TriGroupError):
    """A computed fact contradicts a proven statement; numerics are suspect."""


class Geometry(enum.Enum):
    HYPERBOLIC = "HYPERBOLIC"
    EUCLIDEAN = "EUCLIDEAN"
    SPHERICAL = "SPHERICAL"


@dataclass(frozen=True)
class Signature:
    p: int
    q: int
    r: int
    geometry: Geometry

    @property
    def indices(self) -> tuple[int, int, int]:
        return (self.p, self.q, self.r)

    def __str__(self):
        return f"Δ({self.p},{self.q},{self.r})"


def classify_signature(p: int, q: int, r: int) -> Signature:
    for n in (p, q, r):
        if int(n) != n or n < 2:
            raise InvalidIndex(f"cone index {n} must be an integer >= 2")
    total = Fraction(1, p) + Fraction(1, q) + Fraction(1, r)
    if total < 1:
        geometry = Geometry.HYPERBOLIC
    elif total == 1:
        geometry = Geometry.EUCLIDEAN
    else:
        geometry = Geometry.SPHERICAL
    return Signature(int(p), int(q), int(r), geometry)


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    """Freely reduced word; letters are ``(generator, +1 or -1)`` pairs."""

    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        reduced: list[tuple[str, int]] = []
        for gen, sign in self.letters:
            if gen not in GENERATORS or sign not in (1, -1):
                raise ValueError(f"bad letter {(gen, sign)!r}")
            if reduced and reduced[-1] == (gen, -sign):
                reduced.pop()
            else:
                reduced.append((gen, sign))
        object.__setattr__(self, "letters", tuple(reduced))

    @classmethod
    def parse(cls, text: str) -> Word:
        """Parse whitespace-separated tokens such as ``x y^-2 z^3``."""
        letters: list[tuple[str, int]] = []
        for m in re.finditer(r"\S+", text):
            tok = m.group()
            tm = re.fullmatch(r"([xyz])(?:\^([+-]?\d+))?", tok)
            if tm is None:
                raise WordSyntaxError(f"bad token {tok!r}", m.start())
            exp = int(tm.group(2)) if tm.group(2) is not None else 1
            if exp == 0:
                raise WordSyntaxError(f"zero exponent in {tok!r}", m.start())
            letters.extend([(tm.group(1), 1 if exp > 0 else -1)] * abs(exp))
        return cls(tuple(letters))

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> Word:
        base = self if n >= 0 else self.inverse()
        return Word(base.letters * abs(n))

    def inverse(self) -> Word:
        return Word(tuple((g, -s) for g, s in reversed(self.letters)))

    def __str__(self):
        if not self.letters:
            return "1"
        out = []
        for gen, group in itertools.groupby(self.letters):
            n = len(list(group)) * gen[1]
            out.append(gen[0] if n == 1 else f"{gen[0]}^{n}")
        return " ".join(out)


def word(text: str) -> Word:
    return Word.parse(text)


# ---------------------------------------------------------------------------
# the group


@dataclass(frozen=True)
class TriangleGroup:
    sig: Signature
    X: Point
    Y: Point
    Z: Point
    x: Isometry
    y: Isometry
    z: Isometry

    def generator(self, name: str) -> Isometry:
        return {"x": self.x, "y": self.y, "z": self.z}[name]

    def cone_points(self) -> dict[str, tuple[Point, int]]:
        return {"X": (self.X, self.sig.p), "Y": (self.Y, self.sig.q), "Z": (self.Z, self.sig.r)}


def side_length(alpha: float, beta: float, gamma: float) -> float:
    """Side opposite the angle ``gamma`` of a hyperbolic triangle."""
    return math.acosh((math.cos(alpha) * math.cos(beta) + math.cos(gamma)) / (math.sin(alpha) * math.sin(beta)))


def build_generators(sig: Signature) -> TriangleGroup:
    if sig.geometry is not Geometry.HYPERBOLIC:
        raise NonHyperbolicSignature(f"{sig} is {sig.geometry.value}")
    alpha, beta, gamma = (math.pi / n for n in sig.indices)
    dxy = side_length(alpha, beta, gamma)
    dxz = side_length(alpha, gamma, beta)
    X = BASEPOINT
    Y = Point(0.0, math.exp(dxy))
    # Z is reached from X by turning clockwise from the direction of Y
    Z = rotation_about(X, alpha)(Point(0.0, math.exp(dxz)))
    return TriangleGroup(
        sig,
        X,
        Y,
        Z,
        rotation_about(X, 2 * alpha),
        rotation_about(Y, 2 * beta),
        rotation_about(Z, 2 * gamma),
    )


def evaluate_word(G: TriangleGroup, w: Word) -> Isometry:
    result = Isometry.identity()
    for gen, sign in w.letters:
        g = G.generator(gen)
        result = result @ (g if sign > 0 else g.inverse())
    return result


INFINITE = "INFINITE"


def element_order(G: TriangleGroup, g: Isometry, cap: int | None = None) -> int | str:
    """Order of ``g`` as an integer, or ``INFINITE``."""
    if cap is None:
        cap = 4 * G.sig.p * G.sig.q * G.sig.r
    cls = classify_isometry(g)
    if cls.kind is IsometryKind.IDENTITY:
        return 1
    if cls.kind in (IsometryKind.HYPERBOLIC, IsometryKind.PARABOLIC):
        return INFINITE
    power = g
    for n in range(2, cap + 1):
        power = power @ g
        if power.is_identity(EPS_MAT):
            return n
    raise OrderExceedsCap(f"elliptic element with angle {cls.angle} has no order <= {cap}")


# ---------------------------------------------------------------------------
# Scott's word


@dataclass(frozen=True)
class Normalized:
    """A signature reordered into the pattern the case analysis expects."""

    sig: Signature
    permutation: tuple[int, int, int]  # position in the input of each new index
    case: int  # 1, 2 or 3
    subcase: str  # "1.1", "1.2", "2" or "3"


def normalize_signature(sig: Signature) -> Normalized:
    """Assign the X, Y, Z roles so the signature matches a covered pattern.

    Input orders already matching a pattern are kept. Otherwise an index 2 is
    moved to the Z slot and an index 3 or 4 next to it is moved to the X slot.
    """
    if sig.geometry is not Geometry.HYPERBOLIC:
        raise NonHyperbolicSignature(f"{sig} is {sig.geometry.value}")
    idx = sig.indices
    perm = [0, 1, 2]
    if 2 in idx:
        j = idx.index(2)
        perm = [k for k in range(3) if k != j] + [j]
        if idx[perm[1]] < idx[perm[0]] and idx[perm[1]] in (3, 4):
            perm[0], perm[1] = perm[1], perm[0]
    p, q, r = (idx[k] for k in perm)
    new = classify_signature(p, q, r)
    if r == 2:
        if p == 3 and q >= 7:
            case, sub = 3, "3"
        elif p == 4 and q >= 5:
            case, sub = 2, "2"
        elif p >= 4 and q >= 4:
            case, sub = 1, "1.1"
        else:
            raise UncoveredSignature(f"{sig} is hyperbolic but not covered by the case list")
    else:
        case, sub = 1, ("1.2" if 3 in (p, q, r) else "1.1")
    return Normalized(new, tuple(perm), case, sub)


def scott_word(sig: Signature) -> Word:
    """``x y^-1`` in general, ``x y^-2`` for signatures of type (3, q, 2).

    The word refers to the generators of the *normalized* signature.
    """
    n = normalize_signature(sig)
    return word("x y^-2") if n.case == 3 else word("x y^-1")


def scott_element(G: TriangleGroup) -> Isometry:
    """The Scott word evaluated in ``G``, which must use the normalized order."""
    n = normalize_signature(G.sig)
    if n.sig != G.sig:
        raise ValueError(f"{G.sig} is not normalized; build the group from {n.sig}")
    return evaluate_word(G, scott_word(G.sig))


def scott_axis(G: TriangleGroup) -> Geodesic:
    g = scott_element(G)
    cls = classify_isometry(g)
    if cls.kind is not IsometryKind.HYPERBOLIC:
        raise ConsistencyFailure(f"Scott element of {G.sig} is {cls.kind.value} (trace {g.trace!r})")
    return axis_of(g)


def scott_trace_oracle(sig: Signature) -> float:
    """|trace| of the Scott element from half-angles and the X-Y distance.

    Uses tr(A B) = 2 (cos a cos b - sin a sin b cosh d) for rotations with
    signed half-angles a, b about points at distance d.
    """
    n = normalize_signature(sig).sig
    alpha, beta, gamma = (math.pi / k for k in n.indices)
    cosh_d = (math.cos(alpha) * math.cos(beta) + math.cos(gamma)) / (math.sin(alpha) * math.sin(beta))
    half_y = -2 * beta if n.p == 3 and n.r == 2 else -beta
    return abs(2.0 * (math.cos(alpha) * math.cos(half_y) - math.sin(alpha) * math.sin(half_y) * cosh_d))


# ---------------------------------------------------------------------------
# balls in the Cayley graph

LETTERS: tuple[tuple[str, int], ...] = tuple((g, s) for g in GENERATORS for s in (1, -1))


def _generic_point(G: TriangleGroup) -> complex:
    # interior point of the base triangle with trivial stabiliser
    k = (0.31 * point_to_klein(G.X) + 0.37 * point_to_klein(G.Y) + 0.32 * point_to_klein(G.Z))
    return klein_to_point(k).z


@dataclass
class GroupBall:
    """Distinct elements of word length <= ``radius``, one shortest witness each."""

    matrices: np.ndarray  # (n, 2, 2)
    words: list[Word]
    radius: int
    level_starts: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        for m, w in zip(self.matrices, self.words):
            yield Isometry.from_matrix(m), w

    def level(self, n: int) -> slice:
        end = self.level_starts[n + 1] if n + 1 < len(self.level_starts) else len(self.words)
        return slice(self.level_starts[n], end)


def _keys(mats: np.ndarray, w0: complex) -> np.ndarray:
    num = mats[:, 0, 0] * w0 + mats[:, 0, 1]
    den = mats[:, 1, 0] * w0 + mats[:, 1, 1]
    img = num / den
    return np.stack([np.log(img.imag), img.real / img.imag], axis=1)


def _new_mask(old_keys: np.ndarray, cand_keys: np.ndarray, tol: float) -> tuple[np.ndarray, list]:
    """Mask of candidates that match no old element and no earlier candidate."""
    keys = np.concatenate([old_keys, cand_keys])
    n_old = len(old_keys)
    order = np.lexsort((keys[:, 1], keys[:, 0]))
    sk = keys[order]
    dup = np.zeros(len(keys), dtype=bool)
    pairs = []
    shift = 1
    while shift < len(keys):
        close0 = np.abs(sk[shift:, 0] - sk[:-shift, 0]) <= tol
        if not close0.any():
            break
        close = close0 & (np.abs(sk[shift:, 1] - sk[:-shift, 1]) <= tol * np.maximum(1.0, np.abs(sk[shift:, 1])))
        i = order[:-shift][close]
        j = order[shift:][close]
        later = np.maximum(i, j)
        dup[later] = True
        pairs.extend(zip(np.minimum(i, j).tolist(), later.tolist()))
        shift += 1
    return ~dup[n_old:], pairs


def group_ball(G: TriangleGroup, N: int, cap: int = DEFAULT_BALL_CAP, _grow_from: GroupBall | None = None) -> GroupBall:
    """All distinct elements expressible by reduced words of length <= N.

    Levels are generated in lexicographic word order, so the first witness
    kept for an element is its shortest, lexicographically least word.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    gen_mats = []
    for gen, sign in LETTERS:
        g = G.generator(gen)
        g = g if sign > 0 else g.inverse()
        gen_mats.append(np.array(g.matrix))
    gen_mats = np.array(gen_mats)
    w0 = _generic_point(G)

    if _grow_from is None:
        ball = GroupBall(np.eye(2)[None, :, :].copy(), [Word()], 0, [0])
    else:
        ball = _grow_from
    keys = _keys(ball.matrices, w0)
    tol = 1e-7
    while ball.radius < N:
        sl = ball.level(ball.radius)
        parents = ball.matrices[sl]
        pwords = ball.words[sl]
        cand = np.einsum("nij,ljk->nlik", parents, gen_mats).reshape(-1, 2, 2)
        allowed = np.ones((len(pwords), len(LETTERS)), dtype=bool)
        for i, w in enumerate(pwords):
            if w.letters:
                gen, sign = w.letters[-1]
                allowed[i, LETTERS.index((gen, -sign))] = False
        allowed = allowed.ravel()
        cand = cand[allowed]
        cidx = np.nonzero(allowed)[0]
        ckeys = _keys(cand, w0)
        mask, pairs = _new_mask(keys, ckeys, tol)
        _check_merges(ball.matrices, cand, pairs, len(keys))
        new_mats = cand[mask]
        new_words = []
        for flat in cidx[mask]:
            parent, letter = divmod(int(flat), len(LETTERS))
            new_words.append(Word(pwords[parent].letters + (LETTERS[letter],)))
        if len(ball.words) + len(new_words) > cap:
            raise BallTooLarge(f"ball of radius {ball.radius + 1} exceeds {cap} elements")
        ball = GroupBall(
            np.concatenate([ball.matrices, new_mats]),
            ball.words + new_words,
            ball.radius + 1,
            ball.level_starts + [len(ball.words)],
        )
        keys = np.concatenate([keys, ckeys[mask]])
    return ball


def _check_merges(old: np.ndarray, cand: np.ndarray, pairs: list, n_old_keys: int) -> None:
    """Confirm merged pairs agree as matrices; warn on borderline ones."""
    if not pairs:
        return
    stack = old if n_old_keys == len(old) else old[:n_old_keys]

    def mat(k):
        return stack[k] if k < n_old_keys else cand[k - n_old_keys]

    for i, j in pairs[:2000]:
        a, b = mat(i), mat(j)
        scale = max(1.0, float(np.abs(a).max()))
        d = min(np.abs(a - b).max(), np.abs(a + b).max()) / scale
        if d > EPS_MAT:
            raise ConsistencyFailure(f"generic-point collision between distinct matrices (distance {d:.3g})")
        if d > EPS_MAT / 10:
            warnings.warn(f"near-degenerate merge in group ball (distance {d:.3g})", stacklevel=3)


# ---------------------------------------------------------------------------
# witness search


def lemma25_candidates(a: Word, b: Word) -> list[Word]:
    pool = [a, b, a * b]
    out = []
    for u in pool:
        out.append(u)
        for v in pool:
            for e in (1, -1, 2, -2):
                out.append(u * v**e)
    return out


def lemma25_search(G: TriangleGroup, a: Word, b: Word, cap: int | None = None) -> Word:
    """First candidate ``u``, ``u v^±1`` or ``u v^±2`` that is hyperbolic."""
    for w in (a, b, a * b):
        if element_order(G, evaluate_word(G, w), cap) == INFINITE:
            raise ValueError(f"{w} does not have finite order")
    for cand in lemma25_candidates(a, b):
        if classify_isometry(evaluate_word(G, cand)).kind is IsometryKind.HYPERBOLIC:
            return cand
    raise NoWitnessFound(f"no hyperbolic element among the candidates for ({a}, {b})")


# ---------------------------------------------------------------------------
# cone points


@dataclass(frozen=True)
class Incidence:
    orbit: str
    min_distance: float
    status: str  # "incident", "separated" or "ambiguous"
    orbit_points: int


def orbit_points(G: TriangleGroup, center: Point, R: float, ball: GroupBall) -> list[Point]:
    """Distinct images of ``center`` within distance ``R`` of the basepoint."""
    z = complex(center.u, center.v)
    num = ball.matrices[:, 0, 0] * z + ball.matrices[:, 0, 1]
    den = ball.matrices[:, 1, 0] * z + ball.matrices[:, 1, 1]
    img = num / den
    d = 2 * np.arcsinh(np.abs(img - 1j) / (2 * np.sqrt(img.imag)))
    img = img[d <= R]
    keys = np.round(np.stack([np.log(img.imag), img.real / img.imag], axis=1), 8)
    _, first = np.unique(keys, axis=0, return_index=True)
    return [Point(float(w.real), float(w.imag)) for w in img[np.sort(first)]]


def _min_distance_to_line(pts: list[Point], line: Geodesic) -> float:
    if not pts:
        return math.inf
    u = np.array([p.u for p in pts])
    v = np.array([p.v for p in pts])
    if line.vertical:
        d = np.arcsinh(np.abs(u - line.e1) / v)
    else:
        e1, e2 = line.e1, line.e2
        d = np.arcsinh(np.abs((u - e1) * (u - e2) + v * v) / ((e2 - e1) * v))
    return float(d.min())


def cone_point_incidence(
    G: TriangleGroup,
    lines,
    R: float,
    ball: GroupBall | None = None,
    eps_pt: float = EPS_PT,
    delta_sep: float = 1e-3,
) -> dict[str, Incidence]:
    lines = list(lines)
    if not lines or R <= 0:
        raise ValueError("need a nonempty line set and R > 0")
    if ball is None:
        ball = group_ball(G, 8)
    report = {}
    for name, (center, _) in G.cone_points().items():
        pts = orbit_points(G, center, R, ball)
        best = min((_min_distance_to_line(pts, l) for l in lines), default=math.inf)
        if best < eps_pt:
            status = "incident"
        elif best > delta_sep:
            status = "separated"
        else:
            status = "ambiguous"
        report[name] = Incidence(name, best, status, len(pts))
    return report


def domain_diameter_from(G: TriangleGroup, w: Point) -> float:
    """Largest distance from ``w`` to a vertex of the kite X Z Y Z'."""
    z_mirror = Point(-G.Z.u, G.Z.v)
    return max(hyperbolic_distance(w, c) for c in (G.X, G.Y, G.Z, z_mirror))


def orbit_ball(G: TriangleGroup, center: Point, radius: float, cap: int = 2_000_000) -> GroupBall:
    """Elements whose fundamental domain meets the disk about ``center``.

    Breadth-first search in the Cayley graph, pruned to elements ``h`` with
    ``h . w0`` within ``radius + diam`` of ``center``; the domains meeting a
    disk form an edge-connected set, so nothing inside is missed. Witness
    words are shortest within the pruned search, ``radius`` records the
    deepest level.
    """
    w0 = _generic_point(G)
    slack = domain_diameter_from(G, Point(w0.real, w0.imag))
    limit = radius + slack
    gen_mats = []
    for gen, sign in LETTERS:
        g = G.generator(gen)
        g = g if sign > 0 else g.inverse()
        gen_mats.append(np.array(g.matrix))
    gen_mats = np.array(gen_mats)
    cz = center.z

    def dist(mats):
        num = mats[:, 0, 0] * w0 + mats[:, 0, 1]
        den = mats[:, 1, 0] * w0 + mats[:, 1, 1]
        img = num / den
        return 2 * np.arcsinh(np.abs(img - cz) / (2 * np.sqrt(img.imag * cz.imag)))

    mats = np.eye(2)[None, :, :].copy()
    if dist(mats)[0] > limit:
        raise ValueError("centre is too far from the base triangle")
    words = [Word()]
    starts = [0]
    keys = _keys(mats, w0)
    frontier = slice(0, 1)
    depth = 0
    while True:
        parents = mats[frontier]
        pwords = words[frontier]
        cand = np.einsum("nij,ljk->nlik", parents, gen_mats).reshape(-1, 2, 2)
        inside = dist(cand) <= limit
        cidx = np.nonzero(inside)[0]
        cand = cand[inside]
        ckeys = _keys(cand, w0)
        mask, _ = _new_mask(keys, ckeys, 1e-7)
        if not mask.any():
            break
        depth += 1
        new_words = []
        for flat in cidx[mask]:
            parent, letter = divmod(int(flat), len(LETTERS))
            new_words.append(Word(pwords[parent].letters + (LETTERS[letter],)))
        start = len(words)
        mats = np.concatenate([mats, cand[mask]])
        keys = np.concatenate([keys, ckeys[mask]])
        words.extend(new_words)
        starts.append(start)
        frontier = slice(start, len(words))
        if len(words) > cap:
            raise BallTooLarge(f"orbit ball exceeds {cap} elements")
    return GroupBall(mats, words, depth, starts)
