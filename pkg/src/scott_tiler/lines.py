"""The family of group translates of the Scott axis meeting a disk."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .geom import (
    BASEPOINT,
    EPS_PT,
    Geodesic,
    Point,
    boundary_from_angle,
    classify_isometry,
    hyperbolic_distance,
    klein_to_point,
)
from .trigroup import (
    DEFAULT_BALL_CAP,
    BallTooLarge,
    GroupBall,
    Signature,
    TriangleGroup,
    Word,
    _generic_point,
    group_ball,
    orbit_ball,
    scott_element,
)

TWO_PI = 2.0 * math.pi


class NotStabilized(UserWarning):
    pass


@dataclass
class LineFamily:
    """Distinct translates of an axis meeting the disk of radius ``region_radius``.

    Lines are sorted by their canonical key (boundary angles of the two
    endpoints, smaller first), so line indices are canonical.
    """

    lines: list[Geodesic]
    angles: np.ndarray  # (n, 2) boundary angles, each row sorted
    witnesses: dict[int, Word]
    sig: Signature
    region_radius: float
    word_length: int
    stabilized: bool
    history: list[int] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.lines)


def _boundary_angles(mats: np.ndarray, x: float) -> np.ndarray:
    """Boundary angles of the images of the ideal point ``x``, vectorised."""
    vec = np.array([1.0, 0.0]) if math.isinf(x) else np.array([x, 1.0])
    img = mats @ vec
    n, m = img[:, 0], img[:, 1]
    flip = m < 0
    n = np.where(flip, -n, n)
    m = np.where(flip, -m, m)
    return np.mod(-2.0 * np.arctan2(m, n), TWO_PI)


def _symmetric_keys(angles: np.ndarray) -> np.ndarray:
    """Order-free coordinates of an endpoint pair (sum and product on the circle)."""
    w1 = np.exp(1j * angles[:, 0])
    w2 = np.exp(1j * angles[:, 1])
    s, p = w1 + w2, w1 * w2
    return np.stack([s.real, s.imag, p.real, p.imag], axis=1)


def _dedup(keys: np.ndarray, tol: float) -> np.ndarray:
    """Indices of the first representative of each cluster of close keys."""
    order = np.lexsort(keys.T[::-1])
    sk = keys[order]
    dup = np.zeros(len(keys), dtype=bool)
    shift = 1
    while shift < len(keys):
        close0 = np.abs(sk[shift:, 0] - sk[:-shift, 0]) <= tol
        if not close0.any():
            break
        close = close0 & (np.abs(sk[shift:] - sk[:-shift]).max(axis=1) <= tol)
        i, j = order[:-shift][close], order[shift:][close]
        dup[np.maximum(i, j)] = True
        shift += 1
    return np.nonzero(~dup)[0]


def meets_disk(angles: np.ndarray, R: float) -> np.ndarray:
    """Whether chords with these endpoint angles meet the disk of radius ``R``.

    In the Klein chart the chord lies at Euclidean distance cos(gap / 2) from
    the centre, and a Klein radius ``k`` is hyperbolic radius ``atanh k``.
    """
    gap = np.abs(angles[:, 1] - angles[:, 0])
    gap = np.minimum(gap, TWO_PI - gap)
    return np.cos(gap / 2.0) <= math.tanh(R)


def translates(ball: GroupBall, axis: Geodesic, sl: slice | None = None) -> np.ndarray:
    mats = ball.matrices if sl is None else ball.matrices[sl]
    a = _boundary_angles(mats, axis.e1)
    b = _boundary_angles(mats, axis.e2)
    return np.sort(np.stack([a, b], axis=1), axis=1)


def foot_of_basepoint(axis: Geodesic) -> Point:
    """Closest point of ``axis`` to the basepoint (the Klein chord's foot)."""
    a, b = (np.exp(1j * t) for t in axis.angles)
    d = b - a
    t = -(a.real * d.real + a.imag * d.imag) / abs(d) ** 2
    return klein_to_point(a + t * d)


def _finish(G, found, found_words, R, word_length, stabilized, history, notes) -> LineFamily:
    order = np.lexsort((found[:, 1], found[:, 0]))
    found = found[order]
    lines = [Geodesic(boundary_from_angle(a), boundary_from_angle(b)) for a, b in found]
    witnesses = {i: found_words[k] for i, k in enumerate(order)}
    return LineFamily(lines, found, witnesses, G.sig, R, word_length, stabilized, history, notes)


def _unique_lines(ang: np.ndarray, eps_pt: float) -> np.ndarray:
    first = _dedup(_symmetric_keys(ang), eps_pt)
    return np.sort(first)


def build_line_family(
    G: TriangleGroup,
    axis: Geodesic,
    R: float,
    N_max: int = 14,
    ball_cap: int = DEFAULT_BALL_CAP,
    eps_pt: float = EPS_PT,
    method: str = "orbit",
) -> LineFamily:
    """Collect the translates ``g . axis`` meeting the disk of radius ``R``.

    ``method="wordlength"`` grows Cayley balls until two consecutive word
    lengths add no line, or until ``N_max`` (or the ball cap) is reached, in
    which case the family is flagged as not stabilized.

    ``method="orbit"`` enumerates every element moving the axis's foot point
    within ``R + tau / 2`` of the basepoint (``tau`` the translation length of
    the Scott element); each line meeting the disk has such a coset
    representative, so the family is complete and marked stabilized.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if method == "orbit":
        return _orbit_family(G, axis, R, eps_pt)
    if method != "wordlength":
        raise ValueError(f"unknown method {method!r}")
    ball = group_ball(G, 0)
    found = np.zeros((0, 2))
    found_keys = np.zeros((0, 4))
    found_words: list[Word] = []
    history = []
    quiet = 0
    stabilized = False
    notes = []
    while True:
        sl = ball.level(ball.radius)
        ang = translates(ball, axis, sl)
        keep = meets_disk(ang, R)
        idx = np.nonzero(keep)[0]
        ang = ang[keep]
        keys = _symmetric_keys(ang)
        allk = np.concatenate([found_keys, keys])
        first = _dedup(allk, eps_pt)
        new = first[first >= len(found_keys)] - len(found_keys)
        new.sort()
        found = np.concatenate([found, ang[new]])
        found_keys = np.concatenate([found_keys, keys[new]])
        level_words = ball.words[sl]
        found_words.extend(level_words[idx[k]] for k in new)
        history.append(len(found))
        quiet = quiet + 1 if len(new) == 0 and ball.radius > 0 else 0
        if quiet >= 2:
            stabilized = True
            break
        if ball.radius >= N_max:
            break
        try:
            ball = group_ball(G, ball.radius + 1, cap=ball_cap, _grow_from=ball)
        except BallTooLarge as exc:
            notes.append(str(exc))
            break
    if not stabilized:
        msg = f"NotStabilized: line family still growing at word length {ball.radius} ({history})"
        notes.append(msg)
        warnings.warn(msg, NotStabilized, stacklevel=2)
    return _finish(G, found, found_words, R, ball.radius, stabilized, history, notes)


def _orbit_family(G: TriangleGroup, axis: Geodesic, R: float, eps_pt: float) -> LineFamily:
    tau = classify_isometry(scott_element(G)).translation_length
    foot = foot_of_basepoint(axis)
    w0 = _generic_point(G)
    reach = R + tau / 2 + hyperbolic_distance(foot, Point(w0.real, w0.imag)) + 1e-6
    ball = orbit_ball(G, BASEPOINT, reach)
    ang = translates(ball, axis)
    keep = np.nonzero(meets_disk(ang, R))[0]
    ang = ang[keep]
    first = _unique_lines(ang, eps_pt)
    words = [ball.words[keep[k]] for k in first]
    return _finish(G, ang[first], words, R, ball.radius, True, [len(first)], [])
