"""Local maxima of the Lebesgue function on the square.

Off the zero curves of the cardinals the Lebesgue function coincides with a
signed combination ``p_s = sum_j s_j l_j`` and is smooth; on a zero curve
it has a valley-type kink (``|t|`` is convex), so no strict maximum sits on
a curve.  Every interior maximum is therefore a non-degenerate critical
point of some ``p_s`` in the region where ``sign(l) = s``.  Detection:

1. On a grid, take a Newton step of ``p_s`` (``s`` = grid signs, and ``s``
   with one flipped sign for cardinals whose zero curve passes nearby); keep
   steps shorter than a cell with a negative definite Hessian.
2. Polish each seed by Newton iteration, confirm by compass pattern search
   on the Lebesgue function itself, and verify the sign region.

Edge maxima use the exact roots of the cardinals restricted to each edge;
corners are tested by the one-sided derivatives along both edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import InvalidInput
from .lebesgue2d import (
    CardinalEvaluator,
    build_cardinal_evaluator,
    grid_axis,
    lebesgue_eval2,
    pattern_search,
    point_to_curve_distance,
    zero_curves,
)
from .nodes2d import generate2d

DEDUPE_RADIUS = 1e-6
SIGN_FLOOR = 1e-9
FLAT_TOL = 1e-10
CONFIRM_STEP = 1e-5


@dataclass(frozen=True)
class LocalMaxRecord:
    location: tuple
    value: float
    kind: str  # interior | edge | corner
    basin_id: int
    refined: bool = True

    def to_json(self) -> dict:
        return {"location": list(self.location), "value": self.value, "class": self.kind,
                "basin_id": self.basin_id, "refined": self.refined}


@dataclass(frozen=True)
class MaximaResult:
    records: tuple
    degenerate: tuple = field(default=())
    grid_res: int = 0

    def count(self, kind: str) -> int:
        return sum(r.kind == kind for r in self.records)

    @property
    def interior(self) -> int:
        return self.count("interior")

    @property
    def total(self) -> int:
        return len(self.records)


# ----------------------------------------------------------------- interior


def _screen(g0, g1, hxx, hxy, hyy, h):
    det = hxx * hyy - hxy**2
    ok = (hxx < 0) & (det > 0)
    with np.errstate(all="ignore"):
        dx = -(hyy * g0 - hxy * g1) / det
        dy = -(-hxy * g0 + hxx * g1) / det
    return ok & (np.abs(dx) <= h) & (np.abs(dy) <= h), dx, dy


def _seeds(ce: CardinalEvaluator, x, y, h):
    L = ce.cardinals(x, y)
    Lx = ce.cardinals(x, y, 1, 0)
    Ly = ce.cardinals(x, y, 0, 1)
    Lxx = ce.cardinals(x, y, 2, 0)
    Lxy = ce.cardinals(x, y, 1, 1)
    Lyy = ce.cardinals(x, y, 0, 2)
    S = np.where(L >= 0, 1.0, -1.0)
    g0, g1 = (Lx * S).sum(1), (Ly * S).sum(1)
    hxx, hxy, hyy = (Lxx * S).sum(1), (Lxy * S).sum(1), (Lyy * S).sum(1)
    out = []
    ok, dx, dy = _screen(g0, g1, hxx, hxy, hyy, h)
    for i in np.nonzero(ok)[0]:
        out.append((x[i] + dx[i], y[i] + dy[i], S[i]))
    # a zero curve within a few cells: also try the neighbouring sign region
    I, J = np.nonzero(np.abs(L) < 3 * h * np.hypot(Lx, Ly))
    s = S[I, J]
    ok, dx, dy = _screen(g0[I] - 2 * s * Lx[I, J], g1[I] - 2 * s * Ly[I, J],
                         hxx[I] - 2 * s * Lxx[I, J], hxy[I] - 2 * s * Lxy[I, J],
                         hyy[I] - 2 * s * Lyy[I, J], h)
    for t in np.nonzero(ok)[0]:
        sg = S[I[t]].copy()
        sg[J[t]] *= -1
        out.append((x[I[t]] + dx[t], y[I[t]] + dy[t], sg))
    return out


def _newton(ce, sig, p, max_iter=30):
    """Critical point of the signed combination ``p_sig`` from ``p``; returns (point, hessian) or None."""
    c = ce.coef @ sig
    for _ in range(max_iter):
        x, y = p
        g = np.array([ce.basis(x, y, 1, 0)[0] @ c, ce.basis(x, y, 0, 1)[0] @ c])
        hxy = ce.basis(x, y, 1, 1)[0] @ c
        H = np.array([[ce.basis(x, y, 2, 0)[0] @ c, hxy], [hxy, ce.basis(x, y, 0, 2)[0] @ c]])
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            return None
        p = p + step
        if not np.all(np.isfinite(p)) or np.max(np.abs(p)) > 1.5:
            return None
        if np.linalg.norm(step) < 1e-14:
            break
    return p, H


def interior_maxima(ce: CardinalEvaluator, grid_res: int, refine_tol: float = 1e-9,
                    chunk: int = 20_000) -> list[tuple[np.ndarray, float, bool]]:
    g = grid_axis(grid_res)
    X, Y = np.meshgrid(g[1:-1], g[1:-1], indexing="ij")
    x, y = X.ravel(), Y.ravel()
    h = 2.0 / grid_res
    seeds = []
    for s in range(0, x.size, chunk):
        seeds += _seeds(ce, x[s:s + chunk], y[s:s + chunk], h)
    lam = lambda P: lebesgue_eval2(ce, P[:, 0], P[:, 1])
    found: list[tuple[np.ndarray, float, bool]] = []
    for sx, sy, sg in seeds:
        r = _newton(ce, sg, np.array([sx, sy]))
        if r is None:
            continue
        p, H = r
        if np.max(np.abs(p)) >= 1.0:
            continue
        ell = ce.cardinals(p[0], p[1])[0]
        if np.any(np.sign(ell) != sg) or np.min(np.abs(ell)) < SIGN_FLOOR:
            continue
        if not (H[0, 0] < 0 and np.linalg.det(H) > 0):
            continue
        if any(np.hypot(*(p - q)) <= DEDUPE_RADIUS for q, _, _ in found):
            continue
        q, v, conv = pattern_search(lam, p, CONFIRM_STEP, refine_tol)
        refined = conv and np.hypot(*(q - p)) <= DEDUPE_RADIUS
        found.append((p, float(np.abs(ell).sum()), bool(refined)))
    return found


# ------------------------------------------------------------------ boundary


EDGES = ((0, -1.0), (0, 1.0), (1, -1.0), (1, 1.0))  # (fixed axis, fixed value)


def edge_coefficients(ce: CardinalEvaluator, axis: int, s: float) -> np.ndarray:
    """Chebyshev coefficients in the free variable of every cardinal restricted to an edge."""
    n = ce.degree
    Ts = C.chebvander(np.array([s]), n)[0]
    coef = np.zeros((ce.size, n + 1))
    for col, (a, b) in enumerate(ce.basis_order):
        if axis == 0:
            coef[:, b] += ce.coef[col, :] * Ts[a]
        else:
            coef[:, a] += ce.coef[col, :] * Ts[b]
    return coef


def _real_roots(c, lo=-1.0, hi=1.0):
    c = np.trim_zeros(c, "b")
    if len(c) < 2:
        return np.empty(0)
    r = C.chebroots(c)
    r = r[np.abs(r.imag) < 1e-9].real
    return r[(r > lo) & (r < hi)]


def edge_maxima(ce: CardinalEvaluator, axis: int, s: float):
    """Strict local maxima of the Lebesgue function restricted to one edge.

    Returns ``(t, signs, inward_derivative)`` triples where ``t`` is the free coordinate.
    """
    coef = edge_coefficients(ce, axis, s)
    scale = np.abs(coef).max()
    breaks = [-1.0, 1.0]
    for c in coef:
        if np.abs(c).max() > 1e-12 * scale:
            breaks += list(_real_roots(c))
    breaks = np.unique(breaks)
    out = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b - a < 1e-14:
            continue
        vals = C.chebval(0.5 * (a + b), coef.T)
        sg = np.where(np.abs(vals) > 1e-14 * scale, np.sign(vals), 0.0)
        p = sg @ coef
        dp = C.chebder(p)
        d2 = C.chebder(dp)
        for t in _real_roots(dp, a, b):
            if C.chebval(t, d2) < 0:
                out.append((float(t), sg, _inward(ce, axis, s, t, sg)))
    return out


def _inward(ce, axis, s, t, sg):
    x, y = (s, t) if axis == 0 else (t, s)
    d = ce.cardinals(x, y, *((1, 0) if axis == 0 else (0, 1)))[0] @ sg
    return float(-s * d)


def corner_maxima(ce: CardinalEvaluator):
    """Corners where the Lebesgue function strictly decreases along both edges.

    Returns ``(maxima, degenerate)``; a corner with a vanishing one-sided
    derivative (flat to first order) is degenerate and not counted.
    """
    maxima, flat = [], []
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            ell = ce.cardinals(sx, sy)[0]
            if np.any(np.all(ce.node_set.points == (sx, sy), axis=1)):
                continue
            sg = np.sign(ell)
            gx = ce.cardinals(sx, sy, 1, 0)[0]
            gy = ce.cardinals(sx, sy, 0, 1)[0]
            dx = -sx * (gx @ sg)
            dy = -sy * (gy @ sg)
            tol = FLAT_TOL * max(np.abs(gx).sum(), np.abs(gy).sum(), 1.0)
            if abs(dx) <= tol or abs(dy) <= tol:
                flat.append((sx, sy))
            elif dx < 0 and dy < 0:
                maxima.append((sx, sy))
    return maxima, flat


# ------------------------------------------------------------------ driver


def local_maxima(ce: CardinalEvaluator, grid_res: int | None = None,
                 refine_tol: float = 1e-9) -> MaximaResult:
    """All strict local maxima: interior points, edge points (edge-restricted) and corners."""
    n = ce.degree
    res = 40 * (n + 1) if grid_res is None else int(grid_res)
    if res < 4:
        raise InvalidInput("grid_res too small")
    pts = []
    for p, v, refined in interior_maxima(ce, res, refine_tol):
        pts.append(((float(p[0]), float(p[1])), v, "interior", refined))
    for axis, s in EDGES:
        for t, sg, _ in edge_maxima(ce, axis, s):
            loc = (s, t) if axis == 0 else (t, s)
            pts.append((loc, float(lebesgue_eval2(ce, *loc)), "edge", True))
    corners, flat = corner_maxima(ce)
    for loc in corners:
        pts.append((loc, float(lebesgue_eval2(ce, *loc)), "corner", True))
    pts.sort(key=lambda r: (r[0][0], r[0][1]))
    records = tuple(LocalMaxRecord(loc, v, kind, i, refined) for i, (loc, v, kind, refined) in enumerate(pts))
    return MaximaResult(records, tuple(flat), res)


@dataclass(frozen=True)
class MaximaCount:
    family: str
    degree: int
    interior: int
    total: int
    stable: bool
    history: tuple  # (grid_res, interior, total) per run
    result: MaximaResult = field(repr=False)

    def to_json(self) -> dict:
        return {"family": self.family, "degree": self.degree, "interior": self.interior,
                "total": self.total, "stable": self.stable,
                "history": [list(h) for h in self.history],
                "records": [r.to_json() for r in self.result.records],
                "degenerate": [list(d) for d in self.result.degenerate]}


def count_maxima(family: str, n: int, grid_res: int | None = None, refine_tol: float = 1e-9,
                 ce: CardinalEvaluator | None = None) -> MaximaCount:
    """Counts at ``grid_res`` and its double; a third, doubled run breaks a disagreement."""
    if family not in ("padua", "morrow_patterson"):
        raise InvalidInput("family must be padua or morrow_patterson")
    if n < 2:
        raise InvalidInput("degree must be >= 2")
    ce = ce or build_cardinal_evaluator(generate2d(family, n))
    res = 40 * (n + 1) if grid_res is None else int(grid_res)
    history = []
    results = []
    for r in (res, 2 * res, 4 * res):
        out = local_maxima(ce, r, refine_tol)
        history.append((r, out.interior, out.total))
        results.append(out)
        if len(history) >= 2 and history[-1][1:] == history[-2][1:]:
            return MaximaCount(family, n, out.interior, out.total, True, tuple(history), out)
    last = results[-1]
    return MaximaCount(family, n, last.interior, last.total, False, tuple(history), last)


def lower_bounds(n: int) -> tuple[int, int]:
    return n * (n - 1) // 2, (n + 1) * (n + 2) // 2


def lower_bound_check(n: int, counts: tuple[int, int]) -> dict:
    interior, total = counts
    lo_i, lo_t = lower_bounds(n)
    return {"interior_ok": interior >= lo_i, "total_ok": total >= lo_t,
            "interior_bound": lo_i, "total_bound": lo_t}


def excess_maxima_report(ce: CardinalEvaluator, result: MaximaResult, pair_radius: float = 0.1,
                         curve_radius: float = 0.05, curve_res: int | None = None) -> list[dict]:
    """Clusters of nearby maxima lying close to some cardinal zero curve.

    Empty when the counts already equal the lower bounds (no excess maxima).
    """
    n = ce.degree
    if (result.interior, result.total) == lower_bounds(n):
        return []
    recs = result.records
    P = np.array([r.location for r in recs]) if recs else np.empty((0, 2))
    parent = list(range(len(P)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    close = []
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            d = float(np.hypot(*(P[i] - P[j])))
            if d < pair_radius:
                parent[find(i)] = find(j)
                close.append((i, j, d))
    groups: dict[int, list[int]] = {}
    for i in range(len(P)):
        groups.setdefault(find(i), []).append(i)
    clusters = [g for g in groups.values() if len(g) > 1]
    if not clusters:
        return []
    res = 16 * (n + 1) if curve_res is None else curve_res
    curves = [zero_curves(ce, j, res) for j in range(ce.size)]
    report = []
    for members in sorted(clusters, key=lambda g: (P[g[0]][0], P[g[0]][1])):
        dist = point_to_curve_distance(P[members], curves)
        if np.min(dist) >= curve_radius:
            continue
        pair_d = [d for i, j, d in close if i in members and j in members]
        report.append({
            "members": [recs[i].to_json() for i in members],
            "min_separation": min(pair_d),
            "curve_distance": [float(d) for d in dist],
        })
    return report
