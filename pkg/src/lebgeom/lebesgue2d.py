"""Cardinal functions, the Lebesgue function and cardinal zero curves on the square."""

from __future__ import annotations

import warnings

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import chebyshev as C

from .errors import InvalidInput, NotUnisolvent
from .nodes2d import NodeSet2D, basis_indices, basis_matrix, vandermonde

DEFAULT_CURVE_TOL = 1e-6
_CHUNK = 1 << 22


@dataclass(frozen=True, eq=False)
class CardinalEvaluator:
    """LU-factorized Chebyshev Vandermonde system of a unisolvent point set.

    ``coef[:, j]`` holds the Chebyshev coefficients (in ``basis_order``) of
    the cardinal function of node ``j``.
    """

    node_set: NodeSet2D
    lu: tuple = field(repr=False)
    coef: np.ndarray = field(repr=False)
    basis_order: tuple
    condition: float

    @property
    def degree(self) -> int:
        return self.node_set.degree

    @property
    def size(self) -> int:
        return len(self.node_set)

    def basis(self, x, y, dx: int = 0, dy: int = 0) -> np.ndarray:
        return basis_matrix(self.degree, x, y, dx, dy)

    def cardinals(self, x, y, dx: int = 0, dy: int = 0) -> np.ndarray:
        """All cardinal values (or partial derivatives) at the points, shape ``(m, N)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        rows = max(1, _CHUNK // (4 * self.size))
        out = np.empty((x.size, self.size))
        for s in range(0, x.size, rows):
            out[s:s + rows] = self.basis(x[s:s + rows], y[s:s + rows], dx, dy) @ self.coef
        if dx == 0 and dy == 0:
            _short_circuit(out, x, y, self.node_set.points)
        return out

    def coefficient_grid(self, j_or_weights) -> np.ndarray:
        """Coefficients of a cardinal (index) or a combination (weight vector) as an (n+1, n+1) array."""
        n = self.degree
        if np.ndim(j_or_weights) == 0:
            c = self.coef[:, int(j_or_weights)]
        else:
            c = self.coef @ np.asarray(j_or_weights, dtype=float)
        out = np.zeros((n + 1, n + 1))
        for (a, b), v in zip(self.basis_order, c):
            out[a, b] = v
        return out


def _short_circuit(vals, x, y, nodes):
    hit = (x[:, None] == nodes[None, :, 0]) & (y[:, None] == nodes[None, :, 1])
    rows, cols = np.nonzero(hit)
    if rows.size:
        vals[rows] = 0.0
        vals[rows, cols] = 1.0


def build_cardinal_evaluator(ns2: NodeSet2D) -> CardinalEvaluator:
    V = vandermonde(ns2)
    with warnings.catch_warnings():
        # singularity is detected from the pivots below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu = sla.lu_factor(V)
    if np.any(np.abs(np.diag(lu[0])) <= np.finfo(float).eps * np.abs(V).max() * len(V)):
        raise NotUnisolvent("Vandermonde matrix is singular")
    coef = sla.lu_solve(lu, np.eye(len(V)))
    cond = float(np.linalg.norm(V, 1) * np.linalg.norm(coef, 1))
    return CardinalEvaluator(ns2, lu, coef, tuple(basis_indices(ns2.degree)), cond)


def cardinal_eval(ce: CardinalEvaluator, x: float, y: float) -> np.ndarray:
    """All cardinal values at one point via the transposed LU solve."""
    b = ce.basis(x, y)[0]
    vals = sla.lu_solve(ce.lu, b, trans=1)
    _short_circuit(vals[None, :], np.array([x]), np.array([y]), ce.node_set.points)
    return vals


def lebesgue_eval2(ce: CardinalEvaluator, x, y):
    """Lebesgue function at one point (scalar) or many points (array)."""
    vals = np.abs(ce.cardinals(x, y)).sum(axis=1)
    return float(vals[0]) if np.ndim(x) == 0 else vals.reshape(np.shape(x))


def grid_axis(res: int) -> np.ndarray:
    """``res + 1`` equally spaced abscissae on [-1, 1] with exact symmetric endpoints."""
    g = np.linspace(-1.0, 1.0, res + 1)
    g[0], g[-1] = -1.0, 1.0
    return g


def cardinal_grid(ce: CardinalEvaluator, j: int, gx, gy) -> np.ndarray:
    """Values of cardinal ``j`` on the tensor grid, indexed ``[ix, iy]``."""
    n = ce.degree
    return C.chebvander(gx, n) @ ce.coefficient_grid(j) @ C.chebvander(gy, n).T


def lebesgue_grid(ce: CardinalEvaluator, gx, gy) -> np.ndarray:
    """Lebesgue function on the tensor grid ``gx x gy`` (indexed ``[ix, iy]``)."""
    n = ce.degree
    Tx = C.chebvander(np.asarray(gx, float), n)
    Ty = C.chebvander(np.asarray(gy, float), n)
    out = np.zeros((len(gx), len(gy)))
    for j in range(ce.size):
        out += np.abs(Tx @ ce.coefficient_grid(j) @ Ty.T)
    return out


_DIRS = np.array([[np.cos(t), np.sin(t)] for t in np.linspace(0, 2 * np.pi, 8, endpoint=False)])


def pattern_search(f, p0, step: float, tol: float, max_iter: int = 100_000):
    """Maximise ``f`` on the square by 8-direction compass search with step halving.

    Returns ``(point, value, converged)``.
    """
    p = np.array(p0, dtype=float)
    fp = float(f(p[None, :])[0])
    for _ in range(max_iter):
        if step < tol:
            return p, fp, True
        cand = np.clip(p + step * _DIRS, -1.0, 1.0)
        vals = f(cand)
        i = int(np.argmax(vals))
        if vals[i] > fp:
            p, fp = cand[i], float(vals[i])
        else:
            step *= 0.5
    return p, fp, False


@dataclass(frozen=True)
class ConstantEstimate:
    value: float
    location: tuple
    grid_res: int
    grid_value: float

    def to_json(self) -> dict:
        return {"value": self.value, "location": list(self.location),
                "grid_res": self.grid_res, "grid_value": self.grid_value}


def lebesgue_constant2(ce: CardinalEvaluator, grid_res: int | None = None, starts: int = 8,
                       refine_tol: float = 1e-12) -> ConstantEstimate:
    """Lower estimate of the constant: grid maximum refined by pattern search from the best cells."""
    n = ce.degree
    res = 16 * (n + 1) if grid_res is None else int(grid_res)
    if res < 16 * (n + 1):
        raise InvalidInput(f"grid_res must be >= {16 * (n + 1)}")
    g = grid_axis(res)
    lam = lebesgue_grid(ce, g, g)
    order = np.argsort(lam, axis=None)[::-1][:starts]
    f = lambda P: lebesgue_eval2(ce, P[:, 0], P[:, 1])
    best = (-np.inf, None)
    for flat in order:
        i, j = np.unravel_index(flat, lam.shape)
        p, v, _ = pattern_search(f, (g[i], g[j]), 2.0 / res, refine_tol)
        if v > best[0]:
            best = (v, p)
    return ConstantEstimate(float(best[0]), (float(best[1][0]), float(best[1][1])), res, float(lam.max()))


# ------------------------------------------------------------------ zero curves


@dataclass(frozen=True)
class ZeroCurve:
    node: tuple
    node_index: int
    polylines: tuple
    grid_resolution: int

    @property
    def components(self) -> int:
        return len(self.polylines)

    def vertices(self) -> np.ndarray:
        if not self.polylines:
            return np.empty((0, 2))
        return np.vstack(self.polylines)

    def to_json(self) -> dict:
        return {"node": list(self.node), "node_index": self.node_index,
                "polylines": [np.asarray(p).tolist() for p in self.polylines],
                "grid_resolution": self.grid_resolution}


def _edge_roots(coef2, p0, p1, f0, f1, tol):
    """Bisection for the zero of the cardinal on each segment p0 -> p1 (vectorized)."""
    lo = np.zeros(len(p0))
    hi = np.ones(len(p0))
    s0 = np.sign(f0)
    d = p1 - p0
    while np.max(hi - lo) * np.max(np.abs(d)) > tol:
        mid = 0.5 * (lo + hi)
        q = p0 + mid[:, None] * d
        v = C.chebval2d(q[:, 0], q[:, 1], coef2)
        same = np.sign(v) == s0
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    t = 0.5 * (lo + hi)
    return p0 + t[:, None] * d


def zero_curves(ce: CardinalEvaluator, node_index: int, grid_res: int | None = None,
                tol: float = 1e-10) -> ZeroCurve:
    """Marching-squares polylines of ``{l_A = 0}`` with bisection-refined edge crossings.

    Zero sets running exactly along a grid line (for instance a side of the
    square) produce no sign change and are not traced.
    """
    if not 0 <= node_index < ce.size:
        raise InvalidInput(f"node index {node_index} outside 0..{ce.size - 1}")
    n = ce.degree
    res = 64 * (n + 1) if grid_res is None else int(grid_res)
    g = grid_axis(res)
    coef2 = ce.coefficient_grid(node_index)
    F = cardinal_grid(ce, node_index, g, g)
    pos = F >= 0

    # crossings on edges: horizontal edges (i,j)-(i+1,j), vertical edges (i,j)-(i,j+1)
    hx = pos[:-1, :] != pos[1:, :]
    vy = pos[:, :-1] != pos[:, 1:]
    hi_, hj_ = np.nonzero(hx)
    vi_, vj_ = np.nonzero(vy)
    P0 = np.column_stack([g[np.r_[hi_, vi_]], g[np.r_[hj_, vj_]]])
    P1 = np.column_stack([g[np.r_[hi_ + 1, vi_]], g[np.r_[hj_, vj_ + 1]]])
    f0 = np.r_[F[hi_, hj_], F[vi_, vj_]]
    f1 = np.r_[F[hi_ + 1, hj_], F[vi_, vj_ + 1]]
    pts = _edge_roots(coef2, P0, P1, f0, f1, tol) if len(P0) else np.empty((0, 2))
    hid = -np.ones(hx.shape, dtype=int)
    vid = -np.ones(vy.shape, dtype=int)
    hid[hi_, hj_] = np.arange(len(hi_))
    vid[vi_, vj_] = len(hi_) + np.arange(len(vi_))

    # cell edges: bottom (i, j) h, top (i, j+1) h, left (i, j) v, right (i+1, j) v
    segments = []
    ci, cj = np.nonzero(hx[:, :-1] | hx[:, 1:] | vy[:-1, :] | vy[1:, :])
    for i, j in zip(ci, cj):
        e = [hid[i, j], vid[i + 1, j], hid[i, j + 1], vid[i, j]]  # counter-clockwise
        ids = [k for k in e if k >= 0]
        if len(ids) == 2:
            segments.append((ids[0], ids[1]))
        elif len(ids) == 4:
            centre = C.chebval2d(0.5 * (g[i] + g[i + 1]), 0.5 * (g[j] + g[j + 1]), coef2)
            # corners in ccw order: (i,j), (i+1,j), (i+1,j+1), (i,j+1); edge e[k] joins corner k and k+1
            if (centre >= 0) == pos[i, j]:
                segments += [(e[0], e[1]), (e[2], e[3])]
            else:
                segments += [(e[3], e[0]), (e[1], e[2])]
    polylines = _chain(segments, pts)
    node = tuple(float(v) for v in ce.node_set.points[node_index])
    return ZeroCurve(node, node_index, tuple(polylines), res)


def _chain(segments, pts):
    adj: dict[int, list[int]] = {}
    for a, b in segments:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen_edges = set()
    lines = []

    def walk(start):
        path = [start]
        cur, prev = start, None
        while True:
            nxt = [v for v in adj[cur] if (min(cur, v), max(cur, v)) not in seen_edges]
            if not nxt:
                return path
            v = nxt[0]
            seen_edges.add((min(cur, v), max(cur, v)))
            path.append(v)
            prev, cur = cur, v
            if cur == start:
                return path

    for s in sorted(adj, key=lambda k: (len(adj[k]) != 1, k)):
        if any((min(s, v), max(s, v)) not in seen_edges for v in adj[s]):
            lines.append(pts[walk(s)])
    return lines


def point_to_curve_distance(points, curves) -> np.ndarray:
    """Distance from each point to the nearest segment of any of the polylines."""
    P = np.atleast_2d(np.asarray(points, float))
    best = np.full(len(P), np.inf)
    for zc in curves:
        for line in zc.polylines:
            line = np.asarray(line)
            if len(line) == 1:
                d = np.hypot(*(P - line[0]).T)
                best = np.minimum(best, d)
                continue
            a, b = line[:-1], line[1:]
            ab = b - a
            L2 = np.maximum((ab * ab).sum(axis=1), 1e-300)
            t = np.clip(((P[:, None, :] - a[None]) * ab[None]).sum(-1) / L2[None], 0.0, 1.0)
            proj = a[None] + t[..., None] * ab[None]
            d = np.hypot(*(P[:, None, :] - proj).transpose(2, 0, 1)).min(axis=1)
            best = np.minimum(best, d)
    return best
