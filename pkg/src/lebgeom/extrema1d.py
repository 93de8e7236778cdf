"""Maxima of the 1D Lebesgue function: per-piece maxima, the constant and the max-set.

Between consecutive nodes the Lebesgue function has exactly one interior
maximum, and on the two boundary pieces it is monotone, so every maximum is
found by a sign-bisection on the derivative (all pieces at once) plus the two
endpoint values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConvergenceFailure, DegenerateCase, InvalidInput, OutOfDomain
from .lebesgue1d import barycentric_weights, lebesgue_eval, log_derivative
from .nodes1d import NodeSet1D

BRUTMAN_CONSTANT = 0.5212
DEFAULT_TOL = 1e-10


def _bisect_pieces(nodes, w, lo, hi, max_iter=200):
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(max_iter):
        active = (hi - lo) > 2 * np.spacing(np.maximum(np.abs(lo), np.abs(hi)))
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        idx = np.nonzero(active)[0]
        der = log_derivative(nodes, w, mid[idx])
        up = der > 0
        lo[idx[up]] = mid[idx[up]]
        hi[idx[~up]] = mid[idx[~up]]
    return 0.5 * (lo + hi)


def _bracket_ok(nodes, w, a, b):
    """Derivative positive just right of a and negative just left of b."""
    delta = 1e-6 * (b - a)
    dl = log_derivative(nodes, w, a + delta)
    dr = log_derivative(nodes, w, b - delta)
    return (dl > 0) & (dr < 0)


def _scan_max(ns, a, b, n_scan=10_000):
    grid = np.linspace(a, b, n_scan + 2)[1:-1]
    vals = lebesgue_eval(ns, grid)
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda t: -lebesgue_eval(ns, t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-14})
    if not res.success:
        raise ConvergenceFailure(f"bounded search failed on [{a}, {b}]",
                                 state={"bracket": (float(lo), float(hi)), "message": res.message})
    return float(res.x)


def interval_maxima(ns: NodeSet1D) -> tuple[np.ndarray, np.ndarray]:
    """Maximizers and maxima on every inner piece ``k = 1..n``."""
    n = ns.degree
    if n < 1:
        return np.empty(0), np.empty(0)
    x = ns.nodes
    w = barycentric_weights(ns)
    a, b = x[:-1], x[1:]
    loc = _bisect_pieces(x, w, a, b)
    ok = _bracket_ok(x, w, a, b)
    for i in np.nonzero(~ok)[0]:
        loc[i] = _scan_max(ns, a[i], b[i])
    return loc, np.atleast_1d(lebesgue_eval(ns, loc))


def interval_max(ns: NodeSet1D, k: int) -> tuple[float, float]:
    """Unique maximum of the Lebesgue function on ``[x[k-1], x[k]]``, ``1 <= k <= n``."""
    n = ns.degree
    if not 1 <= k <= n:
        raise InvalidInput(f"interval index {k} outside 1..{n}")
    x = ns.nodes
    w = barycentric_weights(ns)
    a, b = x[k - 1:k], x[k:k + 1]
    if _bracket_ok(x, w, a, b)[0]:
        t = float(_bisect_pieces(x, w, a, b)[0])
    else:
        t = _scan_max(ns, float(a[0]), float(b[0]))
    return t, float(lebesgue_eval(ns, t))


@dataclass(frozen=True)
class MaxSet:
    constant: float
    points: tuple
    per_interval: tuple = field(repr=False)
    tolerance: float = DEFAULT_TOL

    def to_json(self) -> dict:
        return {
            "constant": self.constant,
            "points": list(self.points),
            "per_interval": [{"piece": k, "location": t, "value": v} for k, t, v in self.per_interval],
            "tolerance": self.tolerance,
        }


def _candidates(ns: NodeSet1D):
    """(piece, location, value) for every local maximum candidate, left to right."""
    n = ns.degree
    loc, val = interval_maxima(ns)
    cands = []
    if ns.nodes[0] > -1.0:
        cands.append((0, -1.0, float(lebesgue_eval(ns, -1.0))))
    cands += [(k + 1, float(t), float(v)) for k, (t, v) in enumerate(zip(loc, val))]
    if ns.nodes[-1] < 1.0:
        cands.append((n + 1, 1.0, float(lebesgue_eval(ns, 1.0))))
    return cands


def lebesgue_constant(ns: NodeSet1D) -> float:
    if ns.degree == 0:
        return 1.0
    return max(v for _, _, v in _candidates(ns))


def max_set(ns: NodeSet1D, tol: float = DEFAULT_TOL) -> MaxSet:
    """All points where the Lebesgue function is within ``tol`` (relative) of its maximum."""
    if tol <= 0:
        raise InvalidInput("tolerance must be positive")
    if ns.degree == 0:
        raise DegenerateCase("degree 0: the Lebesgue function is identically 1")
    if ns.degree == 1 and ns.contains_endpoints():
        raise DegenerateCase("nodes -1, 1: the Lebesgue function is identically 1")
    cands = _candidates(ns)
    const = max(v for _, _, v in cands)
    pts = tuple(t for _, t, v in cands if v >= (1 - tol) * const)
    return MaxSet(const, pts, tuple(cands), tol)


def separation_bound_a(n: float) -> float:
    """a(n) = log(2 - 1 / ((2/pi) log(n+1) + 0.5212)), defined for n > 1."""
    if not n > 1:
        raise OutOfDomain(f"a(n) needs n > 1, got {n}")
    return float(np.log(2.0 - 1.0 / (2.0 / np.pi * np.log(n + 1.0) + BRUTMAN_CONSTANT)))


def degree_threshold_N(b: float) -> float:
    """Inverse of :func:`separation_bound_a` on ``[a(2), log 2)``."""
    if not separation_bound_a(2) <= b < np.log(2.0):
        raise OutOfDomain(f"b = {b} outside [a(2), log 2)")
    return float(np.expm1(np.pi / 2 * (1.0 / (2.0 - np.exp(b)) - BRUTMAN_CONSTANT)))


def brutman_lower_bound(n: int) -> float:
    """Lower bound 0.5212 + (2/pi) log(n+1) valid for every node set of degree n."""
    if n < 1:
        raise InvalidInput("degree must be >= 1")
    return BRUTMAN_CONSTANT + 2.0 / np.pi * np.log(n + 1.0)


@dataclass(frozen=True)
class ExclusionReport:
    degree: int
    threshold: float
    hypothesis_met_left: bool
    hypothesis_met_right: bool
    endpoint_excluded_left: bool
    endpoint_excluded_right: bool
    value_left: float
    value_right: float
    constant: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def boundary_exclusion_check(ns: NodeSet1D, tol: float = DEFAULT_TOL) -> ExclusionReport:
    """Test the node-gap hypothesis ``|x_extreme| >= 1 - a(n)/n^2`` and whether +-1 leave the max-set."""
    n = ns.degree
    if n <= 1:
        raise InvalidInput("boundary exclusion needs degree > 1")
    thr = 1.0 - separation_bound_a(n) / n**2
    ms = max_set(ns, tol)
    vl = float(lebesgue_eval(ns, -1.0))
    vr = float(lebesgue_eval(ns, 1.0))
    cut = (1 - tol) * ms.constant
    return ExclusionReport(
        degree=n,
        threshold=thr,
        hypothesis_met_left=bool(ns.nodes[0] <= -thr),
        hypothesis_met_right=bool(ns.nodes[-1] >= thr),
        endpoint_excluded_left=bool(vl < cut),
        endpoint_excluded_right=bool(vr < cut),
        value_left=vl,
        value_right=vr,
        constant=ms.constant,
    )


@dataclass(frozen=True)
class RescalingReport:
    degree: int
    c: float
    constant_original: float
    constant_scaled: float

    @property
    def relative_difference(self) -> float:
        return abs(self.constant_scaled - self.constant_original) / self.constant_original

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["relative_difference"] = self.relative_difference
        return out


def rescaling_invariance_check(ns: NodeSet1D, c: float) -> RescalingReport:
    """Compare the constant of ``ns`` with that of ``c * ns`` on [-1, 1]."""
    n = ns.degree
    if not ns.contains_endpoints():
        raise InvalidInput("node set must contain both endpoints")
    if n <= 1:
        raise InvalidInput("rescaling check needs degree > 1")
    lo = 1.0 - separation_bound_a(n) / n**2
    if not lo <= c <= 1.0:
        raise InvalidInput(f"c = {c} outside [{lo}, 1]")
    scaled = ns if c == 1.0 else NodeSet1D(ns.nodes * c, "custom")
    return RescalingReport(n, float(c), lebesgue_constant(ns), lebesgue_constant(scaled))


def gap_coefficient(ns: NodeSet1D) -> float:
    """``n^2 (1 - x_max)``: the coefficient of 1/n^2 in the gap between the last node and 1."""
    n = ns.degree
    return float(n**2 * (1.0 - ns.nodes[-1]))
