"""Unisolvent point families on the square [-1, 1]^2.

Padua points of degree n are the points ``(cos(k pi/(n+1)), cos(j pi/n))``,
``0 <= k <= n+1``, ``0 <= j <= n``, with ``j + k`` of a fixed parity.  The
Morrow-Patterson points of degree n are the interior points of the Padua
points of degree n+2.  Both have exactly ``(n+1)(n+2)/2`` points.
"""

from __future__ import annotations

import warnings

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.linalg import LinAlgWarning, lapack, lu_factor

from .errors import DomainViolation, InternalError, InvalidDegree, InvalidInput, NotUnisolvent

FAMILIES_2D = ("padua", "morrow_patterson", "custom")
DEFAULT_PARITY = 1


def dimension(n: int) -> int:
    """Dimension of bivariate polynomials of total degree <= n."""
    return (n + 1) * (n + 2) // 2


def basis_indices(n: int) -> list[tuple[int, int]]:
    """Graded order of the tensor Chebyshev basis ``T_a(x) T_b(y)``, ``a + b <= n``."""
    return [(a, d - a) for d in range(n + 1) for a in range(d + 1)]


def _vander(n, t, order):
    if order == 0:
        return C.chebvander(t, n)
    if order > n:
        return np.zeros((len(t), n + 1))
    D = C.chebder(np.eye(n + 1), m=order, axis=0)
    return C.chebvander(t, n - order) @ D


def basis_matrix(n: int, x, y, dx: int = 0, dy: int = 0) -> np.ndarray:
    """Rows of (derivatives of) the graded Chebyshev basis at the points ``(x[i], y[i])``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    idx = basis_indices(n)
    a = np.array([p for p, _ in idx])
    b = np.array([q for _, q in idx])
    return _vander(n, x, dx)[:, a] * _vander(n, y, dy)[:, b]


@dataclass(frozen=True, eq=False)
class NodeSet2D:
    points: np.ndarray
    degree: int
    family: str = "custom"
    parity: int | None = None

    def __post_init__(self):
        p = np.array(self.points, dtype=float)
        if p.ndim != 2 or p.shape[1] != 2:
            raise InvalidInput("points must have shape (N, 2)")
        if self.degree < 0:
            raise InvalidDegree("degree must be >= 0")
        if len(p) != dimension(self.degree):
            raise InvalidInput(f"degree {self.degree} needs {dimension(self.degree)} points, got {len(p)}")
        if not np.all(np.isfinite(p)) or np.any(np.abs(p) > 1.0):
            raise DomainViolation("points must lie in [-1, 1]^2")
        if self.family not in FAMILIES_2D:
            raise InvalidInput(f"unknown family {self.family!r}")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    def __len__(self):
        return len(self.points)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def interior_mask(self) -> np.ndarray:
        return np.all(np.abs(self.points) < 1.0, axis=1)

    def to_json(self) -> dict:
        return {"degree": self.degree, "family": self.family,
                "points": self.points.tolist(), "parity": self.parity}


def _check_degree(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidDegree(f"degree must be an integer >= 1, got {n!r}")
    return int(n)


def _cos_grid(m: int) -> np.ndarray:
    """cos(i pi/m), i = 0..m, written as a sine so that symmetric entries match exactly."""
    i = np.arange(m + 1)
    return np.sin((m - 2 * i) * np.pi / (2 * m))


def padua(n: int, parity: int = DEFAULT_PARITY) -> NodeSet2D:
    n = _check_degree(n)
    if parity not in (0, 1):
        raise InvalidInput("parity must be 0 or 1")
    gx = _cos_grid(n + 1)
    gy = _cos_grid(n)
    k, j = np.meshgrid(np.arange(n + 2), np.arange(n + 1), indexing="ij")
    keep = (j + k) % 2 == parity
    pts = np.column_stack([gx[k[keep]], gy[j[keep]]])
    ns = NodeSet2D(pts, n, "padua", parity)
    _assert_unisolvent(ns)
    return ns


def morrow_patterson(n: int) -> NodeSet2D:
    """Points ``(cos(k pi/(n+3)), cos(j pi/(n+2)))``, ``1 <= k <= n+2``, ``1 <= j <= n+1``, j+k odd."""
    n = _check_degree(n)
    gx = _cos_grid(n + 3)
    gy = _cos_grid(n + 2)
    k, j = np.meshgrid(np.arange(1, n + 3), np.arange(1, n + 2), indexing="ij")
    keep = (j + k) % 2 == DEFAULT_PARITY
    pts = np.column_stack([gx[k[keep]], gy[j[keep]]])
    ns = NodeSet2D(pts, n, "morrow_patterson", DEFAULT_PARITY)
    _assert_unisolvent(ns)
    return ns


def padua_interior(n: int) -> np.ndarray:
    """Points of the degree-n Padua set strictly inside the square."""
    p = padua(n)
    return p.points[p.interior_mask()]


def custom2d(points, n: int) -> NodeSet2D:
    ns = NodeSet2D(points, n, "custom")
    unisolvence_check(ns)
    return ns


@dataclass(frozen=True)
class UnisolvenceReport:
    determinant_nonzero: bool
    condition_estimate: float
    rank: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def vandermonde(ns: NodeSet2D) -> np.ndarray:
    return basis_matrix(ns.degree, ns.x, ns.y)


def unisolvence_check(ns: NodeSet2D, cond_limit: float = 1e12) -> UnisolvenceReport:
    """Rank and 2-norm condition of the Chebyshev Vandermonde matrix.

    Raises :class:`NotUnisolvent` when the matrix is numerically singular.
    """
    s = np.linalg.svd(vandermonde(ns), compute_uv=False)
    tol = s[0] * len(s) * np.finfo(float).eps
    rank = int(np.sum(s > tol))
    cond = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
    if rank < len(s) or cond > cond_limit:
        raise NotUnisolvent(f"Vandermonde matrix singular (rank {rank}/{len(s)}, cond {cond:.3g})")
    return UnisolvenceReport(True, cond, rank)


def _assert_unisolvent(ns, cond_limit: float = 1e12):
    """Cheap construction-time check: LU plus the LAPACK 1-norm condition estimate."""
    V = vandermonde(ns)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, _ = lu_factor(V, check_finite=False)
    rcond, info = lapack.dgecon(lu, np.linalg.norm(V, 1), norm="1")
    if info != 0 or not rcond > 1.0 / cond_limit:
        raise InternalError(f"{ns.family} construction failed unisolvence (rcond {rcond:.3g})")


GENERATORS_2D = {"padua": padua, "morrow_patterson": morrow_patterson}


def generate2d(family: str, n: int) -> NodeSet2D:
    try:
        gen = GENERATORS_2D[family]
    except KeyError:
        raise InvalidInput(f"unknown family {family!r}; choose from {sorted(GENERATORS_2D)}") from None
    return gen(n)
