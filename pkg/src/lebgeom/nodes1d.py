"""Interpolation node families on [-1, 1].

Every generator returns a :class:`NodeSet1D` of ``n + 1`` strictly increasing
nodes.  Closed forms are written with ``sin`` of a symmetric angle rather
than ``-cos`` so that the families are exactly antisymmetric and node gaps
near the endpoints keep full relative accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import mpmath
import numpy as np

from .errors import DomainViolation, InvalidDegree, InvalidInput, NotUnisolvent

FAMILIES = ("equidistant", "chebyshev1", "chebyshev2", "lobatto", "extended", "custom")


@dataclass(frozen=True, eq=False)
class NodeSet1D:
    nodes: np.ndarray
    family: str = "custom"
    # accumulated perturbation, kept separately so that opposite shifts cancel exactly
    base: np.ndarray | None = field(default=None, repr=False)
    offsets: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        x.setflags(write=False)
        object.__setattr__(self, "nodes", x)
        _validate(x)
        if self.family not in FAMILIES:
            raise InvalidInput(f"unknown family {self.family!r}")

    @property
    def degree(self) -> int:
        return len(self.nodes) - 1

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        if not isinstance(other, NodeSet1D):
            return NotImplemented
        return np.array_equal(self.nodes, other.nodes)

    def __hash__(self):
        return hash(self.nodes.tobytes())

    def is_symmetric(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.nodes + self.nodes[::-1]) <= tol))

    def contains_endpoints(self) -> bool:
        return self.nodes[0] == -1.0 and self.nodes[-1] == 1.0

    def to_json(self) -> dict:
        return {"degree": self.degree, "family": self.family, "nodes": [float(v) for v in self.nodes]}


def _validate(x: np.ndarray) -> None:
    if x.ndim != 1 or x.size == 0:
        raise InvalidInput("node list must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) > 1.0):
        raise DomainViolation("nodes must lie in [-1, 1]")
    if np.any(np.diff(x) <= 0):
        raise NotUnisolvent("nodes must be strictly increasing and distinct")


def _check_degree(n, minimum):
    if not isinstance(n, (int, np.integer)) or n < minimum:
        raise InvalidDegree(f"degree must be an integer >= {minimum}, got {n!r}")
    return int(n)


def equidistant(n: int) -> NodeSet1D:
    n = _check_degree(n, 1)
    j = np.arange(n + 1)
    x = (2 * j - n) / n
    return NodeSet1D(x, "equidistant")


def chebyshev1(n: int) -> NodeSet1D:
    """Zeros of T_{n+1}: x_j = -cos((2j-1)pi/(2n+2)), j = 1..n+1."""
    n = _check_degree(n, 0)
    j = np.arange(1, n + 2)
    x = np.sin((2 * j - n - 2) * np.pi / (2 * n + 2))
    return NodeSet1D(x, "chebyshev1")


def chebyshev2(n: int) -> NodeSet1D:
    """Zeros of U_{n+1}: x_j = -cos(j pi/(n+2)), j = 1..n+1."""
    n = _check_degree(n, 0)
    j = np.arange(1, n + 2)
    x = np.sin((2 * j - n - 2) * np.pi / (2 * n + 4))
    return NodeSet1D(x, "chebyshev2")


def chebyshev_lobatto(n: int) -> NodeSet1D:
    """Extrema of T_n, endpoints included."""
    n = _check_degree(n, 1)
    j = np.arange(n + 1)
    x = np.sin((2 * j - n) * np.pi / (2 * n))
    x[0], x[-1] = -1.0, 1.0
    return NodeSet1D(x, "lobatto")


def extended_chebyshev(n: int) -> NodeSet1D:
    """First-kind nodes stretched so the extreme nodes land on -1 and 1."""
    n = _check_degree(n, 1)
    j = np.arange(1, n + 2)
    x = np.sin((2 * j - n - 2) * np.pi / (2 * n + 2)) / np.cos(np.pi / (2 * n + 2))
    x[0], x[-1] = -1.0, 1.0
    return NodeSet1D(x, "extended")


GENERATORS = {
    "equidistant": equidistant,
    "chebyshev1": chebyshev1,
    "chebyshev2": chebyshev2,
    "lobatto": chebyshev_lobatto,
    "extended": extended_chebyshev,
}


def generate(family: str, n: int) -> NodeSet1D:
    try:
        gen = GENERATORS[family]
    except KeyError:
        raise InvalidInput(f"unknown family {family!r}; choose from {sorted(GENERATORS)}") from None
    return gen(n)


def custom(values: Sequence[float]) -> NodeSet1D:
    x = np.array(values, dtype=float).ravel()
    if x.size == 0:
        raise InvalidInput("node list is empty")
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) > 1.0):
        raise DomainViolation("nodes must lie in [-1, 1]")
    x = np.sort(x)
    if np.any(np.diff(x) == 0):
        raise NotUnisolvent("duplicate nodes")
    return NodeSet1D(x, "custom")


def perturb(ns: NodeSet1D, shifts: Mapping[int, float]) -> NodeSet1D:
    """Shift selected nodes (0-based indices) by the given amounts.

    Shifts accumulate on top of the unperturbed nodes, so perturbing by
    ``shifts`` and then by the negated ``shifts`` returns the original
    coordinates bit for bit.
    """
    base = ns.base if ns.base is not None else ns.nodes
    offsets = np.zeros(len(base)) if ns.offsets is None else ns.offsets.copy()
    for idx, d in shifts.items():
        if not -len(base) <= idx < len(base):
            raise InvalidInput(f"node index {idx} out of range")
        offsets[idx] += float(d)
    x = base + offsets
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) > 1.0):
        raise DomainViolation("perturbed nodes leave [-1, 1]")
    if np.any(np.diff(x) <= 0):
        raise NotUnisolvent("perturbation breaks the node ordering")
    return NodeSet1D(x, "custom", base=base, offsets=offsets)


def central_outward(ns: NodeSet1D, delta: float) -> dict[int, float]:
    """Shifts moving the two central nodes apart by ``delta`` each.

    Requires an even number of nodes (odd degree).
    """
    m = len(ns.nodes)
    if m % 2:
        raise InvalidInput("central pair needs an even node count")
    return {m // 2 - 1: -delta, m // 2: delta}


def scale(ns: NodeSet1D, c: float) -> NodeSet1D:
    if not 0.0 < c <= 1.0:
        raise InvalidInput("scale factor must lie in (0, 1]")
    if c == 1.0:
        return ns
    return NodeSet1D(ns.nodes * c, "custom")


def nodes_mp(ns: NodeSet1D, bits: int) -> list:
    """The node set in ``bits``-bit mpmath arithmetic.

    Named families are regenerated from their closed forms; custom sets are
    converted exactly from their binary64 values.
    """
    n = ns.degree
    with mpmath.workprec(bits):
        pi = mpmath.pi
        if ns.family == "chebyshev1":
            x = [mpmath.sin((2 * j - n - 2) * pi / (2 * n + 2)) for j in range(1, n + 2)]
        elif ns.family == "chebyshev2":
            x = [mpmath.sin((2 * j - n - 2) * pi / (2 * n + 4)) for j in range(1, n + 2)]
        elif ns.family == "lobatto":
            x = [mpmath.sin((2 * j - n) * pi / (2 * n)) for j in range(n + 1)]
            x[0], x[-1] = mpmath.mpf(-1), mpmath.mpf(1)
        elif ns.family == "extended":
            c = mpmath.cos(pi / (2 * n + 2))
            x = [mpmath.sin((2 * j - n - 2) * pi / (2 * n + 2)) / c for j in range(1, n + 2)]
            x[0], x[-1] = mpmath.mpf(-1), mpmath.mpf(1)
        elif ns.family == "equidistant":
            x = [mpmath.mpf(2 * j - n) / n for j in range(n + 1)]
        else:
            x = [mpmath.mpf(float(v)) for v in ns.nodes]
        return [+v for v in x]


def format_mp(values, bits: int) -> list[str]:
    digits = max(bits // 3, 1)
    return [mpmath.nstr(v, digits, strip_zeros=False) for v in values]
