"""Local convexity of the Lebesgue function next to interior nodes.

On piece ``k`` (between 0-based nodes ``x[k-1]`` and ``x[k]``) the Lebesgue
function is the polynomial ``p_k``.  It is convex on a left neighbourhood of
``x[k]`` whenever ``p_k''(x[k]) > 0``, and that sign is decided in extended
precision with a relative margin, doubling the mantissa until decided.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInput, NeedsMorePrecision, NotFound, Undecided
from .lebesgue1d import piece_second_derivative_at_node
from .nodes1d import NodeSet1D, generate
from .precision import PrecisionContext, default_context

SEARCH_FAMILIES = ("chebyshev1", "chebyshev2")


@dataclass(frozen=True)
class Decision:
    degree: int
    k: int
    side: str
    convex: bool
    second_derivative: float
    bits: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def decide(ns: NodeSet1D, k: int, side: str = "right", ctx: PrecisionContext | None = None,
           cache: dict | None = None) -> Decision:
    """Sign of the piece's second derivative at its ``side`` node, escalating precision.

    A structurally vanishing derivative (linear piece) is reported as not convex.
    """
    ctx = ctx or default_context(ns.degree)
    while True:
        try:
            val = piece_second_derivative_at_node(ns, k, side, ctx, cache)
        except NeedsMorePrecision as exc:
            if ctx.at_cap:
                raise Undecided(
                    f"sign of p'' undecided at {ctx.mantissa_bits} bits",
                    context={"degree": ns.degree, "k": k, "side": side,
                             "bits": ctx.mantissa_bits, "value": float(exc.value)},
                ) from exc
            ctx = ctx.escalate()
            continue
        return Decision(ns.degree, k, side, bool(val > 0), float(val), ctx.mantissa_bits)


def convex_near_node(ns: NodeSet1D, k: int, ctx: PrecisionContext | None = None) -> bool:
    """True iff the Lebesgue function is convex on ``(x[k] - eps, x[k])`` for some eps > 0.

    ``k`` numbers the inner pieces ``1..n`` (the piece ending at 0-based node ``x[k]``).
    """
    if not 1 <= k <= ns.degree:
        raise InvalidInput(f"interval index {k} outside 1..{ns.degree}")
    return decide(ns, k, "right", ctx).convex


@dataclass(frozen=True)
class ConvexityProfile:
    """Flags per inner piece ``k = 1..n``; entry ``k-1`` of each tuple."""

    degree: int
    family: str
    convex_near_right: tuple
    convex_near_left: tuple

    def is_mirror_symmetric(self) -> bool:
        return self.convex_near_right == self.convex_near_left[::-1]

    def to_json(self) -> dict:
        return {"degree": self.degree, "family": self.family,
                "convex_near_right": list(self.convex_near_right),
                "convex_near_left": list(self.convex_near_left)}


def convexity_profile(ns: NodeSet1D, ctx: PrecisionContext | None = None) -> ConvexityProfile:
    """Convexity flags next to the right node and the left node of every inner piece."""
    n = ns.degree
    if n < 1:
        raise InvalidInput("degree must be >= 1")
    cache: dict = {}
    right = tuple(decide(ns, k, "right", ctx, cache).convex for k in range(1, n + 1))
    left = tuple(decide(ns, k, "left", ctx, cache).convex for k in range(1, n + 1))
    return ConvexityProfile(n, ns.family, right, left)


@dataclass(frozen=True)
class ConvexitySearch:
    family: str
    m: int
    min_degree: int
    decisions: tuple
    bits_used: int

    def to_json(self) -> dict:
        return {"family": self.family, "m": self.m, "min_degree": self.min_degree,
                "decisions": [d.to_json() for d in self.decisions], "bits_used": self.bits_used}


def convexity_search(family: str, m: int, ctx: PrecisionContext | None = None,
                     n_max: int = 2000, n_min: int | None = None) -> ConvexitySearch:
    """Smallest degree whose first ``m`` inner pieces are all convex next to their right node.

    Degrees are scanned one by one (both parities) since monotonicity in n is
    not known; within a degree the pieces are tested from ``k = m`` down so
    that the usual failure is found first.
    """
    if family not in SEARCH_FAMILIES:
        raise InvalidInput(f"family must be one of {SEARCH_FAMILIES}")
    if m < 1:
        raise InvalidInput("m must be >= 1")
    start = max(m, 1) if n_min is None else max(m, n_min)
    for n in range(start, n_max + 1):
        ns = generate(family, n)
        c = ctx or default_context(n)
        cache: dict = {}
        decisions = []
        for k in range(m, 0, -1):
            d = decide(ns, k, "right", c, cache)
            decisions.append(d)
            if not d.convex:
                break
        else:
            decisions.reverse()
            return ConvexitySearch(family, m, n, tuple(decisions), max(d.bits for d in decisions))
    raise NotFound(f"no degree <= {n_max} is convex near the first {m} nodes", limit=n_max)


def min_degree_for_convexity(family: str, m: int, ctx: PrecisionContext | None = None,
                             n_max: int = 2000) -> int:
    return convexity_search(family, m, ctx, n_max).min_degree
