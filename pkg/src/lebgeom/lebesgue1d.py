"""Lagrange basis, Lebesgue function and its polynomial pieces on [-1, 1].

Values use the first (modified) barycentric form in log scale,
``lambda(x) = |l(x)| * sum_j |w_j / (x - x_j)|`` with ``l(x) = prod (x - x_i)``
and true (unscaled) weights.  Every term is positive, so the relative error
stays at a few ulp times n however large lambda gets; the second form would
lose a factor lambda(x) to cancellation in its denominator.

Pieces are numbered ``k = 0 .. n+1`` over 0-based nodes ``x[0] < ... < x[n]``:

* piece 0 is ``[-1, x[0])`` (empty if ``x[0] == -1``),
* piece k, ``1 <= k <= n``, is ``(x[k-1], x[k])``,
* piece n+1 is ``(x[n], 1]``.

On every piece each fundamental polynomial keeps a constant sign, so the
Lebesgue function coincides there with the signed combination
``p_k = sum_j sigma_j l_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import InvalidInput, NeedsMorePrecision
from .nodes1d import NodeSet1D, nodes_mp
from .precision import PrecisionContext

_CHUNK = 1 << 21


def log_weights(ns: NodeSet1D) -> tuple[np.ndarray, np.ndarray]:
    """Signs and natural logs of the true weights ``1 / prod_{i != j} (x_j - x_i)``.

    Closed forms are used for the named families, a log-product otherwise.
    """
    sign, logw = _log_weights_cached(ns.family, ns.nodes.tobytes(), ns.degree)
    return sign.copy(), logw.copy()


def barycentric_weights(ns: NodeSet1D) -> np.ndarray:
    """Weights scaled so that ``max |w_j| = 1``; ``sign(w_j) = (-1)**(n - j)``."""
    sign, logw = log_weights(ns)
    return sign * np.exp(logw - logw.max())


@lru_cache(maxsize=256)
def _log_weights_cached(family, key, n):
    x = np.frombuffer(key, dtype=float)
    j = np.arange(n + 1)
    sign = np.where((n - j) % 2 == 0, 1.0, -1.0)
    if n == 0:
        return np.ones(1), np.zeros(1)
    log2n = n * np.log(2.0)
    if family == "chebyshev1":
        logw = log2n - np.log(n + 1.0) + np.log(np.sin((2 * j + 1) * np.pi / (2 * n + 2)))
    elif family == "extended":
        c = np.cos(np.pi / (2 * n + 2))
        logw = (n * np.log(c) + log2n - np.log(n + 1.0)
                + np.log(np.sin((2 * j + 1) * np.pi / (2 * n + 2))))
    elif family == "chebyshev2":
        logw = log2n + np.log(2.0) - np.log(n + 2.0) + 2 * np.log(np.sin((j + 1) * np.pi / (n + 2)))
    elif family == "lobatto":
        logw = np.full(n + 1, (n - 1) * np.log(2.0) - np.log(float(n)))
        logw[[0, -1]] -= np.log(2.0)
    elif family == "equidistant":
        logw = n * np.log(n / 2.0) - gammaln(j + 1) - gammaln(n - j + 1)
    else:
        d = np.abs(x[:, None] - x[None, :])
        np.fill_diagonal(d, 1.0)
        logw = -np.log(d).sum(axis=1)
    return sign, logw


def product_weights(x) -> np.ndarray:
    """Direct product-formula weights, no rescaling (oracle for small n)."""
    x = np.asarray(x, dtype=float)
    w = np.ones(len(x))
    for j in range(len(x)):
        for i in range(len(x)):
            if i != j:
                w[j] /= x[j] - x[i]
    return w


def _near_node(x, nodes):
    """Index of a node within 4 ulp of each query point, or -1."""
    d = np.abs(x[:, None] - nodes[None, :])
    tol = 4 * np.spacing(np.maximum(np.abs(nodes), np.finfo(float).tiny))
    hit = d <= tol[None, :]
    idx = np.where(hit.any(axis=1), hit.argmax(axis=1), -1)
    return idx


def _log_terms(nodes, logw, x):
    """Near-node index, signs of ``x - x_j``, ``log|l(x)|`` and ``log|w_j/(x - x_j)|``."""
    idx = _near_node(x, nodes)
    d = x[:, None] - nodes[None, :]
    d[idx >= 0] = 1.0
    logd = np.log(np.abs(d))
    return idx, np.sign(d), logd.sum(axis=1), logw[None, :] - logd


def _basis_block(nodes, sign, logw, x):
    idx, sd, logl, lt = _log_terms(nodes, logw, x)
    neg = np.count_nonzero(sd < 0, axis=1) % 2
    sl = np.where(neg == 1, -1.0, 1.0)
    out = (sl[:, None] * sign[None, :] * sd) * np.exp(logl[:, None] + lt)
    hit = idx >= 0
    if hit.any():
        out[hit] = 0.0
        out[np.nonzero(hit)[0], idx[hit]] = 1.0
    return out


def _lebesgue_block(nodes, logw, x):
    idx, _, logl, lt = _log_terms(nodes, logw, x)
    val = np.exp(logl + logsumexp(lt, axis=1))
    val[idx >= 0] = 1.0
    return val


def lagrange_basis(ns: NodeSet1D, x) -> np.ndarray:
    """Values ``(l_0(x), ..., l_n(x))``; shape ``x.shape + (n+1,)``.

    Points within 4 ulp of a node return the exact unit vector.
    """
    xa = np.asarray(x, dtype=float)
    flat = xa.ravel()
    sign, logw = log_weights(ns)
    rows = max(1, _CHUNK // len(ns.nodes))
    out = np.empty((flat.size, len(ns.nodes)))
    for s in range(0, flat.size, rows):
        out[s:s + rows] = _basis_block(ns.nodes, sign, logw, flat[s:s + rows])
    return out.reshape(xa.shape + (len(ns.nodes),))


def lebesgue_eval(ns: NodeSet1D, x):
    """Lebesgue function ``sum_j |l_j(x)|`` (scalar in, scalar out)."""
    xa = np.asarray(x, dtype=float)
    flat = xa.ravel()
    _, logw = log_weights(ns)
    rows = max(1, _CHUNK // len(ns.nodes))
    out = np.empty(flat.size)
    for s in range(0, flat.size, rows):
        out[s:s + rows] = _lebesgue_block(ns.nodes, logw, flat[s:s + rows])
    out = out.reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def log_derivative(nodes, w, x) -> np.ndarray:
    """``lambda'(x) / lambda(x)`` at points that are not nodes; any weight scale works.

    On a piece ``l_j'/l_j = sum_i 1/d_i - 1/d_j`` with ``d = x - nodes``, hence
    ``lambda'/lambda = sum_i 1/d_i - sum_j a_j / d_j`` where ``a_j`` are the
    normalised ``|w_j / d_j|``.
    """
    d = x[:, None] - nodes[None, :]
    inv = 1.0 / d
    a = np.abs(w)[None, :] * np.abs(inv)
    a /= a.sum(axis=1, keepdims=True)
    return inv.sum(axis=1) - (a * inv).sum(axis=1)


def lebesgue_derivative(ns: NodeSet1D, x):
    """Derivative of the Lebesgue function at points that are not nodes."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    der = log_derivative(ns.nodes, barycentric_weights(ns), xa) * lebesgue_eval(ns, xa)
    return der if np.ndim(x) else float(der[0])


@dataclass(frozen=True)
class PieceInfo:
    interval_index: int
    signs: tuple

    @property
    def sign_array(self) -> np.ndarray:
        return np.array(self.signs, dtype=float)


def piece_bounds(ns: NodeSet1D, k: int) -> tuple[float, float]:
    n = ns.degree
    _check_piece(n, k)
    lo = -1.0 if k == 0 else ns.nodes[k - 1]
    hi = 1.0 if k == n + 1 else ns.nodes[k]
    return float(lo), float(hi)


def _check_piece(n, k):
    if not 0 <= k <= n + 1:
        raise InvalidInput(f"piece index {k} outside 0..{n + 1}")


def piece_sign_vector(n: int, k: int) -> np.ndarray:
    """Signs of ``l_j`` on piece ``k`` for any strictly increasing node set.

    sign(l_j(x)) = sign(w_j) * sign(prod_i (x - x_i)) / sign(x - x_j), and all
    three factors depend only on how many nodes lie to the right of x.
    """
    _check_piece(n, k)
    j = np.arange(n + 1)
    s = np.where((n - j) % 2 == 0, 1, -1) * (1 if (n + 1 - k) % 2 == 0 else -1)
    return np.where(j < k, s, -s).astype(int)


def piece_signs(ns: NodeSet1D, k: int) -> PieceInfo:
    """Sign vector of the fundamental polynomials on piece ``k``.

    The zeros of every ``l_j`` are nodes, so the sign pattern on an open
    piece is determined combinatorially; no evaluation can hit a root.
    """
    return PieceInfo(k, tuple(int(v) for v in piece_sign_vector(ns.degree, k)))


def piece_eval(ns: NodeSet1D, k: int, x):
    """The polynomial ``p_k = sum_j sigma_j l_j`` (valid on all of R)."""
    sig = piece_sign_vector(ns.degree, k).astype(float)
    return lagrange_basis(ns, x) @ sig


def sample(ns: NodeSet1D, grid) -> list[tuple[float, float]]:
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        return []
    vals = np.atleast_1d(lebesgue_eval(ns, g))
    return list(zip(g.tolist(), vals.tolist()))


# ---------------------------------------------------------------- extended precision


def weights_mp(ns: NodeSet1D, x: list, bits: int) -> list:
    """Barycentric weights in mpmath at ``bits`` precision (same scale-free convention)."""
    n = ns.degree
    with mpmath.workprec(bits):
        pi = mpmath.pi
        sign = [1 if (n - j) % 2 == 0 else -1 for j in range(n + 1)]
        fam = ns.family
        if n == 0:
            return [mpmath.mpf(1)]
        if fam in ("chebyshev1", "extended"):
            mag = [mpmath.sin((2 * j + 1) * pi / (2 * n + 2)) for j in range(n + 1)]
        elif fam == "chebyshev2":
            mag = [mpmath.sin((j + 1) * pi / (n + 2)) ** 2 for j in range(n + 1)]
        elif fam == "lobatto":
            mag = [mpmath.mpf(1)] * (n + 1)
            mag[0] = mag[-1] = mpmath.mpf(0.5)
        elif fam == "equidistant":
            mag = [mpmath.mpf(mpmath.binomial(n, j)) for j in range(n + 1)]
        else:
            mag = []
            for j in range(n + 1):
                p = mpmath.mpf(1)
                for i in range(n + 1):
                    if i != j:
                        p *= x[j] - x[i]
                mag.append(1 / abs(p))
        return [s * m for s, m in zip(sign, mag)]


def node_second_derivative(x: list, w: list, i: int, values, ctx: PrecisionContext):
    """Second derivative at node ``x[i]`` of the degree-n interpolant of ``values``.

    Uses the row of the second-order differentiation matrix,
    ``D2[i, j] = 2 D[i, j] (D[i, i] - 1/(x_i - x_j))`` with
    ``D[i, j] = (w_j / w_i) / (x_i - x_j)`` and ``D[i, i] = sum_{j != i} 1/(x_i - x_j)``.
    Returns ``(value, scale)`` where scale is the largest term magnitude.
    """
    with ctx.workprec():
        xi = x[i]
        inv = [None] * len(x)
        for j, xj in enumerate(x):
            if j != i:
                inv[j] = 1 / (xi - xj)
        dii = mpmath.fsum(v for j, v in enumerate(inv) if j != i)
        vi = values[i]
        terms = []
        for j, v in enumerate(values):
            if j == i or v == vi:
                continue
            dij = (w[j] / w[i]) * inv[j]
            terms.append((v - vi) * 2 * dij * (dii - inv[j]))
        if not terms:
            return mpmath.mpf(0), mpmath.mpf(0)
        return mpmath.fsum(terms), max(abs(t) for t in terms)


def piece_second_derivative_at_node(ns: NodeSet1D, k: int, side: str = "right",
                                    ctx: PrecisionContext | None = None,
                                    _cache: dict | None = None):
    """Exact second derivative of piece ``k`` at its left or right node.

    Raises :class:`NeedsMorePrecision` when the value is inside the decision
    margin of ``ctx``; a structurally vanishing derivative (degree-1 pieces)
    returns zero.
    """
    ctx = ctx or PrecisionContext()
    n = ns.degree
    _check_piece(n, k)
    if side == "right":
        if k > n:
            raise InvalidInput("piece n+1 has no right node")
        i = k
    elif side == "left":
        if k < 1:
            raise InvalidInput("piece 0 has no left node")
        i = k - 1
    else:
        raise InvalidInput("side must be 'left' or 'right'")
    x, w = mp_setup(ns, ctx.mantissa_bits, _cache)
    sig = [int(s) for s in piece_sign_vector(n, k)]
    val, scale = node_second_derivative(x, w, i, sig, ctx)
    if scale != 0 and ctx.decide(val, scale) == 0:
        raise NeedsMorePrecision(
            f"|p''| = {mpmath.nstr(abs(val), 5)} within margin at {ctx.mantissa_bits} bits",
            value=val, scale=scale, bits=ctx.mantissa_bits)
    return val


def mp_setup(ns: NodeSet1D, bits: int, cache: dict | None = None):
    """Nodes and weights at ``bits`` precision, memoised in ``cache`` if given."""
    key = (ns.family, ns.nodes.tobytes(), bits)
    if cache is not None and key in cache:
        return cache[key]
    x = nodes_mp(ns, bits)
    w = weights_mp(ns, x, bits)
    if cache is not None:
        cache[key] = (x, w)
    return x, w


def piece_eval_mp(x: list, w: list, sig, t, bits: int):
    """Barycentric evaluation of the signed piece at an mpmath point ``t``."""
    with mpmath.workprec(bits):
        num = mpmath.mpf(0)
        den = mpmath.mpf(0)
        for xj, wj, sj in zip(x, w, sig):
            q = wj / (t - xj)
            num += sj * q
            den += q
        return num / den
