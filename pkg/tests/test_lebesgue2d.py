import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lebgeom import lebesgue2d as Q
from lebgeom import nodes2d as P
from lebgeom.errors import InvalidInput, NotUnisolvent

NODE_A = (math.cos(2 * math.pi / 5), math.cos(3 * math.pi / 4))
FAMILIES = ["padua", "morrow_patterson"]


def monomial_matrix(n, pts):
    return np.array([[x**a * y**(d - a) for d in range(n + 1) for a in range(d + 1)] for x, y in pts])


def determinant_ratio_cardinals(ns, x, y):
    """Cardinals from the determinant-ratio definition in the monomial basis (oracle)."""
    pts = [tuple(p) for p in ns.points]
    det = np.linalg.det(monomial_matrix(ns.degree, pts))
    out = []
    for j in range(len(pts)):
        q = list(pts)
        q[j] = (x, y)
        out.append(np.linalg.det(monomial_matrix(ns.degree, q)) / det)
    return np.array(out)


@pytest.fixture(scope="module")
def pad4():
    return Q.build_cardinal_evaluator(P.padua(4))


def node_a_index(ce):
    pts = ce.node_set.points
    return int(np.argmin(np.hypot(pts[:, 0] - NODE_A[0], pts[:, 1] - NODE_A[1])))


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [1, 4, 5, 10, 20])
def test_cardinal_delta(family, n):
    ce = Q.build_cardinal_evaluator(P.generate2d(family, n))
    ns = ce.node_set
    # the raw polynomial values, not the node short-circuit
    raw = ce.basis(ns.x, ns.y) @ ce.coef
    assert np.max(np.abs(raw - np.eye(len(ns)))) <= 1e-10
    assert np.array_equal(ce.cardinals(ns.x, ns.y), np.eye(len(ns)))
    assert np.all(Q.lebesgue_eval2(ce, ns.x, ns.y) == 1.0)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [1, 3, 8, 20])
def test_partition_of_unity(family, n):
    ce = Q.build_cardinal_evaluator(P.generate2d(family, n))
    p = np.random.default_rng(n).uniform(-1, 1, (1000, 2))
    assert np.max(np.abs(ce.cardinals(p[:, 0], p[:, 1]).sum(axis=1) - 1)) <= 1e-10


def test_sizes():
    assert Q.build_cardinal_evaluator(P.padua(4)).size == 15
    assert Q.build_cardinal_evaluator(P.morrow_patterson(5)).size == 21


def test_singular_rejected():
    pts = P.padua(2).points.copy()
    pts[1] = pts[0]
    with pytest.raises(NotUnisolvent):
        Q.build_cardinal_evaluator(P.NodeSet2D(pts, 2))


def test_single_point_solve_matches_batch(pad4):
    v = Q.cardinal_eval(pad4, 0.31, -0.62)
    assert np.allclose(v, pad4.cardinals(0.31, -0.62)[0], rtol=0, atol=1e-13)
    assert np.array_equal(Q.cardinal_eval(pad4, *pad4.node_set.points[3]), np.eye(15)[3])


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("seed", range(5))
def test_determinant_ratio_oracle(family, n, seed):
    ns = P.generate2d(family, n)
    ce = Q.build_cardinal_evaluator(ns)
    x, y = np.random.default_rng(seed).uniform(-1, 1, 2)
    ref = determinant_ratio_cardinals(ns, x, y)
    assert np.allclose(ce.cardinals(x, y)[0], ref, rtol=0, atol=1e-9)
    assert Q.lebesgue_eval2(ce, x, y) == pytest.approx(np.abs(ref).sum(), abs=1e-9)


@given(st.floats(-1, 1), st.floats(-1, 1))
@settings(max_examples=100, deadline=None)
def test_lambda_at_least_one(x, y):
    ce = Q.build_cardinal_evaluator(P.padua(3))
    assert Q.lebesgue_eval2(ce, x, y) >= 1 - 1e-13


def test_grid_matches_pointwise(pad4):
    g = Q.grid_axis(20)
    X, Y = np.meshgrid(g, g, indexing="ij")
    lam = Q.lebesgue_grid(pad4, g, g)
    assert np.allclose(lam, Q.lebesgue_eval2(pad4, X.ravel(), Y.ravel()).reshape(X.shape), atol=1e-12)
    assert Q.grid_axis(7)[0] == -1.0 and Q.grid_axis(7)[-1] == 1.0


def test_constant_degree_one_against_dense_grid():
    ce = Q.build_cardinal_evaluator(P.padua(1))
    est = Q.lebesgue_constant2(ce)
    g = np.linspace(-1, 1, 2001)
    dense = Q.lebesgue_grid(ce, g, g).max()
    assert est.value == pytest.approx(dense, abs=1e-6)
    assert est.value >= est.grid_value


def test_constant_requires_fine_grid(pad4):
    with pytest.raises(InvalidInput):
        Q.lebesgue_constant2(pad4, grid_res=10)


def test_constant_padua_4_boundary_ridge(pad4):
    est = Q.lebesgue_constant2(pad4)
    assert max(abs(est.location[0]), abs(est.location[1])) == pytest.approx(1.0, abs=1e-12)


def test_pattern_search_quadratic():
    f = lambda p: -((p[:, 0] - 0.3) ** 2 + 2 * (p[:, 1] + 0.2) ** 2)
    p, v, _ = Q.pattern_search(f, (0.0, 0.0), 0.1, 1e-12)
    assert np.allclose(p, [0.3, -0.2], atol=1e-6)


def test_zero_curve_degree_one_is_straight():
    # generic triangle: no zero line runs along a grid line
    ce = Q.build_cardinal_evaluator(P.custom2d([(-0.9, -0.5), (0.7, -0.8), (0.1, 0.9)], 1))
    for j in range(3):
        zc = Q.zero_curves(ce, j, 64)
        v = zc.vertices()
        assert zc.components == 1 and len(v) > 2
        d = v[-1] - v[0]
        normal = np.array([-d[1], d[0]]) / np.hypot(*d)
        assert np.max(np.abs((v - v[0]) @ normal)) <= 1e-8


@pytest.mark.parametrize("j", range(15))
def test_zero_curve_residual(pad4, j):
    zc = Q.zero_curves(pad4, j, 200)
    v = zc.vertices()
    assert len(v) > 0
    assert np.max(np.abs(pad4.cardinals(v[:, 0], v[:, 1])[:, j])) <= 1e-6
    assert np.all(np.abs(v) <= 1.0)


def test_zero_curve_node_a_components(pad4):
    zc = Q.zero_curves(pad4, node_a_index(pad4))
    assert zc.components == 6
    assert zc.to_json()["node"] == pytest.approx(list(NODE_A), abs=1e-15)


def _segments_cross(p, q, line):
    a, b = line[:-1], line[1:]

    def orient(u, v, w):
        return np.sign((v[..., 0] - u[..., 0]) * (w[..., 1] - u[..., 1])
                       - (v[..., 1] - u[..., 1]) * (w[..., 0] - u[..., 0]))

    o1, o2 = orient(p, q, a), orient(p, q, b)
    o3, o4 = orient(a, b, p), orient(a, b, q)
    return bool(np.any((o1 != o2) & (o3 != o4)))


def test_sign_constant_between_curves(pad4):
    j = node_a_index(pad4)
    zc = Q.zero_curves(pad4, j, 400)
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(400):
        p = rng.uniform(-1, 1, 2)
        q = np.clip(p + rng.uniform(-0.2, 0.2, 2), -1, 1)
        vp, vq = pad4.cardinals([p[0], q[0]], [p[1], q[1]])[:, j]
        if min(abs(vp), abs(vq)) < 1e-3:
            continue
        if any(_segments_cross(p, q, np.asarray(line)) for line in zc.polylines):
            continue
        checked += 1
        assert np.sign(vp) == np.sign(vq)
    assert checked > 100


def test_curve_distance():
    zc = Q.ZeroCurve((0.0, 0.0), 0, (np.array([[0.0, -1.0], [0.0, 1.0]]), np.array([[0.5, 0.5]])), 4)
    d = Q.point_to_curve_distance([[0.3, 0.0], [0.5, 0.6], [-2.0, 2.0]], [zc])
    assert np.allclose(d, [0.3, 0.1, math.hypot(2, 1)])


def test_zero_curve_index_checked(pad4):
    with pytest.raises(InvalidInput):
        Q.zero_curves(pad4, 15)
