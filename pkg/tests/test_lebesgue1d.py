import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lebgeom import lebesgue1d as L
from lebgeom import nodes1d as N
from lebgeom.errors import InvalidInput, NeedsMorePrecision
from lebgeom.precision import PrecisionContext

FAMILIES = sorted(N.GENERATORS)


def product_basis(x_nodes, x):
    """Direct Lagrange product formula (oracle)."""
    m = len(x_nodes)
    out = np.ones(m)
    for j in range(m):
        for i in range(m):
            if i != j:
                out[j] *= (x - x_nodes[i]) / (x_nodes[j] - x_nodes[i])
    return out


def test_basis_linear():
    assert np.allclose(L.lagrange_basis(N.custom([-1, 1]), 0.0), [0.5, 0.5])


@pytest.mark.parametrize("family", FAMILIES)
def test_cardinal_property(family):
    ns = N.generate(family, 11)
    assert np.array_equal(L.lagrange_basis(ns, ns.nodes), np.eye(12))
    assert np.all(L.lebesgue_eval(ns, ns.nodes) == 1.0)


def test_near_node_short_circuit():
    ns = N.chebyshev2(6)
    x = np.nextafter(ns.nodes[2], 1.0)
    assert np.array_equal(L.lagrange_basis(ns, x), np.eye(7)[2])


def test_basis_against_product_formula():
    ns = N.chebyshev2(4)
    got = L.lagrange_basis(ns, 0.3)
    assert np.allclose(got, product_basis(ns.nodes, 0.3), rtol=1e-13, atol=0)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [3, 20])
def test_weights_against_product(family, n):
    ns = N.generate(family, n)
    w = L.barycentric_weights(ns)
    ref = L.product_weights(ns.nodes)
    ratio = ref / w
    assert np.allclose(ratio, ratio[0], rtol=1e-12)
    sign, logw = L.log_weights(ns)
    assert np.array_equal(sign, np.sign(ref))
    assert np.allclose(logw, np.log(np.abs(ref)), rtol=0, atol=1e-12)


@pytest.mark.parametrize("n", [40, 100])
def test_equidistant_mirror_symmetry_of_values(n):
    # large lambda must not cost accuracy: mirrored points agree to rounding
    ns = N.equidistant(n)
    t = np.linspace(-1, -1 + 2.0 / n, 103)[1:-1]
    left, right = L.lebesgue_eval(ns, t), L.lebesgue_eval(ns, -t)
    assert np.max(np.abs(left / right - 1)) <= 1e-12


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [1, 10, 50, 100])
def test_partition_of_unity(family, n):
    rng = np.random.default_rng(n)
    x = rng.uniform(-1, 1, 1000)
    ns = N.generate(family, n)
    B = L.lagrange_basis(ns, x)
    # rounding in the sum scales with sum |l_j| = lambda(x), huge for equidistant nodes
    rel = np.abs(B.sum(axis=1) - 1.0) / np.abs(B).sum(axis=1)
    assert np.max(rel) <= 1e-12
    if family != "equidistant":
        assert np.max(np.abs(B.sum(axis=1) - 1.0)) <= 1e-12


@pytest.mark.parametrize("family", FAMILIES)
def test_lambda_bounds(family):
    ns = N.generate(family, 15)
    x = np.linspace(-1, 1, 4001)
    B = L.lagrange_basis(ns, x)
    lam = L.lebesgue_eval(ns, x)
    assert np.all(lam >= np.abs(B).max(axis=1) - 1e-15)
    assert np.all(np.abs(B).max(axis=1) >= 1.0 / (ns.degree + 1) - 1e-15)
    off = np.min(np.abs(x[:, None] - ns.nodes[None, :]), axis=1) > 1e-6
    assert np.all(lam[off] > 1.0)


def test_linear_two_point():
    lam = L.lebesgue_eval(N.custom([-1, 1]), np.linspace(-1, 1, 101))
    assert np.allclose(lam, 1.0, atol=1e-15)


def test_piece_signs_equidistant():
    assert L.piece_signs(N.equidistant(2), 1).signs == (1, 1, -1)


def test_piece_signs_degree_one():
    assert L.piece_signs(N.custom([-1, 1]), 1).signs == (1, 1)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [2, 7, 30])
def test_piece_signs_match_midpoint_evaluation(family, n):
    ns = N.generate(family, n)
    for k in range(n + 2):
        lo, hi = L.piece_bounds(ns, k)
        if hi <= lo:
            continue
        mid = 0.5 * (lo + hi)
        ref = np.sign(product_basis(ns.nodes, mid))
        assert tuple(ref.astype(int)) == L.piece_signs(ns, k).signs


def test_boundary_piece_signs_alternate():
    ns = N.chebyshev1(6)
    s = L.piece_signs(ns, 7).signs
    assert s[-1] == 1
    assert all(a == -b for a, b in zip(s[:-1], s[1:]))


@pytest.mark.parametrize("family", FAMILIES)
def test_lambda_equals_signed_piece(family):
    ns = N.generate(family, 12)
    for k in range(ns.degree + 2):
        lo, hi = L.piece_bounds(ns, k)
        if hi <= lo:
            continue
        t = np.linspace(lo, hi, 102)[1:-1]
        assert np.allclose(L.piece_eval(ns, k, t), L.lebesgue_eval(ns, t), rtol=1e-12, atol=0)


@given(st.lists(st.sampled_from([-1, 1]), min_size=9, max_size=9), st.floats(-1, 1))
@settings(max_examples=100, deadline=None)
def test_signed_combination_below_lambda(signs, x):
    ns = N.chebyshev2(8)
    p = float(L.lagrange_basis(ns, x) @ np.array(signs, float))
    assert abs(p) <= L.lebesgue_eval(ns, x) * (1 + 1e-14)


@pytest.mark.parametrize("ns", [N.chebyshev1(9), N.chebyshev2(9), N.scale(N.equidistant(9), 0.97)],
                         ids=["chebyshev1", "chebyshev2", "scaled-equidistant"])
def test_increasing_on_right_boundary_piece(ns):
    lo = ns.nodes[-1]
    t = np.linspace(lo, 1, 102)[1:-1]
    h = 1e-7
    slope = (L.lebesgue_eval(ns, t + h) - L.lebesgue_eval(ns, t - h)) / (2 * h)
    assert np.all(slope > 0)


def test_derivative_against_finite_difference():
    ns = N.equidistant(7)
    t = np.array([-0.9, -0.33, 0.1, 0.62])
    h = 1e-6
    fd = (L.lebesgue_eval(ns, t + h) - L.lebesgue_eval(ns, t - h)) / (2 * h)
    assert np.allclose(L.lebesgue_derivative(ns, t), fd, rtol=1e-6)


def test_sample():
    ns = N.chebyshev1(9)
    assert L.sample(ns, []) == []
    assert all(v == 1.0 for _, v in L.sample(ns, ns.nodes))
    pairs = L.sample(ns, np.linspace(-1, 1, 10_000))
    vals = np.array([v for _, v in pairs])
    assert vals[0] == pytest.approx(vals.max(), rel=1e-14)
    assert vals[-1] == pytest.approx(vals.max(), rel=1e-14)


def _dd_matrix(x):
    """Differentiation matrix from the product formula (float oracle)."""
    m = len(x)
    a = np.array([np.prod([x[j] - x[i] for i in range(m) if i != j]) for j in range(m)])
    D = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if i != j:
                D[i, j] = a[i] / (a[j] * (x[i] - x[j]))
        D[i, i] = -D[i].sum()
    return D


@pytest.mark.parametrize("family", ["equidistant", "chebyshev1", "lobatto", "custom"])
def test_second_derivative_row_equals_d_squared(family):
    ns = N.custom([-1, -0.4, 0, 0.3, 0.8]) if family == "custom" else N.generate(family, 6)
    D = _dd_matrix(ns.nodes)
    D2 = D @ D
    ctx = PrecisionContext(128)
    x, w = L.mp_setup(ns, 128)
    for k in range(1, ns.degree + 1):
        sig = L.piece_sign_vector(ns.degree, k)
        for i in (k - 1, k):
            val, _ = L.node_second_derivative(x, w, i, [int(s) for s in sig], ctx)
            assert float(val) == pytest.approx(D2[i] @ sig, rel=1e-9, abs=1e-9)


def test_second_derivative_equidistant_quadratic():
    # piece 1 of equidistant(2): p = l0 + l1 - l2 = 1 - 2 l2, l2 = x(x+1)/2, so p'' = -2
    ns = N.equidistant(2)
    assert float(L.piece_second_derivative_at_node(ns, 1, "right")) == pytest.approx(-2.0)
    assert float(L.piece_second_derivative_at_node(ns, 1, "left")) == pytest.approx(-2.0)


def test_second_derivative_signs_chebyshev2():
    assert L.piece_second_derivative_at_node(N.chebyshev2(8), 1, "right") > 0
    assert L.piece_second_derivative_at_node(N.chebyshev2(7), 1, "right") < 0


def test_second_derivative_structural_zero():
    assert L.piece_second_derivative_at_node(N.custom([-1, 1]), 1, "right") == 0


# p''(alpha) at the left node of (alpha, 1) changes sign near this alpha
ALPHA_SWITCH = 0.4567539382287777


def test_second_derivative_needs_more_precision():
    ns = N.custom([-1, -ALPHA_SWITCH, 0, ALPHA_SWITCH, 1])
    with pytest.raises(NeedsMorePrecision) as exc:
        L.piece_second_derivative_at_node(ns, 4, "left", PrecisionContext(64))
    assert exc.value.bits == 64
    val = L.piece_second_derivative_at_node(ns, 4, "left", PrecisionContext(256))
    assert 0 < val < 1e-10


def test_second_derivative_bad_side():
    ns = N.chebyshev1(4)
    with pytest.raises(InvalidInput):
        L.piece_second_derivative_at_node(ns, 0, "left")
    with pytest.raises(InvalidInput):
        L.piece_second_derivative_at_node(ns, 5, "right")
    with pytest.raises(InvalidInput):
        L.piece_second_derivative_at_node(ns, 2, "middle")


def test_piece_eval_mp_matches_double():
    ns = N.chebyshev1(9)
    x, w = L.mp_setup(ns, 200)
    sig = [int(s) for s in L.piece_sign_vector(9, 3)]
    t = 0.5 * (ns.nodes[2] + ns.nodes[3])
    v = L.piece_eval_mp(x, w, sig, mpmath.mpf(t), 200)
    assert float(v) == pytest.approx(L.lebesgue_eval(ns, t), rel=1e-13)
