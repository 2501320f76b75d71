import math

import numpy as np
import pytest
from scipy.optimize import linprog

from vallab import fconv_core as fc
from vallab import geom_core as gc
from vallab.errors import NegativeScale, NonConvexMin, NotCoercive, OriginOutside


def envelope_oracle(v, x):
    """v*(x) = min Σ λ_i (-c_i) over λ >= 0, Σ λ_i = 1, Σ λ_i y_i = x (sup-enumeration dual)."""
    Y, c = v.slopes, v.offsets
    A = np.vstack([Y.T, np.ones(len(Y))])
    res = linprog(-c, A_eq=A, b_eq=np.append(x, 1.0), bounds=[(0, None)] * len(Y), method="highs")
    return res.fun if res.status == 0 else np.inf


def random_max_affine(rng, k=8, n=2):
    return fc.MaxAffineFunc(rng.normal(size=(k, n)), rng.normal(size=k))


def test_indicator_values():
    u = fc.indicator(gc.box([0, 0], [1, 1]))
    assert fc.evaluate(u, (0.5, 0.5)) == 0 and fc.evaluate(u, (2, 0)) == np.inf


def test_max_affine_value():
    v = fc.MaxAffineFunc([[0, 0], [1, 0]], [0, -1])
    assert fc.evaluate(v, (2, 0)) == 1


def test_gauge_values():
    B = gc.regular_polygon(32)
    g = fc.gauge(B)
    assert np.allclose(fc.evaluate(g, B.vertices), 1, atol=1e-12)
    sq = gc.box([-0.5, -0.5], [1, 1])
    X = np.random.default_rng(13).normal(size=(50, 2))
    assert np.allclose(fc.evaluate(fc.gauge(sq), X), 2 * np.max(np.abs(X), axis=1), atol=1e-12)
    with pytest.raises(OriginOutside):
        fc.gauge(gc.box([1, 1], [1, 1]))


def test_sublevel_sets():
    K = gc.hull(np.random.default_rng(14).normal(size=(7, 2)) + 0.0)
    K = gc.translate(K, -gc.vertex_centroid(K))
    g = fc.gauge(K)
    for t in (0.5, 1.0, 2.5):
        assert gc.hausdorff_distance(fc.sublevel(g, t), gc.scale(K, t)) <= 1e-12
    assert gc.is_empty(fc.sublevel(g, -0.1))


def test_involution_against_envelope_oracle():
    rng = np.random.default_rng(15)
    v = random_max_affine(rng)
    u = fc.conjugate(v)
    hull = gc.hull(v.slopes)
    X = hull.vertices[0] + rng.dirichlet(np.ones(len(hull.vertices)), 100) @ (hull.vertices - hull.vertices[0])
    assert np.max(np.abs(fc.evaluate(u, X) - [envelope_oracle(v, x) for x in X])) < 1e-10
    back = fc.conjugate(u)
    Z = rng.normal(size=(100, 2)) * 3
    assert np.max(np.abs(fc.evaluate(back, Z) - fc.evaluate(v, Z))) < 1e-10


def test_involution_on_polyhedral_start():
    rng = np.random.default_rng(16)
    w = fc.conjugate(random_max_affine(rng))
    ww = fc.conjugate(fc.conjugate(w))
    X = rng.normal(size=(100, 2))
    a, b = fc.evaluate(w, X), fc.evaluate(ww, X)
    fin = np.isfinite(a)
    assert np.array_equal(fin, np.isfinite(b)) and np.max(np.abs(a[fin] - b[fin])) < 1e-10


def test_epi_scale_zero_and_doubling():
    rng = np.random.default_rng(17)
    u = fc.conjugate(random_max_affine(rng))
    z = fc.epi_scale(0, u)
    assert fc.evaluate(z, (0, 0)) == 0 and fc.evaluate(z, (0.1, 0)) == np.inf
    two = fc.epi_scale(2, u)
    uu = fc.inf_conv(u, u)
    X = rng.normal(size=(100, 2))
    a, b = fc.evaluate(two, X), fc.evaluate(uu, X)
    fin = np.isfinite(a)
    assert np.array_equal(fin, np.isfinite(b)) and np.max(np.abs(a[fin] - b[fin])) < 1e-10
    with pytest.raises(NegativeScale):
        fc.epi_scale(-1, u)


def test_indicator_epi_sum_is_minkowski_sum():
    rng = np.random.default_rng(18)
    K, L = gc.hull(rng.normal(size=(6, 2))), gc.hull(rng.normal(size=(5, 2)))
    w = fc.inf_conv(fc.indicator(K), fc.indicator(L))
    S = gc.minkowski_sum(K, L)
    body = gc.hull(np.vstack([c.vertices for c in w.cells]))
    assert gc.hausdorff_distance(body, S) < 1e-10
    X = rng.normal(size=(200, 2)) * 2
    inside = np.array([gc.contains(S, x, 1e-9) for x in X])
    vals = fc.evaluate(w, X)
    assert np.all(vals[inside] == pytest.approx(0, abs=1e-10)) and np.all(np.isinf(vals[~inside]))


def test_coercivity_witness():
    g = fc.gauge(gc.hull([[-1.0], [1.0]]))
    assert tuple(fc.coercivity_witness(g)) == pytest.approx((1, 0))
    K = gc.box([1, 1], [1, 2])
    y = np.array([0.5, -1.0])
    a, b = fc.coercivity_witness(fc.linear_plus_indicator(y, K))
    assert a > 0
    assert b == pytest.approx(min(K.vertices @ y) - a * max(np.linalg.norm(K.vertices, axis=1)))
    X = K.vertices[0] + np.random.default_rng(19).uniform(size=(100, 2)) * [1, 2]
    assert np.all(X @ y >= a * np.linalg.norm(X, axis=1) + b - 1e-12)
    with pytest.raises(NotCoercive) as err:
        fc.coercivity_witness(fc.MaxAffineFunc([[1.0, 0.0]], [0.0]))
    assert np.linalg.norm(err.value.direction) > 0


def test_epi_convergence_diagnostic():
    rng = np.random.default_rng(20)
    u = fc.conjugate(random_max_affine(rng))
    m = fc.min_value(u)
    seq = [fc.vertical_shift(u, 1 / k) for k in (1, 2, 4, 8, 16)]
    d = fc.epi_convergence_diag(seq, u, [m + 0.5, m + 1.0, m])
    assert d.skipped == (m,)
    for row in d.distances:
        assert all(b <= a for a, b in zip(row, row[1:])) and row[-1] < row[0]
    assert all(gc.is_empty(fc.sublevel(uk, m)) for uk in seq)
    const = fc.epi_convergence_diag([u, u], u, [m + 1.0])
    assert const.distances == ((0.0, 0.0),)


def test_min_value_routes_agree():
    rng = np.random.default_rng(21)
    for _ in range(10):
        u = fc.conjugate(random_max_affine(rng))
        assert fc.min_value(u) == pytest.approx(fc.linprog_min(u), abs=1e-9)


def test_lattice_operations():
    rng = np.random.default_rng(22)
    w = fc.conjugate(random_max_affine(rng))
    for alpha in (None, 1.5):
        p = fc.split_pair(w, np.array([0.6, 0.8]), 0.1, alpha)
        mx, mn = fc.pointwise_max(p.u, p.v), fc.pointwise_min(p.u, p.v)
        on_plane = 0.1 * p.normal + np.outer(rng.normal(size=50), [-0.8, 0.6])
        X = np.vstack([rng.normal(size=(200, 2)), on_plane])
        a, b = fc.evaluate(mn, X), fc.evaluate(w, X)
        fin = np.isfinite(b)
        assert np.array_equal(np.isfinite(a), fin) and np.max(np.abs(a[fin] - b[fin]), initial=0.0) < 1e-10
        direct = np.maximum(fc.evaluate(p.u, X), fc.evaluate(p.v, X))
        got = fc.evaluate(mx, X)
        fin = np.isfinite(direct)
        assert np.array_equal(np.isfinite(got), fin) and np.max(np.abs(got[fin] - direct[fin]), initial=0.0) < 1e-10
        assert fin.any()


def test_nonconvex_min_detected():
    u = fc.indicator(gc.box([0, 0], [1, 1]))
    v = fc.indicator(gc.box([3, 0], [1, 1]))
    with pytest.raises(NonConvexMin):
        fc.pointwise_min(u, v)


def test_radial_quadratic():
    q = fc.RadialQuadratic(2, 3.0)
    assert fc.evaluate(q, (1, 2)) == pytest.approx(7.5)
    assert math.isclose(fc.evaluate(q, (0, 0)), 0)
