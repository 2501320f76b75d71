import math

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from vallab import fconv_core as fc
from vallab import fval as fv
from vallab import geom_core as gc
from vallab import intrinsic as iv
from vallab.errors import InsufficientNodes, NotSuperCoercive, ValidationError


def centered_polygon(rng, k=8):
    P = gc.hull(rng.normal(size=(k, 2)))
    return gc.translate(P, -gc.vertex_centroid(P))


def tent(radius=3.0, res=61):
    ax = np.linspace(-radius, radius, res)
    return fv.DensityFunc.tabulate(lambda Y: np.maximum(0, 1 - np.linalg.norm(Y, axis=1) / radius), [ax, ax])


def random_convex(rng, k=8):
    return fc.conjugate(fc.MaxAffineFunc(rng.normal(size=(k, 2)), rng.normal(size=k)))


def triangle_exp_integral(tri, a, b):
    """∫ exp(-(<a, x> + b)) over a triangle via scipy dblquad on the unit simplex."""
    p0, e1, e2 = tri[0], tri[1] - tri[0], tri[2] - tri[0]
    jac = abs(e1[0] * e2[1] - e1[1] * e2[0])
    f = lambda t, s: math.exp(-(a @ (p0 + s * e1 + t * e2) + b))
    return jac * dblquad(f, 0, 1, 0, lambda s: 1 - s, epsabs=1e-14, epsrel=1e-13)[0]


def cellwise_oracle(u):
    total = 0.0
    for c in u.cells:
        if not c.full_dim:
            continue
        R = c.body.vertices[c.body.ring()]
        for i in range(1, len(R) - 1):
            total += triangle_exp_integral(np.array([R[0], R[i], R[i + 1]]), c.slope, c.offset)
    return total


def test_exp_min_cases():
    rng = np.random.default_rng(23)
    K = centered_polygon(rng)
    assert fv.exp_min(fc.indicator(K)) == 1
    assert fv.exp_min(fc.gauge(K)) == pytest.approx(1)
    u = random_convex(rng)
    assert fv.exp_min(fc.vertical_shift(u, 0.7)) == pytest.approx(math.exp(-0.7) * fv.exp_min(u))


def test_exp_integral_gauge_and_indicator():
    rng = np.random.default_rng(24)
    K = centered_polygon(rng)
    for t in (-1.0, 0.0, 1.0):
        val = fv.exp_integral(fc.vertical_shift(fc.gauge(K), t))
        assert val == pytest.approx(math.exp(-t) * 2 * gc.volume(K), rel=1e-12)
    assert fv.exp_integral(fc.indicator(K)) == pytest.approx(gc.volume(K), rel=1e-12)
    g1 = fc.gauge(gc.hull([[-1.0], [1.0]]))
    assert fv.exp_integral(g1) == pytest.approx(quad(lambda x: math.exp(-abs(x)), -50, 50, points=[0])[0])


def test_exp_integral_routes_against_quadrature():
    rng = np.random.default_rng(25)
    for _ in range(3):
        u = random_convex(rng)
        oracle = cellwise_oracle(u)
        assert fv.exp_integral(u) == pytest.approx(oracle, rel=1e-10)
        assert fv.exp_integral(u, route="cells") == pytest.approx(oracle, rel=1e-10)


def test_exp_integral_three_dimensional_gauge():
    K = gc.hull(np.random.default_rng(26).normal(size=(10, 3)))
    K = gc.translate(K, -gc.vertex_centroid(K))
    assert fv.exp_integral(fc.gauge(K)) == pytest.approx(6 * gc.volume(K), rel=1e-12)


def test_exp_integral_monotone_continuity():
    u = random_convex(np.random.default_rng(27))
    base = fv.exp_integral(u)
    for k in (1, 2, 5, 10):
        assert abs(fv.exp_integral(fc.vertical_shift(u, 1 / k)) - base) <= (math.exp(1 / k) - 1) * base


def test_grad_valuation_reductions():
    rng = np.random.default_rng(28)
    zeta = tent()
    for _ in range(10):
        K = gc.hull(rng.normal(size=(6, 2)))
        y = rng.uniform(-2, 2, size=2)
        assert fv.grad_valuation(fc.linear_plus_indicator(y, K), zeta) == pytest.approx(zeta(y) * gc.volume(K), abs=1e-14)
        assert fv.grad_valuation(fc.indicator(K), zeta) == pytest.approx(zeta(np.zeros(2)) * gc.volume(K))


def test_grad_valuation_epi_scaling():
    rng = np.random.default_rng(29)
    zeta = tent()
    u = random_convex(rng)
    base = fv.grad_valuation(u, zeta)
    for lam in (0.5, 2.0, 3.0):
        assert abs(fv.grad_valuation(fc.epi_scale(lam, u), zeta) - lam**2 * base) <= 1e-10 * max(1, abs(base))


def test_grad_valuation_needs_super_coercivity():
    g = fc.gauge(gc.regular_polygon(6))
    with pytest.raises(NotSuperCoercive):
        fv.grad_valuation(g, lambda Y: np.ones(len(Y)))


def test_monge_ampere_cases():
    rng = np.random.default_rng(30)
    K = gc.hull(rng.normal(size=(7, 2)))
    h = fc.MaxAffineFunc(K.vertices, np.zeros(len(K.vertices)))
    mu = fv.monge_ampere(h)
    assert len(mu.masses) == 1 and np.allclose(mu.points[0], 0, atol=1e-12)
    assert mu.total_mass == pytest.approx(gc.volume(K))
    hinge = fv.monge_ampere(fc.MaxAffineFunc([[0.0], [1.0]], [0.0, -1.0]))
    assert hinge.points.ravel() == pytest.approx([1.0]) and hinge.masses == pytest.approx([1.0])
    for _ in range(10):
        v = fc.MaxAffineFunc(rng.normal(size=(9, 2)), rng.normal(size=9))
        assert fv.monge_ampere(v).total_mass == pytest.approx(gc.volume(gc.hull(v.slopes)), rel=1e-12)


def test_monge_ampere_duality():
    rng = np.random.default_rng(31)
    zeta = tent()
    for _ in range(10):
        v = fc.MaxAffineFunc(rng.normal(size=(10, 2)), rng.normal(size=10))
        u = fc.conjugate(v)
        assert abs(fv.grad_valuation(u, zeta) - fv.monge_ampere(fc.conjugate(u)).integrate(zeta)) <= 1e-10


def test_epi_homog_components():
    rng = np.random.default_rng(32)
    zeta = tent()
    u = random_convex(rng)
    Z = fv.grad_family(zeta)
    comps = fv.epi_homog_components(Z, u)
    assert abs(comps[0]) < 1e-9 * abs(comps[2]) and abs(comps[1]) < 1e-9 * abs(comps[2])
    assert sum(comps) == pytest.approx(Z(u), rel=1e-12)
    const = fv.epi_homog_components(fv.FuncValuation(lambda u: 2.5), u)
    assert tuple(const) == pytest.approx((2.5, 0, 0), abs=1e-12)
    em = fv.epi_homog_components(fv.EXP_MIN, u)
    assert em.non_polynomial and sum(em) == pytest.approx(fv.exp_min(u), rel=1e-12)


def test_functional_intrinsic_indicator():
    rng = np.random.default_rng(33)
    alpha = fv.DensityFunc.halfline([0, 1, 2], [0.8, 0.3, 0.0])
    for n in (2, 3):
        K = gc.hull(rng.normal(size=(8, n)))
        got = fv.functional_intrinsic(fc.indicator(K), alpha, [0.0, 0.5, 1.0, 1.5, 2.0])
        V = iv.intrinsic_volumes(K).values
        assert np.allclose(got.values, 0.8 * np.array(V), rtol=1e-8)


def test_functional_steiner_radial_against_quadrature():
    alpha = fv.DensityFunc.halfline([0, 0.5, 1.5, 2.5], [1.0, 0.6, 0.4, 0.0])
    u = fc.RadialQuadratic(2)
    fit = fv.functional_intrinsic(u, alpha, [0.0, 1.0, 2.0, 3.0])
    for r in (0.25, 0.7, 1.3, 2.6, 4.0):
        tail = quad(lambda t: float(alpha(t)) * (t + r), 0, 2.5, points=[0.5, 1.5], epsabs=1e-14)[0]
        oracle = float(alpha(0.0)) * math.pi * r * r + 2 * math.pi * tail
        assert abs(fit.predict(r) - oracle) <= 1e-6


def test_functional_intrinsic_errors():
    alpha = fv.DensityFunc.halfline([0, 1], [1.0, 0.0])
    with pytest.raises(InsufficientNodes):
        fv.functional_intrinsic(fc.RadialQuadratic(2), alpha, [0.0, 1.0, 1.0, 0.0])
    with pytest.raises(ValidationError):
        fv.DensityFunc.halfline([0, 1], [1.0, 0.5])


def test_vertical_shift_law():
    rng = np.random.default_rng(34)
    g = fc.gauge(centered_polygon(rng))
    assert fv.vertical_shift_check(fv.EXP_INTEGRAL, g, [-1, 0, 1]) < 1e-10
    assert fv.vertical_shift_check(fv.EXP_MIN, g, [-1, 0, 1]) == pytest.approx(0, abs=1e-15)
    u = random_convex(rng)
    Zg = fv.grad_family(tent())
    assert fv.vertical_shift_check(Zg, u, [1.0]) == pytest.approx((1 - math.exp(-1)) * abs(Zg(u)), rel=1e-12)


def test_function_valuation_harness():
    rng = np.random.default_rng(35)
    K = gc.hull(rng.normal(size=(8, 2)))
    w = fc.linear_plus_indicator([0.3, -0.2], K)
    p = fc.split_pair(w, np.array([1.0, 0.0]), float(gc.vertex_centroid(K)[0]))
    assert fv.function_valuation_check(fv.EXP_INTEGRAL, p.u, p.v).residual < 1e-10
    assert fv.function_valuation_check(fv.EXP_MIN, p.u, p.v).residual == pytest.approx(0, abs=1e-15)
    sq = fv.FuncValuation(lambda u: fv.exp_integral(u) ** 2)
    assert fv.function_valuation_check(sq, p.u, p.v).residual > 1e-3


def test_density_grid_interpolation_is_exact_for_affine_data():
    ax = np.linspace(-2, 2, 9)
    f = lambda Y: 1.0 + 0.3 * Y[:, 0] - 0.2 * Y[:, 1]
    d = fv.DensityFunc.tabulate(f, [ax, ax])
    X = np.random.default_rng(36).uniform(-1.5, 1.5, size=(100, 2))
    assert np.allclose(d(X), f(X), atol=1e-14)
    assert d(np.array([5.0, 0.0])) == 0
