"""Acceptance criteria: one PASS/FAIL line per criterion.

Run under pytest or directly with ``python tests/test_acceptance.py``.
"""

import itertools
import math
import sys
import time

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import linprog

from vallab import cli_io as cli
from vallab import dehn as dh
from vallab import affine_sa as asa
from vallab import fconv_core as fc
from vallab import fval as fv
from vallab import geom_core as gc
from vallab import intrinsic as iv


@pytest.fixture
def say(capsys):
    def emit(text):
        with capsys.disabled():
            print(text)
    return emit


class Verdict:
    """Collects sub-checks of one criterion and prints a single line."""

    def __init__(self, say, number, title, limit):
        self.say, self.number, self.title, self.limit = say, number, title, limit
        self.failures = []
        self.start = time.perf_counter()

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def close(self, detail):
        elapsed = time.perf_counter() - self.start
        self.check(elapsed < self.limit, f"took {elapsed:.2f} s, limit {self.limit} s")
        status = "PASS" if not self.failures else "FAIL"
        extra = "" if not self.failures else " | " + "; ".join(self.failures[:3])
        self.say(f"{status} criterion {self.number:2d}: {self.title} | {detail} | {elapsed:.2f} s{extra}")
        assert not self.failures, self.failures


def elementary(s):
    return [sum(math.prod(c) for c in itertools.combinations(s, j)) for j in range(len(s) + 1)]


def uniform_in_simplex(S, m, rng):
    V = S.vertices
    return V[0] + rng.dirichlet(np.ones(len(V)), m) @ (V - V[0])


def random_simplex(rng, n):
    while True:
        P = rng.normal(size=(n + 1, n))
        vol = abs(np.linalg.det(P[1:] - P[0])) / math.factorial(n)
        if vol > 0.05:
            return gc.simplex(P)


def centered_polygon(rng, k=8):
    P = gc.hull(rng.normal(size=(k, 2)))
    return gc.translate(P, -gc.vertex_centroid(P))


def tent_density(radius=3.0, res=61):
    ax = np.linspace(-radius, radius, res)
    return fv.DensityFunc.tabulate(lambda Y: np.maximum(0, 1 - np.linalg.norm(Y, axis=1) / radius), [ax, ax])


def sup_enumeration(v, x):
    """v*(x) = sup_y <x, y> - v(y), as the dual LP over convex combinations of slopes."""
    Y, c = v.slopes, v.offsets
    res = linprog(-c, A_eq=np.vstack([Y.T, np.ones(len(Y))]), b_eq=np.append(x, 1.0),
                  bounds=[(0, None)] * len(Y), method="highs")
    return res.fun if res.status == 0 else np.inf


def conjugate_by_enumeration(v):
    """u = v* as a cell complex, with the value at every cell vertex taken from the LP."""
    u = fc.conjugate(v)
    worst = 0.0
    for c in u.cells:
        for x in c.vertices:
            worst = max(worst, abs(float(c.value(x)) - sup_enumeration(v, x)))
    return u, worst


def test_c01_intrinsic_volumes_of_boxes(say):
    V = Verdict(say, 1, "box intrinsic volumes and Steiner bound", 5.0)
    rng = np.random.default_rng(101)
    worst_v, worst_s = 0.0, -np.inf
    for n in (2, 3):
        ball_k = 256 if n == 2 else 200
        for _ in range(5):
            s = rng.uniform(0.2, 2.0, n)
            P = gc.hull(list(itertools.product(*[(0.0, x) for x in s])))
            got = iv.intrinsic_volumes(P).values
            want = elementary(s)
            worst_v = max(worst_v, max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(got, want)))
            for r in (0.1, 0.5, 1.0):
                ball = gc.ball_polytope(n, r, ball_k)
                direct = gc.volume(gc.minkowski_sum(P, ball.polytope))
                gap = abs(direct - iv.steiner_volume(P, r)) - iv.steiner_error_bound(P, r, ball)
                worst_s = max(worst_s, gap)
                V.check(gap <= 0, f"n={n} r={r}: Steiner gap exceeds bound by {gap:.3g}")
    V.check(worst_v <= 1e-12, f"V_j differ from e_j by {worst_v:.3g}")
    V.close(f"max rel V_j error {worst_v:.2e}, max (|diff| - bound) {worst_s:.2e}")


def test_c02_canonical_decomposition(say):
    V = Verdict(say, 2, "canonical simplex decomposition", 10.0)
    rng = np.random.default_rng(102)
    worst_vol, bad_pts, total_pts = 0.0, 0, 0
    for k in range(100):
        n = 2 + k % 2
        S = random_simplex(rng, n)
        vol = gc.volume(S)
        X = uniform_in_simplex(S, 10_000, rng)
        for t in (0.25, 0.5, 0.75):
            pieces = iv.canonical_simplex_decomposition(S, t)
            worst_vol = max(worst_vol, abs(math.fsum(gc.volume(p.body) for p in pieces) - vol),
                            abs(math.fsum(p.volume for p in pieces) - vol))
            count = np.zeros(len(X), dtype=int)
            for p in pieces:
                A, d = p.body.halfspaces()
                count += np.all(X @ A.T - d < 0, axis=1)
            bad_pts += int(np.count_nonzero(count != 1))
            total_pts += len(X)
    V.check(worst_vol <= 1e-12, f"volume sum off by {worst_vol:.3g}")
    V.check(bad_pts == 0, f"{bad_pts} sample points not in exactly one piece interior")
    V.close(f"max |sum - V(S)| {worst_vol:.2e}, {bad_pts}/{total_pts} bad points")


def test_c03_cylinder_decomposition(say):
    V = Verdict(say, 3, "cylinder decomposition multiplicities", 5.0)
    rng = np.random.default_rng(103)
    worst = 0.0
    for n in (1, 2, 3):
        S = random_simplex(rng, n)
        vol = gc.volume(S)
        for m in range(1, 6):
            pieces = iv.cylinder_decomposition(S, m)
            for p in pieces:
                V.check(p.multiplicity == math.comb(m, len(p.label)),
                        f"n={n} m={m} signature {p.label}: {p.multiplicity} != C({m},{len(p.label)})")
                V.check(len(p.translations) == p.multiplicity, f"translations of {p.label} not materialised")
            target = m**n * vol
            worst = max(worst, abs(math.fsum(p.multiplicity * p.volume for p in pieces) - target),
                        abs(math.fsum(p.multiplicity * gc.volume(p.body) for p in pieces) - target))
    V.check(worst <= 1e-12, f"volume sum off by {worst:.3g}")
    V.close(f"max |sum mult*vol - m^n V| {worst:.2e}")


def test_c04_homogeneous_components(say):
    V = Verdict(say, 4, "homogeneous components of sum c_j V_j", 1.0)
    rng = np.random.default_rng(104)
    worst = 0.0
    for _ in range(20):
        P = gc.hull(rng.normal(size=(rng.integers(3, 12), 2)))
        c = rng.uniform(-2, 2, 3)
        comps = iv.homogeneous_components(iv.intrinsic_combination(c), P)
        want = c * np.array(iv.intrinsic_volumes(P).values)
        worst = max(worst, float(np.max(np.abs(np.array(comps) - want) / np.abs(want))))
    V.check(worst <= 1e-9, f"relative error {worst:.3g}")
    V.close(f"max relative error {worst:.2e}")


def test_c05_dehn_invariants(say):
    V = Verdict(say, 5, "Dehn invariants", 30.0)
    V.check(dh.dehn_symbol(dh.cube()).is_empty(), "cube symbol is not empty")
    r = dh.hilbert3_report(height_bound=10**4, precision=64)
    V.check(r.verdict.kind == "Distinct", f"cube vs tetrahedron gave {r.verdict.kind}")
    rng = np.random.default_rng(105)
    equal = 0
    for _ in range(20):
        P = gc.hull(rng.normal(size=(rng.integers(6, 12), 3)))
        nrm = rng.normal(size=3)
        nrm /= np.linalg.norm(nrm)
        off = float(nrm @ gc.vertex_centroid(P) + 0.2 * rng.normal())
        plus, minus = gc.split_by_hyperplane(P, gc.Hyperplane.from_normal(nrm, off))
        joined = dh.dehn_symbol(plus) + dh.dehn_symbol(minus)
        kind = dh.symbol_equal(joined, dh.dehn_symbol(P)).kind
        equal += kind == "Equal"
        V.check(kind == "Equal", f"split additivity gave {kind}")
    V.close(f"cube empty, cube vs tetra {r.verdict.kind}, split additivity {equal}/20")


def test_c06_kinematic_monte_carlo(say):
    V = Verdict(say, 6, "principal kinematic formula by Monte Carlo", 60.0)
    sq = gc.box([0, 0], [1, 1])
    target = 2 + 8 / math.pi
    est = iv.kinematic_integral_mc(sq, sq, 10**7, seed=106)
    rel = abs(est.estimate - target) / target
    z = abs(est.estimate - target) / est.stderr
    V.check(rel <= 0.01, f"relative error {rel:.3g}")
    V.check(z <= 3, f"{z:.2f} standard errors")
    V.close(f"estimate {est.estimate:.5f} vs {target:.5f}, rel {rel:.2e}, {z:.2f} SE")


def test_c07_affine_length(say):
    V = Verdict(say, 7, "affine length by support-triangle subdivision", 10.0)
    circ = asa.affine_length_subdivision(asa.circle(), 12)
    e_c = abs(circ.estimate - 2 * math.pi)
    V.check(e_c <= 1e-6, f"circle error {e_c:.3g}")
    V.check(all(b < a for a, b in zip(circ.trace, circ.trace[1:])), "circle trace not strictly decreasing")
    ell = asa.affine_length_subdivision(asa.ellipse(2, 1), 12)
    e_e = abs(ell.estimate - 2 * math.pi * 2 ** (1 / 3))
    V.check(e_e <= 1e-5, f"ellipse error {e_e:.3g}")
    lhs, rhs, _ = asa.asa_upper_bound_check(asa.circle())
    V.check(abs(lhs - rhs) <= 1e-9, f"Jensen equality off by {abs(lhs - rhs):.3g}")
    V.close(f"circle err {e_c:.2e}, ellipse err {e_e:.2e}, Jensen gap {abs(lhs - rhs):.2e}")


def test_c08_gauge_integral(say):
    V = Verdict(say, 8, "exp integral of gauge functions", 10.0)
    rng = np.random.default_rng(108)
    worst = {"layercake": 0.0, "cells": 0.0}
    for _ in range(50):
        K = centered_polygon(rng, rng.integers(3, 12))
        g = fc.gauge(K)
        area = gc.volume(K)
        for t in (-1.0, 0.0, 1.0):
            want = math.exp(-t) * 2 * area
            for route in worst:
                got = fv.exp_integral(fc.vertical_shift(g, t), route=route)
                worst[route] = max(worst[route], abs(got - want) / want)
    for route, w in worst.items():
        V.check(w <= 1e-8, f"{route} route relative error {w:.3g}")
    V.close(f"max rel error layercake {worst['layercake']:.2e}, cells {worst['cells']:.2e}")


def test_c09_function_valuations(say):
    V = Verdict(say, 9, "valuation property on split pairs", 20.0)
    pairs = cli.random_split_pairs(100, 109)
    family = {"exp_min": fv.EXP_MIN, "exp_integral": fv.EXP_INTEGRAL, "grad": fv.grad_family(tent_density())}
    worst = {}
    for name, Z in family.items():
        worst[name] = max(fv.function_valuation_check(Z, p.u, p.v).residual for p in pairs)
        V.check(worst[name] < 1e-8, f"{name} residual {worst[name]:.3g}")
    sq = fv.FuncValuation(lambda u: fv.exp_integral(u) ** 2, name="squared")
    flagged, informative = 0, 0
    for p in pairs:
        # on a comparable pair max and min are u and v themselves, so no functional can fail
        zu, zv, zmax, zmin = fv.function_valuation_check(fv.EXP_INTEGRAL, p.u, p.v).values
        # the integral is decreasing, so on such a pair Z(max) is the smaller value
        if math.isclose(zmax, min(zu, zv), rel_tol=1e-12) and math.isclose(zmin, max(zu, zv), rel_tol=1e-12):
            continue
        informative += 1
        flagged += fv.function_valuation_check(sq, p.u, p.v).residual > 1e-8
    V.check(informative > 0 and flagged == informative,
            f"squared integral passed on {informative - flagged} non-comparable pairs")
    V.close(", ".join(f"{k} {v:.1e}" for k, v in worst.items())
            + f", squared flagged on {flagged}/{informative} non-comparable pairs")


def test_c10_grad_reduction(say):
    V = Verdict(say, 10, "gradient valuation on linear-plus-indicator", 1.0)
    rng = np.random.default_rng(110)
    zeta = tent_density()
    mismatches = 0
    for _ in range(100):
        K = gc.hull(rng.normal(size=(rng.integers(3, 10), 2)))
        y = rng.uniform(-3, 3, 2)
        lhs = fv.grad_valuation(fc.linear_plus_indicator(y, K), zeta)
        rhs = zeta(y) * gc.volume(K)
        mismatches += lhs != rhs
    V.check(mismatches == 0, f"{mismatches} cases differ")
    V.close(f"{100 - mismatches}/100 exact matches")


def test_c11_monge_ampere_duality(say):
    V = Verdict(say, 11, "Monge-Ampere duality", 10.0)
    rng = np.random.default_rng(111)
    zeta = tent_density()
    worst, worst_oracle = 0.0, 0.0
    for _ in range(50):
        k = int(rng.integers(3, 13))
        w = fc.MaxAffineFunc(rng.normal(size=(k, 2)), rng.normal(size=k))
        u, err = conjugate_by_enumeration(w)
        worst_oracle = max(worst_oracle, err)
        v = fc.conjugate(u)
        lhs = fv.grad_valuation(u, zeta)
        rhs = fv.monge_ampere(v).integrate(zeta)
        worst = max(worst, abs(lhs - rhs))
    V.check(worst_oracle <= 1e-10, f"conjugate differs from enumeration by {worst_oracle:.3g}")
    V.check(worst <= 1e-10, f"duality residual {worst:.3g}")
    V.close(f"max |grad - int dMA| {worst:.2e}, conjugate vs enumeration {worst_oracle:.2e}")


def test_c12_epi_homogeneous_components(say):
    V = Verdict(say, 12, "epi-homogeneous components of the gradient valuation", 5.0)
    rng = np.random.default_rng(112)
    Z = fv.grad_family(tent_density())
    worst_off, worst_sum = 0.0, 0.0
    done = 0
    while done < 20:
        k = int(rng.integers(3, 10))
        u = fc.conjugate(fc.MaxAffineFunc(rng.normal(size=(k, 2)), rng.normal(size=k)))
        if Z(u) == 0:
            continue  # every gradient outside the support of zeta
        done += 1
        comps = fv.epi_homog_components(Z, u)
        top = abs(comps[2])
        worst_off = max(worst_off, max(abs(comps[0]), abs(comps[1])) / top)
        worst_sum = max(worst_sum, abs(sum(comps) - Z(u)) / max(1.0, abs(Z(u))))
    V.check(worst_off < 1e-9, f"off-degree ratio {worst_off:.3g}")
    V.check(worst_sum <= 1e-12, f"sum mismatch {worst_sum:.3g}")
    V.close(f"max |Z_i|/|Z_n| off-degree {worst_off:.2e}, max |sum - Z| {worst_sum:.2e}")


def test_c13_functional_steiner(say):
    V = Verdict(say, 13, "functional Steiner formula", 10.0)
    rng = np.random.default_rng(113)
    alpha = fv.DensityFunc.halfline([0, 0.4, 1.1, 2.0], [1.3, 0.9, 0.2, 0.0])
    worst_ind = 0.0
    for n in (2, 3):
        for _ in range(5):
            K = gc.hull(rng.normal(size=(8, n)))
            got = fv.functional_intrinsic(fc.indicator(K), alpha, [0.0, 0.5, 1.0, 1.5, 2.0]).values
            want = 1.3 * np.array(iv.intrinsic_volumes(K).values)
            worst_ind = max(worst_ind, float(np.max(np.abs(np.array(got) - want) / np.abs(want))))
    fit = fv.functional_intrinsic(fc.RadialQuadratic(2), alpha, [0.0, 1.0, 2.0, 3.0])
    worst_rad = 0.0
    for r in (0.3, 0.75, 1.6, 2.4, 5.0):
        tail = quad(lambda t: float(alpha(t)) * (t + r), 0, 2.0, points=[0.4, 1.1], epsabs=1e-13, epsrel=1e-12)[0]
        oracle = 1.3 * math.pi * r * r + 2 * math.pi * tail
        worst_rad = max(worst_rad, abs(fit.predict(r) - oracle))
    V.check(worst_ind <= 1e-8, f"indicator coefficients off by {worst_ind:.3g}")
    V.check(worst_rad <= 1e-6, f"radial held-out error {worst_rad:.3g}")
    V.close(f"indicator rel error {worst_ind:.2e}, radial held-out abs error {worst_rad:.2e}")


def test_c14_involution_and_epi_addition(say):
    V = Verdict(say, 14, "conjugate involution and epi-addition", 5.0)
    rng = np.random.default_rng(114)
    worst_inv = 0.0
    for _ in range(5):
        k = int(rng.integers(3, 10))
        u = fc.conjugate(fc.MaxAffineFunc(rng.normal(size=(k, 2)), rng.normal(size=k)))
        uu = fc.conjugate(fc.conjugate(u))
        X = rng.normal(size=(100, 2))
        a, b = fc.evaluate(u, X), fc.evaluate(uu, X)
        fin = np.isfinite(a)
        V.check(np.array_equal(fin, np.isfinite(b)), "domains differ")
        worst_inv = max(worst_inv, float(np.max(np.abs(a[fin] - b[fin]), initial=0.0)))
    worst_sum = 0.0
    for _ in range(5):
        K, L = gc.hull(rng.normal(size=(6, 2))), gc.hull(rng.normal(size=(7, 2)))
        w = fc.inf_conv(fc.indicator(K), fc.indicator(L))
        S = gc.minkowski_sum(K, L)
        dom = gc.hull(np.vstack([c.vertices for c in w.cells]))
        worst_sum = max(worst_sum, gc.hausdorff_distance(dom, S))
        vals = np.concatenate([c.value(c.vertices) for c in w.cells])
        V.check(np.max(np.abs(vals)) <= 1e-10, "epi-sum of indicators is not 0 on its domain")
    V.check(worst_inv <= 1e-10, f"involution residual {worst_inv:.3g}")
    V.check(worst_sum <= 1e-10, f"domain differs from Minkowski sum by {worst_sum:.3g}")
    V.close(f"max |u** - u| {worst_inv:.2e}, Hausdorff(dom, K+L) {worst_sum:.2e}")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn(print)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
