import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vallab import geom_core as gc
from vallab.errors import DimensionMismatch, EmptyBodyError, InvalidRotation, ValidationError


def shoelace(ring):
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def brute_hull_vertices(P):
    """Points p with some neighbour q such that every other point lies strictly left of pq."""
    out = set()
    for i, p in enumerate(P):
        for j, q in enumerate(P):
            if i == j:
                continue
            d = q - p
            cross = d[0] * (P[:, 1] - p[1]) - d[1] * (P[:, 0] - p[0])
            cross[[i, j]] = 1.0
            if np.all(cross > 0):
                out.add(i)
                out.add(j)
    return out


def random_polygon(rng, k=12):
    return gc.hull(rng.normal(size=(k, 2)))


def test_hull_drops_interior_point():
    P = gc.hull([(0, 0), (1, 0), (0, 1), (0.2, 0.2)])
    assert len(P.vertices) == 3


def test_standard_simplex_has_four_facets():
    P = gc.hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert len(P.facets) == 4


def test_hull_against_pairwise_orientation_oracle():
    rng = np.random.default_rng(1)
    r = np.sqrt(rng.uniform(size=100))
    t = rng.uniform(0, 2 * np.pi, 100)
    pts = np.column_stack([r * np.cos(t), r * np.sin(t)])
    P = gc.hull(pts)
    idx = {int(np.argmin(np.linalg.norm(pts - v, axis=1))) for v in P.vertices}
    assert all(np.min(np.linalg.norm(pts - v, axis=1)) == 0 for v in P.vertices)
    assert idx == brute_hull_vertices(pts)
    assert gc.volume(P) <= math.pi


def test_hull_rejects_mixed_dimensions():
    with pytest.raises(DimensionMismatch):
        gc.hull([(0, 0), (1, 0, 0)])
    with pytest.raises(ValidationError):
        gc.hull([])


def test_lower_dimensional_hulls():
    seg = gc.hull([(0, 0), (3, 4)])
    assert seg.affine_dim == 1 and gc.volume(seg) == 0
    pt = gc.hull([(1, 1, 1)])
    assert pt.affine_dim == 0


def test_volume_unit_cube_and_scaled_simplex():
    assert gc.volume(gc.box([0, 0, 0], [1, 1, 1])) == pytest.approx(1, abs=1e-15)
    for n in (2, 3, 4, 5):
        s = 0.37
        c = (s * math.factorial(n)) ** (1 / n)
        S = gc.simplex(np.vstack([np.zeros(n), c * np.eye(n)]))
        assert gc.volume(S) == pytest.approx(s, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_volume_matches_shoelace(seed):
    P = random_polygon(np.random.default_rng(seed))
    ring = P.vertices[P.ring()]
    assert abs(gc.volume(P) - shoelace(ring)) <= 1e-12 * max(1.0, shoelace(ring))


def test_support_values():
    sq = gc.box([0, 0], [1, 1])
    assert gc.support(sq, (1, 1)) == 2
    ball = gc.ball_polytope(2, 1.0, 256)
    assert abs(gc.support(ball.polytope, (0.6, 0.8)) - 1) <= 3e-4
    assert abs(1 - math.cos(math.pi / 256)) <= 3e-4
    rng = np.random.default_rng(2)
    P = random_polygon(rng)
    for y in rng.normal(size=(10, 2)):
        assert gc.support(P, y) + gc.support(P, -y) >= 0


def test_minkowski_sum_cases():
    sq = gc.box([0, 0], [1, 1])
    S = gc.minkowski_sum(gc.hull(sq.vertices), gc.hull(sq.vertices))
    assert gc.volume(S) == pytest.approx(4)
    pt = gc.hull([(2.0, -1.0)])
    T = gc.minkowski_sum(sq, pt)
    assert np.allclose(np.sort(T.vertices, axis=0), np.sort(gc.translate(sq, (2, -1)).vertices, axis=0))


def test_difference_body_support_additivity():
    rng = np.random.default_rng(3)
    T = gc.hull(rng.normal(size=(3, 2)))
    R = gc.scale(gc.hull(-T.vertices), 1.0)
    D = gc.minkowski_sum(T, R)
    assert len(D.vertices) == 6
    for y in rng.normal(size=(64, 2)):
        direct = np.max(T.vertices @ y) + np.max(R.vertices @ y)
        assert abs(gc.support(D, y) - direct) <= 1e-10


def test_split_unit_square():
    sq = gc.box([0, 0], [1, 1])
    h = gc.Hyperplane.from_normal((1, 0), 0.5)
    plus, minus = gc.split_by_hyperplane(sq, h)
    assert gc.volume(plus) == pytest.approx(0.5) and gc.volume(minus) == pytest.approx(0.5)
    far = gc.Hyperplane.from_normal((1, 0), -3)
    plus, minus = gc.split_by_hyperplane(sq, far)
    assert gc.is_empty(minus) and gc.volume(plus) == pytest.approx(1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_split_additivity_shoelace(seed):
    rng = np.random.default_rng(seed)
    P = random_polygon(rng)
    nrm = rng.normal(size=2)
    c = gc.vertex_centroid(P) + 0.3 * rng.normal(size=2)
    h = gc.Hyperplane.from_normal(nrm, float(nrm @ c) / np.linalg.norm(nrm))
    parts = [Q for Q in gc.split_by_hyperplane(P, h) if not gc.is_empty(Q)]
    total = sum(shoelace(Q.vertices[Q.ring()]) for Q in parts if Q.is_full_dim)
    whole = shoelace(P.vertices[P.ring()])
    assert abs(total - whole) <= 1e-12 * max(1.0, whole)


def test_hausdorff_distance_cases():
    rng = np.random.default_rng(4)
    P = random_polygon(rng)
    assert gc.hausdorff_distance(P, P) == 0
    B = gc.regular_polygon(64)
    assert gc.hausdorff_distance(B, gc.scale(B, 1.25)) == pytest.approx(0.25)
    eps = 0.1
    sq = gc.box([0, 0], [1, 1])
    ball = gc.ball_polytope(2, eps, 256)
    par = gc.minkowski_sum(sq, ball.polytope)
    U = gc.circle_directions(720)
    oracle = np.max(np.abs(np.max(U @ par.vertices.T, 1) - np.max(U @ sq.vertices.T, 1)))
    assert gc.hausdorff_distance(sq, par) == pytest.approx(oracle, abs=1e-6)
    assert abs(gc.hausdorff_distance(sq, par) - eps) <= ball.error_bound + 1e-12


def test_rotational_means_of_segment_approach_ball():
    L = 2.0
    seg = gc.hull([(-L / 2, 0), (L / 2, 0)])
    U = gc.circle_directions(360)
    K = gc.sample_support(seg, U)
    target = gc.SampledBody(U, np.full(len(U), L / math.pi))
    rots = [2 * math.pi * i / 7 for i in range(7)]
    dists = [gc.hausdorff_distance(K, target)]
    for _ in range(4):
        K = gc.rotational_mean(K, [r + 0.1 for r in rots])
        dists.append(gc.hausdorff_distance(K, target))
    assert all(b < a for a, b in zip(dists, dists[1:]))


def test_rotational_mean_identity_and_square_symmetry():
    sq = gc.box([-0.5, -0.5], [1, 1])
    K = gc.sample_support(sq, gc.circle_directions(64))
    M = gc.rotational_mean(K, [0.0])
    assert np.allclose(M.support_values, K.support_values, atol=1e-12)
    M = gc.rotational_mean(K, [k * math.pi / 2 for k in range(4)])
    h = M.support_values
    assert np.allclose(h, np.roll(h, 16), atol=1e-12)
    assert np.allclose(h, h[(-np.arange(64)) % 64], atol=1e-12)


def test_invalid_rotation():
    with pytest.raises(InvalidRotation):
        gc.as_rotation(np.diag([1.0, -1.0]), 2)


def test_contains_and_empty():
    sq = gc.box([0, 0], [1, 1])
    assert gc.contains(sq, (0.5, 0.5)) and not gc.contains(sq, (2, 0))
    E = gc.EmptyBody(2)
    assert not gc.contains(E, (0, 0))
    with pytest.raises(EmptyBodyError):
        gc.support(E, (1, 0))


def test_box_family_via_hull_matches_corners():
    for n in (2, 3):
        s = np.array([0.5, 1.5, 2.0][:n])
        B = gc.box(np.zeros(n), s)
        corners = np.array(list(itertools.product(*[(0.0, x) for x in s])))
        assert gc.volume(B) == pytest.approx(np.prod(s))
        assert len(B.vertices) == len(corners)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(1.0, 0.0), (0.0, 1.0)]))
def test_axis_aligned_split_keeps_chord_endpoints(seed, nrm):
    P = random_polygon(np.random.default_rng(seed), 8)
    c = float(np.array(nrm) @ gc.vertex_centroid(P))
    h = gc.Hyperplane.from_normal(nrm, c)
    plus, minus = gc.split_by_hyperplane(P, h)
    chord = gc.section(P, h)
    for Q in (plus, minus):
        on = Q.vertices[np.abs(Q.vertices @ np.array(nrm) - c) < 1e-12]
        assert len(on) == 2
        assert gc.hausdorff_distance(gc.hull(on), chord) < 1e-12
