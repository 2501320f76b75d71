"""Planar affine surface area (affine length).

A body is described by its support function h(θ) with derivatives; the
boundary point with outer normal u(θ) = (cos θ, sin θ) is
x(θ) = h u + h' u⊥ and the radius of curvature is ρ = h + h''.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonConvexSupport, OriginNotInterior, ParallelTangents, ValidationError


@dataclass(frozen=True, eq=False)
class SmoothBody2:
    """Support function h with first and second derivatives, vectorised in θ."""

    h: Callable
    dh: Callable
    d2h: Callable
    spec: tuple | None = None
    smooth: bool = True

    def radius_of_curvature(self, theta):
        return self.h(theta) + self.d2h(theta)

    def boundary_point(self, theta, side=0):
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta), np.sin(theta)
        h, d = self.h(theta), self.dh(theta)
        return np.stack([h * c - d * s, h * s + d * c], axis=-1)

    def origin_interior(self, m=512):
        return bool(np.min(self.h(_nodes(m))) > 0)


def _nodes(m):
    return 2 * np.pi * np.arange(m) / m


def ellipse(a, b, center=(0.0, 0.0)):
    """Ellipse with semi-axes a (along x) and b, translated by center."""
    if a <= 0 or b <= 0:
        raise ValidationError("ellipse", "semi-axes must be positive")
    cx, cy = center

    def h(t):
        return np.sqrt(a * a * np.cos(t) ** 2 + b * b * np.sin(t) ** 2) + cx * np.cos(t) + cy * np.sin(t)

    def dh(t):
        q = np.sqrt(a * a * np.cos(t) ** 2 + b * b * np.sin(t) ** 2)
        return (b * b - a * a) * np.sin(t) * np.cos(t) / q - cx * np.sin(t) + cy * np.cos(t)

    def d2h(t):
        c, s = np.cos(t), np.sin(t)
        q = np.sqrt(a * a * c * c + b * b * s * s)
        k = b * b - a * a
        return k * (c * c - s * s) / q - (k * s * c) ** 2 / q**3 - cx * c - cy * s

    return SmoothBody2(h, dh, d2h, ("ellipse", float(a), float(b), float(cx), float(cy)))


def circle(r=1.0, center=(0.0, 0.0)):
    return ellipse(r, r, center)


def fourier_body(a0, cos_coeffs=(), sin_coeffs=()):
    """h(θ) = a0 + sum_k a_k cos kθ + b_k sin kθ, k >= 1."""
    A = np.asarray(cos_coeffs, dtype=float)
    B = np.asarray(sin_coeffs, dtype=float)
    K = max(len(A), len(B))
    A = np.pad(A, (0, K - len(A)))
    B = np.pad(B, (0, K - len(B)))
    k = np.arange(1, K + 1)

    def terms(t, p):
        t = np.asarray(t, dtype=float)[..., None]
        c, s = np.cos(k * t), np.sin(k * t)
        if p == 0:
            return (A * c + B * s).sum(-1)
        if p == 1:
            return (k * (-A * s + B * c)).sum(-1)
        return (-(k**2) * (A * c + B * s)).sum(-1)

    return SmoothBody2(
        lambda t: a0 + terms(t, 0),
        lambda t: terms(t, 1),
        lambda t: terms(t, 2),
        ("fourier", float(a0), tuple(A.tolist()), tuple(B.tolist())),
    )


def polygon_body(vertices):
    """Support function of a convex polygon; h + h'' vanishes off the edge normals."""
    V = np.asarray(vertices, dtype=float)

    def pick(t, side=0):
        t = np.asarray(t, dtype=float)
        U = np.stack([np.cos(t), np.sin(t)], axis=-1)
        W = np.stack([-np.sin(t), np.cos(t)], axis=-1)
        vals = U @ V.T
        top = vals.max(axis=-1, keepdims=True)
        tie = vals >= top - 1e-12
        if side:
            # one-sided limit: among maximisers take the extreme one along ±u⊥
            key = np.where(tie, side * (W @ V.T), -np.inf)
            w = (key == key.max(axis=-1, keepdims=True)).astype(float)
        else:
            # at an edge normal both endpoints are maximal; use their midpoint
            w = tie.astype(float)
        P = (w @ V) / w.sum(axis=-1, keepdims=True)
        return U, W, P

    def h(t):
        U, _, P = pick(t)
        return (U * P).sum(-1)

    def dh(t):
        _, W, P = pick(t)
        return (W * P).sum(-1)

    return PolygonBody2(h, dh, lambda t: -h(t), ("polygon", tuple(map(tuple, V.tolist()))),
                        smooth=False, pick=pick)


@dataclass(frozen=True, eq=False)
class PolygonBody2(SmoothBody2):
    pick: Callable = None

    def boundary_point(self, theta, side=0):
        return self.pick(theta, side)[2]


def sl2_transform(K, A, m=1024):
    """Image of K under x -> A x (det A = 1 not required), refitted as a
    trigonometric polynomial.

    The support point of AK with normal u is A x(θ*) where u(θ*) is parallel
    to A^T u, so h_AK(φ) = <A x(θ*(φ)), u(φ)>.
    """
    A = np.asarray(A, dtype=float)
    phi = _nodes(m)
    U = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    W = U @ A
    theta = np.arctan2(W[:, 1], W[:, 0])
    X = K.boundary_point(theta) @ A.T
    hv = (X * U).sum(-1)
    c = np.fft.rfft(hv) / m
    K_max = m // 2 - 1
    a0 = c[0].real
    ak = 2 * c[1 : K_max + 1].real
    bk = -2 * c[1 : K_max + 1].imag
    return fourier_body(a0, ak, bk)


# --------------------------------------------------------------- triangles


@dataclass(frozen=True)
class SupportTriangle:
    x: np.ndarray
    y: np.ndarray
    apex: np.ndarray
    area: float


def support_triangle(K, theta1, theta2):
    """Triangle bounded by the tangent lines at x(θ1), x(θ2) and their chord."""
    d = math.sin(theta2 - theta1)
    if abs(d) < 1e-14:
        raise ParallelTangents(f"θ1 = {theta1}, θ2 = {theta2}")
    x, y = K.boundary_point(theta1), K.boundary_point(theta2)
    u1 = np.array([math.cos(theta1), math.sin(theta1)])
    u2 = np.array([math.cos(theta2), math.sin(theta2)])
    apex = np.linalg.solve(np.array([u1, u2]), np.array([u1 @ x, u2 @ y]))
    e, f = y - x, apex - x
    return SupportTriangle(x, y, apex, 0.5 * abs(e[0] * f[1] - e[1] * f[0]))


def _triangle_areas(K, theta):
    """Areas of consecutive support triangles for increasing angles theta."""
    t1, t2 = theta, np.roll(theta, -1)
    X, Y = K.boundary_point(t1, side=1), K.boundary_point(t2, side=-1)
    d = np.sin(t2 - t1)
    if np.any(np.abs(d) < 1e-14):
        raise ParallelTangents("consecutive parameters are antipodal")
    c1, s1, c2, s2 = np.cos(t1), np.sin(t1), np.cos(t2), np.sin(t2)
    r1 = c1 * X[:, 0] + s1 * X[:, 1]
    r2 = c2 * Y[:, 0] + s2 * Y[:, 1]
    ax = (r1 * s2 - r2 * s1) / d
    ay = (c1 * r2 - c2 * r1) / d
    e0, e1 = Y[:, 0] - X[:, 0], Y[:, 1] - X[:, 1]
    f0, f1 = ax - X[:, 0], ay - X[:, 1]
    return 0.5 * np.abs(e0 * f1 - e1 * f0)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def _triangle_areas_smooth(K, theta):
    """Same areas from the curvature radius, free of cancellation.

    With Δ = θ2 - θ1 the tangent segments from x(θ1), x(θ2) to the apex are
    s1 = ∫ ρ(φ) sin(θ2 - φ) dφ / sin Δ and s2 = ∫ ρ(φ) sin(φ - θ1) dφ / sin Δ
    over [θ1, θ2], and the area is s1 s2 sin Δ / 2.
    """
    t1 = theta
    t2 = np.roll(theta, -1)
    t2 = np.where(t2 <= t1, t2 + 2 * np.pi, t2)
    half = 0.5 * (t2 - t1)
    phi = (t1 + half)[:, None] + half[:, None] * _GL_X[None, :]
    rho = K.radius_of_curvature(phi)
    w = half[:, None] * _GL_W[None, :] * rho
    i1 = np.sum(w * np.sin(t2[:, None] - phi), axis=1)
    i2 = np.sum(w * np.sin(phi - t1[:, None]), axis=1)
    d = np.sin(t2 - t1)
    if np.any(np.abs(d) < 1e-14):
        raise ParallelTangents("consecutive parameters are antipodal")
    return 0.5 * i1 * i2 / d


@dataclass(frozen=True)
class SubdivisionResult:
    estimate: float
    trace: tuple  # estimate per level, level k uses 4 * 2^k triangles


def affine_length_subdivision(K, depth, phase=0.0):
    """Sum of (8 area(T_j))^(1/3) over dyadic support-triangle subdivisions."""
    if depth < 1:
        raise ValidationError("affine_length_subdivision", "depth >= 1")
    trace = []
    for k in range(depth + 1):
        m = 4 * 2**k
        t = phase + _nodes(m)
        areas = _triangle_areas_smooth(K, t) if K.smooth else _triangle_areas(K, t)
        trace.append(math.fsum(np.cbrt(8.0 * areas)))
    return SubdivisionResult(trace[-1], tuple(trace))


def _rho(K, m):
    t = _nodes(m)
    rho = K.radius_of_curvature(t)
    if np.any(rho <= 0):
        raise NonConvexSupport("h + h'' <= 0 at a quadrature node")
    return t, rho


def affine_surface_area_smooth(K, m=512):
    """∫ (h + h'')^(2/3) dθ by the periodic trapezoid rule."""
    _, rho = _rho(K, m)
    return float(2 * np.pi / m * np.sum(rho ** (2.0 / 3.0)))


def orlicz_asa(K, zeta, m=512):
    """∫ ζ(κ0) dV_K with κ0 = κ / h^3 and dV_K = h ρ dθ."""
    t, rho = _rho(K, m)
    h = K.h(t)
    if np.any(h <= 0):
        raise OriginNotInterior("support function must be positive")
    k0 = 1.0 / (rho * h**3)
    vals = np.array([zeta(v) for v in k0]) if not _vectorised(zeta) else zeta(k0)
    return float(2 * np.pi / m * np.sum(vals * h * rho))


def _vectorised(f):
    try:
        out = f(np.array([1.0, 2.0]))
        return np.shape(out) == (2,)
    except Exception:
        return False


def perimeter(K, m=512):
    """∫ h dθ (Cauchy)."""
    return float(2 * np.pi / m * np.sum(K.h(_nodes(m))))


def area(K, m=512):
    t = _nodes(m)
    return float(np.pi / m * np.sum(K.h(t) * K.radius_of_curvature(t)))


@dataclass(frozen=True)
class JensenCheck:
    lhs: float
    rhs: float
    holds: bool

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.holds))


def asa_upper_bound_check(K, m=512):
    """Ω(K) <= (2 κ_2)^(1/3) perimeter^(2/3)."""
    lhs = affine_surface_area_smooth(K, m)
    rhs = (2 * math.pi) ** (1 / 3) * perimeter(K, m) ** (2 / 3)
    return JensenCheck(lhs, rhs, lhs <= rhs + 1e-9)
