"""Valuations on convex functions.

exp(-min u), the integral of exp(-u), gradient valuations ∫ ζ(∇u), the
Monge-Ampère measure of max-affine functions, the epi-homogeneous
decomposition, functional intrinsic volumes via the functional Steiner
formula, and the structural checks used as a test harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import expm

from . import fconv_core as fc
from . import geom_core as gc
from .errors import (
    DimensionMismatch,
    InsufficientNodes,
    NotSuperCoercive,
    Unsupported,
    ValidationError,
)
from .intrinsic import kappa, parallel_volume

# ------------------------------------------------------------------ densities


@dataclass(frozen=True, eq=False)
class DensityFunc:
    """Continuous piecewise-linear density with compact support.

    on_halfline: breakpoints 0 = t_0 < ... < t_k with values, zero beyond t_k.
    on_Rn: values on a tensor grid (axes per coordinate) with zero border,
    interpolated on the Freudenthal triangulation of each grid box.
    """

    kind: str
    axes: tuple
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        if self.kind == "on_halfline":
            (t,) = axes
            if t[0] != 0 or np.any(np.diff(t) <= 0) or len(t) != len(vals):
                raise ValidationError("DensityFunc", "halfline breakpoints must start at 0 and increase")
            if vals[-1] != 0:
                raise ValidationError("DensityFunc", "density must vanish at the last breakpoint")
        elif self.kind == "on_Rn":
            if vals.shape != tuple(len(a) for a in axes):
                raise ValidationError("DensityFunc", "grid values do not match the axes")
            if any(np.any(np.diff(a) <= 0) for a in axes):
                raise ValidationError("DensityFunc", "grid axes must increase")
            border = np.ones(vals.shape, dtype=bool)
            border[tuple(slice(1, -1) for _ in axes)] = False
            if np.any(vals[border] != 0):
                raise ValidationError("DensityFunc", "grid density must vanish on the border")
        else:
            raise ValidationError("DensityFunc", f"unknown kind {self.kind!r}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self):
        return len(self.axes)

    @classmethod
    def halfline(cls, breakpoints, values):
        return cls("on_halfline", (breakpoints,), values)

    @classmethod
    def grid(cls, axes, values):
        return cls("on_Rn", tuple(axes), values)

    @classmethod
    def tabulate(cls, f, axes):
        """Grid density sampling f at interior nodes (border forced to 0)."""
        axes = [np.asarray(a, dtype=float) for a in axes]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        vals = np.asarray(f(mesh.reshape(-1, len(axes))), dtype=float).reshape(mesh.shape[:-1])
        border = np.ones(vals.shape, dtype=bool)
        border[tuple(slice(1, -1) for _ in axes)] = False
        vals[border] = 0.0
        return cls.grid(axes, vals)

    def __call__(self, x):
        if self.kind == "on_halfline":
            x = np.asarray(x, dtype=float)
            return np.interp(x, self.axes[0], self.values, left=np.nan, right=0.0)
        return self._grid_eval(x)

    def _grid_eval(self, x):
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.dim:
            raise DimensionMismatch("density and point dimensions differ")
        n = self.dim
        out = np.zeros(len(X))
        inside = np.all([(X[:, k] >= a[0]) & (X[:, k] <= a[-1]) for k, a in enumerate(self.axes)], axis=0)
        Xi = X[inside]
        idx = np.empty((len(Xi), n), dtype=int)
        frac = np.empty((len(Xi), n))
        for k, a in enumerate(self.axes):
            i = np.clip(np.searchsorted(a, Xi[:, k], side="right") - 1, 0, len(a) - 2)
            idx[:, k] = i
            frac[:, k] = (Xi[:, k] - a[i]) / (a[i + 1] - a[i])
        # Freudenthal simplex: walk from the lower corner, stepping the
        # coordinates in decreasing order of their fractional parts
        order = np.argsort(-frac, axis=1, kind="stable")
        f_sorted = np.take_along_axis(frac, order, axis=1)
        corner = idx.copy()
        val = self.values[tuple(corner.T)] * (1 - f_sorted[:, 0])
        for s in range(n):
            corner[np.arange(len(Xi)), order[:, s]] += 1
            w = f_sorted[:, s] - (f_sorted[:, s + 1] if s + 1 < n else 0.0)
            val = val + w * self.values[tuple(corner.T)]
        out[inside] = val
        return float(out[0]) if single else out


@dataclass(frozen=True)
class AtomicMeasure:
    points: np.ndarray
    masses: np.ndarray

    @property
    def atoms(self):
        return list(zip(self.points, self.masses))

    @property
    def total_mass(self):
        return float(np.sum(self.masses))

    def integrate(self, zeta):
        if len(self.masses) == 0:
            return 0.0
        return float(np.sum(np.atleast_1d(zeta(self.points)) * self.masses))


@dataclass(frozen=True, eq=False)
class FuncValuation:
    evaluate: Callable
    epi_translation_invariant: bool = False
    degree: int | None = None
    name: str = "Z"

    def __call__(self, u):
        return self.evaluate(u)


# ------------------------------------------------------------ exp valuations


def exp_min(u):
    """e^{-min u}."""
    return math.exp(-fc.min_value(u))


def exp_integral(u, route="layercake"):
    """∫ e^{-u(x)} dx.

    "layercake": ∫ V_n({u <= t}) e^{-t} dt with the piecewise-polynomial
    level volumes integrated in closed form between vertex values.
    "cells": per-cell closed forms (divided differences of exp on simplices,
    products of reciprocal growth rates on simplicial cones).
    """
    u = fc.as_polyhedral(u)
    fc.coercivity_witness(u)
    if route == "layercake":
        return _exp_integral_layercake(u)
    if route == "cells":
        return _exp_integral_cells(u)
    raise ValidationError("exp_integral", f"unknown route {route!r}")


def _clip_ring_area(R, s):
    """Area of the part of a counter-clockwise polygon R where s <= 0."""
    pts = []
    m = len(R)
    for i in range(m):
        j = (i + 1) % m
        if s[i] <= 0:
            pts.append(R[i])
        if (s[i] < 0 < s[j]) or (s[j] < 0 < s[i]):
            lam = s[i] / (s[i] - s[j])
            pts.append(R[i] + lam * (R[j] - R[i]))
    if len(pts) < 3:
        return 0.0
    P = np.array(pts)
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


class _LevelVolumes:
    """V_n({u <= t}) with per-cell shortcuts: whole cells below or above t
    need no clipping, and bounded planar cells are clipped in ring order."""

    def __init__(self, cells):
        self.cells = cells
        self.data = []
        for c in cells:
            vals = c.value(c.vertices)
            ring = None
            if c.bounded and c.dim == 2:
                order = c.body.ring()
                ring = (c.body.vertices[order], c.value(c.body.vertices[order]))
            vol = c.volume() if c.bounded else None
            self.data.append((vals.min(), vals.max(), vol, ring))

    def __call__(self, t):
        total = 0.0
        for c, (lo, hi, vol, ring) in zip(self.cells, self.data):
            if lo > t:
                continue
            if c.bounded and hi <= t:
                total += vol
            elif ring is not None:
                total += _clip_ring_area(ring[0], ring[1] - t)
            elif c.dim == 1 and c.bounded:
                x = c.vertices[:, 0]
                a, b = (x.min(), x.max())
                g = float(c.slope[0])
                cut = (t - c.offset) / g if g != 0 else np.inf
                total += max(0.0, min(b, cut) - a) if g > 0 else max(0.0, b - max(a, cut))
            else:
                total += gc.volume(fc.cell_sublevel(c, t))
        return total


def _poly_exp_integral(p, t0, length):
    """∫_{t0}^{t0+length} p(t - t0) e^{-t} dt; length may be inf."""
    # antiderivative of p(s) e^{-s} is -e^{-s} (p + p' + p'' + ...)
    P = np.polynomial.Polynomial(p)
    S = P.copy()
    D = P
    for _ in range(len(p)):
        D = D.deriv()
        S = S + D
    head = S(0.0)
    tail = 0.0 if math.isinf(length) else math.exp(-length) * S(length)
    return math.exp(-t0) * (head - tail)


def _exp_integral_layercake(u):
    n = u.dim
    cells = [c for c in u.cells if c.full_dim]
    if not cells:
        return 0.0
    brk = np.unique(np.concatenate([c.value(c.vertices) for c in cells]))
    # merge breakpoints closer than rounding noise
    brk = brk[np.concatenate([[True], np.diff(brk) > 1e-12 * (1 + np.abs(brk[1:]))])]
    level_volume = _LevelVolumes(cells)
    total = 0.0
    cheb = np.cos(np.pi * (np.arange(n + 1) + 0.5) / (n + 1))
    intervals = [(brk[i], brk[i + 1] - brk[i]) for i in range(len(brk) - 1)]
    intervals.append((brk[-1], math.inf))
    scale = max(1.0, float(brk[-1] - brk[0]))
    for t0, L in intervals:
        width = scale if math.isinf(L) else L
        s = 0.5 * width * (1 + cheb)
        vals = [level_volume(t0 + si) for si in s]
        p = np.polynomial.polynomial.polyfit(s, vals, n)
        total += _poly_exp_integral(p, t0, L)
    return total


def _divided_difference_exp(z):
    """exp[z_0, ..., z_n] as the corner entry of exp of a bidiagonal matrix."""
    m = len(z)
    M = np.diag(np.asarray(z, dtype=float)) + np.diag(np.ones(m - 1), 1)
    return float(expm(M)[0, -1])


def _simplices(body):
    """Triangulation of a full-dimensional polytope (n <= 3) into vertex arrays."""
    V = body.vertices
    n = body.dim
    if n == 1:
        return [V[[0, -1]]]
    if n == 2:
        R = V[body.ring()]
        return [np.array([R[0], R[i], R[i + 1]]) for i in range(1, len(R) - 1)]
    if n == 3:
        out = []
        for _, ix in body.facets:
            if 0 in ix:
                continue
            for j in range(1, len(ix) - 1):
                out.append(np.array([V[0], V[ix[0]], V[ix[j]], V[ix[j + 1]]]))
        return out
    raise Unsupported("cell triangulation for n <= 3")


def _simplicial_cones(c):
    """Split a pointed cone cell (one vertex) into simplicial cones."""
    n = c.dim
    R = c.rays
    if n == 1:
        return [R[:1]]
    if n == 2:
        ang = np.arctan2(R[:, 1], R[:, 0])
        mid = np.arctan2(R[:, 1].sum(), R[:, 0].sum())
        rel = (ang - mid + np.pi) % (2 * np.pi) - np.pi
        return [R[[int(np.argmin(rel)), int(np.argmax(rel))]]]
    if n == 3:
        # rays are listed counter-clockwise around the cone axis
        return [R[[0, j, j + 1]] for j in range(1, len(R) - 1)]
    raise Unsupported("cone triangulation for n <= 3")


def _exp_integral_cells(u):
    n = u.dim
    total = 0.0
    for c in u.cells:
        if not c.full_dim:
            continue
        if c.bounded:
            for S in _simplices(c.body):
                vol = abs(np.linalg.det(S[1:] - S[0])) / math.factorial(n)
                z = -(S @ c.slope + c.offset)
                total += math.factorial(n) * vol * _divided_difference_exp(z)
        elif len(c.vertices) == 1:
            p = c.vertices[0]
            base = math.exp(-float(c.value(p)))
            for R in _simplicial_cones(c):
                g = R @ c.slope
                total += base * abs(np.linalg.det(R)) / float(np.prod(g))
        else:
            raise Unsupported("cells route handles bounded cells and pointed cones only")
    return total


# ------------------------------------------------------------ gradient family


def grad_valuation(u, zeta):
    """∫_{dom u} ζ(∇u(x)) dx = Σ ζ(a_i) V_n(P_i) over full-dimensional cells."""
    u = fc.as_polyhedral(u)
    total = 0.0
    for c in u.cells:
        if not c.full_dim:
            continue
        z = float(np.atleast_1d(zeta(c.slope[None, :]))[0])
        if z == 0.0:
            continue
        if not c.bounded:
            raise NotSuperCoercive("unbounded cell with slope in the support of ζ")
        total += z * c.volume()
    return total


def _conv_volume(Y):
    n = Y.shape[1]
    if len(Y) <= n or fc._affine_rank(Y) < n:
        return 0.0
    return gc.volume(gc.hull(Y))


def monge_ampere(v, tol=1e-9):
    """Atoms at the vertices of the arrangement of a max-affine function.

    Vertices are found by solving for every n-tuple of piece differences;
    the mass of a vertex is the volume of the convex hull of the slopes of
    all pieces active there.
    """
    if not isinstance(v, fc.MaxAffineFunc):
        raise Unsupported("Monge-Ampère measure of max-affine functions")
    n = v.dim
    if n > 2:
        raise Unsupported("Monge-Ampère atoms for n <= 2")
    Y, c = v.slopes, v.offsets
    m = len(Y)
    pts = []
    for i in range(m):
        others = [j for j in range(m) if j != i]
        for combo in _combinations(others, n):
            A = Y[list(combo)] - Y[i]
            if abs(np.linalg.det(A)) < 1e-12:
                continue
            x = np.linalg.solve(A, c[i] - c[list(combo)])
            val = Y @ x + c
            if val.max() - (Y[i] @ x + c[i]) <= tol * (1 + abs(val.max())):
                pts.append(x)
    if not pts:
        return AtomicMeasure(np.zeros((0, n)), np.zeros(0))
    pts = np.array(pts)
    uniq = []
    for p in pts:
        if not any(np.linalg.norm(p - q) <= 1e-9 * (1 + np.linalg.norm(q)) for q in uniq):
            uniq.append(p)
    atoms, masses = [], []
    for x in uniq:
        val = Y @ x + c
        active = val >= val.max() - tol * (1 + abs(val.max()))
        mass = _conv_volume(Y[active])
        if mass > 0:
            atoms.append(x)
            masses.append(mass)
    return AtomicMeasure(np.array(atoms).reshape(-1, n), np.array(masses))


def _combinations(items, k):
    if k == 1:
        return [(a,) for a in items]
    return [(a, b) for i, a in enumerate(items) for b in items[i + 1:]]


# ------------------------------------------------------- homogeneous components


@dataclass(frozen=True)
class EpiHomogComponents:
    components: tuple
    residual: float
    non_polynomial: bool

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)


def epi_homog_components(Z, u, n=None):
    """Z_0(u), ..., Z_n(u) with Z(λ◻u) = Σ λ^i Z_i(u), from λ = 0, ..., n.

    The reconstruction is tested at λ = n + 1; a miss above 1e-6 marks a Z
    that is not polynomial in λ.
    """
    u = fc.as_polyhedral(u)
    n = u.dim if n is None else n
    lam = np.arange(n + 1, dtype=float)
    vals = np.array([Z(fc.epi_scale(l, u)) for l in lam])
    V = np.vander(lam, n + 1, increasing=True)  # 0**0 == 1
    comps = np.linalg.solve(V, vals)
    probe = Z(fc.epi_scale(n + 1.0, u))
    pred = float(np.polyval(comps[::-1], n + 1.0))
    resid = abs(pred - probe)
    return EpiHomogComponents(tuple(float(x) for x in comps), resid, resid > 1e-6 * max(1.0, abs(probe)))


# ----------------------------------------------------- functional intrinsic volumes


def _steiner_value_indicator(K, alpha, r):
    return float(alpha(0.0)) * parallel_volume(K, r)


def _steiner_value_radial(u, alpha, r):
    """∫ α(|∇(u □ ind_{rB})|) dx for u = c|x|²/2.

    |∇| = c(|x| - r)_+, so the integral is α(0) κ_n r^n plus
    ∫_0^∞ α(t) n κ_n (r + t/c)^{n-1} dt / c, a piecewise polynomial
    integrated exactly by Gauss-Legendre per segment of α.
    """
    n, c = u.dim, u.c
    kn = kappa(n)
    t = alpha.axes[0]
    x, w = np.polynomial.legendre.leggauss(n + 2)
    tail = 0.0
    for a, b in zip(t[:-1], t[1:]):
        s = 0.5 * (b - a) * x + 0.5 * (a + b)
        tail += 0.5 * (b - a) * float(np.sum(w * alpha(s) * n * kn * (r + s / c) ** (n - 1))) / c
    return float(alpha(0.0)) * kn * r**n + tail


@dataclass(frozen=True)
class FunctionalIntrinsic:
    values: tuple  # Z_{0,α}(u), ..., Z_{n,α}(u)
    coefficients: tuple  # polynomial in r, increasing powers
    residual: float

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, j):
        return self.values[j]

    def predict(self, r):
        return float(np.polynomial.polynomial.polyval(r, self.coefficients))


def functional_steiner_value(u, alpha, r):
    """Z_{n,α}(u □ ind_{rB}) by the route matching u's family."""
    if isinstance(u, fc.RadialQuadratic):
        return _steiner_value_radial(u, alpha, r)
    if isinstance(u, fc.PolyhedralFunc) and len(u.cells) == 1:
        c = u.cells[0]
        if c.bounded and np.all(c.slope == 0) and c.offset == 0:
            return _steiner_value_indicator(c.body, alpha, r)
    raise Unsupported("functional Steiner values for indicators and radial quadratics")


def functional_intrinsic(u, alpha, r_nodes):
    if alpha.kind != "on_halfline":
        raise ValidationError("functional_intrinsic", "α must be a density on [0, ∞)")
    n = u.dim
    if n > 3:
        raise Unsupported("functional intrinsic volumes for n <= 3")
    r = np.unique(np.asarray(r_nodes, dtype=float))
    if len(r) < n + 1:
        raise InsufficientNodes(f"need {n + 1} distinct radii, got {len(r)}")
    if np.any(r < 0):
        raise ValidationError("functional_intrinsic", "radii must be nonnegative")
    vals = np.array([functional_steiner_value(u, alpha, ri) for ri in r])
    coef = np.polynomial.polynomial.polyfit(r, vals, n)
    resid = float(np.max(np.abs(np.polynomial.polynomial.polyval(r, coef) - vals)))
    Z = tuple(float(coef[n - j] / kappa(n - j)) for j in range(n + 1))
    return FunctionalIntrinsic(Z, tuple(float(x) for x in coef), resid)


# ---------------------------------------------------------------- harness


def vertical_shift_check(Z, u, t_values):
    """max_t |Z(u + t) - e^{-t} Z(u)|."""
    base = Z(u)
    return max(abs(Z(fc.vertical_shift(fc.as_polyhedral(u), t)) - math.exp(-t) * base) for t in t_values)


@dataclass(frozen=True)
class ValuationResidual:
    residual: float
    values: tuple  # Z(u), Z(v), Z(u ∨ v), Z(u ∧ v)

    def __float__(self):
        return self.residual


@lru_cache(maxsize=512)
def _lattice(u, v):
    return fc.pointwise_max(u, v), fc.pointwise_min(u, v)


def function_valuation_check(Z, u, v):
    """|Z(u) + Z(v) - Z(u ∨ v) - Z(u ∧ v)|; NonConvexMin if u ∧ v is not convex."""
    mx, mn = _lattice(u, v)
    vals = (Z(u), Z(v), Z(mx), Z(mn))
    return ValuationResidual(abs(vals[0] + vals[1] - vals[2] - vals[3]), vals)


EXP_MIN = FuncValuation(exp_min, True, None, "exp_min")
EXP_INTEGRAL = FuncValuation(exp_integral, True, None, "exp_integral")


def grad_family(zeta):
    return FuncValuation(lambda u: grad_valuation(u, zeta), True, None, "grad_valuation")


def reduction_check(zeta, y, K):
    """|grad_valuation(ℓ_y + ind_K, ζ) - ζ(y) V_n(K)|."""
    lhs = grad_valuation(fc.linear_plus_indicator(y, K), zeta)
    rhs = float(np.atleast_1d(zeta(np.asarray(y, dtype=float)[None, :]))[0]) * gc.volume(K)
    return abs(lhs - rhs)
