"""Intrinsic volumes and classical valuation machinery on polytopes."""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.special import gamma
from scipy.stats import multivariate_normal

from . import geom_core as gc
from .errors import (
    DegenerateSimplex,
    NegativeRadius,
    Unsupported,
    ValidationError,
    WindowTooSmall,
)


def kappa(j):
    """Volume of the unit ball in R^j."""
    return math.pi ** (j / 2) / gamma(j / 2 + 1)


@dataclass(frozen=True)
class KappaTable:
    values: tuple

    @classmethod
    def up_to(cls, n):
        return cls(tuple(kappa(j) for j in range(n + 1)))

    def __getitem__(self, j):
        return self.values[j]


@dataclass(frozen=True)
class IntrinsicVector:
    values: tuple
    dim: int

    def __getitem__(self, j):
        return self.values[j]

    def __len__(self):
        return len(self.values)

    def as_array(self):
        return np.array(self.values)


def elementary_symmetric(s):
    """e_0, ..., e_n of the numbers s."""
    e = np.zeros(len(s) + 1)
    e[0] = 1.0
    for x in s:
        e[1:] = e[1:] + x * e[:-1]
    return e


def _full_intrinsic(P):
    d = P.dim
    if d == 1:
        return [1.0, gc.volume(P)]
    if d == 2:
        return [1.0, 0.5 * float(gc.facet_areas(P).sum()), gc.volume(P)]
    if d == 3:
        V = P.vertices
        v1 = 0.0
        for a, b, fa, fb in gc.edges3(P):
            na, nb = P.facets[fa][0].normal, P.facets[fb][0].normal
            ext = math.acos(max(-1.0, min(1.0, float(na @ nb))))
            v1 += float(np.linalg.norm(V[a] - V[b])) * ext / (2 * math.pi)
        return [1.0, v1, 0.5 * float(gc.facet_areas(P).sum()), gc.volume(P)]
    raise Unsupported("general intrinsic volumes for n <= 3")


def _cone_fraction(W):
    """Gaussian measure of the simplicial cone spanned by the unit rows of W,
    relative to its own linear span."""
    d = len(W)
    if d == 1:
        return 0.5
    G = W @ W.T
    if d == 2:
        return math.acos(max(-1.0, min(1.0, G[0, 1]))) / (2 * math.pi)
    if d == 3:
        det = math.sqrt(max(np.linalg.det(G), 0.0))
        omega = 2 * math.atan2(det, 1 + G[0, 1] + G[0, 2] + G[1, 2])
        return omega / (4 * math.pi)
    cov = np.linalg.inv(G)
    return float(multivariate_normal(mean=np.zeros(d), cov=cov).cdf(np.zeros(d), abseps=1e-9, releps=1e-9, maxpts=2_000_000))


def _simplex_intrinsic(P):
    """V_j(S) = sum over j-faces F of vol_j(F) times the external angle at F."""
    V = P.vertices
    n = P.dim
    normals = {}
    for h, ix in P.facets:
        (opp,) = set(range(n + 1)) - set(ix)
        normals[opp] = h.normal
    out = [1.0]
    for j in range(1, n + 1):
        tot = 0.0
        for F in combinations(range(n + 1), j + 1):
            E = V[list(F[1:])] - V[F[0]]
            volF = math.sqrt(max(np.linalg.det(E @ E.T), 0.0)) / math.factorial(j)
            rest = [k for k in range(n + 1) if k not in F]
            gam = 1.0 if not rest else _cone_fraction(np.array([normals[k] for k in rest]))
            tot += volF * gam
        out.append(tot)
    return out


def intrinsic_volumes(P):
    if gc.is_empty(P):
        return IntrinsicVector(tuple([0.0] * (P.dim + 1)), P.dim)
    n = P.dim
    fam = P.family
    if fam is not None and fam[0] == "box":
        return IntrinsicVector(tuple(elementary_symmetric(fam[2]).tolist()), n)
    if P.is_full_dim:
        if n <= 3:
            vals = _full_intrinsic(P)
        elif fam is not None and fam[0] == "simplex" and n <= 6:
            vals = _simplex_intrinsic(P)
        else:
            raise Unsupported("intrinsic volumes: n <= 3, or boxes/simplices up to n = 6")
    else:
        k = P.affine_dim
        vals = [1.0] if P.sub is None else _full_intrinsic(P.sub) if k <= 3 else None
        if vals is None:
            raise Unsupported("lower-dimensional body of dimension > 3")
        vals = vals + [0.0] * (n - k)
    return IntrinsicVector(tuple(float(v) for v in vals), n)


def steiner_volume(P, r):
    """sum_j r^(n-j) kappa_(n-j) V_j(P)."""
    if r < 0:
        raise NegativeRadius(f"r = {r}")
    V = intrinsic_volumes(P)
    n = V.dim
    return float(sum(r ** (n - j) * kappa(n - j) * V[j] for j in range(n + 1)))


def steiner_error_bound(P, r, ball):
    """Bound on |steiner_volume(P, r) - volume(P + ball)| for an inscribed ball
    polytope of radius r: it contains (r - eps) B, so the polytopal parallel
    body is squeezed between two Steiner values."""
    if abs(ball.radius - r) > 1e-15 * max(1.0, r):
        raise ValidationError("steiner_error_bound", "ball radius must equal r")
    return steiner_volume(P, r) - steiner_volume(P, max(r - ball.error_bound, 0.0))


def _spherical_polygon_area(normals):
    """Solid angle of the cone spanned by unit vectors listed in cyclic order."""
    tot = 0.0
    a = normals[0]
    for b, c in zip(normals[1:-1], normals[2:]):
        det = float(np.linalg.det(np.array([a, b, c])))
        tot += 2 * math.atan2(abs(det), 1 + a @ b + b @ c + c @ a)
    return tot


def parallel_volume(P, r):
    """V_n(P + rB) by the normal-cone decomposition of the outer parallel body:
    facet prisms, edge wedges and vertex sectors.  Full-dimensional, n <= 3."""
    if r < 0:
        raise NegativeRadius(f"r = {r}")
    if gc.is_empty(P) or not P.is_full_dim or P.dim > 3:
        raise Unsupported("parallel_volume needs a full-dimensional body with n <= 3")
    n = P.dim
    if n == 1:
        return gc.volume(P) + 2 * r
    V = P.vertices
    if n == 2:
        normals = np.array([h.normal for h, _ in P.facets])
        ang = np.sort(np.arctan2(normals[:, 1], normals[:, 0]))
        turn = float(np.sum(np.diff(np.append(ang, ang[0] + 2 * np.pi))))
        return gc.volume(P) + r * float(gc.facet_areas(P).sum()) + 0.5 * r * r * turn
    wedge = 0.0
    for a, b, fa, fb in gc.edges3(P):
        na, nb = P.facets[fa][0].normal, P.facets[fb][0].normal
        wedge += float(np.linalg.norm(V[a] - V[b])) * math.acos(max(-1.0, min(1.0, float(na @ nb)))) / 2
    solid = 0.0
    for v in range(len(V)):
        inc = [f for f, (_, ix) in enumerate(P.facets) if v in ix]
        # order incident facets cyclically around the vertex
        c = V[v]
        axis = sum(P.facets[f][0].normal for f in inc)
        axis /= np.linalg.norm(axis)
        e1, e2 = gc._plane_basis(axis)
        ang = [math.atan2(P.facets[f][0].normal @ e2, P.facets[f][0].normal @ e1) for f in inc]
        ordered = [P.facets[inc[i]][0].normal for i in np.argsort(ang)]
        solid += _spherical_polygon_area(ordered)
    area = float(gc.facet_areas(P).sum())
    return gc.volume(P) + r * area + r * r * wedge + r**3 * solid / 3


# ------------------------------------------------------------- valuations


@dataclass(frozen=True)
class BodyValuation:
    evaluate: Callable
    translation_invariant: bool = True
    simple: bool = False
    continuous: bool = True
    name: str = "Z"

    def __call__(self, P):
        if gc.is_empty(P):
            return 0.0
        return float(self.evaluate(P))


def intrinsic_combination(coeffs, name="sum c_j V_j"):
    c = list(coeffs)
    return BodyValuation(lambda P: float(np.dot(c, intrinsic_volumes(P).values[: len(c)])), name=name)


def _as_valuation(Z):
    return Z if isinstance(Z, BodyValuation) else BodyValuation(Z)


def homogeneous_components(Z, P):
    """[Z_0(P), ..., Z_n(P)] from Z(mP) = sum_j Z_j(P) m^j, m = 0..n."""
    Z = _as_valuation(Z)
    n = P.dim
    if n > 8:
        warnings.warn("Vandermonde system is ill-conditioned for n > 8", RuntimeWarning)
    z0 = Z(gc.scale(P, 0))
    rhs = np.array([Z(gc.scale(P, m)) - z0 for m in range(1, n + 1)])
    M = np.array([[float(m) ** j for j in range(1, n + 1)] for m in range(1, n + 1)])
    return [z0] + np.linalg.solve(M, rhs).tolist()


# ----------------------------------------------------------- decompositions


@dataclass(frozen=True)
class SimplexFrame:
    """S = <x0; x1, ..., xn>: p_k = x0 + x1 + ... + xk are the vertices."""

    x0: np.ndarray
    steps: np.ndarray

    @classmethod
    def from_points(cls, points):
        P = np.array([gc.as_vector(p) for p in points])
        if P.shape[0] != P.shape[1] + 1:
            raise DegenerateSimplex("need n+1 points in R^n")
        return cls(P[0], np.diff(P, axis=0))

    @property
    def dim(self):
        return self.x0.size

    def points(self):
        return np.vstack([self.x0, self.x0 + np.cumsum(self.steps, axis=0)])

    def polytope(self):
        return gc.simplex(self.points())

    def volume(self):
        return abs(float(np.linalg.det(self.steps))) / math.factorial(self.dim)


def _as_frame(S):
    if isinstance(S, SimplexFrame):
        F = S
    elif isinstance(S, gc.Polytope):
        F = SimplexFrame.from_points(S.vertices)
    else:
        F = SimplexFrame.from_points(S)
    if abs(np.linalg.det(F.steps)) <= gc.EPS * max(1.0, float(np.abs(F.steps).max()) ** F.dim):
        raise DegenerateSimplex("steps x1..xn are linearly dependent")
    return F


@dataclass(frozen=True, eq=False)
class DecompositionPiece:
    body: object
    multiplicity: int
    label: tuple
    volume: float
    translations: tuple = field(default=())


def canonical_simplex_decomposition(S, t):
    """Pieces Q_k(t) = (1-t) <x0; x1..xk> + t <p_k; x_(k+1)..x_n>, k = 0..n."""
    if not 0 < t < 1:
        raise ValidationError("canonical_simplex_decomposition", "t must lie in (0, 1)")
    F = _as_frame(S)
    n = F.dim
    if n > 3:
        raise Unsupported("pieces are materialised for n <= 3")
    p = F.points()
    det = abs(float(np.linalg.det(F.steps)))
    pieces = []
    for k in range(n + 1):
        pts = [(1 - t) * p[i] + t * p[j] for i in range(k + 1) for j in range(k, n + 1)]
        vol = det * (1 - t) ** k * t ** (n - k) / (math.factorial(k) * math.factorial(n - k))
        pieces.append(DecompositionPiece(gc.hull(pts), 1, ("Q", k), vol))
    return pieces


def _cylinder_terms(F, m):
    """Translations and block lists of the cylinder dissection of mS.

    A term is (translation, blocks) with blocks (c, a, b) meaning
    c * <0; x_(a+1), ..., x_b>.  The first block is refined with the canonical
    decomposition at t = 1/c until all scales are 1.
    """
    X = F.steps
    n = F.dim
    stack = [(m * F.x0, ((m, 0, n),))]
    done = []
    while stack:
        tr, blocks = stack.pop()
        c, a, b = blocks[0]
        if c == 1:
            done.append((tr, blocks))
            continue
        rest = blocks[1:]
        d = b - a
        stack.append((tr, ((1, a, b),) + rest))
        for k in range(1, d):
            shift = X[a : a + k].sum(axis=0)
            stack.append((tr + shift, ((c - 1, a, a + k), (1, a + k, b)) + rest))
        stack.append((tr + X[a:b].sum(axis=0), ((c - 1, a, b),) + rest))
    return done


def cylinder_decomposition(S, m):
    """Dissection of mS into translates of T(j_1..j_l) = S_(0 j1) + S_(j1 j2) + ... + S_(j_(l-1) n).

    Returns one piece per signature (j_1, ..., j_l) with its multiplicity and
    every translation vector.
    """
    if int(m) != m or m < 1:
        raise ValidationError("cylinder_decomposition", "m must be a positive integer")
    F = _as_frame(S)
    n = F.dim
    if n > 3 or m > 6:
        raise Unsupported("cylinder decomposition is provided for n <= 3, m <= 6")
    terms = _cylinder_terms(F, int(m))
    det = abs(float(np.linalg.det(F.steps)))
    by_sig = {}
    for tr, blocks in terms:
        sig = tuple(sorted(b for _, _, b in blocks))
        by_sig.setdefault(sig, []).append(tr)
    pieces = []
    for sig in sorted(by_sig, key=lambda s: (len(s), s)):
        starts = (0,) + sig[:-1]
        verts = [np.zeros(n)]
        vol = det
        for a, b in zip(starts, sig):
            partial = np.vstack([np.zeros(n), np.cumsum(F.steps[a:b], axis=0)])
            verts = [v + w for v in verts for w in partial]
            vol /= math.factorial(b - a)
        trs = tuple(sorted(by_sig[sig], key=lambda v: tuple(v)))
        body = gc.hull([v + trs[0] for v in verts])
        pieces.append(DecompositionPiece(body, len(trs), sig, vol, trs))
    return pieces


def signature_multiplicities(pieces):
    return Counter({p.label: p.multiplicity for p in pieces})


# --------------------------------------------------------- surface measures


def facet_valuation(P, zeta):
    """sum over facets of zeta(outer unit normal) * facet area."""
    if gc.is_empty(P):
        return 0.0
    n = P.dim
    if P.is_full_dim:
        if P.facets is None:
            from .errors import MissingFacets

            raise MissingFacets("polytope has no H-representation")
        if n > 3:
            raise Unsupported("facet areas for n <= 3")
        areas = gc.facet_areas(P)
        return float(sum(zeta(h.normal) * a for (h, _), a in zip(P.facets, areas)))
    if P.affine_dim == n - 1:
        nu = P.frame.complement[0]
        area = 1.0 if P.sub is None else gc.volume(P.sub)
        return float((zeta(nu) + zeta(-nu)) * area)
    return 0.0


# ------------------------------------------------------ kinematic formula


def kinematic_target(K, L):
    """sum_i kappa_i kappa_(n-i) / (C(n,i) kappa_n) V_i(K) V_(n-i)(L)."""
    vk, vl = intrinsic_volumes(K), intrinsic_volumes(L)
    n = K.dim
    return float(
        sum(kappa(i) * kappa(n - i) / (math.comb(n, i) * kappa(n)) * vk[i] * vl[n - i] for i in range(n + 1))
    )


@dataclass(frozen=True)
class KinematicEstimate:
    estimate: float
    stderr: float
    hits: int
    samples: int
    window_area: float
    seed: int
    trace: tuple  # (samples so far, running estimate) per stream

    def __iter__(self):
        return iter((self.estimate, self.stderr))


def _polygon_axes(P, center):
    V = P.vertices - center
    R = V
    if P.is_full_dim:
        N = np.array([h.normal for h, _ in P.facets])
    else:
        A, _ = P.halfspaces()
        N = A / np.linalg.norm(A, axis=1, keepdims=True)
    return R, N


def _chunk_hits(KV, NK, LV, NL, L_lo, L_hi, theta, t):
    c, s = np.cos(theta)[:, None], np.sin(theta)[:, None]
    X = c * LV[:, 0] - s * LV[:, 1] + t[:, :1]
    Y = s * LV[:, 0] + c * LV[:, 1] + t[:, 1:]
    sep = np.zeros(len(theta), dtype=bool)
    for nrm in NK:
        proj = nrm[0] * X + nrm[1] * Y
        kp = KV @ nrm
        sep |= (proj.max(axis=1) < kp.min()) | (proj.min(axis=1) > kp.max())
    for j, nrm in enumerate(NL):
        nx = c[:, 0] * nrm[0] - s[:, 0] * nrm[1]
        ny = s[:, 0] * nrm[0] + c[:, 0] * nrm[1]
        kp = nx[:, None] * KV[:, 0] + ny[:, None] * KV[:, 1]
        off = nx * t[:, 0] + ny * t[:, 1]
        sep |= (kp.max(axis=1) < L_lo[j] + off) | (kp.min(axis=1) > L_hi[j] + off)
    return int(np.count_nonzero(~sep))


def kinematic_integral_mc(K, L, samples, seed=0, half_width=None, chunk=1_000_000):
    """Monte Carlo estimate of the integral of V_0(K ∩ φL) over rigid motions φ.

    Rotations carry the Haar probability measure, translations Lebesgue
    measure on a centered square window around K's vertex centroid.
    """
    if K.dim != 2 or L.dim != 2:
        raise Unsupported("kinematic Monte Carlo is planar")
    if gc.is_empty(K) or gc.is_empty(L):
        raise ValidationError("kinematic_integral_mc", "bodies must be nonempty")
    cK, cL = gc.vertex_centroid(K), gc.vertex_centroid(L)
    rK, rL = gc.circumradius(K, cK), gc.circumradius(L, cL)
    need = max(gc.support(K, e) - float(e @ cK) for e in np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], float)) + rL
    w = rK + rL if half_width is None else float(half_width)
    if w < need - 1e-12:
        raise WindowTooSmall(f"half-width {w} excludes intersecting placements (need {need})")
    KV, NK = _polygon_axes(K, cK)
    LV, NL = _polygon_axes(L, cL)
    L_lo = np.array([np.min(LV @ nrm) for nrm in NL])
    L_hi = np.array([np.max(LV @ nrm) for nrm in NL])
    samples = int(samples)
    nstreams = max(1, -(-samples // chunk))
    streams = np.random.SeedSequence(seed).spawn(nstreams)
    area = (2 * w) ** 2
    hits, done, trace = 0, 0, []
    for k, ss in enumerate(streams):
        size = min(chunk, samples - k * chunk)
        rng = np.random.default_rng(ss)
        theta = rng.uniform(0.0, 2 * np.pi, size)
        t = rng.uniform(-w, w, (size, 2))
        hits += _chunk_hits(KV, NK, LV, NL, L_lo, L_hi, theta, t)
        done += size
        trace.append((done, area * hits / done))
    p = hits / samples
    est = area * p
    se = area * math.sqrt(p * (1 - p) / samples)
    return KinematicEstimate(est, se, hits, samples, area, int(seed), tuple(trace))


# ---------------------------------------------------------- property harness


def valuation_check(Z, P, h):
    """|Z(P+) + Z(P-) - Z(P) - Z(P ∩ h)| for the split of P by h."""
    Z = _as_valuation(Z)
    plus, minus = gc.split_by_hyperplane(P, h)
    sec = gc.section(P, h)
    return abs(Z(plus) + Z(minus) - Z(P) - Z(sec))
