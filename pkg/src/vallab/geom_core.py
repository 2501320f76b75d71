"""Convex bodies in R^n: polytopes, sampled support functions, and the basic
constructions (hulls, volumes, support values, Minkowski sums, hyperplane
splits, Hausdorff distance, rotational means).

Arbitrary polytopes are handled exactly for n <= 3.  Boxes and simplices are
recognised in any dimension.  The empty set is the value ``EmptyBody(n)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection, cKDTree

from .errors import (
    DimensionMismatch,
    EmptyBodyError,
    InvalidRotation,
    Unsupported,
    ValidationError,
)

EPS = 1e-10
DEDUP_TOL = 1e-12


def as_vector(x, n=None):
    v = np.array(x, dtype=float).reshape(-1)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ValidationError("Vector", "entries must be finite and dimension >= 1")
    if n is not None and v.size != n:
        raise DimensionMismatch(f"expected dimension {n}, got {v.size}")
    return v


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """The hyperplane <normal, x> = offset.  H+ is the side <normal, x> >= offset."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = _frozen(as_vector(self.normal))
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValidationError("Hyperplane", "normal must have unit length")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_normal(cls, normal, offset=0.0):
        n = as_vector(normal)
        s = np.linalg.norm(n)
        if s == 0:
            raise ValidationError("Hyperplane", "zero normal")
        return cls(n / s, offset / s)

    @classmethod
    def through(cls, point, normal):
        n = as_vector(normal)
        n = n / np.linalg.norm(n)
        return cls(n, float(n @ as_vector(point)))

    @property
    def dim(self):
        return self.normal.size

    def signed(self, x):
        return np.asarray(x, dtype=float) @ self.normal - self.offset


@dataclass(frozen=True, eq=False)
class AffineFrame:
    """Orthonormal coordinates on the affine hull of a lower-dimensional body."""

    origin: np.ndarray
    basis: np.ndarray  # (k, n) orthonormal rows spanning the direction space
    complement: np.ndarray  # (n - k, n) orthonormal rows

    def coords(self, x):
        return (np.asarray(x, dtype=float) - self.origin) @ self.basis.T

    def lift(self, c):
        return self.origin + np.asarray(c, dtype=float) @ self.basis


@dataclass(frozen=True)
class EmptyBody:
    dim: int

    is_empty = True
    affine_dim = -1

    @property
    def vertices(self):
        return np.zeros((0, self.dim))


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex polytope in canonical V-representation.

    ``facets`` holds the H-representation of full-dimensional bodies as pairs
    (Hyperplane with outward normal, vertex indices).  In the plane the facets
    are listed counter-clockwise; in space every facet's indices run
    counter-clockwise seen from outside.  Lower-dimensional bodies carry an
    ``AffineFrame`` and the full-dimensional polytope ``sub`` in frame
    coordinates (``None`` for a point).
    """

    vertices: np.ndarray
    facets: tuple | None = None
    frame: AffineFrame | None = None
    sub: "Polytope | None" = None
    family: tuple | None = None

    is_empty = False

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def affine_dim(self):
        if self.frame is None:
            return self.dim
        return self.frame.basis.shape[0]

    @property
    def is_full_dim(self):
        return self.frame is None

    def __repr__(self):
        return f"Polytope(dim={self.dim}, affine_dim={self.affine_dim}, nverts={len(self.vertices)})"

    def ring(self):
        """Counter-clockwise vertex order of a full-dimensional polygon."""
        if self.dim != 2 or not self.is_full_dim:
            raise Unsupported("ring is defined for full-dimensional polygons")
        c = self.vertices.mean(axis=0)
        d = self.vertices - c
        return [int(i) for i in np.argsort(np.arctan2(d[:, 1], d[:, 0]))]

    def halfspaces(self):
        """Inequalities A x <= d describing the body (equalities as two rows)."""
        if self.is_full_dim:
            A = np.array([h.normal for h, _ in self.facets])
            d = np.array([h.offset for h, _ in self.facets])
            return A, d
        fr = self.frame
        rows, rhs = [], []
        for c in fr.complement:
            o = float(c @ fr.origin)
            rows += [c, -c]
            rhs += [o, -o]
        if self.sub is not None:
            for h, _ in self.sub.facets:
                nu = h.normal @ fr.basis
                rows.append(nu)
                rhs.append(h.offset + float(nu @ fr.origin))
        return np.array(rows).reshape(-1, self.dim), np.array(rhs)


def is_empty(P):
    return isinstance(P, EmptyBody)


# ---------------------------------------------------------------- hull kernels


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _chain2(P):
    """Monotone chain; returns indices of extreme points counter-clockwise."""
    m = len(P)
    if m == 1:
        return [0]
    scale = max(float(np.ptp(P, axis=0).max()), 1e-300)
    tol = 1e-13 * scale * scale
    # x equal up to rounding must tie, else noise decides the order along a vertical edge
    order = np.lexsort((P[:, 1], np.round((P[:, 0] - P[:, 0].min()) / (1e-11 * scale))))

    def build(seq):
        h = []
        for i in seq:
            while len(h) >= 2 and _cross2(P[h[-2]], P[h[-1]], P[i]) <= tol:
                h.pop()
            h.append(i)
        return h

    lower = build(order)
    upper = build(order[::-1])
    ring = lower[:-1] + upper[:-1]
    return ring if ring else [int(order[0])]


def _plane_basis(normal):
    a = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(normal, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    return e1, e2


def _hull3(P):
    """Facets of a full-rank 3-D point set: list of (normal, offset, ccw indices)."""
    hull = ConvexHull(P)
    scale = max(float(np.ptp(P, axis=0).max()), 1.0)
    # coplanar qhull triangles share a facet; merge them by connected components
    key = np.column_stack([hull.equations[:, :3], -hull.equations[:, 3] / scale])
    parent = list(range(len(key)))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in cKDTree(key).query_pairs(1e-9, p=np.inf):
        parent[root(i)] = root(j)
    groups = {}
    for k, simplex in enumerate(hull.simplices):
        groups.setdefault(root(k), set()).update(simplex.tolist())
    facets = []
    for r, idx in groups.items():
        n = hull.equations[r, :3] / np.linalg.norm(hull.equations[r, :3])
        idx = sorted(idx)
        e1, e2 = _plane_basis(n)
        Q = np.column_stack([P[idx] @ e1, P[idx] @ e2])
        ring = [idx[i] for i in _chain2(Q)]
        off = float(np.max(P[ring] @ n))
        facets.append((n, off, ring))
    return facets


def _affine_rank(P):
    origin = P.mean(axis=0)
    C = P - origin
    scale = max(float(np.abs(C).max()), 1.0)
    _, _, Vt = np.linalg.svd(C, full_matrices=len(C) < C.shape[1])
    n = P.shape[1]
    for k in range(n + 1):
        B = Vt[:k]
        R = C - (C @ B.T) @ B
        if np.max(np.linalg.norm(R, axis=1)) <= EPS * scale:
            return k, origin, Vt[:k], Vt[k:]
    return n, origin, Vt, Vt[n:]


def _dedup(V):
    """Drop points within DEDUP_TOL (max-norm) of an earlier kept point."""
    close = {}
    for i, j in cKDTree(V).query_pairs(DEDUP_TOL, p=np.inf):
        close.setdefault(max(i, j), []).append(min(i, j))
    keep = np.ones(len(V), dtype=bool)
    for i in sorted(close):
        if any(keep[j] for j in close[i]):
            keep[i] = False
    return V[keep]


def _canonical_order(V):
    return np.lexsort(V.T[::-1])


def _assemble_full(V, facets_raw, family=None):
    """Sort vertices lexicographically and remap facet indices."""
    used = sorted({i for _, _, r in facets_raw for i in r})
    W = V[used]
    order = _canonical_order(W)
    remap = {used[o]: k for k, o in enumerate(order)}
    verts = _frozen(W[order])
    facets = tuple(
        (Hyperplane(n, off), tuple(remap[i] for i in ring)) for n, off, ring in facets_raw
    )
    return Polytope(verts, facets=facets, family=family)


def _full_hull(P):
    n = P.shape[1]
    if n == 1:
        lo, hi = float(P[:, 0].min()), float(P[:, 0].max())
        V = np.array([[lo], [hi]])
        return _assemble_full(V, [(np.array([-1.0]), -lo, [0]), (np.array([1.0]), hi, [1])])
    if n == 2:
        ring = _chain2(P)
        V = _dedup(P[ring])
        if len(V) < len(ring):
            V = V[_chain2(V)]
        else:
            V = P[ring]
        m = len(V)
        raw = []
        for i in range(m):
            a, b = V[i], V[(i + 1) % m]
            d = b - a
            nrm = np.array([d[1], -d[0]]) / np.linalg.norm(d)
            raw.append((nrm, float(nrm @ a), [i, (i + 1) % m]))
        return _assemble_full(V, raw)
    if n == 3:
        raw = _hull3(P)
        idx = sorted({i for _, _, r in raw for i in r})
        V = _dedup(P[idx])
        if len(V) < len(idx):
            raw = _hull3(V)
            return _assemble_full(V, raw)
        return _assemble_full(P, raw)
    raise Unsupported("general hulls are implemented for n <= 3")


def _point_body(p):
    n = p.size
    frame = AffineFrame(_frozen(p), _frozen(np.zeros((0, n))), _frozen(np.eye(n)))
    return Polytope(_frozen(p.reshape(1, n)), frame=frame)


def _build(P, family=None):
    m, n = P.shape
    if n > 3:
        return _special_family(P)
    k, origin, basis, comp = _affine_rank(P)
    if k == n:
        Q = _full_hull(P)
        if family is not None:
            Q = Polytope(Q.vertices, Q.facets, family=family)
        return Q
    if k == 0:
        return _point_body(P[0])
    frame = AffineFrame(_frozen(origin), _frozen(basis), _frozen(comp))
    coords = frame.coords(P)
    sub = _full_hull(coords)
    # vertices are taken from the input so that they lie exactly on the list
    idx = [int(np.argmin(np.linalg.norm(coords - c, axis=1))) for c in sub.vertices]
    V = P[idx]
    order = _canonical_order(V)
    sub_order = np.argsort(order)
    sub = Polytope(
        sub.vertices[order],
        facets=tuple((h, tuple(int(sub_order[i]) for i in ix)) for h, ix in sub.facets),
    )
    return Polytope(_frozen(V[order]), frame=frame, sub=sub, family=family)


def _box_facets(lower, upper):
    n = lower.size
    corners = np.array(list(itertools.product(*[(lower[i], upper[i]) for i in range(n)])))
    order = _canonical_order(corners)
    V = corners[order]
    facets = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        lo_idx = tuple(int(j) for j in np.where(np.abs(V[:, i] - lower[i]) <= DEDUP_TOL)[0])
        hi_idx = tuple(int(j) for j in np.where(np.abs(V[:, i] - upper[i]) <= DEDUP_TOL)[0])
        facets.append((Hyperplane(-e, -lower[i]), lo_idx))
        facets.append((Hyperplane(e, upper[i]), hi_idx))
    return V, tuple(facets)


def _simplex_facets(V):
    n = V.shape[1]
    facets = []
    for i in range(n + 1):
        others = [j for j in range(n + 1) if j != i]
        B = V[others[1:]] - V[others[0]]
        _, _, Vt = np.linalg.svd(B)
        nrm = Vt[-1]
        off = float(nrm @ V[others[0]])
        if nrm @ V[i] > off:
            nrm, off = -nrm, -off
        facets.append((Hyperplane(nrm, off), tuple(others)))
    return tuple(facets)


def _special_family(P):
    m, n = P.shape
    V = _dedup(P)
    V = V[_canonical_order(V)]
    if len(V) == n + 1:
        if abs(np.linalg.det(V[1:] - V[0])) <= EPS:
            raise Unsupported("degenerate simplex in n > 3")
        return Polytope(_frozen(V), facets=_simplex_facets(V), family=("simplex",))
    if len(V) == 2 ** n:
        lower, upper = V.min(axis=0), V.max(axis=0)
        if np.all(upper - lower > DEDUP_TOL):
            bits = np.abs(V - lower) <= DEDUP_TOL
            on_grid = bits | (np.abs(V - upper) <= DEDUP_TOL)
            if on_grid.all() and len({tuple(b) for b in bits}) == 2 ** n:
                return box(lower, upper - lower)
    raise Unsupported("n > 3 supports boxes and simplices only")


# ------------------------------------------------------------- constructors


def hull(points):
    """Convex hull of a nonempty point list, in canonical form."""
    pts = list(points)
    if not pts:
        raise ValidationError("hull", "point list must be nonempty")
    lens = {len(np.atleast_1d(np.asarray(p, dtype=float))) for p in pts}
    if len(lens) != 1:
        raise DimensionMismatch("points have mixed dimensions")
    P = np.array([as_vector(p) for p in pts])
    return _build(P)


def box(lower, sides):
    lower = as_vector(lower)
    sides = as_vector(sides, lower.size)
    if np.any(sides < 0):
        raise ValidationError("box", "side lengths must be nonnegative")
    upper = lower + sides
    fam = ("box", tuple(lower.tolist()), tuple(sides.tolist()))
    if np.any(sides <= DEDUP_TOL) or lower.size <= 3:
        # ordered facet rings come from the general hull in low dimension
        corners = itertools.product(*[(lower[i], upper[i]) for i in range(lower.size)])
        Q = hull(list(corners))
        return Polytope(Q.vertices, Q.facets, Q.frame, Q.sub, family=fam)
    V, facets = _box_facets(lower, upper)
    return Polytope(_frozen(V), facets=facets, family=fam)


def simplex(points):
    P = np.array([as_vector(p) for p in points])
    n = P.shape[1]
    if P.shape[0] != n + 1:
        raise ValidationError("simplex", "need n+1 points")
    if n <= 3:
        Q = _build(P)
        if not Q.is_full_dim:
            raise ValidationError("simplex", "points are affinely dependent")
        return Polytope(Q.vertices, Q.facets, family=("simplex",))
    return _special_family(P)


def regular_polygon(k, radius=1.0, center=(0.0, 0.0), phase=0.0):
    if k < 3:
        raise ValidationError("regular_polygon", "k >= 3 required")
    t = phase + 2 * np.pi * np.arange(k) / k
    c = as_vector(center, 2)
    return hull(c + radius * np.column_stack([np.cos(t), np.sin(t)]))


def fibonacci_sphere(k):
    i = np.arange(k) + 0.5
    z = 1 - 2 * i / k
    r = np.sqrt(1 - z * z)
    phi = np.pi * (1 + 5**0.5) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


@dataclass(frozen=True)
class BallApprox:
    """Inscribed polytope approximation of radius * B^n (centered).

    ``error_bound`` is the Hausdorff distance to the true ball, which equals
    radius minus the inradius of the polytope.
    """

    polytope: Polytope
    radius: float
    error_bound: float


def ball_polytope(n, radius=1.0, k=256, center=None):
    c = np.zeros(n) if center is None else as_vector(center, n)
    if n == 1:
        P = hull([c - radius, c + radius])
    elif n == 2:
        P = regular_polygon(k, radius, c)
    elif n == 3:
        P = hull(c + radius * fibonacci_sphere(k))
    else:
        raise Unsupported("ball approximations for n <= 3")
    if radius == 0:
        return BallApprox(P, 0.0, 0.0)
    inr = min(h.offset - float(h.normal @ c) for h, _ in P.facets)
    return BallApprox(P, float(radius), float(radius - inr))


def translate(P, t):
    if is_empty(P):
        return P
    t = as_vector(t, P.dim)
    return _remap(P, P.vertices + t, t, 1.0)


def scale(P, s):
    """Dilation s*P about the origin (s >= 0)."""
    if is_empty(P):
        return P
    if s < 0:
        raise ValidationError("scale", "factor must be nonnegative")
    if s == 0:
        return _point_body(np.zeros(P.dim))
    return _remap(P, P.vertices * s, np.zeros(P.dim), float(s))


def _remap(P, V, t, s):
    """Apply x -> s x + t to a polytope, keeping its combinatorics."""
    order = _canonical_order(V)
    inv = np.argsort(order)
    fam = P.family
    if fam is not None and fam[0] == "box":
        lo = np.array(fam[1]) * s + t
        fam = ("box", tuple(lo.tolist()), tuple((np.array(fam[2]) * s).tolist()))
    facets = frame = sub = None
    if P.facets is not None:
        facets = tuple(
            (Hyperplane(h.normal, s * h.offset + float(h.normal @ t)), tuple(int(inv[i]) for i in ix))
            for h, ix in P.facets
        )
    if P.frame is not None:
        fr = P.frame
        frame = AffineFrame(_frozen(fr.origin * s + t), fr.basis, fr.complement)
        if P.sub is not None:
            sub = _reindex_sub(V, frame)
    return Polytope(_frozen(V[order]), facets=facets, frame=frame, sub=sub, family=fam)


def _reindex_sub(V, frame):
    Q = _build(frame.coords(V[_canonical_order(V)]))
    return Q if Q.is_full_dim else None


def linear_map(P, A):
    if is_empty(P):
        return P
    A = np.asarray(A, dtype=float)
    if A.shape != (P.dim, P.dim):
        raise DimensionMismatch("matrix shape does not match body dimension")
    return hull(P.vertices @ A.T)


# --------------------------------------------------------------- measures


def volume(P):
    """n-dimensional Lebesgue measure."""
    if is_empty(P) or not P.is_full_dim:
        return 0.0
    n = P.dim
    V = P.vertices
    fam = P.family
    if fam is not None and fam[0] == "box":
        return float(np.prod(fam[2]))
    if fam is not None and fam[0] == "simplex":
        return abs(float(np.linalg.det(V[1:] - V[0]))) / math.factorial(n)
    if n == 1:
        return float(V[-1, 0] - V[0, 0])
    if n == 2:
        R = V[P.ring()]
        x, y = R[:, 0], R[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    if n == 3:
        p = V[0]
        tot = 0.0
        for _, ix in P.facets:
            a = V[ix[0]] - p
            for j in range(1, len(ix) - 1):
                tot += float(np.linalg.det(np.array([a, V[ix[j]] - p, V[ix[j + 1]] - p])))
        return tot / 6.0
    raise Unsupported("volume of general polytopes for n <= 3")


def facet_areas(P):
    """(n-1)-volumes of the facets of a full-dimensional polytope, n <= 3."""
    V = P.vertices
    if P.dim == 1:
        return np.ones(2)
    if P.dim == 2:
        return np.array([np.linalg.norm(V[ix[1]] - V[ix[0]]) for _, ix in P.facets])
    if P.dim == 3:
        out = []
        for h, ix in P.facets:
            a = 0.0
            for j in range(1, len(ix) - 1):
                a += float(np.cross(V[ix[j]] - V[ix[0]], V[ix[j + 1]] - V[ix[0]]) @ h.normal)
            out.append(0.5 * a)
        return np.array(out)
    raise Unsupported("facet areas for n <= 3")


def edges3(P):
    """Edges of a full-dimensional 3-polytope as (i, j, facet_a, facet_b)."""
    if P.dim != 3 or not P.is_full_dim:
        raise Unsupported("edges3 needs a full-dimensional 3-polytope")
    owners = {}
    for f, (_, ix) in enumerate(P.facets):
        for a, b in zip(ix, ix[1:] + ix[:1]):
            owners.setdefault((min(a, b), max(a, b)), []).append(f)
    out = []
    for (a, b), fs in sorted(owners.items()):
        if len(fs) != 2:
            raise ValidationError("Polytope", "edge not shared by exactly two facets")
        out.append((a, b, fs[0], fs[1]))
    return out


def support(P, y):
    if is_empty(P):
        raise EmptyBodyError()
    y = as_vector(y, P.dim)
    return float(np.max(P.vertices @ y))


def contains(P, x, tol=EPS):
    if is_empty(P):
        return False
    x = as_vector(x, P.dim)
    if P.is_full_dim:
        A, d = P.halfspaces()
        return bool(np.all(A @ x - d <= tol))
    fr = P.frame
    if np.any(np.abs(fr.complement @ (x - fr.origin)) > tol):
        return False
    if P.sub is None:
        return True
    return contains(P.sub, fr.coords(x), tol)


def minkowski_sum(P, Q):
    if is_empty(P) or is_empty(Q):
        if P.dim != Q.dim:
            raise DimensionMismatch()
        return EmptyBody(P.dim)
    if P.dim != Q.dim:
        raise DimensionMismatch("summands have different dimensions")
    fp, fq = P.family, Q.family
    if fp and fq and fp[0] == fq[0] == "box":
        return box(np.add(fp[1], fq[1]), np.add(fp[2], fq[2]))
    S = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.dim)
    return hull(S)


def _inherit_normals(piece, candidates):
    """Snap facet planes of a recomputed hull onto known parent planes."""
    if is_empty(piece) or not piece.is_full_dim or not candidates:
        return piece
    new = []
    for h, ix in piece.facets:
        best = None
        for c in candidates:
            if np.linalg.norm(c.normal - h.normal) < 1e-8:
                best = c
                break
        new.append((best, ix) if best is not None else (h, ix))
    return Polytope(piece.vertices, tuple(new), family=None)


def split_by_hyperplane(P, h, tol=EPS):
    """Return (P ∩ H+, P ∩ H-); either part may be EmptyBody."""
    if is_empty(P):
        return P, P
    if h.dim != P.dim:
        raise DimensionMismatch()
    V = P.vertices
    s = V @ h.normal - h.offset
    pos, neg = s > tol, s < -tol
    on = ~pos & ~neg
    if not neg.any():
        return P, section(P, h, tol)
    if not pos.any():
        return section(P, h, tol), P
    cross = _crossings(V, s, pos, neg)
    plus = hull(np.vstack([V[pos | on], cross]))
    minus = hull(np.vstack([V[neg | on], cross]))
    if P.facets is not None:
        parents = [f[0] for f in P.facets]
        plus = _inherit_normals(plus, parents + [Hyperplane(-h.normal, -h.offset)])
        minus = _inherit_normals(minus, parents + [h])
    return plus, minus


def _crossings(V, s, pos, neg):
    I, J = np.where(pos)[0], np.where(neg)[0]
    a = s[I][:, None] / (s[I][:, None] - s[J][None, :])
    C = V[I][:, None, :] + a[..., None] * (V[J][None, :, :] - V[I][:, None, :])
    return C.reshape(-1, V.shape[1])


def section(P, h, tol=EPS):
    """P ∩ h."""
    if is_empty(P):
        return P
    V = P.vertices
    s = V @ h.normal - h.offset
    pos, neg = s > tol, s < -tol
    on = ~pos & ~neg
    pts = [V[on]]
    if pos.any() and neg.any():
        pts.append(_crossings(V, s, pos, neg))
    pts = np.vstack(pts)
    if len(pts) == 0:
        return EmptyBody(P.dim)
    return hull(pts)


def clip(P, normal, offset, tol=EPS):
    """P ∩ {<normal, x> <= offset}."""
    h = Hyperplane.from_normal(normal, offset)
    return split_by_hyperplane(P, h, tol)[1]


def intersect(P, Q, tol=EPS):
    if is_empty(P) or is_empty(Q):
        return EmptyBody(P.dim)
    A, d = Q.halfspaces()
    R = P
    for a, b in zip(A, d):
        R = clip(R, a, b, tol)
        if is_empty(R):
            break
    return R


def vertex_centroid(P):
    return P.vertices.mean(axis=0)


def circumradius(P, center=None):
    c = vertex_centroid(P) if center is None else as_vector(center, P.dim)
    return float(np.max(np.linalg.norm(P.vertices - c, axis=1)))


# ---------------------------------------------------------- sampled bodies


@dataclass(frozen=True, eq=False)
class SampledBody:
    """A convex body known through support values on a fixed direction set."""

    directions: np.ndarray
    support_values: np.ndarray

    def __post_init__(self):
        D = _frozen(np.atleast_2d(np.asarray(self.directions, dtype=float)))
        h = _frozen(np.asarray(self.support_values, dtype=float).reshape(-1))
        if len(D) != len(h):
            raise ValidationError("SampledBody", "one support value per direction")
        if np.any(np.abs(np.linalg.norm(D, axis=1) - 1) > 1e-12):
            raise ValidationError("SampledBody", "directions must be unit vectors")
        if not np.all(np.isfinite(h)):
            raise ValidationError("SampledBody", "support values must be finite")
        object.__setattr__(self, "directions", D)
        object.__setattr__(self, "support_values", h)

    @property
    def dim(self):
        return self.directions.shape[1]


def circle_directions(k, phase=0.0):
    t = phase + 2 * np.pi * np.arange(k) / k
    return np.column_stack([np.cos(t), np.sin(t)])


def sample_support(P, directions):
    D = np.atleast_2d(np.asarray(directions, dtype=float))
    D = D / np.linalg.norm(D, axis=1, keepdims=True)
    if is_empty(P):
        raise EmptyBodyError()
    return SampledBody(D, np.max(D @ P.vertices.T, axis=1))


def _support_at_2d(K, U):
    D, h = K.directions, K.support_values
    ang = np.arctan2(D[:, 1], D[:, 0])
    order = np.argsort(ang)
    ang, D, h = ang[order], D[order], h[order]
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    if gaps.max() >= np.pi:
        raise ValidationError("SampledBody", "direction gaps must be below pi")
    m = len(ang)
    out = np.empty(len(U))
    for q, u in enumerate(U):
        a = math.atan2(u[1], u[0])
        i = int(np.searchsorted(ang, a, side="right")) - 1
        j = (i + 1) % m
        i %= m
        if np.linalg.norm(D[i] - u) <= 1e-12:
            out[q] = h[i]
            continue
        if np.linalg.norm(D[j] - u) <= 1e-12:
            out[q] = h[j]
            continue
        v = np.linalg.solve(np.array([D[i], D[j]]), np.array([h[i], h[j]]))
        out[q] = float(v @ u)
    return out


def support_at(K, U):
    """Support values of a sampled body's induced polytope at directions U."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if K.dim == 2:
        return _support_at_2d(K, U)
    if K.dim == 3:
        exact = []
        for u in U:
            d = np.linalg.norm(K.directions - u, axis=1)
            exact.append(int(np.argmin(d)) if d.min() <= 1e-12 else -1)
        if all(e >= 0 for e in exact):
            return K.support_values[exact]
        halfspaces = np.column_stack([K.directions, -K.support_values])
        interior = _chebyshev_center(K.directions, K.support_values)
        V = HalfspaceIntersection(halfspaces, interior).intersections
        return np.max(U @ V.T, axis=1)
    raise Unsupported("sampled bodies for n = 2, 3")


def _chebyshev_center(A, b):
    from scipy.optimize import linprog

    n = A.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1
    res = linprog(c, A_ub=np.column_stack([A, np.ones(len(A))]), b_ub=b,
                  bounds=[(None, None)] * n + [(0, None)])
    if not res.success or res.x[-1] <= 0:
        raise ValidationError("SampledBody", "induced polytope has empty interior")
    return res.x[:n]


def as_rotation(R, n):
    if np.isscalar(R):
        if n != 2:
            raise InvalidRotation("angles describe rotations only in the plane")
        c, s = math.cos(R), math.sin(R)
        return np.array([[c, -s], [s, c]])
    M = np.asarray(R, dtype=float)
    if M.shape != (n, n):
        raise InvalidRotation(f"expected a {n}x{n} matrix")
    if np.max(np.abs(M.T @ M - np.eye(n))) > 1e-10 or abs(np.linalg.det(M) - 1) > 1e-10:
        raise InvalidRotation("matrix is not orthogonal with determinant 1")
    return M


def rotational_mean(K, rotations):
    """Average of the rotated copies in the Minkowski sense: h_M = mean h_{R_i K}."""
    if K.dim not in (2, 3):
        raise Unsupported("rotational means for n = 2, 3")
    Rs = [as_rotation(R, K.dim) for R in rotations]
    if not Rs:
        raise ValidationError("rotational_mean", "need at least one rotation")
    tot = np.zeros(len(K.directions))
    for R in Rs:
        # h_{RK}(u) = h_K(R^T u)
        tot += support_at(K, K.directions @ R)
    return SampledBody(K.directions, tot / len(Rs))


# ---------------------------------------------------------------- metrics


def _critical_directions(P):
    A, _ = P.halfspaces()
    D = [A, -A] if not P.is_full_dim else [A]
    return np.vstack(D) if D else np.zeros((0, P.dim))


def hausdorff_distance(A, B, samples=4096):
    """sup over unit directions of |h_A - h_B|.

    Exact for planar polytopes: the supremum is attained at a facet normal of
    either body or at a direction of a vertex difference.  In space a dense
    spherical sample is added to those candidates.
    """
    if is_empty(A) or is_empty(B):
        raise EmptyBodyError()
    if A.dim != B.dim:
        raise DimensionMismatch()
    sa, sb = isinstance(A, SampledBody), isinstance(B, SampledBody)
    if sa or sb:
        S = A if sa else B
        D = S.directions
        if sa and sb and (A.directions.shape != B.directions.shape or np.max(np.abs(A.directions - B.directions)) > 1e-12):
            raise DimensionMismatch("sampled bodies use different direction sets")
        ha = A.support_values if sa else D @ A.vertices.T
        hb = B.support_values if sb else D @ B.vertices.T
        if not sa:
            ha = ha.max(axis=1)
        if not sb:
            hb = hb.max(axis=1)
        return float(np.max(np.abs(ha - hb)))
    n = A.dim
    if n == 1:
        D = np.array([[1.0], [-1.0]])
    else:
        diff = (A.vertices[:, None, :] - B.vertices[None, :, :]).reshape(-1, n)
        nd = np.linalg.norm(diff, axis=1)
        diff = diff[nd > 1e-15] / nd[nd > 1e-15, None]
        D = np.vstack([_critical_directions(A), _critical_directions(B), diff, -diff])
        if n == 3:
            D = np.vstack([D, fibonacci_sphere(samples)])
    D = D / np.linalg.norm(D, axis=1, keepdims=True)
    ha = np.max(D @ A.vertices.T, axis=1)
    hb = np.max(D @ B.vertices.T, axis=1)
    return float(np.max(np.abs(ha - hb)))
