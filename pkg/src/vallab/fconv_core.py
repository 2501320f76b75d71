"""Piecewise-affine convex functions.

Two canonical forms are used side by side:

* ``PolyhedralFunc``: min over cells of affine functions, +inf off the cells.
  Cells are polyhedra given by vertices and recession rays.
* ``MaxAffineFunc``: finite maximum of affine functions, finite everywhere.

Legendre conjugation maps one form to the other; most calculus is done in
whichever form makes it trivial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from . import geom_core as gc
from .errors import (
    DimensionMismatch,
    EmptyBodyError,
    NegativeScale,
    NonConvexMin,
    NotCoercive,
    OriginOutside,
    Unsupported,
    ValidationError,
)

TOL = 1e-10


def _ro(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# --------------------------------------------------------------------- cells


@dataclass(frozen=True, eq=False)
class Cell:
    """Polyhedron conv(vertices) + cone(rays) carrying x -> <slope, x> + offset."""

    vertices: np.ndarray
    rays: np.ndarray
    slope: np.ndarray
    offset: float
    A: np.ndarray
    d: np.ndarray
    body: object = None  # bounded cells keep their Polytope

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def bounded(self):
        return len(self.rays) == 0

    @property
    def full_dim(self):
        if self.bounded:
            return self.body.is_full_dim
        return _affine_rank(np.vstack([self.vertices, self.vertices[0] + self.rays])) == self.dim

    def value(self, x):
        return np.asarray(x, dtype=float) @ self.slope + self.offset

    def contains(self, X, tol=TOL):
        X = np.atleast_2d(X)
        if len(self.A) == 0:
            return np.ones(len(X), dtype=bool)
        return np.all(X @ self.A.T - self.d <= tol, axis=1)

    def volume(self):
        if not self.bounded:
            return np.inf if self.full_dim else 0.0
        return gc.volume(self.body)


def _affine_rank(P, tol=1e-9):
    P = np.asarray(P, dtype=float)
    if len(P) <= 1:
        return 0
    s = np.linalg.svd(P[1:] - P[0], compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def _unbounded_hrep(V, R):
    """H-representation of conv(V) + cone(R) via a truncated hull.

    Q = conv(V ∪ (V + R̂)) lies in the polyhedron and shares all its facets;
    facets of Q that some ray leaves are truncation artefacts.
    """
    n = V.shape[1]
    Rh = R / np.linalg.norm(R, axis=1, keepdims=True)
    pts = np.vstack([V, (V[:, None, :] + Rh[None, :, :]).reshape(-1, n)])
    if n == 1:
        lo, hi = pts.min(), pts.max()
        rows, rhs = [], []
        if not np.any(Rh[:, 0] > 0):
            rows.append([1.0])
            rhs.append(hi)
        if not np.any(Rh[:, 0] < 0):
            rows.append([-1.0])
            rhs.append(-lo)
        return np.array(rows).reshape(-1, 1), np.array(rhs)
    Q = gc.hull(pts)
    A, d = Q.halfspaces()
    keep = np.all(A @ Rh.T <= 1e-9, axis=1)
    return A[keep], d[keep]


def make_cell(vertices, slope, offset, rays=None, hrep=None):
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    n = V.shape[1]
    R = np.zeros((0, n)) if rays is None or len(rays) == 0 else np.atleast_2d(np.asarray(rays, dtype=float))
    a = np.asarray(slope, dtype=float).reshape(n)
    if len(R) == 0:
        body = gc.hull(V)
        A, d = body.halfspaces() if hrep is None else hrep
        return Cell(_ro(body.vertices), _ro(R), _ro(a), float(offset), _ro(A), _ro(d), body)
    A, d = _unbounded_hrep(V, R) if hrep is None else hrep
    return Cell(_ro(V), _ro(R), _ro(a), float(offset), _ro(A), _ro(d), None)


def cell_from_polytope(P, slope, offset):
    A, d = P.halfspaces()
    return Cell(_ro(P.vertices), _ro(np.zeros((0, P.dim))), _ro(np.asarray(slope, dtype=float)),
                float(offset), _ro(A), _ro(d), P)


# ----------------------------------------------------------------- functions


@dataclass(frozen=True, eq=False)
class PolyhedralFunc:
    """u(x) = min over cells containing x of <a_i, x> + b_i, +inf elsewhere.

    ``full_domain`` records that the cells cover R^n (gauges of bodies with
    the origin inside, primal forms of max-affine functions).
    """

    cells: tuple
    dim: int
    full_domain: bool = False
    family: tuple | None = None

    def __post_init__(self):
        if not self.cells:
            raise ValidationError("PolyhedralFunc", "at least one cell is required")
        if any(c.dim != self.dim for c in self.cells):
            raise DimensionMismatch("cell dimension differs from function dimension")

    @property
    def bounded_domain(self):
        return all(c.bounded for c in self.cells)

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True, eq=False)
class MaxAffineFunc:
    """v(x) = max_i <y_i, x> + c_i."""

    slopes: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        Y = np.atleast_2d(np.asarray(self.slopes, dtype=float))
        c = np.asarray(self.offsets, dtype=float).reshape(-1)
        if len(Y) == 0 or len(Y) != len(c):
            raise ValidationError("MaxAffineFunc", "need matching, nonempty slopes and offsets")
        object.__setattr__(self, "slopes", _ro(Y))
        object.__setattr__(self, "offsets", _ro(c))

    @property
    def dim(self):
        return self.slopes.shape[1]

    @property
    def pieces(self):
        return list(zip(self.slopes, self.offsets))

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class RadialQuadratic:
    """u(x) = c |x|^2 / 2 on R^n (closed form, outside the polyhedral class)."""

    dim: int
    c: float = 1.0

    def __post_init__(self):
        if self.c <= 0 or self.dim < 1:
            raise ValidationError("RadialQuadratic", "need c > 0 and dim >= 1")

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class CoercivityWitness:
    a: float
    b: float

    def __iter__(self):
        return iter((self.a, self.b))


# ---------------------------------------------------------------- evaluation


def evaluate(u, x):
    """Value at x (a point, or an (m, n) array of points)."""
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != u.dim:
        raise DimensionMismatch(f"point of dimension {X.shape[1]} for a function on R^{u.dim}")
    if isinstance(u, MaxAffineFunc):
        out = np.max(X @ u.slopes.T + u.offsets, axis=1)
    elif isinstance(u, RadialQuadratic):
        out = 0.5 * u.c * np.sum(X * X, axis=1)
    else:
        out = np.full(len(X), np.inf)
        for c in u.cells:
            m = c.contains(X)
            if m.any():
                out[m] = np.minimum(out[m], c.value(X[m]))
    return float(out[0]) if single else out


def min_value(u):
    """Exact minimum of a coercive polyhedral function (attained at a vertex)."""
    u = as_polyhedral(u)
    coercivity_witness(u)
    return min(float(np.min(c.value(c.vertices))) for c in u.cells)


def minimisers_hint(u):
    u = as_polyhedral(u)
    best = None
    for c in u.cells:
        vals = c.value(c.vertices)
        i = int(np.argmin(vals))
        if best is None or vals[i] < best[0]:
            best = (float(vals[i]), c.vertices[i])
    return best[1]


# ------------------------------------------------------------- constructors


def indicator(K):
    """ind_K: 0 on K, +inf elsewhere."""
    return linear_plus_indicator(np.zeros(K.dim), K)


def linear_plus_indicator(y, K):
    """ℓ_y + ind_K as a single cell (K, y, 0)."""
    if gc.is_empty(K):
        raise EmptyBodyError("linear_plus_indicator needs a nonempty body")
    y = gc.as_vector(y, K.dim)
    return PolyhedralFunc((cell_from_polytope(K, y, 0.0),), K.dim, family=("linear_indicator", y, K))


def gauge(K):
    """Minkowski functional g_K as a complex of cones over the facets of K."""
    if gc.is_empty(K):
        raise EmptyBodyError()
    n = K.dim
    if not gc.contains(K, np.zeros(n), 1e-12):
        raise OriginOutside("gauge needs 0 in K")
    if not K.is_full_dim:
        raise Unsupported("gauge of a lower-dimensional body")
    V = K.vertices
    cells = []
    interior = True
    origin = np.zeros((1, n))
    for h, ix in K.facets:
        if h.offset <= 1e-12:
            interior = False
            continue
        rays = V[list(ix)]
        if n == 1:
            A, d = np.array([[-np.sign(rays[0, 0])]]), np.array([0.0])
        else:
            A, d = None, None
        cells.append(make_cell(origin, h.normal / h.offset, 0.0, rays,
                               hrep=None if A is None else (A, d)))
    return PolyhedralFunc(tuple(cells), n, full_domain=interior, family=("gauge", K))


def vertical_shift(u, t):
    if isinstance(u, MaxAffineFunc):
        return MaxAffineFunc(u.slopes, u.offsets + t)
    cells = tuple(Cell(c.vertices, c.rays, c.slope, c.offset + t, c.A, c.d, c.body) for c in u.cells)
    return PolyhedralFunc(cells, u.dim, u.full_domain)


def translate_domain(u, x0):
    """x -> u(x - x0)."""
    x0 = gc.as_vector(x0, u.dim)
    if isinstance(u, MaxAffineFunc):
        return MaxAffineFunc(u.slopes, u.offsets - u.slopes @ x0)
    cells = []
    for c in u.cells:
        body = None if c.body is None else gc.translate(c.body, x0)
        cells.append(Cell(_ro(c.vertices + x0), c.rays, c.slope, c.offset - float(c.slope @ x0),
                          c.A, _ro(c.d + c.A @ x0), body))
    return PolyhedralFunc(tuple(cells), u.dim, u.full_domain)


def linear_map_domain(u, M):
    """x -> u(M^{-1} x) for invertible M."""
    M = np.asarray(M, dtype=float)
    Mi = np.linalg.inv(M)
    u = as_polyhedral(u)
    cells = []
    for c in u.cells:
        R = c.rays @ M.T if len(c.rays) else None
        cells.append(make_cell(c.vertices @ M.T, Mi.T @ c.slope, c.offset, R))
    return PolyhedralFunc(tuple(cells), u.dim, u.full_domain)


def _rescale(u, lam, slope_div, offset_mul):
    cells = []
    for c in u.cells:
        body = None if c.body is None else gc.scale(c.body, lam)
        cells.append(Cell(_ro(lam * c.vertices), c.rays, _ro(c.slope / slope_div), c.offset * offset_mul,
                          c.A, _ro(lam * c.d), body))
    return PolyhedralFunc(tuple(cells), u.dim, u.full_domain)


def epi_scale(lam, u):
    """(λ◻u)(x) = λ u(x/λ); epi(λ◻u) = λ epi u, and 0◻u = ind_{0}."""
    if lam < 0:
        raise NegativeScale(f"λ = {lam}")
    u = as_polyhedral(u)
    if lam == 0:
        return indicator(gc.hull(np.zeros((1, u.dim))))
    return _rescale(u, lam, 1.0, lam)


def horizontal_scale(lam, u):
    """(λ⊙u)(x) = u(x/λ)."""
    if lam <= 0:
        raise NegativeScale(f"λ = {lam}")
    u = as_polyhedral(u)
    return _rescale(u, lam, lam, 1.0)


# ------------------------------------------------------------------- lower hull


@dataclass(frozen=True)
class _LowerHull:
    """Lower hull of lifted points (p_i, z_i): facets as (point indices, slope, offset)."""

    facets: list
    vertices: np.ndarray  # indices of points that are lower-hull vertices


def _lower_hull(P, z):
    """Lower facets of conv{(p_i, z_i)} over conv{p_i}, p_i of full affine rank."""
    m, n = P.shape
    if n == 1:
        order = np.lexsort((z, P[:, 0]))
        chain = []
        for i in order:
            if chain and abs(P[chain[-1], 0] - P[i, 0]) <= 1e-14:
                continue  # same abscissa: the lower point came first
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                cr = (P[a, 0] - P[o, 0]) * (z[i] - z[o]) - (z[a] - z[o]) * (P[i, 0] - P[o, 0])
                if cr <= 1e-14 * (1 + abs(z[i]) + abs(z[o])):
                    chain.pop()
                else:
                    break
            chain.append(int(i))
        facets = []
        for a, b in zip(chain, chain[1:]):
            s = (z[b] - z[a]) / (P[b, 0] - P[a, 0])
            facets.append(((a, b), np.array([s]), float(z[a] - s * P[a, 0])))
        return _LowerHull(facets, np.array(chain, dtype=int))
    span = max(1.0, float(np.ptp(z)), float(np.max(np.ptp(P, axis=0))))
    apex = np.append(P.mean(axis=0), z.max() + 10.0 * span)
    pts = np.vstack([np.column_stack([P, z]), apex])
    try:
        H = ConvexHull(pts)
    except QhullError as exc:
        raise Unsupported(f"lower hull failed: {exc}") from exc
    groups = {}
    for simp, eq in zip(H.simplices, H.equations):
        if m in simp or eq[n] >= -1e-12:
            continue
        key = tuple(np.round(eq / -eq[n], 9))
        groups.setdefault(key, (eq, set()))[1].update(int(i) for i in simp)
    facets, used = [], set()
    for eq, idx in groups.values():
        nz = eq[n]
        a = -eq[:n] / nz
        b = -eq[n + 1] / nz
        idx = sorted(i for i in idx if abs(P[i] @ a + b - z[i]) <= 1e-9 * (1 + abs(z[i])))
        facets.append((tuple(idx), a, float(b)))
        used.update(idx)
    verts = [int(i) for i in H.vertices if i != m]
    return _LowerHull(facets, np.array(sorted(verts), dtype=int))


def prune(v):
    """Drop pieces that are nowhere strictly active."""
    Y, c = v.slopes, v.offsets
    # equal slopes: keep the largest offset
    keys = {}
    for i, y in enumerate(Y):
        k = tuple(np.round(y, 12))
        if k not in keys or c[i] > c[keys[k]]:
            keys[k] = i
    idx = np.array(sorted(keys.values()))
    Y, c = Y[idx], c[idx]
    if len(Y) <= 1:
        return MaxAffineFunc(Y, c)
    fr = _frame(Y)
    if fr is None:
        return MaxAffineFunc(Y[:1], c[:1])
    coords, _ = fr
    lh = _lower_hull(coords, -c)
    return MaxAffineFunc(Y[lh.vertices], c[lh.vertices])


def _frame(Y):
    """Coordinates of Y in its affine hull, or None for a single point."""
    k = _affine_rank(Y)
    if k == 0:
        return None
    y0 = Y[0]
    _, _, Vt = np.linalg.svd(Y - y0, full_matrices=len(Y) < Y.shape[1])
    B = Vt[:k]
    return (Y - y0) @ B.T, (y0, B)


# ------------------------------------------------------------------ conjugates


def conjugate(u):
    """Legendre transform u*(y) = sup_x <x, y> - u(x).

    PolyhedralFunc with bounded domain -> MaxAffineFunc (pieces at cell vertices);
    PolyhedralFunc with full domain   -> PolyhedralFunc (through its max-affine form);
    MaxAffineFunc                      -> PolyhedralFunc on conv(slopes).
    """
    if isinstance(u, MaxAffineFunc):
        return _conjugate_max_affine(u)
    if u.bounded_domain:
        Y, c = [], []
        for cell in u.cells:
            Y.append(cell.vertices)
            c.append(-cell.value(cell.vertices))
        return prune(MaxAffineFunc(np.vstack(Y), np.concatenate(c)))
    if u.full_domain:
        return _conjugate_max_affine(to_max_affine(u))
    raise Unsupported("conjugate of a function with unbounded, non-full domain")


def to_max_affine(u):
    """Max-affine form of a convex polyhedral function finite on all of R^n."""
    if isinstance(u, MaxAffineFunc):
        return u
    if not u.full_domain:
        raise Unsupported("only functions finite on R^n have a max-affine form")
    return prune(MaxAffineFunc(np.array([c.slope for c in u.cells]), np.array([c.offset for c in u.cells])))


def _conjugate_max_affine(v):
    v = prune(v)
    Y, c = v.slopes, v.offsets
    n = v.dim
    fr = _frame(Y)
    if fr is None:
        # v = <y0, x> + c0: conjugate is -c0 on {y0}
        P = gc.hull(Y[:1])
        return PolyhedralFunc((cell_from_polytope(P, np.zeros(n), -c[0]),), n)
    coords, (y0, B) = fr
    lh = _lower_hull(coords, -c)
    cells = []
    for idx, a_sub, b_sub in lh.facets:
        P = gc.hull(Y[list(idx)])
        # lift the affine map from frame coordinates: value = a_sub·B(y - y0) + b_sub
        a = B.T @ a_sub
        cells.append(cell_from_polytope(P, a, b_sub - float(a @ y0)))
    return PolyhedralFunc(tuple(cells), n)


def max_affine_cells(v):
    """Primal cell complex of a max-affine function: regions where each piece is active.

    Vertices of the region of piece i are the slopes of v* on the lower
    facets containing (y_i, -c_i); its recession cone is the normal cone of
    conv(slopes) at y_i.
    """
    v = prune(v)
    Y, c = v.slopes, v.offsets
    n = v.dim
    if _affine_rank(Y) < n:
        raise NotCoercive(_escape_direction(Y), "slopes do not span R^n")
    lh = _lower_hull(Y, -c)
    verts = {i: [] for i in range(len(Y))}
    for idx, a, _ in lh.facets:
        for i in idx:
            verts[i].append(a)
    outward = _outward_normals(Y)
    cells = []
    for i in range(len(Y)):
        if not verts[i]:
            continue
        rays = outward.get(i, [])
        A = Y - Y[i]
        d = c[i] - c
        keep = np.linalg.norm(A, axis=1) > 0
        cells.append(make_cell(np.array(verts[i]), Y[i], c[i], np.array(rays) if rays else None,
                               hrep=(A[keep], d[keep])))
    return PolyhedralFunc(tuple(cells), n, full_domain=True, family=("max_affine", v))


def _outward_normals(Y):
    """For each slope on the boundary of conv(Y), outward normals of the boundary facets through it."""
    n = Y.shape[1]
    Q = gc.hull(Y)
    out = {}
    if n == 1:
        out.setdefault(int(np.argmin(Y[:, 0])), []).append(np.array([-1.0]))
        out.setdefault(int(np.argmax(Y[:, 0])), []).append(np.array([1.0]))
        return out
    A, d = Q.halfspaces()
    for a, off in zip(A, d):
        on = np.where(np.abs(Y @ a - off) <= 1e-9 * (1 + abs(off)))[0]
        for i in on:
            out.setdefault(int(i), []).append(a)
    return out


def as_polyhedral(u):
    return max_affine_cells(u) if isinstance(u, MaxAffineFunc) else u


def _escape_direction(Y):
    """A unit r with max_i <y_i, r> <= 0 when 0 is not interior to conv(Y)."""
    n = Y.shape[1]
    if _affine_rank(Y) < n:
        y0 = Y[0]
        _, _, Vt = np.linalg.svd(Y - y0, full_matrices=len(Y) < Y.shape[1])
        r = Vt[-1]
        return r if r @ y0 <= 0 else -r
    A, d = gc.hull(Y).halfspaces()
    i = int(np.argmin(d))
    return A[i]


# ------------------------------------------------------------------ coercivity


def coercivity_witness(u):
    """(a, b) with u(x) >= a|x| + b, certified on all vertices and rays."""
    if isinstance(u, MaxAffineFunc):
        Y = u.slopes
        if _affine_rank(Y) < u.dim:
            raise NotCoercive(_escape_direction(Y), "slopes do not span R^n")
        A, d = gc.hull(Y).halfspaces()
        if np.min(d) <= 1e-12:
            raise NotCoercive(A[int(np.argmin(d))], "0 is not interior to the slope hull")
        u = max_affine_cells(u)
    a = 1.0
    for c in u.cells:
        for r in c.rays:
            g = float(c.slope @ r) / float(np.linalg.norm(r))
            if g <= 1e-12:
                raise NotCoercive(r / np.linalg.norm(r), "slope does not grow along a recession ray")
            a = min(a, g)
    V = np.vstack([c.vertices for c in u.cells])
    vmin = min(float(np.min(c.value(c.vertices))) for c in u.cells)
    b = vmin - a * float(np.max(np.linalg.norm(V, axis=1)))
    return CoercivityWitness(a, b)


# ------------------------------------------------------------------ sublevels


def _cell_sublevel_points(c, t):
    """Points whose hull is {x in cell: <a, x> + b <= t}."""
    s = c.value(c.vertices) - t
    pos, neg = s > 0, s <= 0
    pts = [c.vertices[neg]]
    if pos.any() and neg.any():
        I, J = np.where(neg)[0], np.where(pos)[0]
        lam = s[I][:, None] / (s[I][:, None] - s[J][None, :])
        V = c.vertices
        pts.append((V[I][:, None, :] + lam[..., None] * (V[J][None, :, :] - V[I][:, None, :])).reshape(-1, c.dim))
    if len(c.rays) and neg.any():
        g = c.rays @ c.slope
        if np.any(g <= 0):
            raise NotCoercive(c.rays[int(np.argmin(g))], "unbounded sublevel set")
        V = c.vertices[neg]
        lam = -s[neg][:, None] / g[None, :]
        pts.append((V[:, None, :] + lam[..., None] * c.rays[None, :, :]).reshape(-1, c.dim))
    return np.vstack(pts) if pts else np.zeros((0, c.dim))


def sublevel(u, t):
    """{u <= t} as a polytope; EmptyBody below the minimum."""
    u = as_polyhedral(u)
    pts = [_cell_sublevel_points(c, t) for c in u.cells]
    pts = np.vstack(pts)
    if len(pts) == 0:
        return gc.EmptyBody(u.dim)
    return gc.hull(pts)


def cell_sublevel(c, t):
    pts = _cell_sublevel_points(c, t)
    if len(pts) == 0:
        return gc.EmptyBody(c.dim)
    return gc.hull(pts)


# ---------------------------------------------------------------- lattice ops


def _intersect_cells(c1, c2):
    """c1 ∩ c2 as a bounded polytope (at least one cell must be bounded)."""
    if c1.bounded:
        base, other = c1, c2
    elif c2.bounded:
        base, other = c2, c1
    else:
        raise Unsupported("intersection of two unbounded cells")
    R = base.body
    for a, b in zip(other.A, other.d):
        nrm = np.linalg.norm(a)
        if nrm == 0:
            continue
        R = gc.clip(R, a, b)
        if gc.is_empty(R):
            break
    return R


def _overlay(u, v, combine):
    """Common refinement of two cell complexes, one cell at a time."""
    out = []
    for c1 in u.cells:
        for c2 in v.cells:
            R = _intersect_cells(c1, c2)
            if gc.is_empty(R):
                continue
            out.extend(combine(R, c1, c2))
    if not out:
        return None
    top = max(P.affine_dim for P, _, _ in out)
    cells = tuple(cell_from_polytope(P, a, b) for P, a, b in out if P.affine_dim == top)
    return PolyhedralFunc(cells, u.dim)


def add(u, v):
    """Pointwise sum."""
    if isinstance(u, MaxAffineFunc) and isinstance(v, MaxAffineFunc):
        Y = (u.slopes[:, None, :] + v.slopes[None, :, :]).reshape(-1, u.dim)
        c = (u.offsets[:, None] + v.offsets[None, :]).reshape(-1)
        return prune(MaxAffineFunc(Y, c))
    u, v = _overlay_operand(u, v), _overlay_operand(v, u)
    if u.full_domain and v.full_domain:
        return max_affine_cells(add(to_max_affine(u), to_max_affine(v)))
    res = _overlay(u, v, lambda R, c1, c2: [(R, c1.slope + c2.slope, c1.offset + c2.offset)])
    if res is None:
        raise EmptyBodyError("sum has empty domain")
    return res


def pointwise_max(u, v):
    """u ∨ v."""
    if isinstance(u, MaxAffineFunc) and isinstance(v, MaxAffineFunc):
        return prune(MaxAffineFunc(np.vstack([u.slopes, v.slopes]), np.concatenate([u.offsets, v.offsets])))
    u, v = _overlay_operand(u, v), _overlay_operand(v, u)
    if u.full_domain and v.full_domain:
        return max_affine_cells(pointwise_max(to_max_affine(u), to_max_affine(v)))

    def combine(R, c1, c2):
        da, db = c1.slope - c2.slope, c1.offset - c2.offset
        if np.linalg.norm(da) <= 1e-14:
            return [(R, c1.slope, c1.offset) if db >= 0 else (R, c2.slope, c2.offset)]
        h = gc.Hyperplane.from_normal(da, -db)  # u >= v on H+
        plus, minus = gc.split_by_hyperplane(R, h)
        out = []
        if not gc.is_empty(plus):
            out.append((plus, c1.slope, c1.offset))
        if not gc.is_empty(minus):
            out.append((minus, c2.slope, c2.offset))
        return out

    res = _overlay(u, v, combine)
    if res is None:
        raise EmptyBodyError("u ∨ v has empty domain")
    return res


def _certification_points(fs, seed=0, per_cell=32):
    rng = np.random.default_rng(seed)
    pts = []
    for f in fs:
        for c in f.cells:
            V = c.vertices
            if len(c.rays):
                V = np.vstack([V, (V[:, None, :] + c.rays[None, :, :]).reshape(-1, c.dim)])
            pts.append(V)
            w = rng.dirichlet(np.ones(len(V)), size=per_cell)
            pts.append(w @ V)
    return np.vstack(pts)


def pointwise_min(u, v, tol=1e-8):
    """u ∧ v, computed as (max(u*, v*))* and certified against min(u, v)."""
    u, v = as_polyhedral(u), as_polyhedral(v)
    cand = conjugate(pointwise_max(conjugate(u), conjugate(v)))
    cand = as_polyhedral(cand)
    X = _certification_points([cand, u, v])
    lhs = evaluate(cand, X)
    rhs = np.minimum(evaluate(u, X), evaluate(v, X))
    both_inf = np.isinf(lhs) & np.isinf(rhs)
    fin = np.isfinite(lhs) & np.isfinite(rhs)
    mismatch = ~(both_inf | fin)
    err = np.max(np.abs(lhs[fin] - rhs[fin]), initial=0.0)
    if mismatch.any() or err > tol:
        raise NonConvexMin(f"min(u, v) is not convex (residual {err if not mismatch.any() else np.inf})")
    return cand


def restrict(u, normal, offset):
    """u + ind{<normal, x> <= offset}."""
    u = as_polyhedral(u)
    cells = []
    for c in u.cells:
        if c.bounded:
            P = gc.clip(c.body, normal, offset)
        else:
            pts = _clip_unbounded_points(c, np.asarray(normal, float), float(offset))
            P = gc.hull(pts) if len(pts) else gc.EmptyBody(u.dim)
        if not gc.is_empty(P):
            cells.append((P, c.slope, c.offset))
    if not cells:
        raise EmptyBodyError("restriction has empty domain")
    top = max(P.affine_dim for P, _, _ in cells)
    return PolyhedralFunc(tuple(cell_from_polytope(P, a, b) for P, a, b in cells if P.affine_dim == top), u.dim)


def _clip_unbounded_points(c, nrm, off):
    """Bounded cell ∩ halfspace, for unbounded cells whose rays all leave it."""
    g = c.rays @ nrm
    if np.any(g <= 0):
        raise Unsupported("halfspace does not bound the cell")
    s = c.vertices @ nrm - off
    neg = s <= 0
    pts = [c.vertices[neg]]
    I, J = np.where(neg)[0], np.where(~neg)[0]
    if len(I) and len(J):
        lam = s[I][:, None] / (s[I][:, None] - s[J][None, :])
        V = c.vertices
        pts.append((V[I][:, None, :] + lam[..., None] * (V[J][None, :, :] - V[I][:, None, :])).reshape(-1, c.dim))
    if len(I):
        lam = -s[I][:, None] / g[None, :]
        pts.append((c.vertices[I][:, None, :] + lam[..., None] * c.rays[None, :, :]).reshape(-1, c.dim))
    return np.vstack(pts)


@dataclass(frozen=True)
class SplitPair:
    u: PolyhedralFunc
    v: PolyhedralFunc
    normal: np.ndarray
    offset: float
    alpha: float | None


def split_pair(w, normal, offset, alpha=None):
    """Two functions agreeing with w on opposite sides of a hyperplane.

    alpha None: u = w + ind{L <= 0}, v = w + ind{L >= 0};
    alpha > 0:  u = w + alpha·max(L, 0), v = w + alpha·max(-L, 0);
    with L(x) = <normal, x> - offset.  In both cases u ∧ v = w.
    """
    w = as_polyhedral(w)
    nrm = np.asarray(normal, dtype=float)
    if alpha is None:
        return SplitPair(restrict(w, nrm, offset), restrict(w, -nrm, -offset), nrm, float(offset), None)
    n = w.dim
    hinge_up = MaxAffineFunc(np.vstack([np.zeros(n), alpha * nrm]), [0.0, -alpha * offset])
    hinge_dn = MaxAffineFunc(np.vstack([np.zeros(n), -alpha * nrm]), [0.0, alpha * offset])
    return SplitPair(add(w, hinge_up), add(w, hinge_dn), nrm, float(offset), alpha)


def _regions(v):
    """Regions where each piece of v is maximal, known only by H-representation."""
    Y, c = v.slopes, v.offsets
    cells = []
    for i in range(len(Y)):
        A, d = Y - Y[i], c[i] - c
        keep = np.linalg.norm(A, axis=1) > 0
        cells.append(Cell(_ro(np.zeros((0, v.dim))), _ro(np.zeros((0, v.dim))), _ro(Y[i]), float(c[i]),
                          _ro(A[keep]), _ro(d[keep]), None))
    return _RegionComplex(tuple(cells), v.dim)


@dataclass(frozen=True, eq=False)
class _RegionComplex:
    """Unbounded cells known only by H-representation; usable against bounded cells."""

    cells: tuple
    dim: int
    full_domain: bool = False


def _overlay_operand(u, other):
    """Cell complex of u suitable for overlaying with ``other``."""
    if isinstance(u, MaxAffineFunc):
        if isinstance(other, PolyhedralFunc) and other.bounded_domain:
            return _regions(u)
        return max_affine_cells(u)
    return u


def inf_conv(u, v):
    """u □ v = (u* + v*)*."""
    if u.dim != v.dim:
        raise DimensionMismatch()
    coercivity_witness(u)
    coercivity_witness(v)
    s = add(conjugate(as_polyhedral(u)), conjugate(as_polyhedral(v)))
    return as_polyhedral(conjugate(s))


# ------------------------------------------------------------- epi-convergence


@dataclass(frozen=True)
class EpiDiagnostic:
    levels: tuple
    distances: tuple  # distances[i][k] for level i and sequence index k
    skipped: tuple


def epi_convergence_diag(sequence, u, levels):
    """Hausdorff distance of {u_k <= t} to {u <= t} per level t."""
    m = min_value(u)
    kept, skipped, dist = [], [], []
    for t in levels:
        if abs(t - m) <= 1e-9:
            skipped.append(t)
            continue
        target = sublevel(u, t)
        row = []
        for uk in sequence:
            S = sublevel(uk, t)
            if gc.is_empty(S) or gc.is_empty(target):
                row.append(0.0 if gc.is_empty(S) and gc.is_empty(target) else np.inf)
            else:
                row.append(gc.hausdorff_distance(S, target))
        kept.append(t)
        dist.append(tuple(row))
    return EpiDiagnostic(tuple(kept), tuple(dist), tuple(skipped))


def epigraph_check(u, v, w, X, grid=None):
    """Max over X of |w(x) - min_y u(x - y) + v(y)| with y from a sample grid."""
    if grid is None:
        raise ValidationError("epigraph_check", "sample grid required")
    out = 0.0
    for x in np.atleast_2d(X):
        vals = evaluate(as_polyhedral(u), x - grid) + evaluate(as_polyhedral(v), grid)
        out = max(out, abs(float(np.min(vals)) - evaluate(as_polyhedral(w), x)))
    return out


def linprog_min(u):
    """Minimum of u via linear programming over each cell (independent of vertex scan)."""
    u = as_polyhedral(u)
    best = np.inf
    for c in u.cells:
        res = linprog(c.slope, A_ub=c.A, b_ub=c.d, bounds=[(None, None)] * u.dim, method="highs")
        if res.status == 0:
            best = min(best, res.fun + c.offset)
        elif res.status == 3:
            raise NotCoercive(np.zeros(u.dim), "unbounded cell minimum")
    return float(best)
