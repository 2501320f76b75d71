"""Dehn invariants of 3-polytopes as formal symbols sum l_i ⊗ alpha_i.

Angles live in R / Q·pi: a term whose angle is a rational multiple of pi is
dropped, and symbol equality is decided by integer-relation search among pi
and the surviving angles.  Distinctness is certified only up to the stated
relation height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from . import geom_core as gc
from .errors import MissingFacets, NotFullDimensional, PrecisionTooLow, ValidationError
from .pslq import pslq

DEFAULT_HEIGHT = 10**4
DEFAULT_PRECISION = 64


@dataclass(frozen=True)
class DehnSymbol:
    """Canonical formal sum of (length, angle) terms.

    Angles are mpmath numbers carrying ``precision`` decimal digits.
    """

    terms: tuple
    precision: int = DEFAULT_PRECISION

    def is_empty(self):
        return not self.terms

    def __add__(self, other):
        prec = min(self.precision, other.precision)
        return _merge(self.terms + other.terms, prec)

    def __neg__(self):
        return DehnSymbol(tuple((-l, a) for l, a in self.terms), self.precision)

    def __sub__(self, other):
        return self + (-other)

    def float_terms(self):
        return [(float(l), float(a)) for l, a in self.terms]


def _merge(terms, precision, length_tol=0.0):
    tol = mp.mpf(10) ** (-precision + 4)
    out = []
    with mp.workdps(precision):
        for l, a in sorted(terms, key=lambda t: t[1]):
            if out and abs(out[-1][1] - a) <= tol:
                out[-1][0] += l
            else:
                out.append([l, a])
    return DehnSymbol(tuple((l, a) for l, a in out if abs(l) > length_tol), precision)


def _recognised_cosine(c, precision):
    """Exact value of a cosine whose square is a small rational, else None."""
    q = Fraction(c * c).limit_denominator(1000)
    if abs(float(q) - c * c) > 1e-12:
        return None
    with mp.workdps(precision):
        root = mp.sqrt(mp.mpf(q.numerator) / q.denominator)
        return root if c >= 0 else -root


def _normal_cosine(na, nb, precision):
    rec = _recognised_cosine(float(na @ nb), precision)
    if rec is not None:
        return rec
    with mp.workdps(precision):
        a = [mp.mpf(float(v)) for v in na]
        b = [mp.mpf(float(v)) for v in nb]
        dot = mp.fsum(x * y for x, y in zip(a, b))
        return dot / mp.sqrt(mp.fsum(x * x for x in a) * mp.fsum(y * y for y in b))


def _check_body(P):
    if gc.is_empty(P) or P.dim != 3 or not P.is_full_dim:
        raise NotFullDimensional("need a full-dimensional 3-polytope")
    if P.facets is None:
        raise MissingFacets("polytope has no H-representation")


def edge_angles(P, precision=DEFAULT_PRECISION):
    """(length, dihedral angle as an mpmath number) for every edge."""
    _check_body(P)
    V = P.vertices
    out = []
    for a, b, fa, fb in gc.edges3(P):
        c = _normal_cosine(P.facets[fa][0].normal, P.facets[fb][0].normal, precision)
        with mp.workdps(precision):
            ang = mp.pi - mp.acos(c)
        out.append((float(np.linalg.norm(V[a] - V[b])), ang))
    return out


def dihedral_angles(P):
    """One (edge length, dihedral angle) pair per edge, in double precision."""
    return [(l, float(a)) for l, a in edge_angles(P, 30)]


def is_rational_multiple_of_pi(angle, precision, height):
    with mp.workdps(precision):
        res = pslq([mp.pi, angle], height * math.sqrt(2), precision)
    return res.status == "relation" and max(abs(c) for c in res.relation) <= height


def symbol_reduce(terms, precision=DEFAULT_PRECISION, height_bound=DEFAULT_HEIGHT):
    """Merge equal angles and delete rational multiples of pi."""
    kept = [(l, a) for l, a in terms if not is_rational_multiple_of_pi(a, precision, height_bound)]
    return _merge(tuple(kept), precision)


def dehn_symbol(P, precision=DEFAULT_PRECISION, height_bound=DEFAULT_HEIGHT):
    return symbol_reduce(edge_angles(P, precision), precision, height_bound)


def symbol_union(*symbols):
    out = symbols[0]
    for s in symbols[1:]:
        out = out + s
    return out


# ------------------------------------------------------------------ verdicts


@dataclass(frozen=True)
class RelationVerdict:
    kind: str  # "Equal", "Distinct" or "Unknown"
    certificate: dict = field(default_factory=dict)
    height_bound: int = DEFAULT_HEIGHT
    precision: int = DEFAULT_PRECISION


def symbol_equal(a, b, height_bound=DEFAULT_HEIGHT, precision=DEFAULT_PRECISION,
                 angle_tol=1e-12, length_tol=1e-9):
    """Decide a = b in R ⊗ (R / Q·pi) up to relations of height height_bound.

    Each angle of the difference symbol is written over a basis of angles
    that admit no relation with pi of height <= height_bound; the symbol is
    zero exactly when every basis coordinate of the length vector vanishes.
    Angles closer than ``angle_tol`` are identified first, absorbing the
    double-precision drift of rigidly moved copies.
    """
    if precision < 32:
        raise PrecisionTooLow("precision must be at least 32 digits")
    if height_bound < 10:
        raise ValidationError("symbol_equal", "height_bound must be at least 10")
    scale = max(1.0, sum(abs(l) for l, _ in a.terms + b.terms))
    ltol = length_tol * scale
    diff = []
    for l, ang in sorted(a.terms + tuple((-l, x) for l, x in b.terms), key=lambda t: t[1]):
        if diff and abs(float(diff[-1][1] - ang)) <= angle_tol:
            diff[-1][0] += l
        else:
            diff.append([l, ang])
    diff = [(l, ang) for l, ang in diff if abs(l) > ltol]
    cert = {"relations": [], "basis": [], "coordinates": []}
    if not diff:
        return RelationVerdict("Equal", cert, height_bound, precision)
    basis = []
    coords = []  # per difference term: dict basis index -> Fraction
    certified = True
    with mp.workdps(precision):
        for l, ang in diff:
            vec = [mp.pi] + [basis_ang for basis_ang in basis] + [ang]
            if len(vec) * math.log10(height_bound) > precision - 10:
                raise PrecisionTooLow(
                    f"{len(vec)} numbers at height {height_bound} need more than {precision} digits"
                )
            res = pslq(vec, height_bound * math.sqrt(len(vec)), precision)
            if res.status == "relation" and res.relation[-1] != 0 and max(map(abs, res.relation)) <= height_bound:
                c = res.relation
                cert["relations"].append(list(c))
                coords.append({k: Fraction(-c[k + 1], c[-1]) for k in range(len(basis)) if c[k + 1]})
            elif res.status == "bound" or (res.status == "relation" and res.relation[-1] == 0):
                coords.append({len(basis): Fraction(1)})
                basis.append(ang)
                cert["basis"].append(mp.nstr(ang, 20))
            else:
                certified = False
                coords.append({len(basis): Fraction(1)})
                basis.append(ang)
    totals = [0.0] * len(basis)
    for (l, _), co in zip(diff, coords):
        for k, q in co.items():
            totals[k] += float(q) * l
    cert["coordinates"] = totals
    if all(abs(t) <= ltol for t in totals):
        return RelationVerdict("Equal", cert, height_bound, precision)
    if certified:
        return RelationVerdict("Distinct", cert, height_bound, precision)
    return RelationVerdict("Unknown", cert, height_bound, precision)


# ---------------------------------------------------------- Hilbert's third


def regular_tetrahedron(volume=1.0):
    """Alternate corners of a cube of side c; edge c*sqrt(2), volume c^3 / 3."""
    c = (3.0 * volume) ** (1.0 / 3.0)
    return gc.hull([(0, 0, 0), (c, c, 0), (c, 0, c), (0, c, c)])


def cube(volume=1.0):
    s = volume ** (1.0 / 3.0)
    return gc.box([0, 0, 0], [s, s, s])


@dataclass(frozen=True)
class Hilbert3Report:
    cube_volume: float
    tetra_volume: float
    cube_symbol: DehnSymbol
    tetra_symbol: DehnSymbol
    verdict: RelationVerdict


def hilbert3_report(volume_tol=1e-12, volume=1.0, height_bound=DEFAULT_HEIGHT, precision=DEFAULT_PRECISION):
    C, T = cube(volume), regular_tetrahedron(volume)
    vc, vt = gc.volume(C), gc.volume(T)
    if abs(vc - vt) > volume_tol * max(1.0, volume):
        raise ValidationError("hilbert3_report", f"volumes differ by {abs(vc - vt)}")
    sc = dehn_symbol(C, precision, height_bound)
    st = dehn_symbol(T, precision, height_bound)
    return Hilbert3Report(vc, vt, sc, st, symbol_equal(st, sc, height_bound, precision))
