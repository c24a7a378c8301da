# -*- coding: utf-8 -*-
"""
Integration over polytopes and their boundaries.

Polynomials are integrated exactly with the Grundmann-Moeller simplex rules
(rational nodes and weights, exact up to degree 2s+1) on a fan triangulation.
The boundary measure on facet F_j is dσ = (Euclidean measure on F_j)/|u_j|,
which for a facet simplex with edge vectors E equals
|det[u_j; E]| / |u_j|^2 times the reference simplex measure: rational for
rational data.

Smooth non-polynomial integrands (x log x terms, log det ratios) go through
the numeric helpers at the bottom of the module.
"""
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from errors import PolytopeError
from geometry import ConvexRegion, LabelledPolytope, as_region, clip
from numbers_util import Point, Scalar, determinant
from polynomials import PolynomialFunc

Domain = Union[LabelledPolytope, ConvexRegion]

# -----------------------
# Grundmann-Moeller rules
# -----------------------


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative ints summing to ``total``."""
    for bars in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


@lru_cache(maxsize=None)
def grundmann_moeller_rule(s: int, n: int) -> Tuple[Tuple[Fraction, Tuple[Fraction, ...]], ...]:
    """
    Rule of exactness degree 2s+1 on the n-simplex, as (weight, barycentric
    point) pairs. Weights sum to 1/n!, the volume of the unit simplex.
    """
    d = 2 * s + 1
    weights = {}
    for i in range(s + 1):
        w = Fraction((-1) ** i * (d + n - 2 * i) ** d, 2 ** (2 * s) * factorial(i) * factorial(d + n - i))
        denom = d + n - 2 * i
        for beta in _compositions(s - i, n + 1):
            point = tuple(Fraction(2 * b + 1, denom) for b in beta)
            weights[point] = weights.get(point, Fraction(0)) + w
    return tuple((w, p) for p, w in weights.items() if w != 0)


def integrate_simplex(simplex: Sequence[Point], f: PolynomialFunc, scale: Scalar) -> Scalar:
    """∫ f over a k-simplex; ``scale`` is k! times the simplex measure."""
    k = len(simplex) - 1
    rule = grundmann_moeller_rule(f.degree // 2, k)
    dim = len(simplex[0])
    total: Scalar = Fraction(0)
    for w, bary in rule:
        x = tuple(sum((b * v[i] for b, v in zip(bary, simplex)), Fraction(0)) for i in range(dim))
        total = total + w * f(x)
    return total * scale


def _edge_rows(simplex: Sequence[Point]) -> List[List[Scalar]]:
    base = simplex[0]
    return [[p[i] - base[i] for i in range(len(base))] for p in simplex[1:]]


def _label_norm_sq(region: ConvexRegion, j: int) -> Scalar:
    return sum((a * a for a in region.halfspaces[j].normal), Fraction(0))


# -----------------------
# Exact polynomial integrals
# -----------------------


def integrate_interior(P: Domain, f: PolynomialFunc) -> Scalar:
    """∫_P f dx."""
    region = as_region(P)
    total: Scalar = Fraction(0)
    for s in region.simplices():
        total = total + integrate_simplex(s, f, abs(determinant(_edge_rows(s))))
    return total


def integrate_facet(P: Domain, j: int, f: PolynomialFunc) -> Scalar:
    """∫_{F_j} f dσ; for a clipped region, the part of facet j inside it."""
    region = as_region(P)
    if not 0 <= j < region.n_labels:
        raise PolytopeError(f"invalid facet index {j}; polytope has {region.n_labels} facets")
    u = list(region.halfspaces[j].normal)
    norm_sq = _label_norm_sq(region, j)
    total: Scalar = Fraction(0)
    for s in region.simplices(region.face_ids(j), region.dim - 1):
        scale = abs(determinant([u] + _edge_rows(s))) / norm_sq
        total = total + integrate_simplex(s, f, scale)
    return total


def integrate_boundary(P: Domain, f: PolynomialFunc) -> Scalar:
    """∫_{∂P} f dσ."""
    region = as_region(P)
    total: Scalar = Fraction(0)
    for j in range(region.n_labels):
        total = total + integrate_facet(region, j, f)
    return total


def volume(P: Domain) -> Scalar:
    return as_region(P).volume()


def integrate_crease(P: Domain, crease, g: PolynomialFunc) -> Scalar:
    """∫_P max(0, <h,x> - c) g dx, by clipping at the crease."""
    region = clip(P, crease.h, crease.c)
    if region.is_empty:
        return Fraction(0)
    return integrate_interior(region, crease.active_piece().as_polynomial() * g)


def integrate_crease_boundary(P: Domain, crease, g: PolynomialFunc) -> Scalar:
    """∫_{∂P} max(0, <h,x> - c) g dσ; each facet is split at the crease trace."""
    region = clip(P, crease.h, crease.c)
    if region.is_empty:
        return Fraction(0)
    return integrate_boundary(region, crease.active_piece().as_polynomial() * g)


# -----------------------
# Numeric integrals for smooth non-polynomial integrands
# -----------------------


def _map_simplex(simplex: Sequence[Point], t: Sequence[float]) -> np.ndarray:
    base = np.array(simplex[0], dtype=float)
    edges = np.array(_edge_rows(simplex), dtype=float).reshape(len(simplex) - 1, len(base))
    return base + np.asarray(t, dtype=float) @ edges


def _adaptive_simplex(simplex: Sequence[Point], func: Callable[[np.ndarray], float], scale: float) -> float:
    k = len(simplex) - 1
    if k == 0:
        return scale * float(func(np.array(simplex[0], dtype=float)))

    def integrand(*t):
        return func(_map_simplex(simplex, t))

    ranges = [lambda *outer: (0.0, 1.0 - sum(outer))] * k
    value, _ = integrate.nquad(integrand, ranges, opts={"limit": 100, "epsabs": 1e-12, "epsrel": 1e-10})
    return scale * value


def integrate_interior_numeric(P: Domain, func: Callable[[np.ndarray], float]) -> float:
    """Adaptive ∫_P func dx (scipy nquad on each fan simplex)."""
    region = as_region(P)
    total = 0.0
    for s in region.simplices():
        total += _adaptive_simplex(s, func, float(abs(determinant(_edge_rows(s)))))
    return total


def integrate_boundary_numeric(P: Domain, func: Callable[[np.ndarray], float]) -> float:
    """Adaptive ∫_{∂P} func dσ."""
    region = as_region(P)
    total = 0.0
    for j in range(region.n_labels):
        u = list(region.halfspaces[j].normal)
        norm_sq = float(_label_norm_sq(region, j))
        for s in region.simplices(region.face_ids(j), region.dim - 1):
            scale = float(abs(determinant([u] + _edge_rows(s)))) / norm_sq
            total += _adaptive_simplex(s, func, scale)
    return total


@lru_cache(maxsize=None)
def collapsed_gauss_rule(k: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre rule on the unit k-simplex through the collapsed
    (Duffy) map t_i = s_i Π_{j<i} (1 - s_j). Nodes are strictly interior;
    weights sum to 1/k!.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    grids = np.meshgrid(*([x] * k), indexing="ij")
    wgrids = np.meshgrid(*([w] * k), indexing="ij")
    s = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    t = np.empty_like(s)
    shrink = np.ones(s.shape[0])
    for i in range(k):
        t[:, i] = s[:, i] * shrink
        weights = weights * shrink
        shrink = shrink * (1.0 - s[:, i])
    return t, weights


def integrate_interior_smooth(P: Domain, func: Callable[[np.ndarray], np.ndarray], order: int = 24) -> float:
    """
    ∫_P func dx for integrands smooth up to the boundary; ``func`` takes an
    (N, dim) array of interior points and returns N values.
    """
    region = as_region(P)
    t, w = collapsed_gauss_rule(region.dim, order)
    total = 0.0
    for s in region.simplices():
        pts = _map_simplex(s, t)
        total += float(abs(determinant(_edge_rows(s)))) * float(np.dot(w, func(pts)))
    return total


def interior_sample_points(P: Domain, order: int = 6) -> np.ndarray:
    """Strictly interior points, the nodes of a collapsed rule on each fan simplex."""
    region = as_region(P)
    t, _ = collapsed_gauss_rule(region.dim, order)
    return np.concatenate([_map_simplex(s, t) for s in region.simplices()], axis=0)
