# -*- coding: utf-8 -*-
"""
Labelled Delzant polytopes.

A polytope is given by labels L_j(x) = <u_j, x> + o_j with primitive integer
normals u_j; P = {L_j >= 0}. Vertices are enumerated exactly from
dim-subsets of facet hyperplanes, and ConvexRegion supports the halfspace
clipping and fan triangulation used by the quadrature module.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import gcd
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from errors import PolytopeError
from numbers_util import (
    FLOAT_TOL, Point, Scalar, determinant, is_exact, is_zero, jsonable, mean_point,
    rank, solve_linear, to_point, to_scalar,
)
from polynomials import PolynomialFunc

MAX_DIM = 4

# -----------------------
# Affine functions
# -----------------------


@dataclass(frozen=True)
class AffineFunc:
    """x ↦ <normal, x> + offset."""
    normal: Tuple[Scalar, ...]
    offset: Scalar

    def __post_init__(self):
        object.__setattr__(self, "normal", to_point(self.normal))
        object.__setattr__(self, "offset", to_scalar(self.offset))

    @property
    def dim(self) -> int:
        return len(self.normal)

    def __call__(self, x: Sequence[Scalar]) -> Scalar:
        total = self.offset
        for n, xi in zip(self.normal, x):
            total = total + n * xi
        return total

    def __add__(self, other: "AffineFunc") -> "AffineFunc":
        return AffineFunc(tuple(a + b for a, b in zip(self.normal, other.normal)), self.offset + other.offset)

    def __sub__(self, other: "AffineFunc") -> "AffineFunc":
        return AffineFunc(tuple(a - b for a, b in zip(self.normal, other.normal)), self.offset - other.offset)

    def __neg__(self) -> "AffineFunc":
        return AffineFunc(tuple(-a for a in self.normal), -self.offset)

    def scale(self, t: Scalar) -> "AffineFunc":
        return AffineFunc(tuple(t * a for a in self.normal), t * self.offset)

    @property
    def is_zero(self) -> bool:
        return all(is_zero(a) for a in self.normal) and is_zero(self.offset)

    def as_polynomial(self) -> PolynomialFunc:
        return PolynomialFunc.affine(self.normal, self.offset)

    @classmethod
    def zero(cls, dim: int) -> "AffineFunc":
        return cls((0,) * dim, 0)

    def to_dict(self) -> Dict[str, Any]:
        return {"normal": jsonable(self.normal), "offset": jsonable(self.offset)}


# -----------------------
# Convex regions (clipped polytopes)
# -----------------------


def _affine_dim(points: Sequence[Point]) -> int:
    if not points:
        return -1
    base = points[0]
    return rank([[p[i] - base[i] for i in range(len(base))] for p in points[1:]])


def _same_point(a: Point, b: Point) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return max(abs(float(x) - float(y)) for x, y in zip(a, b)) <= FLOAT_TOL


@dataclass(frozen=True)
class ConvexRegion:
    """
    Bounded convex region {h(x) >= 0 for h in halfspaces} with its vertices.

    ``tight[k]`` is the set of halfspace indices vanishing at vertex k. The
    first ``n_labels`` halfspaces are the facet labels of the parent polytope;
    later ones come from clipping.
    """
    dim: int
    halfspaces: Tuple[AffineFunc, ...]
    vertices: Tuple[Point, ...]
    tight: Tuple[FrozenSet[int], ...]
    n_labels: int

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def is_full_dimensional(self) -> bool:
        return _affine_dim(list(self.vertices)) == self.dim

    def face_ids(self, index: int) -> Tuple[int, ...]:
        return tuple(k for k, t in enumerate(self.tight) if index in t)

    def _edges(self) -> List[Tuple[int, int]]:
        edges = []
        for a, b in combinations(range(len(self.vertices)), 2):
            common = self.tight[a] & self.tight[b]
            normals = [self.halfspaces[i].normal for i in common]
            if rank(normals) == self.dim - 1:
                edges.append((a, b))
        return edges

    def clip(self, h: Sequence[Any], c: Any) -> "ConvexRegion":
        """Intersect with {<h, x> >= c}."""
        g = AffineFunc(tuple(h), -to_scalar(c))
        new = len(self.halfspaces)
        values = [g(v) for v in self.vertices]
        tol = FLOAT_TOL * max(1.0, max((abs(float(a)) for a in g.normal), default=1.0))
        signs = [0 if is_zero(s, tol) else (1 if s > 0 else -1) for s in values]

        points: List[Point] = []
        tight: List[FrozenSet[int]] = []

        def add(p: Point, t: FrozenSet[int]):
            for k, q in enumerate(points):
                if _same_point(p, q):
                    tight[k] = tight[k] | t
                    return
            points.append(p)
            tight.append(t)

        for k, v in enumerate(self.vertices):
            if signs[k] > 0:
                add(v, self.tight[k])
            elif signs[k] == 0:
                add(v, self.tight[k] | {new})
        for a, b in self._edges():
            if signs[a] * signs[b] < 0:
                sa, sb = values[a], values[b]
                t = sa / (sa - sb)
                va, vb = self.vertices[a], self.vertices[b]
                p = tuple(x + t * (y - x) for x, y in zip(va, vb))
                add(p, (self.tight[a] & self.tight[b]) | {new})
        return ConvexRegion(self.dim, self.halfspaces + (g,), tuple(points), tuple(tight), self.n_labels)

    def simplices(self, ids: Optional[Sequence[int]] = None, target_dim: Optional[int] = None) -> List[Tuple[Point, ...]]:
        """
        Fan triangulation of the face spanned by ``ids`` (all vertices by
        default) from its vertex mean. Returns [] when the face does not have
        ``target_dim`` (default: the region dimension).
        """
        ids = frozenset(range(len(self.vertices)) if ids is None else ids)
        target = self.dim if target_dim is None else target_dim
        if not ids or _affine_dim([self.vertices[k] for k in sorted(ids)]) != target:
            return []
        return self._fan(ids, target)

    def _fan(self, ids: FrozenSet[int], d: int) -> List[Tuple[Point, ...]]:
        pts = [self.vertices[k] for k in sorted(ids)]
        if len(pts) == d + 1:
            return [tuple(pts)]
        center = mean_point(pts)
        out: List[Tuple[Point, ...]] = []
        seen = set()
        for i in range(len(self.halfspaces)):
            sub = frozenset(k for k in ids if i in self.tight[k])
            if len(sub) < d or sub == ids or sub in seen:
                continue
            if _affine_dim([self.vertices[k] for k in sorted(sub)]) != d - 1:
                continue
            seen.add(sub)
            for simplex in self._fan(sub, d - 1):
                out.append((center,) + simplex)
        return out

    def volume(self) -> Scalar:
        total: Scalar = Fraction(0)
        for s in self.simplices():
            total = total + simplex_volume(s)
        return total


def simplex_volume(simplex: Sequence[Point]) -> Scalar:
    """Lebesgue volume of a full-dimensional simplex."""
    dim = len(simplex) - 1
    base = simplex[0]
    rows = [[p[i] - base[i] for i in range(dim)] for p in simplex[1:]]
    det = determinant(rows)
    fact = 1
    for k in range(2, dim + 1):
        fact *= k
    return abs(det) / fact


# -----------------------
# Labelled polytopes
# -----------------------


@dataclass(frozen=True)
class LabelledPolytope:
    dim: int
    labels: Tuple[AffineFunc, ...]
    vertices: Tuple[Point, ...] = field(compare=False)
    vertex_facets: Tuple[FrozenSet[int], ...] = field(compare=False)
    facet_density: Tuple[float, ...] = field(compare=False)

    @property
    def normals(self) -> List[Tuple[int, ...]]:
        return [tuple(int(a) for a in L.normal) for L in self.labels]

    @property
    def offsets(self) -> List[Scalar]:
        return [L.offset for L in self.labels]

    @property
    def is_exact(self) -> bool:
        return is_exact(*self.offsets)

    @cached_property
    def region(self) -> ConvexRegion:
        return ConvexRegion(self.dim, self.labels, self.vertices, self.vertex_facets, len(self.labels))

    def facet_vertices(self, j: int) -> List[Point]:
        return [v for v, t in zip(self.vertices, self.vertex_facets) if j in t]

    def contains(self, x: Sequence[Any], tol: float = FLOAT_TOL) -> bool:
        return all(L(x) >= (0 if is_exact(tuple(x)) and self.is_exact else -tol) for L in self.labels)

    def is_interior(self, x: Sequence[Any], tol: float = FLOAT_TOL) -> bool:
        if is_exact(tuple(x)) and self.is_exact:
            return all(L(x) > 0 for L in self.labels)
        return all(L(x) > tol for L in self.labels)

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        arr = np.array(self.vertices, dtype=float)
        return arr.min(axis=0), arr.max(axis=0)

    def diameter(self) -> float:
        lo, hi = self.bounding_box()
        return float(np.linalg.norm(hi - lo))

    def translate(self, shift: Sequence[Any]) -> "LabelledPolytope":
        """The polytope P + shift with the same normals."""
        t = to_point(shift)
        offsets = [L.offset - sum(n * s for n, s in zip(L.normal, t)) for L in self.labels]
        return build_polytope(self.normals, offsets)

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "normals": [list(n) for n in self.normals], "offsets": jsonable(self.offsets)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LabelledPolytope":
        poly = build_polytope(data["normals"], data["offsets"])
        if "dim" in data and int(data["dim"]) != poly.dim:
            raise PolytopeError(f"declared dim {data['dim']} does not match normals of length {poly.dim}")
        return poly


def _primitive(normal: Sequence[Any], offset: Any, index: int) -> Tuple[Tuple[int, ...], Scalar]:
    ints = []
    for a in normal:
        s = to_scalar(a)
        if isinstance(s, float):
            if not s.is_integer():
                raise PolytopeError(f"label {index}: normal entries must be integers, got {list(normal)}")
            s = Fraction(int(s))
        if s.denominator != 1:
            raise PolytopeError(f"label {index}: normal entries must be integers, got {list(normal)}")
        ints.append(int(s))
    if all(a == 0 for a in ints):
        raise PolytopeError(f"label {index}: normal must be nonzero")
    g = 0
    for a in ints:
        g = gcd(g, abs(a))
    return tuple(a // g for a in ints), to_scalar(offset) / g


def _check_bounded(normals: Sequence[Tuple[int, ...]], dim: int) -> None:
    # recession cone {d : U d >= 0} must be {0}
    a_ub = -np.array(normals, dtype=float)
    b_ub = np.zeros(len(normals))
    for i in range(dim):
        for s in (1.0, -1.0):
            c = np.zeros(dim)
            c[i] = -s
            res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(-1, 1)] * dim, method="highs")
            if res.status == 0 and -res.fun > 1e-9:
                raise PolytopeError("region is unbounded: the normals do not positively span the space")


def build_polytope(normals: Sequence[Sequence[Any]], offsets: Sequence[Any]) -> LabelledPolytope:
    """Build and validate a labelled polytope from facet normals and offsets."""
    if len(normals) != len(offsets):
        raise PolytopeError(f"{len(normals)} normals but {len(offsets)} offsets")
    if not normals:
        raise PolytopeError("no labels given")
    dim = len(normals[0])
    if dim < 1:
        raise PolytopeError("normals must have at least one entry")
    if dim > MAX_DIM:
        raise PolytopeError(f"dimension {dim} exceeds the supported maximum {MAX_DIM}")
    if any(len(n) != dim for n in normals):
        raise PolytopeError("normals have inconsistent lengths")
    if len(normals) < dim + 1:
        raise PolytopeError(f"need at least {dim + 1} labels in dimension {dim}, got {len(normals)}")

    labels: List[AffineFunc] = []
    seen: Dict[Tuple[Tuple[int, ...], Scalar], int] = {}
    for j, (n, o) in enumerate(zip(normals, offsets)):
        u, off = _primitive(n, o, j)
        key = (u, off)
        if key in seen:
            raise PolytopeError(f"redundant label {j}: duplicates label {seen[key]}")
        seen[key] = j
        labels.append(AffineFunc(u, off))

    _check_bounded([L.normal for L in labels], dim)

    exact = is_exact(*[L.offset for L in labels])
    vertices: List[Point] = []
    tight: List[FrozenSet[int]] = []
    for subset in combinations(range(len(labels)), dim):
        rows = [list(labels[j].normal) for j in subset]
        if is_zero(determinant(rows)):
            continue
        x = tuple(solve_linear(rows, [-labels[j].offset for j in subset]))
        vals = [L(x) for L in labels]
        if exact:
            if any(v < 0 for v in vals):
                continue
            t = frozenset(j for j, v in enumerate(vals) if v == 0)
        else:
            if any(v < -FLOAT_TOL for v in vals):
                continue
            t = frozenset(j for j, v in enumerate(vals) if abs(v) <= FLOAT_TOL)
        if any(_same_point(x, y) for y in vertices):
            continue
        vertices.append(x)
        tight.append(t)

    if not vertices or _affine_dim(vertices) < dim:
        raise PolytopeError("polytope has empty interior")

    for j in range(len(labels)):
        face = [v for v, t in zip(vertices, tight) if j in t]
        if _affine_dim(face) != dim - 1:
            raise PolytopeError(f"redundant label {j}: its facet has dimension {_affine_dim(face)}, expected {dim - 1}")

    density = tuple(1.0 / float(np.linalg.norm(np.array(L.normal, dtype=float))) for L in labels)
    return LabelledPolytope(dim, tuple(labels), tuple(vertices), tuple(tight), density)


# -----------------------
# Standard polytopes
# -----------------------


def interval(alpha: Any = 0, beta: Any = 1) -> LabelledPolytope:
    a, b = to_scalar(alpha), to_scalar(beta)
    return build_polytope([[1], [-1]], [-a, b])


def standard_simplex(dim: int = 2) -> LabelledPolytope:
    normals = [[1 if i == k else 0 for i in range(dim)] for k in range(dim)] + [[-1] * dim]
    return build_polytope(normals, [0] * dim + [1])


def unit_cube(dim: int = 2) -> LabelledPolytope:
    normals, offsets = [], []
    for k in range(dim):
        e = [1 if i == k else 0 for i in range(dim)]
        normals += [e, [-a for a in e]]
        offsets += [0, 1]
    return build_polytope(normals, offsets)


# -----------------------
# Delzant check, clipping, barycenter
# -----------------------


@dataclass(frozen=True)
class DelzantReport:
    passed: bool
    vertex: Optional[Point] = None
    facets: Tuple[int, ...] = ()
    determinant: Optional[int] = None
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({
            "passed": self.passed,
            "vertex": self.vertex,
            "facets": list(self.facets),
            "determinant": self.determinant,
            "reason": self.reason,
        })


def check_delzant(P: LabelledPolytope) -> DelzantReport:
    """Smoothness: at each vertex the dim tight normals form a lattice basis."""
    for v, t in zip(P.vertices, P.vertex_facets):
        facets = tuple(sorted(t))
        if len(facets) != P.dim:
            return DelzantReport(False, v, facets, None,
                                 f"vertex {jsonable(v)} lies on {len(facets)} facets; a Delzant vertex lies on {P.dim}")
        det = int(determinant([list(P.labels[j].normal) for j in facets]))
        if abs(det) != 1:
            return DelzantReport(False, v, facets, abs(det),
                                 f"normals of facets {list(facets)} at vertex {jsonable(v)} have |det| = {abs(det)}")
    return DelzantReport(True, reason="all vertices are smooth")


def as_region(P: Union[LabelledPolytope, ConvexRegion]) -> ConvexRegion:
    return P.region if isinstance(P, LabelledPolytope) else P


def clip(P: Union[LabelledPolytope, ConvexRegion], h: Sequence[Any], c: Any) -> ConvexRegion:
    """P ∩ {<h, x> >= c}; possibly empty, not necessarily Delzant."""
    return as_region(P).clip(h, c)


def barycenter(P: Union[LabelledPolytope, ConvexRegion]) -> Point:
    region = as_region(P)
    total: Scalar = Fraction(0)
    acc = [Fraction(0)] * region.dim
    for s in region.simplices():
        vol = simplex_volume(s)
        c = mean_point(list(s))
        total = total + vol
        acc = [a + vol * ci for a, ci in zip(acc, c)]
    return tuple(a / total for a in acc)
