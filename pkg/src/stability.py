# -*- coding: utf-8 -*-
"""
Weighted Donaldson-Futaki invariant, normalized test functions and the
crease scan estimating the uniform K-stability constant.

Test functions are AffineFunc, CreaseFunction, PLMax or PolynomialFunc;
any other callable (for instance a symplectic potential) is integrated
numerically.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from errors import PolytopeError
from geometry import AffineFunc, ConvexRegion, LabelledPolytope, as_region, barycenter, clip
from numbers_util import FLOAT_TOL, Point, Scalar, is_exact, jsonable, to_point, to_scalar
from polynomials import PolynomialFunc
from quadrature import (
    integrate_boundary, integrate_boundary_numeric, integrate_interior,
    integrate_interior_numeric,
)
from weights import WeightSystem, polynomial_futaki

DEGENERATE_L1 = 1e-14
TIE_TOL = 1e-12

# -----------------------
# Test functions
# -----------------------


@dataclass(frozen=True)
class CreaseFunction:
    """f(x) = max(0, <h, x> − c)."""
    h: Tuple[Scalar, ...]
    c: Scalar

    def __post_init__(self):
        object.__setattr__(self, "h", to_point(self.h))
        object.__setattr__(self, "c", to_scalar(self.c))

    @property
    def dim(self) -> int:
        return len(self.h)

    def active_piece(self) -> AffineFunc:
        return AffineFunc(self.h, -self.c)

    def __call__(self, x: Sequence[Scalar]) -> Scalar:
        g = self.active_piece()(x)
        return g if g > 0 else Fraction(0) * g

    def normalized(self) -> "CreaseFunction":
        """Same crease with |h| = 1."""
        norm = math.sqrt(sum(float(a) ** 2 for a in self.h))
        return CreaseFunction(tuple(float(a) / norm for a in self.h), float(self.c) / norm)

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({"type": "crease", "h": list(self.h), "c": self.c})


@dataclass(frozen=True)
class PLMax:
    """f(x) = max_k L_k(x); identical pieces are merged."""
    pieces: Tuple[AffineFunc, ...]

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("PLMax needs at least one affine piece")
        unique: List[AffineFunc] = []
        for p in self.pieces:
            if p not in unique:
                unique.append(p)
        object.__setattr__(self, "pieces", tuple(unique))

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    def __call__(self, x: Sequence[Scalar]) -> Scalar:
        return max(p(x) for p in self.pieces)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "plmax", "pieces": [p.to_dict() for p in self.pieces]}


TestFunction = Union[AffineFunc, CreaseFunction, PLMax, PolynomialFunc]


def plmax_regions(P: Union[LabelledPolytope, ConvexRegion], f: PLMax) -> List[Tuple[ConvexRegion, AffineFunc]]:
    """Exact decomposition of P into the regions where each piece dominates."""
    out = []
    for k, lk in enumerate(f.pieces):
        region = as_region(P)
        for i, li in enumerate(f.pieces):
            if i == k:
                continue
            d = lk - li
            region = region.clip(d.normal, -d.offset)
            if region.is_empty:
                break
        if not region.is_empty and region.is_full_dimensional:
            out.append((region, lk))
    return out


# -----------------------
# Futaki invariant and L1 norm
# -----------------------


def _combine(boundary: Scalar, interior: Scalar, futaki_sign: str) -> Scalar:
    return boundary - interior if futaki_sign == "consistent" else boundary + interior


def _piece_futaki(region: ConvexRegion, ws: WeightSystem, piece: PolynomialFunc) -> Scalar:
    return _combine(2 * integrate_boundary(region, piece * ws.v), integrate_interior(region, piece * ws.w), ws.futaki_sign)


def futaki(P: LabelledPolytope, ws: WeightSystem, f: Any) -> Scalar:
    """F_{v,w}(f) = 2∫_{∂P} f v dσ − ∫_P f w dx."""
    if isinstance(f, PolynomialFunc):
        return polynomial_futaki(P, ws.v, ws.w, f, ws.futaki_sign)
    if isinstance(f, AffineFunc):
        return polynomial_futaki(P, ws.v, ws.w, f.as_polynomial(), ws.futaki_sign)
    if isinstance(f, CreaseFunction):
        region = clip(P, f.h, f.c)
        if region.is_empty:
            return Fraction(0)
        return _piece_futaki(region, ws, f.active_piece().as_polynomial())
    if isinstance(f, PLMax):
        total: Scalar = Fraction(0)
        for region, piece in plmax_regions(P, f):
            total = total + _piece_futaki(region, ws, piece.as_polynomial())
        return total
    if callable(f):
        return futaki_numeric(P, ws, f)
    raise TypeError(f"unsupported test function {type(f).__name__}")


def futaki_numeric(P: LabelledPolytope, ws: WeightSystem, func: Callable[[np.ndarray], float]) -> float:
    """F_{v,w} of a continuous function by adaptive quadrature."""
    v, w = ws.v, ws.w
    boundary = 2 * integrate_boundary_numeric(P, lambda x: float(func(x)) * float(v(tuple(x))))
    interior = integrate_interior_numeric(P, lambda x: float(func(x)) * float(w(tuple(x))))
    return _combine(boundary, interior, ws.futaki_sign)


def _abs_affine_integral(region: ConvexRegion, piece: AffineFunc) -> Scalar:
    poly = piece.as_polynomial()
    total: Scalar = Fraction(0)
    pos = region.clip(piece.normal, -piece.offset)
    if not pos.is_empty:
        total = total + integrate_interior(pos, poly)
    neg = region.clip(tuple(-a for a in piece.normal), piece.offset)
    if not neg.is_empty:
        total = total - integrate_interior(neg, poly)
    return total


def l1_norm(P: LabelledPolytope, f: Any) -> Scalar:
    """∫_P |f| dx."""
    if isinstance(f, CreaseFunction):
        region = clip(P, f.h, f.c)
        return Fraction(0) if region.is_empty else integrate_interior(region, f.active_piece().as_polynomial())
    if isinstance(f, AffineFunc):
        return Fraction(0) if f.is_zero else _abs_affine_integral(P.region, f)
    if isinstance(f, PLMax):
        total: Scalar = Fraction(0)
        for region, piece in plmax_regions(P, f):
            total = total + _abs_affine_integral(region, piece)
        return total
    if isinstance(f, PolynomialFunc):
        if f.is_zero:
            return Fraction(0)
        if f.degree <= 1:
            grad = tuple(f.coefficient(tuple(1 if k == i else 0 for k in range(f.dim))) for i in range(f.dim))
            return _abs_affine_integral(P.region, AffineFunc(grad, f.coefficient((0,) * f.dim)))
        return integrate_interior_numeric(P, lambda x: abs(float(f(tuple(x)))))
    if callable(f):
        return integrate_interior_numeric(P, lambda x: abs(float(f(x))))
    raise TypeError(f"unsupported test function {type(f).__name__}")


# -----------------------
# Normalization
# -----------------------


def _is_tie(a: Scalar, b: Scalar) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= TIE_TOL


def normalize(P: LabelledPolytope, f: Any, x0: Sequence[Any]) -> Any:
    """f* = f − a with a affine supporting f at x0, so f* >= 0 and f*(x0) = 0."""
    x0 = to_point(x0)
    if not P.is_interior(x0):
        raise PolytopeError(f"normalization point {jsonable(x0)} is not interior to P")
    if isinstance(f, AffineFunc):
        return AffineFunc.zero(P.dim)
    if isinstance(f, PolynomialFunc):
        value = f(x0)
        taylor = PolynomialFunc.constant(value, f.dim)
        for i, g in enumerate(f.gradient()):
            slope = g(x0)
            taylor = taylor + PolynomialFunc.affine(
                tuple(slope if k == i else 0 for k in range(f.dim)), -slope * x0[i])
        return f - taylor
    if isinstance(f, CreaseFunction):
        g = f.active_piece()
        value = g(x0)
        if _is_tie(value, Fraction(0)):
            half = g.scale(Fraction(1, 2))
            return PLMax((-half, half))
        if value > 0:
            return CreaseFunction(tuple(-a for a in f.h), -f.c)
        return f
    if isinstance(f, PLMax):
        values = [p(x0) for p in f.pieces]
        top = max(values)
        active = [p for p, val in zip(f.pieces, values) if _is_tie(val, top)]
        n = len(active)
        grad = tuple(sum((p.normal[i] for p in active), Fraction(0)) / n for i in range(P.dim))
        support = AffineFunc(grad, top - sum(g * x for g, x in zip(grad, x0)))
        return PLMax(tuple(p - support for p in f.pieces))
    raise TypeError(f"unsupported test function {type(f).__name__}")


# -----------------------
# Crease scan
# -----------------------


@dataclass
class StabilityReport:
    lambda_hat: Optional[Scalar]
    worst: Optional[Any]
    samples: int
    negatives: List[Tuple[Any, Scalar]] = field(default_factory=list)
    degenerate: int = 0
    refined: bool = False
    table: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def has_destabilizer(self) -> bool:
        return bool(self.negatives)

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({
            "lambda_hat": self.lambda_hat,
            "worst": self.worst.to_dict() if self.worst is not None else None,
            "samples": self.samples,
            "degenerate": self.degenerate,
            "refined": self.refined,
            "negatives": [dict(f.to_dict(), futaki=val) for f, val in self.negatives],
        })


def _snap(value: float) -> Scalar:
    for target in (0, 1, -1):
        if abs(value - target) < 1e-15:
            return Fraction(target)
    return value


def scan_directions(dim: int, count: int) -> List[Tuple[Scalar, ...]]:
    """Unit directions: ±1 in 1D, uniform angles in 2D, seeded sphere samples above."""
    if dim == 1:
        return [(Fraction(1),), (Fraction(-1),)]
    if dim == 2:
        return [(_snap(math.cos(2 * math.pi * k / count)), _snap(math.sin(2 * math.pi * k / count)))
                for k in range(count)]
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(count, dim))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return [tuple(float(a) for a in p) for p in pts]


def scan_offsets(P: LabelledPolytope, h: Sequence[Scalar], count: int, margin: Scalar = Fraction(1, 1000)) -> List[Scalar]:
    """Offsets across the range of <h, .> on P, a relative margin away from both ends."""
    values = [sum(a * x for a, x in zip(h, v)) for v in P.vertices]
    lo, hi = min(values), max(values)
    eps = margin * (hi - lo)
    if count == 1:
        return [(lo + hi) / 2]
    step = (hi - lo - 2 * eps) / (count - 1)
    return [lo + eps + m * step for m in range(count)]


def _crease_sample(P: LabelledPolytope, ws: WeightSystem, h, c, x0) -> Tuple[Scalar, Scalar]:
    """(F(f), |f*|_1) for the crease (h, c) normalized at x0."""
    g = AffineFunc(h, -to_scalar(c))
    gp = g.as_polynomial()
    upper = clip(P, h, c)
    lower = clip(P, tuple(-a for a in h), -to_scalar(c))
    F = Fraction(0) if upper.is_empty else _piece_futaki(upper, ws, gp)
    up_mass = Fraction(0) if upper.is_empty else integrate_interior(upper, gp)
    low_mass = Fraction(0) if lower.is_empty else -integrate_interior(lower, gp)
    at = g(x0)
    if _is_tie(at, Fraction(0)):
        l1 = (up_mass + low_mass) / 2
    elif at > 0:
        l1 = low_mass
    else:
        l1 = up_mass
    return F, l1


def _is_negative(value: Scalar) -> bool:
    if isinstance(value, Fraction):
        return value < 0
    return value < -FLOAT_TOL


def stability_scan(P: LabelledPolytope, ws: WeightSystem, directions: int = 36, offsets: int = 41,
                   refine: bool = True, x0: Optional[Sequence[Any]] = None,
                   candidates: Sequence[PLMax] = ()) -> StabilityReport:
    """Minimum of F(f)/|f*|_1 over a grid of crease functions (an upper bound for λ)."""
    x0 = to_point(x0) if x0 is not None else barycenter(P)
    best: Optional[Scalar] = None
    worst = None
    best_pos = None
    samples = 0
    degenerate = 0
    negatives: List[Tuple[Any, Scalar]] = []
    table: List[Dict[str, Any]] = []
    dirs = scan_directions(P.dim, directions)

    for di, h in enumerate(dirs):
        cs = scan_offsets(P, h, offsets)
        for ci, c in enumerate(cs):
            F, l1 = _crease_sample(P, ws, h, c, x0)
            row = {f"h{i + 1}": float(a) for i, a in enumerate(h)}
            row.update({"c": float(c), "futaki": float(F), "l1": float(l1)})
            if float(l1) < DEGENERATE_L1:
                degenerate += 1
                row["ratio"] = float("nan")
                table.append(row)
                continue
            samples += 1
            ratio = F / l1
            row["ratio"] = float(ratio)
            table.append(row)
            crease = CreaseFunction(h, c)
            if _is_negative(F):
                negatives.append((crease, F))
            if best is None or ratio < best:
                best, worst, best_pos = ratio, crease, (di, ci)

    for cand in candidates:
        F = futaki(P, ws, cand)
        l1 = l1_norm(P, normalize(P, cand, x0))
        if float(l1) < DEGENERATE_L1:
            degenerate += 1
            continue
        samples += 1
        ratio = F / l1
        if _is_negative(F):
            negatives.append((cand, F))
        if best is None or ratio < best:
            best, worst, best_pos = ratio, cand, None

    refined = False
    if refine and best_pos is not None:
        di, ci = best_pos
        h = dirs[di]
        cs = scan_offsets(P, h, offsets)
        lo = cs[max(ci - 1, 0)]
        hi = cs[min(ci + 1, len(cs) - 1)]
        if float(hi) > float(lo):
            def ratio_at(c: float) -> float:
                F, l1 = _crease_sample(P, ws, h, c, x0)
                return float(F) / float(l1) if float(l1) >= DEGENERATE_L1 else float("inf")

            res = minimize_scalar(ratio_at, bounds=(float(lo), float(hi)), method="bounded",
                                  options={"xatol": 1e-10})
            refined = True
            if res.fun < float(best):
                best, worst = float(res.fun), CreaseFunction(h, float(res.x))

    return StabilityReport(lambda_hat=best, worst=worst, samples=samples, negatives=negatives,
                           degenerate=degenerate, refined=refined, table=table)
