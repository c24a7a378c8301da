# -*- coding: utf-8 -*-
"""
Fibration weights (v, w) and the extremal affine function.

For factors (p_a, c_a, d_a, Scal_a):

    v(x)       = Π_a (<p_a, x> + c_a)^{d_a}
    base_term  = v · Σ_a Scal_a / (<p_a, x> + c_a)     (a polynomial, d_a >= 1)
    w          = v · ℓ_ext − base_term

ℓ_ext is fixed by F_{v,w}(f) = 2∫_{∂P} f v dσ − ∫_P f w dx vanishing on
affine f, a symmetric positive definite (dim+1)-square Gram system.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import WeightError
from geometry import AffineFunc, LabelledPolytope
from numbers_util import FLOAT_TOL, Scalar, is_exact, jsonable, solve_linear, to_point, to_scalar
from polynomials import PolynomialFunc, affine_basis
from quadrature import integrate_boundary, integrate_interior

FUTAKI_SIGNS = ("consistent", "flipped")
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class FibrationFactor:
    p: Tuple[Scalar, ...]
    c: Scalar
    d: int = 1
    scal: Scalar = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "p", to_point(self.p))
        object.__setattr__(self, "c", to_scalar(self.c))
        object.__setattr__(self, "scal", to_scalar(self.scal))
        if int(self.d) != self.d or self.d < 1:
            raise WeightError(f"base dimension d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        for a in self.p:
            if isinstance(a, float) or a.denominator != 1:
                raise WeightError(f"p must be an integer vector, got {list(self.p)}")

    @property
    def affine(self) -> AffineFunc:
        return AffineFunc(self.p, self.c)

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({"p": list(self.p), "c": self.c, "d": self.d, "scal": self.scal})

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FibrationFactor":
        return cls(tuple(data["p"]), data["c"], int(data.get("d", 1)), data.get("scal", 0))


@dataclass(frozen=True)
class FibrationData:
    factors: Tuple[FibrationFactor, ...] = ()

    @property
    def degree(self) -> int:
        return sum(f.d for f in self.factors)

    def with_offsets(self, offsets: Sequence[Any]) -> "FibrationData":
        if len(offsets) != len(self.factors):
            raise WeightError(f"{len(offsets)} offsets for {len(self.factors)} factors")
        return FibrationData(tuple(
            FibrationFactor(f.p, c, f.d, f.scal) for f, c in zip(self.factors, offsets)
        ))

    def translate(self, shift: Sequence[Any]) -> "FibrationData":
        """Data for P + shift: c_a ↦ c_a − <p_a, shift>."""
        t = to_point(shift)
        return self.with_offsets([f.c - sum(p * s for p, s in zip(f.p, t)) for f in self.factors])

    def check_positive(self, P: LabelledPolytope) -> None:
        for a, f in enumerate(self.factors):
            if len(f.p) != P.dim:
                raise WeightError(f"factor {a}: p has {len(f.p)} entries, polytope has dimension {P.dim}")
            for x in P.vertices:
                if f.affine(x) <= 0:
                    raise WeightError(
                        f"factor {a}: <p, x> + c = {jsonable(f.affine(x))} is not positive at vertex {jsonable(x)}"
                    )

    def to_dict(self) -> Dict[str, Any]:
        return {"factors": [f.to_dict() for f in self.factors]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FibrationData":
        return cls(tuple(FibrationFactor.from_dict(f) for f in data.get("factors", [])))


@dataclass(frozen=True)
class WeightSystem:
    v: PolynomialFunc
    w: PolynomialFunc
    ell_ext: Optional[AffineFunc] = None
    base_term: Optional[PolynomialFunc] = None
    fibration: Optional[FibrationData] = None
    futaki_sign: str = "consistent"

    @property
    def dim(self) -> int:
        return self.v.dim

    @property
    def is_fibration(self) -> bool:
        return self.fibration is not None

    @property
    def is_exact(self) -> bool:
        return self.v.is_exact and self.w.is_exact

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({
            "v": self.v.to_table(),
            "w": self.w.to_table(),
            "ell_ext": self.ell_ext.to_dict() if self.ell_ext else None,
            "base_term": self.base_term.to_table() if self.base_term is not None else None,
            "fibration": self.fibration.to_dict() if self.fibration else None,
            "futaki_sign": self.futaki_sign,
        })


def _check_sign(futaki_sign: str) -> None:
    if futaki_sign not in FUTAKI_SIGNS:
        raise WeightError(f"futaki_sign must be one of {FUTAKI_SIGNS}, got {futaki_sign!r}")


def make_v(P: LabelledPolytope, fib: FibrationData) -> PolynomialFunc:
    fib.check_positive(P)
    v = PolynomialFunc.constant(1, P.dim)
    for f in fib.factors:
        v = v * f.affine.as_polynomial() ** f.d
    return v


def make_base_term(P: LabelledPolytope, fib: FibrationData) -> PolynomialFunc:
    """v · Σ Scal_a/(<p_a,x>+c_a), one factor cancelled per summand."""
    total = PolynomialFunc.constant(0, P.dim)
    for a, fa in enumerate(fib.factors):
        if fa.scal == 0:
            continue
        term = PolynomialFunc.constant(fa.scal, P.dim) * fa.affine.as_polynomial() ** (fa.d - 1)
        for b, fb in enumerate(fib.factors):
            if b != a:
                term = term * fb.affine.as_polynomial() ** fb.d
        total = total + term
    return total


def polynomial_futaki(P: LabelledPolytope, v: PolynomialFunc, w: PolynomialFunc, f: PolynomialFunc,
                      futaki_sign: str = "consistent") -> Scalar:
    """F_{v,w}(f) for polynomial f."""
    boundary = 2 * integrate_boundary(P, f * v)
    interior = integrate_interior(P, f * w)
    return boundary - interior if futaki_sign == "consistent" else boundary + interior


def gram_system(P: LabelledPolytope, v: PolynomialFunc, base_term: PolynomialFunc,
                futaki_sign: str = "consistent") -> Tuple[List[List[Scalar]], List[Scalar]]:
    basis = affine_basis(P.dim)
    n = len(basis)
    a = [[integrate_interior(P, basis[i] * basis[j] * v) for j in range(n)] for i in range(n)]
    b = []
    for f in basis:
        boundary = 2 * integrate_boundary(P, f * v)
        b.append((boundary if futaki_sign == "consistent" else -boundary) + integrate_interior(P, f * base_term))
    return a, b


def solve_extremal_affine(P: LabelledPolytope, fib: FibrationData, futaki_sign: str = "consistent") -> AffineFunc:
    """The unique affine ℓ_ext making F_{v,w} vanish on affine functions."""
    _check_sign(futaki_sign)
    v = make_v(P, fib)
    return _solve_gram(P, v, make_base_term(P, fib), futaki_sign)


def _solve_gram(P: LabelledPolytope, v: PolynomialFunc, base: PolynomialFunc, futaki_sign: str) -> AffineFunc:
    a, b = gram_system(P, v, base, futaki_sign)
    af = np.array(a, dtype=float)
    eig = np.linalg.eigvalsh(af)
    cond = float(eig.max() / eig.min()) if eig.min() > 0 else float("inf")
    if eig.min() <= 0 or cond > MAX_CONDITION:
        raise WeightError(f"Gram system is ill-conditioned (condition number {cond:.3e}); is v positive on P?")
    z = solve_linear(a, b)
    return AffineFunc(tuple(z[1:]), z[0])


def make_w(P: LabelledPolytope, fib: FibrationData, ell_ext: AffineFunc) -> PolynomialFunc:
    return make_v(P, fib) * ell_ext.as_polynomial() - make_base_term(P, fib)


def build_weight_system(P: LabelledPolytope, fib: Optional[FibrationData] = None,
                        futaki_sign: str = "consistent") -> WeightSystem:
    """v, base_term, ℓ_ext and w for a fibration (empty fibration: v ≡ 1)."""
    _check_sign(futaki_sign)
    fib = fib or FibrationData()
    v = make_v(P, fib)
    base = make_base_term(P, fib)
    ell = _solve_gram(P, v, base, futaki_sign)
    w = v * ell.as_polynomial() - base
    return WeightSystem(v=v, w=w, ell_ext=ell, base_term=base, fibration=fib, futaki_sign=futaki_sign)


def check_v_positive(P: LabelledPolytope, v: PolynomialFunc, samples: int = 16) -> None:
    for x in P.vertices:
        if v(x) <= 0:
            raise WeightError(f"v = {jsonable(v(x))} is not positive at vertex {jsonable(x)}")
    lo, hi = P.bounding_box()
    axes = [np.linspace(a, b, samples) for a, b in zip(lo, hi)]
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    inside = np.array([P.contains(tuple(p)) for p in grid])
    if inside.any():
        vals = v.evaluate_grid(grid[inside])
        k = int(np.argmin(vals))
        if vals[k] <= 0:
            raise WeightError(f"v = {vals[k]:.3e} is not positive at {tuple(grid[inside][k])}")


def explicit_weight_system(P: LabelledPolytope, v: PolynomialFunc, w: PolynomialFunc,
                           futaki_sign: str = "consistent") -> WeightSystem:
    """User-supplied polynomial weights; ℓ_ext and base_term are left empty."""
    _check_sign(futaki_sign)
    if v.dim != P.dim or w.dim != P.dim:
        raise WeightError(f"weights must be polynomials in {P.dim} variables")
    check_v_positive(P, v)
    return WeightSystem(v=v, w=w, futaki_sign=futaki_sign)


def affine_residuals(P: LabelledPolytope, ws: WeightSystem) -> List[Scalar]:
    """F_{v,w} on 1, x1, ..., x_dim; all zero for a normalized weight system."""
    return [polynomial_futaki(P, ws.v, ws.w, f, ws.futaki_sign) for f in affine_basis(P.dim)]


def max_affine_residual(P: LabelledPolytope, ws: WeightSystem) -> float:
    return max(abs(float(r)) for r in affine_residuals(P, ws))


def is_normalized(P: LabelledPolytope, ws: WeightSystem, tol: float = FLOAT_TOL) -> bool:
    res = affine_residuals(P, ws)
    if is_exact(*res):
        return all(r == 0 for r in res)
    return max(abs(float(r)) for r in res) <= tol


def extremal_split(ell_ext: AffineFunc) -> Tuple[Tuple[Scalar, ...], Scalar, bool]:
    """(ξ_ext, c_ext, is_constant) for ℓ_ext = <ξ_ext, x> + c_ext."""
    xi = ell_ext.normal
    constant = all((a == 0) if isinstance(a, Fraction) else abs(a) <= FLOAT_TOL for a in xi)
    return xi, ell_ext.offset, constant
