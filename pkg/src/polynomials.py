# -*- coding: utf-8 -*-
"""
Multivariate polynomials over the rationals (exact) or the reals (double).

PolynomialFunc wraps a sympy ``Poly`` in the generators x1..x_dim and keeps a
flat (monomial, coefficient) table for fast pointwise evaluation, exact when
both coefficients and the point are rational.
"""
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from numbers_util import Scalar, from_sympy, is_exact, to_scalar, to_sympy

Monomial = Tuple[int, ...]


@lru_cache(maxsize=None)
def variables(dim: int) -> Tuple[sp.Symbol, ...]:
    """The coordinate symbols x1..x_dim."""
    return tuple(sp.Symbol(f"x{i + 1}", real=True) for i in range(dim))


class PolynomialFunc:
    """Polynomial in ``dim`` variables; immutable."""

    __slots__ = ("dim", "poly", "_terms")

    def __init__(self, poly: sp.Poly, dim: int):
        self.dim = dim
        self.poly = poly
        terms = []
        for monom, coeff in poly.terms():
            c = from_sympy(coeff)
            if c != 0:
                terms.append((tuple(int(a) for a in monom), c))
        self._terms = tuple(terms)

    # -----------------------
    # Construction
    # -----------------------

    @classmethod
    def from_terms(cls, terms: Mapping[Monomial, Any], dim: int) -> "PolynomialFunc":
        coeffs = {tuple(m): to_scalar(c) for m, c in terms.items()}
        for m in coeffs:
            if len(m) != dim:
                raise ValueError(f"monomial {m} does not have {dim} exponents")
        exact = is_exact(*coeffs.values())
        data = {m: to_sympy(c) for m, c in coeffs.items() if c != 0}
        if not data:
            data = {(0,) * dim: sp.Integer(0)}
        poly = sp.Poly.from_dict(data, *variables(dim), domain="QQ" if exact else "RR")
        return cls(poly, dim)

    @classmethod
    def constant(cls, value: Any, dim: int) -> "PolynomialFunc":
        return cls.from_terms({(0,) * dim: value}, dim)

    @classmethod
    def coordinate(cls, index: int, dim: int) -> "PolynomialFunc":
        monom = tuple(1 if i == index else 0 for i in range(dim))
        return cls.from_terms({monom: 1}, dim)

    @classmethod
    def affine(cls, normal: Sequence[Any], offset: Any) -> "PolynomialFunc":
        dim = len(normal)
        terms: Dict[Monomial, Any] = {(0,) * dim: offset}
        for i, n in enumerate(normal):
            terms[tuple(1 if k == i else 0 for k in range(dim))] = n
        return cls.from_terms(terms, dim)

    @classmethod
    def from_expr(cls, expr: Union[str, sp.Expr], dim: int) -> "PolynomialFunc":
        gens = variables(dim)
        local = {str(g): g for g in gens}
        e = sp.sympify(expr, locals=local) if isinstance(expr, str) else sp.sympify(expr)
        e = e.subs({sp.Symbol(str(g)): g for g in gens})
        return cls._wrap(sp.Poly(sp.expand(e), *gens), dim)

    @classmethod
    def from_table(cls, table: Mapping[str, Any], dim: int) -> "PolynomialFunc":
        """Read a {"a,b": coeff} table (exponents comma separated)."""
        terms = {}
        for key, coeff in table.items():
            monom = tuple(int(t) for t in str(key).split(","))
            terms[monom] = coeff
        return cls.from_terms(terms, dim)

    @classmethod
    def _wrap(cls, poly: sp.Poly, dim: int) -> "PolynomialFunc":
        dom = poly.get_domain()
        if not (dom.is_QQ or dom.is_ZZ or dom.is_RR):
            poly = poly.set_domain("RR")
        elif dom.is_ZZ:
            poly = poly.set_domain("QQ")
        return cls(poly, dim)

    # -----------------------
    # Inspection
    # -----------------------

    def terms(self) -> Dict[Monomial, Scalar]:
        return dict(self._terms)

    def to_table(self) -> Dict[str, Scalar]:
        return {",".join(str(a) for a in m): c for m, c in sorted(self._terms)}

    @property
    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(m) for m, _ in self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for _, c in self._terms)

    def as_expr(self) -> sp.Expr:
        return self.poly.as_expr()

    def coefficient(self, monom: Monomial) -> Scalar:
        return self.terms().get(tuple(monom), Fraction(0))

    # -----------------------
    # Arithmetic
    # -----------------------

    def _coerce(self, other: Any) -> "PolynomialFunc":
        if isinstance(other, PolynomialFunc):
            if other.dim != self.dim:
                raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        return PolynomialFunc.constant(other, self.dim)

    def __add__(self, other: Any) -> "PolynomialFunc":
        return PolynomialFunc._wrap(self.poly + self._coerce(other).poly, self.dim)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "PolynomialFunc":
        return PolynomialFunc._wrap(self.poly - self._coerce(other).poly, self.dim)

    def __rsub__(self, other: Any) -> "PolynomialFunc":
        return PolynomialFunc._wrap(self._coerce(other).poly - self.poly, self.dim)

    def __neg__(self) -> "PolynomialFunc":
        return PolynomialFunc._wrap(-self.poly, self.dim)

    def __mul__(self, other: Any) -> "PolynomialFunc":
        return PolynomialFunc._wrap(self.poly * self._coerce(other).poly, self.dim)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PolynomialFunc":
        if k < 0:
            raise ValueError("negative powers are not polynomial")
        return PolynomialFunc._wrap(self.poly ** k, self.dim)

    def diff(self, index: int) -> "PolynomialFunc":
        return PolynomialFunc._wrap(self.poly.diff(variables(self.dim)[index]), self.dim)

    def gradient(self) -> List["PolynomialFunc"]:
        return [self.diff(i) for i in range(self.dim)]

    def hessian(self) -> List[List["PolynomialFunc"]]:
        grad = self.gradient()
        return [[grad[i].diff(j) for j in range(self.dim)] for i in range(self.dim)]

    def antiderivative(self, index: int) -> "PolynomialFunc":
        return PolynomialFunc._wrap(self.poly.integrate(variables(self.dim)[index]), self.dim)

    def substitute(self, mapping: Mapping[int, Union["PolynomialFunc", Any]]) -> "PolynomialFunc":
        """Replace coordinate x_i by a polynomial (or scalar) for each key i."""
        gens = variables(self.dim)
        subs = {}
        for i, val in mapping.items():
            subs[gens[i]] = val.as_expr() if isinstance(val, PolynomialFunc) else to_sympy(to_scalar(val))
        expr = sp.expand(self.as_expr().xreplace(subs))
        return PolynomialFunc._wrap(sp.Poly(expr, *gens), self.dim)

    def translate(self, shift: Sequence[Any]) -> "PolynomialFunc":
        """x ↦ f(x − shift)."""
        gens = variables(self.dim)
        return self.substitute({
            i: PolynomialFunc.from_expr(gens[i] - to_sympy(to_scalar(s)), self.dim)
            for i, s in enumerate(shift)
        })

    # -----------------------
    # Evaluation
    # -----------------------

    def __call__(self, point: Sequence[Any]) -> Scalar:
        total: Scalar = Fraction(0)
        for monom, coeff in self._terms:
            term = coeff
            for x, a in zip(point, monom):
                if a:
                    term = term * x ** a
            total = total + term
        return total

    def evaluate_grid(self, points: np.ndarray) -> np.ndarray:
        """Vectorized float evaluation at an (N, dim) array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(pts.shape[0])
        for monom, coeff in self._terms:
            term = np.full(pts.shape[0], float(coeff))
            for i, a in enumerate(monom):
                if a:
                    term = term * pts[:, i] ** a
            out += term
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolynomialFunc):
            try:
                other = PolynomialFunc.constant(other, self.dim)
            except (TypeError, ValueError):
                return NotImplemented
        return self.dim == other.dim and self.terms() == other.terms()

    def __hash__(self) -> int:
        return hash((self.dim, self._terms))

    def __repr__(self) -> str:
        return f"PolynomialFunc({self.as_expr()})"


def affine_basis(dim: int) -> List[PolynomialFunc]:
    """The functions 1, x1, ..., x_dim."""
    return [PolynomialFunc.constant(1, dim)] + [PolynomialFunc.coordinate(i, dim) for i in range(dim)]


def monomials_up_to(degree: int, dim: int) -> List[Monomial]:
    """All exponent tuples of total degree <= degree, graded then lexicographic."""
    out: List[Monomial] = []

    def rec(prefix: Tuple[int, ...], left: int, slots: int) -> Iterable[Monomial]:
        if slots == 1:
            yield prefix + (left,)
            return
        for a in range(left, -1, -1):
            yield from rec(prefix + (a,), left - a, slots - 1)

    for d in range(degree + 1):
        out.extend(sorted(rec((), d, dim), reverse=True))
    return out
