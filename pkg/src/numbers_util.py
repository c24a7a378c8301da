# -*- coding: utf-8 -*-
"""
Scalar helpers.

Values are exact ``Fraction`` whenever the inputs are rational and plain
``float`` otherwise. Mixed arithmetic degrades to float, and every equality
test on floats uses FLOAT_TOL.
"""
import math
from fractions import Fraction
from typing import Any, Iterable, List, Sequence, Tuple, Union

import numpy as np
import sympy as sp

Scalar = Union[Fraction, float]
Point = Tuple[Scalar, ...]

FLOAT_TOL = 1e-10


def to_scalar(value: Any) -> Scalar:
    """Coerce to Fraction (ints, rational strings, sympy rationals) or float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError(f"boolean is not a number: {value!r}")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, (float, np.floating, sp.Float)):
        f = float(value)
        if not math.isfinite(f):
            raise ValueError(f"non-finite number: {value!r}")
        return f
    if isinstance(value, sp.Basic) and value.is_number:
        return float(value)
    raise TypeError(f"unsupported scalar type {type(value).__name__}: {value!r}")


def parse_number(value: Any) -> Scalar:
    """Config reader: finite floats are read as the rational of their decimal text."""
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number: {value!r}")
        return Fraction(repr(value))
    return to_scalar(value)


def to_point(values: Iterable[Any]) -> Point:
    return tuple(to_scalar(v) for v in values)


def is_exact(*values: Any) -> bool:
    """True when every value (or every entry of nested sequences) is a Fraction."""
    for v in values:
        if isinstance(v, (list, tuple)):
            if not is_exact(*v):
                return False
        elif not isinstance(v, Fraction):
            return False
    return True


def is_zero(value: Scalar, tol: float = FLOAT_TOL) -> bool:
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) <= tol


def sign(value: Scalar, tol: float = FLOAT_TOL) -> int:
    if is_zero(value, tol):
        return 0
    return 1 if value > 0 else -1


def to_sympy(value: Scalar) -> sp.Expr:
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    return sp.Float(float(value))


def from_sympy(value: Any) -> Scalar:
    value = sp.sympify(value)
    if value.is_Rational:
        return Fraction(int(value.p), int(value.q))
    return float(value)


def determinant(rows: Sequence[Sequence[Scalar]]) -> Scalar:
    """Exact determinant for rational rows, numpy otherwise."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if is_exact(*rows):
        return from_sympy(sp.Matrix([[to_sympy(x) for x in r] for r in rows]).det(method="bareiss"))
    return float(np.linalg.det(np.array(rows, dtype=float)))


def solve_linear(rows: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> List[Scalar]:
    """Solve a square nonsingular system exactly when possible."""
    if is_exact(*rows) and is_exact(*rhs):
        a = sp.Matrix([[to_sympy(x) for x in r] for r in rows])
        b = sp.Matrix([to_sympy(x) for x in rhs])
        return [from_sympy(x) for x in a.LUsolve(b)]
    sol = np.linalg.solve(np.array(rows, dtype=float), np.array(rhs, dtype=float))
    return [float(x) for x in sol]


def rank(vectors: Sequence[Sequence[Scalar]], tol: float = 1e-9) -> int:
    if len(vectors) == 0:
        return 0
    return int(np.linalg.matrix_rank(np.array(vectors, dtype=float), tol=tol))


def mean_point(points: Sequence[Point]) -> Point:
    n = len(points)
    dim = len(points[0])
    return tuple(sum((p[i] for p in points), Fraction(0)) / n for i in range(dim))


def jsonable(value: Any) -> Any:
    """Convert results into JSON-compatible values; rationals become 'p/q' strings."""
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        f = float(value)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        if math.isnan(f):
            return "nan"
        return f
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, sp.Basic):
        return jsonable(from_sympy(value)) if value.is_number else str(value)
    return value
