# -*- coding: utf-8 -*-
"""
Symplectic potentials u = u0 + correction on a labelled polytope.

u0 = ½ Σ_j L_j log L_j is the Guillemin potential; corrections are
polynomials or values on an axis-aligned lattice. The module evaluates
(inverse) Hessians, checks the boundary behaviour of inverse-Hessian fields,
computes the v-scalar curvature Scal_v(u) = −Σ (v H_ij)_{,ij} symbolically
or by finite differences, and evaluates the weighted Mabuchi energy.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from scipy import integrate as sp_integrate
from scipy.interpolate import RegularGridInterpolator
from scipy.linalg import null_space
from scipy.special import xlogy

from errors import NonConvexError, SolverError, StencilError
from geometry import AffineFunc, LabelledPolytope
from numbers_util import (
    Point, Scalar, from_sympy, is_exact, jsonable, mean_point, to_point, to_sympy,
)
from polynomials import PolynomialFunc, variables
from quadrature import (
    integrate_boundary, integrate_interior, integrate_interior_numeric, integrate_interior_smooth,
    interior_sample_points,
)
from stability import CreaseFunction, PLMax, futaki, futaki_numeric
from weights import WeightSystem, polynomial_futaki

DEGENERATE_DET = 1e-14
DEGENERATE_SHARE = 0.01

# -----------------------
# Grid corrections
# -----------------------


@dataclass(eq=False)
class GridCorrection:
    """
    Values on the lattice origin + h·k (k in the index box ``values.shape``);
    NaN marks nodes outside P.
    """
    h: float
    origin: Tuple[float, ...]
    values: np.ndarray
    _interp: Optional[RegularGridInterpolator] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.values.ndim

    def axes(self) -> List[np.ndarray]:
        return [self.origin[i] + self.h * np.arange(n) for i, n in enumerate(self.values.shape)]

    def nodes(self) -> np.ndarray:
        """All lattice nodes inside the mask, row-major."""
        grids = np.meshgrid(*self.axes(), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        return pts[~np.isnan(self.values.ravel())]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        if self._interp is None:
            self._interp = RegularGridInterpolator(tuple(self.axes()), self.values, method="linear",
                                                   bounds_error=False, fill_value=np.nan)
        return self._interp(np.atleast_2d(points))

    def shifted(self, constant: float) -> "GridCorrection":
        return GridCorrection(self.h, self.origin, self.values + constant)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "grid", "h": self.h, "origin": list(self.origin), "shape": list(self.values.shape),
                "values": [float(v) for v in self.values.ravel() if not np.isnan(v)]}


Correction = Optional[Union[PolynomialFunc, GridCorrection]]

# -----------------------
# Symplectic potentials
# -----------------------


@dataclass(eq=False)
class SymplecticPotential:
    polytope: LabelledPolytope
    correction: Correction = None

    @property
    def kind(self) -> str:
        if self.correction is None:
            return "guillemin"
        return "grid" if isinstance(self.correction, GridCorrection) else "poly"

    @property
    def dim(self) -> int:
        return self.polytope.dim

    def _labels(self, pts: np.ndarray) -> np.ndarray:
        normals = np.array([L.normal for L in self.polytope.labels], dtype=float)
        offsets = np.array([L.offset for L in self.polytope.labels], dtype=float)
        return pts @ normals.T + offsets

    def guillemin_value(self, points: Any) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        lv = self._labels(pts)
        return 0.5 * xlogy(lv, lv).sum(axis=1)

    def __call__(self, points: Any) -> Any:
        """u at a point (float) or at an (N, dim) array of points."""
        arr = np.asarray(points, dtype=float)
        single = arr.ndim == 1
        pts = np.atleast_2d(arr)
        vals = self.guillemin_value(pts)
        if isinstance(self.correction, PolynomialFunc):
            vals = vals + self.correction.evaluate_grid(pts)
        elif isinstance(self.correction, GridCorrection):
            vals = vals + self.correction(pts)
        return float(vals[0]) if single else vals

    def guillemin_hessian(self, points: Any) -> np.ndarray:
        """½ Σ u_j u_jᵀ / L_j at each point, shape (N, dim, dim)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        normals = np.array([L.normal for L in self.polytope.labels], dtype=float)
        lv = self._labels(pts)
        outer = np.einsum("ja,jb->jab", normals, normals)
        return 0.5 * np.einsum("nj,jab->nab", 1.0 / lv, outer)

    def correction_hessian(self, points: Any) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n, dim = pts.shape
        out = np.zeros((n, dim, dim))
        if isinstance(self.correction, PolynomialFunc):
            hess = self.correction.hessian()
            for i in range(dim):
                for j in range(dim):
                    out[:, i, j] = hess[i][j].evaluate_grid(pts)
        elif isinstance(self.correction, GridCorrection):
            out = fd_hessian(self.correction, pts, self.correction.h)
        return out

    def hessian(self, points: Any) -> np.ndarray:
        return self.guillemin_hessian(points) + self.correction_hessian(points)

    def with_correction(self, correction: Correction) -> "SymplecticPotential":
        return SymplecticPotential(self.polytope, correction)

    def add_polynomial(self, f: PolynomialFunc) -> "SymplecticPotential":
        if isinstance(self.correction, GridCorrection):
            raise SolverError("cannot add a polynomial to a grid correction")
        corr = f if self.correction is None else self.correction + f
        return self.with_correction(None if corr.is_zero else corr)

    def to_dict(self) -> Dict[str, Any]:
        if self.correction is None:
            return {"type": "guillemin"}
        if isinstance(self.correction, PolynomialFunc):
            return {"type": "poly", "coeffs": jsonable(self.correction.to_table())}
        return self.correction.to_dict()


def guillemin_potential(P: LabelledPolytope) -> SymplecticPotential:
    return SymplecticPotential(P)


def fd_hessian(func, points: np.ndarray, h: float) -> np.ndarray:
    """Central-difference Hessians of a vectorized function, shape (N, dim, dim)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n, dim = pts.shape
    eye = np.eye(dim) * h
    f0 = func(pts)
    out = np.zeros((n, dim, dim))
    for i in range(dim):
        out[:, i, i] = (func(pts + eye[i]) - 2.0 * f0 + func(pts - eye[i])) / h ** 2
        for j in range(i + 1, dim):
            d = (func(pts + eye[i] + eye[j]) - func(pts + eye[i] - eye[j])
                 - func(pts - eye[i] + eye[j]) + func(pts - eye[i] - eye[j])) / (4.0 * h ** 2)
            out[:, i, j] = d
            out[:, j, i] = d
    return out


def _check_interior(P: LabelledPolytope, pts: np.ndarray, margin: float = 0.0) -> None:
    normals = np.array([L.normal for L in P.labels], dtype=float)
    offsets = np.array([L.offset for L in P.labels], dtype=float)
    dist = (pts @ normals.T + offsets) / np.linalg.norm(normals, axis=1)
    bad = np.where(dist.min(axis=1) <= margin)[0]
    if bad.size:
        p = tuple(float(t) for t in pts[bad[0]])
        if margin > 0:
            raise StencilError(f"probe {p} is closer than {margin:.3e} to the boundary")
        raise SolverError(f"probe {p} is not interior to P")


def _symbolic_hessian(u: SymplecticPotential) -> sp.Matrix:
    P = u.polytope
    gens = variables(P.dim)
    g = sp.zeros(P.dim, P.dim)
    for L in P.labels:
        lx = sum((to_sympy(a) * x for a, x in zip(L.normal, gens)), to_sympy(L.offset))
        un = sp.Matrix([to_sympy(a) for a in L.normal])
        g += sp.Rational(1, 2) * (un * un.T) / lx
    if isinstance(u.correction, PolynomialFunc):
        expr = u.correction.as_expr()
        g += sp.hessian(expr, gens)
    return g


def inverse_hessian(u: SymplecticPotential, probe: Any) -> np.ndarray:
    """
    H = (Hess u)^{-1} at one probe point (exact rationals when possible) or
    at an (N, dim) array of probes (floats).
    """
    P = u.polytope
    arr = np.asarray(probe, dtype=object if not isinstance(probe, np.ndarray) else probe.dtype)
    if arr.ndim == 1:
        point = to_point(probe)
        exact = (is_exact(point) and P.is_exact and
                 (u.correction is None or (isinstance(u.correction, PolynomialFunc) and u.correction.is_exact)))
        if exact:
            if not P.is_interior(point):
                raise SolverError(f"probe {jsonable(point)} is not interior to P")
            g = _symbolic_hessian(u).xreplace(dict(zip(variables(P.dim), [to_sympy(x) for x in point])))
            for k in range(1, P.dim + 1):
                minor = g[:k, :k].det()
                if minor <= 0:
                    eig = float(np.linalg.eigvalsh(np.array(g.evalf(), dtype=float)).min())
                    raise NonConvexError(point, eig)
            inv = g.inv()
            return np.array([[from_sympy(inv[i, j]) for j in range(P.dim)] for i in range(P.dim)], dtype=object)
        return inverse_hessian(u, np.array([[float(x) for x in point]]))[0]
    pts = np.atleast_2d(np.asarray(probe, dtype=float))
    _check_interior(P, pts)
    g = u.hessian(pts)
    eig = np.linalg.eigvalsh(g)
    bad = np.where(eig[:, 0] <= 0)[0]
    if bad.size:
        raise NonConvexError(pts[bad[0]], eig[bad[0], 0])
    return np.linalg.inv(g)


# -----------------------
# Matrix fields
# -----------------------


class MatrixField:
    """
    Symmetric dim×dim field with sympy entries in x1..x_dim; only the upper
    triangle is stored. ``role`` is "H" (inverse Hessian) or "Phi" (v·H).
    """

    def __init__(self, dim: int, entries: Dict[Tuple[int, int], sp.Expr], role: str = "H"):
        if role not in ("H", "Phi"):
            raise ValueError(f"role must be 'H' or 'Phi', got {role!r}")
        self.dim = dim
        self.role = role
        self._entries = {}
        for (i, j), e in entries.items():
            a, b = min(i, j), max(i, j)
            self._entries[(a, b)] = sp.cancel(sp.sympify(e))
        for i in range(dim):
            for j in range(i, dim):
                self._entries.setdefault((i, j), sp.Integer(0))
        self._numeric = {}

    @classmethod
    def from_polynomials(cls, entries: Dict[Tuple[int, int], PolynomialFunc], role: str = "H") -> "MatrixField":
        dim = next(iter(entries.values())).dim
        return cls(dim, {k: p.as_expr() for k, p in entries.items()}, role)

    @classmethod
    def from_matrix(cls, m: sp.Matrix, role: str = "H") -> "MatrixField":
        dim = m.shape[0]
        return cls(dim, {(i, j): m[i, j] for i in range(dim) for j in range(i, dim)}, role)

    def entry(self, i: int, j: int) -> sp.Expr:
        return self._entries[(min(i, j), max(i, j))]

    def matrix(self) -> sp.Matrix:
        return sp.Matrix(self.dim, self.dim, lambda i, j: self.entry(i, j))

    def polynomial_entries(self) -> Optional[Dict[Tuple[int, int], PolynomialFunc]]:
        gens = variables(self.dim)
        out = {}
        for key, e in self._entries.items():
            if not e.is_polynomial(*gens):
                return None
            out[key] = PolynomialFunc.from_expr(e, self.dim)
        return out

    @property
    def is_polynomial(self) -> bool:
        return self.polynomial_entries() is not None

    def scaled(self, factor: Union[PolynomialFunc, sp.Expr], role: str) -> "MatrixField":
        f = factor.as_expr() if isinstance(factor, PolynomialFunc) else sp.sympify(factor)
        return MatrixField(self.dim, {k: e * f for k, e in self._entries.items()}, role)

    def divergence2(self) -> sp.Expr:
        """Σ_ij ∂_i ∂_j of the entries."""
        gens = variables(self.dim)
        total = sp.Integer(0)
        for i in range(self.dim):
            for j in range(self.dim):
                total += sp.diff(self.entry(i, j), gens[i], gens[j])
        return sp.cancel(total)

    def evaluate(self, point: Sequence[Any]) -> np.ndarray:
        """Entries at one point; exact when the entries and point are rational."""
        point = to_point(point)
        if is_exact(point):
            subs = dict(zip(variables(self.dim), [to_sympy(x) for x in point]))
            vals = [[self.entry(i, j).xreplace(subs) for j in range(self.dim)] for i in range(self.dim)]
            if all(v.is_Rational for row in vals for v in row):
                return np.array([[from_sympy(v) for v in row] for row in vals], dtype=object)
        return self.evaluate_grid(np.array([[float(x) for x in point]]))[0]

    def _compiled(self, i: int, j: int):
        key = (min(i, j), max(i, j))
        if key not in self._numeric:
            self._numeric[key] = sp.lambdify(variables(self.dim), self._entries[key], modules="numpy")
        return self._numeric[key]

    def evaluate_grid(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros((pts.shape[0], self.dim, self.dim))
        cols = [pts[:, k] for k in range(self.dim)]
        for i in range(self.dim):
            for j in range(i, self.dim):
                vals = np.broadcast_to(np.asarray(self._compiled(i, j)(*cols), dtype=float), (pts.shape[0],))
                out[:, i, j] = vals
                out[:, j, i] = vals
        return out

    def to_dict(self) -> Dict[str, Any]:
        polys = self.polynomial_entries()
        entries = {}
        for (i, j), e in sorted(self._entries.items()):
            key = f"{i + 1}{j + 1}"
            entries[key] = jsonable(polys[(i, j)].to_table()) if polys else str(e)
        return {"role": self.role, "dim": self.dim, "entries": entries}


def inverse_hessian_field(u: SymplecticPotential) -> MatrixField:
    """H^u as a symbolic field (Guillemin or polynomial corrections)."""
    if u.kind == "grid":
        raise SolverError("grid potentials have no closed-form inverse Hessian")
    return MatrixField.from_matrix(_symbolic_hessian(u).inv(), role="H")


def guillemin_field(P: LabelledPolytope) -> MatrixField:
    return inverse_hessian_field(guillemin_potential(P))


# -----------------------
# Boundary conditions
# -----------------------


@dataclass
class BoundaryReport:
    passed: bool
    tol: float
    facets: List[Dict[str, Any]] = field(default_factory=list)
    faces: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({"passed": self.passed, "tol": self.tol, "facets": self.facets, "faces": self.faces})


def _face_samples(points: Sequence[Point]) -> List[Point]:
    center = mean_point(list(points))
    samples = [center]
    for p in points:
        mid = tuple((a + b) / 2 for a, b in zip(center, p))
        if mid not in samples:
            samples.append(mid)
    return samples


def _value(expr: sp.Expr, point: Point, dim: int) -> Scalar:
    gens = variables(dim)
    if is_exact(point):
        val = expr.xreplace(dict(zip(gens, [to_sympy(x) for x in point])))
        if val.is_Rational:
            return from_sympy(val)
        return float(val)
    return float(sp.lambdify(gens, expr, modules="numpy")(*[float(x) for x in point]))


def _quotient_min_eig(H: np.ndarray, normals: List[Tuple[Scalar, ...]]) -> Optional[float]:
    basis = null_space(np.array(normals, dtype=float))
    if basis.shape[1] == 0:
        return None
    m = basis.T @ np.asarray(H, dtype=float) @ basis
    return float(np.linalg.eigvalsh(m).min())


def check_boundary_conditions(H: MatrixField, P: LabelledPolytope, tol: float = 1e-9) -> BoundaryReport:
    """
    On each facet F_j: H u_j = 0 and ∇(H(u_j, u_j)) = 2 u_j; on every face,
    H is positive definite on the directions transverse to the face normals.
    """
    if H.role != "H":
        raise SolverError("boundary conditions apply to the inverse-Hessian role H")
    dim = P.dim
    gens = variables(dim)
    passed = True
    facets = []
    for j, L in enumerate(P.labels):
        u = [to_sympy(a) for a in L.normal]
        q = sum((u[a] * u[b] * H.entry(a, b) for a in range(dim) for b in range(dim)), sp.Integer(0))
        grad_q = [sp.diff(q, x) for x in gens]
        kernel_res, deriv_res = 0.0, 0.0
        min_eig: Optional[float] = None
        for y in _face_samples(P.facet_vertices(j)):
            hv = [sum((H.entry(a, b) * u[b] for b in range(dim)), sp.Integer(0)) for a in range(dim)]
            kernel_res = max(kernel_res, math.sqrt(sum(float(_value(e, y, dim)) ** 2 for e in hv)))
            g = [_value(e, y, dim) for e in grad_q]
            deriv_res = max(deriv_res, math.sqrt(sum((float(gk) - 2 * float(uk)) ** 2 for gk, uk in zip(g, L.normal))))
            if dim > 1:
                e = _quotient_min_eig(H.evaluate(y), [L.normal])
                min_eig = e if min_eig is None else min(min_eig, e)
        ok = kernel_res <= tol and deriv_res <= tol and (min_eig is None or min_eig > 0)
        passed = passed and ok
        facets.append({"facet": j, "kernel_residual": kernel_res, "derivative_residual": deriv_res,
                       "min_quotient_eig": min_eig, "passed": ok})

    faces = []
    for size in range(2, dim):
        for subset in combinations(range(len(P.labels)), size):
            pts = [v for v, t in zip(P.vertices, P.vertex_facets) if set(subset) <= t]
            if len(pts) < dim - size + 1:
                continue
            normals = [P.labels[j].normal for j in subset]
            min_eig = min(_quotient_min_eig(H.evaluate(y), normals) for y in _face_samples(pts))
            ok = min_eig > 0
            passed = passed and ok
            faces.append({"facets": list(subset), "min_quotient_eig": min_eig, "passed": ok})
    return BoundaryReport(passed=passed, tol=tol, facets=facets, faces=faces)


# -----------------------
# v-scalar curvature
# -----------------------


def v_scalar_curvature_expr(u: SymplecticPotential, v: PolynomialFunc) -> sp.Expr:
    """−Σ (v H_ij)_{,ij} in closed form (Guillemin or polynomial corrections)."""
    phi = inverse_hessian_field(u).scaled(v, role="Phi")
    return sp.cancel(-phi.divergence2())


def guillemin_weight(P: LabelledPolytope, v: PolynomialFunc) -> Union[PolynomialFunc, sp.Expr]:
    """w0 = Scal_v(u0): the weight for which the Guillemin potential is a solution."""
    expr = v_scalar_curvature_expr(guillemin_potential(P), v)
    if expr.is_polynomial(*variables(P.dim)):
        return PolynomialFunc.from_expr(expr, P.dim)
    return expr


def default_step(P: LabelledPolytope) -> float:
    return P.diameter() / (256.0 if P.dim == 1 else 128.0)


def _phi_fd(u: SymplecticPotential, v: PolynomialFunc, pts: np.ndarray, h: float) -> np.ndarray:
    g = fd_hessian(u, pts, h)
    eig = np.linalg.eigvalsh(g)
    bad = np.where(eig[:, 0] <= 0)[0]
    if bad.size:
        raise NonConvexError(pts[bad[0]], eig[bad[0], 0])
    return np.linalg.inv(g) * v.evaluate_grid(pts)[:, None, None]


def _scal_fd(u: SymplecticPotential, v: PolynomialFunc, pts: np.ndarray, h: float) -> np.ndarray:
    dim = pts.shape[1]
    eye = np.eye(dim) * h
    total = np.zeros(pts.shape[0])
    phi0 = _phi_fd(u, v, pts, h)
    for i in range(dim):
        plus = _phi_fd(u, v, pts + eye[i], h)
        minus = _phi_fd(u, v, pts - eye[i], h)
        total += (plus[:, i, i] - 2.0 * phi0[:, i, i] + minus[:, i, i]) / h ** 2
        for j in range(i + 1, dim):
            pp = _phi_fd(u, v, pts + eye[i] + eye[j], h)[:, i, j]
            pm = _phi_fd(u, v, pts + eye[i] - eye[j], h)[:, i, j]
            mp = _phi_fd(u, v, pts - eye[i] + eye[j], h)[:, i, j]
            mm = _phi_fd(u, v, pts - eye[i] - eye[j], h)[:, i, j]
            total += 2.0 * (pp - pm - mp + mm) / (4.0 * h ** 2)
    return -total


def v_scalar_curvature(u: SymplecticPotential, v: PolynomialFunc, probes: Any,
                       mode: str = "auto", h: Optional[float] = None) -> List[Scalar]:
    """
    Scal_v(u) at the probes. ``mode`` is "symbolic", "fd" or "auto"
    (symbolic unless the correction is a grid). FD uses central differences
    of u for Hess u and of v·H for the divergence, step h, margin 4h.
    """
    P = u.polytope
    if mode == "auto":
        mode = "fd" if u.kind == "grid" else "symbolic"
    if mode == "symbolic":
        expr = v_scalar_curvature_expr(u, v)
        pts = [to_point(p) for p in probes]
        for p in pts:
            if not P.is_interior(p):
                raise SolverError(f"probe {jsonable(p)} is not interior to P")
        return [_value(expr, p, P.dim) for p in pts]
    if mode != "fd":
        raise ValueError(f"unknown mode {mode!r}")
    if u.kind == "grid":
        h = u.correction.h
    h = h or default_step(P)
    pts = np.atleast_2d(np.array([[float(x) for x in p] for p in probes], dtype=float))
    _check_interior(P, pts, margin=4.0 * h * (1 - 1e-9))
    return [float(s) for s in _scal_fd(u, v, pts, h)]


# -----------------------
# Integration by parts
# -----------------------


def ibp_residual(P: LabelledPolytope, v: PolynomialFunc, H: MatrixField, f: PolynomialFunc) -> Scalar:
    """|∫ Σ vH_ij f_ij − ∫ (Σ (vH_ij)_ij) f − 2∫_{∂P} f v dσ|."""
    phi = H.scaled(v, role="Phi") if H.role == "H" else H
    boundary = 2 * integrate_boundary(P, f * v)
    polys = phi.polynomial_entries()
    hess = f.hessian()
    if polys is not None:
        lhs = PolynomialFunc.constant(0, P.dim)
        for i in range(P.dim):
            for j in range(P.dim):
                lhs = lhs + polys[(min(i, j), max(i, j))] * hess[i][j]
        div = PolynomialFunc.from_expr(phi.divergence2(), P.dim)
        res = integrate_interior(P, lhs) - integrate_interior(P, div * f) - boundary
        return abs(res)
    div = sp.lambdify(variables(P.dim), phi.divergence2(), modules="numpy")

    def integrand(pts: np.ndarray) -> np.ndarray:
        vals = phi.evaluate_grid(pts)
        total = np.zeros(pts.shape[0])
        for i in range(P.dim):
            for j in range(P.dim):
                total += vals[:, i, j] * hess[i][j].evaluate_grid(pts)
        d = np.broadcast_to(np.asarray(div(*[pts[:, k] for k in range(P.dim)]), dtype=float), (pts.shape[0],))
        return total - d * f.evaluate_grid(pts)

    return abs(integrate_interior_smooth(P, integrand, order=32) - float(boundary))


# -----------------------
# Normalization and Mabuchi energy
# -----------------------


def _grid_mean(P: LabelledPolytope, v: PolynomialFunc, grid: GridCorrection) -> float:
    if grid.dim != 1:
        raise SolverError("grid corrections are integrated in dimension 1 only")
    x = grid.axes()[0]
    vals = grid.values
    keep = ~np.isnan(vals)
    weights = v.evaluate_grid(x[keep][:, None])
    return float(sp_integrate.trapezoid(vals[keep] * weights, x[keep]) / sp_integrate.trapezoid(weights, x[keep]))


def normalize_potential(P: LabelledPolytope, v: PolynomialFunc, u: SymplecticPotential) -> SymplecticPotential:
    """u + const with ∫_P u v dx = ∫_P u0 v dx."""
    if u.correction is None:
        return u
    if isinstance(u.correction, PolynomialFunc):
        shift = integrate_interior(P, u.correction * v) / integrate_interior(P, v)
        corr = u.correction - shift
        return u.with_correction(None if corr.is_zero else corr)
    return u.with_correction(u.correction.shifted(-_grid_mean(P, v, u.correction)))


def _log_det_ratio_poly(P: LabelledPolytope, v: PolynomialFunc, u: SymplecticPotential) -> float:
    def integrand(pts: np.ndarray) -> np.ndarray:
        g0 = u.guillemin_hessian(pts)
        g = g0 + u.correction_hessian(pts)
        det = np.linalg.det(g) / np.linalg.det(g0)
        with np.errstate(divide="ignore", invalid="ignore"):
            return v.evaluate_grid(pts) * np.log(det)

    return integrate_interior_smooth(P, integrand, order=32)


def _log_det_ratio_grid(P: LabelledPolytope, v: PolynomialFunc, u: SymplecticPotential) -> float:
    """Margin-shrunk sums at widths δ and 2δ, extrapolated linearly to δ = 0."""
    grid = u.correction
    if grid.dim != 1:
        raise SolverError("grid corrections are integrated in dimension 1 only")
    x = grid.axes()[0]
    alpha, beta = float(x[0]), float(x[-1])
    delta = 4.0 * grid.h

    def shrunk(width: float) -> float:
        keep = (x >= alpha + width - 1e-12) & (x <= beta - width + 1e-12)
        pts = x[keep][:, None]
        g0 = u.guillemin_hessian(pts)[:, 0, 0]
        g = g0 + fd_hessian(grid, pts, grid.h)[:, 0, 0]
        return float(sp_integrate.trapezoid(v.evaluate_grid(pts) * np.log(g / g0), x[keep]))

    return 2.0 * shrunk(delta) - shrunk(2.0 * delta)


def _degenerate(hessians: np.ndarray) -> bool:
    det = np.linalg.det(hessians)
    return float(np.mean(det < DEGENERATE_DET)) > DEGENERATE_SHARE


def mabuchi_energy(P: LabelledPolytope, ws: WeightSystem, u: Any) -> float:
    """
    M(u) = F(u) − ∫_P v log det(Hess u · Hess u0^{-1}) dx, +inf for
    piecewise-linear or otherwise degenerate u.
    """
    if isinstance(u, (CreaseFunction, PLMax, AffineFunc)):
        return math.inf
    if isinstance(u, PolynomialFunc):
        return _mabuchi_bare_polynomial(P, ws, u)
    if not isinstance(u, SymplecticPotential):
        raise TypeError(f"unsupported potential {type(u).__name__}")
    base = futaki_numeric(P, ws, guillemin_potential(P))
    if u.correction is None:
        return float(base)
    if isinstance(u.correction, PolynomialFunc):
        g = u.hessian(interior_sample_points(P))
        if _degenerate(g) or np.linalg.eigvalsh(g)[:, 0].min() <= 0:
            return math.inf
        corr = polynomial_futaki(P, ws.v, ws.w, u.correction, ws.futaki_sign)
        return float(base) + float(corr) - _log_det_ratio_poly(P, ws.v, u)
    corr = futaki_numeric(P, ws, lambda x: float(u.correction(np.asarray(x))[0]))
    return float(base) + float(corr) - _log_det_ratio_grid(P, ws.v, u)


def _mabuchi_bare_polynomial(P: LabelledPolytope, ws: WeightSystem, f: PolynomialFunc) -> float:
    """A convex polynomial without the Guillemin part; its Hessian stays bounded at ∂P."""
    hess = f.hessian()

    def hess_at(q: np.ndarray) -> np.ndarray:
        out = np.zeros((q.shape[0], P.dim, P.dim))
        for i in range(P.dim):
            for j in range(P.dim):
                out[:, i, j] = hess[i][j].evaluate_grid(q)
        return out

    if _degenerate(hess_at(interior_sample_points(P))):
        return math.inf
    u0 = guillemin_potential(P)

    def integrand(x: np.ndarray) -> float:
        q = np.atleast_2d(x)
        det = np.linalg.det(hess_at(q))[0] / np.linalg.det(u0.guillemin_hessian(q))[0]
        return float(ws.v(tuple(x))) * math.log(det) if det > 0 else -math.inf

    return float(futaki(P, ws, f)) - integrate_interior_numeric(P, integrand)


def mabuchi_profile(P: LabelledPolytope, ws: WeightSystem, u: SymplecticPotential, f: PolynomialFunc,
                    ts: Sequence[Any]) -> List[Tuple[float, float]]:
    """M(u + t f) sampled along t."""
    out = []
    for t in ts:
        step = t if isinstance(t, (int, Fraction)) else float(t)
        out.append((float(t), mabuchi_energy(P, ws, u.add_polynomial(f * step))))
    return out
