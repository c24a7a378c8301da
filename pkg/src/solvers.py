# -*- coding: utf-8 -*-
"""
Existence routes for the generalized Abreu equation −Σ (v H_ij)_{,ij} = w.

- solve_1d: on an interval the equation integrates twice in closed form;
  Φ = vH is a polynomial and positivity of Φ decides existence.
- solve_ak: on polygons, a polynomial field Φ solving the linear equation
  with the facet boundary conditions and positive on P (an involutive
  almost-Kähler solution) certifies uniform K-stability.
- certify: either route plus the crease scan, merged into one verdict.
"""
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from numpy.polynomial import polynomial as npoly
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import null_space
from scipy.optimize import minimize_scalar

from errors import SolverError
from geometry import LabelledPolytope
from numbers_util import FLOAT_TOL, Scalar, is_exact, jsonable
from polynomials import PolynomialFunc, monomials_up_to, variables
from potentials import GridCorrection, MatrixField, SymplecticPotential, guillemin_field, normalize_potential, \
    v_scalar_curvature
from stability import CreaseFunction, StabilityReport, futaki, stability_scan
from weights import WeightSystem, affine_residuals

EXISTS = "EXISTS"
NOT_STABLE = "NOT_STABLE"
UNDECIDED = "UNDECIDED"

ENTRIES = ((0, 0), (0, 1), (1, 1))
MIN_LABEL = 1e-3


def _require_consistent(ws: WeightSystem) -> None:
    if ws.futaki_sign != "consistent":
        raise SolverError(f"solvers need futaki_sign 'consistent', got {ws.futaki_sign!r}")


# -----------------------
# 1D route
# -----------------------


@dataclass
class SolveReport1D:
    interval: Tuple[Scalar, Scalar]
    phi: PolynomialFunc
    positive: bool
    min_interior: float
    argmin: float
    residuals: Dict[str, Scalar]
    u_recovered: Optional[SymplecticPotential] = None
    fd_residual: Optional[float] = None

    def profile(self, points: int = 201) -> List[Dict[str, float]]:
        """Φ and q = Φ/((x−α)(β−x)) on a uniform grid, for CSV output."""
        a, b = float(self.interval[0]), float(self.interval[1])
        x = np.linspace(a, b, points)
        phi = self.phi.evaluate_grid(x[:, None])
        q = _profile_quotient(self.phi, *self.interval).evaluate_grid(x[:, None])
        return [{"x": float(xi), "phi": float(p), "q": float(qi)} for xi, p, qi in zip(x, phi, q)]

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({
            "interval": list(self.interval),
            "phi": self.phi.to_table(),
            "positive": self.positive,
            "min_interior": self.min_interior,
            "argmin": self.argmin,
            "residuals": self.residuals,
            "u_recovered": self.u_recovered.to_dict()["type"] if self.u_recovered else None,
            "fd_residual": self.fd_residual,
        })


def _interval(P: LabelledPolytope) -> Tuple[Scalar, Scalar]:
    if P.dim != 1:
        raise SolverError(f"solve_1d needs an interval, got dimension {P.dim}")
    xs = sorted(v[0] for v in P.vertices)
    return xs[0], xs[-1]


def _definite(poly: PolynomialFunc, alpha: Scalar) -> PolynomialFunc:
    """∫_α^x poly."""
    anti = poly.antiderivative(0)
    return anti - anti((alpha,))


def phi_profile(P: LabelledPolytope, ws: WeightSystem) -> PolynomialFunc:
    """Φ(x) = 2v(α)(x−α) − ∫_α^x ∫_α^s w."""
    alpha, _ = _interval(P)
    va = ws.v((alpha,))
    linear = PolynomialFunc.affine((2 * va,), -2 * va * alpha)
    return linear - _definite(_definite(ws.w, alpha), alpha)


def _profile_quotient(phi: PolynomialFunc, alpha: Scalar, beta: Scalar) -> PolynomialFunc:
    x = variables(1)[0]
    base = sp.Poly((x - sp.sympify(alpha)) * (sp.sympify(beta) - x), x, domain=phi.poly.domain)
    q, _ = sp.div(phi.poly, base)
    return PolynomialFunc._wrap(q, 1)


def _positive_on(q: PolynomialFunc, alpha: Scalar, beta: Scalar) -> bool:
    mid = (alpha + beta) / 2
    if float(q((mid,))) <= 0:
        return False
    if q.is_exact and is_exact(alpha, beta):
        if q.degree == 0:
            return True
        return q.poly.count_roots(sp.Rational(alpha), sp.Rational(beta)) == 0
    coeffs = [float(c) for c in q.poly.all_coeffs()]
    if len(coeffs) == 1:
        return True
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) <= 1e-10].real
    return not np.any((real >= float(alpha) - FLOAT_TOL) & (real <= float(beta) + FLOAT_TOL))


def _minimize_profile(q: PolynomialFunc, alpha: float, beta: float) -> Tuple[float, float]:
    x = np.linspace(alpha, beta, 1001)
    vals = q.evaluate_grid(x[:, None])
    k = int(np.argmin(vals))
    lo, hi = x[max(k - 1, 0)], x[min(k + 1, len(x) - 1)]
    if hi - lo <= 0:
        return float(vals[k]), float(x[k])
    res = minimize_scalar(lambda t: float(q.evaluate_grid(np.array([[t]]))[0]), bounds=(lo, hi), method="bounded")
    if res.fun < vals[k]:
        return float(res.fun), float(res.x)
    return float(vals[k]), float(x[k])


def _correction_second_derivative(phi: PolynomialFunc, v: PolynomialFunc, q: PolynomialFunc,
                                  alpha: Scalar, beta: Scalar, x: np.ndarray) -> np.ndarray:
    """v/Φ − u0'' on the nodes; smooth up to the endpoints."""
    sx = variables(1)[0]
    a, b = sp.sympify(alpha), sp.sympify(beta)
    expr = (v.as_expr() - q.as_expr() * (b - a) / 2) / ((sx - a) * (b - sx) * q.as_expr())
    if q.is_exact and v.is_exact:
        expr = sp.cancel(expr)
        vals = np.broadcast_to(np.asarray(sp.lambdify(sx, expr, modules="numpy")(x), dtype=float), x.shape).copy()
        if np.all(np.isfinite(vals)):
            return vals
    inner = sp.lambdify(sx, expr, modules="numpy")
    vals = np.empty_like(x)
    vals[1:-1] = inner(x[1:-1])
    vals[0] = 2 * vals[1] - vals[2]
    vals[-1] = 2 * vals[-2] - vals[-3]
    return vals


def recover_potential(P: LabelledPolytope, ws: WeightSystem, phi: PolynomialFunc,
                      grid_points: int = 256) -> SymplecticPotential:
    """u with u'' = v/Φ as u0 + a grid correction, by double cumulative integration."""
    alpha, beta = _interval(P)
    q = _profile_quotient(phi, alpha, beta)
    x = np.linspace(float(alpha), float(beta), grid_points + 1)
    g = _correction_second_derivative(phi, ws.v, q, alpha, beta, x)
    slope = cumulative_trapezoid(g, x, initial=0.0)
    values = cumulative_trapezoid(slope, x, initial=0.0)
    h = (float(beta) - float(alpha)) / grid_points
    u = SymplecticPotential(P, GridCorrection(h, (float(alpha),), values))
    return normalize_potential(P, ws.v, u)


def _fd_check(P: LabelledPolytope, ws: WeightSystem, u: SymplecticPotential) -> float:
    """sup |Scal_v(u) − w| over the nodes of the central window [α + L/10, β − L/10]."""
    nodes = u.correction.nodes()[:, 0]
    alpha, beta = float(nodes[0]), float(nodes[-1])
    margin = max(0.1 * (beta - alpha), 4.0 * u.correction.h * (1 + 1e-6))
    probes = nodes[(nodes >= alpha + margin) & (nodes <= beta - margin)]
    if probes.size == 0:
        return math.nan
    scal = np.array(v_scalar_curvature(u, ws.v, [(p,) for p in probes], mode="fd"))
    return float(np.max(np.abs(scal - ws.w.evaluate_grid(probes[:, None]))))


def solve_1d(P: LabelledPolytope, ws: WeightSystem, grid_points: int = 256,
             affine_tol: float = 1e-8) -> SolveReport1D:
    """Closed-form Φ on [α, β]; positive Φ means a (v, w)-cscK potential exists."""
    _require_consistent(ws)
    alpha, beta = _interval(P)
    phi = phi_profile(P, ws)
    dphi = phi.diff(0)
    residuals = {"phi_beta": phi((beta,)), "dphi_beta": dphi((beta,)) + 2 * ws.v((beta,))}
    worst = max(abs(float(r)) for r in residuals.values())
    if worst > affine_tol:
        raise SolverError(f"affine-vanishing residual {worst:.3e} exceeds {affine_tol:g}; weights are not normalized")
    q = _profile_quotient(phi, alpha, beta)
    positive = _positive_on(q, alpha, beta)
    low, where = _minimize_profile(q, float(alpha), float(beta))
    report = SolveReport1D((alpha, beta), phi, positive, low, where, residuals)
    if positive:
        report.u_recovered = recover_potential(P, ws, phi, grid_points)
        report.fd_residual = _fd_check(P, ws, report.u_recovered)
    return report


# -----------------------
# 2D route: almost-Kähler certificates
# -----------------------


@dataclass
class AKCertificate:
    phi_field: Optional[MatrixField]
    degree: Optional[int]
    pde_residual: float
    bc_residual: float
    min_eig: float
    argmin: Optional[Tuple[float, float]]
    verdict: str
    facet_min: float = math.nan
    verify_residual: float = math.nan
    rank: int = 0
    nullity: int = 0
    unknowns: int = 0
    equations: int = 0
    degrees_tried: List[int] = field(default_factory=list)
    ascent_steps: int = 0
    eig_table: List[Dict[str, float]] = field(default_factory=list)

    @property
    def is_positive(self) -> bool:
        return self.verdict == "positive"

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({
            "verdict": self.verdict,
            "degree": self.degree,
            "phi": self.phi_field.to_dict() if self.phi_field is not None else None,
            "pde_residual": self.pde_residual,
            "bc_residual": self.bc_residual,
            "verify_residual": self.verify_residual,
            "min_eig": self.min_eig,
            "argmin": list(self.argmin) if self.argmin is not None else None,
            "facet_min": self.facet_min,
            "diagnostics": {"rank": self.rank, "nullity": self.nullity, "unknowns": self.unknowns,
                            "equations": self.equations, "degrees_tried": self.degrees_tried,
                            "ascent_steps": self.ascent_steps},
        })


def _restrict(monom: Tuple[int, int], p0: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Coefficients in t of x1^a x2^b along x = p0 + t d."""
    out = np.array([1.0])
    for e, base, step in zip(monom, p0, d):
        out = npoly.polymul(out, npoly.polypow([base, step], e))
    return out


def _restrict_poly(f: PolynomialFunc, p0: np.ndarray, d: np.ndarray) -> np.ndarray:
    out = np.zeros(1)
    for monom, coeff in f.terms().items():
        out = npoly.polyadd(out, float(coeff) * _restrict(monom, p0, d))
    return out


def _d_monomial(monom: Tuple[int, int], k: int) -> Tuple[float, Optional[Tuple[int, int]]]:
    e = list(monom)
    if e[k] == 0:
        return 0.0, None
    c = float(e[k])
    e[k] -= 1
    return c, tuple(e)


class _AKSystem:
    """Linear conditions on the coefficients of (Φ11, Φ12, Φ22) up to degree D."""

    def __init__(self, P: LabelledPolytope, ws: WeightSystem, degree: int):
        self.P, self.ws, self.degree = P, ws, degree
        self.monomials = monomials_up_to(degree, 2)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.m = len(self.monomials)
        self.rows: List[np.ndarray] = []
        self.rhs: List[float] = []
        self.kinds: List[str] = []
        self._pde()
        for j in range(len(P.labels)):
            self._facet(j)
        self.A = np.array(self.rows)
        self.b = np.array(self.rhs)

    def col(self, entry: int, monom: Tuple[int, int]) -> int:
        return entry * self.m + self.index[monom]

    def _pde(self) -> None:
        # −(∂11 Φ11 + 2 ∂12 Φ12 + ∂22 Φ22) = w, matched monomial by monomial
        rows: Dict[Tuple[int, int], np.ndarray] = {}
        for entry, (a, b) in enumerate(ENTRIES):
            mult = 2.0 if a != b else 1.0
            for monom in self.monomials:
                c1, m1 = _d_monomial(monom, a)
                if m1 is None:
                    continue
                c2, m2 = _d_monomial(m1, b)
                if m2 is None:
                    continue
                row = rows.setdefault(m2, np.zeros(3 * self.m))
                row[self.col(entry, monom)] -= mult * c1 * c2
        for monom in monomials_up_to(max(self.degree - 2, self.ws.w.degree), 2):
            self.rows.append(rows.get(monom, np.zeros(3 * self.m)))
            self.rhs.append(float(self.ws.w.coefficient(monom)))
            self.kinds.append("pde")

    def _facet(self, j: int) -> None:
        L = self.P.labels[j]
        u = np.array(L.normal, dtype=float)
        p0 = np.array(self.P.facet_vertices(j)[0], dtype=float)
        d = np.array([-u[1], u[0]])
        size = self.degree + 1
        # (Φ u)_k vanishes on the facet line
        for k in range(2):
            block = np.zeros((size, 3 * self.m))
            for entry, (a, b) in enumerate(ENTRIES):
                weight = (u[b] if a == k else 0.0) + (u[a] if b == k and a != b else 0.0)
                if weight == 0.0:
                    continue
                for monom in self.monomials:
                    coeffs = _restrict(monom, p0, d)
                    block[:len(coeffs), self.col(entry, monom)] += weight * coeffs
            self._append(block, np.zeros(size), "bc")
        # ∂_k Φ(u, u) = 2 v u_k on the facet line
        v_line = _restrict_poly(self.ws.v, p0, d)
        for k in range(2):
            block = np.zeros((size, 3 * self.m))
            for entry, (a, b) in enumerate(ENTRIES):
                weight = u[a] * u[b] * (2.0 if a != b else 1.0)
                if weight == 0.0:
                    continue
                for monom in self.monomials:
                    c, dm = _d_monomial(monom, k)
                    if dm is None:
                        continue
                    coeffs = _restrict(dm, p0, d)
                    block[:len(coeffs), self.col(entry, monom)] += weight * c * coeffs
            rhs = np.zeros(max(size, len(v_line)))
            rhs[:len(v_line)] = 2.0 * u[k] * v_line
            if len(rhs) > size:
                block = np.vstack([block, np.zeros((len(rhs) - size, 3 * self.m))])
            self._append(block, rhs, "bc")

    def _append(self, block: np.ndarray, rhs: np.ndarray, kind: str) -> None:
        for row, r in zip(block, rhs):
            if np.any(row) or r != 0.0:
                self.rows.append(row)
                self.rhs.append(float(r))
                self.kinds.append(kind)

    def vector(self, entries: Dict[Tuple[int, int], PolynomialFunc]) -> Optional[np.ndarray]:
        z = np.zeros(3 * self.m)
        for entry, key in enumerate(ENTRIES):
            for monom, coeff in entries[key].terms().items():
                if monom not in self.index:
                    return None
                z[self.col(entry, monom)] = float(coeff)
        return z

    def polynomials(self, z: np.ndarray) -> Dict[Tuple[int, int], PolynomialFunc]:
        out = {}
        for entry, key in enumerate(ENTRIES):
            terms = {m: float(z[self.col(entry, m)]) for m in self.monomials
                     if abs(z[self.col(entry, m)]) > 1e-14}
            out[key] = PolynomialFunc.from_terms(terms, 2)
        return out

    def residuals(self, z: np.ndarray) -> Tuple[float, float]:
        r = self.A @ z - self.b
        kinds = np.array(self.kinds)
        pde = float(np.max(np.abs(r[kinds == "pde"]))) if np.any(kinds == "pde") else 0.0
        bc = float(np.max(np.abs(r[kinds == "bc"]))) if np.any(kinds == "bc") else 0.0
        return pde, bc


def _reference(P: LabelledPolytope, ws: WeightSystem) -> Optional[Dict[Tuple[int, int], PolynomialFunc]]:
    """v·H0 when the Guillemin inverse Hessian is polynomial."""
    entries = guillemin_field(P).polynomial_entries()
    if entries is None:
        return None
    return {key: ws.v * entries[key] for key in ENTRIES}


def _interior_grid(P: LabelledPolytope, n: int) -> np.ndarray:
    lo, hi = P.bounding_box()
    axes = [np.linspace(a, b, n) for a, b in zip(lo, hi)]
    pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    normals = np.array([L.normal for L in P.labels], dtype=float)
    offsets = np.array([L.offset for L in P.labels], dtype=float)
    dist = (pts @ normals.T + offsets) / np.linalg.norm(normals, axis=1)
    return pts[dist.min(axis=1) >= MIN_LABEL]


def _min_eigs(phi: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of Φ/v for stacked symmetric 2×2 (Φ11, Φ12, Φ22)."""
    a, b, c = phi[0] / v, phi[1] / v, phi[2] / v
    return 0.5 * (a + c) - np.sqrt(0.25 * (a - c) ** 2 + b ** 2)


def _monomial_matrix(monomials: Sequence[Tuple[int, int]], pts: np.ndarray) -> np.ndarray:
    return np.stack([pts[:, 0] ** a * pts[:, 1] ** b for a, b in monomials], axis=1)


def _facet_samples(P: LabelledPolytope) -> List[Tuple[int, np.ndarray, np.ndarray]]:
    out = []
    for j, L in enumerate(P.labels):
        ends = np.array(P.facet_vertices(j)[:2], dtype=float)
        t = np.arange(1, 8)[:, None] / 8.0
        pts = ends[0] + t * (ends[1] - ends[0])
        tangent = np.array([-L.normal[1], L.normal[0]], dtype=float)
        out.append((j, pts, tangent / np.linalg.norm(tangent)))
    return out


class _Positivity:
    """Grid evaluation of min eig(Φ/v) for coefficient vectors z."""

    def __init__(self, system: _AKSystem, grid_points: int):
        P, ws = system.P, system.ws
        self.m = system.m
        self.pts = _interior_grid(P, grid_points)
        self.basis = _monomial_matrix(system.monomials, self.pts)
        self.v = ws.v.evaluate_grid(self.pts)
        normals = np.array([L.normal for L in P.labels], dtype=float)
        offsets = np.array([L.offset for L in P.labels], dtype=float)
        dist = (self.pts @ normals.T + offsets) / np.linalg.norm(normals, axis=1)
        self.scale = np.minimum(1.0, dist.min(axis=1))
        self.facets = [(pts, tangent, _monomial_matrix(system.monomials, pts), ws.v.evaluate_grid(pts))
                       for _, pts, tangent in _facet_samples(P)]

    def entries(self, z: np.ndarray, basis: np.ndarray) -> np.ndarray:
        return np.stack([basis @ z[e * self.m:(e + 1) * self.m] for e in range(3)])

    def eigs(self, z: np.ndarray) -> np.ndarray:
        return _min_eigs(self.entries(z, self.basis), self.v)

    def objective(self, z: np.ndarray) -> float:
        """Smallest eigenvalue relative to the distance to ∂P (H degenerates linearly there)."""
        return float(np.min(self.eigs(z) / self.scale))

    def facet_min(self, z: np.ndarray) -> float:
        low = math.inf
        for pts, tangent, basis, v in self.facets:
            phi = self.entries(z, basis)
            quad = tangent[0] ** 2 * phi[0] + 2 * tangent[0] * tangent[1] * phi[1] + tangent[1] ** 2 * phi[2]
            low = min(low, float(np.min(quad / v)))
        return low


def _coordinate_ascent(z: np.ndarray, kernel: np.ndarray, pos: _Positivity, iterations: int) -> Tuple[np.ndarray, int]:
    """Move along kernel directions while the smallest normalized eigenvalue improves."""
    best = pos.objective(z)
    steps = 0
    step = 1.0
    for _ in range(iterations):
        improved = False
        for k in range(kernel.shape[1]):
            for s in (step, -step):
                trial = z + s * kernel[:, k]
                val = pos.objective(trial)
                if val > best:
                    z, best, improved = trial, val, True
                    steps += 1
                    break
        if best > 0:
            break
        if not improved:
            step /= 2
    return z, steps


def _verify(P: LabelledPolytope, ws: WeightSystem, polys: Dict[Tuple[int, int], PolynomialFunc]) -> float:
    """PDE and boundary residuals of Φ at fresh points, from the polynomials themselves."""
    rng = np.random.default_rng(1)
    verts = np.array(P.vertices, dtype=float)
    weights = rng.dirichlet(np.ones(len(verts)), size=12)
    pts = weights @ verts
    phi = {key: polys[key] for key in ENTRIES}
    div = (phi[(0, 0)].diff(0).diff(0) + phi[(0, 1)].diff(0).diff(1) * 2 + phi[(1, 1)].diff(1).diff(1))
    worst = float(np.max(np.abs(-div.evaluate_grid(pts) - ws.w.evaluate_grid(pts))))
    full = {(0, 0): phi[(0, 0)], (0, 1): phi[(0, 1)], (1, 0): phi[(0, 1)], (1, 1): phi[(1, 1)]}
    for j, L in enumerate(P.labels):
        ends = np.array(P.facet_vertices(j)[:2], dtype=float)
        t = rng.uniform(0.05, 0.95, size=5)[:, None]
        fpts = ends[0] + t * (ends[1] - ends[0])
        u = [float(a) for a in L.normal]
        quad = sum((full[(a, b)] * u[a] * u[b] for a in range(2) for b in range(2)), PolynomialFunc.constant(0, 2))
        vv = ws.v.evaluate_grid(fpts)
        for k in range(2):
            comp = sum((full[(k, b)] * u[b] for b in range(2)), PolynomialFunc.constant(0, 2))
            worst = max(worst, float(np.max(np.abs(comp.evaluate_grid(fpts)))))
            grad = quad.diff(k).evaluate_grid(fpts) - 2.0 * u[k] * vv
            worst = max(worst, float(np.max(np.abs(grad))))
    return worst


def solve_ak(P: LabelledPolytope, ws: WeightSystem, degree: Optional[int] = None, degree_slack: int = 6,
             tol: float = 1e-9, ascent_iterations: int = 50, grid_points: int = 41) -> AKCertificate:
    """
    Least-norm polynomial Φ = vH of degree ≤ D solving −Σ Φ_ij,ij = w with
    the facet conditions, escalating D up to deg w + degree_slack while the
    system is inconsistent; positivity of Φ/v is then scanned.
    """
    _require_consistent(ws)
    if P.dim != 2:
        raise SolverError(f"solve_ak handles polygons only, got dimension {P.dim}")
    d0 = degree if degree is not None else ws.w.degree + 2
    d_max = max(d0, ws.w.degree + degree_slack)
    reference = _reference(P, ws)
    tried: List[int] = []
    last: Optional[_AKSystem] = None
    for D in range(d0, d_max + 1):
        tried.append(D)
        system = _AKSystem(P, ws, D)
        last = system
        z_ref = system.vector(reference) if reference is not None else None
        if z_ref is None:
            z_ref = np.zeros(3 * system.m)
        delta, *_ = np.linalg.lstsq(system.A, system.b - system.A @ z_ref, rcond=None)
        z = z_ref + delta
        pde, bc = system.residuals(z)
        scale = max(1.0, float(np.max(np.abs(system.b))))
        if max(pde, bc) > tol * scale:
            if D < d_max:
                warnings.warn(f"AK system inconsistent at degree {D} (residual {max(pde, bc):.3e}); escalating")
            continue
        kernel = null_space(system.A)
        rank = system.A.shape[1] - kernel.shape[1]
        pos = _Positivity(system, grid_points)
        steps = 0
        if pos.objective(z) <= 0 and kernel.shape[1]:
            z, steps = _coordinate_ascent(z, kernel, pos, ascent_iterations)
            pde, bc = system.residuals(z)
        eigs = pos.eigs(z)
        k = int(np.argmin(eigs))
        polys = system.polynomials(z)
        facet_min = pos.facet_min(z)
        verify = _verify(P, ws, polys)
        positive = eigs[k] > 0 and facet_min > 0 and max(pde, bc) <= tol * scale and verify <= 1e-8
        table = [{"x1": float(p[0]), "x2": float(p[1]), "min_eig": float(e)} for p, e in zip(pos.pts, eigs)]
        return AKCertificate(
            phi_field=MatrixField.from_polynomials(polys, role="Phi"), degree=D,
            pde_residual=pde, bc_residual=bc, min_eig=float(eigs[k]),
            argmin=(float(pos.pts[k, 0]), float(pos.pts[k, 1])),
            verdict="positive" if positive else "indefinite", facet_min=facet_min, verify_residual=verify,
            rank=rank, nullity=kernel.shape[1], unknowns=system.A.shape[1], equations=system.A.shape[0],
            degrees_tried=tried, ascent_steps=steps, eig_table=table,
        )
    rank = int(np.linalg.matrix_rank(last.A)) if last is not None else 0
    return AKCertificate(
        phi_field=None, degree=None, pde_residual=math.inf, bc_residual=math.inf, min_eig=math.nan,
        argmin=None, verdict="infeasible", rank=rank,
        unknowns=last.A.shape[1] if last is not None else 0,
        equations=last.A.shape[0] if last is not None else 0, degrees_tried=tried,
    )


# -----------------------
# Combined verdict
# -----------------------


@dataclass
class CertifyReport:
    verdict: str
    route: str
    solve: Any
    scan: Optional[StabilityReport]
    evidence: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({
            "verdict": self.verdict,
            "route": self.route,
            "solve": self.solve.to_dict() if self.solve is not None else None,
            "scan": self.scan.to_dict() if self.scan is not None else None,
            "evidence": self.evidence,
            "warnings": self.warnings,
        })


def _warn(report: CertifyReport, message: str) -> None:
    warnings.warn(message)
    report.warnings.append(message)


def certify(P: LabelledPolytope, ws: WeightSystem, directions: int = 36, offsets: int = 41, refine: bool = True,
            grid_points: Optional[int] = None, degree: Optional[int] = None, degree_slack: int = 6,
            tol: float = 1e-9, affine_tol: float = 1e-8, ascent_iterations: int = 50) -> CertifyReport:
    """EXISTS, NOT_STABLE or UNDECIDED from the solver route and the crease scan."""
    _require_consistent(ws)
    if P.dim not in (1, 2):
        raise SolverError(f"certify handles dimensions 1 and 2, got {P.dim}")
    route = "solve_1d" if P.dim == 1 else "solve_ak"
    residuals = affine_residuals(P, ws)
    worst = max(abs(float(r)) for r in residuals)
    if worst > affine_tol:
        # F ≠ 0 on an affine f: one of ±f is a convex test function with F < 0.
        return CertifyReport(NOT_STABLE, route, None, None, evidence={
            "reason": "futaki invariant does not vanish on affine functions",
            "affine_residuals": residuals})

    scan = stability_scan(P, ws, directions=directions, offsets=offsets, refine=refine)
    report = CertifyReport(UNDECIDED, route, None, scan)
    report.evidence["lambda_hat"] = scan.lambda_hat
    report.evidence["negatives"] = len(scan.negatives)
    if not ws.is_fibration:
        report.evidence["scope"] = "weights are not of fibration type; the AK route is a sufficient criterion only"
        _warn(report, report.evidence["scope"])

    if P.dim == 1:
        solved = solve_1d(P, ws, grid_points=grid_points or 256, affine_tol=affine_tol)
        report.solve = solved
        exists = solved.positive
        if not solved.positive:
            crease = CreaseFunction((Fraction(1),), solved.argmin)
            report.evidence["destabilizer"] = dict(crease.to_dict(), futaki=futaki(P, ws, crease))
    else:
        cert = solve_ak(P, ws, degree=degree, degree_slack=degree_slack, tol=tol,
                        ascent_iterations=ascent_iterations, grid_points=grid_points or 41)
        report.solve = cert
        exists = cert.is_positive

    if exists and scan.has_destabilizer:
        report.verdict = UNDECIDED
        _warn(report, f"{route} certifies existence but the scan found {len(scan.negatives)} negative samples")
    elif exists:
        report.verdict = EXISTS
    elif scan.has_destabilizer or (P.dim == 1 and not report.solve.positive):
        report.verdict = NOT_STABLE
        if scan.has_destabilizer:
            f, val = scan.negatives[0]
            report.evidence["destabilizer"] = dict(f.to_dict(), futaki=val)
    return report
