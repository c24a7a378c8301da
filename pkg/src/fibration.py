# -*- coding: utf-8 -*-
"""
Total-space quantities for semi-simple principal toric fibrations, and the
class sweep over projective bundles of curves.
"""
import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from errors import WeightError
from geometry import LabelledPolytope
from numbers_util import Scalar, jsonable, to_point, to_scalar
from potentials import SymplecticPotential, v_scalar_curvature
from quadrature import integrate_interior
from polynomials import PolynomialFunc
from solvers import EXISTS, NOT_STABLE, UNDECIDED, CertifyReport, certify
from weights import FibrationData, FibrationFactor, WeightSystem, build_weight_system

BASE_VOLUME = "× Vol(S, ω_S^[d])"


@dataclass
class TotalScalarReport:
    values: List[Scalar]
    targets: List[Optional[Scalar]]
    deviation: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({"values": self.values, "targets": self.targets, "deviation": self.deviation})


def total_scalar(fib: FibrationData, ws: WeightSystem, u: SymplecticPotential, probes: Sequence[Any],
                 mode: str = "auto", h: Optional[float] = None) -> TotalScalarReport:
    """Scal(ω̃) = Σ_a Scal_a/(<p_a,x>+c_a) + Scal_v(u)/v, and its sup-distance to ℓ_ext."""
    points = [to_point(p) for p in probes]
    scal_v = v_scalar_curvature(u, ws.v, points, mode=mode, h=h)
    values, targets = [], []
    for x, s in zip(points, scal_v):
        total = s / ws.v(x) if isinstance(s, Fraction) else float(s) / float(ws.v(x))
        for f in fib.factors:
            if f.scal != 0:
                total = total + f.scal / f.affine(x)
        values.append(total)
        targets.append(ws.ell_ext(x) if ws.ell_ext is not None else None)
    deviation = None
    if ws.ell_ext is not None and values:
        deviation = max(abs(float(a) - float(b)) for a, b in zip(values, targets))
    return TotalScalarReport(values, targets, deviation)


def total_volume_factor(P: LabelledPolytope, v: PolynomialFunc) -> Scalar:
    """∫_P v dx; the total volume is this times the base volume."""
    return integrate_interior(P, v)


def curve_scal(genus: int, area: Any) -> Scalar:
    """Constant scalar curvature of a genus-g curve of the given area (Gauss-Bonnet)."""
    area = to_scalar(area)
    if area <= 0:
        raise WeightError(f"curve area must be positive, got {area}")
    if genus == 1:
        return Fraction(0)
    return 8 * math.pi * (1 - genus) / float(area)


def big_class_obstruction_expected(genus: Optional[int], p: Sequence[int]) -> bool:
    if genus is None:
        return False
    return genus > 2 and 2 * (genus - 1) > sum(p)


def certificate_hash(report: CertifyReport) -> Optional[str]:
    """SHA-256 of the canonical JSON coefficient table of the certificate."""
    if report.solve is None:
        return None
    data = report.solve.to_dict()
    table = data.get("phi")
    if table is None:
        return None
    blob = json.dumps(jsonable(table), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass
class FibrationScenario:
    fiber_polytope: LabelledPolytope
    fib: FibrationData
    class_sweep: List[Tuple[Any, ...]]
    genus: Optional[int] = None
    area: Any = 1
    name: str = "scenario"

    def __post_init__(self):
        if self.genus is not None:
            scal = curve_scal(self.genus, self.area)
            self.fib = FibrationData(tuple(FibrationFactor(f.p, f.c, f.d, scal) for f in self.fib.factors))
        self.class_sweep = [tuple(c) if isinstance(c, (list, tuple)) else (c,) for c in self.class_sweep]
        for c in self.class_sweep:
            self.fib.with_offsets(c).check_positive(self.fiber_polytope)

    def fibration_for(self, offsets: Sequence[Any]) -> FibrationData:
        return self.fib.with_offsets(offsets)

    @property
    def degrees(self) -> List[int]:
        return [int(a) for f in self.fib.factors for a in f.p]


@dataclass
class ScenarioReport:
    name: str
    classes: List[Dict[str, Any]] = field(default_factory=list)
    counts: Dict[str, int] = field(default_factory=dict)
    big_class_obstruction_expected: bool = False
    note: str = "every Kähler class is checked on the sampled class parameters only"

    @property
    def all_exist(self) -> bool:
        return bool(self.classes) and self.counts.get(EXISTS, 0) == len(self.classes)

    @property
    def has_not_stable(self) -> bool:
        return self.counts.get(NOT_STABLE, 0) > 0

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({"name": self.name, "classes": self.classes, "counts": self.counts,
                         "all_exist": self.all_exist,
                         "big_class_obstruction_expected": self.big_class_obstruction_expected,
                         "note": self.note})


def calabi_dream_check(scenario: FibrationScenario, **certify_options: Any) -> ScenarioReport:
    """Certify every sampled class of the scenario and aggregate the verdicts."""
    P = scenario.fiber_polytope
    report = ScenarioReport(
        name=scenario.name,
        counts={EXISTS: 0, NOT_STABLE: 0, UNDECIDED: 0},
        big_class_obstruction_expected=big_class_obstruction_expected(scenario.genus, scenario.degrees),
    )
    for offsets in scenario.class_sweep:
        fib = scenario.fibration_for(offsets)
        ws = build_weight_system(P, fib)
        result = certify(P, ws, **certify_options)
        report.counts[result.verdict] += 1
        report.classes.append({
            "c": list(offsets),
            "verdict": result.verdict,
            "lambda_hat": result.scan.lambda_hat if result.scan is not None else None,
            "ell_ext": ws.ell_ext.to_dict() if ws.ell_ext is not None else None,
            "volume_factor": total_volume_factor(P, ws.v),
            "certificate_sha256": certificate_hash(result),
            "destabilizer": result.evidence.get("destabilizer"),
        })
    return report
