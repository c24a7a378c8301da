import math
from fractions import Fraction

import pytest

from errors import WeightError
from fibration import (
    BASE_VOLUME, FibrationScenario, big_class_obstruction_expected, calabi_dream_check, certificate_hash,
    curve_scal, total_scalar,
)
from geometry import interval, standard_simplex
from polynomials import PolynomialFunc
from potentials import guillemin_potential
from solvers import EXISTS, NOT_STABLE, certify, solve_1d
from weights import FibrationData, FibrationFactor, build_weight_system

SCAN = dict(directions=12, offsets=11, refine=False)


# =========================================
# Total-space formulas
# =========================================


def test_total_scalar_of_guillemin(unit_interval, weighted_fib, weighted_ws):
    report = total_scalar(weighted_fib, weighted_ws, guillemin_potential(unit_interval), [(Fraction(1, 3),)])
    assert report.values == [Fraction(24, 7)]
    assert report.targets == [Fraction(124, 37)]


def test_total_scalar_without_factors(simplex2, cp2_ws):
    report = total_scalar(FibrationData(), cp2_ws, guillemin_potential(simplex2), [(Fraction(1, 4), Fraction(1, 4))])
    assert report.values == [12]
    assert report.deviation == 0


def test_total_scalar_adds_base_curvature(unit_interval):
    fib = FibrationData((FibrationFactor((1,), 2, scal=6),))
    ws = build_weight_system(unit_interval, fib)
    report = total_scalar(fib, ws, guillemin_potential(unit_interval), [(Fraction(1, 2),)])
    # (12x + 4)/(x + 2) + 6/(x + 2) at x = 1/2
    assert report.values == [Fraction(32, 5)]


def test_solved_potential_is_extremal(unit_interval, weighted_fib, weighted_ws):
    u = solve_1d(unit_interval, weighted_ws).u_recovered
    report = total_scalar(weighted_fib, weighted_ws, u, [(0.3,), (0.5,), (0.7,)])
    assert report.deviation < 1e-2


# =========================================
# Base curves
# =========================================


def test_curve_scal():
    assert curve_scal(1, 7) == 0
    assert curve_scal(0, 4 * math.pi) == pytest.approx(2.0)
    assert curve_scal(2, 1) == pytest.approx(-8 * math.pi)


def test_curve_scal_needs_positive_area():
    with pytest.raises(WeightError, match="area"):
        curve_scal(0, 0)


def test_big_class_expectation():
    assert big_class_obstruction_expected(3, (1, 2))
    assert not big_class_obstruction_expected(1, (1, 2))
    assert not big_class_obstruction_expected(None, (1, 2))


def test_scenario_sets_curve_scalar():
    scenario = FibrationScenario(standard_simplex(2), FibrationData((FibrationFactor((1, 2), 1),)), [1, 2], genus=3)
    assert scenario.fib.factors[0].scal == pytest.approx(-16 * math.pi)
    assert scenario.class_sweep == [(1,), (2,)]


def test_scenario_rejects_nonpositive_class():
    with pytest.raises(WeightError, match="not positive"):
        FibrationScenario(interval(0, 1), FibrationData((FibrationFactor((-1,), 1),)), [1])


def test_volume_label():
    assert BASE_VOLUME.startswith("×")


# =========================================
# Class sweeps
# =========================================


def test_projective_line_bundle_sweep():
    scenario = FibrationScenario(interval(0, 1), FibrationData((FibrationFactor((1,), 2),)), [2, 3], genus=1)
    report = calabi_dream_check(scenario, **SCAN)
    assert report.all_exist
    assert report.counts[EXISTS] == 2


def test_calabi_dream_over_elliptic_curve():
    scenario = FibrationScenario(standard_simplex(2), FibrationData((FibrationFactor((1, 2), 1),)), [1, 2, 5],
                                 genus=1, name="calabi dream")
    report = calabi_dream_check(scenario, **SCAN)
    assert report.all_exist
    assert not report.big_class_obstruction_expected
    for row in report.classes:
        assert row["verdict"] == EXISTS
        assert float(row["lambda_hat"]) > 0
        assert len(row["certificate_sha256"]) == 64


def test_big_class_over_genus_three_curve():
    scenario = FibrationScenario(standard_simplex(2), FibrationData((FibrationFactor((1, 2), 1),)),
                                 [Fraction(1, 10)], genus=3)
    report = calabi_dream_check(scenario, directions=24, offsets=21, refine=False)
    assert report.big_class_obstruction_expected
    assert report.has_not_stable
    row = report.classes[0]
    assert row["verdict"] == NOT_STABLE
    assert row["destabilizer"]["futaki"] < 0


def test_certificate_hash_is_stable(simplex2, cp2_ws):
    first = certify(simplex2, cp2_ws, **SCAN)
    second = certify(simplex2, cp2_ws, **SCAN)
    assert certificate_hash(first) == certificate_hash(second)
    assert certificate_hash(certify(interval(0, 1), build_weight_system(interval(0, 1)), **SCAN)) is not None
