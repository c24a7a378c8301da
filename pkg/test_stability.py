from fractions import Fraction

import pytest

from errors import PolytopeError
from geometry import AffineFunc
from polynomials import PolynomialFunc
from stability import (
    CreaseFunction, PLMax, futaki, l1_norm, normalize, scan_directions, scan_offsets, stability_scan,
)

HALF = Fraction(1, 2)


# =========================================
# Futaki invariant
# =========================================


def test_crease_futaki_on_round_interval(unit_interval, round_ws):
    f = CreaseFunction((1,), HALF)
    assert futaki(unit_interval, round_ws, f) == HALF


@pytest.mark.parametrize("c", [Fraction(1, 5), Fraction(1, 3), Fraction(3, 4)])
def test_crease_futaki_closed_form(unit_interval, round_ws, c):
    # F(max(0, x - c)) = 2c(1 - c) for v = 1, w = 4
    assert futaki(unit_interval, round_ws, CreaseFunction((1,), c)) == 2 * c * (1 - c)


def test_futaki_vanishes_on_affine(unit_interval, simplex2, round_ws, cp2_ws):
    assert futaki(unit_interval, round_ws, AffineFunc((3,), -1)) == 0
    assert futaki(simplex2, cp2_ws, AffineFunc((1, -2), 5)) == 0


def test_plmax_futaki_matches_crease(unit_interval, round_ws):
    f = PLMax((AffineFunc((0,), 0), AffineFunc((1,), -HALF)))
    assert futaki(unit_interval, round_ws, f) == HALF


def test_polynomial_futaki(unit_interval, round_ws):
    # 2(f(0) + f(1)) - 4∫x^2 = 2 - 4/3
    assert futaki(unit_interval, round_ws, PolynomialFunc.from_expr("x1**2", 1)) == Fraction(2, 3)


def test_numeric_futaki_of_callable(unit_interval, round_ws):
    val = futaki(unit_interval, round_ws, lambda x: max(0.0, float(x[0]) - 0.5))
    assert val == pytest.approx(0.5, abs=1e-9)


def test_crease_outside_polytope_is_zero(simplex2, cp2_ws):
    assert futaki(simplex2, cp2_ws, CreaseFunction((1, 0), 2)) == 0


# =========================================
# Normalization and L1 norm
# =========================================


def test_normalize_affine_is_zero(unit_interval):
    assert normalize(unit_interval, AffineFunc((2,), 1), (HALF,)) == AffineFunc((0,), 0)


def test_normalize_reflects_active_crease(unit_interval):
    f = normalize(unit_interval, CreaseFunction((1,), Fraction(1, 4)), (HALF,))
    assert f == CreaseFunction((-1,), Fraction(-1, 4))
    assert f((0,)) == Fraction(1, 4)


def test_normalize_keeps_flat_crease(unit_interval):
    f = CreaseFunction((1,), Fraction(3, 4))
    assert normalize(unit_interval, f, (HALF,)) == f


def test_normalize_tie_gives_half_absolute_value(unit_interval):
    f = normalize(unit_interval, CreaseFunction((1,), HALF), (HALF,))
    assert isinstance(f, PLMax)
    assert f((0,)) == Fraction(1, 4) and f((1,)) == Fraction(1, 4) and f((HALF,)) == 0
    assert l1_norm(unit_interval, f) == Fraction(1, 8)


def test_normalize_polynomial_subtracts_tangent(unit_interval):
    f = normalize(unit_interval, PolynomialFunc.from_expr("x1**2", 1), (HALF,))
    assert f == PolynomialFunc.from_expr("(x1 - 1/2)**2", 1)


def test_normalize_needs_interior_point(unit_interval):
    with pytest.raises(PolytopeError, match="not interior"):
        normalize(unit_interval, CreaseFunction((1,), HALF), (1,))


def test_l1_norms(unit_interval, simplex2):
    assert l1_norm(unit_interval, CreaseFunction((1,), HALF)) == Fraction(1, 8)
    assert l1_norm(unit_interval, PolynomialFunc.constant(0, 1)) == 0
    assert l1_norm(simplex2, PolynomialFunc.constant(1, 2)) == HALF
    assert l1_norm(unit_interval, AffineFunc((1,), -HALF)) == Fraction(1, 4)


# =========================================
# Crease scan
# =========================================


def test_scan_grids(unit_interval, simplex2):
    assert scan_directions(1, 36) == [(1,), (-1,)]
    dirs = scan_directions(2, 4)
    assert dirs[0] == (1, 0) and dirs[1] == (0, 1)
    cs = scan_offsets(unit_interval, (Fraction(1),), 41)
    assert len(cs) == 41 and cs[20] == HALF
    assert cs[0] > 0 and cs[-1] < 1


def test_scan_round_interval_converges_to_four(unit_interval, round_ws):
    report = stability_scan(unit_interval, round_ws, offsets=41, refine=True)
    assert float(report.lambda_hat) == pytest.approx(4.0, abs=1e-3)
    assert not report.has_destabilizer
    assert report.refined
    assert report.samples > 0


def test_scan_simplex_is_positive(simplex2, cp2_ws):
    report = stability_scan(simplex2, cp2_ws, directions=12, offsets=11, refine=False)
    assert float(report.lambda_hat) > 0
    assert not report.negatives
    assert len(report.table) == 12 * 11


def test_scan_finds_destabilizer(unit_interval, destabilized_ws):
    report = stability_scan(unit_interval, destabilized_ws, offsets=41)
    assert report.has_destabilizer
    assert float(report.lambda_hat) < 0
    assert any(f.c == HALF and val == -HALF for f, val in report.negatives)


def test_scan_report_serializes(unit_interval, round_ws):
    data = stability_scan(unit_interval, round_ws, offsets=5, refine=False).to_dict()
    assert data["worst"]["type"] in ("crease", "plmax")
    assert data["negatives"] == []
