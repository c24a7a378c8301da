from fractions import Fraction

import numpy as np
import pytest

from errors import WeightError
from geometry import AffineFunc, interval, standard_simplex, unit_cube
from polynomials import PolynomialFunc
from weights import (
    FibrationData, FibrationFactor, affine_residuals, build_weight_system, explicit_weight_system,
    extremal_split, is_normalized, make_base_term, make_v, solve_extremal_affine,
)
from fibration import total_volume_factor


# =========================================
# Extremal affine function
# =========================================


def test_round_interval_is_constant(unit_interval, round_ws):
    assert round_ws.ell_ext == AffineFunc((0,), 4)
    assert round_ws.w == PolynomialFunc.constant(4, 1)


def test_fubini_study_simplex(simplex2, cp2_ws):
    assert cp2_ws.ell_ext == AffineFunc((0, 0), 12)
    xi, c, constant = extremal_split(cp2_ws.ell_ext)
    assert constant and c == 12


def test_weighted_interval(weighted_ws):
    assert weighted_ws.ell_ext == AffineFunc((Fraction(120, 37),), Fraction(84, 37))
    xi, c, constant = extremal_split(weighted_ws.ell_ext)
    assert xi == (Fraction(120, 37),)
    assert not constant


def test_v_is_product_of_factors(simplex2):
    fib = FibrationData((FibrationFactor((1, 0), 1), FibrationFactor((0, 1), 2, d=2)))
    v = make_v(simplex2, fib)
    assert v == PolynomialFunc.from_expr("(x1 + 1)*(x2 + 2)**2", 2)


def test_base_term_cancels_one_factor(unit_interval):
    fib = FibrationData((FibrationFactor((1,), 2, d=2, scal=3),))
    base = make_base_term(unit_interval, fib)
    assert base == PolynomialFunc.from_expr("3*(x1 + 2)", 1)


def test_solve_extremal_affine_matches_builder(unit_interval, weighted_fib, weighted_ws):
    assert solve_extremal_affine(unit_interval, weighted_fib) == weighted_ws.ell_ext


def test_flipped_sign_flips_boundary_term(unit_interval):
    ws = build_weight_system(unit_interval, futaki_sign="flipped")
    assert ws.ell_ext == AffineFunc((0,), -4)
    assert all(r == 0 for r in affine_residuals(unit_interval, ws))


def test_unknown_sign_rejected(unit_interval):
    with pytest.raises(WeightError, match="futaki_sign"):
        build_weight_system(unit_interval, futaki_sign="other")


# =========================================
# Affine vanishing on random fixtures
# =========================================


def _random_fixtures():
    rng = np.random.default_rng(7)
    shapes = [interval(0, 1), interval(Fraction(-1, 2), 2), standard_simplex(2), unit_cube(2)]
    out = []
    for k in range(20):
        P = shapes[k % len(shapes)]
        factors = []
        for _ in range(int(rng.integers(0, 3))):
            p = tuple(int(a) for a in rng.integers(0, 3, size=P.dim))
            low = min(sum(a * x for a, x in zip(p, v)) for v in P.vertices)
            c = Fraction(int(rng.integers(1, 6)), int(rng.integers(1, 4))) - low
            scal = int(rng.integers(-4, 5))
            factors.append(FibrationFactor(p, c, d=int(rng.integers(1, 3)), scal=scal))
        out.append((P, FibrationData(tuple(factors))))
    return out


@pytest.mark.parametrize("P,fib", _random_fixtures())
def test_futaki_vanishes_on_affine_functions(P, fib):
    ws = build_weight_system(P, fib)
    assert all(r == 0 for r in affine_residuals(P, ws))
    assert is_normalized(P, ws)


# =========================================
# Explicit weights and validation
# =========================================


def test_explicit_weights_not_normalized(unit_interval):
    ws = explicit_weight_system(unit_interval, PolynomialFunc.constant(1, 1), PolynomialFunc.constant(5, 1))
    assert not is_normalized(unit_interval, ws)
    # 2(v(0) + v(1)) - ∫ 5
    assert affine_residuals(unit_interval, ws)[0] == -1


def test_destabilized_weights_are_normalized(unit_interval, destabilized_ws):
    assert is_normalized(unit_interval, destabilized_ws)
    assert not destabilized_ws.is_fibration


def test_nonpositive_v_rejected(unit_interval):
    with pytest.raises(WeightError, match="not positive"):
        explicit_weight_system(unit_interval, PolynomialFunc.from_expr("x1 - 1/2", 1), PolynomialFunc.constant(1, 1))


def test_fibration_factor_must_be_positive(unit_interval):
    fib = FibrationData((FibrationFactor((1,), 0),))
    with pytest.raises(WeightError, match="not positive at vertex"):
        build_weight_system(unit_interval, fib)


def test_fibration_factor_needs_integer_p():
    with pytest.raises(WeightError, match="integer vector"):
        FibrationFactor((Fraction(1, 2),), 1)


def test_wrong_offset_count():
    fib = FibrationData((FibrationFactor((1,), 1),))
    with pytest.raises(WeightError, match="2 offsets for 1 factors"):
        fib.with_offsets([1, 2])


# =========================================
# Volume factors
# =========================================


def test_volume_factors(unit_interval, simplex2, weighted_ws):
    assert total_volume_factor(unit_interval, weighted_ws.v) == Fraction(5, 2)
    assert total_volume_factor(simplex2, PolynomialFunc.constant(1, 2)) == Fraction(1, 2)
    v = make_v(simplex2, FibrationData((FibrationFactor((1, 2), 3),)))
    # 1/6 + 2/6 + 3/2
    assert total_volume_factor(simplex2, v) == 2
