from fractions import Fraction

import numpy as np
import pytest

from errors import SolverError
from polynomials import PolynomialFunc
from solvers import EXISTS, NOT_STABLE, certify, phi_profile, solve_1d, solve_ak
from stability import CreaseFunction, futaki
from weights import affine_residuals, build_weight_system, explicit_weight_system

SCAN = dict(directions=12, offsets=11, refine=False)


def poly(expr, dim):
    return PolynomialFunc.from_expr(expr, dim)


# =========================================
# Interval route
# =========================================


def test_round_profile_is_exact(unit_interval, round_ws):
    phi = phi_profile(unit_interval, round_ws)
    assert phi == poly("2*x1 - 2*x1**2", 1)


def test_round_solve_recovers_guillemin(unit_interval, round_ws):
    report = solve_1d(unit_interval, round_ws)
    assert report.positive
    assert report.residuals == {"phi_beta": 0, "dphi_beta": 0}
    assert np.max(np.abs(report.u_recovered.correction.values)) <= 1e-9
    assert report.fd_residual < 1e-2


def test_weighted_profile(unit_interval, weighted_ws):
    report = solve_1d(unit_interval, weighted_ws)
    assert report.phi == poly("4*x1 - (84*x1**2 + 54*x1**3 + 10*x1**4)/37", 1)
    assert report.positive
    assert report.min_interior > 0
    assert report.fd_residual < 1e-2


def test_destabilized_profile_goes_negative(unit_interval, destabilized_ws):
    report = solve_1d(unit_interval, destabilized_ws)
    assert not report.positive
    assert report.phi((Fraction(1, 2),)) == Fraction(-1, 2)
    assert report.min_interior < 0
    assert report.argmin == pytest.approx(0.5, abs=1e-3)
    assert report.u_recovered is None


@pytest.mark.parametrize("c", [Fraction(1, 5), Fraction(1, 3), Fraction(4, 5)])
def test_crease_futaki_equals_profile(unit_interval, weighted_ws, c):
    phi = phi_profile(unit_interval, weighted_ws)
    assert futaki(unit_interval, weighted_ws, CreaseFunction((1,), c)) == phi((c,))


def test_unnormalized_weights_rejected(unit_interval):
    ws = explicit_weight_system(unit_interval, poly("1", 1), poly("5", 1))
    with pytest.raises(SolverError, match="affine-vanishing"):
        solve_1d(unit_interval, ws)


# shifted Legendre P3 on [0,1]; orthogonal to 1 and x
ORTHOGONAL_TO_AFFINE = "20*x1**3 - 30*x1**2 + 12*x1 - 1"


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("name", ["round_ws", "weighted_ws", "destabilized_ws"])
def test_boundary_residuals_vanish_iff_weights_normalized(request, unit_interval, name, seed):
    base = request.getfixturevalue(name)
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, 4))
    eps = Fraction(int(rng.integers(1, 17)), 8) * (1 if rng.integers(0, 2) else -1)
    eta = Fraction(int(rng.integers(-8, 9)), 4)
    shift = poly(f"({eta})*({ORTHOGONAL_TO_AFFINE})", 1)
    beta = (1,)
    for drift in (Fraction(0), eps):
        w = base.w + shift + poly(f"({drift})*x1**{k}", 1)
        ws = explicit_weight_system(unit_interval, base.v, w)
        normalized = all(r == 0 for r in affine_residuals(unit_interval, ws))
        assert normalized == (drift == 0)

        phi = phi_profile(unit_interval, ws)
        vanishing = phi(beta) == 0 and phi.diff(0)(beta) + 2 * ws.v(beta) == 0
        assert vanishing == normalized

        if normalized:
            report = solve_1d(unit_interval, ws, grid_points=64)
            assert all(r == 0 for r in report.residuals.values())
        else:
            with pytest.raises(SolverError, match="affine-vanishing"):
                solve_1d(unit_interval, ws)


def test_solve_1d_needs_interval(simplex2, cp2_ws):
    with pytest.raises(SolverError, match="interval"):
        solve_1d(simplex2, cp2_ws)


def test_flipped_sign_rejected(unit_interval):
    ws = build_weight_system(unit_interval, futaki_sign="flipped")
    with pytest.raises(SolverError, match="consistent"):
        solve_1d(unit_interval, ws)


def test_profile_table(unit_interval, round_ws):
    rows = solve_1d(unit_interval, round_ws).profile(points=5)
    assert [r["x"] for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert rows[2]["phi"] == pytest.approx(0.5)
    assert all(r["q"] == pytest.approx(2.0) for r in rows)


# =========================================
# Polygon route
# =========================================


def test_simplex_certificate_is_positive(simplex2, cp2_ws):
    cert = solve_ak(simplex2, cp2_ws)
    assert cert.is_positive
    assert cert.degree == 2
    assert cert.pde_residual <= 1e-9 and cert.bc_residual <= 1e-9
    assert cert.verify_residual <= 1e-8
    assert cert.min_eig > 0 and cert.facet_min > 0
    phi = cert.phi_field
    assert phi.role == "Phi"
    assert float(phi.evaluate((0.25, 0.5))[0, 1]) == pytest.approx(-0.25, abs=1e-8)


def test_square_certificate_is_positive(square):
    ws = build_weight_system(square)
    cert = solve_ak(square, ws)
    assert cert.is_positive
    assert cert.to_dict()["diagnostics"]["degrees_tried"] == [2]


def test_weighted_simplex_certificate(simplex2):
    from weights import FibrationData, FibrationFactor
    ws = build_weight_system(simplex2, FibrationData((FibrationFactor((1, 2), 2),)))
    cert = solve_ak(simplex2, ws)
    assert cert.verdict == "positive"
    assert cert.degree >= ws.w.degree + 2


def test_solve_ak_needs_polygon(unit_interval, round_ws):
    with pytest.raises(SolverError, match="polygons"):
        solve_ak(unit_interval, round_ws)


# =========================================
# Combined verdicts
# =========================================


def test_certify_round_interval(unit_interval, round_ws):
    report = certify(unit_interval, round_ws, **SCAN)
    assert report.verdict == EXISTS
    assert report.route == "solve_1d"
    assert not report.scan.negatives


def test_certify_weighted_interval(unit_interval, weighted_ws):
    report = certify(unit_interval, weighted_ws, **SCAN)
    assert report.verdict == EXISTS
    assert report.evidence["negatives"] == 0


def test_certify_destabilized_interval(unit_interval, destabilized_ws):
    with pytest.warns(UserWarning, match="fibration type"):
        report = certify(unit_interval, destabilized_ws, directions=2, offsets=41)
    assert report.verdict == NOT_STABLE
    assert report.evidence["destabilizer"]["futaki"] < 0


def test_certify_unnormalized_is_not_stable(unit_interval):
    ws = explicit_weight_system(unit_interval, poly("1", 1), poly("5", 1))
    report = certify(unit_interval, ws)
    assert report.verdict == NOT_STABLE
    assert report.scan is None
    assert report.evidence["affine_residuals"][0] == -1


def test_certify_simplex(simplex2, cp2_ws):
    report = certify(simplex2, cp2_ws, **SCAN)
    assert report.verdict == EXISTS
    assert report.route == "solve_ak"
    assert not report.scan.has_destabilizer
    data = report.to_dict()
    assert data["solve"]["verdict"] == "positive"
