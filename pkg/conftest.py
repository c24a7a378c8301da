import os
import sys
from fractions import Fraction

import pytest

ROOT = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.join(ROOT, 'src'))
sys.path.insert(0, ROOT)

collect_ignore = ["examples", "outputs"]

from geometry import interval, standard_simplex, unit_cube  # noqa: E402
from polynomials import PolynomialFunc  # noqa: E402
from weights import FibrationData, FibrationFactor, build_weight_system, explicit_weight_system  # noqa: E402


@pytest.fixture(scope="session")
def unit_interval():
    return interval(0, 1)


@pytest.fixture(scope="session")
def simplex2():
    return standard_simplex(2)


@pytest.fixture(scope="session")
def square():
    return unit_cube(2)


@pytest.fixture(scope="session")
def round_ws(unit_interval):
    """[0,1] with v = 1: l_ext = 4."""
    return build_weight_system(unit_interval)


@pytest.fixture(scope="session")
def weighted_fib():
    return FibrationData((FibrationFactor((1,), 2),))


@pytest.fixture(scope="session")
def weighted_ws(unit_interval, weighted_fib):
    """[0,1] with v = x + 2: l_ext = (120x + 84)/37."""
    return build_weight_system(unit_interval, weighted_fib)


@pytest.fixture(scope="session")
def destabilized_ws(unit_interval):
    """v = 1, w = 4 + 32(6x^2 - 6x + 1): normalized but Φ(1/2) < 0."""
    v = PolynomialFunc.constant(1, 1)
    w = PolynomialFunc.from_table({"0": 36, "1": -192, "2": 192}, 1)
    return explicit_weight_system(unit_interval, v, w)


@pytest.fixture(scope="session")
def cp2_ws(simplex2):
    return build_weight_system(simplex2)


