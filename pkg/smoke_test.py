#!/usr/bin/env python3
import os
import sys
import tempfile
from fractions import Fraction

sys.path.append('src')

from geometry import check_delzant, interval, standard_simplex
from solvers import EXISTS, certify, solve_1d
from stability import CreaseFunction, futaki
from weights import build_weight_system


def smoke_test():
    print("Running smoke test...")

    # Test 1: polytopes
    try:
        P = interval(0, 1)
        Q = standard_simplex(2)
        assert check_delzant(P).passed and check_delzant(Q).passed
        print("✓ Interval and simplex built and Delzant")
    except Exception as e:
        print(f"✗ Polytope construction failed: {e}")
        return False

    # Test 2: extremal affine function
    try:
        ws = build_weight_system(P)
        assert ws.ell_ext.offset == 4
        print("✓ Extremal affine function on [0,1] is 4")
    except Exception as e:
        print(f"✗ Weight system failed: {e}")
        return False

    # Test 3: Futaki invariant of a crease
    try:
        value = futaki(P, ws, CreaseFunction((1,), Fraction(1, 2)))
        assert value == Fraction(1, 2)
        print(f"✓ Futaki invariant of the midpoint crease: {value}")
    except Exception as e:
        print(f"✗ Futaki invariant failed: {e}")
        return False

    # Test 4: 1D solver and combined verdict
    try:
        report = solve_1d(P, ws)
        assert report.positive
        verdict = certify(P, ws, offsets=11, refine=False).verdict
        assert verdict == EXISTS
        print(f"✓ Profile positive, certify verdict {verdict}")
    except Exception as e:
        print(f"✗ Solver failed: {e}")
        return False

    # Test 5: CLI end to end
    try:
        import run_toric
        with tempfile.TemporaryDirectory() as out_dir:
            code = run_toric.main(['extremal', '--config', 'cp2_config.json', '--output-dir', out_dir])
            assert code == 0 and os.path.exists(os.path.join(out_dir, 'extremal_report.json'))
        print("✓ CLI extremal run wrote its report")
    except Exception as e:
        print(f"✗ CLI run failed: {e}")
        return False

    print("✓ All smoke tests passed!")
    return True


if __name__ == "__main__":
    success = smoke_test()
    sys.exit(0 if success else 1)
