import numpy as np
import pytest

from ghmkit.bifurcation import CurveKind, fold_curve, hopf_curve
from ghmkit.ghm import GhmParams, bt_point, fixed_points, jacobian


def closest_fixed_point(m, b, r):
    return min(fixed_points(GhmParams(m, b, r)),
               key=lambda fp: abs(fp.state[0] + 1.0))


def test_fold_curve_matches_symbolic_oracle_at_r0():
    # Eliminating y from {y^2 + (1+B)y - M = 0, 1 + B + 2y = 0} gives
    # M = -(1+B)^2 / 4.
    curve = fold_curve(0.0, b_range=(0.2, 3.0), step=0.02)
    assert len(curve) >= 100
    m, b = curve.points[:, 0], curve.points[:, 1]
    assert b.min() >= 0.2 - 1e-9 and b.max() <= 3.0 + 1e-9
    assert np.max(np.abs(m + (1 + b) ** 2 / 4)) < 1e-8
    assert np.min(np.hypot(m + 1, b - 1)) < 1e-12   # passes through BT
    # specific point from the oracle
    i = np.argmin(np.abs(b - 3.0))
    assert abs(m[i] + 4.0) < 1e-6


def test_fold_curve_eigenvalue_condition():
    for r in (0.0, 0.05, -0.05):
        curve = fold_curve(r, b_range=(0.5, 2.0), step=0.05)
        assert curve.kind is CurveKind.FOLD
        assert np.max(curve.residuals) < 1e-8
        for m, b in curve.points[:: max(1, len(curve) // 10)]:
            fps = fixed_points(GhmParams(m, b, r))
            best = min(
                float(np.min(np.abs(fp.eigenvalues - 1.0))) for fp in fps)
            assert best < 1e-6


def test_hopf_curve_on_b_equals_1_at_r0():
    curve = hopf_curve(0.0, b_range=(0.2, 3.0), step=0.02)
    assert np.max(np.abs(curve.points[:, 1] - 1.0)) < 1e-8
    assert np.max(curve.residuals) < 1e-8
    # admissible M-interval endpoints where |trace| = 2: M in (-1, 3)
    assert curve.points[:, 0].min() > -1.0 - 1e-6
    assert curve.points[:, 0].max() < 3.0 + 1e-6
    assert curve.points[:, 0].max() > 2.9


def test_hopf_points_carry_unit_modulus_complex_pair():
    for r in (0.0, 0.05):
        curve = hopf_curve(r, b_range=(0.5, 2.0), step=0.05)
        for m, b in curve.points[:: max(1, len(curve) // 12)]:
            fps = fixed_points(GhmParams(m, b, r))
            ok = False
            for fp in fps:
                eigs = fp.eigenvalues
                if abs(eigs[0].imag) > 1e-9:
                    assert np.max(np.abs(np.abs(eigs) - 1.0)) < 1e-8
                    ok = True
            assert ok


def test_hopf_curve_departs_from_b1_at_order_r():
    curve = hopf_curve(0.05, b_range=(0.2, 3.0), step=0.05)
    dev = np.abs(curve.points[:, 1] - 1.0)
    assert dev.max() > 0.01      # departs from B = 1
    assert dev.max() < 0.06      # but only at O(R)


@pytest.mark.parametrize("r", [-0.05, 0.02, 0.05])
def test_fold_and_hopf_meet_at_bt(r):
    bt = bt_point(r)
    fold = fold_curve(r, b_range=(bt.b - 0.3, bt.b + 0.3), step=0.01)
    hopf = hopf_curve(r, b_range=(bt.b - 0.3, bt.b + 0.3), step=0.001)
    d_fold = np.min(np.hypot(fold.points[:, 0] - bt.m,
                             fold.points[:, 1] - bt.b))
    d_hopf = np.min(np.hypot(hopf.points[:, 0] - bt.m,
                             hopf.points[:, 1] - bt.b))
    assert d_fold < 1e-8
    assert d_hopf < 1e-4


def test_curve_steps_bounded():
    curve = fold_curve(0.0, b_range=(0.5, 2.0), step=0.05)
    gaps = np.linalg.norm(np.diff(curve.points, axis=0), axis=1)
    assert gaps.max() < 3 * 0.05
