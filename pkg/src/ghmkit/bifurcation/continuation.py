"""Pseudo-arclength continuation of fold and Hopf curves of the map family.

Both curves live in (y, M, B) space at fixed R, where y is the fixed-point
coordinate.  The defining systems are

    fold:  (1+R) y^2 + (1+B) y - M = 0   and   det(J - I) = 1 + B + 2(1+R) y = 0
    Hopf:  (1+R) y^2 + (1+B) y - M = 0   and   det(J) - 1 = B + R y - 1 = 0,

with the Hopf branch restricted to |trace J| = |(2+R) y| < 2 so the
eigenvalues are a complex pair on the unit circle.  Both curves emanate from
the double-eigenvalue-+1 point of the family.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import NoSeedError
from ..ghm import GhmParams, bt_point

CURVE_TOL = 1e-8
NEWTON_TOL = 1e-12
MAX_NEWTON = 20
STEP_FLOOR = 1e-6


class CurveKind(enum.Enum):
    FOLD = "Fold"
    HOPF = "Hopf"
    TANGENCY_PLUS = "TangencyPlus"
    TANGENCY_MINUS = "TangencyMinus"


@dataclass(frozen=True)
class BifurcationCurve:
    """Polyline in the (M, B) parameter plane at fixed R."""

    kind: CurveKind
    points: np.ndarray          # (k, 2) columns M, B
    r: float
    step: float
    residuals: np.ndarray       # defining-condition residual per point

    def __len__(self) -> int:
        return len(self.points)


# A continuation system: u = (y, M, B) -> residual 2-vector and 2x3 Jacobian.
System = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def _fold_system(r: float) -> System:
    def fun(u: np.ndarray):
        y, m, b = u
        f1 = (1.0 + r) * y * y + (1.0 + b) * y - m
        f2 = 1.0 + b + 2.0 * (1.0 + r) * y
        jac = np.array([
            [2.0 * (1.0 + r) * y + (1.0 + b), -1.0, y],
            [2.0 * (1.0 + r), 0.0, 1.0],
        ])
        return np.array([f1, f2]), jac

    return fun


def _hopf_system(r: float) -> System:
    def fun(u: np.ndarray):
        y, m, b = u
        f1 = (1.0 + r) * y * y + (1.0 + b) * y - m
        f2 = b + r * y - 1.0
        jac = np.array([
            [2.0 * (1.0 + r) * y + (1.0 + b), -1.0, y],
            [r, 0.0, 1.0],
        ])
        return np.array([f1, f2]), jac

    return fun


def _newton(system: System, u: np.ndarray, tangent: np.ndarray | None,
            target: np.ndarray | None) -> np.ndarray | None:
    """Correct u onto the curve; with tangent/target, keep the pseudo-arclength
    constraint tangent . (u - target) = 0.  Returns None on failure."""
    u = u.copy()
    for _ in range(MAX_NEWTON):
        f, jac = system(u)
        if tangent is None:
            # Seeding: plain Newton with the minimal-norm update.
            upd, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        else:
            res = np.append(f, tangent @ (u - target))
            aug = np.vstack([jac, tangent])
            try:
                upd = np.linalg.solve(aug, -res)
            except np.linalg.LinAlgError:
                return None
        u = u + upd
        if not np.all(np.isfinite(u)):
            return None
        f, _ = system(u)
        if np.max(np.abs(f)) < NEWTON_TOL and np.max(np.abs(upd)) < 1e-9 * max(
            1.0, float(np.max(np.abs(u)))
        ):
            return u
    f, _ = system(u)
    if np.max(np.abs(f)) < NEWTON_TOL:
        return u
    return None


def _tangent(system: System, u: np.ndarray, prev: np.ndarray | None) -> np.ndarray:
    _, jac = system(u)
    _, _, vt = np.linalg.svd(jac)
    t = vt[-1]
    if prev is not None and float(prev @ t) < 0.0:
        t = -t
    return t / np.linalg.norm(t)


def _continue_branch(
    system: System,
    u0: np.ndarray,
    t0: np.ndarray,
    step: float,
    keep: Callable[[np.ndarray], bool],
    max_steps: int,
) -> list[np.ndarray]:
    """March from u0 along t0 while ``keep`` accepts the corrected points."""
    pts: list[np.ndarray] = []
    u, t = u0, t0
    h = step
    for _ in range(max_steps):
        accepted = None
        h_try = h
        while h_try >= STEP_FLOOR:
            cand = _newton(system, u + h_try * t, t, u + h_try * t)
            if cand is not None and float((cand - u) @ t) > 0.0:
                accepted = cand
                break
            h_try *= 0.5
        if accepted is None:
            break
        if not keep(accepted):
            break
        pts.append(accepted)
        t = _tangent(system, accepted, t)
        u = accepted
        h = min(step, 2.0 * h_try)
    return pts


def _clamp_coordinate(system: System, u_in: np.ndarray, u_out: np.ndarray,
                      index: int, value: float) -> np.ndarray | None:
    """Solve for the curve point whose ``index`` coordinate equals ``value``
    between an inside point and the first outside point."""
    direction = np.zeros(3)
    direction[index] = 1.0
    guess = u_in + (u_out - u_in) * (
        (value - u_in[index]) / (u_out[index] - u_in[index])
    )

    def pinned(u: np.ndarray):
        f, jac = system(u)
        return f, jac

    # Newton on the square system {F = 0, u[index] = value}.
    u = guess.copy()
    for _ in range(MAX_NEWTON):
        f, jac = pinned(u)
        res = np.append(f, u[index] - value)
        aug = np.vstack([jac, direction])
        try:
            upd = np.linalg.solve(aug, -res)
        except np.linalg.LinAlgError:
            return None
        u = u + upd
        if np.max(np.abs(np.append(f, u[index] - value))) < NEWTON_TOL:
            return u
    f, _ = pinned(u)
    if np.max(np.abs(f)) < NEWTON_TOL:
        return u
    return None


def _assemble(kind: CurveKind, r: float, step: float, system: System,
              chain: list[np.ndarray]) -> BifurcationCurve:
    pts = np.array([[u[1], u[2]] for u in chain]) if chain else np.empty((0, 2))
    res = np.array([float(np.max(np.abs(system(u)[0]))) for u in chain])
    return BifurcationCurve(kind=kind, points=pts, r=r, step=step, residuals=res)


def fold_curve(
    r: float,
    b_range: tuple[float, float] = (0.2, 3.0),
    step: float = 0.02,
    max_steps: int = 100000,
) -> BifurcationCurve:
    """Continue the fold (saddle-node) curve through the BT point at fixed R.

    The curve satisfies the fixed-point equation together with
    det(J - I) = 0, so one Jacobian eigenvalue equals +1 along it.
    """
    system = _fold_system(r)
    bt = bt_point(r)
    y_bt = -1.0 / (1.0 + r / 2.0)
    u0 = _newton(system, np.array([y_bt, bt.m, bt.b]), None, None)
    if u0 is None:
        raise NoSeedError("Newton failed to converge from the BT-point seed")
    b_lo, b_hi = min(b_range), max(b_range)

    def keep(u: np.ndarray) -> bool:
        return b_lo <= u[2] <= b_hi

    t0 = _tangent(system, u0, None)
    if t0[2] < 0.0:          # orient branch 1 toward increasing B
        t0 = -t0
    up = _continue_branch(system, u0, t0, step, keep, max_steps)
    down = _continue_branch(system, u0, -t0, step, keep, max_steps)

    # Clamp both ends to the exact B-range boundary when the march left it.
    for branch, tdir in ((up, t0), (down, -t0)):
        tail = branch[-1] if branch else u0
        probe = _newton(system, tail + step * _tangent(system, tail, tdir), None, None)
        if probe is not None and not keep(probe):
            bound = b_hi if probe[2] > b_hi else b_lo
            clamped = _clamp_coordinate(system, tail, probe, 2, bound)
            if clamped is not None and abs(clamped[2] - tail[2]) > 1e-12:
                branch.append(clamped)

    chain = list(reversed(down)) + ([u0] if keep(u0) else []) + up
    return _assemble(CurveKind.FOLD, r, step, system, chain)


def hopf_curve(
    r: float,
    b_range: tuple[float, float] = (0.2, 3.0),
    step: float = 0.02,
    max_steps: int = 100000,
    trace_margin: float = 1e-9,
) -> BifurcationCurve:
    """Continue the Hopf curve (det J = 1, |trace J| < 2) from the BT point.

    Points keep a complex eigenvalue pair of unit modulus; the branch ends
    where |trace| reaches 2 (the BT point itself is excluded, since the pair
    is real there) or where B leaves ``b_range``.
    """
    system = _hopf_system(r)
    bt = bt_point(r)
    y_bt = -1.0 / (1.0 + r / 2.0)
    u_bt = _newton(system, np.array([y_bt, bt.m, bt.b]), None, None)
    if u_bt is None:
        raise NoSeedError("Newton failed to converge from the BT-point seed")
    b_lo, b_hi = min(b_range), max(b_range)

    def trace_of(u: np.ndarray) -> float:
        return -(2.0 + r) * u[0]

    def keep(u: np.ndarray) -> bool:
        return b_lo <= u[2] <= b_hi and abs(trace_of(u)) < 2.0 - trace_margin

    chains: list[list[np.ndarray]] = []
    t0 = _tangent(system, u_bt, None)
    for tdir in (t0, -t0):
        first = _newton(system, u_bt + step * tdir, tdir, u_bt + step * tdir)
        if first is None or not keep(first):
            continue
        branch = [first] + _continue_branch(system, first,
                                            _tangent(system, first, tdir),
                                            step, keep, max_steps)
        # Refine the far endpoint onto |trace| = 2 - margin if the march
        # stopped on the trace bound inside the B-range.
        tail = branch[-1]
        t_tail = _tangent(system, tail, tdir if len(branch) == 1 else
                          (tail - branch[-2]) / np.linalg.norm(tail - branch[-2]))
        probe = _newton(system, tail + step * t_tail, t_tail, tail + step * t_tail)
        if probe is not None and b_lo <= probe[2] <= b_hi \
                and abs(trace_of(probe)) >= 2.0 - trace_margin:
            target_y = math.copysign(2.0 - trace_margin, -trace_of(tail)) / -(2.0 + r)
            clamped = _clamp_coordinate(system, tail, probe, 0, target_y)
            if clamped is not None and keep(clamped):
                branch.append(clamped)
        chains.append(branch)

    if not chains:
        raise NoSeedError("no admissible Hopf branch leaves the BT point")
    if len(chains) == 1:
        chain = chains[0]
    else:
        chain = list(reversed(chains[1])) + chains[0]
    return _assemble(CurveKind.HOPF, r, step, system, chain)
