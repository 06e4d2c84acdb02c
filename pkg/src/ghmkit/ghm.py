"""The generalized Henon map family  xbar = y,  ybar = M - B*x - y^2 - R*x*y.

Iteration, Jacobians, fixed points, the Bogdanov-Takens parameter point of
the family, and QR-accumulated Lyapunov exponents.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFamilyError, EscapedError, OutOfRegimeError

ESCAPE_RADIUS = 1e6
FP_TOL = 1e-12
STABILITY_TOL = 1e-9


@dataclass(frozen=True)
class GhmParams:
    """Rescaled parameters (M, B, R) of the generalized Henon map."""

    m: float
    b: float
    r: float = 0.0

    def __post_init__(self) -> None:
        for name in ("m", "b", "r"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"parameter {name} must be finite")


class Stability(enum.Enum):
    SINK = "Sink"
    SADDLE = "Saddle"
    SOURCE = "Source"
    NON_HYPERBOLIC = "NonHyperbolic"


@dataclass(frozen=True)
class FixedPointInfo:
    state: np.ndarray
    eigenvalues: np.ndarray
    stability: Stability


@dataclass(frozen=True)
class Orbit:
    """Recorded orbit segment; ``escaped`` marks truncation by escape."""

    states: np.ndarray
    escaped: bool = False
    escape_step: int | None = None

    def __len__(self) -> int:
        return len(self.states)


def step(state, p: GhmParams) -> np.ndarray:
    """One application of the map.  Raises EscapedError on non-finite output."""
    x, y = float(state[0]), float(state[1])
    out = np.array([y, p.m - p.b * x - y * y - p.r * x * y])
    if not np.all(np.isfinite(out)):
        raise EscapedError(f"map produced a non-finite state from ({x}, {y})")
    return out


def inverse_step(state, p: GhmParams, tol: float = 1e-14) -> np.ndarray:
    """Explicit inverse, solved from xbar = y:  y = xbar,
    x = (M - xbar^2 - ybar) / (B + R*xbar)."""
    from .errors import InverseUndefinedError

    xb, yb = float(state[0]), float(state[1])
    den = p.b + p.r * xb
    if abs(den) <= tol * max(1.0, abs(p.b), abs(p.r * xb)):
        raise InverseUndefinedError(f"inverse degenerate at xbar={xb} (B + R*xbar = {den})")
    return np.array([(p.m - xb * xb - yb) / den, xb])


def orbit(
    s0,
    p: GhmParams,
    n: int,
    transient: int = 0,
    escape_radius: float = ESCAPE_RADIUS,
) -> Orbit:
    """Iterate ``transient`` steps, then record ``n`` states.

    The orbit is truncated (``escaped=True`` and ``escape_step`` set to the
    global step index) as soon as a coordinate exceeds ``escape_radius``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    x, y = float(s0[0]), float(s0[1])
    for k in range(transient):
        x, y = y, p.m - p.b * x - y * y - p.r * x * y
        if not (abs(x) <= escape_radius and abs(y) <= escape_radius):
            return Orbit(np.empty((0, 2)), escaped=True, escape_step=k + 1)
    states = np.empty((n, 2))
    for k in range(n):
        states[k, 0] = x
        states[k, 1] = y
        x, y = y, p.m - p.b * x - y * y - p.r * x * y
        if not (abs(x) <= escape_radius and abs(y) <= escape_radius):
            return Orbit(states[: k + 1].copy(), escaped=True,
                         escape_step=transient + k + 1)
    return Orbit(states)


def jacobian(state, p: GhmParams) -> np.ndarray:
    """Derivative [[0, 1], [-B - R*y, -2*y - R*x]]; det = B + R*y."""
    x, y = float(state[0]), float(state[1])
    return np.array([[0.0, 1.0], [-p.b - p.r * y, -2.0 * y - p.r * x]])


def _eig2(trace: float, det: float) -> np.ndarray:
    disc = trace * trace - 4.0 * det
    if disc >= 0.0:
        s = math.sqrt(disc)
        return np.array([(trace + s) / 2.0, (trace - s) / 2.0], dtype=complex)
    s = math.sqrt(-disc)
    return np.array([complex(trace / 2.0, s / 2.0), complex(trace / 2.0, -s / 2.0)])


def _classify_eigs(eigs: np.ndarray, tol: float = STABILITY_TOL) -> Stability:
    mods = np.abs(eigs)
    if np.any(np.abs(mods - 1.0) <= tol):
        return Stability.NON_HYPERBOLIC
    inside = int(np.sum(mods < 1.0))
    if inside == 2:
        return Stability.SINK
    if inside == 0:
        return Stability.SOURCE
    return Stability.SADDLE


def _fixed_point_info(y: float, p: GhmParams) -> FixedPointInfo:
    st = np.array([y, y])
    trace = -(2.0 + p.r) * y
    det = p.b + p.r * y
    eigs = _eig2(trace, det)
    return FixedPointInfo(state=st, eigenvalues=eigs, stability=_classify_eigs(eigs))


def fixed_points(p: GhmParams) -> list[FixedPointInfo]:
    """Fixed points (x = y) solving (1+R) y^2 + (1+B) y - M = 0.

    Real roots come back with eigenvalues and a stability tag; a double root
    is reported once (NonHyperbolic allowed).  The degenerate linear case
    1+R = 0 is handled; 1+R = 1+B = M = 0 is a continuum and raises.
    """
    a = 1.0 + p.r
    bb = 1.0 + p.b
    c = -p.m

    def _polish(y: float) -> float:
        # One guarded Newton step on the quadratic.
        f = (a * y + bb) * y + c
        fp = 2.0 * a * y + bb
        if abs(fp) > 1e3 * abs(f) and fp != 0.0:
            y = y - f / fp
        return y

    if a == 0.0:
        if bb == 0.0:
            if c == 0.0:
                raise DegenerateFamilyError("every point on the diagonal is fixed")
            return []
        return [_fixed_point_info(_polish(-c / bb), p)]

    disc = bb * bb - 4.0 * a * c
    scale = max(bb * bb, abs(4.0 * a * c), 1e-300)
    # 64 ulp margin: a BT-point discriminant is exactly zero in real
    # arithmetic but accumulates a few ulp of rounding when evaluated here.
    if abs(disc) <= 64.0 * np.finfo(float).eps * scale:
        # Double root at the vertex of the quadratic.
        return [_fixed_point_info(_polish(-bb / (2.0 * a)), p)]
    if disc < 0.0:
        return []
    # Numerically stable quadratic roots (avoid cancellation).
    sq = math.sqrt(disc)
    q = -(bb + math.copysign(sq, bb)) / 2.0
    if q == 0.0:
        roots = [0.0, 0.0]
    else:
        roots = [q / a, c / q]
    roots = sorted(_polish(y) for y in roots)
    return [_fixed_point_info(y, p) for y in roots]


def bt_point(r: float) -> GhmParams:
    """Parameter point where a fixed point carries a double eigenvalue +1:
    M = (-1 - R) / (1 + R/2)^2,  B = 1 + R / (1 + R/2)."""
    if not abs(r) < 1.0:
        raise OutOfRegimeError(f"|R| must be < 1, got {r}")
    half = 1.0 + r / 2.0
    return GhmParams(m=(-1.0 - r) / (half * half), b=1.0 + r / half, r=r)


def bt_fixed_point(r: float) -> FixedPointInfo:
    """The fixed point undergoing the double-eigenvalue-+1 bifurcation.

    When R != 0 the root closest to the R = 0 location (-1, -1) is selected.
    """
    infos = fixed_points(bt_point(r))
    if not infos:
        raise DegenerateFamilyError("no fixed point found at the BT parameters")
    ref = np.array([-1.0, -1.0])
    return min(infos, key=lambda fp: float(np.linalg.norm(fp.state - ref)))


def lyapunov_spectrum(
    p: GhmParams,
    s0,
    n: int,
    transient: int | None = None,
    align: int | None = None,
    escape_radius: float = ESCAPE_RADIUS,
) -> np.ndarray:
    """Both Lyapunov exponents by QR accumulation, sorted descending.

    Re-orthogonalizes every step.  ``transient`` orbit steps are discarded
    first (default min(1000, n // 10)); the tangent frame then runs for
    ``align`` further steps without accumulating (default
    min(1000, max(100, n // 10))), so the initial frame orientation does
    not bias the averages.  Raises EscapedError if the orbit leaves
    ``escape_radius``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if transient is None:
        transient = min(1000, n // 10)
    if align is None:
        align = min(1000, max(100, n // 10))
    x, y = float(s0[0]), float(s0[1])
    m, b, r = p.m, p.b, p.r
    for _ in range(transient):
        x, y = y, m - b * x - y * y - r * x * y
        if not (abs(x) <= escape_radius and abs(y) <= escape_radius):
            raise EscapedError("orbit escaped during the transient")
    q11, q21, q12, q22 = 1.0, 0.0, 0.0, 1.0
    s1 = 0.0
    s2 = 0.0
    for k in range(-align, n):
        j21 = -b - r * y
        j22 = -2.0 * y - r * x
        v11 = q21
        v21 = j21 * q11 + j22 * q21
        v12 = q22
        v22 = j21 * q12 + j22 * q22
        r11 = math.hypot(v11, v21)
        if r11 == 0.0:
            raise EscapedError("tangent vector collapsed")
        e11 = v11 / r11
        e21 = v21 / r11
        r12 = e11 * v12 + e21 * v22
        w1 = v12 - r12 * e11
        w2 = v22 - r12 * e21
        r22 = math.hypot(w1, w2)
        if r22 == 0.0:
            raise EscapedError("tangent frame collapsed")
        q11, q21 = e11, e21
        q12, q22 = w1 / r22, w2 / r22
        if k >= 0:
            s1 += math.log(r11)
            s2 += math.log(r22)
        x, y = y, m - b * x - y * y - r * x * y
        if not (abs(x) <= escape_radius and abs(y) <= escape_radius):
            raise EscapedError("orbit escaped during accumulation")
    out = np.array([s1 / n, s2 / n])
    return np.sort(out)[::-1]
