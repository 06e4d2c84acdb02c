"""Homoclinic-tangency detection for the saddle fixed point of the family.

The splitting functional works in a cross-section anchored on one invariant
arc of the saddle: crossings of the section by the other arc give signed
offsets (positive toward the separated side), refined to machine accuracy by
seed-parameter bisection, so the extremal offset passes smoothly through
zero when the manifolds become tangent at the anchor.  Anchoring the section
on the stable arc and on the unstable arc gives two such functionals; their
zero sets are the two tangency curves bounding the homoclinic-tangle wedge
beyond the Hopf curve, nearly coincident close to the double-eigenvalue
point and separating away from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import (ArcEscapeError, EscapedError, InverseUndefinedError,
                      NoCrossingError, NoSaddleError, NotASaddleError)
from ..ghm import FixedPointInfo, GhmParams, Stability, bt_point, fixed_points
from .continuation import BifurcationCurve, CurveKind, fold_curve, hopf_curve
from .manifold import ArcTrace, Side

GAP_TOL = 1e-6
SECTION_FRACTION = 0.35    # section anchor distance / fixed-point spacing
WINDOW_FRACTION = 0.12     # section half-width / fixed-point spacing
ARC_BUDGET = 48.0          # arclength budget / fixed-point spacing
ESCAPE_FACTOR = 6.0        # working-window radius / fixed-point spacing


def _find_saddle(p: GhmParams) -> FixedPointInfo:
    try:
        infos = fixed_points(p)
    except Exception as exc:
        raise NoSaddleError(str(exc)) from exc
    for fp in infos:
        if fp.stability is Stability.SADDLE and \
                float(np.max(np.abs(fp.eigenvalues.imag))) < 1e-12:
            return fp
    raise NoSaddleError(f"no saddle fixed point at M={p.m}, B={p.b}, R={p.r}")


def _companion(p: GhmParams, saddle: FixedPointInfo) -> np.ndarray | None:
    """State of the other fixed point (the focus), if one exists."""
    infos = fixed_points(p)
    others = [fp.state for fp in infos
              if not np.allclose(fp.state, saddle.state)]
    return others[0] if others else None


def _orientation_toward(trace_side: Side, p: GhmParams, fp: FixedPointInfo,
                        target: np.ndarray | None) -> float:
    """Branch sign whose eigenvector points toward the target state."""
    probe = ArcTrace(p, fp, trace_side, orientation=1.0)
    if target is None:
        return 1.0
    d = (target[0] - probe.sx) * probe.vx + (target[1] - probe.sy) * probe.vy
    return 1.0 if d >= 0.0 else -1.0


@dataclass
class _Section:
    qx: float
    qy: float
    tx: float   # unit tangent of the anchor arc at q
    ty: float
    nx: float   # unit normal; offsets are measured along it
    ny: float

    def coords(self, x: float, y: float) -> tuple[float, float]:
        dx, dy = x - self.qx, y - self.qy
        return dx * self.tx + dy * self.ty, dx * self.nx + dy * self.ny


def _build_section(anchor: ArcTrace, distance: float,
                   positive_toward: np.ndarray | None) -> _Section:
    """Anchor a cross-section on ``anchor`` at the given distance from the
    saddle, normal oriented so that ``positive_toward`` has offset > 0."""
    taus, pts = anchor.grow(arclength=4.0 * distance, spacing=distance / 40.0)
    if len(pts) < 3:
        raise ArcEscapeError("anchor arc too short to place a section")
    d = np.hypot(pts[:, 0] - anchor.sx, pts[:, 1] - anchor.sy)
    idx = np.nonzero(d >= distance)[0]
    if len(idx) == 0:
        raise ArcEscapeError("anchor arc never reaches the section distance")
    hi = int(idx[0])
    t_lo = taus[max(hi - 1, 0)]
    t_hi = taus[hi]
    for _ in range(80):  # seed-parameter bisection onto the circle
        tm = math.sqrt(t_lo * t_hi)
        x, y = anchor.point(tm)
        if math.hypot(x - anchor.sx, y - anchor.sy) < distance:
            t_lo = tm
        else:
            t_hi = tm
        if t_hi - t_lo <= 1e-15 * t_hi:
            break
    t_q = math.sqrt(t_lo * t_hi)
    qx, qy = anchor.point(t_q)
    eps = 1e-5
    xa, ya = anchor.point(t_q * (1.0 - eps))
    xb, yb = anchor.point(t_q * (1.0 + eps))
    tx, ty = xb - xa, yb - ya
    norm = math.hypot(tx, ty)
    if norm == 0.0:
        raise ArcEscapeError("degenerate anchor tangent at the section")
    tx, ty = tx / norm, ty / norm
    nx, ny = -ty, tx
    if positive_toward is not None:
        if (positive_toward[0] - qx) * nx + (positive_toward[1] - qy) * ny < 0.0:
            nx, ny = -nx, -ny
    return _Section(qx=qx, qy=qy, tx=tx, ty=ty, nx=nx, ny=ny)


def _crossing_offsets(
    mover: ArcTrace, section: _Section, window: float,
    segments: list[tuple[np.ndarray, np.ndarray]],
) -> list[tuple[float, float]]:
    """(tau, signed offset) where the moving arc crosses the section line.

    Each polyline sign change of the tangential coordinate is refined by
    bisection in the seed parameter, so offsets are exact arc evaluations.
    Results are ordered along the arc.
    """
    offsets: list[tuple[float, float]] = []
    for taus, pts in segments:
        if len(pts) < 2:
            continue
        tang = (pts[:, 0] - section.qx) * section.tx \
            + (pts[:, 1] - section.qy) * section.ty
        norm = (pts[:, 0] - section.qx) * section.nx \
            + (pts[:, 1] - section.qy) * section.ny
        for i in np.nonzero(tang[:-1] * tang[1:] < 0.0)[0]:
            if min(abs(norm[i]), abs(norm[i + 1])) > 4.0 * window:
                continue
            t_lo, t_hi = taus[i], taus[i + 1]
            f_lo = tang[i]
            last = None
            for _ in range(80):
                tm = math.sqrt(t_lo * t_hi)
                try:
                    x, y = mover.point(tm)
                except (EscapedError, InverseUndefinedError):
                    last = None
                    break
                ft, fn = section.coords(x, y)
                last = (ft, fn)
                if (ft > 0.0) == (f_lo > 0.0):
                    t_lo = tm
                else:
                    t_hi = tm
                if t_hi - t_lo <= 1e-15 * t_hi:
                    break
            if last is None:
                continue
            ft, fn = last
            if abs(ft) <= 1e-8 and abs(fn) <= window:
                offsets.append((math.sqrt(t_lo * t_hi), fn))
    offsets.sort()
    return offsets


@dataclass(frozen=True)
class GapComponents:
    """First-approach section offsets from the two anchorings.

    ``stable_anchored`` is the signed offset of the stable arc's first
    crossing of the section carried by the unstable arc; ``unstable_anchored``
    is the mirror quantity.  Both are positive while the manifolds are
    separated and flip sign, each on its own tangency curve, as the tangle
    forms.
    """

    stable_anchored: float
    unstable_anchored: float

    @property
    def gap(self) -> float:
        sign = 1.0 if self.stable_anchored * self.unstable_anchored > 0.0 \
            else -1.0
        return sign * min(abs(self.stable_anchored),
                          abs(self.unstable_anchored))


@dataclass
class _GapSetup:
    stable: ArcTrace
    unstable: ArcTrace
    sec_on_s: _Section
    sec_on_u: _Section
    window: float
    budget: float
    spacing: float


def _gap_setup(
    p: GhmParams,
    section_fraction: float,
    window_fraction: float,
    arc_budget: float,
    spacing_fraction: float,
) -> _GapSetup:
    saddle = _find_saddle(p)
    focus = _companion(p, saddle)
    scale = _loop_scale(p, saddle)
    erad = ESCAPE_FACTOR * max(scale, 1.0) \
        + math.hypot(float(saddle.state[0]), float(saddle.state[1]))

    s_orient = _orientation_toward(Side.STABLE, p, saddle, focus)
    u_orient = _orientation_toward(Side.UNSTABLE, p, saddle, focus)
    stable = ArcTrace(p, saddle, Side.STABLE, orientation=s_orient,
                      escape_radius=erad)
    unstable = ArcTrace(p, saddle, Side.UNSTABLE, orientation=u_orient,
                        escape_radius=erad)

    window = window_fraction * scale
    d_sec = section_fraction * scale

    # Offsets of the unstable arc across the stable-anchored section are
    # positive on the focus side, where the unstable arc lives before the
    # tangle forms; the mirror anchoring is oriented the opposite way.
    sec_on_s = _build_section(stable, d_sec, focus)
    sec_on_u = _build_section(unstable, d_sec, focus)
    if focus is not None:
        sec_on_u = _Section(qx=sec_on_u.qx, qy=sec_on_u.qy,
                            tx=sec_on_u.tx, ty=sec_on_u.ty,
                            nx=-sec_on_u.nx, ny=-sec_on_u.ny)
    return _GapSetup(stable=stable, unstable=unstable, sec_on_s=sec_on_s,
                     sec_on_u=sec_on_u, window=window,
                     budget=arc_budget * scale,
                     spacing=spacing_fraction * scale)


def _near_section(sec: _Section, window: float):
    half_t = 8.0 * window
    half_n = 6.0 * window

    def inside(x: float, y: float) -> bool:
        ft, fn = sec.coords(x, y)
        return abs(ft) <= half_t and abs(fn) <= half_n

    return inside


def _one_component(setup: _GapSetup, attr: str) -> float:
    if attr == "stable_anchored":
        mover, sec = setup.stable, setup.sec_on_u
    else:
        mover, sec = setup.unstable, setup.sec_on_s
    segments = mover.grow_segments(setup.budget, spacing=setup.spacing,
                                   fine_region=_near_section(sec, setup.window))
    if not segments:
        raise ArcEscapeError("a manifold arc escaped before any growth")
    offs = _crossing_offsets(mover, sec, setup.window, segments)
    if not offs:
        raise ArcEscapeError("no section crossings inside the window")
    return offs[0][1]


def gap_components(
    p: GhmParams,
    section_fraction: float = SECTION_FRACTION,
    window_fraction: float = WINDOW_FRACTION,
    arc_budget: float = ARC_BUDGET,
    spacing_fraction: float = 1.0 / 300.0,
) -> GapComponents:
    """Evaluate both extremal-offset components at parameters ``p``.

    Raises NoSaddleError when the parameters carry no saddle fixed point and
    ArcEscapeError when an arc leaves the working window before producing
    any section crossing.
    """
    setup = _gap_setup(p, section_fraction, window_fraction, arc_budget,
                       spacing_fraction)
    return GapComponents(
        stable_anchored=_one_component(setup, "stable_anchored"),
        unstable_anchored=_one_component(setup, "unstable_anchored"),
    )


def tangency_gap(p: GhmParams, **knobs) -> float:
    """Signed splitting functional; zero crossing <=> homoclinic tangency.

    Positive while the stable and unstable arcs are separated (on either
    side of the tangle wedge), negative inside the wedge; the magnitude is
    the smaller of the two extremal section offsets.
    """
    return gap_components(p, **knobs).gap


def _loop_scale(p: GhmParams, fp: FixedPointInfo) -> float:
    """Distance between the two fixed points: the natural loop size."""
    infos = fixed_points(p)
    if len(infos) < 2:
        return max(0.05, 0.1 * max(1.0, abs(float(fp.state[0]))))
    d = float(np.linalg.norm(infos[0].state - infos[1].state))
    return max(d, 1e-4)


def _component(g: GapComponents | None, attr: str) -> float:
    if g is None:
        return math.nan
    return float(getattr(g, attr))


def _illinois(fun, a: float, fa: float, b: float, fb: float,
              tol: float, max_iter: int = 40) -> tuple[float | None, float]:
    """Illinois-damped regula falsi for a bracketed root; stops at |f| < tol.

    Evaluations failing inside the bracket (NaN) are nudged toward an
    endpoint a few times before the bracket is abandoned.
    """
    for _ in range(max_iter):
        if fb == fa:
            break
        c = b - fb * (b - a) / (fb - fa)
        if not (min(a, b) < c < max(a, b)):
            c = 0.5 * (a + b)
        fc = fun(c)
        for frac in (0.75, 0.5, 0.25):
            if not math.isnan(fc):
                break
            c = a + (b - a) * frac
            fc = fun(c)
        if math.isnan(fc):
            return None, math.nan
        if abs(fc) < tol:
            return c, fc
        if (fc > 0.0) == (fb > 0.0):
            b, fb = c, fc
            fa *= 0.5
        else:
            a, fa = b, fb
            b, fb = c, fc
    return (b, fb) if abs(fb) < abs(fa) else (a, fa)


def _hopf_frame(r: float, m: float) -> tuple[float, float, np.ndarray] | None:
    """Hopf-curve point at given M: returns (B, y, unit normal into det>1)."""
    # On the Hopf curve B = 1 - r*y, the fixed-point equation collapses to
    # y^2 + 2y - m = 0 independently of r; the focus root is y > -1.
    disc = 4.0 + 4.0 * m
    if disc <= 0.0:
        return None
    y = (-2.0 + math.sqrt(disc)) / 2.0
    if abs((2.0 + r) * y) >= 2.0:
        return None
    b = 1.0 - r * y
    # Tangent of the curve (M(y), B(y)): dM/dy = 2y + 2 - ... derive from
    # M = y^2 + 2y (independent of r after substitution), dB/dy = -r.
    tm_ = 2.0 * y + 2.0
    tb = -r
    norm = math.hypot(tm_, tb)
    tangent = np.array([tm_ / norm, tb / norm])
    normal = np.array([-tangent[1], tangent[0]])
    # Orient toward det > 1: det - 1 = B + r*y - 1 grows with B.
    if normal[1] < 0.0:
        normal = -normal
    return b, y, normal


def tangency_curve(
    r: float,
    seed_box: tuple[tuple[float, float], tuple[float, float]],
    step: float = 5e-4,
    n_rays: int = 8,
    gap_tol: float = GAP_TOL,
    offset_max: float = 2e-2,
    **gap_knobs,
) -> list[BifurcationCurve]:
    """Locate the two homoclinic-tangency curves inside ``seed_box``.

    For a fan of parameter rays crossing the Hopf curve transversally (based
    at points spread along it inside the box), both first-approach offset
    components are scanned for sign changes and bisected to
    |component| < ``gap_tol``.  Per ray, the zero nearer the Hopf curve
    joins the TangencyMinus family and the farther one TangencyPlus,
    matching the layout of the bifurcation diagram near the
    double-eigenvalue point.
    """
    (m_lo, m_hi), (b_lo, b_hi) = seed_box
    bt = bt_point(r)

    # Ray base points: spread along the Hopf curve inside the box, skipping
    # a small neighborhood of the BT corner where the manifolds degenerate.
    m_start = max(m_lo, bt.m)
    m_end = m_hi
    span = m_end - m_start
    bases = [m_start + span * (k + 1.0) / (n_rays + 1.0) for k in range(n_rays)]

    zeros_minus: list[tuple[float, float, float]] = []
    zeros_plus: list[tuple[float, float, float]] = []
    rho_hint: float | None = None

    for m_base in bases:
        frame = _hopf_frame(r, m_base)
        if frame is None:
            continue
        b_base, _, normal = frame
        if not (b_lo <= b_base <= b_hi):
            continue

        def params_at(rho: float) -> GhmParams | None:
            pm = GhmParams(m=m_base + rho * normal[0],
                           b=b_base + rho * normal[1], r=r)
            if not (m_lo <= pm.m <= m_hi and b_lo <= pm.b <= b_hi):
                return None
            return pm

        def component_at(rho: float, attr: str) -> float:
            pm = params_at(rho)
            if pm is None:
                return math.nan
            try:
                setup = _gap_setup(
                    pm,
                    gap_knobs.get("section_fraction", SECTION_FRACTION),
                    gap_knobs.get("window_fraction", WINDOW_FRACTION),
                    gap_knobs.get("arc_budget", ARC_BUDGET),
                    gap_knobs.get("spacing_fraction", 1.0 / 300.0),
                )
                return _one_component(setup, attr)
            except (NoSaddleError, NotASaddleError, ArcEscapeError,
                    EscapedError, InverseUndefinedError):
                return math.nan

        if rho_hint is None:
            rhos = list(np.geomspace(step, offset_max, 12))
        else:
            rhos = list(np.geomspace(max(step / 4.0, rho_hint / 4.0),
                                     min(offset_max, rho_hint * 4.0), 7))

        ray_zeros: list[tuple[float, float]] = []
        for attr in ("stable_anchored", "unstable_anchored"):
            samples = [(rho, component_at(rho, attr)) for rho in rhos]
            samples = [(rho, v) for rho, v in samples if not math.isnan(v)]
            if len(samples) < 2 and rho_hint is not None:
                wide = np.geomspace(step, offset_max, 12)
                samples = [(rho, component_at(rho, attr)) for rho in wide]
                samples = [(rho, v) for rho, v in samples
                           if not math.isnan(v)]
            for (r0, v0), (r1, v1) in zip(samples, samples[1:]):
                if v0 * v1 >= 0.0:
                    continue
                rho, val = _illinois(lambda rho: component_at(rho, attr),
                                     r0, v0, r1, v1, gap_tol)
                if rho is not None and abs(val) < gap_tol:
                    ray_zeros.append((rho, abs(val)))
                break
        # Per ray, the zero nearer the Hopf curve joins the minus family.
        ray_zeros.sort()
        if len(ray_zeros) >= 1:
            rho, res = ray_zeros[0]
            zeros_minus.append((m_base + rho * normal[0],
                                b_base + rho * normal[1], res))
        if len(ray_zeros) >= 2:
            rho, res = ray_zeros[-1]
            zeros_plus.append((m_base + rho * normal[0],
                               b_base + rho * normal[1], res))
        if ray_zeros:
            rho_hint = float(np.mean([z[0] for z in ray_zeros]))

    if not zeros_minus and not zeros_plus:
        raise NoCrossingError("no tangency zero-crossing found in the box")

    def assemble(zeros: list[tuple[float, float, float]],
                 kind: CurveKind) -> BifurcationCurve:
        pts = np.array([[m, b] for m, b, _ in zeros]) if zeros \
            else np.empty((0, 2))
        res = np.array([g for _, _, g in zeros])
        return BifurcationCurve(kind=kind, points=pts, r=r, step=step,
                                residuals=res)

    return [assemble(zeros_minus, CurveKind.TANGENCY_MINUS),
            assemble(zeros_plus, CurveKind.TANGENCY_PLUS)]
