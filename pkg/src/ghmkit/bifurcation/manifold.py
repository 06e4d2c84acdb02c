"""One-dimensional invariant manifolds of saddle fixed points.

Arcs are grown from a fundamental domain on the saddle eigenvector: forward
map for the unstable side, the explicit inverse for the stable side.  Every
polyline sample carries its seed parameter, so segments can be refined by
re-iterating from the seed instead of interpolating off the manifold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..errors import EscapedError, InverseUndefinedError, NotASaddleError
from ..ghm import FixedPointInfo, GhmParams, Stability

ANGLE_TOL = 1e-4
MAX_TURN = 0.2          # radians between consecutive polyline segments
SEED_DELTA = 1e-7


class Side(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class ManifoldArc:
    side: Side
    polyline: np.ndarray     # (k, 2), ordered from the saddle outward
    base: FixedPointInfo


def _real_eig_split(fp: FixedPointInfo) -> tuple[float, float]:
    """Return (lam_s, lam_u) for a saddle with real eigenvalues."""
    eigs = fp.eigenvalues
    if np.max(np.abs(eigs.imag)) > 1e-12 * max(1.0, float(np.max(np.abs(eigs)))):
        raise NotASaddleError("fixed point has a complex eigenvalue pair")
    lams = np.real(eigs)
    moduli = np.abs(lams)
    if not (float(np.min(moduli)) < 1.0 < float(np.max(moduli))):
        raise NotASaddleError("eigenvalue moduli are not split across 1")
    return float(lams[np.argmin(moduli)]), float(lams[np.argmax(moduli)])


class ArcTrace:
    """Growth engine for one branch of a one-dimensional manifold.

    Points are parametrized by a linearized seed coordinate tau > 0:
    point(tau) = G^k(saddle + t*v) with t = tau / mult^k pulled into the
    fundamental domain [delta, mult*delta).  G is the forward map on the
    unstable side and the explicit inverse on the stable side (applied twice
    per level when the eigenvalue is negative, so the branch is preserved).
    """

    def __init__(
        self,
        p: GhmParams,
        fp: FixedPointInfo,
        side: Side,
        orientation: float = 1.0,
        delta: float = SEED_DELTA,
        escape_radius: float = 1e3,
    ) -> None:
        if fp.stability is not Stability.SADDLE:
            raise NotASaddleError(f"fixed point is {fp.stability.value}")
        lam_s, lam_u = _real_eig_split(fp)
        self.p = p
        self.fp = fp
        self.side = side
        self.sx = float(fp.state[0])
        self.sy = float(fp.state[1])
        self.escape_radius = float(escape_radius)
        lam = lam_u if side is Side.UNSTABLE else 1.0 / lam_s
        eigdir = lam_u if side is Side.UNSTABLE else lam_s
        # Eigenvectors of [[0,1],[j21,j22]] are (1, eigenvalue) up to scale.
        norm = math.hypot(1.0, eigdir)
        sgn = 1.0 if orientation >= 0.0 else -1.0
        self.vx = sgn / norm
        self.vy = sgn * eigdir / norm
        self.eigenvalue = lam
        self.mult = lam * lam if lam < 0.0 else lam
        self._double = lam < 0.0
        self._forward = side is Side.UNSTABLE
        self._pm = float(p.m)
        self._pb = float(p.b)
        self._pr = float(p.r)
        scale = max(1.0, math.hypot(self.sx, self.sy))
        self.delta = delta * scale

    # -- scalar map kernels -------------------------------------------------

    def _advance_checked(self, x: float, y: float) -> tuple[float, float]:
        m, b, r = self._pm, self._pb, self._pr
        rad = self.escape_radius
        reps = 2 if self._double else 1
        if self._forward:
            for _ in range(reps):
                x, y = y, m - b * x - y * y - r * x * y
        else:
            for _ in range(reps):
                den = b + r * x
                if abs(den) <= 1e-14 * (1.0 + abs(b) + abs(r * x)):
                    raise InverseUndefinedError(f"inverse degenerate at xbar={x}")
                x, y = (m - x * x - y) / den, x
        if not (-rad <= x <= rad and -rad <= y <= rad):
            raise EscapedError("manifold point escaped the working window")
        return x, y

    def point(self, tau: float) -> tuple[float, float]:
        """Manifold point at linearized seed coordinate tau."""
        if tau <= 0.0:
            return self.sx, self.sy
        k = 0
        t = tau
        lim = self.mult * self.delta * (1.0 - 1e-14)
        while t >= lim:
            t /= self.mult
            k += 1
        x = self.sx + t * self.vx
        y = self.sy + t * self.vy
        m, b, r = self._pm, self._pb, self._pr
        rad = self.escape_radius
        if self._double:
            k *= 2
        if self._forward:
            for _ in range(k):
                x, y = y, m - b * x - y * y - r * x * y
                if not (-rad <= x <= rad and -rad <= y <= rad):
                    raise EscapedError("manifold point escaped the working window")
        else:
            for _ in range(k):
                den = b + r * x
                if abs(den) <= 1e-14 * (1.0 + abs(b) + abs(r * x)):
                    raise InverseUndefinedError(f"inverse degenerate at xbar={x}")
                x, y = (m - x * x - y) / den, x
                if not (-rad <= x <= rad and -rad <= y <= rad):
                    raise EscapedError("manifold point escaped the working window")
        return x, y

    # -- growth --------------------------------------------------------------

    def grow(
        self,
        arclength: float,
        base_points: int = 12,
        max_points: int = 100_000,
        spacing: float | None = None,
        max_levels: int = 2000,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Grow the branch to the requested polyline arclength.

        Returns (taus, polyline array) for the longest contiguous piece from
        the saddle.  Consecutive samples are refined (by seed-parameter
        bisection) wherever a segment exceeds ``spacing`` or the polyline
        turns by more than MAX_TURN.
        """
        segments = self.grow_segments(arclength, base_points, max_points,
                                      spacing, max_levels)
        if not segments:
            return np.empty(0), np.empty((0, 2))
        taus, pts = segments[0]
        # Trim to the requested arclength.
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        n_keep = int(np.searchsorted(cum, arclength, side="right"))
        return taus[: n_keep + 1], pts[: n_keep + 1]

    def grow_segments(
        self,
        arclength: float,
        base_points: int = 12,
        max_points: int = 100_000,
        spacing: float | None = None,
        max_levels: int = 2000,
        fine_region=None,
        coarse_spacing: float | None = None,
    ) -> list[tuple[np.ndarray, np.ndarray]]:
        """Grow the branch, tolerating partial escape of the arc.

        Seed intervals whose images leave the working window are dropped;
        the survivors keep growing, so re-injected folds beyond an escaping
        stretch are still traced.  Returns contiguous (taus, points)
        segments ordered by seed parameter; total polyline length across
        segments is capped by ``arclength``.

        When ``fine_region`` (a predicate on (x, y)) is given, the spacing
        bound applies only to segments with an endpoint inside the region;
        elsewhere ``coarse_spacing`` governs.
        """
        if spacing is None:
            spacing = max(arclength / 400.0, 1e-9)
        level: list[tuple[float, tuple[float, float] | None]] = []
        for t in np.geomspace(self.delta, self.mult * self.delta,
                              base_points, endpoint=False):
            try:
                level.append((float(t), self.point(float(t))))
            except (EscapedError, InverseUndefinedError):
                level.append((float(t), None))
        entries = list(level)
        length = _poly_length([q for _, q in level if q is not None])
        for _ in range(max_levels):
            if length >= arclength or len(entries) >= max_points:
                break
            nxt: list[tuple[float, tuple[float, float] | None]] = []
            alive = 0
            prev: tuple[float, float] | None = None
            for t, src in level:
                if src is None:
                    q = None
                else:
                    try:
                        q = self._advance_checked(*src)
                    except (EscapedError, InverseUndefinedError):
                        q = None
                if q is None:
                    # Collapse runs of dead slots into one separator.
                    if nxt and nxt[-1][1] is None:
                        prev = None
                        continue
                else:
                    alive += 1
                    if prev is not None:
                        length += math.hypot(q[0] - prev[0], q[1] - prev[1])
                nxt.append((t * self.mult, q))
                prev = q
            if alive == 0:
                break
            entries.extend(nxt)
            level = nxt
        taus = [t for t, _ in entries]
        pts = [q for _, q in entries]
        return self._refine_segments(taus, pts, spacing, max_points,
                                     fine_region, coarse_spacing)

    def _refine_segments(
        self, taus: list[float], pts: list[tuple[float, float] | None],
        spacing: float, max_points: int, fine_region=None,
        coarse_spacing: float | None = None,
    ) -> list[tuple[np.ndarray, np.ndarray]]:
        # Split at escaped samples, then refine each contiguous run.
        runs: list[tuple[list[float], list[tuple[float, float]]]] = []
        cur_t: list[float] = []
        cur_p: list[tuple[float, float]] = []
        for t, q in zip(taus, pts):
            if q is None:
                if len(cur_t) >= 2:
                    runs.append((cur_t, cur_p))
                cur_t, cur_p = [], []
            else:
                cur_t.append(t)
                cur_p.append(q)
        if len(cur_t) >= 2:
            runs.append((cur_t, cur_p))
        out: list[tuple[np.ndarray, np.ndarray]] = []
        budget = max_points
        for run_t, run_p in runs:
            t_arr, p_arr = self._refine(run_t, run_p, spacing, budget,
                                        fine_region, coarse_spacing)
            budget = max(budget - len(t_arr), 1000)
            out.append((t_arr, p_arr))
        return out

    def _refine(self, taus: list[float], pts: list[tuple[float, float]],
                spacing: float, max_points: int, fine_region=None,
                coarse_spacing: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        if coarse_spacing is None:
            coarse_spacing = spacing if fine_region is None else 40.0 * spacing
        i = 0
        while i < len(taus) - 1 and len(taus) < max_points:
            ax, ay = pts[i]
            bx, by = pts[i + 1]
            gap = math.hypot(bx - ax, by - ay)
            if fine_region is None or fine_region(ax, ay) or fine_region(bx, by):
                limit = spacing
            else:
                limit = coarse_spacing
            bad = gap > limit
            if not bad and i > 0:
                ux, uy = ax - pts[i - 1][0], ay - pts[i - 1][1]
                vx, vy = bx - ax, by - ay
                nu = math.hypot(ux, uy)
                nv = math.hypot(vx, vy)
                if nu > 0.0 and nv > 0.0 and gap > 1e-10:
                    c = max(-1.0, min(1.0, (ux * vx + uy * vy) / (nu * nv)))
                    bad = math.acos(c) > MAX_TURN
            if bad and taus[i + 1] / taus[i] > 1.0 + 1e-12:
                tm = math.sqrt(taus[i] * taus[i + 1])
                try:
                    pm = self.point(tm)
                except (EscapedError, InverseUndefinedError):
                    i += 1
                    continue
                taus.insert(i + 1, tm)
                pts.insert(i + 1, pm)
            else:
                i += 1
        return np.array(taus), np.array(pts)


def _poly_length(pts: list[tuple[float, float]]) -> float:
    total = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        total += math.hypot(x1 - x0, y1 - y0)
    return total


def saddle_manifold(
    p: GhmParams,
    fp: FixedPointInfo,
    side: Side,
    arclength: float,
    orientation: float = 1.0,
    spacing: float | None = None,
) -> ManifoldArc:
    """Grow one branch of the stable or unstable manifold of a saddle.

    Parameters
    ----------
    p, fp :
        Map parameters and the saddle fixed point (from ``fixed_points``).
    side :
        ``Side.UNSTABLE`` iterates the map forward; ``Side.STABLE`` iterates
        the explicit inverse (solved from xbar = y).
    arclength :
        Target polyline length; growth stops earlier if the arc escapes.
    orientation :
        +1 or -1 selects which of the two branches along the eigenvector.
    """
    trace = ArcTrace(p, fp, side, orientation=orientation)
    _, pts = trace.grow(arclength, spacing=spacing)
    if len(pts):
        poly = np.vstack([fp.state[None, :], pts])
    else:
        poly = fp.state[None, :].astype(float)
    return ManifoldArc(side=side, polyline=poly, base=fp)
