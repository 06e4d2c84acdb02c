"""Attractor classification over parameter grids.

A single vectorized engine iterates one map per lattice cell in lockstep:
escape detection, a settling transient, Lyapunov pair by QR accumulation,
rotation number about the orbit centroid, and low-period recurrence with
cycle-multiplier stability.  ``classify_attractor`` is the one-cell case, so
sweep results are independent of how the grid is partitioned.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..emit import write_csv
from ..ghm import ESCAPE_RADIUS, GhmParams

STRANGE_TOL = 0.01
RECURRENCE_TOL = 1e-6
MAX_PERIOD = 512
CIRCLE_CONTRACT_TOL = 1e-4   # second exponent must be below -this
CIRCLE_SPLIT_TOL = 5e-4      # exponent gap separating a circle from a focus


class AttractorLabel(enum.Enum):
    SINK = "Sink"
    INVARIANT_CIRCLE = "InvariantCircle"
    STRANGE = "Strange"
    ESCAPE = "Escape"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Evidence:
    lyapunov: tuple[float, float]
    rotation: float
    period: int | None


@dataclass(frozen=True)
class AttractorClass:
    label: AttractorLabel
    evidence: Evidence


@dataclass(frozen=True)
class SweepResult:
    """Row-major grids over (M, B); labels plus the per-cell evidence."""

    m_values: np.ndarray
    b_values: np.ndarray
    r: float
    labels: np.ndarray       # (nm, nb) of AttractorLabel
    lyap1: np.ndarray
    lyap2: np.ndarray
    rotation: np.ndarray
    period: np.ndarray       # 0 where no period was detected

    def to_csv(self, path: str) -> None:
        rows = []
        for i, m in enumerate(self.m_values):
            for j, b in enumerate(self.b_values):
                rows.append((float(m), float(b), self.labels[i, j].value,
                             float(self.lyap1[i, j]), float(self.lyap2[i, j]),
                             float(self.rotation[i, j])))
        write_csv(path, ("M", "B", "label", "lyap1", "lyap2", "rot"), rows)


def _engine(
    m: np.ndarray,
    b: np.ndarray,
    r: float,
    x0: np.ndarray,
    y0: np.ndarray,
    transient: int,
    n_measure: int,
    escape_radius: float,
    rec_tol: float,
    max_period: int,
) -> dict[str, np.ndarray]:
    """Vectorized per-cell orbit metrics; every array has the input shape."""
    shape = m.shape
    x = x0.astype(float).copy()
    y = y0.astype(float).copy()
    alive = np.ones(shape, dtype=bool)

    def advance(n: int) -> None:
        nonlocal x, y
        for _ in range(n):
            if not alive.any():
                return
            xn = np.where(alive, y, x)
            yn = np.where(alive, m - b * x - y * y - r * x * y, y)
            bad = alive & (~np.isfinite(xn) | ~np.isfinite(yn)
                           | (np.abs(xn) > escape_radius)
                           | (np.abs(yn) > escape_radius))
            xn = np.where(bad, x, xn)
            yn = np.where(bad, y, yn)
            alive[bad] = False
            x, y = xn, yn

    advance(transient)

    # Centroid over a settling window (for the rotation estimate).
    n_cent = max(64, n_measure // 4)
    cx = np.zeros(shape)
    cy = np.zeros(shape)
    for _ in range(n_cent):
        cx += np.where(alive, x, 0.0)
        cy += np.where(alive, y, 0.0)
        advance(1)
    cx /= n_cent
    cy /= n_cent

    # Measurement phase: QR-accumulated Lyapunov pair and angular increments
    # about the centroid.
    q11 = np.ones(shape)
    q21 = np.zeros(shape)
    q12 = np.zeros(shape)
    q22 = np.ones(shape)
    s1 = np.zeros(shape)
    s2 = np.zeros(shape)
    dtheta = np.zeros(shape)
    theta_prev = np.arctan2(y - cy, x - cx)
    tiny = np.finfo(float).tiny
    for k in range(1, n_measure + 1):
        j21 = -b - r * y
        j22 = -2.0 * y - r * x
        v11 = q21
        v21 = j21 * q11 + j22 * q21
        v12 = q22
        v22 = j21 * q12 + j22 * q22
        r11 = np.hypot(v11, v21) + tiny
        e11 = v11 / r11
        e21 = v21 / r11
        r12 = e11 * v12 + e21 * v22
        w1 = v12 - r12 * e11
        w2 = v22 - r12 * e21
        r22 = np.hypot(w1, w2) + tiny
        upd = alive & (r11 > tiny) & (r22 > tiny)
        q11 = np.where(upd, e11, q11)
        q21 = np.where(upd, e21, q21)
        q12 = np.where(upd, w1 / r22, q12)
        q22 = np.where(upd, w2 / r22, q22)
        s1 += np.where(upd, np.log(r11), 0.0)
        s2 += np.where(upd, np.log(r22), 0.0)
        advance(1)
        theta = np.arctan2(y - cy, x - cx)
        inc = theta - theta_prev
        inc = np.where(inc > math.pi, inc - 2.0 * math.pi, inc)
        inc = np.where(inc < -math.pi, inc + 2.0 * math.pi, inc)
        dtheta += np.where(alive, inc, 0.0)
        theta_prev = theta

    # Low-period recurrence from the final (most settled) state: the period
    # is the smallest lag whose recurrence distance is below tolerance.
    xr = x.copy()
    yr = y.copy()
    first_p = np.zeros(shape, dtype=np.int64)
    for k in range(1, max_period + 1):
        advance(1)
        d = np.hypot(x - xr, y - yr)
        hit = alive & (d < rec_tol) & (first_p == 0)
        first_p = np.where(hit, k, first_p)

    denom = max(n_measure, 1)
    lyap1 = s1 / denom
    lyap2 = s2 / denom
    swap = lyap2 > lyap1
    lyap1, lyap2 = np.where(swap, lyap2, lyap1), np.where(swap, lyap1, lyap2)
    rotation = dtheta / (2.0 * math.pi * denom)

    period_found = alive & (first_p > 0)
    period = first_p

    # Cycle stability: spectral radius of the Jacobian product over one
    # detected period, evaluated from the reference state.
    a11 = np.ones(shape)
    a12 = np.zeros(shape)
    a21 = np.zeros(shape)
    a22 = np.ones(shape)
    px = xr.copy()
    py = yr.copy()
    if period_found.any():
        pmax = int(first_p[period_found].max())
        for k in range(1, pmax + 1):
            act = period_found & (first_p >= k)
            j21 = -b - r * py
            j22 = -2.0 * py - r * px
            n11 = a21
            n12 = a22
            n21 = j21 * a11 + j22 * a21
            n22 = j21 * a12 + j22 * a22
            a11 = np.where(act, n11, a11)
            a12 = np.where(act, n12, a12)
            a21 = np.where(act, n21, a21)
            a22 = np.where(act, n22, a22)
            pxn = np.where(act, py, px)
            pyn = np.where(act, m - b * px - py * py - r * px * py, py)
            px, py = pxn, pyn
    tr = a11 + a22
    det = a11 * a22 - a12 * a21
    disc = tr * tr - 4.0 * det
    sq = np.sqrt(np.abs(disc))
    rad_real = np.maximum(np.abs(tr + sq), np.abs(tr - sq)) / 2.0
    rad_cplx = np.sqrt(np.abs(det))
    spectral = np.where(disc >= 0.0, rad_real, rad_cplx)
    attracting_cycle = period_found & (spectral < 1.0)

    return {
        "escaped": ~alive,
        "lyap1": lyap1,
        "lyap2": lyap2,
        "rotation": rotation,
        "period": period,
        "attracting_cycle": attracting_cycle,
    }


def _label_cells(metrics: dict[str, np.ndarray],
                 strange_tol: float) -> np.ndarray:
    shape = metrics["lyap1"].shape
    labels = np.full(shape, AttractorLabel.UNDETERMINED, dtype=object)
    lyap1 = metrics["lyap1"]
    lyap2 = metrics["lyap2"]
    # A circle carries a near-zero top exponent with a distinctly negative
    # second one; an unconverged focus has two nearly equal exponents and
    # stays Undetermined.
    circle = (np.abs(lyap1) <= strange_tol) \
        & (lyap2 < -CIRCLE_CONTRACT_TOL) \
        & (lyap1 - lyap2 >= CIRCLE_SPLIT_TOL) \
        & (metrics["period"] == 0)
    labels[circle] = AttractorLabel.INVARIANT_CIRCLE
    labels[lyap1 > strange_tol] = AttractorLabel.STRANGE
    labels[metrics["attracting_cycle"]] = AttractorLabel.SINK
    labels[metrics["escaped"]] = AttractorLabel.ESCAPE
    return labels


def classify_attractor(
    p: GhmParams,
    s0,
    transient: int = 20000,
    n_measure: int = 4000,
    escape_radius: float = ESCAPE_RADIUS,
    strange_tol: float = STRANGE_TOL,
    rec_tol: float = RECURRENCE_TOL,
    max_period: int = MAX_PERIOD,
) -> AttractorClass:
    """Classify the attractor reached from ``s0``.

    Outcomes are labels, never errors: escape is ``Escape``; a recurrent
    orbit of period <= ``max_period`` whose cycle multipliers contract is
    ``Sink``; a near-zero top exponent with contracting second exponent and
    no detected period is ``InvariantCircle``; a top exponent above
    ``strange_tol`` is ``Strange``; anything else is ``Undetermined``.
    """
    one = np.ones((1,))
    metrics = _engine(
        m=one * p.m, b=one * p.b, r=p.r,
        x0=one * float(s0[0]), y0=one * float(s0[1]),
        transient=transient, n_measure=n_measure,
        escape_radius=escape_radius, rec_tol=rec_tol, max_period=max_period,
    )
    labels = _label_cells(metrics, strange_tol)
    period = int(metrics["period"][0])
    return AttractorClass(
        label=labels[0],
        evidence=Evidence(
            lyapunov=(float(metrics["lyap1"][0]), float(metrics["lyap2"][0])),
            rotation=float(metrics["rotation"][0]),
            period=period if period > 0 else None,
        ),
    )


def default_seed(p: GhmParams) -> np.ndarray:
    """Deterministic seed policy: just off the non-saddle fixed point.

    Prefers an attracting fixed point, then the point whose eigenvalues are
    least expanding; falls back to the origin when no fixed point exists.
    """
    from ..ghm import fixed_points
    try:
        infos = fixed_points(p)
    except Exception:
        infos = []
    if not infos:
        return np.array([0.0, 0.0])
    best = min(infos, key=lambda fp: float(np.max(np.abs(fp.eigenvalues))))
    return best.state + np.array([1e-3, 0.0])


def _seed_grid(mm: np.ndarray, bb: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``default_seed`` over a parameter grid."""
    a = 1.0 + r
    disc = (1.0 + bb) ** 2 + 4.0 * a * mm
    has_fp = disc >= 0.0
    sq = np.sqrt(np.where(has_fp, disc, 0.0))
    roots = [(-(1.0 + bb) + sq) / (2.0 * a), (-(1.0 + bb) - sq) / (2.0 * a)]
    radii = []
    for yy in roots:
        tr = -(2.0 + r) * yy
        dt = bb + r * yy
        d2 = tr * tr - 4.0 * dt
        s2 = np.sqrt(np.abs(d2))
        rad_real = np.maximum(np.abs(tr + s2), np.abs(tr - s2)) / 2.0
        rad_cplx = np.sqrt(np.abs(dt))
        radii.append(np.where(d2 >= 0.0, rad_real, rad_cplx))
    pick_second = radii[1] < radii[0]
    y_seed = np.where(pick_second, roots[1], roots[0])
    x0 = np.where(has_fp, y_seed + 1e-3, 0.0)
    y0 = np.where(has_fp, y_seed, 0.0)
    return x0, y0


def sweep(
    r: float,
    m_range: tuple[float, float],
    b_range: tuple[float, float],
    nm: int,
    nb: int,
    transient: int = 20000,
    n_measure: int = 4000,
    threads: int = 1,
    escape_radius: float = ESCAPE_RADIUS,
    strange_tol: float = STRANGE_TOL,
) -> SweepResult:
    """Classify the attractor on an nm x nb lattice of (M, B) values.

    Cells are independent; the grid may be partitioned across workers and the
    result is identical regardless of partitioning.
    """
    m_values = np.linspace(m_range[0], m_range[1], nm)
    b_values = np.linspace(b_range[0], b_range[1], nb)
    mm, bb = np.meshgrid(m_values, b_values, indexing="ij")
    x0, y0 = _seed_grid(mm, bb, r)

    def run_block(sl: slice) -> dict[str, np.ndarray]:
        return _engine(
            m=mm[sl].ravel(), b=bb[sl].ravel(), r=r,
            x0=x0[sl].ravel(), y0=y0[sl].ravel(),
            transient=transient, n_measure=n_measure,
            escape_radius=escape_radius,
            rec_tol=RECURRENCE_TOL, max_period=MAX_PERIOD,
        )

    keys = ("escaped", "lyap1", "lyap2", "rotation", "period", "attracting_cycle")
    if threads <= 1:
        blocks = [(slice(0, nm), run_block(slice(0, nm)))]
    else:
        from concurrent.futures import ThreadPoolExecutor

        bounds = np.linspace(0, nm, threads + 1).astype(int)
        slices = [slice(int(a), int(b)) for a, b in zip(bounds, bounds[1:])
                  if b > a]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_block, slices))
        blocks = list(zip(slices, results))

    metrics = {k: np.empty((nm, nb)) for k in keys}
    metrics["period"] = np.empty((nm, nb), dtype=np.int64)
    metrics["escaped"] = np.empty((nm, nb), dtype=bool)
    metrics["attracting_cycle"] = np.empty((nm, nb), dtype=bool)
    for sl, block in blocks:
        rows = sl.stop - sl.start
        for k in keys:
            metrics[k][sl] = block[k].reshape(rows, nb)

    labels = _label_cells(metrics, strange_tol)
    return SweepResult(
        m_values=m_values, b_values=b_values, r=r, labels=labels,
        lyap1=metrics["lyap1"], lyap2=metrics["lyap2"],
        rotation=metrics["rotation"], period=metrics["period"],
    )
