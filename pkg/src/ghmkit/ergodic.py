"""Diagnostics for historic behavior and contractive wandering domains.

Historic behavior is probed through running Birkhoff averages of a finite
observable dictionary: a genuinely oscillating empirical measure leaves a
large, late-developing spread in the partial averages.  Wandering-domain
probes iterate a small sample cloud and track pairwise disjointness of its
inflated bounding boxes, the diameter series, and whether the late states
collapse onto a single low-period orbit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EscapedError, TooShortError, UnknownObservableError

HIST_TOL = 0.05
CONV_TOL = 0.005
OMEGA_TOL = 1e-4
DEFAULT_TAIL = 0.5


@dataclass(frozen=True)
class BirkhoffSeries:
    """Running averages partials[k] = mean of the first k+1 observations."""

    partials: np.ndarray
    observable_id: str


class Verdict(enum.Enum):
    CONVERGENT_LIKE = "ConvergentLike"
    HISTORIC_LIKE = "HistoricLike"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class HistoricReport:
    oscillation: float
    window: float
    verdict: Verdict


@dataclass(frozen=True)
class WanderingReport:
    disjoint_up_to: int
    diameters: np.ndarray
    omega_sample: np.ndarray
    contractive: bool
    nontrivial_omega: bool
    inflation: float            # bounding boxes were inflated by this margin


def _box_indicator(spec: str) -> Callable[[np.ndarray], np.ndarray]:
    try:
        bounds = [float(tok) for tok in spec.split(",")]
    except ValueError as exc:
        raise UnknownObservableError(f"bad box bounds {spec!r}") from exc
    if len(bounds) % 2 != 0 or not bounds:
        raise UnknownObservableError(f"box bounds need pairs, got {spec!r}")
    lo = np.array(bounds[0::2])
    hi = np.array(bounds[1::2])

    def indicator(states: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(states)[:, : len(lo)]
        inside = np.all((pts >= lo) & (pts <= hi), axis=1)
        return inside.astype(float)

    return indicator


def resolve_observable(name: str) -> Callable[[np.ndarray], np.ndarray]:
    """Built-in observables: coordinate projections and box indicators."""
    if name == "x":
        return lambda states: np.atleast_2d(states)[:, 0]
    if name == "y":
        return lambda states: np.atleast_2d(states)[:, 1]
    if name.startswith("box:"):
        return _box_indicator(name[4:])
    raise UnknownObservableError(f"unknown observable {name!r}")


def birkhoff(orbit_states, observable: str) -> BirkhoffSeries:
    """Running Birkhoff averages of a built-in observable along an orbit.

    The averages are accumulated in the numerically stable incremental form
    a_{k+1} = a_k + (v_{k+1} - a_k) / (k + 2).
    """
    states = np.asarray(orbit_states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    if len(states) == 0:
        raise ValueError("orbit must be non-empty")
    fn = resolve_observable(observable)
    values = np.asarray(fn(states), dtype=float)
    partials = np.empty(len(values))
    acc = 0.0
    for k, v in enumerate(values):
        acc += (v - acc) / (k + 1.0)
        partials[k] = acc
    return BirkhoffSeries(partials=partials, observable_id=observable)


def oscillation(
    series: BirkhoffSeries,
    tail_fraction: float = DEFAULT_TAIL,
    hist_tol: float = HIST_TOL,
    conv_tol: float = CONV_TOL,
) -> HistoricReport:
    """Tail spread of the partial averages and an oscillation verdict.

    The oscillation is max - min over the trailing ``tail_fraction`` of the
    series.  HistoricLike requires the spread to exceed ``hist_tol`` with
    the extremes attained at well-separated tail positions (the oscillation
    is still developing late); ConvergentLike requires spread below
    ``conv_tol``; anything else is Inconclusive.
    """
    if not 0.0 < tail_fraction < 1.0:
        raise ValueError("tail_fraction must be in (0, 1)")
    n = len(series.partials)
    if n < 100:
        raise TooShortError(f"series has {n} < 100 entries")
    tail = series.partials[int(n * (1.0 - tail_fraction)):]
    osc = float(tail.max() - tail.min())
    if osc < conv_tol:
        verdict = Verdict.CONVERGENT_LIKE
    elif osc > hist_tol:
        i_max = int(np.argmax(tail))
        i_min = int(np.argmin(tail))
        interleaved = abs(i_max - i_min) >= 0.1 * len(tail)
        verdict = Verdict.HISTORIC_LIKE if interleaved else Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.INCONCLUSIVE
    return HistoricReport(oscillation=osc, window=tail_fraction, verdict=verdict)


def _sample_cloud(center: np.ndarray, radius: float, cloud: int) -> np.ndarray:
    """Center plus evenly spread boundary samples of the ball."""
    d = len(center)
    if d == 1:
        offs = np.linspace(-1.0, 1.0, max(cloud, 8))[:, None]
    elif d == 2:
        ang = np.linspace(0.0, 2.0 * math.pi, max(cloud, 8), endpoint=False)
        offs = np.column_stack([np.cos(ang), np.sin(ang)])
    elif d == 3:
        k = np.arange(max(cloud, 8))
        golden = math.pi * (3.0 - math.sqrt(5.0))
        z = 1.0 - 2.0 * (k + 0.5) / len(k)
        rho = np.sqrt(1.0 - z * z)
        offs = np.column_stack([rho * np.cos(golden * k),
                                rho * np.sin(golden * k), z])
    else:
        raise ValueError("wandering probe supports dimension 1, 2 or 3")
    return np.vstack([center[None, :], center[None, :] + radius * offs])


def _detect_trivial_omega(states: np.ndarray, omega_tol: float,
                          max_period: int = 64) -> bool:
    """True when the late states all sit on one periodic orbit."""
    n = len(states)
    if n < 2 * max_period:
        max_period = max(1, n // 2)
    for p in range(1, max_period + 1):
        d = np.linalg.norm(states[p:] - states[:-p], axis=1)
        if len(d) and float(d.max()) <= omega_tol:
            return True
    return False


def wandering_probe(
    map_fn: Callable[[np.ndarray], np.ndarray],
    center,
    radius: float,
    n: int,
    cloud: int = 16,
    escape_radius: float = 1e12,
    omega_tol: float = OMEGA_TOL,
) -> WanderingReport:
    """Iterate a sample cloud of a ball and report wandering diagnostics.

    ``map_fn`` maps an (m, d) array of states to the next states.  The
    report carries the largest iterate count with pairwise disjoint inflated
    bounding boxes, the exact cloud diameters per iterate, a late-state
    sample (an omega-limit proxy), contractive = final diameter below a
    tenth of the initial one, and whether the late states avoid collapsing
    onto a single orbit of period <= 64.

    Box disjointness can miss true disjointness for strongly curved images;
    the inflation margin used is recorded in the report.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    pts = _sample_cloud(center, radius, cloud)
    m = len(pts)

    boxes: list[tuple[np.ndarray, np.ndarray]] = []
    diameters: list[float] = []
    centers: list[np.ndarray] = []
    clouds: list[np.ndarray] = []
    cur = pts
    for _ in range(n + 1):
        if not np.all(np.isfinite(cur)) or np.max(np.abs(cur)) > escape_radius:
            raise EscapedError("sample cloud escaped")
        lo = cur.min(axis=0)
        hi = cur.max(axis=0)
        diff = cur[:, None, :] - cur[None, :, :]
        diam = float(np.sqrt((diff * diff).sum(-1)).max())
        # Inflate by the cloud resolution: the largest spacing an adjacent
        # boundary-sample pair can hide.
        inflation = diam * math.pi / max(m - 1, 1)
        boxes.append((lo - inflation, hi + inflation))
        diameters.append(diam)
        centers.append(cur.mean(axis=0))
        clouds.append(cur)
        cur = np.atleast_2d(np.asarray(map_fn(cur), dtype=float))
        if cur.shape != pts.shape:
            raise ValueError("map_fn must preserve the cloud shape")

    # Smallest j whose box meets any earlier box bounds the disjoint prefix.
    disjoint_up_to = n
    for j in range(1, len(boxes)):
        lo_j, hi_j = boxes[j]
        hit = False
        for i in range(j):
            lo_i, hi_i = boxes[i]
            if np.all(hi_i >= lo_j) and np.all(hi_j >= lo_i):
                hit = True
                break
        if hit:
            disjoint_up_to = j - 1
            break

    late = np.vstack(clouds[max(0, len(clouds) - 8):])
    tail = min(64, max(8, (n + 1) // 4))
    omega_centers = np.array(centers[-tail:])
    trivial = _detect_trivial_omega(omega_centers, omega_tol)
    diam_arr = np.array(diameters)
    return WanderingReport(
        disjoint_up_to=max(disjoint_up_to, 0),
        diameters=diam_arr,
        omega_sample=late,
        contractive=bool(diam_arr[-1] < 0.1 * diam_arr[0]),
        nontrivial_omega=not trivial,
        inflation=float(diam_arr[0] * math.pi / max(m - 1, 1)),
    )
