"""Bifurcation structure of the map family: fold/Hopf continuation,
invariant-manifold growth, homoclinic-tangency location, and attractor
classification over parameter grids."""

from .attractor import (AttractorClass, AttractorLabel, Evidence, SweepResult,
                        classify_attractor, default_seed, sweep)
from .continuation import (BifurcationCurve, CurveKind, fold_curve, hopf_curve)
from .manifold import ArcTrace, ManifoldArc, Side, saddle_manifold
from .tangency import tangency_curve, tangency_gap

__all__ = [
    "AttractorClass", "AttractorLabel", "Evidence", "SweepResult",
    "classify_attractor", "default_seed", "sweep",
    "BifurcationCurve", "CurveKind", "fold_curve", "hopf_curve",
    "ArcTrace", "ManifoldArc", "Side", "saddle_manifold",
    "tangency_curve", "tangency_gap",
]
