import math

import numpy as np
import pytest

from ghmkit.bifurcation import (AttractorLabel, classify_attractor,
                                default_seed, sweep)
from ghmkit.ghm import GhmParams


def test_sink_at_spiral_fixed_point():
    p = GhmParams(0.0, 0.3, 0.0)
    res = classify_attractor(p, [0.0, 0.0], transient=2000, n_measure=1000)
    assert res.label is AttractorLabel.SINK
    assert res.evidence.period == 1
    # eigenvalues +-i sqrt(0.3): both exponents log(0.548) < 0
    assert res.evidence.lyapunov[0] < 0


def test_strange_on_henon_conjugate_parameters():
    p = GhmParams(1.4, -0.3, 0.0)
    res = classify_attractor(p, [0.0, 0.0], transient=2000, n_measure=20000)
    assert res.label is AttractorLabel.STRANGE
    assert res.evidence.lyapunov[0] > 0.3


def test_invariant_circle_just_past_hopf():
    # Hopf point at R = 0.02, y = 0.2: B = 0.996, M = 0.44; the circle band
    # sits just above it.
    p = GhmParams(0.44, 0.996 + 2e-4, 0.02)
    res = classify_attractor(p, default_seed(p), transient=60000,
                             n_measure=20000)
    assert res.label is AttractorLabel.INVARIANT_CIRCLE
    assert res.evidence.period is None
    assert abs(res.evidence.lyapunov[0]) < 0.01
    assert res.evidence.rotation != 0.0


def test_escape_label():
    p = GhmParams(-3.0, 1.0, 0.0)     # no fixed points; orbits escape
    res = classify_attractor(p, [0.0, 0.0], transient=500, n_measure=100)
    assert res.label is AttractorLabel.ESCAPE


def test_default_seed_policy():
    p = GhmParams(0.0, 0.3, 0.0)
    seed = default_seed(p)
    assert np.allclose(seed, [1e-3, 0.0], atol=1e-12)
    # no fixed points: falls back to the origin
    assert np.allclose(default_seed(GhmParams(-3.0, 1.0, 0.0)), [0.0, 0.0])


def test_sweep_partition_invariance():
    kwargs = dict(m_range=(-0.5, 0.3), b_range=(0.9, 1.0), nm=8, nb=6,
                  transient=3000, n_measure=1500)
    a = sweep(0.02, threads=1, **kwargs)
    b = sweep(0.02, threads=3, **kwargs)
    assert np.array_equal(a.lyap1, b.lyap1)
    assert np.array_equal(a.lyap2, b.lyap2)
    assert np.array_equal(a.rotation, b.rotation)
    assert np.array_equal(a.period, b.period)
    assert all(x is y for x, y in zip(a.labels.ravel(), b.labels.ravel()))


def test_sweep_escape_in_no_fixed_point_region():
    res = sweep(0.0, m_range=(-3.0, -2.0), b_range=(0.8, 1.2), nm=5, nb=5,
                transient=500, n_measure=200)
    for label in res.labels.ravel():
        assert label in (AttractorLabel.ESCAPE, AttractorLabel.UNDETERMINED)


def test_sweep_csv(tmp_path):
    res = sweep(0.0, m_range=(0.0, 0.1), b_range=(0.2, 0.3), nm=2, nb=2,
                transient=500, n_measure=300)
    path = tmp_path / "sweep.csv"
    res.to_csv(str(path))
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "M,B,label,lyap1,lyap2,rot"
    assert len(lines) == 5
