"""Acceptance gate: every criterion at its stated tolerance, one pass/fail
line per criterion.  Criterion 8 reruns the artifact writers of criteria 1-7
and checks byte-identical outputs."""

import cmath
import filecmp
import math
import time
from pathlib import Path

import numpy as np
import pytest

from ghmkit import emit
from ghmkit.bifurcation import (AttractorLabel, CurveKind, fold_curve,
                                hopf_curve, sweep, tangency_curve,
                                tangency_gap)
from ghmkit.ergodic import Verdict, birkhoff, oscillation, wandering_probe
from ghmkit.ghm import (GhmParams, bt_fixed_point, bt_point, fixed_points,
                        jacobian, orbit)
from ghmkit.renorm import build_model, verify_asymptotics
from ghmkit.spectrum import TatjerCase, classify

RESULTS: dict = {}


def _report(num: int, ok: bool, detail: str, elapsed: float) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num}: {status} ({elapsed:.1f}s) - {detail}")


# -- criterion runners (deterministic; write their artifacts) ----------------

def crit1_bt(outdir: Path) -> dict:
    t0 = time.time()
    payload = {}
    eig_err = {}
    for r in (-0.05, 0.0, 0.05):
        fp = bt_fixed_point(r)
        eig_err[r] = float(np.max(np.abs(fp.eigenvalues - 1.0)))
        payload[f"r={r}"] = {
            "x": float(fp.state[0]), "y": float(fp.state[1]),
            "eig_err": eig_err[r],
        }
    p0 = bt_point(0.0)
    fp0 = bt_fixed_point(0.0)
    jac0 = jacobian(fp0.state, p0)
    emit.write_json(str(outdir / "crit1.json"), payload)
    return {
        "eig_err": eig_err,
        "bt0": (p0.m, p0.b),
        "fp0": tuple(float(v) for v in fp0.state),
        "jac0": [[float(v) for v in row] for row in jac0],
        "elapsed": time.time() - t0,
    }


def crit2_fold(outdir: Path) -> dict:
    t0 = time.time()
    curve = fold_curve(0.0, b_range=(0.2, 3.0), step=0.02)
    m, b = curve.points[:, 0], curve.points[:, 1]
    idx = np.unique(np.linspace(0, len(curve) - 1, 100).astype(int))
    formula_err = float(np.max(np.abs(m[idx] + (1 + b[idx]) ** 2 / 4)))
    through_bt = float(np.min(np.hypot(m + 1, b - 1)))
    emit.write_csv(str(outdir / "crit2_fold.csv"), ("M", "B"),
                   [(float(mm), float(bb)) for mm, bb in curve.points])
    return {
        "n_points": len(curve),
        "b_span": (float(b.min()), float(b.max())),
        "formula_err": formula_err,
        "through_bt": through_bt,
        "elapsed": time.time() - t0,
    }


def crit3_hopf(outdir: Path) -> dict:
    t0 = time.time()
    curve = hopf_curve(0.0, b_range=(0.2, 3.0), step=0.02)
    worst = 0.0
    for m, b in curve.points:
        eigs = None
        for fp in fixed_points(GhmParams(m, b, 0.0)):
            if abs(fp.eigenvalues[0].imag) > 1e-9:
                eigs = fp.eigenvalues
        assert eigs is not None
        worst = max(worst, float(np.max(np.abs(np.abs(eigs) - 1.0))))
    b_dev = float(np.max(np.abs(curve.points[:, 1] - 1.0)))
    emit.write_csv(str(outdir / "crit3_hopf.csv"), ("M", "B"),
                   [(float(mm), float(bb)) for mm, bb in curve.points])
    return {
        "modulus_err": worst,
        "b_dev": b_dev,
        "elapsed": time.time() - t0,
    }


def crit4_figure1(outdir: Path) -> dict:
    t0 = time.time()
    r = 0.02
    bt = bt_point(r)

    fold = fold_curve(r, b_range=(bt.b - 0.2, bt.b + 0.2), step=0.005)
    hopf = hopf_curve(r, b_range=(bt.b - 0.2, bt.b + 0.2), step=0.001)
    d_fold = float(np.min(np.hypot(fold.points[:, 0] - bt.m,
                                   fold.points[:, 1] - bt.b)))
    d_hopf = float(np.min(np.hypot(hopf.points[:, 0] - bt.m,
                                   hopf.points[:, 1] - bt.b)))

    box = ((bt.m - 0.1, bt.m + 0.1), (bt.b - 0.1, bt.b + 0.1))
    curves = tangency_curve(r, box, n_rays=6)
    families = {c.kind.value: c for c in curves}
    gap_checks = []
    for c in curves:
        for m, b in c.points[:2]:
            gap_checks.append(abs(tangency_gap(GhmParams(m, b, r))))

    m_range, b_range, nm, nb = (-0.9, 0.4), (0.98, 1.02), 200, 200
    grid = sweep(r, m_range=m_range, b_range=b_range, nm=nm, nb=nb,
                 transient=24000, n_measure=20000)
    grid.to_csv(str(outdir / "crit4_sweep.csv"))
    rows = []
    for c in curves:
        for (m, b), res in zip(c.points, c.residuals):
            rows.append((c.kind.value, float(m), float(b), float(res)))
    emit.write_csv(str(outdir / "crit4_tangency.csv"),
                   ("kind", "M", "B", "gap"), rows)

    # Boundary of the period-1 sink region vs the Hopf curve, per M-column.
    db = grid.b_values[1] - grid.b_values[0]
    hopf_b = {}
    for i, m in enumerate(grid.m_values):
        y = -1.0 + math.sqrt(1.0 + m)
        hopf_b[i] = 1.0 - r * y
    boundary_errs = []
    band_widths = []
    for i in range(nm):
        labels = grid.labels[i]
        periods = grid.period[i]
        circ = [j for j, lab in enumerate(labels)
                if lab is AttractorLabel.INVARIANT_CIRCLE]
        if not circ:
            continue
        j_c = min(circ)
        sinks = [j for j in range(j_c)
                 if labels[j] is AttractorLabel.SINK and periods[j] == 1]
        if not sinks:
            continue
        j_s = max(sinks)
        boundary = 0.5 * (grid.b_values[j_s] + grid.b_values[j_c])
        boundary_errs.append(abs(boundary - hopf_b[i]) / db)
        band_widths.append(j_c - j_s)
    return {
        "d_fold": d_fold,
        "d_hopf": d_hopf,
        "families": sorted(families),
        "family_sizes": {k: len(v.points) for k, v in families.items()},
        "max_curve_residual": float(max(np.max(c.residuals) for c in curves)),
        "gap_checks": gap_checks,
        "n_columns": len(boundary_errs),
        "max_boundary_err_cells": float(max(boundary_errs)) if boundary_errs
        else math.inf,
        "max_band_cells": max(band_widths) if band_widths else 10 ** 9,
        "elapsed": time.time() - t0,
    }


def crit5_renorm(outdir: Path) -> dict:
    t0 = time.time()
    model = build_model(0.5, 1.0, 3.0, 0.5)
    report = verify_asymptotics(model, (4, 16))
    emit.write_json(str(outdir / "crit5_renorm.json"), report.to_dict())
    win = report.window_mb
    m_ok = False
    resid_ok = False
    sign_ok = False
    if win is not None and win[1] - win[0] + 1 >= 4:
        m_ok = all(abs(report.m_ratio[n] / 9.0 - 1.0) <= 0.10
                   for n in range(win[0], win[1]))
        sign_ok = all(report.sign_match[n] for n in range(win[0], win[1] + 1))
        by_n = {rec.n: rec for rec in report.records}
        resid_ok = by_n[win[1]].residual < 1e-3
    rb_win = report.window
    rb_ok = rb_win is not None and rb_win[1] - rb_win[0] + 1 >= 4 and all(
        abs(report.rb_ratio[n] / 0.75 - 1.0) <= 0.10
        for n in range(rb_win[0], rb_win[1]))
    return {
        "window_mb": win,
        "window_full": rb_win,
        "m_ok": m_ok,
        "sign_ok": sign_ok,
        "resid_ok": resid_ok,
        "rb_ok": rb_ok,
        "elapsed": time.time() - t0,
    }


def crit6_classify(outdir: Path) -> dict:
    t0 = time.time()
    from test_spectrum import _random_sets, brute_force

    rng = np.random.default_rng(20260808)
    checked = 0
    agree = True
    while checked < 10_000:
        for values in _random_sets(rng, 2000):
            res = classify(values)
            unstable, dissipative, sectional = brute_force(values)
            if (res.unstable_index, res.dissipative,
                    res.sectionally_dissipative) != (unstable, dissipative,
                                                     sectional):
                agree = False
            checked += 1
            if checked >= 10_000:
                break

    lam = 0.5 * cmath.exp(1j * math.pi / 4)
    eq1 = classify([lam, lam.conjugate(), 0.1, 3.0])
    case_a = classify([0.9, 0.5, 1.5])
    case_b = classify([0.3, 1.2, 2.0])
    emit.write_json(str(outdir / "crit6_classify.json"), {
        "eq1": eq1.to_dict(), "case_a": case_a.to_dict(),
        "case_b": case_b.to_dict(),
    })
    return {
        "oracle_agree": agree,
        "eq1_flag": eq1.satisfies_eq1 and not eq1.sectionally_dissipative,
        "case_a": case_a.tatjer_case is TatjerCase.CASE_A,
        "case_b": case_b.tatjer_case is TatjerCase.CASE_B,
        "elapsed": time.time() - t0,
    }


def crit7_historic(outdir: Path) -> dict:
    t0 = time.time()
    from test_ergodic import block_series

    vals = block_series(2 ** 20)
    series = birkhoff(vals[:, None], "x")
    hist = oscillation(series, tail_fraction=0.5)

    sink_orbit = orbit([0.05, 0.0], GhmParams(0.0, 0.3, 0.0), n=20_000)
    sink_series = birkhoff(sink_orbit.states, "x")
    conv = oscillation(sink_series, tail_fraction=0.5)

    halving = wandering_probe(lambda pts: pts / 2.0, [1.0], radius=0.1, n=40)

    alpha = 2.0 * math.pi * (math.sqrt(5.0) - 1.0) / 2.0
    c, s = math.cos(alpha), math.sin(alpha)
    rot = np.array([[c, -s], [s, c]])
    rotation = wandering_probe(lambda pts: pts @ rot.T, [1.0, 0.0],
                               radius=0.05, n=200)
    emit.write_json(str(outdir / "crit7_historic.json"), {
        "block_oscillation": hist.oscillation,
        "block_verdict": hist.verdict.value,
        "sink_oscillation": conv.oscillation,
        "sink_verdict": conv.verdict.value,
        "halving_contractive": halving.contractive,
        "halving_nontrivial": halving.nontrivial_omega,
        "rotation_contractive": rotation.contractive,
        "rotation_disjoint_up_to": rotation.disjoint_up_to,
    })
    return {
        "block_osc": hist.oscillation,
        "block_verdict": hist.verdict,
        "sink_osc": conv.oscillation,
        "sink_verdict": conv.verdict,
        "halving": (halving.contractive, halving.nontrivial_omega),
        "rotation": (rotation.contractive, rotation.disjoint_up_to),
        "elapsed": time.time() - t0,
    }


RUNNERS = [crit1_bt, crit2_fold, crit3_hopf, crit4_figure1, crit5_renorm,
           crit6_classify, crit7_historic]


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    if "runs" not in RESULTS:
        dir_a = tmp_path_factory.mktemp("acceptance_a")
        dir_b = tmp_path_factory.mktemp("acceptance_b")
        results = [runner(dir_a) for runner in RUNNERS]
        repeat = [runner(dir_b) for runner in RUNNERS]
        RESULTS["runs"] = (results, repeat, dir_a, dir_b)
    return RESULTS["runs"]


def test_criterion_1_bt_point(runs):
    res = runs[0][0]
    ok = (max(res["eig_err"].values()) < 1e-6
          and res["bt0"] == (-1.0, 1.0)
          and res["fp0"] == (-1.0, -1.0)
          and res["jac0"] == [[0.0, 1.0], [-1.0, 2.0]]
          and res["elapsed"] < 1.0)
    _report(1, ok, f"BT eigenvalue error {max(res['eig_err'].values()):.2e}, "
            f"BT(0) = {res['bt0']}", res["elapsed"])
    assert ok


def test_criterion_2_fold_oracle(runs):
    res = runs[0][1]
    ok = (res["n_points"] >= 100
          and res["b_span"][0] <= 0.2 + 1e-9
          and res["b_span"][1] >= 3.0 - 1e-9
          and res["formula_err"] < 1e-8
          and res["through_bt"] < 1e-8
          and res["elapsed"] < 5.0)
    _report(2, ok, f"fold formula error {res['formula_err']:.2e} at 100 "
            f"points over B in [0.2, 3]", res["elapsed"])
    assert ok


def test_criterion_3_hopf_eigenvalues(runs):
    res = runs[0][2]
    ok = (res["modulus_err"] < 1e-8 and res["b_dev"] < 1e-8
          and res["elapsed"] < 5.0)
    _report(3, ok, f"unit-modulus error {res['modulus_err']:.2e}, "
            f"B deviation {res['b_dev']:.2e}", res["elapsed"])
    assert ok


def test_criterion_4_figure1_topology(runs):
    res = runs[0][3]
    ok = (res["d_fold"] < 1e-4 and res["d_hopf"] < 1e-4
          and res["families"] == ["TangencyMinus", "TangencyPlus"]
          and min(res["family_sizes"].values()) >= 3
          and res["max_curve_residual"] < 1e-6
          and max(res["gap_checks"]) < 1e-6
          and res["n_columns"] >= 150
          and res["max_boundary_err_cells"] <= 2.0
          and res["elapsed"] < 600.0)
    _report(4, ok, f"curves meet BT within {max(res['d_fold'], res['d_hopf']):.1e}; "
            f"two tangency families (sizes {res['family_sizes']}), "
            f"max |gap| {res['max_curve_residual']:.1e}; sink/circle boundary "
            f"within {res['max_boundary_err_cells']:.2f} cells of the Hopf "
            f"curve on {res['n_columns']} columns", res["elapsed"])
    assert ok


def test_criterion_5_renorm_asymptotics(runs):
    res = runs[0][4]
    ok = (res["m_ok"] and res["sign_ok"] and res["resid_ok"] and res["rb_ok"]
          and res["elapsed"] < 120.0)
    _report(5, ok, f"M-scale ratio ok={res['m_ok']}, B-sign pattern "
            f"ok={res['sign_ok']}, residual ok={res['resid_ok']}, "
            f"R-ratio ok={res['rb_ok']} (window {res['window_mb']})",
            res["elapsed"])
    assert ok


def test_criterion_6_classification_oracle(runs):
    res = runs[0][5]
    ok = (res["oracle_agree"] and res["eq1_flag"] and res["case_a"]
          and res["case_b"] and res["elapsed"] < 5.0)
    _report(6, ok, "10^4 random sets agree with the pairwise-product "
            "oracle; eq-(1) and Case A/B examples labelled", res["elapsed"])
    assert ok


def test_criterion_7_historic_controls(runs):
    res = runs[0][6]
    ok = (res["block_osc"] >= 0.25
          and res["block_verdict"] is Verdict.HISTORIC_LIKE
          and res["sink_osc"] < 0.005
          and res["sink_verdict"] is Verdict.CONVERGENT_LIKE
          and res["halving"] == (True, False)
          and res["rotation"][0] is False
          and res["rotation"][1] < 200
          and res["elapsed"] < 30.0)
    _report(7, ok, f"block oscillation {res['block_osc']:.3f} "
            f"({res['block_verdict'].value}); sink oscillation "
            f"{res['sink_osc']:.2e} ({res['sink_verdict'].value}); wandering "
            f"probes {res['halving']} / {res['rotation']}", res["elapsed"])
    assert ok


def test_criterion_8_determinism(runs):
    _, _, dir_a, dir_b = runs
    names = sorted(p.name for p in Path(dir_a).iterdir())
    ok = bool(names)
    mismatches = []
    for name in names:
        if not filecmp.cmp(Path(dir_a) / name, Path(dir_b) / name,
                           shallow=False):
            ok = False
            mismatches.append(name)
    _report(8, ok, f"byte-identical artifacts across repeated runs: "
            f"{len(names)} files" + (f"; mismatches {mismatches}"
                                     if mismatches else ""), 0.0)
    assert ok
