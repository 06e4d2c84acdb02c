"""Command-line front end.

Subcommands: classify, ghm {orbit,fixed-points,bt,lyapunov},
bif {fold,hopf,tangency,sweep}, renorm verify, historic, wander.
All floating-point output carries 17 significant digits; CSV uses '.'
decimals, '\\n' newlines and always a header row, so repeated runs with the
same configuration are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

import numpy as np

from . import emit
from .errors import BadConfigError, GhmkitError
from .ghm import (GhmParams, bt_point, fixed_points, lyapunov_spectrum, orbit)
from .spectrum import classify


def _parse_complex(token: str) -> complex:
    cleaned = token.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise BadConfigError(f"cannot parse complex literal {token!r}") from exc


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [float(tok) for tok in text.split(",")]
    if len(parts) != 2:
        raise BadConfigError(f"expected 'lo,hi', got {text!r}")
    return parts[0], parts[1]


def _emit_text(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj: Any) -> None:
    _emit_text(args, emit.json_text(obj) + "\n")


# -- handlers ----------------------------------------------------------------

def _run_classify(args) -> int:
    values = [_parse_complex(tok) for tok in args.multipliers.split(",")]
    result = classify(values, tol=args.tol)
    _emit_json(args, result.to_dict())
    return 0


def _ghm_params(args) -> GhmParams:
    return GhmParams(m=args.m, b=args.b, r=args.r)


def _run_ghm_orbit(args) -> int:
    res = orbit([args.x0, args.y0], _ghm_params(args), n=args.n,
                transient=args.transient)
    rows = [(i, float(s[0]), float(s[1])) for i, s in enumerate(res.states)]
    text = emit.csv_text(("i", "x", "y"), rows)
    _emit_text(args, text)
    if res.escaped:
        print(f"escaped at step {res.escape_step}", file=sys.stderr)
    return 0


def _run_ghm_fixed_points(args) -> int:
    infos = fixed_points(_ghm_params(args))
    payload = [
        {
            "x": float(fp.state[0]),
            "y": float(fp.state[1]),
            "stability": fp.stability.value,
            "eigenvalues": [
                {"re": float(ev.real), "im": float(ev.imag)}
                for ev in fp.eigenvalues
            ],
        }
        for fp in infos
    ]
    _emit_json(args, {"fixed_points": payload})
    return 0


def _run_ghm_bt(args) -> int:
    p = bt_point(args.r)
    _emit_json(args, {"M": p.m, "B": p.b, "R": p.r})
    return 0


def _run_ghm_lyapunov(args) -> int:
    exps = lyapunov_spectrum(_ghm_params(args), [args.x0, args.y0], n=args.n)
    _emit_json(args, {"lyap1": float(exps[0]), "lyap2": float(exps[1])})
    return 0


def _run_bif_curve(args, kind: str) -> int:
    from .bifurcation import fold_curve, hopf_curve

    fn = fold_curve if kind == "fold" else hopf_curve
    curve = fn(args.r, b_range=args.range, step=args.step)
    rows = [(float(m), float(b), float(res))
            for (m, b), res in zip(curve.points, curve.residuals)]
    _emit_text(args, emit.csv_text(("M", "B", "residual"), rows))
    return 0


def _run_bif_tangency(args) -> int:
    from .bifurcation import tangency_curve
    from .ghm import bt_point as _bt

    bt = _bt(args.r)
    half = args.box / 2.0
    curves = tangency_curve(
        args.r, ((bt.m - half, bt.m + half), (bt.b - half, bt.b + half)),
        step=args.step, n_rays=args.rays)
    rows = []
    for curve in curves:
        for (m, b), res in zip(curve.points, curve.residuals):
            rows.append((curve.kind.value, float(m), float(b), float(res)))
    _emit_text(args, emit.csv_text(("kind", "M", "B", "gap"), rows))
    return 0


def _run_bif_sweep(args) -> int:
    from .bifurcation import sweep

    result = sweep(args.r, m_range=args.m_range, b_range=args.b_range,
                   nm=args.nm, nb=args.nb, transient=args.transient,
                   n_measure=args.measure, threads=args.threads)
    rows = []
    for i, m in enumerate(result.m_values):
        for j, b in enumerate(result.b_values):
            rows.append((float(m), float(b), result.labels[i, j].value,
                         float(result.lyap1[i, j]), float(result.lyap2[i, j]),
                         float(result.rotation[i, j])))
    _emit_text(args, emit.csv_text(("M", "B", "label", "lyap1", "lyap2", "rot"),
                                   rows))
    return 0


def _run_renorm_verify(args) -> int:
    from .renorm import build_model, verify_asymptotics

    model = build_model(args.lam, args.phi, args.gamma, args.mu)
    report = verify_asymptotics(model, (args.n_min, args.n_max))
    _emit_json(args, report.to_dict())
    return 0


def _run_historic(args) -> int:
    from .ergodic import birkhoff, oscillation

    data = np.loadtxt(args.input, delimiter=",", skiprows=1)
    states = np.atleast_2d(data)[:, 1:3]
    series = birkhoff(states, args.observable)
    report = oscillation(series, tail_fraction=args.tail)
    _emit_json(args, {
        "observable": series.observable_id,
        "n": len(series.partials),
        "oscillation": report.oscillation,
        "tail_fraction": report.window,
        "verdict": report.verdict.value,
    })
    return 0


def _make_map(spec: str):
    from .renorm import build_model, global_step, local_step

    if spec.startswith("ghm:"):
        m, b, r = (float(t) for t in spec[4:].split(","))
        p = GhmParams(m=m, b=b, r=r)

        def step_cloud(states: np.ndarray) -> np.ndarray:
            x, y = states[:, 0], states[:, 1]
            return np.column_stack([y, p.m - p.b * x - y * y - p.r * x * y])

        return step_cloud
    if spec.startswith("model:"):
        lam, phi, gamma, mu = (float(t) for t in spec[6:].split(","))
        model = build_model(lam, phi, gamma, mu)
        entry_lo = 1.0 - model.exit_half[2]

        def step_model(states: np.ndarray) -> np.ndarray:
            out = np.empty_like(states)
            for i, s in enumerate(states):
                nxt = local_step(model, s)
                if nxt[2] >= entry_lo:
                    nxt = global_step(model, nxt)
                out[i] = nxt
            return out

        return step_model
    raise BadConfigError(f"unknown map spec {spec!r}")


def _run_wander(args) -> int:
    from .ergodic import wandering_probe

    center = [float(t) for t in args.center.split(",")]
    report = wandering_probe(_make_map(args.map), center, radius=args.radius,
                             n=args.n, cloud=args.cloud)
    _emit_json(args, {
        "disjoint_up_to": report.disjoint_up_to,
        "diameters": [float(v) for v in report.diameters],
        "contractive": report.contractive,
        "nontrivial_omega": report.nontrivial_omega,
        "inflation": report.inflation,
        "omega_sample": [[float(v) for v in row]
                         for row in report.omega_sample[-8:]],
    })
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghmkit",
        description="Numerical toolkit for the generalized Henon family, its "
                    "bifurcation structure, return-map rescaling and "
                    "historic/wandering diagnostics.")
    parser.add_argument("--config", type=str, default=None,
                        help="JSON file with option values for the subcommand")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("classify", help="classify a multiplier tuple")
    p.add_argument("--multipliers", required=True,
                   help="comma-separated complex literals a+bi")
    p.add_argument("--tol", type=float, default=1e-9)
    add_common(p)
    p.set_defaults(handler=_run_classify)

    ghm = sub.add_parser("ghm", help="generalized Henon map operations")
    ghm_sub = ghm.add_subparsers(dest="subcommand", required=True)

    p = ghm_sub.add_parser("orbit")
    for flag, default in (("--m", None), ("--b", None), ("--r", 0.0),
                          ("--x0", 0.0), ("--y0", 0.0)):
        p.add_argument(flag, type=float, required=default is None,
                       default=default)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--transient", type=int, default=0)
    add_common(p)
    p.set_defaults(handler=_run_ghm_orbit)

    p = ghm_sub.add_parser("fixed-points")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--r", type=float, default=0.0)
    add_common(p)
    p.set_defaults(handler=_run_ghm_fixed_points)

    p = ghm_sub.add_parser("bt")
    p.add_argument("--r", type=float, required=True)
    add_common(p)
    p.set_defaults(handler=_run_ghm_bt)

    p = ghm_sub.add_parser("lyapunov")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--n", type=int, default=100000)
    add_common(p)
    p.set_defaults(handler=_run_ghm_lyapunov)

    bif = sub.add_parser("bif", help="bifurcation curves and sweeps")
    bif_sub = bif.add_subparsers(dest="subcommand", required=True)

    for kind in ("fold", "hopf"):
        p = bif_sub.add_parser(kind)
        p.add_argument("--r", type=float, required=True)
        p.add_argument("--range", type=_parse_pair, default=(0.2, 3.0),
                       help="B-range 'lo,hi'")
        p.add_argument("--step", type=float, default=0.02)
        add_common(p)
        p.set_defaults(handler=lambda a, k=kind: _run_bif_curve(a, k))

    p = bif_sub.add_parser("tangency")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--box", type=float, default=0.2,
                   help="side length of the search box around the BT point")
    p.add_argument("--step", type=float, default=5e-4)
    p.add_argument("--rays", type=int, default=8)
    add_common(p)
    p.set_defaults(handler=_run_bif_tangency)

    p = bif_sub.add_parser("sweep")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--m-range", type=_parse_pair, required=True)
    p.add_argument("--b-range", type=_parse_pair, required=True)
    p.add_argument("--nm", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--transient", type=int, default=20000)
    p.add_argument("--measure", type=int, default=4000)
    add_common(p)
    p.set_defaults(handler=_run_bif_sweep)

    ren = sub.add_parser("renorm", help="return-map rescaling verification")
    ren_sub = ren.add_subparsers(dest="subcommand", required=True)
    p = ren_sub.add_parser("verify")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=16)
    add_common(p)
    p.set_defaults(handler=_run_renorm_verify)

    p = sub.add_parser("historic", help="Birkhoff-average oscillation report")
    p.add_argument("--input", required=True, help="orbit CSV with i,x,y")
    p.add_argument("--observable", default="x",
                   help="x | y | box:x0,x1[,y0,y1]")
    p.add_argument("--tail", type=float, default=0.5)
    add_common(p)
    p.set_defaults(handler=_run_historic)

    p = sub.add_parser("wander", help="wandering-domain probe")
    p.add_argument("--map", required=True,
                   help="ghm:M,B,R or model:lambda,phi,gamma,mu")
    p.add_argument("--center", required=True, help="comma-separated state")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--cloud", type=int, default=16)
    add_common(p)
    p.set_defaults(handler=_run_wander)

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> Any:
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(payload, dict):
        raise BadConfigError("config must be a JSON object")
    known = {k for k in vars(args) if k not in ("handler", "config")}
    explicit = _explicit_flags(argv)
    for key, value in payload.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise BadConfigError(f"unknown config key {key!r}")
        if dest in explicit:
            continue  # explicit command-line flags win
        if isinstance(value, str) and isinstance(getattr(args, dest), tuple):
            value = _parse_pair(value)
        elif isinstance(value, list):
            value = tuple(value)
        setattr(args, dest, value)
    return args


def _explicit_flags(argv: Sequence[str]) -> set[str]:
    seen = set()
    for token in argv:
        if token.startswith("--"):
            seen.add(token[2:].split("=")[0].replace("-", "_"))
    return seen


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = _apply_config(parser, list(argv))
        return args.handler(args)
    except GhmkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
