"""Command-line front door: transforms, densities, asymptotes, grids, MC, validate.

Every run writes a self-describing CSV: a '#'-prefixed header block with the
fully resolved configuration, then the data rows with floats at 17 significant
digits.  Exit codes: 0 success, 1 validation failure, 2 usage error,
3 numeric/domain error.
"""

from __future__ import annotations

import argparse
import gzip
import sys

import numpy as np

from . import __version__
from . import models as M
from . import qsd as Q
from . import resolvent as R
from . import simulate as sim
from .models import ParisianQsdError

__all__ = ["main", "run", "format_csv", "simulate_artifact_text"]


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def format_csv(header: dict, columns, rows) -> str:
    lines = [f"# parisian-qsd {__version__}"]
    for key in sorted(header):
        lines.append(f"# {key} = {_fmt(header[key])}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _model_header(model: M.LevyModel) -> dict:
    return {"model": model.model_id, "kind": model.kind, "sigma": model.sigma,
            "c": model.c, "lambda": model.lam, "nu": model.nu}


# -- subcommand implementations ---------------------------------------------

def _cmd_transform(args) -> int:
    model = M.model_from_config(args.model)
    tr = Q.qsd_transform(model, args.x, args.theta)
    alphas = np.linspace(0.0, args.alpha_max, args.alpha_steps + 1)
    rows = []
    for a in alphas:
        h = float(np.real(tr.h_at(float(a))))
        rows.append({"alpha": float(a), "h": h, "normalized": h / tr.h_zero})
    header = _model_header(model)
    header.update({"x": args.x, "theta": args.theta, "alpha-max": args.alpha_max,
                   "alpha-steps": args.alpha_steps, "h-zero": tr.h_zero,
                   "below-mass": tr.below_mass})
    _emit(format_csv(header, ["alpha", "h", "normalized"], rows), args.output)
    return 0


def _cmd_density(args) -> int:
    model = M.model_from_config(args.model)
    ys = np.linspace(args.y_min, args.y_max, args.y_steps + 1)
    ys = ys[np.abs(ys) > 1e-12]
    pairs = Q.qsd_density(model, args.x, args.theta, ys, m_terms=args.m_terms)
    rows = [{"y": y, "density": d} for y, d in pairs]
    header = _model_header(model)
    header.update({"x": args.x, "theta": args.theta, "y-min": args.y_min,
                   "y-max": args.y_max, "y-steps": args.y_steps,
                   "m-terms": args.m_terms})
    _emit(format_csv(header, ["y", "density"], rows), args.output)
    return 0


def _cmd_asymptote(args) -> int:
    model = M.model_from_config(args.model)
    ts = np.linspace(args.t_min, args.t_max, args.t_steps + 1)
    rows = [{"t": float(t),
             "value": Q.survival_asymptote(model, args.x, args.theta, float(t), args.alpha)}
            for t in ts]
    header = _model_header(model)
    header.update({"x": args.x, "theta": args.theta, "alpha": args.alpha,
                   "t-min": args.t_min, "t-max": args.t_max, "t-steps": args.t_steps})
    _emit(format_csv(header, ["t", "value"], rows), args.output)
    return 0


def _parse_list(text: str):
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _cmd_resolvent(args) -> int:
    model = M.model_from_config(args.model)
    rows = R.resolvent_grid(model, _parse_list(args.x), _parse_list(args.alpha),
                            _parse_list(args.q), _parse_list(args.theta))
    header = _model_header(model)
    header.update({"x": args.x, "alpha": args.alpha, "q": args.q, "theta": args.theta})
    _emit(format_csv(header, ["model", "x", "alpha", "q", "theta", "value", "branch"],
                     rows), args.output)
    return 0


def simulate_artifact_text(model: M.LevyModel, x0: float, alpha: float, q: float,
                           theta: float, paths: int, seed: int, step: float = 1e-4) -> str:
    cfg = sim.SimConfig(model=model, x0=x0, theta=theta, paths=paths, seed=seed, step=step)
    est = sim.mc_resolvent(cfg, alpha, q)
    header = _model_header(model)
    header.update({"x0": x0, "alpha": alpha, "q": q, "theta": theta,
                   "paths": paths, "seed": seed, "step": step})
    rows = [{"mean": est.mean, "stderr": est.stderr, "n": est.n, "seed": est.seed}]
    return format_csv(header, ["mean", "stderr", "n", "seed"], rows)


def _cmd_simulate(args) -> int:
    model = M.model_from_config(args.model)
    text = simulate_artifact_text(model, x0=args.x0, alpha=args.alpha, q=args.q,
                                  theta=args.theta, paths=args.paths, seed=args.seed,
                                  step=args.step)
    _emit(text, args.output)
    if args.emit_paths:
        cfg = sim.SimConfig(model=model, x0=args.x0, theta=args.theta,
                            paths=args.paths, seed=args.seed, step=args.step)
        tau_t, tau_c, xh = sim.simulate_paths(cfg)
        body = ["pathIndex,tauTheta,tauClassic,X_horizon"]
        for i in range(cfg.paths):
            body.append(f"{i},{_fmt(float(tau_t[i]))},{_fmt(float(tau_c[i]))},"
                        f"{_fmt(float(xh[i]))}")
        payload = ("\n".join(body) + "\n").encode()
        if args.emit_paths.endswith(".gz"):
            with gzip.open(args.emit_paths, "wb") as fh:
                fh.write(payload)
        else:
            with open(args.emit_paths, "wb") as fh:
                fh.write(payload)
    return 0


def _cmd_validate(args) -> int:
    from .validate import run_acceptance, catalog
    indices = None
    if args.model:
        model = M.model_from_config(args.model)
        ids = {m.model_id for m in catalog().values()}
        if model.model_id not in ids:
            print(f"# note: {model.model_id} is outside the acceptance catalog; "
                  "running the full suite", file=sys.stderr)
    if args.criteria:
        indices = {int(tok) for tok in args.criteria.split(",")}
    results = run_acceptance(fast=args.fast, indices=indices)
    all_ok = True
    for res in results:
        print(res.line())
        for line in res.detail.splitlines():
            print(f"    {line}")
        all_ok &= res.passed
    return 0 if all_ok else 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parisian-qsd",
                                description="Parisian-ruin resolvents and "
                                            "quasi-stationary distributions")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add_model(sp):
        sp.add_argument("--model", required=True, help="key=value model config file")
        sp.add_argument("--output", default=None, help="CSV output path (default stdout)")

    sp = sub.add_parser("transform", help="limit Laplace transform on an alpha grid")
    add_model(sp)
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--theta", type=float, default=1.0)
    sp.add_argument("--alpha-max", type=float, default=5.0)
    sp.add_argument("--alpha-steps", type=int, default=50)
    sp.set_defaults(fn=_cmd_transform)

    sp = sub.add_parser("density", help="invert the limit transform to a density grid")
    add_model(sp)
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--theta", type=float, default=1.0)
    sp.add_argument("--y-min", type=float, default=-5.0)
    sp.add_argument("--y-max", type=float, default=20.0)
    sp.add_argument("--y-steps", type=int, default=200)
    sp.add_argument("--m-terms", type=int, default=32)
    sp.set_defaults(fn=_cmd_density)

    sp = sub.add_parser("asymptote", help="large-time survival approximation table")
    add_model(sp)
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--theta", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--t-min", type=float, default=10.0)
    sp.add_argument("--t-max", type=float, default=100.0)
    sp.add_argument("--t-steps", type=int, default=18)
    sp.set_defaults(fn=_cmd_asymptote)

    sp = sub.add_parser("resolvent", help="Parisian resolvent grid sweep")
    add_model(sp)
    sp.add_argument("--x", default="0.5,1,2")
    sp.add_argument("--alpha", default="0,0.25,0.5")
    sp.add_argument("--q", default="0.5,1")
    sp.add_argument("--theta", default="1,2")
    sp.set_defaults(fn=_cmd_resolvent)

    sp = sub.add_parser("simulate", help="Monte Carlo resolvent estimate")
    add_model(sp)
    sp.add_argument("--x0", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--q", type=float, default=1.0)
    sp.add_argument("--theta", type=float, default=1.0)
    sp.add_argument("--paths", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=sim.DEFAULT_SEED)
    sp.add_argument("--step", type=float, default=1e-4)
    sp.add_argument("--emit-paths", default=None,
                    help="dump per-path functionals (gzip if *.gz)")
    sp.set_defaults(fn=_cmd_simulate)

    sp = sub.add_parser("validate", help="run the acceptance suite")
    sp.add_argument("--model", default=None, help="optional model config (catalog note)")
    sp.add_argument("--fast", action="store_true", help="reduced path counts")
    sp.add_argument("--criteria", default=None, help="comma-separated criterion indices")
    sp.set_defaults(fn=_cmd_validate)
    return p


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ParisianQsdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
