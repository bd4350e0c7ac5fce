"""Command-line front end.

Subcommands: counterexample, analyze, dtf, reduce, marginalize, granger,
moments, simulate, fit. Channel indices are 1-based in all user-facing
input and output. Frequencies are radians per sample by default; passing
``--fs`` (a sampling rate in Hz, optionally with ``--band LO,HI`` in Hz)
converts a Hz band to the internal radian grid.

Model files are JSON objects with exactly these keys: ``dim`` (channel
count), ``order`` (lag count p), ``coeffs`` (list of p row-major d-by-d
arrays, lag 1 first), ``sigma`` (row-major d-by-d innovation covariance).

Exit codes: 0 success, 1 numerical failure (e.g. a non-converged
marginalization), 2 usage / IO / parse error. Every error path prints a
single ``error[kind]: message`` line to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import causality, estimate, marginal, moments, reduction, spectral
from .exceptions import (
    DegenerateRow,
    NoConvergence,
    NotConverged,
    NumericalBreakdown,
    RankDeficientRegressors,
    SingularAtFrequency,
    SingularToeplitz,
    VardtfError,
)
from .jsonio import canonical_json
from .model import ChannelPair, VarModel, counterexample_model, read_model, write_model

_NUMERICAL_ERRORS = (
    NotConverged,
    NoConvergence,
    SingularAtFrequency,
    SingularToeplitz,
    NumericalBreakdown,
    DegenerateRow,
    RankDeficientRegressors,
)


@dataclass
class RunConfig:
    """Resolved invocation: model, grid, pair, output directory, tolerances."""

    model: VarModel
    grid: spectral.FrequencyGrid
    pair: ChannelPair | None
    outdir: Path | None
    seed: int
    q_max: int
    tol: float


def _parse_pair(text: str) -> ChannelPair:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"--pair expects 'A,B', got '{text}'")
    a, b = (int(p) for p in parts)
    if a < 1 or b < 1:
        raise ValueError("channel indices are 1-based")
    return ChannelPair(target=a - 1, source=b - 1)


def _load_model(args) -> VarModel:
    has_builtin = args.alpha is not None or args.beta is not None
    if args.model is not None and has_builtin:
        raise ValueError("give either --model or --alpha/--beta, not both")
    if args.model is not None:
        return read_model(args.model)
    if args.alpha is None or args.beta is None:
        raise ValueError("need --model FILE, or both --alpha and --beta")
    if not (np.isfinite(args.alpha) and np.isfinite(args.beta)):
        raise ValueError("--alpha and --beta must be finite")
    return counterexample_model(args.alpha, args.beta)


def _make_grid(args) -> spectral.FrequencyGrid:
    count = args.grid
    if getattr(args, "fs", None) is None:
        return spectral.default_grid(count)
    fs = args.fs
    if fs <= 0:
        raise ValueError("--fs must be positive")
    lo, hi = 0.0, fs / 2.0
    if getattr(args, "band", None):
        parts = args.band.split(",")
        if len(parts) != 2:
            raise ValueError(f"--band expects 'LO,HI' in Hz, got '{args.band}'")
        lo, hi = float(parts[0]), float(parts[1])
    if not 0.0 <= lo < hi <= fs / 2.0 + 1e-12:
        raise ValueError("--band must satisfy 0 <= LO < HI <= fs/2")
    points = np.linspace(2.0 * np.pi * lo / fs, 2.0 * np.pi * hi / fs, count)
    return spectral.FrequencyGrid(points)


def _resolve_config(args, need_pair: bool = False) -> RunConfig:
    pair = None
    if getattr(args, "pair", None) is not None:
        pair = _parse_pair(args.pair)
    elif need_pair:
        raise ValueError("this command requires --pair A,B")
    outdir = None
    if getattr(args, "out", None) is not None:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
    return RunConfig(
        model=_load_model(args),
        grid=_make_grid(args),
        pair=pair,
        outdir=outdir,
        seed=getattr(args, "seed", 0),
        q_max=args.qmax,
        tol=args.tol,
    )


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_csv(path: Path, fm: spectral.FrequencyMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        spectral.frequency_matrix_to_csv(fm, fh)


def _pair_label(verdict) -> str:
    return f"{verdict.target + 1}<-{verdict.source + 1}"


def _report_dict(report: causality.CausalityReport) -> dict:
    pairs = []
    for v in report.pairs:
        pairs.append(
            {
                "target": v.target + 1,
                "source": v.source + 1,
                "dtf_zero": v.dtf_zero,
                "bivariate_gc": v.bivariate_gc,
                "multivariate_gc": v.multivariate_gc,
                "contradiction": v.contradiction,
                "max_dtf": v.max_dtf,
                "max_phi": v.max_phi,
                "max_coeff": v.max_coeff,
                "error": v.error,
            }
        )
    return {"dim": report.dim, "pairs": pairs}


def _report_table(report: causality.CausalityReport) -> str:
    lines = [
        f"{'pair':8}{'dtf_zero':10}{'biv_gc':8}{'multi_gc':10}"
        f"{'contradiction':15}{'max_dtf':12}{'max_phi':12}"
    ]
    for v in report.pairs:
        flag = "YES" if v.contradiction else "-"
        biv = "?" if v.bivariate_gc is None else ("yes" if v.bivariate_gc else "no")
        phi = "-" if v.max_phi is None else format(v.max_phi, ".3g")
        lines.append(
            f"{_pair_label(v):8}{'yes' if v.dtf_zero else 'no':10}{biv:8}"
            f"{'yes' if v.multivariate_gc else 'no':10}{flag:15}"
            f"{format(v.max_dtf, '.3g'):12}{phi:12}"
        )
    return "\n".join(lines)


def _marginal_dict(rep: marginal.MarginalAR, deficit: float) -> dict:
    doc = {
        "order_used": rep.order_used,
        "phis": rep.phis.tolist(),
        "innov_cov": rep.innov_cov.tolist(),
        "convergence": {
            "tail_norm": rep.convergence.tail_norm,
            "v_delta": rep.convergence.v_delta,
            "converged": rep.convergence.converged,
        },
        "toeplitz_cond": rep.toeplitz_cond,
        "whiteness_deficit": deficit,
    }
    if rep.pair is not None:
        doc["pair"] = {"target": rep.pair.target + 1, "source": rep.pair.source + 1}
    return doc


def cmd_counterexample(args) -> int:
    """Full demonstration run on the built-in trivariate model."""
    cfg = _resolve_config(args)
    outdir = cfg.outdir
    model, grid = cfg.model, cfg.grid
    pair = ChannelPair(target=0, source=1)

    h = spectral.transfer_function(model, grid)
    _write_csv(outdir / "transfer_function.csv", h)

    red = reduction.reduce_pair(model, pair, grid)
    _write_csv(outdir / "reduced_polynomial.csv", red.reduced_poly)
    _write_csv(outdir / "error_spectrum.csv", red.error_spectrum)
    deficit = reduction.whiteness_deficit(red.error_spectrum)
    _write_text(
        outdir / "reduction.json",
        canonical_json(
            {
                "pair": {"target": 1, "source": 2},
                "whiteness_deficit": deficit,
                "is_white": reduction.is_white(red.error_spectrum),
            }
        ),
    )

    rep = marginal.marginal_representation(model, pair, q_max=cfg.q_max, tol=cfg.tol)
    rep_deficit = marginal.innovation_whiteness_check(model, pair, rep, grid)
    _write_text(outdir / "marginal.json", canonical_json(_marginal_dict(rep, rep_deficit)))

    report = causality.full_report(model, grid, q_max=cfg.q_max, tol=cfg.tol)
    _write_text(outdir / "report.json", canonical_json(_report_dict(report)))

    print(f"alpha={args.alpha:g} beta={args.beta:g}")
    print(_report_table(report))
    print(f"reduction whiteness deficit: {deficit:.6g}")
    print(f"marginal residual whiteness deficit: {rep_deficit:.6g}")
    n_contra = len(report.contradictions)
    print(f"contradictions: {n_contra}")
    return 0


def cmd_analyze(args) -> int:
    """Causality report plus per-pair marginalizations and spectra."""
    cfg = _resolve_config(args)
    model, grid = cfg.model, cfg.grid
    report = causality.full_report(model, grid, q_max=cfg.q_max, tol=cfg.tol)
    _write_text(cfg.outdir / "report.json", canonical_json(_report_dict(report)))
    _write_csv(cfg.outdir / "spectral_density.csv", spectral.spectral_density(model, grid))

    dtf_vals = spectral.dtf(model, grid, normalized=not args.raw)
    _write_csv(
        cfg.outdir / "dtf.csv",
        spectral.FrequencyMatrix(grid, dtf_vals.astype(complex)),
    )

    marginals: dict = {}
    for v in report.pairs:
        pair = ChannelPair(target=v.target, source=v.source)
        label = _pair_label(v)
        try:
            rep = marginal.marginal_representation(
                model, pair, q_max=cfg.q_max, tol=cfg.tol
            )
            deficit = marginal.innovation_whiteness_check(model, pair, rep, grid)
            marginals[label] = _marginal_dict(rep, deficit)
        except VardtfError as exc:
            marginals[label] = {"error": str(exc)}
    _write_text(cfg.outdir / "marginals.json", canonical_json(marginals))

    print(_report_table(report))
    return 0


def cmd_dtf(args) -> int:
    cfg = _resolve_config(args)
    values = spectral.dtf(cfg.model, cfg.grid, normalized=not args.raw)
    fm = spectral.FrequencyMatrix(cfg.grid, values.astype(complex))
    if cfg.outdir is not None:
        _write_csv(cfg.outdir / "dtf.csv", fm)
    else:
        spectral.frequency_matrix_to_csv(fm, sys.stdout)
    return 0


def cmd_reduce(args) -> int:
    cfg = _resolve_config(args, need_pair=True)
    red = reduction.reduce_pair(cfg.model, cfg.pair, cfg.grid)
    _write_csv(cfg.outdir / "reduced_polynomial.csv", red.reduced_poly)
    _write_csv(cfg.outdir / "error_spectrum.csv", red.error_spectrum)
    deficit = reduction.whiteness_deficit(red.error_spectrum)
    white = reduction.is_white(red.error_spectrum)
    _write_text(
        cfg.outdir / "reduction.json",
        canonical_json(
            {
                "pair": {"target": cfg.pair.target + 1, "source": cfg.pair.source + 1},
                "whiteness_deficit": deficit,
                "is_white": white,
            }
        ),
    )
    print(f"whiteness_deficit={deficit:.6g} is_white={white}")
    return 0


def cmd_marginalize(args) -> int:
    cfg = _resolve_config(args, need_pair=True)
    rep = marginal.marginal_representation(
        cfg.model, cfg.pair, q_max=cfg.q_max, tol=cfg.tol
    )
    deficit = marginal.innovation_whiteness_check(cfg.model, cfg.pair, rep, cfg.grid)
    doc = canonical_json(_marginal_dict(rep, deficit))
    if cfg.outdir is not None:
        _write_text(cfg.outdir / "marginal.json", doc)
    print(f"pair {cfg.pair.target + 1}<-{cfg.pair.source + 1}")
    print(f"order_used: {rep.order_used}  converged: {rep.convergence.converged}")
    print(f"innov_cov:\n{rep.innov_cov}")
    if rep.order_used > 0:
        print(f"phi(1):\n{rep.phis[0]}")
    print(f"residual whiteness deficit: {deficit:.6g}")
    return 0


def cmd_granger(args) -> int:
    cfg = _resolve_config(args)
    report = causality.full_report(cfg.model, cfg.grid, q_max=cfg.q_max, tol=cfg.tol)
    if cfg.outdir is not None:
        _write_text(cfg.outdir / "report.json", canonical_json(_report_dict(report)))
    if args.json:
        sys.stdout.write(canonical_json(_report_dict(report)))
    else:
        print(_report_table(report))
    return 0


def cmd_moments(args) -> int:
    cfg = _resolve_config(args)
    seq = moments.autocov(cfg.model, maxlag=args.maxlag)
    out = sys.stdout
    close = False
    if cfg.outdir is not None:
        out = open(cfg.outdir / "moments.csv", "w", encoding="utf-8")
        close = True
    try:
        d = seq.dim
        header = ["lag"] + [
            f"g_{j}_{k}" for j in range(1, d + 1) for k in range(1, d + 1)
        ]
        out.write(",".join(header) + "\n")
        for h in range(seq.maxlag + 1):
            cells = [str(h)] + [
                format(x, ".17g") for x in seq.gammas[h].reshape(-1)
            ]
            out.write(",".join(cells) + "\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    traj = estimate.simulate(cfg.model, args.length, cfg.seed, burn_in=args.burn_in)
    with open(cfg.outdir / "trajectory.csv", "w", encoding="utf-8") as fh:
        estimate.write_trajectory(traj, fh)
    print(f"wrote {traj.length} samples of {traj.dim} channels (seed {traj.seed})")
    return 0


def cmd_fit(args) -> int:
    with open(args.data, "r", encoding="utf-8") as fh:
        traj = estimate.read_trajectory(fh)
    fit = estimate.fit_var(traj, args.order)
    white = estimate.residual_whiteness(fit, maxlag=args.maxlag)
    if args.out is not None:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        write_model(fit.model, outdir / "fitted_model.json")
        _write_text(
            outdir / "fit_diagnostics.json",
            canonical_json(
                {
                    "stderr": fit.stderr.tolist(),
                    "nobs": fit.nobs,
                    "portmanteau": {
                        "statistic": white.statistic,
                        "df": white.df,
                        "p_value": white.p_value,
                    },
                    "lag_norms": white.lag_norms.tolist(),
                }
            ),
        )
    print(f"fitted VAR({args.order}) on {fit.nobs} observations")
    print(f"portmanteau p-value (L={args.maxlag}): {white.p_value:.4g}")
    return 0


def _add_model_args(sub) -> None:
    sub.add_argument("--model", default=None, help="model JSON file")
    sub.add_argument(
        "--alpha", type=float, default=None, help="builtin counterexample alpha"
    )
    sub.add_argument(
        "--beta", type=float, default=None, help="builtin counterexample beta"
    )


def _add_grid_args(sub) -> None:
    sub.add_argument(
        "--grid", type=int, default=spectral.DEFAULT_GRID_COUNT,
        help="number of frequency points (default 257)",
    )
    sub.add_argument(
        "--fs", type=float, default=None,
        help="sampling rate in Hz; switches --band to Hz input",
    )
    sub.add_argument(
        "--band", default=None, help="frequency band 'LO,HI' in Hz (needs --fs)"
    )


def _add_tol_args(sub) -> None:
    sub.add_argument(
        "--qmax", type=int, default=marginal.DEFAULT_Q_MAX,
        help="marginalization order cap (default 128)",
    )
    sub.add_argument(
        "--tol", type=float, default=marginal.DEFAULT_TOL,
        help="marginalization tail tolerance (default 1e-8)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vardtf",
        description="Directed transfer function vs Granger causality for VAR models",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser(
        "counterexample",
        help="demonstrate the DTF/causality disagreement on the builtin model",
    )
    sub.add_argument("--alpha", type=float, default=None, required=True)
    sub.add_argument("--beta", type=float, default=None, required=True)
    sub.add_argument("--out", required=True, help="output directory")
    _add_grid_args(sub)
    _add_tol_args(sub)
    sub.set_defaults(func=cmd_counterexample, model=None)

    sub = subs.add_parser("analyze", help="full report, spectra and marginalizations")
    _add_model_args(sub)
    _add_grid_args(sub)
    _add_tol_args(sub)
    sub.add_argument("--out", required=True)
    sub.add_argument("--raw", action="store_true", help="non-normalized DTF")
    sub.set_defaults(func=cmd_analyze)

    sub = subs.add_parser("dtf", help="directed transfer function on the grid")
    _add_model_args(sub)
    _add_grid_args(sub)
    _add_tol_args(sub)
    sub.add_argument("--out", default=None)
    sub.add_argument("--raw", action="store_true", help="non-normalized DTF")
    sub.set_defaults(func=cmd_dtf)

    sub = subs.add_parser("reduce", help="partitioned reduction of a channel pair")
    _add_model_args(sub)
    _add_grid_args(sub)
    _add_tol_args(sub)
    sub.add_argument("--pair", required=True, help="channel pair 'A,B', 1-based")
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=cmd_reduce)

    sub = subs.add_parser("marginalize", help="exact AR representation of a pair")
    _add_model_args(sub)
    _add_grid_args(sub)
    _add_tol_args(sub)
    sub.add_argument("--pair", required=True, help="channel pair 'A,B', 1-based")
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=cmd_marginalize)

    sub = subs.add_parser("granger", help="three-way causality verdicts per pair")
    _add_model_args(sub)
    _add_grid_args(sub)
    _add_tol_args(sub)
    sub.add_argument("--out", default=None)
    sub.add_argument("--json", action="store_true", help="print JSON instead of table")
    sub.set_defaults(func=cmd_granger)

    sub = subs.add_parser("moments", help="autocovariance sequence as CSV")
    _add_model_args(sub)
    _add_grid_args(sub)
    _add_tol_args(sub)
    sub.add_argument("--maxlag", type=int, default=None)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=cmd_moments)

    sub = subs.add_parser("simulate", help="simulate a trajectory to CSV")
    _add_model_args(sub)
    _add_grid_args(sub)
    _add_tol_args(sub)
    sub.add_argument("--length", type=int, required=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--burn-in", dest="burn_in", type=int, default=1000)
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=cmd_simulate)

    sub = subs.add_parser("fit", help="least-squares VAR fit of a trajectory CSV")
    sub.add_argument("--data", required=True, help="trajectory CSV file")
    sub.add_argument("--order", type=int, required=True)
    sub.add_argument("--maxlag", type=int, default=12, help="whiteness lags")
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"error[numerical]: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error[parse]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 2
    except (VardtfError, ValueError) as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
