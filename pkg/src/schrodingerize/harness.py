"""Configuration-driven front end: single runs, scans, convergence ladders, CSV.

A :class:`RunConfig` names an experiment and overrides any of its recommended
parameters; :func:`run` executes the full pipeline (lift if inhomogeneous,
warp, discretize, unitary evolution, recovery) and returns a
:class:`RunResult` with the recovered state, window/point errors against the
configured reference, the measurement-cost estimate, and per-phase timings.
:func:`convergence` repeats a run over a refinement ladder (halving dp and dt
on the discrete route; doubling X and halving dt on the continuous route) and
fits the observed order.

The CLI wraps these as subcommands ``solve``, ``scan``, ``convergence`` and
``demo``; a key-value config file (INI section ``[run]``) may supply any
option, with command-line flags winning.  Exit codes: 0 success, 2 bad
configuration, 3 numerical failure.  Runs are deterministic: the same config
produces byte-identical CSV.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, SchroError
from .evolve import StepperConfig, evolve_modes, expm_oracle
from .fourier_xi import XiGrid, init_xi_state, xi_blocks
from .problems import EXPERIMENT_NAMES, Experiment, by_name
from .recover import (MeasurementEstimate, error_scan, measurement_estimate,
                      pick_recovery_p, recover_integral, recover_point,
                      recovery_window, window_error)
from .spectral_p import PGrid, make_initial_state, mode_hamiltonian, to_mode_space
from .systems import lift_inhomogeneous
from .warping import WarpProfile

DISCRETE = "discrete"
CONTINUOUS = "continuous"


@dataclass(frozen=True)
class RunConfig:
    """One pipeline run; None fields fall back to the experiment defaults.

    ``experiment`` is a registry name or an inline :class:`Experiment`.
    """

    experiment: object
    discretization: Optional[str] = None
    profile: Optional[str] = None
    n_p: Optional[int] = None
    pi_l: Optional[float] = None
    X: Optional[float] = None
    delta_xi: Optional[float] = None
    dt: Optional[float] = None
    T: Optional[float] = None
    gamma: Optional[float] = None
    c_t: Optional[float] = None
    R: Optional[float] = None
    p_diamond: Optional[float] = None
    epsilon: float = 1e-6
    reference: Optional[str] = None      # "analytic" | "semi-discrete"
    threads: Optional[int] = None
    chunk: int = 256
    output: Optional[str] = None
    experiment_args: dict = field(default_factory=dict, hash=False, compare=False)


@dataclass
class RunResult:
    experiment: str
    discretization: str
    recovered: np.ndarray
    recovery_p: float
    window: tuple
    window_err: Optional[float]
    point_err: Optional[float]
    measurement: Optional[MeasurementEstimate]
    norm_drift: float
    timings: dict
    state: object
    exact: Optional[np.ndarray]
    n_out: Optional[int]
    grid: object
    # lifted systems only: relative recovery error of the auxiliary block,
    # whose true value r0/gamma is known exactly (built-in sanity check)
    aux_residual: Optional[float] = None


@dataclass(frozen=True)
class ConvergenceRow:
    label: str
    resolution: float
    error: float
    order: Optional[float] = None   # pairwise order against the previous row


@dataclass
class ConvergenceReport:
    kind: str                       # "discrete" | "continuous"
    rows: list
    fitted_order: float
    max_norm_drift: float = 0.0


def _resolve(config: RunConfig) -> tuple:
    if isinstance(config.experiment, Experiment):
        exp = config.experiment
    else:
        exp = by_name(config.experiment, **config.experiment_args)
    rec = exp.recommended
    disc = config.discretization or rec.discretization
    if disc not in (DISCRETE, CONTINUOUS):
        raise ConfigError(f"unknown discretization {disc!r}")
    if disc == DISCRETE:
        if config.X is not None or config.delta_xi is not None:
            raise ConfigError("X/delta_xi given for a discrete-route run")
        n_p = config.n_p or rec.n_p
        pi_l = config.pi_l or rec.pi_l
        if n_p is None or pi_l is None:
            raise ConfigError("discrete route needs n_p and pi_l")
    else:
        if config.n_p is not None:
            raise ConfigError("n_p given for a continuous-route run")
        X = config.X or rec.X
        dxi = config.delta_xi or rec.delta_xi
        if X is None or dxi is None:
            raise ConfigError("continuous route needs X and delta_xi")
    return exp, rec, disc


def run(config: RunConfig, reference_vec: Optional[np.ndarray] = None) -> RunResult:
    """Execute the pipeline described by ``config``.

    ``reference_vec`` short-circuits the reference solution (used by
    convergence ladders, which share one reference across rungs).
    """
    exp, rec, disc = _resolve(config)
    T = config.T if config.T is not None else exp.system.T
    dt = config.dt if config.dt is not None else rec.delta_t
    profile = WarpProfile.from_name(config.profile or rec.profile)
    p_dia = config.p_diamond if config.p_diamond is not None else rec.p_diamond
    R = config.R if config.R is not None else rec.R
    threads = config.threads or 1
    timings: dict = {}

    tic = time.perf_counter()
    lifted = lift_inhomogeneous(exp.system,
                                c_t=config.c_t if config.c_t is not None else rec.c_t,
                                gamma=config.gamma if config.gamma is not None
                                else rec.gamma)
    work = lifted.base
    n_out = lifted.n_original if lifted.augmented else None
    pair = work.hermitian_at if not work.a_constant else work.hermitian_at(0.0)
    step_cfg = StepperConfig(dt=dt, scheme="cn",
                             time_dependent=not work.a_constant,
                             threads=threads, chunk=config.chunk)

    if disc == DISCRETE:
        grid = PGrid.from_half_width(config.pi_l or rec.pi_l,
                                     config.n_p or rec.n_p)
        state0 = to_mode_space(make_initial_state(work.u0, grid, profile))
        blocks = mode_hamiltonian(pair, grid)
    else:
        grid = XiGrid.from_spacing(config.X or rec.X,
                                   config.delta_xi or rec.delta_xi)
        state0 = init_xi_state(work.u0, grid)
        blocks = xi_blocks(pair, grid)
    timings["assemble"] = time.perf_counter() - tic

    state_t, report = evolve_modes(blocks, state0, step_cfg, T)
    timings["evolve"] = report.elapsed

    tic = time.perf_counter()
    if disc == DISCRETE:
        p_rec = pick_recovery_p(grid, p_dia, R)
        recovered_full = recover_point(state_t, p_rec)
    else:
        p_rec = p_dia + 0.25 * R
        recovered_full = recover_integral(state_t, p_rec)
    recovered = recovered_full[:n_out] if n_out is not None else recovered_full

    aux_residual = None
    if lifted.augmented:
        r_true = np.ones(lifted.n_original) / lifted.gamma
        r_rec = recovered_full[lifted.n_original:]
        aux_residual = float(np.linalg.norm(r_rec - r_true)
                             / np.linalg.norm(r_true))

    exact_vec = reference_vec
    if exact_vec is None:
        exact_vec = reference_solution(exp, T,
                                       config.reference or rec.reference)
    w_err = p_err = None
    if exact_vec is not None:
        w_err = window_error(state_t, exact_vec, p_dia, p_dia + R, n_out=n_out)
        ref = np.linalg.norm(exact_vec)
        p_err = float(np.linalg.norm(recovered - exact_vec) / ref)

    meas = None
    if disc == DISCRETE:
        window = recovery_window(grid, p_dia, R)
        if window.indices:
            meas = measurement_estimate(grid, window,
                                        float(np.linalg.norm(exp.system.u0)),
                                        float(np.linalg.norm(recovered)))
    timings["recover"] = time.perf_counter() - tic

    return RunResult(experiment=exp.name, discretization=disc,
                     recovered=recovered, recovery_p=p_rec,
                     window=(p_dia, p_dia + R), window_err=w_err,
                     point_err=p_err, measurement=meas,
                     norm_drift=report.norm_drift, timings=timings,
                     state=state_t, exact=exact_vec, n_out=n_out, grid=grid,
                     aux_residual=aux_residual)


def reference_solution(exp: Experiment, T: float, kind: str) -> np.ndarray:
    """Comparison vector at time T, in the experiment's own scaling."""
    if kind == "analytic":
        return exp.exact(T)
    if kind == "semi-discrete":
        return expm_oracle(exp.system, T)
    raise ConfigError(f"unknown reference {kind!r}")


def scan(config: RunConfig, p_list: Sequence[float]) -> list:
    """Pointwise-recovery error over ``p_list`` for the configured run."""
    result = run(config)
    if result.exact is None:
        raise ConfigError("scan needs an experiment with an exact solution")
    return error_scan(result.state, result.exact, p_list, n_out=result.n_out)


def convergence(config: RunConfig, rungs: int = 3) -> ConvergenceReport:
    """Refinement ladder: halve dp and dt (discrete) or double X (continuous).

    All rungs share a single reference solution; errors are relative L2 over
    the recovery window and the fitted order is the log-log least-squares
    slope against dp (discrete) or 1/X (continuous).
    """
    if rungs < 3:
        raise ConfigError("a fitted order needs at least 3 rungs")
    exp, rec, disc = _resolve(config)
    T = config.T if config.T is not None else exp.system.T
    ref = reference_solution(exp, T, config.reference or rec.reference)
    dt0 = config.dt if config.dt is not None else rec.delta_t

    rows = []
    resolutions = []
    errors = []
    drift = 0.0
    for k in range(rungs):
        dt_k = dt0 / 2 ** k
        if disc == DISCRETE:
            n_p = (config.n_p or rec.n_p) * 2 ** k
            cfg_k = replace(config, n_p=n_p, dt=dt_k)
            res = 2.0 * (config.pi_l or rec.pi_l) / n_p
            label = f"dp={res:.6g},dt={dt_k:.6g}"
        else:
            X = (config.X or rec.X) * 2 ** k
            cfg_k = replace(config, X=X, dt=dt_k)
            res = X
            label = f"X={X:.6g},dt={dt_k:.6g}"
        out = run(cfg_k, reference_vec=ref)
        drift = max(drift, out.norm_drift)
        resolutions.append(res)
        errors.append(out.window_err)
        order = None
        if k > 0:
            step = (np.log(resolutions[-2] / res) if disc == DISCRETE
                    else np.log(res / resolutions[-2]))
            order = float(np.log(errors[-2] / errors[-1]) / step)
        rows.append(ConvergenceRow(label=label, resolution=res,
                                   error=float(errors[-1]), order=order))

    logs = np.log(np.asarray(resolutions))
    loge = np.log(np.asarray(errors))
    slope = float(np.polyfit(logs, loge, 1)[0])
    fitted = slope if disc == DISCRETE else -slope
    return ConvergenceReport(kind=disc, rows=rows, fitted_order=fitted,
                             max_norm_drift=drift)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17e}"


def emit_csv(obj, path: str) -> None:
    """Write a scan, a convergence report, or a solve result as CSV.

    Columns are stable: scans are (p, rel_error); convergence reports are
    (resolution, error, order) with a final ``fitted_order`` row; solve
    results are (index, real, imag) of the recovered vector.
    """
    lines = []
    if isinstance(obj, ConvergenceReport):
        lines.append("resolution,error,order")
        for row in obj.rows:
            order = "" if row.order is None else _fmt(row.order)
            lines.append(f"{_fmt(row.resolution)},{_fmt(row.error)},{order}")
        lines.append(f"fitted_order,,{_fmt(obj.fitted_order)}")
    elif isinstance(obj, RunResult):
        lines.append("index,real,imag")
        for i, z in enumerate(obj.recovered):
            lines.append(f"{i},{_fmt(z.real)},{_fmt(z.imag)}")
    else:
        lines.append("p,rel_error")
        for p, err in obj:
            lines.append(f"{_fmt(p)},{_fmt(err)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_csv(path: str):
    """Inverse of :func:`emit_csv` for scans and convergence reports."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        body = [ln.strip() for ln in fh if ln.strip()]
    if header == "p,rel_error":
        return [(float(a), float(b)) for a, b in (ln.split(",") for ln in body)]
    if header == "resolution,error,order":
        rows = []
        fitted = None
        for ln in body:
            a, b, c = ln.split(",")
            if a == "fitted_order":
                fitted = float(c)
            else:
                rows.append(ConvergenceRow(label="", resolution=float(a),
                                           error=float(b),
                                           order=None if c == "" else float(c)))
        return rows, fitted
    raise ValueError(f"unrecognized CSV header {header!r}")


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def parse_number(text: str) -> float:
    """Accept plain floats, 'pi', and fractions like '1/256' or 'pi/128'."""
    def atom(tok: str) -> float:
        tok = tok.strip()
        if tok.lower() == "pi":
            return math.pi
        return float(tok)

    parts = text.split("/")
    if len(parts) == 1:
        return atom(parts[0])
    if len(parts) == 2:
        return atom(parts[0]) / atom(parts[1])
    raise ValueError(f"cannot parse number {text!r}")


_OPTION_KEYS = ("experiment", "disc", "profile", "np", "pil", "x", "dxi", "dt",
                "t", "gamma", "ct", "r", "epsilon", "p_diamond", "reference",
                "threads", "output")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schrodingerize",
        description="Warped-phase (unitary) emulation of linear dynamical "
                    "systems, with recovery past the instability threshold.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [run] section")
    common.add_argument("--experiment", "-e", choices=EXPERIMENT_NAMES)
    common.add_argument("--disc", choices=(DISCRETE, CONTINUOUS))
    common.add_argument("--profile", choices=("exponential", "smooth"))
    common.add_argument("--Np", dest="np", type=int,
                        help="number of p-grid nodes (discrete route)")
    common.add_argument("--piL", dest="pil",
                        help="half-width of the p-domain, e.g. 'pi' or 257")
    common.add_argument("--X", dest="x", help="xi truncation (continuous route)")
    common.add_argument("--dxi", help="xi spacing, e.g. 5/8")
    common.add_argument("--dt", help="time step, e.g. 1/256")
    common.add_argument("--T", dest="t", help="horizon override")
    common.add_argument("--gamma", help="stretch coefficient override")
    common.add_argument("--cT", dest="ct", help="stretch normalization C_T")
    common.add_argument("--R", dest="r", help="recovery window length")
    common.add_argument("--epsilon", help="accuracy target for domain sizing")
    common.add_argument("--p-diamond", dest="p_diamond",
                        help="recovery threshold override")
    common.add_argument("--reference", choices=("analytic", "semi-discrete"))
    common.add_argument("--threads", type=int,
                        help="mode-parallel worker threads "
                             "(default: hardware parallelism)")
    common.add_argument("--output", "-o", help="CSV output path")

    sub.add_parser("solve", parents=[common],
                   help="run once and report recovery errors")
    p_scan = sub.add_parser("scan", parents=[common],
                            help="pointwise recovery error versus p")
    p_scan.add_argument("--p-min", help="scan start")
    p_scan.add_argument("--p-max", help="scan end")
    p_scan.add_argument("--points", type=int, default=81)
    p_conv = sub.add_parser("convergence", parents=[common],
                            help="refinement ladder and fitted order")
    p_conv.add_argument("--rungs", type=int, default=3)
    p_demo = sub.add_parser("demo", parents=[common],
                            help="run an experiment with its recommended setup")
    p_demo.add_argument("demo_experiment", choices=EXPERIMENT_NAMES)
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    merged = {k: None for k in _OPTION_KEYS}
    if args.config:
        ini = configparser.ConfigParser()
        if not ini.read(args.config):
            raise ConfigError(f"cannot read config file {args.config!r}")
        if not ini.has_section("run"):
            raise ConfigError("config file needs a [run] section")
        for key, value in ini.items("run"):
            if key not in _OPTION_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = value
    for key in _OPTION_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _to_run_config(merged: dict) -> RunConfig:
    if not merged["experiment"]:
        raise ConfigError("an experiment must be named (flag or config file)")
    num = lambda k: None if merged[k] is None else parse_number(str(merged[k]))
    profile = merged["profile"]
    if profile == "smooth":
        profile = "smooth-r2"
    threads = merged["threads"]
    if threads is None:
        threads = os.cpu_count() or 1
    return RunConfig(
        experiment=merged["experiment"],
        discretization=merged["disc"],
        profile=profile,
        n_p=None if merged["np"] is None else int(merged["np"]),
        pi_l=num("pil"), X=num("x"), delta_xi=num("dxi"), dt=num("dt"),
        T=num("t"), gamma=num("gamma"), c_t=num("ct"), R=num("r"),
        p_diamond=num("p_diamond"),
        epsilon=num("epsilon") if merged["epsilon"] is not None else 1e-6,
        reference=merged["reference"], threads=int(threads),
        output=merged["output"])


def _print_result(res: RunResult) -> None:
    print(f"experiment      {res.experiment} [{res.discretization}]")
    print(f"recovery p      {res.recovery_p:.6g}  "
          f"(window {res.window[0]:.6g}..{res.window[1]:.6g})")
    if res.window_err is not None:
        print(f"window rel L2   {res.window_err:.6e}")
        print(f"point rel err   {res.point_err:.6e}")
    if res.measurement is not None:
        m = res.measurement
        print(f"measurement     C_e0^2/C_e^2 = {m.success_prob_ratio:.4e}, "
              f"g = {m.g:.4e}")
    if res.aux_residual is not None:
        print(f"aux block err   {res.aux_residual:.6e}")
    print(f"norm drift      {res.norm_drift:.3e}")
    for phase, secs in res.timings.items():
        print(f"time [{phase:8s}] {secs:.3f} s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "demo":
            args.experiment = args.demo_experiment
        config = _to_run_config(_merge_config(args))

        if args.command in ("solve", "demo"):
            result = run(config)
            _print_result(result)
            if config.output:
                emit_csv(result, config.output)
        elif args.command == "scan":
            exp, rec, _ = _resolve(config)
            p_dia = config.p_diamond if config.p_diamond is not None \
                else rec.p_diamond
            lo = parse_number(args.p_min) if args.p_min else max(1e-3, p_dia / 8)
            hi = parse_number(args.p_max) if args.p_max else p_dia + rec.R + 2.0
            rows = scan(config, np.linspace(lo, hi, args.points))
            best = min(rows, key=lambda r: r[1])
            print(f"scanned {len(rows)} points in [{lo:.4g}, {hi:.4g}]; "
                  f"min error {best[1]:.4e} at p = {best[0]:.4g}")
            if config.output:
                emit_csv(rows, config.output)
        elif args.command == "convergence":
            report = convergence(config, rungs=args.rungs)
            for row in report.rows:
                order = "-" if row.order is None else f"{row.order:.2f}"
                print(f"{row.label:34s} error {row.error:.6e}  order {order}")
            print(f"fitted order: {report.fitted_order:.2f}")
            if config.output:
                emit_csv(report, config.output)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SchroError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
