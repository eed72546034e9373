"""Command-line front end: sample / theory / estimate / verify / reproduce-figures.

Exit codes: 0 success, 1 usage or validation error, 2 failed verification.
Every run logs the package version, the full argument echo and the master
seed to stderr, which is enough to replay it exactly.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__, estimators, samplers, theory
from .config import ExperimentConfig, dumps_config, load_config, parse_grid_spec
from .core import (
    ConfigError,
    DiffLabError,
    GridFunction,
    SeedSpec,
    Window,
    read_point_set,
    write_grid_function,
    write_point_set,
)
from .specfun import WaitingDistribution
from .verify import run_experiment

log = logging.getLogger("difflab")


def _parse_window(spec: str) -> Window:
    try:
        kind, size = spec.split(":")
        return Window(kind, float(size))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"window: expected 'kind:size', got {spec!r}") from exc


def _parse_mu(spec: str) -> WaitingDistribution:
    head, _, rest = spec.partition(":")
    if head == "exponential":
        return WaitingDistribution.exponential()
    if head == "gamma":
        return WaitingDistribution.gamma(float(rest))
    if head == "uniform":
        a, b = rest.split(",")
        return WaitingDistribution.uniform(float(a), float(b))
    if head == "discrete":
        atoms = []
        for item in rest.split(","):
            loc, _, prob = item.partition("=")
            atoms.append((Fraction(loc), float(prob)))
        return WaitingDistribution.discrete(atoms)
    raise ConfigError(f"mu: unknown kind {head!r}")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="difflab")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw point-set realisations")
    p.add_argument("--model", required=True,
                   choices=["poisson", "marked-poisson", "matern", "renewal", "beta", "ginibre"])
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--window", default=None, help="kind:size, e.g. interval:10000 or disk:50")
    p.add_argument("--mu", default=None, help="exponential | gamma:SHAPE | uniform:A,B | discrete:LOC=P,...")
    p.add_argument("--hard-core", type=float, default=0.1, dest="hard_core")
    p.add_argument("--beta", type=int, default=2, choices=[1, 2, 4])
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--keep", type=float, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("theory", help="evaluate closed-form curves")
    p.add_argument("--model", required=True,
                   choices=["poisson", "marked-poisson", "renewal", "dyson", "ginibre"])
    p.add_argument("--stat", required=True, choices=["autocorrelation", "diffraction"])
    p.add_argument("--grid", required=True, help="min:max:n (inclusive endpoints)")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--mu", default=None)
    p.add_argument("--beta", type=int, default=2, choices=[1, 2, 4])
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate", help="estimate a statistic from a point-set CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--stat", required=True, choices=["paircorr", "diffraction"])
    p.add_argument("--grid", required=True)
    p.add_argument("--banded", action="store_true",
                   help="average the periodogram over the Fourier modes of each grid cell")
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="run a configured experiment end to end")
    p.add_argument("--config", required=True)
    p.add_argument("--report", default=None, help="directory for report.json and curves")
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("reproduce-figures", help="emit the figure curve bundles")
    p.add_argument("--out", required=True)
    return top


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _cmd_sample(args) -> int:
    mu = _parse_mu(args.mu) if args.mu else None
    keep_default = {"beta": 0.1, "ginibre": 0.5}
    keep = args.keep if args.keep is not None else keep_default.get(args.model, 0.5)
    for index in range(args.replicas):
        seed = SeedSpec(args.seed, index)
        if args.model in ("poisson", "marked-poisson", "matern", "renewal"):
            if args.window is None:
                raise ConfigError("window: required for this model")
            window = _parse_window(args.window)
        if args.model == "poisson":
            out = samplers.sample_poisson(args.rho, window, seed)
        elif args.model == "marked-poisson":
            out = samplers.mark_pm1(samplers.sample_poisson(args.rho, window, seed), seed)
        elif args.model == "matern":
            out = samplers.matern2_thin(
                samplers.sample_poisson(args.rho, window, seed), args.hard_core, seed
            )
        elif args.model == "renewal":
            if mu is None:
                raise ConfigError("mu: required for the renewal model")
            out = samplers.sample_renewal(mu, window, seed)
        elif args.model == "beta":
            out = samplers.sample_beta_bulk(args.beta, args.n, keep, seed)
        else:
            out = samplers.sample_ginibre(args.n, keep, seed)
        path = args.out
        if args.replicas > 1:
            stem, ext = os.path.splitext(args.out)
            path = f"{stem}-r{index:03d}{ext or '.csv'}"
        write_point_set(out, path)
        log.info("wrote %s (%d points)", path, len(out))
    return 0


def _theory_eval(args, grid: np.ndarray):
    """(values, atoms) for the theory subcommand."""
    if args.model == "poisson":
        auto, diff = theory.poisson_theory(args.rho)
    elif args.model == "marked-poisson":
        auto, diff = theory.marked_poisson_theory(args.rho)
    elif args.model == "ginibre":
        auto, diff = theory.ginibre_theory()
    elif args.model == "dyson":
        auto, diff = theory.dyson_theory(args.beta)
    else:  # renewal
        if args.mu is None:
            raise ConfigError("mu: required for the renewal model")
        mu = _parse_mu(args.mu)
        pp = theory.renewal_pure_point(mu)
        if args.stat == "diffraction":
            values = 1.0 - theory.renewal_backscatter(mu, grid)
            atoms = [(float(k), 1.0) for k in pp.atom_locations(grid[-1])]
            return values, atoms
        nu = theory.renewal_nu_density(mu, r_max=float(grid[-1]) + 1.0)
        if isinstance(nu, GridFunction):
            values = np.interp(grid, nu.grid, nu.values)
            return values, [(0.0, 1.0)]
        return np.zeros_like(grid), [(0.0, 1.0)] + [(float(l), w) for l, w in nu]
    measure = auto if args.stat == "autocorrelation" else diff
    return measure.ac(np.abs(grid)), [(float(np.atleast_1d(l)[0]), i) for l, i in measure.atoms]


def _cmd_theory(args) -> int:
    grid = parse_grid_spec(args.grid)
    try:
        values, atoms = _theory_eval(args, grid)
    except (theory.SingularPoint, DiffLabError) as exc:
        raise ConfigError(f"grid: {exc}") from exc
    write_grid_function(GridFunction(grid, values), args.out)
    sidecar = os.path.splitext(args.out)[0] + ".atoms.json"
    with open(sidecar, "w") as fh:
        json.dump({"atoms": [[loc, inten] for loc, inten in atoms]}, fh, indent=2)
        fh.write("\n")
    log.info("wrote %s and %s", args.out, sidecar)
    return 0


def _cmd_estimate(args) -> int:
    data = read_point_set(args.infile)
    grid = parse_grid_spec(args.grid)
    base = data.base if hasattr(data, "base") else data
    if args.stat == "paircorr":
        spacing = grid[1] - grid[0] if len(grid) > 1 else grid[0]
        lo = np.clip(grid - spacing / 2.0, 0.0, None)
        hi = grid + spacing / 2.0
        if base.dimension == 1:
            out = estimators._pair_corr_1d_cells(base, grid, lo, hi)
        else:
            out = estimators._pair_corr_2d_cells(base, grid, lo, hi)
    else:
        if base.dimension == 1:
            fn = estimators.banded_periodogram_1d if args.banded else estimators.periodogram_1d
            out = fn(data, grid)
        else:
            fn = (
                estimators.banded_periodogram_radial_2d
                if args.banded
                else estimators.periodogram_radial_2d
            )
            out = fn(data, grid)
    write_grid_function(out, args.out)
    log.info("wrote %s", args.out)
    return 0


def _cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.threads is not None:
        cfg.threads = args.threads
    log.info("config:\n%s", dumps_config(cfg))
    log.info("master seed: %d", cfg.master_seed)
    report = run_experiment(cfg, out_dir=args.report)
    print(report.to_json())
    return 0 if report.passed else 2


def _cmd_figures(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    r = np.linspace(0.0, 4.0, 801)
    for beta in (1, 2, 4):
        write_grid_function(
            GridFunction(r, 1.0 - theory.dyson_f(beta, r)),
            os.path.join(args.out, f"fig1_autocorrelation_beta{beta}.csv"),
        )
    # cell-centre grid: never hits the beta=4 singularity at k = 1
    k = (np.arange(600) + 0.5) * (3.0 / 600.0)
    for beta in (1, 2, 4):
        write_grid_function(
            GridFunction(k, theory.dyson_h(beta, k)),
            os.path.join(args.out, f"fig1_diffraction_beta{beta}.csv"),
        )
    t = np.linspace(0.0, 2.5, 501)
    write_grid_function(
        GridFunction(t, theory.ginibre_g(t)), os.path.join(args.out, "fig2_radial.csv")
    )
    stub = """# gnuplot stub for the figure bundles in this directory
set datafile separator ','
set key top right
set xlabel 'r'
plot for [b in "1 2 4"] sprintf('fig1_autocorrelation_beta%s.csv', b) \\
     every ::1 using 1:2 with lines title sprintf('beta=%s', b)
pause -1
set xlabel 'k'
set yrange [0:2.5]
plot for [b in "1 2 4"] sprintf('fig1_diffraction_beta%s.csv', b) \\
     every ::1 using 1:2 with lines title sprintf('beta=%s', b)
pause -1
set xlabel 't'
set yrange [0:1.1]
plot 'fig2_radial.csv' every ::1 using 1:2 with lines title 'autocorrelation = diffraction'
pause -1
"""
    with open(os.path.join(args.out, "plot.gp"), "w") as fh:
        fh.write(stub)
    log.info("wrote figure bundles to %s", args.out)
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="difflab: %(message)s", stream=sys.stderr)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    log.info("version %s | %s", __version__, " ".join(sys.argv[1:] if argv is None else argv))
    handlers = {
        "sample": _cmd_sample,
        "theory": _cmd_theory,
        "estimate": _cmd_estimate,
        "verify": _cmd_verify,
        "reproduce-figures": _cmd_figures,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, DiffLabError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
