"""Command-line front end.

Exit status: 0 on success, 1 for invalid parameters or usage, 2 for a
numerical failure (including a failed ``verify`` check).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import checks, experiments, langevin, spectra
from .errors import NumericalError, ParameterError
from .params import load_params, params_to_mapping, validate
from .steady_state import solve_operating_point

SPECTRUM_HEADER = ("omega_over_gamma_par", "value")
SIMULATED_HEADER = ("omega_over_gamma_par", "value", "stderr")
OUTPUT_DIR_ENV = "OLM_OUTPUT_DIR"

KINDS = {
    "field": spectra.field_spectrum,
    "photon": spectra.photon_fluctuation_spectrum,
    "sigma": spectra.sigma_fluctuation_spectrum,
    "population": spectra.population_fluctuation_spectrum,
    "population-simple": spectra.simplified_population_spectrum,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- parameter handling ------------------------------------------------------

def _add_param_args(p):
    p.add_argument("--params", type=Path, help="JSON parameter file (defaults to the built-in preset)")
    p.add_argument("--pump", type=float)
    p.add_argument("--gamma-perp", type=float)
    p.add_argument("--omega-rabi", type=float)
    p.add_argument("--kappa", type=float)


def _params_from_args(args):
    if args.params is not None:
        params = load_params(args.params)
    else:
        params = experiments.preset_params(experiments.PUMP_FIELD, gamma_perp=50.0)
    overrides = {k: getattr(args, k) for k in ("pump", "gamma_perp", "omega_rabi", "kappa")
                 if getattr(args, k, None) is not None}
    if overrides:
        params = validate(replace(params, **{k: float(v) for k, v in overrides.items()}))
    return params


def _output_dir(args):
    d = getattr(args, "output_dir", None) or os.environ.get(OUTPUT_DIR_ENV) or "."
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


# -- emitters ----------------------------------------------------------------

def _fmt(x):
    return "nan" if isinstance(x, float) and math.isnan(x) else repr(float(x))


def write_table(stream, header, rows, fmt="csv"):
    if fmt == "json":
        json.dump([dict(zip(header, r)) for r in rows], stream, indent=1, default=float)
        stream.write("\n")
        return
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([c if isinstance(c, str) else _fmt(c) for c in r])


def _emit(args, header, rows, stream):
    target = getattr(args, "output", None)
    if target:
        with open(target, "w", newline="") as fh:
            write_table(fh, header, rows, args.format)
    else:
        write_table(stream, header, rows, args.format)


# -- subcommands -------------------------------------------------------------

def cmd_steady(args, out):
    params = _params_from_args(args)
    state = solve_operating_point(params)
    json.dump({"params": params_to_mapping(params), "state": state.as_dict()}, out, indent=1)
    out.write("\n")


def _grid(args, state, params):
    if args.omega_max is None:
        return spectra.default_grid(state, params, args.points)
    return spectra.FrequencyGrid.symmetric_uniform(args.omega_max, args.points)


def cmd_spectrum(args, out):
    params = _params_from_args(args)
    state = solve_operating_point(params)
    grid = _grid(args, state, params)
    if args.kind == "conv":
        spec = spectra.field_population_convolution(
            spectra.field_spectrum(state, params, grid),
            spectra.population_fluctuation_spectrum(state, params, grid))
    else:
        spec = KINDS[args.kind](state, params, grid)
    _emit(args, SPECTRUM_HEADER, zip(spec.omega, spec.values), out)


def cmd_variance(args, out):
    params = _params_from_args(args)
    dec = spectra.population_variance_decomposition(solve_operating_point(params), params)
    json.dump(dec.as_dict(), out, indent=1)
    out.write("\n")


def cmd_sweep(args, out):
    params = _params_from_args(args)
    spec = experiments.SweepSpec(args.variable, args.start, args.stop, args.step)
    base = params_to_mapping(params)
    rows = experiments.sweep(spec, args.quantity, base, workers=args.workers)
    _emit(args, (args.variable, args.quantity, "reason"), [(r.value, r.result, r.reason) for r in rows], out)


def cmd_figure(args, out):
    job = experiments.FIGURES[experiments.FigureId(args.id)]
    folder = _output_dir(args)
    written = []
    meta = {"figure_id": job.figure_id.value, "x": job.x_label, "curves": []}
    for k, data in enumerate(experiments.run_figure(job), start=1):
        path = folder / f"{job.figure_id.value}_curve{k}.{args.format}"
        header = (job.x_label, *data.columns)
        rows = zip(data.x, *data.columns.values())
        with open(path, "w", newline="") as fh:
            write_table(fh, header, rows, args.format)
        written.append(str(path))
        meta["curves"].append({"curve": k, "label": data.curve.label, "file": path.name,
                               "pump": data.curve.pump, "sr_ratio": str(data.curve.sr_ratio),
                               "gamma_perp": experiments.gamma_perp_for_ratio(data.curve.sr_ratio)})
    (folder / f"{job.figure_id.value}.json").write_text(json.dumps(meta, indent=1) + "\n")
    for p in written:
        out.write(p + "\n")


def cmd_verify(args, out):
    results = checks.run_checks(include_figures=args.all, include_monte_carlo=args.monte_carlo)
    report = [r.as_dict() for r in results]
    if not args.detail:
        for r in report:
            r.pop("detail")
    json.dump(report, out, indent=1, default=float)
    out.write("\n")
    return 0 if all(r.passed for r in results) else 2


def cmd_simulate(args, out):
    params = _params_from_args(args)
    state = solve_operating_point(params)
    system = langevin.build_binary_system(state, params)
    n_steps = args.segment * (args.segments + 1) // 2 * args.record_every
    ens = langevin.simulate_time_domain(system, args.dt, n_steps, args.trajectories, args.seed,
                                        record_every=args.record_every, channels=(args.channel,))
    spec = langevin.welch_spectrum(ens, args.segment, 0.5, channel=args.channel)
    _emit(args, SIMULATED_HEADER, zip(spec.omega, spec.values, spec.stderr), out)


def build_parser():
    p = _Parser(prog="olm", description="Oscillator-laser model: steady states, spectra and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("steady", help="solve the stationary operating point")
    _add_param_args(s)
    s.set_defaults(func=cmd_steady)

    s = sub.add_parser("spectrum", help="evaluate a closed-form spectrum on a grid")
    _add_param_args(s)
    s.add_argument("--kind", required=True, choices=[*KINDS, "conv"])
    s.add_argument("--omega-max", type=float)
    s.add_argument("--points", type=int, default=2048)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--output", type=Path)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("variance", help="population variance and its two parts")
    _add_param_args(s)
    s.set_defaults(func=cmd_variance)

    s = sub.add_parser("sweep", help="scan one parameter and tabulate a scalar")
    _add_param_args(s)
    s.add_argument("--variable", required=True, choices=experiments.SWEEP_VARIABLES)
    s.add_argument("--start", type=float, required=True)
    s.add_argument("--stop", type=float, required=True)
    s.add_argument("--step", type=float, required=True)
    s.add_argument("--quantity", default="n", choices=experiments.QUANTITIES)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--output", type=Path)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("figure", help="write the curves of a preset figure")
    s.add_argument("--id", required=True, choices=[f.value for f in experiments.FigureId])
    s.add_argument("--output-dir", type=Path)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_figure)

    s = sub.add_parser("verify", help="run the oracle checks and print a JSON report")
    s.add_argument("--all", action="store_true", help="also run the figure-feature checks")
    s.add_argument("--monte-carlo", action="store_true", help="also run the Monte Carlo check (slow)")
    s.add_argument("--detail", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="Monte Carlo Welch spectrum of the binary fluctuation system")
    _add_param_args(s)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trajectories", type=int, default=200)
    s.add_argument("--dt", type=float, default=5e-5)
    s.add_argument("--record-every", type=int, default=10)
    s.add_argument("--segment", type=int, default=2000, help="samples per Welch segment")
    s.add_argument("--segments", type=int, default=15)
    s.add_argument("--channel", choices=("n", "sigma", "d"), default="n")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--output", type=Path)
    s.set_defaults(func=cmd_simulate)
    return p


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI and return the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        status = args.func(args, stdout)
        return status or 0
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 1
    except NumericalError as exc:
        stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 2
    except (ParameterError, ValueError, OSError) as exc:
        stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
