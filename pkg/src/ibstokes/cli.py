"""Command-line driver.

Subcommands: run (single run or preset group), convergence (temporal
refinement study), sweep (stability verdict matrix), cost (per-step scaling
report), presets (list names).  Exit codes: 0 clean, 2 instability detected,
3 solver failure, 64 usage error.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import diagnostics, schemes, spectral, stokes
from .errors import BlowupError, IBStokesError, ParameterError, SolverStallError
from .io import (RunConfig, load_run_config, output_dir, save_snapshot,
                 write_diagnostics_csv)
from .presets import PRESETS

EXIT_OK = 0
EXIT_UNSTABLE = 2
EXIT_SOLVER = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _parse_number(text):
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _parse_assignments(pairs):
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ParameterError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        from .io import _parse_value
        out[key.strip()] = _parse_value(value)
    return out


def _ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def execute_run(config, out_dir):
    """Run one simulation, writing diagnostics CSV and snapshots.

    Returns (exit_code, records).
    """
    phys = config.phys()
    grid = config.grid()
    cfg = config.scheme_config()
    state = schemes.initial_state(phys, grid, a=config.ellipse_a, b=config.ellipse_b,
                                  center=(config.center_x, config.center_y))
    records = [diagnostics.record_state(state, phys, grid)]
    name = config.run_name()
    code = EXIT_OK
    n_steps = config.n_steps()
    try:
        for k in range(n_steps):
            state = schemes.step(state, phys, grid, cfg)
            records.append(diagnostics.record_state(state, phys, grid))
            if config.snapshot_every and (k + 1) % config.snapshot_every == 0:
                save_snapshot(os.path.join(out_dir, f"{name}-step{k + 1}.json"),
                              state, config)
    except BlowupError:
        records.append(diagnostics.DiagnosticsRecord(
            records[-1].step + 1, np.nan, np.nan, np.nan, np.nan, np.nan,
            np.nan, np.nan, np.nan, stable=False))
        code = EXIT_UNSTABLE
    except SolverStallError:
        code = EXIT_SOLVER
    else:
        save_snapshot(os.path.join(out_dir, f"{name}-final.json"), state, config)
    write_diagnostics_csv(os.path.join(out_dir, f"{name}.csv"), records)
    return code, records


def cmd_run(args):
    overrides = _parse_assignments(args.set)
    if args.preset:
        if args.preset not in PRESETS:
            raise ParameterError(f"unknown preset {args.preset!r}; try 'ibstokes presets'")
        configs = [load_run_config(None, {**c.__dict__, **overrides})
                   for c in PRESETS[args.preset]]
    else:
        configs = [load_run_config(args.config, overrides)]
    out = _ensure_dir(args.out or output_dir(configs[0]))
    worst = EXIT_OK
    for config in configs:
        code, records = execute_run(config, out)
        verdict = {EXIT_OK: "clean", EXIT_UNSTABLE: "unstable", EXIT_SOLVER: "solver-failed"}[code]
        print(f"{config.run_name()}: {verdict}, {len(records) - 1} steps, "
              f"E {records[0].total:.6g} -> {records[-1].total:.6g}")
        worst = max(worst, code)
    return worst


def cmd_convergence(args):
    overrides = _parse_assignments(args.set)
    dts = [_parse_number(x) for x in args.dts.split(",")]
    base = load_run_config(args.config, overrides)
    phys = base.phys()
    grid = base.grid()

    def run_fn(dt):
        cfg = schemes.SchemeConfig(scheme=base.scheme, dt=dt, tol=base.tol,
                                   rescale=base.rescale,
                                   steady_velocity=base.steady_velocity,
                                   dealias=base.dealias)
        st = schemes.initial_state(phys, grid, a=base.ellipse_a, b=base.ellipse_b,
                                   center=(base.center_x, base.center_y))
        for s in schemes.simulate(st, phys, grid, cfg, int(round(base.t_end / dt))):
            st = s
        out = {"X": (st.curve.as_array(), st.interface.dalpha)}
        if st.fluid is not None:
            out["u"] = (np.stack([st.fluid.u, st.fluid.v], -1), grid.h**2)
        return out

    try:
        study = diagnostics.run_convergence_study(run_fn, dts)
    except BlowupError:
        print("convergence study aborted: a run blew up", file=sys.stderr)
        return EXIT_UNSTABLE
    out = _ensure_dir(args.out or output_dir(base))
    stem = os.path.join(out, f"convergence-{base.run_name()}")
    with open(stem + ".csv", "w") as fh:
        fh.write("observable,dt,error\n")
        for name, d in study.items():
            for dt, err in zip(d["dts"], d["errors"]):
                fh.write(f"{name},{format(dt, '.17g')},{format(err, '.17g')}\n")
    summary = {name: {"rate": d["rate"], "pair_rates": d["pair_rates"],
                      "dts": d["dts"], "errors": d["errors"]}
               for name, d in study.items()}
    with open(stem + ".json", "w") as fh:
        json.dump(summary, fh, indent=1)
    for name, d in study.items():
        print(f"{name}: rate {d['rate']:.3f} (pairs {['%.2f' % r for r in d['pair_rates']]})")
    return EXIT_OK


def cmd_sweep(args):
    overrides = _parse_assignments(args.set)
    base = load_run_config(args.config, overrides)
    ns = [int(x) for x in args.n_list.split(",")]
    dts = [_parse_number(x) for x in args.dt_list.split(",")] if args.dt_list else []
    out = _ensure_dir(args.out or output_dir(base))
    path = os.path.join(out, f"sweep-{base.scheme}.csv")
    verdicts = {}
    for n in ns:
        for dt in dts:
            config = load_run_config(None, {**base.__dict__, "n": n, "n_boundary": None,
                                            "dt": dt, "label": ""})
            phys, grid, cfg = config.phys(), config.grid(), config.scheme_config()
            st = schemes.initial_state(phys, grid, a=config.ellipse_a, b=config.ellipse_b,
                                       center=(config.center_x, config.center_y))
            verdict, _, _ = diagnostics.stability_probe(st, phys, grid, cfg, config.n_steps())
            verdicts[(n, dt)] = verdict
            print(f"N={n} dt={dt:g}: {verdict}")
    with open(path, "w") as fh:
        fh.write("dt\\N," + ",".join(str(n) for n in ns) + "\n")
        for dt in dts:
            fh.write(format(dt, "g") + ","
                     + ",".join(verdicts[(n, dt)] for n in ns) + "\n")
        largest = []
        for n in ns:
            stable = [dt for dt in dts if verdicts[(n, dt)] == "stable"]
            largest.append(format(max(stable), "g") if stable else "none")
        fh.write("largest_stable," + ",".join(largest) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_cost(args):
    overrides = _parse_assignments(args.set)
    base = load_run_config(args.config, overrides)
    names = args.schemes.split(",")
    ns = [int(x) for x in args.n_list.split(",")]
    rows = []
    for scheme in names:
        times = []
        for n in ns:
            config = load_run_config(None, {**base.__dict__, "scheme": scheme, "n": n,
                                            "n_boundary": None, "label": ""})
            phys, grid, cfg = config.phys(), config.grid(), config.scheme_config()
            st = schemes.initial_state(phys, grid)
            st = schemes.step(st, phys, grid, cfg)  # warm up, sets rescaling
            spectral.reset_counters()
            stokes.reset_counters()
            t0 = time.perf_counter()
            for _ in range(args.steps):
                st = schemes.step(st, phys, grid, cfg)
            per_step = (time.perf_counter() - t0) / args.steps
            row = {"scheme": scheme, "n": n, "seconds_per_step": per_step,
                   "fft_per_step": spectral.counters["fft"] / args.steps,
                   "fluid_solves_per_step": stokes.counters["fluid_solves"] / args.steps,
                   "dense_solves_per_step": stokes.counters["dense_solves"] / args.steps}
            rows.append(row)
            times.append(per_step)
            print(f"{scheme} N={n}: {per_step * 1e3:.2f} ms/step, "
                  f"{row['fluid_solves_per_step']:.0f} fluid solves/step")
        if len(ns) >= 2:
            slope = np.polyfit(np.log(ns), np.log(times), 1)[0]
            print(f"{scheme}: wall-time exponent in N = {slope:.2f}")
            rows.append({"scheme": scheme, "n": "exponent", "seconds_per_step": slope,
                         "fft_per_step": "", "fluid_solves_per_step": "",
                         "dense_solves_per_step": ""})
    out = _ensure_dir(args.out or output_dir(base))
    path = os.path.join(out, "cost.csv")
    with open(path, "w") as fh:
        fh.write("scheme,n,seconds_per_step,fft_per_step,fluid_solves_per_step,dense_solves_per_step\n")
        for r in rows:
            fh.write(",".join(str(r[k]) for k in
                              ("scheme", "n", "seconds_per_step", "fft_per_step",
                               "fluid_solves_per_step", "dense_solves_per_step")) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_presets(args):
    for name, runs in PRESETS.items():
        labels = ", ".join(r.run_name() for r in runs[:4])
        more = "" if len(runs) <= 4 else f", ... ({len(runs)} runs)"
        print(f"{name}: {labels}{more}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="ibstokes",
                     description="Elastic interface in 2D periodic Stokes flow")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one run or a preset group")
    run.add_argument("--config", help="key = value config file")
    run.add_argument("--preset", help="named experiment group")
    run.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a config key (repeatable)")
    run.add_argument("--out", help="output directory")
    run.set_defaults(func=cmd_run)

    conv = sub.add_parser("convergence", help="temporal convergence study")
    conv.add_argument("--config", help="base config file")
    conv.add_argument("--dts", required=True,
                      help="comma-separated halving chain, e.g. 1/16,1/32,1/64")
    conv.add_argument("--set", action="append", metavar="KEY=VALUE")
    conv.add_argument("--out")
    conv.set_defaults(func=cmd_convergence)

    sweep = sub.add_parser("sweep", help="stability verdict matrix")
    sweep.add_argument("--config", help="base config file")
    sweep.add_argument("--n-list", required=True, help="comma-separated grid sizes")
    sweep.add_argument("--dt-list", default="", help="comma-separated timesteps")
    sweep.add_argument("--set", action="append", metavar="KEY=VALUE")
    sweep.add_argument("--out")
    sweep.set_defaults(func=cmd_sweep)

    cost = sub.add_parser("cost", help="per-step cost scaling report")
    cost.add_argument("--config", help="base config file")
    cost.add_argument("--schemes", required=True, help="comma-separated scheme names")
    cost.add_argument("--n-list", required=True)
    cost.add_argument("--steps", type=int, default=3)
    cost.add_argument("--set", action="append", metavar="KEY=VALUE")
    cost.add_argument("--out")
    cost.set_defaults(func=cmd_cost)

    pre = sub.add_parser("presets", help="list preset names")
    pre.set_defaults(func=cmd_presets)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverStallError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except BlowupError as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except IBStokesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
