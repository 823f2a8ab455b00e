"""Command-line front end: point evaluations, optimization, simulation, sweeps.

Exit codes: 0 success, 2 usage error (a named invariant is violated),
3 numerical failure from the solvers.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional

import numpy as np

from . import __version__
from .age import age_of
from .levels import Infeasible, NoConvergence
from .optimize import OptResult, opt_mds, opt_mm_mds, opt_repetition
from .schemes import (
    MDS,
    DegenerateLevels,
    MultiMDS,
    Repetition,
    Scheme,
    SystemParams,
    Uncoded,
    mm_level_split,
    validate,
)
from .simulate import run_parallel

CSV_COLUMNS = ["scheme", "n", "k", "l", "lambda", "c", "mu", "es", "es2",
               "age_analytic", "age_sim_mean", "age_sim_ci95", "k1"]

PRESETS = {
    "fig4a": {"kind": "k", "n": 100, "lambda": 1.0, "c": 1.0, "mu": 1.0},
    "fig4b": {"kind": "k", "n": 100, "lambda": 1.0, "c": 1.0, "mu": 0.5},
    "fig5a": {"kind": "n", "l": 2, "lambda": 1.0, "c": 1.0, "mu": 1.0,
              "n_values": list(range(100, 1001, 100))},
    "fig5b": {"kind": "l", "n": 100, "lambda": 1.0, "c": 1.0, "mu": 0.01,
              "l_values": [1, 2, 3, 4, 5]},
}


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="coded-aoi")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def add_params(p):
        p.add_argument("--lambda", dest="lambd", type=float, help="update transmission rate")
        p.add_argument("--c", type=float, help="whole-task runtime shift")
        p.add_argument("--mu", type=float, help="whole-task straggling rate")
        p.add_argument("--n", type=int, help="number of workers")
        p.add_argument("--config", help="JSON file with defaults for any flag")

    p_age = sub.add_parser("age", help="analytic age of one scheme")
    add_params(p_age)
    p_age.add_argument("--scheme", choices=["uncoded", "repetition", "mds", "mm-mds"])
    p_age.add_argument("--k", type=int)
    p_age.add_argument("--l", type=int, dest="load", help="subtasks per worker (mm-mds)")

    p_opt = sub.add_parser("optimize", help="age-optimal code parameter")
    add_params(p_opt)
    p_opt.add_argument("--family", choices=["rep", "mds", "mm-mds"])
    p_opt.add_argument("--l", type=int, dest="load")
    p_opt.add_argument("--objective", choices=["age", "service"])

    p_sim = sub.add_parser("simulate", help="Monte Carlo estimate of the age")
    add_params(p_sim)
    p_sim.add_argument("--scheme", choices=["uncoded", "repetition", "mds", "mm-mds"])
    p_sim.add_argument("--k", type=int)
    p_sim.add_argument("--l", type=int, dest="load")
    p_sim.add_argument("--cycles", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--reps", type=int)
    p_sim.add_argument("--mode", choices=["fast", "full-stream"])
    p_sim.add_argument("--policy", choices=["zero-wait", "return-triggered"])

    p_sw = sub.add_parser("sweep", help="parameter sweep written as CSV")
    add_params(p_sw)
    p_sw.add_argument("--preset", choices=sorted(PRESETS))
    p_sw.add_argument("--scheme", choices=["uncoded", "repetition", "mds", "mm-mds"])
    p_sw.add_argument("--k", type=int)
    p_sw.add_argument("--l", type=int, dest="load")
    p_sw.add_argument("--k-range", dest="k_range", help="A:B[:STEP], inclusive")
    p_sw.add_argument("--n-range", dest="n_range", help="A:B[:STEP], inclusive")
    p_sw.add_argument("--l-range", dest="l_range", help="A:B[:STEP], inclusive")
    p_sw.add_argument("--out", help="output CSV path")
    p_sw.add_argument("--seed", type=int)
    p_sw.add_argument("--cycles", type=int, help="add a simulation overlay")
    p_sw.add_argument("--reps", type=int)
    return top


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the JSON config file, if one was given."""
    path = getattr(args, "config", None)
    if not path:
        return args
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config {path}: {e}")
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    aliases = {"lambda": "lambd", "l": "load", "k-range": "k_range",
               "n-range": "n_range", "l-range": "l_range"}
    for key, value in cfg.items():
        dest = aliases.get(key, key.replace("-", "_"))
        if not hasattr(args, dest):
            raise UsageError(f"config key {key!r} is not a flag of this command")
        if getattr(args, dest) is None:
            setattr(args, dest, value)
    return args


def _need(args, name: str, flag: Optional[str] = None):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"missing required flag --{flag or name}")
    return value


def _params(args) -> SystemParams:
    return SystemParams(
        arrival_rate=_need(args, "lambd", "lambda"),
        shift=_need(args, "c"),
        straggling=_need(args, "mu"),
        nworkers=_need(args, "n"),
    )


def _scheme(args) -> Scheme:
    name = _need(args, "scheme")
    if name == "uncoded":
        return Uncoded()
    if name == "repetition":
        return Repetition(_need(args, "k"))
    if name == "mds":
        return MDS(_need(args, "k"))
    return MultiMDS(_need(args, "k"), _need(args, "load", "l"))


def _scheme_label(scheme: Scheme) -> str:
    return {Uncoded: "uncoded", Repetition: "repetition",
            MDS: "mds", MultiMDS: "mm-mds"}[type(scheme)]


def cmd_age(args) -> int:
    params = _params(args)
    scheme = _scheme(args)
    validate(scheme, params)
    res = age_of(scheme, params)
    print(f"scheme={_scheme_label(scheme)} n={params.nworkers} "
          f"lambda={_fmt(params.arrival_rate)} c={_fmt(params.shift)} mu={_fmt(params.straggling)}")
    print(f"age={_fmt(res.delta)} es={_fmt(res.es)} es2={_fmt(res.es2)}")
    return 0


def cmd_optimize(args) -> int:
    params = _params(args)
    family = _need(args, "family")
    objective = args.objective or "age"
    if family == "rep":
        res = opt_repetition(params, objective)
    elif family == "mds":
        res = opt_mds(params, objective)
    else:
        res = opt_mm_mds(params, _need(args, "load", "l"), objective)
    line = (f"family={family} k_star={res.k_star} alpha_star={_fmt(res.alpha_star)} "
            f"delta_star={_fmt(res.delta_star)} es_continuous={_fmt(res.continuous_objective)}")
    if res.levels is not None:
        line += " levels=" + ",".join(str(c) for c in res.levels)
    print(line)
    return 0


def cmd_simulate(args) -> int:
    params = _params(args)
    scheme = _scheme(args)
    validate(scheme, params, sampling=True)
    cycles = _need(args, "cycles")
    seed = _need(args, "seed")
    reps = args.reps or 1
    mode = (args.mode or "fast").replace("-", "_")
    policy = args.policy or "zero-wait"
    rep = run_parallel(scheme, params, cycles, reps, seed, mode=mode, policy=policy)
    print(f"scheme={_scheme_label(scheme)} mode={mode} policy={policy} "
          f"cycles={rep.cycles} reps={reps} seed={rep.seed}")
    parts = [f"mean_age={_fmt(rep.mean_age)}", f"ci95={_fmt(rep.ci95_halfwidth)}",
             f"es={_fmt(rep.empirical_es)}", f"es2={_fmt(rep.empirical_es2)}",
             f"ed={_fmt(rep.empirical_ed)}", f"ez={_fmt(rep.empirical_ez)}"]
    if rep.dropped_fraction is not None:
        parts.append(f"dropped={_fmt(rep.dropped_fraction)}")
    print(" ".join(parts))
    return 0


def _parse_range(text: str, flag: str) -> list[int]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"--{flag} must look like A:B or A:B:STEP, got {text!r}")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"--{flag} must hold integers, got {text!r}")
    step = nums[2] if len(nums) == 3 else 1
    if step < 1 or nums[1] < nums[0]:
        raise UsageError(f"--{flag} must be a nonempty forward range, got {text!r}")
    return list(range(nums[0], nums[1] + 1, step))


def _row(scheme: Scheme, params: SystemParams, k1: Optional[int] = None) -> dict:
    res = age_of(scheme, params)
    row = {c: "" for c in CSV_COLUMNS}
    row.update({
        "scheme": _scheme_label(scheme),
        "n": params.nworkers,
        "lambda": _fmt(params.arrival_rate),
        "c": _fmt(params.shift),
        "mu": _fmt(params.straggling),
        "es": _fmt(res.es),
        "es2": _fmt(res.es2),
        "age_analytic": _fmt(res.delta),
    })
    if isinstance(scheme, (Repetition, MDS, MultiMDS)):
        row["k"] = scheme.k
    if isinstance(scheme, MultiMDS):
        row["l"] = scheme.load
        row["k1"] = k1 if k1 is not None else mm_level_split(params, scheme.k, scheme.load)[0]
    return row


def _sweep_rows(args) -> tuple[list[tuple[Scheme, SystemParams]], dict]:
    """Expand a preset or a custom range into (scheme, params) grid points."""
    if args.preset:
        preset = PRESETS[args.preset]
        meta = {"preset": args.preset}
        rows = []
        if preset["kind"] == "k":
            p = SystemParams(preset["lambda"], preset["c"], preset["mu"], preset["n"])
            rows.append((Uncoded(), p))
            rows.extend((Repetition(k), p) for k in range(1, p.nworkers + 1))
            rows.extend((MDS(k), p) for k in range(1, p.nworkers))
        elif preset["kind"] == "n":
            for n in preset["n_values"]:
                p = SystemParams(preset["lambda"], preset["c"], preset["mu"], n)
                res = opt_mm_mds(p, preset["l"])
                rows.append((MultiMDS(res.k_star, preset["l"]), p))
        else:
            p = SystemParams(preset["lambda"], preset["c"], preset["mu"], preset["n"])
            for load in preset["l_values"]:
                res = opt_mm_mds(p, load)
                rows.append((MultiMDS(res.k_star, load), p))
        return rows, meta

    ranges = [r for r in (args.k_range, args.n_range, args.l_range) if r]
    if len(ranges) != 1:
        raise UsageError("custom sweep needs exactly one of --k-range/--n-range/--l-range "
                         "(or use --preset)")
    scheme_name = _need(args, "scheme")
    meta = {"scheme": scheme_name}
    rows = []
    if args.k_range:
        p = _params(args)
        for k in _parse_range(args.k_range, "k-range"):
            rows.append((_scheme_for(scheme_name, k, args), p))
    elif args.n_range:
        for n in _parse_range(args.n_range, "n-range"):
            p = SystemParams(_need(args, "lambd", "lambda"), _need(args, "c"),
                             _need(args, "mu"), n)
            k = None if scheme_name == "uncoded" else _need(args, "k")
            rows.append((_scheme_for(scheme_name, k, args), p))
    else:
        if scheme_name != "mm-mds":
            raise UsageError("--l-range only applies to --scheme mm-mds")
        p = _params(args)
        for load in _parse_range(args.l_range, "l-range"):
            rows.append((MultiMDS(_need(args, "k"), load), p))
    return rows, meta


def _scheme_for(name: str, k: Optional[int], args) -> Scheme:
    if name == "uncoded":
        return Uncoded()
    if name == "repetition":
        return Repetition(k)
    if name == "mds":
        return MDS(k)
    return MultiMDS(k, _need(args, "load", "l"))


def cmd_sweep(args) -> int:
    seed = _need(args, "seed")
    rows, meta = _sweep_rows(args)
    for scheme, params in rows:
        validate(scheme, params)

    out = args.out or (f"{args.preset}.csv" if args.preset else "sweep.csv")
    overlay = args.cycles is not None
    reps = args.reps or 1
    row_seeds = np.random.SeedSequence(seed).generate_state(max(len(rows), 1), np.uint64)

    have_repetition = any(isinstance(s, Repetition) for s, _ in rows)
    lines = [f"# coded-aoi sweep v{__version__}"]
    meta_str = " ".join(f"{k}={v}" for k, v in meta.items())
    lines.append(f"# {meta_str} seed={seed} cycles={args.cycles or '-'} reps={reps}")
    if have_repetition:
        lines.append("# note: repetition rows with k not dividing n are analytic-only "
                     "(the sampler needs k | n)")

    try:
        fh = open(out, "w", newline="")
    except OSError as e:
        print(f"error: cannot write {out}: {e}", file=sys.stderr)
        return 2
    with fh:
        for line in lines:
            fh.write(line + "\n")
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for i, (scheme, params) in enumerate(rows):
            row = _row(scheme, params)
            if overlay:
                samplable = not (isinstance(scheme, Repetition)
                                 and params.nworkers % scheme.k != 0)
                if samplable:
                    rep = run_parallel(scheme, params, args.cycles, reps,
                                       int(row_seeds[i]))
                    row["age_sim_mean"] = _fmt(rep.mean_age)
                    row["age_sim_ci95"] = _fmt(rep.ci95_halfwidth)
            writer.writerow(row)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {"age": cmd_age, "optimize": cmd_optimize,
               "simulate": cmd_simulate, "sweep": cmd_sweep}[args.command]
    try:
        return handler(_apply_config(args))
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (Infeasible, NoConvergence, DegenerateLevels) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
