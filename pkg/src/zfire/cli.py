"""Command-line front end.

Subcommands: simulate (one run), ensemble (replicated runs and verification
experiments), analytic (closed-form/numeric tables), couple (sheared
coupling test), render (SVG graphic representation).  Data goes to files
under --out (overridden by ZFIRE_OUT); diagnostics go to stderr.  Exit
codes: 0 success, 1 configuration error, 2 runtime or resource error,
3 verification-check failure (ensemble --check).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

from . import analytics, experiments, io, svg
from .engine import simulate
from .errors import ConfigError, ZfireError


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zfire",
                                description="forest-fire process with delays: "
                                            "simulator and verification harness")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one replication")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", default=".")
    sim.add_argument("--seed", type=int, default=None)

    ens = sub.add_parser("ensemble", help="run replications or an experiment")
    ens.add_argument("--config", required=True)
    ens.add_argument("--out", default=".")
    ens.add_argument("--seed", type=int, default=None, help="override master seed")
    ens.add_argument("--replications", type=int, default=None)
    ens.add_argument("--parallelism", type=int, default=None)
    ens.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    ens.add_argument("--check", action="store_true",
                     help="exit 3 unless the experiment's pass condition holds")

    ana = sub.add_parser("analytic", help="evaluate closed-form quantities")
    ana.add_argument("--a", type=float, help="constant spread delay")
    ana.add_argument("--kind", default="all",
                     choices=("bounds", "quadrature", "approx", "m1", "continuation", "all"))
    ana.add_argument("--nu1", type=float, default=0.0)
    ana.add_argument("--k", type=int, default=1)
    ana.add_argument("--c", type=float, default=None, help="c/x delay coefficient")
    ana.add_argument("--t", type=float, default=1.0)
    ana.add_argument("--x", type=int, default=10)
    ana.add_argument("--tol", type=float, default=1e-8)

    cpl = sub.add_parser("couple", help="sheared coupling test")
    cpl.add_argument("--a", type=float, required=True)
    cpl.add_argument("--replications", type=int, default=50)
    cpl.add_argument("--observe-for", type=float, default=120.0)
    cpl.add_argument("--window-sites", type=int, default=24)
    cpl.add_argument("--seed", type=int, default=20260101)
    cpl.add_argument("--out", default=".")

    ren = sub.add_parser("render", help="emit the SVG graphic representation")
    ren.add_argument("--config", required=True)
    ren.add_argument("--out", default=".")
    ren.add_argument("--file", default="run.svg")
    ren.add_argument("--seed", type=int, default=None)
    ren.add_argument("--max-site", type=int, default=None)
    ren.add_argument("--t-max", type=float, default=None)
    return p


def _load_model(args):
    model, ensemble = io.load_config(args.config)
    if getattr(args, "seed", None) is not None:
        model = dataclasses.replace(model, seed=args.seed)
    return model, ensemble


def _cmd_simulate(args) -> int:
    model, _ = _load_model(args)
    out = io.resolve_out_dir(args.out)
    run = simulate(model)
    io.write_jsonl([io.run_record(run)], out / "run.jsonl")
    print(f"wrote {out / 'run.jsonl'}", file=sys.stderr)
    return 0


def _stat_to_dict(res: experiments.StatResult) -> dict:
    d = dataclasses.asdict(res)
    return json.loads(json.dumps(d, default=lambda o: None))


_EXPERIMENT_RUNNERS = {
    "kappa_estimate": lambda model, n, seed, par, p: experiments.kappa_experiment(
        a=p["a"], replications=n, master_seed=seed,
        sentinel=p.get("sentinel", 12), parallelism=par),
    "jump_law": lambda model, n, seed, par, p: experiments.jump_law_experiment(
        theta_const=p["theta"], replications=n, master_seed=seed,
        t_max=p.get("t_max", 8.0), parallelism=par),
    "stop_rate": lambda model, n, seed, par, p: experiments.stop_rate_experiment(
        theta_spec=model.theta_spec, replications=n, master_seed=seed,
        t_max=p.get("t_max", 4.0), parallelism=par),
    "burn_ratio": lambda model, n, seed, par, p: experiments.burn_ratio_experiment(
        replications=n, master_seed=seed, site=p.get("site", 1000),
        theta_const=p.get("theta", 1.0), t_max=p.get("t_max", 12.0),
        parallelism=par),
    "coupling_test": lambda model, n, seed, par, p: experiments.coupling_test(
        a=p["a"], replications=n, master_seed=seed,
        gaps_per_rep=p.get("gaps_per_rep", 100),
        window_sites=p.get("window_sites", 24), parallelism=par),
    "dichotomy_compare": lambda model, n, seed, par, p: experiments.dichotomy_experiment(
        c_low=p["c_low"], c_high=p["c_high"], replications=n, master_seed=seed,
        reach=p.get("reach", 1000), slack=p.get("slack", 3.0),
        t_max=p.get("t_max"), parallelism=par),
    "infinite_fire_existence": lambda model, n, seed, par, p: experiments.existence_experiment(
        delta_spec=model.delta_spec, theta_spec=model.theta_spec,
        replications=n, master_seed=seed,
        t_grid=tuple(p.get("t_grid", (10.0, 100.0, 1000.0))),
        sentinel=p.get("sentinel", 1000), parallelism=par),
}


def _cmd_ensemble(args) -> int:
    model, ens = _load_model(args)
    if ens is None:
        raise ConfigError("the config file has no 'ensemble' section")
    n = args.replications if args.replications is not None else ens.replications
    seed = args.seed if args.seed is not None else ens.master_seed
    par = args.parallelism if args.parallelism is not None else ens.parallelism
    out = io.resolve_out_dir(args.out)

    if ens.kind == "run_record":
        spec = experiments.EnsembleSpec(base=model, replications=n, kind="run_record",
                                        master_seed=seed, parallelism=par,
                                        params=ens.params)
        records, failures, wall = experiments.run_ensemble(spec)
        if args.format == "jsonl":
            io.write_jsonl(records, out / "records.jsonl")
        else:
            rows = [{"seed": r["seed"], "kappa": r["kappa"], "T": r["T"],
                     "global_max": r["global_max"], "fires": len(r["fires"]),
                     "end_reason": r["end_reason"]} for r in records]
            io.write_csv(rows, out / "records.csv")
        stat = {"kind": "run_record", "replications": n, "failures": failures,
                "wall_seconds": wall, "master_seed": seed,
                "config_hash": io.config_hash(model)}
        (out / "stat.json").write_text(json.dumps(stat, indent=2, sort_keys=True) + "\n")
        print(f"wrote {out}", file=sys.stderr)
        return 0

    runner = _EXPERIMENT_RUNNERS.get(ens.kind)
    if runner is None:
        raise ConfigError(f"no runner for experiment kind {ens.kind!r}")
    res = runner(model, n, seed, par, ens.params)
    (out / "stat.json").write_text(
        json.dumps(_stat_to_dict(res), indent=2, sort_keys=True) + "\n")
    print(f"{ens.kind}: passed={res.passed} estimate={res.estimate} "
          f"p={res.p_value}", file=sys.stderr)
    if args.check and not res.passed:
        return 3
    return 0


def _cmd_analytic(args) -> int:
    rows = []
    kind = args.kind
    if kind in ("bounds", "approx", "quadrature", "m1", "all"):
        if args.a is None:
            raise ConfigError("--a is required for this analytic kind")
    if kind in ("bounds", "all"):
        b = analytics.p_kappa1_bounds(args.a)
        rows += [("mu", b.mu), ("lower", b.lower), ("upper", b.upper)]
    if kind in ("approx", "all"):
        rows.append(("approx", analytics.p_kappa1_bounds(args.a).approx))
    if kind in ("quadrature", "all"):
        rows.append(("quadrature", analytics.p_kappa1_quadrature(args.a, args.tol)))
    if kind in ("m1", "all"):
        rows.append((f"m1_pmf(nu1={args.nu1}, k={args.k})",
                     analytics.m1_pmf(args.nu1, args.a, args.k)))
        rows.append((f"marginal_m1_pmf(k={args.k})",
                     analytics.marginal_m1_pmf(args.a, args.k)))
    if kind in ("continuation", "all"):
        if args.c is not None:
            from .distributions import deterministic_c_over_x
            rows.append((f"continuation(c={args.c}, t={args.t}, x={args.x})",
                         analytics.continuation_product(args.t, args.x,
                                                        deterministic_c_over_x(args.c))))
        elif args.a is not None:
            from .distributions import constant, homogeneous
            rows.append((f"continuation(a={args.a}, t={args.t})",
                         analytics.continuation_product(args.t, args.x,
                                                        homogeneous(constant(args.a)))))
    for name, value in rows:
        print(f"{name}\t{value:.10g}")
    return 0


def _cmd_couple(args) -> int:
    res = experiments.coupling_test(a=args.a, replications=args.replications,
                                    master_seed=args.seed,
                                    observe_for=args.observe_for,
                                    window_sites=args.window_sites)
    out = io.resolve_out_dir(args.out)
    (out / "coupling.json").write_text(
        json.dumps(_stat_to_dict(res), indent=2, sort_keys=True) + "\n")
    print(f"coupling: KS p={res.p_value:.4f} baseline-exp "
          f"p={res.details['baseline_exp_ks'][1]:.4f} passed={res.passed}",
          file=sys.stderr)
    return 0


def _cmd_render(args) -> int:
    model, _ = _load_model(args)
    run = simulate(model)
    t_max = args.t_max
    if t_max is None and math.isfinite(model.t_max):
        t_max = model.t_max
    doc = svg.render_svg(run, max_site=args.max_site, t_max=t_max)
    out = io.resolve_out_dir(args.out)
    (out / args.file).write_text(doc)
    print(f"wrote {out / args.file}", file=sys.stderr)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "ensemble": _cmd_ensemble,
    "analytic": _cmd_analytic,
    "couple": _cmd_couple,
    "render": _cmd_render,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ZfireError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
