"""Command-line frontend.

Subcommands: validate, analyze, constants, simulate, first-production,
reachable, bounds (decay|poisson|walk|reflecting), demo (leader|chain|scan).
Exit codes: 0 success, 1 domain error, 2 usage error. Identical arguments
and seed always yield byte-identical outputs; --threads only caps
parallelism. Bulk results go to CSV files (default directory "." or
$CRNSIM_OUTDIR); --format json switches the report on stdout to JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analysis, bounds, harness, kinetics, model
from .errors import CrnError

DEFAULT_SEED = 2012


def _load_crn(path: str, init_spec: str | None, require_init: bool):
    text = Path(path).read_text(encoding="utf-8")
    crn, init = model.parse_crn(text)
    if init_spec:
        counts = {}
        for part in init_spec.replace(",", " ").split():
            if "=" not in part:
                raise CrnError(f"bad --init entry {part!r}; expected NAME=COUNT")
            name, _, value = part.partition("=")
            try:
                counts[name.strip()] = int(value)
            except ValueError:
                raise CrnError(f"bad --init count {value!r} for {name!r}") from None
        try:
            init = crn.config(counts)
        except KeyError as e:
            raise CrnError(str(e)) from None
    if require_init and init is None:
        raise CrnError(
            f"{path} declares no init: lines; pass --init \"NAME=COUNT ...\""
        )
    return crn, init


def _emit(args, report: dict, text_lines: list[str]):
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _out_path(args, name: str) -> Path:
    base = Path(args.out_dir or os.environ.get("CRNSIM_OUTDIR", "."))
    base.mkdir(parents=True, exist_ok=True)
    return base / name


def _cmd_validate(args) -> int:
    crn, init = _load_crn(args.file, args.init, require_init=False)
    status = analysis.finite_density_status(crn)
    report = {
        "file": args.file,
        "species": list(crn.species.names),
        "reactions": len(crn.reactions),
        "finite_density": status.to_dict(crn),
        "init_total": None if init is None else init.total,
    }
    lines = [
        f"{args.file}: {crn.n_species} species, {len(crn.reactions)} reactions",
        f"finite density: {status.kind}"
        + (f" (c_hat = {status.c_hat})" if status.c_hat is not None else ""),
    ]
    if init is not None:
        lines.append(f"init total: {init.total}")
    _emit(args, report, lines)
    return 0


def _cmd_analyze(args) -> int:
    crn, init = _load_crn(args.file, args.init, require_init=True)
    stages = analysis.stage_decomposition(crn, init)
    status = analysis.finite_density_status(crn)
    cert = analysis.check_mass_conserving(crn)
    dense = analysis.is_alpha_dense(init, args.alpha) if args.alpha else None
    report = {
        "stages": stages.to_dict(crn),
        "finite_density": status.to_dict(crn),
        "mass_certificate": cert.to_dict(crn),
        "alpha": args.alpha,
        "alpha_dense": dense,
    }
    lines = [f"stages (m = {stages.m}):"]
    for i, stage in enumerate(stages.to_dict(crn)["stages"]):
        lines.append(f"  stage {i}: {{{', '.join(stage)}}}")
    lines.append(f"finite density: {status.kind}"
                 + (f" (c_hat = {status.c_hat})" if status.c_hat is not None else ""))
    lines.append(
        "mass certificate: "
        + (f"mass = {cert.to_dict(crn)['mass']}, ratio = {cert.ratio}" if cert.exists else "none")
    )
    if dense is not None:
        lines.append(f"alpha-dense at alpha={args.alpha}: {dense}")
    _emit(args, report, lines)
    return 0


def _cmd_constants(args) -> int:
    crn, init = _load_crn(args.file, args.init, require_init=True)
    tc = bounds.compute_theorem_constants(crn, init, args.alpha, args.c_hat)
    report = tc.to_dict()
    lines = [
        f"K_hat = {tc.K_hat}, k_hat = {tc.k_hat}, c_hat = {tc.c_hat}, lambda = {tc.lam}",
        f"m = {tc.m}, t = {tc.t}, log2(c) = {tc.log2_c:.6g}",
        "log2(delta_i): " + ", ".join(f"{v:.6g}" for v in tc.log2_delta),
        f"log2(delta_m) floor: {tc.log2_delta_m_lower:.6g}",
        f"log2(epsilon') = {tc.log2_epsilon_prime:.6g}, log2(epsilon) = {tc.log2_epsilon:.6g}",
        "n thresholds (log2):",
    ]
    lines += [f"  {d}: {v:.6g}" for d, v in tc.n_thresholds]
    lines += [f"warning: {w}" for w in tc.warnings]
    _emit(args, report, lines)
    return 0


def _parse_stop(args) -> kinetics.StopCondition:
    species = frozenset(args.stop_species) if args.stop_species else None
    count_reaches = None
    if args.stop_count:
        name, _, value = args.stop_count.partition("=")
        try:
            count_reaches = (name.strip(), int(value))
        except ValueError:
            raise CrnError(f"bad --stop-count {args.stop_count!r}; expected NAME=COUNT") from None
    return kinetics.StopCondition(
        t_max=args.t_max,
        species_appears=species,
        count_reaches=count_reaches,
        max_events=args.max_events,
    )


def _cmd_simulate(args) -> int:
    crn, init = _load_crn(args.file, args.init, require_init=True)
    stop = _parse_stop(args)
    checkpoints = [float(x) for x in args.checkpoints.split(",")] if args.checkpoints else None
    trace = kinetics.simulate(
        crn, init, stop, seed=args.seed, volume=args.volume, checkpoint_times=checkpoints
    )
    trace_path = _out_path(args, args.trace_out)
    with open(trace_path, "w", newline="") as f:
        trace.to_csv(crn, f)
    cp_path = None
    if trace.checkpoints:
        cp_path = _out_path(args, args.checkpoints_out)
        with open(cp_path, "w", newline="") as f:
            trace.checkpoints_to_csv(crn, f)
    report = {
        "status": trace.status,
        "time": trace.time,
        "events": len(trace.events),
        "terminal": trace.terminal.to_dict(crn.species),
        "trace_csv": str(trace_path),
        "checkpoints_csv": None if cp_path is None else str(cp_path),
    }
    lines = [
        f"status: {trace.status} at t = {trace.time:.6g} after {len(trace.events)} events",
        f"terminal: {trace.terminal.to_dict(crn.species)}",
        f"trace written to {trace_path}",
    ]
    if cp_path is not None:
        lines.append(f"checkpoints written to {cp_path}")
    _emit(args, report, lines)
    return 0


def _cmd_first_production(args) -> int:
    crn, init = _load_crn(args.file, args.init, require_init=True)
    try:
        stats = kinetics.first_production_times(
            crn,
            init,
            args.target,
            args.t_cap,
            args.trials,
            seed=args.seed,
            volume=args.volume,
            threads=args.threads,
        )
    except KeyError as e:
        raise CrnError(str(e)) from None
    out = _out_path(args, args.out)
    with open(out, "w", newline="") as f:
        stats.to_csv(f)
    report = dict(stats.to_dict(), csv=str(out))
    d = stats.to_dict()
    lines = [
        f"target {args.target}: {stats.trials} trials, {stats.censored} censored at t_cap={args.t_cap}",
        f"mean = {d['mean']}, median = {d['median']}, p90 = {d['p90']}",
        f"per-trial times written to {out}",
    ]
    _emit(args, report, lines)
    return 0


def _cmd_reachable(args) -> int:
    crn, init = _load_crn(args.file, args.init, require_init=True)
    if args.compare_closure:
        cmp = analysis.closure_vs_oracle(
            crn, init, args.scale_limit, args.max_configs, args.max_count
        )
        report = cmp.to_dict(crn)
        lines = [f"closure: {{{', '.join(report['closure'])}}}"]
        for sc in report["scales"]:
            rel = "inconclusive" if sc["inconclusive"] else ("equal" if sc["equal"] else "proper subset")
            lines.append(f"  scale {sc['scale']}: {{{', '.join(sc['producible'])}}} ({rel})")
        lines.append(f"least coinciding scale: {report['least_equal_scale']}")
        _emit(args, report, lines)
        return 0
    rep = analysis.reachable_set(crn, init, args.max_configs, args.max_count)
    report = rep.to_dict(crn)
    lines = [
        f"producible: {{{', '.join(report['producible'])}}}",
        f"visited {rep.visited} configurations" + (" (truncated)" if rep.truncated else ""),
    ]
    _emit(args, report, lines)
    return 0


def _cmd_bounds(args) -> int:
    if args.process == "decay":
        params = bounds.DecayBoundParams(args.N, args.lam, args.t, args.delta)
        log2_bound = bounds.log_bound_decay(args.N, args.lam, args.t, args.delta)
    elif args.process == "poisson":
        params = bounds.PoissonBoundParams(args.lam, args.n, args.side)
        log2_bound = bounds.log_bound_poisson(args.lam, args.n, args.side)
    elif args.process == "walk":
        params = bounds.WalkBoundParams(args.f_hat, args.r_hat, args.t, args.eps_hat)
        log2_bound = bounds.log_bound_walk(args.f_hat, args.r_hat, args.t, args.eps_hat)
    else:
        params = bounds.ReflectingBoundParams(args.delta_f, args.lambda_r, args.delta_r, args.N)
        log2_bound = bounds.log_bound_reflecting(
            args.delta_f, args.lambda_r, args.delta_r, args.N
        )
    vacuous = log2_bound >= 0
    report = {
        "process": args.process,
        "log2_bound": log2_bound,
        "vacuous": vacuous,
    }
    lines = [f"log2 bound = {log2_bound:.6g}" + (" (vacuous: bound >= 1)" if vacuous else "")]
    if args.validate:
        target = {"decay": "decay", "poisson": "poisson", "walk": "walk_z", "reflecting": "reflecting"}
        rep = bounds.monte_carlo_validate(
            target[args.process], params, trials=args.trials, seed=args.seed, threads=args.threads
        )
        report["validation"] = rep.to_dict()
        lines.append(
            f"validation: {rep.verdict} (hits {rep.empirical_hits}/{rep.trials}, "
            f"99% upper {rep.upper_confidence:.3g} vs bound 2^{rep.log2_bound:.4g})"
        )
    _emit(args, report, lines)
    return 0


def _cmd_demo(args) -> int:
    out_dir = str(Path(args.out_dir or os.environ.get("CRNSIM_OUTDIR", ".")))
    crn = init = None
    if args.scenario == "scan":
        crn, init = _load_crn(args.file, args.init, require_init=True)
        n_grid = tuple(int(x) for x in args.n_grid.split(","))
        spec = harness.ExperimentSpec(
            scenario="scan", n_grid=n_grid, trials=args.trials, seed=args.seed,
            out_dir=out_dir, alpha=args.alpha, t_cap=args.t_cap,
        )
    elif args.scenario == "leader":
        spec = harness.ExperimentSpec(
            scenario="leader", n_grid=(args.n,), trials=args.trials,
            seed=args.seed, out_dir=out_dir,
        )
    else:
        spec = harness.ExperimentSpec(
            scenario="chain", n_grid=(args.n,), trials=args.trials,
            seed=args.seed, out_dir=out_dir, m=args.m, t_cap=args.t_cap,
        )
    report = spec.run(crn=crn, init=init, threads=args.threads)
    lines = [f"{args.scenario} experiment over n in {list(spec.n_grid)}:"]
    if args.scenario == "scan":
        for row in report["results"]["rows"]:
            med = "censored" if row["median"] is None else f"{row['median']:.6g}"
            lines.append(
                f"  n={row['n']} {row['species']}: produced "
                f"{row['produced_count']}/{row['trials']}, median {med}"
            )
    else:
        for n, summary in sorted(report["results"].items(), key=lambda kv: int(kv[0])):
            if args.scenario == "leader":
                lines.append(
                    f"  n={n}: mean time {summary['mean']:.4g} "
                    f"(analytic {summary['analytic_mean']:.4g})"
                )
            else:
                lines.append(
                    f"  n={n}: produced fraction {summary['produced_fraction']:.1%}"
                )
    lines.append(f"rows written to {report['csv']}")
    lines.append(f"summary written to {report['json']}")
    _emit(args, report, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crnsim",
        description="Stochastic reaction-network simulation, analysis and bound validation.",
    )
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"random seed (default {DEFAULT_SEED})")
    parser.add_argument("--threads", type=int, default=1,
                        help="parallelism cap; never changes results")
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--out-dir", default=None,
                        help="directory for bulk outputs (default $CRNSIM_OUTDIR or .)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_file(p, init_help="override or supply initial counts, e.g. \"X=1000 Y=5\""):
        p.add_argument("file", help="CRN text file")
        p.add_argument("--init", default=None, help=init_help)

    p = sub.add_parser("validate", help="parse a file and classify count growth")
    add_file(p)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("analyze", help="stages, density, conservation certificate")
    add_file(p)
    p.add_argument("--alpha", type=float, default=None, help="check alpha-density of init")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("constants", help="staged-production constant calculus")
    add_file(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c-hat", type=float, default=None,
                   help="per-species count inflation bound (default: classify)")
    p.set_defaults(fn=_cmd_constants)

    p = sub.add_parser("simulate", help="run one trajectory")
    add_file(p)
    p.add_argument("--volume", type=float, default=None, help="default: total initial count")
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--max-events", type=int, default=None)
    p.add_argument("--stop-species", action="append", default=None,
                   help="stop once this species appears (repeatable: all must appear)")
    p.add_argument("--stop-count", default=None, help="NAME=COUNT stop threshold")
    p.add_argument("--checkpoints", default=None, help="comma-separated sample times")
    p.add_argument("--trace-out", default="trace.csv")
    p.add_argument("--checkpoints-out", default="checkpoints.csv")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("first-production", help="first-production time statistics")
    add_file(p)
    p.add_argument("--target", required=True)
    p.add_argument("--t-cap", type=float, default=10.0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--volume", type=float, default=None)
    p.add_argument("--out", default="first_production.csv")
    p.set_defaults(fn=_cmd_first_production)

    p = sub.add_parser("reachable", help="exact reachability oracle (capped BFS)")
    add_file(p)
    p.add_argument("--max-configs", type=int, default=100_000)
    p.add_argument("--max-count", type=int, default=1_000_000)
    p.add_argument("--compare-closure", action="store_true",
                   help="compare producible sets against the stage closure across scales")
    p.add_argument("--scale-limit", type=int, default=8)
    p.set_defaults(fn=_cmd_reachable)

    p = sub.add_parser("bounds", help="closed-form tail bounds, optionally validated")
    bsub = p.add_subparsers(dest="process", required=True)

    def add_validate(bp):
        bp.add_argument("--validate", action="store_true", help="Monte Carlo dominance check")
        bp.add_argument("--trials", type=int, default=100_000)
        bp.set_defaults(fn=_cmd_bounds)

    bp = bsub.add_parser("decay")
    bp.add_argument("--N", type=int, required=True)
    bp.add_argument("--lam", type=float, required=True)
    bp.add_argument("--t", type=float, required=True)
    bp.add_argument("--delta", type=float, required=True)
    add_validate(bp)
    bp = bsub.add_parser("poisson")
    bp.add_argument("--lam", type=float, required=True)
    bp.add_argument("--n", type=float, required=True)
    bp.add_argument("--side", choices=["upper", "lower"], required=True)
    add_validate(bp)
    bp = bsub.add_parser("walk")
    bp.add_argument("--f-hat", type=float, required=True)
    bp.add_argument("--r-hat", type=float, required=True)
    bp.add_argument("--t", type=float, required=True)
    bp.add_argument("--eps-hat", type=float, required=True)
    add_validate(bp)
    bp = bsub.add_parser("reflecting")
    bp.add_argument("--delta-f", type=float, required=True)
    bp.add_argument("--lambda-r", type=float, required=True)
    bp.add_argument("--delta-r", type=float, required=True)
    bp.add_argument("--N", type=int, required=True)
    add_validate(bp)

    p = sub.add_parser("demo", help="prebuilt experiments")
    dsub = p.add_subparsers(dest="scenario", required=True)
    dp = dsub.add_parser("leader")
    dp.add_argument("--n", type=int, default=100)
    dp.add_argument("--trials", type=int, default=1000)
    dp.set_defaults(fn=_cmd_demo)
    dp = dsub.add_parser("chain")
    dp.add_argument("--m", type=int, default=3)
    dp.add_argument("--n", type=int, default=1000)
    dp.add_argument("--trials", type=int, default=200)
    dp.add_argument("--t-cap", type=float, default=None, help="default: m+1")
    dp.set_defaults(fn=_cmd_demo)
    dp = dsub.add_parser("scan")
    dp.add_argument("file", help="CRN text file")
    dp.add_argument("--init", default=None)
    dp.add_argument("--alpha", type=float, default=0.5)
    dp.add_argument("--n-grid", default="100,1000,10000")
    dp.add_argument("--trials", type=int, default=1000)
    dp.add_argument("--t-cap", type=float, default=None)
    dp.set_defaults(fn=_cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        return args.fn(args)
    except (CrnError, KeyError, FileNotFoundError) as e:
        message = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
