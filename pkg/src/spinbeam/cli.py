"""Command-line surface: campaigns, single-channel runs, reports, stub bridge.

Subcommands:

* campaign       seeded multi-trial comparison, CSV + JSON summary
* solve-one      all selected methods on one channel, verbose traces
* anneal-report  ranked sample distribution for one channel's f-step QUBO
* gen-channel    dump a seeded channel as JSON for external tools
* bridge-stub    serve one QUBO exchange request on stdin (loopback testing)

Power is taken in dB (--power-db) and converted to linear internally; the
campaign summary records both.  For campaign, a JSON config file (--config)
supplies defaults that explicit flags override.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
from pathlib import Path

import numpy as np

from spinbeam.bridge import (
    BridgeEndpoint,
    BridgeError,
    bridge_client_sample_with_timing,
    serve_stub,
)
from spinbeam.campaign import METHODS, ExperimentConfig, run_campaign
from spinbeam.designers import IterControl, SizeGuardExceeded, exhaustive_search
from spinbeam.model import SystemParams, generate_channel, objective_gram_f
from spinbeam.qubo import (
    SamplerConfig,
    build_qubo_from_gram,
    solve_exact,
    solve_sa,
    spin_objective_to_energy,
)
from spinbeam.reports import report_anneal_distribution, report_timing

__all__ = ["main"]

_DB = {"power_db": 0.0, "noise_var": 1.0}
_CAMPAIGN_DEFAULTS = {
    "nt": None,
    "nr": None,
    "power_db": 0.0,
    "noise_var": 1.0,
    "trials": 100,
    "trial_start": 0,
    "seed": 0,
    "methods": "es,svd,rq,rqm,qa-sa",
    "delta": 0.01,
    "max_iters": 10,
    "restarts": 10,
    "reads": 1000,
    "bridge_cmd": None,
    "bridge_anneal_us": 20.0,
    "bridge_coupling": 3.0,
    "randomize_init": False,
    "csv_timing": False,
    "out": None,
}


def _spin_str(spins: np.ndarray) -> str:
    return "".join("+" if s > 0 else "-" for s in spins)


def _parse_methods(text: str) -> tuple[str, ...]:
    methods = tuple(tok.strip() for tok in text.split(",") if tok.strip())
    if not methods:
        raise ValueError("methods list is empty")
    return methods


def _db_to_linear(power_db: float) -> float:
    return 10.0 ** (power_db / 10.0)


def _add_channel_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--nt", type=int, required=True, help="transmit antennas")
    sp.add_argument("--nr", type=int, required=True, help="receive antennas")
    sp.add_argument("--seed", type=int, default=0, help="channel seed")
    sp.add_argument("--power-db", type=float, default=0.0, help="transmit power in dB")
    sp.add_argument("--noise-var", type=float, default=1.0, help="noise variance")


def _add_iter_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--delta", type=float, default=0.01, help="relative SNR tolerance")
    sp.add_argument("--max-iters", type=int, default=10, help="iteration cap K")
    sp.add_argument("--restarts", type=int, default=10, help="annealing restarts L")
    sp.add_argument("--reads", type=int, default=1000, help="sampler reads per QUBO")


def _add_bridge_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--bridge-cmd", type=str, default=None, help="bridge command line")
    sp.add_argument("--bridge-anneal-us", type=float, default=20.0)
    sp.add_argument("--bridge-coupling", type=float, default=3.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbeam", description="1-bit pre/post-coding design tools"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    camp = sub.add_parser("campaign", help="multi-trial method comparison")
    camp.add_argument("--config", type=str, default=None, help="JSON config file")
    camp.add_argument("--nt", type=int)
    camp.add_argument("--nr", type=int)
    camp.add_argument("--power-db", type=float)
    camp.add_argument("--noise-var", type=float)
    camp.add_argument("--trials", type=int)
    camp.add_argument("--trial-start", type=int)
    camp.add_argument("--seed", type=int, help="master seed (trial t uses seed + t)")
    camp.add_argument("--methods", type=str, help=f"comma list from {','.join(METHODS)}")
    camp.add_argument("--delta", type=float)
    camp.add_argument("--max-iters", type=int)
    camp.add_argument("--restarts", type=int)
    camp.add_argument("--reads", type=int)
    camp.add_argument("--bridge-cmd", type=str)
    camp.add_argument("--bridge-anneal-us", type=float)
    camp.add_argument("--bridge-coupling", type=float)
    camp.add_argument("--randomize-init", action="store_true", default=None)
    camp.add_argument("--csv-timing", action="store_true", default=None)
    camp.add_argument("--out", type=str, help="CSV output path")
    camp.set_defaults(func=cmd_campaign)

    one = sub.add_parser("solve-one", help="all methods on one seeded channel")
    _add_channel_args(one)
    _add_iter_args(one)
    _add_bridge_args(one)
    one.add_argument(
        "--methods",
        type=str,
        default=None,
        help="comma list; default es,svd,rq,rqm,qa-<sampler>",
    )
    one.add_argument("--sampler", choices=("exact", "sa", "bridge"), default="sa")
    one.set_defaults(func=cmd_solve_one)

    rep = sub.add_parser("anneal-report", help="ranked samples for one f-step QUBO")
    _add_channel_args(rep)
    rep.add_argument("--reads", type=int, default=1000)
    rep.add_argument("--sampler", choices=("exact", "sa", "bridge"), default="sa")
    _add_bridge_args(rep)
    rep.set_defaults(func=cmd_anneal_report)

    gen = sub.add_parser("gen-channel", help="dump a seeded channel as JSON")
    gen.add_argument("--nt", type=int, required=True)
    gen.add_argument("--nr", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=str, default=None, help="path (default: stdout)")
    gen.set_defaults(func=cmd_gen_channel)

    stub = sub.add_parser("bridge-stub", help="answer one exchange request on stdin")
    stub.add_argument("--backend", choices=("exact", "sa"), default="sa")
    stub.add_argument("--seed", type=int, default=0)
    stub.add_argument("--sweeps", type=int, default=100)
    stub.add_argument("--beta0", type=float, default=0.1)
    stub.add_argument("--beta1", type=float, default=10.0)
    stub.add_argument("--keep", type=int, default=32, help="exact backend: samples kept (0 = all)")
    stub.set_defaults(func=cmd_bridge_stub)

    return parser


def cmd_campaign(args: argparse.Namespace) -> int:
    merged = dict(_CAMPAIGN_DEFAULTS)
    if args.config is not None:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(_CAMPAIGN_DEFAULTS)
        if unknown:
            raise ValueError(f"config file has unknown keys: {sorted(unknown)}")
        merged.update(loaded)
    for key in _CAMPAIGN_DEFAULTS:
        flag_value = getattr(args, key)
        if flag_value is not None:
            merged[key] = flag_value

    if merged["nt"] is None or merged["nr"] is None:
        raise ValueError("campaign needs --nt and --nr (flags or config file)")
    if merged["out"] is None:
        raise ValueError("campaign needs --out (flags or config file)")
    methods = merged["methods"]
    if isinstance(methods, str):
        methods = _parse_methods(methods)
    bridge_argv = None
    if merged["bridge_cmd"]:
        bridge_argv = tuple(shlex.split(merged["bridge_cmd"]))

    cfg = ExperimentConfig(
        params=SystemParams(
            n_t=merged["nt"],
            n_r=merged["nr"],
            power_p=_db_to_linear(merged["power_db"]),
            noise_var=merged["noise_var"],
        ),
        n_trials=merged["trials"],
        master_seed=merged["seed"],
        trial_start=merged["trial_start"],
        methods=tuple(methods),
        ctrl=IterControl(rel_tol_delta=merged["delta"], max_iters_k=merged["max_iters"]),
        num_restarts_l=merged["restarts"],
        sampler_cfg=SamplerConfig(num_reads=merged["reads"]),
        bridge_argv=bridge_argv,
        bridge_anneal_time_us=merged["bridge_anneal_us"],
        bridge_coupling=merged["bridge_coupling"],
        randomize_init=bool(merged["randomize_init"]),
        csv_timing=bool(merged["csv_timing"]),
        output_path=merged["out"],
    )
    report = run_campaign(cfg)
    for s in report.summaries:
        print(
            f"{s.method:>9}: mean snr {s.mean_snr:.6g} (std {s.std_snr:.3g}, "
            f"n={s.count}, failures={s.failures})"
        )
    print(f"wrote {cfg.output_path}")
    return 0


def cmd_solve_one(args: argparse.Namespace) -> int:
    from spinbeam.campaign import _run_method  # same dispatch as campaigns

    params = SystemParams(
        n_t=args.nt,
        n_r=args.nr,
        power_p=_db_to_linear(args.power_db),
        noise_var=args.noise_var,
    )
    h = generate_channel(params, seed=args.seed)
    methods = (
        _parse_methods(args.methods)
        if args.methods
        else ("es", "svd", "rq", "rqm", f"qa-{args.sampler}")
    )
    bridge_argv = tuple(shlex.split(args.bridge_cmd)) if args.bridge_cmd else None
    cfg = ExperimentConfig(
        params=params,
        n_trials=1,
        master_seed=args.seed,
        methods=methods,
        ctrl=IterControl(rel_tol_delta=args.delta, max_iters_k=args.max_iters),
        num_restarts_l=args.restarts,
        sampler_cfg=SamplerConfig(num_reads=args.reads),
        bridge_argv=bridge_argv,
        bridge_anneal_time_us=args.bridge_anneal_us,
        bridge_coupling=args.bridge_coupling,
    )
    for method in methods:
        res = _run_method(method, cfg, h, args.seed)
        snr_db = 10.0 * np.log10(res.pair.snr) if res.pair.snr > 0 else float("-inf")
        print(
            f"{method:>9}: snr {res.pair.snr:.10g} ({snr_db:+.3f} dB), "
            f"iterations {res.iterations_used}, converged {res.converged_by_tolerance}"
        )
        print(f"{'':>11}f = {_spin_str(res.pair.f.spins)}  g = {_spin_str(res.pair.g.spins)}")
        if res.trace:
            print(f"{'':>11}trace: {', '.join(f'{v:.6g}' for v in res.trace)}")
    return 0


def cmd_anneal_report(args: argparse.Namespace) -> int:
    params = SystemParams(
        n_t=args.nt,
        n_r=args.nr,
        power_p=_db_to_linear(args.power_db),
        noise_var=args.noise_var,
    )
    h = generate_channel(params, seed=args.seed)
    bench = exhaustive_search(params, h)

    t0 = time.perf_counter_ns()
    gram = objective_gram_f(h, bench.pair.g)
    inst = build_qubo_from_gram(gram)
    t1 = time.perf_counter_ns()

    f_spins = bench.pair.f.spins.astype(np.float64)
    best_objective = float(f_spins @ gram @ f_spins)
    es_energy = spin_objective_to_energy(inst, best_objective)

    cfg = SamplerConfig(num_reads=args.reads, seed=args.seed)
    timing: dict[str, float]
    if args.sampler == "bridge":
        if not args.bridge_cmd:
            raise ValueError("--sampler bridge requires --bridge-cmd")
        endpoint = BridgeEndpoint(argv=tuple(shlex.split(args.bridge_cmd)))
        sample_set, timing = bridge_client_sample_with_timing(
            inst, cfg, endpoint, args.bridge_anneal_us, args.bridge_coupling
        )
    else:
        if args.sampler == "exact":
            sample_set = solve_exact(inst)
        else:
            sample_set = solve_sa(inst, cfg)
        t2 = time.perf_counter_ns()
        timing = {
            "Programming time": (t1 - t0) / 1000.0,
            "Anneal time": (t2 - t1) / 1000.0,
        }

    dist = report_anneal_distribution(inst, sample_set, es_energy)
    print(dist.to_text())
    print()
    attained = [row.rank for row in dist.rows if row.attains_benchmark]
    if attained:
        classes = {row.symmetry_class for row in dist.rows if row.attains_benchmark}
        prob = sum(
            row.probability for row in dist.rows if row.attains_benchmark
        )
        print(
            f"benchmark energy attained at ranks {attained} "
            f"({len(classes)} symmetry class(es), total probability {prob:.4f})"
        )
    else:
        print("benchmark energy not attained by any returned sample")
    print()
    print(report_timing(timing).to_text())
    return 0


def cmd_gen_channel(args: argparse.Namespace) -> int:
    params = SystemParams(n_t=args.nt, n_r=args.nr)
    h = generate_channel(params, seed=args.seed)
    doc = {
        "n_r": args.nr,
        "n_t": args.nt,
        "seed": args.seed,
        "real": h.entries.real.tolist(),
        "imag": h.entries.imag.tolist(),
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_bridge_stub(args: argparse.Namespace) -> int:
    cfg = SamplerConfig(
        num_reads=1,  # overridden by the request's num_reads
        seed=args.seed,
        sa_sweeps=args.sweeps,
        sa_beta_range=(args.beta0, args.beta1),
    )
    request_text = sys.stdin.read()
    keep = None if args.keep == 0 else args.keep
    sys.stdout.write(serve_stub(request_text, args.backend, cfg, keep=keep))
    sys.stdout.write("\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, SizeGuardExceeded, BridgeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
