"""Seeded Monte-Carlo campaigns over random channels.

Trial t draws its channel from seed master_seed + t, so a campaign over
trials [a, b) equals the concatenation of campaigns over [a, m) and [m, b):
nothing is shared across trials.  All per-trial randomness (channel, QA
restarts, SA reads, optional random initialization) is keyed by the trial
seed, which makes every non-bridge method bitwise reproducible.

Output is a CSV with one row per trial per method (fixed column order:
trial, seed, method, snr, iterations, converged, wall_us) plus a structured
JSON summary with aggregates and measured wall-clock.  wall_us in the CSV is
written as 0 unless csv_timing is set: measured timings vary run to run, and
the CSV is the artifact that must be byte-identical for identical configs.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from spinbeam.bridge import BridgeEndpoint, BridgeSampler
from spinbeam.designers import (
    DesignBreakdown,
    DesignResult,
    IterControl,
    exhaustive_search,
    rq_design,
    rqm_design,
    svd_sign_design,
)
from spinbeam.linalg import leading_triplet
from spinbeam.model import (
    ChannelMatrix,
    SpinVector,
    SystemParams,
    generate_channel,
)
from spinbeam.qa import QaControl, qa_design
from spinbeam.qubo import ExactSampler, SamplerConfig, SaSampler

__all__ = [
    "METHODS",
    "ExperimentConfig",
    "TrialRow",
    "MethodSummary",
    "CampaignReport",
    "run_campaign",
    "render_csv",
    "write_outputs",
]

METHODS = ("es", "svd", "rq", "rqm", "qa-exact", "qa-sa", "qa-bridge")

# exhaustive paths refuse to start above these sizes
_ES_MAX_TOTAL = 30
_EXACT_SAMPLER_MAX_SIDE = 24


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams
    n_trials: int
    master_seed: int = 0
    trial_start: int = 0
    methods: tuple[str, ...] = ("es", "svd", "rq", "rqm", "qa-sa")
    ctrl: IterControl = field(default_factory=IterControl)
    num_restarts_l: int = 10
    sampler_cfg: SamplerConfig = field(default_factory=SamplerConfig)
    bridge_argv: tuple[str, ...] | None = None
    bridge_anneal_time_us: float = 20.0
    bridge_coupling: float = 3.0
    randomize_init: bool = False
    csv_timing: bool = False
    output_path: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.n_trials, int) or self.n_trials < 1:
            raise ValueError(f"n_trials must be an integer >= 1, got {self.n_trials!r}")
        if not isinstance(self.trial_start, int) or self.trial_start < 0:
            raise ValueError(f"trial_start must be an integer >= 0, got {self.trial_start!r}")
        if not self.methods:
            raise ValueError("methods must be non-empty")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError(f"methods contains duplicates: {self.methods}")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; known: {METHODS}")
        total = self.params.n_t + self.params.n_r
        if "es" in self.methods and total > _ES_MAX_TOTAL:
            raise ValueError(
                f"method 'es' needs n_t + n_r <= {_ES_MAX_TOTAL}, got {total}"
            )
        side = max(self.params.n_t, self.params.n_r)
        if "qa-exact" in self.methods and side > _EXACT_SAMPLER_MAX_SIDE:
            raise ValueError(
                f"method 'qa-exact' needs max(n_t, n_r) <= {_EXACT_SAMPLER_MAX_SIDE}, got {side}"
            )
        if "qa-bridge" in self.methods and not self.bridge_argv:
            raise ValueError("method 'qa-bridge' requires bridge_argv")
        if not isinstance(self.num_restarts_l, int) or self.num_restarts_l < 1:
            raise ValueError(
                f"num_restarts_l must be an integer >= 1, got {self.num_restarts_l!r}"
            )


@dataclass(frozen=True)
class TrialRow:
    trial: int
    seed: int
    method: str
    snr: float
    iterations: int
    converged: bool
    wall_us: int


@dataclass(frozen=True)
class MethodSummary:
    method: str
    mean_snr: float
    std_snr: float
    count: int
    failures: int
    wall_us_total: int


@dataclass(frozen=True, eq=False)
class CampaignReport:
    """Per-trial rows plus aggregates; construction enforces the bounds.

    Whenever a trial has an 'es' row, every other method's row for that trial
    must not exceed it, and the spectral bound for that trial must cover the
    'es' value (1e-9 relative slack for the iterative eigenvalue estimate).
    """

    config: ExperimentConfig
    rows: tuple[TrialRow, ...]
    eigen_bounds: dict[int, float]
    summaries: tuple[MethodSummary, ...]
    failures: dict[str, tuple[tuple[int, str], ...]]

    def __post_init__(self) -> None:
        es_by_trial = {r.trial: r.snr for r in self.rows if r.method == "es"}
        for r in self.rows:
            bound = self.eigen_bounds[r.trial]
            if r.snr > bound * (1.0 + 1e-9):
                raise ValueError(
                    f"trial {r.trial} method {r.method}: snr {r.snr!r} exceeds "
                    f"spectral bound {bound!r}"
                )
            es = es_by_trial.get(r.trial)
            if es is not None and r.snr > es:
                raise ValueError(
                    f"trial {r.trial} method {r.method}: snr {r.snr!r} exceeds "
                    f"exhaustive benchmark {es!r}"
                )

    def snr_table(self, method: str) -> dict[int, float]:
        return {r.trial: r.snr for r in self.rows if r.method == method}

    def summary_for(self, method: str) -> MethodSummary:
        for s in self.summaries:
            if s.method == method:
                return s
        raise KeyError(method)


def _initial_spins(rng: np.random.Generator, n: int) -> SpinVector:
    return SpinVector(np.where(rng.random(n) < 0.5, -1, 1).astype(np.int8))


def _run_method(
    method: str, cfg: ExperimentConfig, h: ChannelMatrix, trial_seed: int
) -> DesignResult:
    params = cfg.params
    if method == "es":
        return exhaustive_search(params, h)
    if method == "svd":
        return svd_sign_design(params, h)
    if method == "rq":
        if cfg.randomize_init:
            rng = np.random.Generator(np.random.Philox(key=trial_seed % 2**64))
            g0 = _initial_spins(rng, params.n_r)
            f0 = _initial_spins(rng, params.n_t)
            return rq_design(params, h, cfg.ctrl, g0=g0, f0=f0)
        return rq_design(params, h, cfg.ctrl)
    if method == "rqm":
        # g0_complex is seeded by the trial either way; randomize_init only
        # matters for the spin-initialized designer
        return rqm_design(params, h, cfg.ctrl, seed=trial_seed)
    if method == "qa-exact":
        sampler = ExactSampler()
    elif method == "qa-sa":
        sampler = SaSampler()
    elif method == "qa-bridge":
        sampler = BridgeSampler(
            endpoint=BridgeEndpoint(argv=tuple(cfg.bridge_argv)),
            annealing_time_us=cfg.bridge_anneal_time_us,
            ferromagnetic_coupling=cfg.bridge_coupling,
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    qc = QaControl(
        ctrl=cfg.ctrl,
        sampler=sampler,
        sampler_cfg=replace(cfg.sampler_cfg, seed=trial_seed),
        num_restarts_l=cfg.num_restarts_l,
        restart_seed=trial_seed,
    )
    return qa_design(params, h, qc)


def run_campaign(cfg: ExperimentConfig) -> CampaignReport:
    """Run every configured method on every trial; write outputs if configured."""
    rows: list[TrialRow] = []
    eigen_bounds: dict[int, float] = {}
    failures: dict[str, list[tuple[int, str]]] = {m: [] for m in cfg.methods}
    wall_totals: dict[str, int] = {m: 0 for m in cfg.methods}

    for t in range(cfg.trial_start, cfg.trial_start + cfg.n_trials):
        trial_seed = cfg.master_seed + t
        h = generate_channel(cfg.params, seed=trial_seed)
        trip = leading_triplet(h)
        eigen_bounds[t] = cfg.params.power_p * trip.sigma1_sq / cfg.params.noise_var
        for method in cfg.methods:
            t0 = time.perf_counter_ns()
            try:
                res = _run_method(method, cfg, h, trial_seed)
            except (DesignBreakdown, RuntimeError, ValueError) as exc:
                failures[method].append((t, str(exc)))
                continue
            wall_us = (time.perf_counter_ns() - t0) // 1000
            wall_totals[method] += wall_us
            rows.append(
                TrialRow(
                    trial=t,
                    seed=trial_seed,
                    method=method,
                    snr=res.pair.snr,
                    iterations=res.iterations_used,
                    converged=res.converged_by_tolerance,
                    wall_us=int(wall_us) if cfg.csv_timing else 0,
                )
            )

    summaries = []
    for method in cfg.methods:
        snrs = np.array([r.snr for r in rows if r.method == method])
        summaries.append(
            MethodSummary(
                method=method,
                mean_snr=float(snrs.mean()) if snrs.size else math.nan,
                std_snr=float(snrs.std()) if snrs.size else math.nan,
                count=int(snrs.size),
                failures=len(failures[method]),
                wall_us_total=wall_totals[method],
            )
        )

    report = CampaignReport(
        config=cfg,
        rows=tuple(rows),
        eigen_bounds=eigen_bounds,
        summaries=tuple(summaries),
        failures={m: tuple(f) for m, f in failures.items()},
    )
    if cfg.output_path is not None:
        write_outputs(report, Path(cfg.output_path))
    return report


def render_csv(report: CampaignReport) -> str:
    """Fixed-schema CSV; floats via repr for lossless, stable round-trips."""
    lines = ["trial,seed,method,snr,iterations,converged,wall_us"]
    for r in report.rows:
        lines.append(
            f"{r.trial},{r.seed},{r.method},{float(r.snr)!r},"
            f"{r.iterations},{str(r.converged).lower()},{r.wall_us}"
        )
    return "\n".join(lines) + "\n"


def _summary_doc(report: CampaignReport) -> dict:
    from spinbeam import __version__

    cfg = report.config
    p = cfg.params
    bounds = np.array(list(report.eigen_bounds.values()))
    return {
        "version": __version__,
        "config": {
            "n_t": p.n_t,
            "n_r": p.n_r,
            "power_p": p.power_p,
            "power_db": 10.0 * math.log10(p.power_p),
            "noise_var": p.noise_var,
            "n_trials": cfg.n_trials,
            "trial_start": cfg.trial_start,
            "master_seed": cfg.master_seed,
            "methods": list(cfg.methods),
            "rel_tol_delta": cfg.ctrl.rel_tol_delta,
            "max_iters_k": cfg.ctrl.max_iters_k,
            "num_restarts_l": cfg.num_restarts_l,
            "num_reads": cfg.sampler_cfg.num_reads,
            "randomize_init": cfg.randomize_init,
            "csv_timing": cfg.csv_timing,
            "bridge_argv": list(cfg.bridge_argv) if cfg.bridge_argv else None,
        },
        "methods": {
            s.method: {
                "mean_snr": s.mean_snr,
                "std_snr": s.std_snr,
                "count": s.count,
                "failures": s.failures,
                "wall_us_total": s.wall_us_total,
            }
            for s in report.summaries
        },
        "eigen_bound": {"mean": float(bounds.mean()), "min": float(bounds.min())},
        "failures": {
            m: [{"trial": t, "error": msg} for t, msg in f]
            for m, f in report.failures.items()
            if f
        },
    }


def write_outputs(report: CampaignReport, csv_path: Path) -> None:
    """Write <path> as CSV and <stem>.summary.json next to it."""
    csv_path = Path(csv_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with open(csv_path, "w", newline="\n") as fh:
        fh.write(render_csv(report))
    summary_path = csv_path.with_suffix(".summary.json")
    with open(summary_path, "w", newline="\n") as fh:
        json.dump(_summary_doc(report), fh, indent=2)
        fh.write("\n")
