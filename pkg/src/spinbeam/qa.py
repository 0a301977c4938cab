"""Annealing-based alternating designer.

Each half-step maximizes the one-sided spin objective by handing its Gram to
a sampler as a calibrated minimization QUBO and keeping the lowest-energy
sample (ties already resolved inside SampleSet toward the lexicographically
smallest bits, which is SNR-neutral by sign symmetry).  The alternation runs
from L independent random post-coding starts and keeps the best restart.

With the exact enumerator as backend every half-step is a true block argmax,
so the per-iteration SNR trace is non-decreasing; with the annealing emulator
or an external device the trace may dip and only the best restart matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from spinbeam.designers import DesignBreakdown, DesignResult, IterControl, _rel_change
from spinbeam.model import (
    ChannelMatrix,
    CodingPair,
    SpinVector,
    SystemParams,
    evaluate_snr,
    objective_gram_f,
    objective_gram_g,
)
from spinbeam.qubo import Sampler, SamplerConfig, binary_to_spin, build_qubo_from_gram

__all__ = ["QaControl", "qa_design"]


@dataclass(frozen=True)
class QaControl:
    """Restart and sampling policy for qa_design.

    initial_posts, when given, pins the restart starting points g^(0) instead
    of drawing them from restart_seed; its length must equal num_restarts_l.
    """

    ctrl: IterControl
    sampler: Sampler
    sampler_cfg: SamplerConfig
    num_restarts_l: int = 10
    restart_seed: int = 0
    initial_posts: tuple[SpinVector, ...] | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.num_restarts_l, int) or self.num_restarts_l < 1:
            raise ValueError(
                f"num_restarts_l must be an integer >= 1, got {self.num_restarts_l!r}"
            )
        if not callable(getattr(self.sampler, "sample", None)):
            raise ValueError("sampler must expose a sample(inst, cfg) method")
        if self.initial_posts is not None:
            if len(self.initial_posts) != self.num_restarts_l:
                raise ValueError(
                    f"initial_posts has {len(self.initial_posts)} entries, "
                    f"expected num_restarts_l = {self.num_restarts_l}"
                )
            if not all(isinstance(g, SpinVector) for g in self.initial_posts):
                raise ValueError("initial_posts entries must be SpinVector instances")


def _restart_posts(qc: QaControl, n_r: int) -> list[SpinVector]:
    if qc.initial_posts is not None:
        for g in qc.initial_posts:
            if len(g) != n_r:
                raise ValueError(f"initial post has length {len(g)}, expected n_r = {n_r}")
        return list(qc.initial_posts)
    # one representative per sign class: first element pinned to +1
    rng = np.random.Generator(np.random.Philox(key=qc.restart_seed % 2**64))
    draws = rng.random((qc.num_restarts_l, n_r))
    spins = np.where(draws < 0.5, -1, 1).astype(np.int8)
    spins[:, 0] = 1
    return [SpinVector(row) for row in spins]


def qa_design(params: SystemParams, h: ChannelMatrix, qc: QaControl) -> DesignResult:
    """Best coding pair over L sampler-driven alternating restarts.

    Restarts with a failing sampler are skipped and counted on the result;
    the run only raises if every restart fails.
    """
    if h.n_r != params.n_r or h.n_t != params.n_t:
        raise ValueError(
            f"channel is {h.n_r} x {h.n_t}, params expect {params.n_r} x {params.n_t}"
        )

    best: DesignResult | None = None
    failed = 0
    last_error: Exception | None = None
    for g0 in _restart_posts(qc, params.n_r):
        try:
            restart = _run_restart(params, h, qc, g0)
        except Exception as exc:  # sampler backends surface varied failure types
            failed += 1
            last_error = exc
            continue
        if best is None or restart.pair.snr > best.pair.snr:
            best = restart

    if best is None:
        raise DesignBreakdown(
            f"all {qc.num_restarts_l} restarts failed; last error: {last_error}", iteration=0
        )
    if failed == 0:
        return best
    return DesignResult(
        pair=best.pair,
        iterations_used=best.iterations_used,
        converged_by_tolerance=best.converged_by_tolerance,
        trace=best.trace,
        failed_restarts=failed,
    )


def _run_restart(
    params: SystemParams, h: ChannelMatrix, qc: QaControl, g0: SpinVector
) -> DesignResult:
    g = g0
    rho_old = 0.0
    trace: list[float] = []
    k = 0
    while True:
        k += 1
        if k > 1:
            rho_old = trace[-1]
        f = _half_step(objective_gram_f(h, g), qc)
        g = _half_step(objective_gram_g(h, f), qc)
        rho_new = evaluate_snr(params, h, g, f)
        trace.append(rho_new)
        converged = _rel_change(rho_new, rho_old) < qc.ctrl.rel_tol_delta
        if converged or k >= qc.ctrl.max_iters_k:
            break

    pair = CodingPair(g=g, f=f, snr=rho_new)
    return DesignResult(
        pair=pair, iterations_used=k, converged_by_tolerance=converged, trace=tuple(trace)
    )


def _half_step(gram: np.ndarray, qc: QaControl) -> SpinVector:
    inst = build_qubo_from_gram(gram)
    sample_set = qc.sampler.sample(inst, qc.sampler_cfg)
    return binary_to_spin(sample_set.best.bits)
