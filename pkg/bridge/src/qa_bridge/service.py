"""One-shot request service: parse, solve offline or submit on-device, render.

The process serves exactly one request: read stdin, write one document to
stdout, exit.  Request-level failures become error documents, never raised
exceptions, so the peer always gets a parseable answer on a zero exit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from qa_bridge import wire
from qa_bridge.device import sample_on_device

__all__ = ["BridgeConfig", "serve_once"]


@dataclass(frozen=True)
class BridgeConfig:
    """Per-process settings, fixed at startup.

    num_reads, annealing_time_us, and ferromagnetic_coupling here are
    protocol defaults only; every request carries its own values and those
    govern the submission.  Solver identity, offline routing, and the
    offline sampler knobs belong to the process.  The credential is read
    from the environment variable named by auth_env, never from a flag.
    """

    solver_name: str = ""
    ferromagnetic_coupling: float = 3.0
    annealing_time_us: float = 20.0
    num_reads: int = 1000
    auth_env: str = "DWAVE_API_TOKEN"
    offline: bool = False
    backend: str = "sa"
    seed: int = 0
    sweeps: int = 100
    beta_range: tuple[float, float] = (0.1, 10.0)
    keep: int | None = 32

    def __post_init__(self) -> None:
        if self.num_reads < 1:
            raise ValueError(f"num_reads must be >= 1, got {self.num_reads}")
        if not self.annealing_time_us > 0:
            raise ValueError(
                f"annealing_time_us must be > 0, got {self.annealing_time_us}"
            )
        if self.backend not in ("exact", "sa"):
            raise ValueError(f"backend must be 'exact' or 'sa', got {self.backend!r}")
        if self.keep is not None and self.keep < 1:
            raise ValueError(f"keep must be >= 1 or None, got {self.keep}")


def serve_once(request_text: str, cfg: BridgeConfig) -> str:
    try:
        req = wire.parse_request(request_text)
    except wire.ParseError as exc:
        return wire.render_error("parse", str(exc))
    if cfg.offline:
        return _serve_offline(req, cfg)
    return sample_on_device(req, cfg)


def _serve_offline(req: wire.Request, cfg: BridgeConfig) -> str:
    # same samplers the client could run in process; given the same seed the
    # response round-trips through the protocol bit for bit
    from spinbeam import QuboInstance, SamplerConfig, solve_exact, solve_sa

    t0 = time.perf_counter_ns()
    inst = QuboInstance(coeffs=req.matrix, scale=1.0, offset=0.0)
    t1 = time.perf_counter_ns()
    try:
        if cfg.backend == "exact":
            result = solve_exact(inst, keep=cfg.keep)
        else:
            result = solve_sa(
                inst,
                SamplerConfig(
                    num_reads=req.num_reads,
                    seed=cfg.seed,
                    sa_sweeps=cfg.sweeps,
                    sa_beta_range=cfg.beta_range,
                ),
            )
    except ValueError as exc:
        return wire.render_error("solve", str(exc))
    t2 = time.perf_counter_ns()
    rows = [
        ("".join(str(int(bit)) for bit in s.bits), s.energy, s.occurrences)
        for s in result.samples
    ]
    t3 = time.perf_counter_ns()
    timing = {
        "Programming time": (t1 - t0) / 1000.0,
        "Anneal time": (t2 - t1) / 1000.0,
        "Readout time": (t3 - t2) / 1000.0,
    }
    metadata = {
        "mode": "offline",
        "backend": cfg.backend,
        "annealing_time_us": req.annealing_time_us,
        "ferromagnetic_coupling": req.ferromagnetic_coupling,
    }
    return wire.render_response(rows, timing, metadata)
