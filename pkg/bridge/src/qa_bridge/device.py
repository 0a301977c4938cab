"""Submission path against the vendor annealer SDK.

Everything vendor-specific is imported lazily so the offline paths work on
machines without the SDK.  Minor embedding and chain-break resolution are
delegated to the SDK defaults (minorminer through EmbeddingComposite,
majority vote), and that delegation is recorded in the response metadata.
The credential comes from an environment variable only; there is no flag
for it, and the auth check runs before the SDK import so a missing token
reports as "auth" rather than "unavailable".

Failures map to a closed set of error codes: auth, unavailable, embedding,
timeout.  Anything unclassified reports as unavailable with the exception
type in the detail, on the reasoning that whatever happened, the solver was
not usable.  The bridge never retries; retry policy belongs to the client.
"""

from __future__ import annotations

import os
from typing import Any

from qa_bridge import wire

__all__ = ["classify_error", "sample_on_device", "timing_table"]

# report names for the SDK's timing-info keys; unknown keys pass through
_TIMING_NAMES = {
    "qpu_programming_time": "Programming time",
    "qpu_anneal_time_per_sample": "Anneal time",
    "qpu_readout_time_per_sample": "Readout time",
    "qpu_delay_time_per_sample": "Readout delay",
    "total_post_processing_time": "Post processing",
}


def timing_table(info: dict[str, Any]) -> dict[str, float]:
    """SDK timing map (microseconds) renamed to report stage names."""
    table: dict[str, float] = {}
    for key, value in info.items():
        try:
            value = float(value)
        except (TypeError, ValueError):
            continue
        table[_TIMING_NAMES.get(key, key)] = value
    return table


def classify_error(exc: BaseException) -> str:
    name = type(exc).__name__.lower()
    text = str(exc).lower()
    if "authentication" in name or "api token" in text:
        return "auth"
    if "timeout" in name or "timed out" in text:
        return "timeout"
    if "embedding" in name or "no embedding found" in text:
        return "embedding"
    return "unavailable"


def sample_on_device(req: wire.Request, cfg) -> str:
    token = os.environ.get(cfg.auth_env, "")
    if not token:
        return wire.render_error(
            "auth", f"no credential in environment variable {cfg.auth_env}"
        )
    try:
        from dwave.system import DWaveSampler, EmbeddingComposite
    except ImportError as exc:
        return wire.render_error("unavailable", f"vendor SDK not importable: {exc}")

    n = req.n
    qdict: dict[tuple[int, int], float] = {}
    for i in range(n):
        # zero diagonals stay in so every variable exists on the device side
        qdict[(i, i)] = float(req.matrix[i, i])
        for j in range(i + 1, n):
            if req.matrix[i, j] != 0.0:
                qdict[(i, j)] = float(2.0 * req.matrix[i, j])

    try:
        sampler = EmbeddingComposite(
            DWaveSampler(solver=cfg.solver_name or None, token=token)
        )
        result = sampler.sample_qubo(
            qdict,
            num_reads=req.num_reads,
            annealing_time=req.annealing_time_us,
            chain_strength=req.ferromagnetic_coupling,
        )
    except Exception as exc:
        return wire.render_error(classify_error(exc), f"{type(exc).__name__}: {exc}")

    result = result.aggregate()
    rows = []
    for rec in result.data(
        fields=["sample", "energy", "num_occurrences"], sorted_by="energy"
    ):
        bits = "".join(str(int(rec.sample[i])) for i in range(n))
        rows.append((bits, float(rec.energy), int(rec.num_occurrences)))

    info = getattr(result, "info", None) or {}
    metadata = {
        "mode": "device",
        "solver": cfg.solver_name or "default",
        "embedding": "minorminer defaults via EmbeddingComposite",
        "chain_break_resolution": "majority vote (SDK default)",
        "chain_strength": req.ferromagnetic_coupling,
        "annealing_time_us": req.annealing_time_us,
    }
    return wire.render_response(rows, timing_table(info.get("timing", {})), metadata)
