"""Subprocess client for external samplers speaking the QUBO exchange protocol.

One request document goes to the bridge process on stdin, one response comes
back on stdout.  The request carries the upper triangle of the coefficient
matrix in the folded convention (diagonal entries M_ii, off-diagonal entries
2*M_ij, zeros omitted), so the wire energy sum_{i<=j} v_ij b_i b_j equals the
instance's b^T M b exactly; halving on decode is lossless in binary floating
point.  Responses carry samples as 0/1 strings plus a stage->microseconds
timing map; a document with an "error" key reports a remote failure.

The client validates every reported energy against local recomputation from
the instance's own coefficients and rejects the response beyond 1e-6
relative, but keeps the reported values: a faithful local bridge then
round-trips sample sets bitwise (JSON float serialization is exact), which is
what the loopback tests pin down.  The sampler seed is not a wire field;
deterministic bridges take it on their own command line.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass
from typing import Any

import numpy as np

from spinbeam.qubo import (
    QuboInstance,
    Sample,
    SampleSet,
    SamplerConfig,
    check_sample_energies,
)

__all__ = [
    "BridgeError",
    "BridgeTransportError",
    "BridgeProtocolError",
    "BridgeRemoteError",
    "BridgeEnergyMismatch",
    "BridgeEndpoint",
    "BridgeSampler",
    "encode_request",
    "decode_request",
    "encode_response",
    "decode_response",
    "encode_error",
    "bridge_client_sample",
]

DEFAULT_ANNEAL_TIME_US = 20.0
DEFAULT_FERRO_COUPLING = 3.0


class BridgeError(RuntimeError):
    """Base class for bridge client failures."""


class BridgeTransportError(BridgeError):
    """The bridge process could not be run or produced no usable output."""


class BridgeProtocolError(BridgeError):
    """The response document is malformed; the message names the offender."""


class BridgeRemoteError(BridgeError):
    """The bridge answered with an error document."""

    def __init__(self, code: str, detail: str):
        super().__init__(f"bridge reported '{code}': {detail}")
        self.code = code
        self.detail = detail


class BridgeEnergyMismatch(BridgeError):
    """A reported sample energy disagrees with local recomputation."""


@dataclass(frozen=True)
class BridgeEndpoint:
    """How to reach the bridge: an argv to spawn per request, and a timeout."""

    argv: tuple[str, ...]
    timeout_s: float = 120.0

    def __post_init__(self) -> None:
        if not self.argv:
            raise ValueError("endpoint argv must not be empty")
        if not (self.timeout_s > 0):
            raise ValueError(f"timeout_s must be > 0, got {self.timeout_s!r}")


def encode_request(
    inst: QuboInstance,
    cfg: SamplerConfig,
    annealing_time_us: float = DEFAULT_ANNEAL_TIME_US,
    ferromagnetic_coupling: float = DEFAULT_FERRO_COUPLING,
) -> dict[str, Any]:
    coeffs = []
    m = inst.coeffs
    for i in range(inst.n):
        if m[i, i] != 0.0:
            coeffs.append([i, i, float(m[i, i])])
        for j in range(i + 1, inst.n):
            if m[i, j] != 0.0:
                coeffs.append([i, j, float(2.0 * m[i, j])])
    return {
        "n": inst.n,
        "sense": inst.sense,
        "coeffs": coeffs,
        "num_reads": cfg.num_reads,
        "annealing_time_us": annealing_time_us,
        "ferromagnetic_coupling": ferromagnetic_coupling,
    }


def _require(doc: dict[str, Any], field: str, where: str) -> Any:
    if field not in doc:
        raise BridgeProtocolError(f"{where} is missing required field '{field}'")
    return doc[field]


def decode_request(doc: dict[str, Any]) -> tuple[QuboInstance, int, float, float]:
    """Instance (scale 1, offset 0: wire energies are instance units) + knobs."""
    if not isinstance(doc, dict):
        raise BridgeProtocolError("request must be a JSON object")
    n = _require(doc, "n", "request")
    if not isinstance(n, int) or n < 1:
        raise BridgeProtocolError(f"request field 'n' must be a positive integer, got {n!r}")
    sense = _require(doc, "sense", "request")
    if sense != "min":
        raise BridgeProtocolError(f"request field 'sense' must be 'min', got {sense!r}")
    num_reads = _require(doc, "num_reads", "request")
    if not isinstance(num_reads, int) or num_reads < 1:
        raise BridgeProtocolError(
            f"request field 'num_reads' must be a positive integer, got {num_reads!r}"
        )
    anneal_us = float(_require(doc, "annealing_time_us", "request"))
    if not anneal_us > 0:
        raise BridgeProtocolError(
            f"request field 'annealing_time_us' must be > 0, got {anneal_us!r}"
        )
    coupling = float(_require(doc, "ferromagnetic_coupling", "request"))

    entries = _require(doc, "coeffs", "request")
    m = np.zeros((n, n))
    seen = set()
    for entry in entries:
        try:
            i, j, value = entry
        except (TypeError, ValueError):
            raise BridgeProtocolError(f"coeffs entry {entry!r} is not an (i, j, value) triple")
        if not (isinstance(i, int) and isinstance(j, int) and 0 <= i <= j < n):
            raise BridgeProtocolError(f"coeffs entry ({i!r}, {j!r}) violates 0 <= i <= j < n")
        if (i, j) in seen:
            raise BridgeProtocolError(f"coeffs entry ({i}, {j}) appears twice")
        seen.add((i, j))
        value = float(value)
        if i == j:
            m[i, i] = value
        else:
            m[i, j] = m[j, i] = value / 2.0
    try:
        inst = QuboInstance(coeffs=m, scale=1.0, offset=0.0)
    except ValueError as exc:
        raise BridgeProtocolError(f"decoded coefficients invalid: {exc}")
    return inst, num_reads, anneal_us, coupling


def encode_response(
    sample_set: SampleSet,
    timing: dict[str, float],
    metadata: dict[str, Any] | None = None,
) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "samples": [
            {
                "bits": "".join(str(int(bit)) for bit in s.bits),
                "energy": s.energy,
                "occurrences": s.occurrences,
            }
            for s in sample_set.samples
        ],
        "timing": {stage: float(us) for stage, us in timing.items()},
    }
    if metadata is not None:
        doc["metadata"] = metadata
    return doc


def encode_error(code: str, detail: str) -> dict[str, Any]:
    return {"error": code, "detail": detail}


def decode_response(doc: dict[str, Any], inst: QuboInstance) -> tuple[SampleSet, dict[str, float]]:
    """SampleSet (reported energies, validated locally) and the timing map.

    Raises BridgeRemoteError for error documents, BridgeProtocolError for
    structural problems, BridgeEnergyMismatch when a reported energy strays
    beyond 1e-6 relative from b^T coeffs b.
    """
    if not isinstance(doc, dict):
        raise BridgeProtocolError("response must be a JSON object")
    if "error" in doc:
        raise BridgeRemoteError(str(doc["error"]), str(doc.get("detail", "")))
    raw_samples = _require(doc, "samples", "response")
    timing = _require(doc, "timing", "response")
    if not isinstance(raw_samples, list) or not raw_samples:
        raise BridgeProtocolError("response field 'samples' must be a non-empty list")
    if not isinstance(timing, dict):
        raise BridgeProtocolError("response field 'timing' must be a map")

    merged: dict[bytes, tuple[np.ndarray, float, int]] = {}
    for rank, raw in enumerate(raw_samples):
        if not isinstance(raw, dict):
            raise BridgeProtocolError(f"sample {rank} is not an object")
        bits_str = _require(raw, "bits", f"sample {rank}")
        energy = _require(raw, "energy", f"sample {rank}")
        occurrences = _require(raw, "occurrences", f"sample {rank}")
        if (
            not isinstance(bits_str, str)
            or len(bits_str) != inst.n
            or set(bits_str) - {"0", "1"}
        ):
            raise BridgeProtocolError(
                f"sample {rank} field 'bits' must be a 0/1 string of length {inst.n}"
            )
        if not isinstance(occurrences, int) or occurrences < 1:
            raise BridgeProtocolError(
                f"sample {rank} field 'occurrences' must be a positive integer"
            )
        bits = np.frombuffer(bits_str.encode("ascii"), dtype=np.uint8) - ord("0")
        fb = bits.astype(np.float64)
        recomputed = float(fb @ inst.coeffs @ fb)
        energy = float(energy)
        if abs(energy - recomputed) > 1e-9 + 1e-6 * abs(recomputed):
            raise BridgeEnergyMismatch(
                f"sample {rank} reports energy {energy!r} but recomputation gives "
                f"{recomputed!r} (beyond 1e-6 relative)"
            )
        key = bits.tobytes()
        if key in merged:
            prev_bits, prev_energy, prev_occ = merged[key]
            merged[key] = (prev_bits, prev_energy, prev_occ + occurrences)
        else:
            merged[key] = (bits, energy, occurrences)

    ordered = sorted(merged.values(), key=lambda t: (t[1], t[0].tobytes()))
    samples = tuple(Sample(bits=b, energy=e, occurrences=o) for b, e, o in ordered)
    total = sum(s.occurrences for s in samples)
    return SampleSet(samples=samples, total_reads=total), {
        str(stage): float(us) for stage, us in timing.items()
    }


def bridge_client_sample(
    inst: QuboInstance,
    cfg: SamplerConfig,
    endpoint: BridgeEndpoint,
    annealing_time_us: float = DEFAULT_ANNEAL_TIME_US,
    ferromagnetic_coupling: float = DEFAULT_FERRO_COUPLING,
) -> SampleSet:
    """One request/response round trip; see decode_response for the checks."""
    sample_set, _ = bridge_client_sample_with_timing(
        inst, cfg, endpoint, annealing_time_us, ferromagnetic_coupling
    )
    return sample_set


def bridge_client_sample_with_timing(
    inst: QuboInstance,
    cfg: SamplerConfig,
    endpoint: BridgeEndpoint,
    annealing_time_us: float = DEFAULT_ANNEAL_TIME_US,
    ferromagnetic_coupling: float = DEFAULT_FERRO_COUPLING,
) -> tuple[SampleSet, dict[str, float]]:
    request = encode_request(inst, cfg, annealing_time_us, ferromagnetic_coupling)
    try:
        proc = subprocess.run(
            list(endpoint.argv),
            input=json.dumps(request),
            capture_output=True,
            text=True,
            timeout=endpoint.timeout_s,
        )
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise BridgeTransportError(f"failed to run bridge {endpoint.argv}: {exc}")
    if proc.returncode != 0:
        tail = proc.stderr.strip().splitlines()[-1] if proc.stderr.strip() else "no stderr"
        raise BridgeTransportError(
            f"bridge exited with status {proc.returncode}: {tail}"
        )
    try:
        doc = json.loads(proc.stdout)
    except json.JSONDecodeError as exc:
        raise BridgeProtocolError(f"response is not valid JSON: {exc}")
    return decode_response(doc, inst)


@dataclass(frozen=True)
class BridgeSampler:
    """Sampler facade over the bridge client, pluggable into qa_design."""

    endpoint: BridgeEndpoint
    annealing_time_us: float = DEFAULT_ANNEAL_TIME_US
    ferromagnetic_coupling: float = DEFAULT_FERRO_COUPLING

    def sample(self, inst: QuboInstance, cfg: SamplerConfig) -> SampleSet:
        return bridge_client_sample(
            inst, cfg, self.endpoint, self.annealing_time_us, self.ferromagnetic_coupling
        )


def serve_stub(request_text: str, backend: str, cfg: SamplerConfig, keep: int | None = 32) -> str:
    """One-shot local server: decode, solve in process ('exact' or 'sa'), encode.

    Used by the CLI's bridge-stub subcommand (loopback testing without a
    device).  num_reads comes from the request; seed/sweeps/betas come from
    cfg, i.e. from the stub's own command line.  Always returns a document;
    failures become error documents.
    """
    import time

    from spinbeam.qubo import solve_exact, solve_sa

    if backend not in ("exact", "sa"):
        raise ValueError(f"backend must be 'exact' or 'sa', got {backend!r}")
    try:
        doc = json.loads(request_text)
    except json.JSONDecodeError as exc:
        return json.dumps(encode_error("parse", f"request is not valid JSON: {exc}"))
    try:
        inst, num_reads, anneal_us, coupling = decode_request(doc)
    except BridgeProtocolError as exc:
        return json.dumps(encode_error("parse", str(exc)))

    t0 = time.perf_counter_ns()
    try:
        if backend == "exact":
            sample_set = solve_exact(inst, keep=keep)
        else:
            sample_set = solve_sa(
                inst,
                SamplerConfig(
                    num_reads=num_reads,
                    seed=cfg.seed,
                    sa_sweeps=cfg.sa_sweeps,
                    sa_beta_range=cfg.sa_beta_range,
                ),
            )
    except ValueError as exc:
        return json.dumps(encode_error("solve", str(exc)))
    t1 = time.perf_counter_ns()
    response = encode_response(
        sample_set,
        timing={
            "Anneal time": (t1 - t0) / 1000.0,
            "Post processing": (time.perf_counter_ns() - t1) / 1000.0,
        },
        metadata={
            "backend": backend,
            "annealing_time_us": anneal_us,
            "ferromagnetic_coupling": coupling,
        },
    )
    return json.dumps(response)
