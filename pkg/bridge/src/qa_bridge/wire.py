"""Exchange-document codec for the QUBO sampler protocol.

A request is one JSON object with fields n, sense ("min"), coeffs,
num_reads, annealing_time_us, ferromagnetic_coupling.  coeffs lists the
upper triangle as [i, j, value] triples in the folded convention: diagonal
entries carry the matrix diagonal, off-diagonal entries carry twice the
symmetric matrix value, zeros are omitted.  Halving on decode is lossless
in binary floating point, so the decoded matrix reproduces the sender's
exactly.  Instances arrive calibrated, meaning matrix entries in [-1, 1];
anything outside that band is rejected here as a protocol violation rather
than deeper in whichever solve path happens to run.

A response is {samples: [{bits, energy, occurrences}], timing: {stage:
microseconds}} plus optional metadata; failures are {error: code, detail}.

This codec is intentionally independent of the client code that ships with
spinbeam.  Conformance between the two implementations is pinned by tests,
not by shared helpers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

__all__ = [
    "ParseError",
    "Request",
    "parse_request",
    "render_response",
    "render_error",
]

# one part in 1e12 of slack, matching the calibration tolerance downstream
_BAND = 1.0 + 1e-12


class ParseError(ValueError):
    """Request text that does not follow the exchange format."""


@dataclass(frozen=True)
class Request:
    """Decoded instance in full-matrix form; energies are instance units."""

    matrix: np.ndarray
    num_reads: int
    annealing_time_us: float
    ferromagnetic_coupling: float

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _field(doc: dict[str, Any], name: str) -> Any:
    if name not in doc:
        raise ParseError(f"request is missing required field '{name}'")
    return doc[name]


def _strict_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def parse_request(text: str) -> Request:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"request is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ParseError("request must be a JSON object")

    n = _field(doc, "n")
    if not _strict_int(n) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}")
    sense = _field(doc, "sense")
    if sense != "min":
        raise ParseError(f"'sense' must be 'min', got {sense!r}")
    num_reads = _field(doc, "num_reads")
    if not _strict_int(num_reads) or num_reads < 1:
        raise ParseError(f"'num_reads' must be a positive integer, got {num_reads!r}")
    anneal_raw = _field(doc, "annealing_time_us")
    coupling_raw = _field(doc, "ferromagnetic_coupling")
    try:
        anneal_us = float(anneal_raw)
        coupling = float(coupling_raw)
    except (TypeError, ValueError):
        raise ParseError("annealing_time_us and ferromagnetic_coupling must be numbers")
    if not anneal_us > 0:
        raise ParseError(f"'annealing_time_us' must be > 0, got {anneal_us!r}")

    entries = _field(doc, "coeffs")
    if not isinstance(entries, list):
        raise ParseError("'coeffs' must be a list of [i, j, value] triples")
    matrix = np.zeros((n, n))
    seen: set[tuple[int, int]] = set()
    for entry in entries:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise ParseError(f"coeffs entry {entry!r} is not an [i, j, value] triple")
        i, j, value = entry
        if not (_strict_int(i) and _strict_int(j)):
            raise ParseError(f"coeffs indices must be integers, got ({i!r}, {j!r})")
        if not 0 <= i <= j < n:
            raise ParseError(f"coeffs entry ({i}, {j}) violates 0 <= i <= j < n")
        if (i, j) in seen:
            raise ParseError(f"coeffs entry ({i}, {j}) appears twice")
        seen.add((i, j))
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ParseError(f"coeffs entry ({i}, {j}) has a non-numeric value")
        if not np.isfinite(value):
            raise ParseError(f"coeffs entry ({i}, {j}) has a non-finite value")
        # the folded off-diagonal carries twice the matrix entry, so its band
        # is twice as wide
        limit = _BAND if i == j else 2.0 * _BAND
        if abs(value) > limit:
            raise ParseError(
                f"coeffs entry ({i}, {j}) = {value!r} is outside the calibrated band"
            )
        if i == j:
            matrix[i, i] = value
        else:
            matrix[i, j] = matrix[j, i] = value / 2.0

    return Request(
        matrix=matrix,
        num_reads=num_reads,
        annealing_time_us=anneal_us,
        ferromagnetic_coupling=coupling,
    )


def render_response(
    samples: Iterable[tuple[str, float, int]],
    timing: dict[str, float],
    metadata: dict[str, Any] | None = None,
) -> str:
    doc: dict[str, Any] = {
        "samples": [
            {"bits": bits, "energy": float(energy), "occurrences": int(occurrences)}
            for bits, energy, occurrences in samples
        ],
        "timing": {stage: float(us) for stage, us in timing.items()},
    }
    if metadata is not None:
        doc["metadata"] = metadata
    return json.dumps(doc)


def render_error(code: str, detail: str) -> str:
    return json.dumps({"error": code, "detail": detail})
