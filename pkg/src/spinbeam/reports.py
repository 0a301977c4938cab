"""Ranked anneal-distribution and timing reports.

The distribution report turns a SampleSet into rows of (rank, spin-domain
objective, occurrence probability), descending in objective, flags the rows
that attain a benchmark energy, and groups each state with its bitwise
complement: complementary states carry the same objective (sign symmetry of
the objective under f -> -f), so each pair forms one symmetry class whose
combined probability is what matters when reading off success rates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from spinbeam.qubo import QuboInstance, SampleSet, energy_to_spin_objective

__all__ = ["AnnealRow", "AnnealDistribution", "TimingTable", "report_anneal_distribution", "report_timing"]


@dataclass(frozen=True, eq=False)
class AnnealRow:
    rank: int
    bits: np.ndarray
    objective: float
    probability: float
    attains_benchmark: bool
    symmetry_class: int
    class_probability: float


@dataclass(frozen=True, eq=False)
class AnnealDistribution:
    rows: tuple[AnnealRow, ...]
    total_reads: int
    benchmark_energy: float

    def to_text(self) -> str:
        lines = [
            f"{'rank':>4}  {'objective':>14}  {'prob':>8}  {'class':>5}  "
            f"{'class_prob':>10}  {'best':>4}  bits"
        ]
        for row in self.rows:
            lines.append(
                f"{row.rank:>4}  {row.objective:>14.6g}  {row.probability:>8.4f}  "
                f"{row.symmetry_class:>5}  {row.class_probability:>10.4f}  "
                f"{'yes' if row.attains_benchmark else 'no':>4}  "
                + "".join(str(int(b)) for b in row.bits)
            )
        return "\n".join(lines)


def report_anneal_distribution(
    inst: QuboInstance, sample_set: SampleSet, es_energy: float
) -> AnnealDistribution:
    """Ranked distinct solutions, benchmark flags, merged symmetry classes.

    es_energy is in instance-energy units; a row attains it when its energy
    is within 1e-9 (relative, floored at 1) above it.
    """
    band = es_energy + 1e-9 * max(1.0, abs(es_energy))

    # ascending energy == descending spin objective (affine with scale > 0)
    class_ids: dict[bytes, int] = {}
    class_prob: dict[int, float] = {}
    assigned: list[int] = []
    for s in sample_set.samples:
        key = s.bits.tobytes()
        twin = (1 - s.bits).astype(np.uint8).tobytes()
        canonical = min(key, twin)
        if canonical not in class_ids:
            class_ids[canonical] = len(class_ids)
        cid = class_ids[canonical]
        class_prob[cid] = class_prob.get(cid, 0.0) + s.occurrences / sample_set.total_reads
        assigned.append(cid)

    rows = tuple(
        AnnealRow(
            rank=rank + 1,
            bits=s.bits,
            objective=energy_to_spin_objective(inst, s.energy),
            probability=s.occurrences / sample_set.total_reads,
            attains_benchmark=s.energy <= band,
            symmetry_class=cid,
            class_probability=class_prob[cid],
        )
        for rank, (s, cid) in enumerate(zip(sample_set.samples, assigned))
    )
    return AnnealDistribution(
        rows=rows, total_reads=sample_set.total_reads, benchmark_energy=es_energy
    )


@dataclass(frozen=True, eq=False)
class TimingTable:
    """Stage timings in microseconds plus a computed total row."""

    stages: tuple[tuple[str, float], ...]

    @property
    def total_us(self) -> float:
        return sum(us for _, us in self.stages)

    def to_text(self) -> str:
        width = max([len(name) for name, _ in self.stages] + [len("total")])
        lines = [f"{name:<{width}}  {us:>12.1f} us" for name, us in self.stages]
        lines.append(f"{'total':<{width}}  {self.total_us:>12.1f} us")
        return "\n".join(lines)


def report_timing(stage_times: dict[str, float]) -> TimingTable:
    """Stage names pass through unmodified, in input order; total is computed."""
    stages = []
    for name, us in stage_times.items():
        us = float(us)
        if not np.isfinite(us):
            raise ValueError(f"stage {name!r} has non-finite timing {us!r}")
        stages.append((str(name), us))
    if not stages:
        raise ValueError("timing map must contain at least one stage")
    return TimingTable(stages=tuple(stages))
