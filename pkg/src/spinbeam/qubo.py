"""Spin/binary transforms, QUBO construction, and the two local samplers.

The one-sided spin problem max_f f^T q f (q a real symmetric Gram from the
model module) is rewritten over b = (f + 1)/2 as

    f^T q f = b^T Q0 b + 1^T q 1,      Q0 = 4 q - 4 diag(q 1),

using b_i^2 = b_i to fold the linear terms onto the diagonal.  Q0 is
calibrated to Qn = Q0 / ||Q0||_max so every coefficient lies in [-1, +1], and
the stored instance minimizes b^T (-Qn) b.  The discarded constant 1^T q 1 and
the divisor are kept on the instance so spin-domain objectives can be
reconstructed from energies: objective = offset - scale * energy.

Two samplers share one call shape (sample(inst, cfg) -> SampleSet): an exact
enumerator for ground truth at small n, and a multi-read simulated-annealing
emulator of a probabilistic annealing device, vectorized across reads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from spinbeam.model import SpinVector

__all__ = [
    "QuboInstance",
    "Sample",
    "SampleSet",
    "SamplerConfig",
    "Sampler",
    "ExactSampler",
    "SaSampler",
    "spin_to_binary",
    "binary_to_spin",
    "build_qubo_from_gram",
    "solve_exact",
    "solve_sa",
    "energy_to_spin_objective",
    "spin_objective_to_energy",
    "check_sample_energies",
]

_EXACT_GUARD_N = 24
_EXACT_CHUNK = 2**16


@dataclass(frozen=True, eq=False)
class QuboInstance:
    """A calibrated minimization instance: energy(b) = b^T coeffs b.

    scale is the max-norm divisor applied during calibration (1 for an
    identically zero pre-calibration matrix); offset is the additive constant
    dropped when the spin objective was rewritten in binary variables.
    """

    coeffs: np.ndarray
    scale: float
    offset: float = 0.0
    sense: str = "min"

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if coeffs.ndim != 2 or coeffs.shape[0] != coeffs.shape[1] or coeffs.shape[0] < 1:
            raise ValueError(f"coeffs must be square, got shape {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coeffs must be finite")
        if np.abs(coeffs - coeffs.T).max() > 1e-12:
            raise ValueError("coeffs must be symmetric within 1e-12")
        if np.abs(coeffs).max() > 1.0 + 1e-12:
            raise ValueError("calibrated coefficients must lie in [-1, +1]")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be finite and > 0, got {self.scale!r}")
        if self.sense != "min":
            raise ValueError(f"sense must be 'min', got {self.sense!r}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def n(self) -> int:
        return int(self.coeffs.shape[0])


@dataclass(frozen=True, eq=False)
class Sample:
    """One distinct binary state with its energy and occurrence count."""

    bits: np.ndarray
    energy: float
    occurrences: int

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits)
        if bits.ndim != 1 or not np.all(np.isin(bits, (0, 1))):
            raise ValueError("bits must be a 1-d 0/1 vector")
        if self.occurrences < 1:
            raise ValueError(f"occurrences must be >= 1, got {self.occurrences!r}")
        object.__setattr__(self, "bits", bits.astype(np.uint8))


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Distinct samples sorted by ascending energy (ties: lexicographic bits)."""

    samples: tuple[Sample, ...]
    total_reads: int

    def __post_init__(self) -> None:
        if not self.samples:
            raise ValueError("a sample set must contain at least one sample")
        if sum(s.occurrences for s in self.samples) != self.total_reads:
            raise ValueError("occurrences must sum to total_reads")
        keys = [(s.energy, s.bits.tobytes()) for s in self.samples]
        if any(keys[i] > keys[i + 1] for i in range(len(keys) - 1)):
            raise ValueError("samples must be sorted by (energy, bits)")

    @property
    def best(self) -> Sample:
        return self.samples[0]


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs shared by the samplers; sa_* fields apply to solve_sa only."""

    num_reads: int = 1000
    seed: int = 0
    sa_sweeps: int = 100
    sa_beta_range: tuple[float, float] = (0.1, 10.0)

    def __post_init__(self) -> None:
        if not isinstance(self.num_reads, int) or self.num_reads < 1:
            raise ValueError(f"num_reads must be an integer >= 1, got {self.num_reads!r}")
        if not isinstance(self.sa_sweeps, int) or self.sa_sweeps < 1:
            raise ValueError(f"sa_sweeps must be an integer >= 1, got {self.sa_sweeps!r}")
        lo, hi = self.sa_beta_range
        if not (0 < lo < hi):
            raise ValueError(f"sa_beta_range must be increasing and positive, got {self.sa_beta_range!r}")


class Sampler(Protocol):
    """Anything that can draw samples from a QUBO instance."""

    def sample(self, inst: QuboInstance, cfg: SamplerConfig) -> SampleSet: ...


def spin_to_binary(f: SpinVector) -> np.ndarray:
    """Map spins to bits via b = (s + 1) / 2."""
    return ((f.spins.astype(np.int16) + 1) // 2).astype(np.uint8)


def binary_to_spin(b: np.ndarray) -> SpinVector:
    """Map bits to spins via s = 2 b - 1."""
    b = np.asarray(b)
    if b.ndim != 1 or not np.all(np.isin(b, (0, 1))):
        raise ValueError("binary vector entries must be 0 or 1")
    return SpinVector((2 * b.astype(np.int16) - 1).astype(np.int8))


def build_qubo_from_gram(q_real: np.ndarray) -> QuboInstance:
    """Calibrated minimization QUBO whose argmin matches argmax of f^T q f."""
    q = np.asarray(q_real, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError(f"gram matrix must be square, got shape {q.shape}")
    if np.abs(q - q.T).max() > 1e-9:
        raise ValueError("gram matrix is not symmetric within 1e-9")
    q = (q + q.T) / 2.0

    q0 = 4.0 * q - 4.0 * np.diag(q @ np.ones(q.shape[0]))
    scale = float(np.abs(q0).max())
    if scale == 0.0:
        scale = 1.0
    coeffs = -q0 / scale + 0.0  # + 0.0 normalizes -0.0 entries
    offset = float(np.ones(q.shape[0]) @ q @ np.ones(q.shape[0]))
    return QuboInstance(coeffs=coeffs, scale=scale, offset=offset)


def energy_to_spin_objective(inst: QuboInstance, energy: float) -> float:
    """Spin-domain objective f^T q f of a state with the given instance energy."""
    return inst.offset - inst.scale * energy


def spin_objective_to_energy(inst: QuboInstance, objective: float) -> float:
    """Instance energy corresponding to a spin-domain objective value."""
    return (inst.offset - objective) / inst.scale


def _bits_from_indices(idx: np.ndarray, n: int) -> np.ndarray:
    """Rows of bits for the given state indices, most significant bit first."""
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8)


def solve_exact(inst: QuboInstance, keep: int | None = 32) -> SampleSet:
    """Enumerate all 2^n states; return the lowest-keep (or all for keep=None).

    Output order is ascending energy with lexicographic bits as tie-break;
    every sample has occurrences=1 and total_reads equals the sample count.
    """
    n = inst.n
    if n > _EXACT_GUARD_N:
        raise ValueError(f"exact enumeration guarded at n <= {_EXACT_GUARD_N}, got n = {n}")
    if keep is not None and keep < 1:
        raise ValueError(f"keep must be >= 1 or None, got {keep!r}")

    m = inst.coeffs
    total = 1 << n
    cand_idx = np.empty(0, dtype=np.int64)
    cand_energy = np.empty(0, dtype=np.float64)
    for start in range(0, total, _EXACT_CHUNK):
        idx = np.arange(start, min(start + _EXACT_CHUNK, total), dtype=np.int64)
        bits = _bits_from_indices(idx, n).astype(np.float64)
        energies = np.einsum("bi,bi->b", bits @ m, bits)
        cand_idx = np.concatenate([cand_idx, idx])
        cand_energy = np.concatenate([cand_energy, energies])
        if keep is not None and cand_idx.size > keep:
            # bits index order is lexicographic order, so (energy, index) is
            # exactly the output total order; truncation loses nothing
            order = np.lexsort((cand_idx, cand_energy))[:keep]
            cand_idx = cand_idx[order]
            cand_energy = cand_energy[order]

    order = np.lexsort((cand_idx, cand_energy))
    samples = tuple(
        Sample(bits=_bits_from_indices(cand_idx[o : o + 1], n)[0], energy=float(cand_energy[o]), occurrences=1)
        for o in order
    )
    return SampleSet(samples=samples, total_reads=len(samples))


def solve_sa(inst: QuboInstance, cfg: SamplerConfig) -> SampleSet:
    """Multi-read single-spin-flip Metropolis annealer, vectorized across reads.

    All randomness comes from one Philox block keyed by cfg.seed: row r of the
    block drives read r (its start state and one acceptance draw per proposal),
    so the output is deterministic given the seed and independent of how reads
    are scheduled.  Inverse temperature follows a geometric ladder across
    sweeps; each sweep proposes one flip per variable in index order.
    """
    n = inst.n
    m = inst.coeffs
    reads = cfg.num_reads
    sweeps = cfg.sa_sweeps

    rng = np.random.Generator(np.random.Philox(key=cfg.seed % 2**64))
    u = rng.random((reads, n + sweeps * n))
    b = (u[:, :n] < 0.5).astype(np.float64)
    g = b @ m  # row r holds b_r^T M, maintained incrementally
    betas = np.geomspace(cfg.sa_beta_range[0], cfg.sa_beta_range[1], sweeps)

    col = n
    for s in range(sweeps):
        beta = betas[s]
        for i in range(n):
            delta = 1.0 - 2.0 * b[:, i]
            d_energy = 2.0 * delta * g[:, i] + m[i, i]
            accept = (d_energy <= 0.0) | (
                u[:, col] < np.exp(-np.minimum(beta * d_energy, 700.0))
            )
            step = np.where(accept, delta, 0.0)
            b[:, i] += step
            g += step[:, None] * m[i][None, :]
            col += 1

    # merge duplicate final states and recompute their energies exactly
    bits = b.astype(np.uint8)
    states, counts = np.unique(bits, axis=0, return_counts=True)
    energies = np.einsum("bi,bi->b", states.astype(np.float64) @ m, states.astype(np.float64))
    order = sorted(range(len(counts)), key=lambda o: (energies[o], states[o].tobytes()))
    samples = tuple(
        Sample(bits=states[o], energy=float(energies[o]), occurrences=int(counts[o]))
        for o in order
    )
    return SampleSet(samples=samples, total_reads=reads)


@dataclass(frozen=True)
class ExactSampler:
    """Sampler facade over solve_exact (cfg is ignored; enumeration is exact)."""

    keep: int | None = 32

    def sample(self, inst: QuboInstance, cfg: SamplerConfig) -> SampleSet:
        return solve_exact(inst, keep=self.keep)


@dataclass(frozen=True)
class SaSampler:
    """Sampler facade over solve_sa."""

    def sample(self, inst: QuboInstance, cfg: SamplerConfig) -> SampleSet:
        return solve_sa(inst, cfg)


def check_sample_energies(
    inst: QuboInstance, sample_set: SampleSet, atol: float = 1e-9, rtol: float = 0.0
) -> None:
    """Raise if any reported energy disagrees with b^T coeffs b."""
    for rank, s in enumerate(sample_set.samples):
        bits = s.bits.astype(np.float64)
        expected = float(bits @ inst.coeffs @ bits)
        if abs(s.energy - expected) > atol + rtol * abs(expected):
            raise ValueError(
                f"sample {rank} energy {s.energy!r} disagrees with recomputed "
                f"{expected!r} (atol={atol}, rtol={rtol})"
            )
