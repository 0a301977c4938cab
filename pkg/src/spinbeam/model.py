"""Signal model for point-to-point MIMO with 1-bit analogue pre/post-coding.

A transmitter with n_t antennas applies a pre-coding vector f and a receiver
with n_r antennas applies a post-coding vector g, both with entries restricted
to {-1, +1} (a single phase bit per antenna).  For a channel matrix H the
received SNR is

    rho(g, f) = P * |g^T H f|^2 / (n_t * n_r * sigma^2),

where P is the transmit power and sigma^2 the noise variance.  The n_t * n_r
divisor absorbs the power normalization of the unnormalized spin vectors, so
rho is invariant under joint sign flips: rho(g, f) = rho(-g, -f).

This module holds the problem types, the channel generator, the SNR
evaluation, and the two quadratic-form ("Gram") matrices that turn each
one-sided subproblem into a spin quadratic program:

    |g^T H f|^2 = f^T Re((H^H g)(H^H g)^H) f      (g fixed)
                = g^T Re((H f)(H f)^H) g          (f fixed)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionMismatch",
    "SystemParams",
    "ChannelMatrix",
    "SpinVector",
    "CodingPair",
    "generate_channel",
    "evaluate_snr",
    "relaxed_snr",
    "objective_gram_f",
    "objective_gram_g",
    "spin_signs",
    "enumerate_spins",
]


class DimensionMismatch(ValueError):
    """A vector or matrix does not match the system dimensions."""


@dataclass(frozen=True)
class SystemParams:
    """Antenna counts and link-budget scalars.

    power_p and noise_var are linear quantities (not dB).
    """

    n_t: int
    n_r: int
    power_p: float = 1.0
    noise_var: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.n_t, int) or self.n_t < 1:
            raise ValueError(f"n_t must be a positive integer, got {self.n_t!r}")
        if not isinstance(self.n_r, int) or self.n_r < 1:
            raise ValueError(f"n_r must be a positive integer, got {self.n_r!r}")
        if not (math.isfinite(self.power_p) and self.power_p > 0):
            raise ValueError(f"power_p must be finite and > 0, got {self.power_p!r}")
        if not (math.isfinite(self.noise_var) and self.noise_var > 0):
            raise ValueError(f"noise_var must be finite and > 0, got {self.noise_var!r}")


@dataclass(frozen=True)
class ChannelMatrix:
    """An n_r x n_t complex channel realization.

    seed records how the realization was drawn (None for externally supplied
    matrices); it is metadata only and never consulted by the algorithms.
    """

    entries: np.ndarray
    seed: int | None = None

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise ValueError(f"channel entries must be a 2-d matrix, got shape {entries.shape}")
        if not (np.all(np.isfinite(entries.real)) and np.all(np.isfinite(entries.imag))):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "entries", entries)

    @property
    def n_r(self) -> int:
        return self.entries.shape[0]

    @property
    def n_t(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True, eq=False)
class SpinVector:
    """A vector with entries in {-1, +1}, stored as int8."""

    spins: np.ndarray

    def __post_init__(self) -> None:
        spins = np.asarray(self.spins)
        if spins.ndim != 1 or spins.size < 1:
            raise ValueError(f"spin vector must be 1-d and non-empty, got shape {spins.shape}")
        if not np.all(np.isin(spins, (-1, 1))):
            raise ValueError("spin vector entries must be exactly -1 or +1")
        object.__setattr__(self, "spins", spins.astype(np.int8))

    def __len__(self) -> int:
        return int(self.spins.size)

    @property
    def n(self) -> int:
        return int(self.spins.size)

    @classmethod
    def all_plus(cls, n: int) -> "SpinVector":
        return cls(np.ones(n, dtype=np.int8))


@dataclass(frozen=True, eq=False)
class CodingPair:
    """A (post, pre) spin vector pair together with its achieved SNR."""

    g: SpinVector
    f: SpinVector
    snr: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.snr) and self.snr >= 0):
            raise ValueError(f"snr must be finite and >= 0, got {self.snr!r}")

    @classmethod
    def from_vectors(
        cls, params: SystemParams, h: ChannelMatrix, g: SpinVector, f: SpinVector
    ) -> "CodingPair":
        return cls(g=g, f=f, snr=evaluate_snr(params, h, g, f))


def generate_channel(params: SystemParams, seed: int) -> ChannelMatrix:
    """Draw an i.i.d. CN(0, 1) channel from a counter-based generator.

    A fresh Philox stream is keyed by the seed, so channel i of a campaign is
    reproducible on its own, independent of how many other channels were drawn
    before it.  The real block is drawn first, then the imaginary block.
    """
    rng = np.random.Generator(np.random.Philox(key=seed % 2**64))
    shape = (params.n_r, params.n_t)
    entries = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    return ChannelMatrix(entries=entries, seed=seed)


def _check_dims(params: SystemParams, h: ChannelMatrix, g, f) -> None:
    if h.entries.shape != (params.n_r, params.n_t):
        raise DimensionMismatch(
            f"channel matrix is {h.entries.shape[0]}x{h.entries.shape[1]}, "
            f"expected n_r x n_t = {params.n_r}x{params.n_t}"
        )
    if g is not None and len(g) != params.n_r:
        raise DimensionMismatch(
            f"post-coding vector g has length {len(g)}, expected n_r = {params.n_r}"
        )
    if f is not None and len(f) != params.n_t:
        raise DimensionMismatch(
            f"pre-coding vector f has length {len(f)}, expected n_t = {params.n_t}"
        )


def relaxed_snr(params: SystemParams, h: ChannelMatrix, g: np.ndarray, f: np.ndarray) -> float:
    """SNR formula evaluated on arbitrary (possibly complex) vectors.

    Same expression as evaluate_snr, with the plain transpose kept on g.  Used
    by the iterative designers to track convergence on complex relaxations
    before quantization.
    """
    _check_dims(params, h, g, f)
    gain = np.asarray(g) @ h.entries @ np.asarray(f)
    scale = params.power_p / (params.n_t * params.n_r * params.noise_var)
    return float(scale * np.abs(gain) ** 2)


def evaluate_snr(params: SystemParams, h: ChannelMatrix, g: SpinVector, f: SpinVector) -> float:
    """Received SNR rho(g, f) for a spin coding pair."""
    return relaxed_snr(params, h, g.spins, f.spins)


def objective_gram_f(h: ChannelMatrix, g: SpinVector) -> np.ndarray:
    """Real n_t x n_t matrix Q with f^T Q f = |g^T H f|^2 for every spin f.

    Q = Re(a a^H) with a = H^H g; the complex outer product is Hermitian rank
    one, and taking the real part preserves the quadratic form on real f.
    """
    if len(g) != h.n_r:
        raise DimensionMismatch(
            f"post-coding vector g has length {len(g)}, expected n_r = {h.n_r}"
        )
    a = h.entries.conj().T @ g.spins.astype(np.float64)
    return np.outer(a, a.conj()).real


def objective_gram_g(h: ChannelMatrix, f: SpinVector) -> np.ndarray:
    """Real n_r x n_r matrix R with g^T R g = |g^T H f|^2 for every spin g."""
    if len(f) != h.n_t:
        raise DimensionMismatch(
            f"pre-coding vector f has length {len(f)}, expected n_t = {h.n_t}"
        )
    b = h.entries @ f.spins.astype(np.float64)
    return np.outer(b, b.conj()).real


def spin_signs(values: np.ndarray) -> np.ndarray:
    """Quantize real values to spins with the convention sign(0) = +1."""
    values = np.asarray(values)
    if np.iscomplexobj(values):
        raise ValueError("spin_signs expects real values; take .real first")
    return np.where(values >= 0, 1, -1).astype(np.int8)


def enumerate_spins(n: int, fix_first: bool = True) -> np.ndarray:
    """All spin vectors of length n as rows of an int8 matrix.

    With fix_first the first element is pinned to +1 (one vector per joint
    sign class), giving 2^(n-1) rows.  Row order defines the enumeration
    index used for tie-breaking: the free positions follow the row index's
    binary digits, most significant first, with bit 0 -> +1 and bit 1 -> -1,
    so row 0 is the all +1 vector.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    free = n - 1 if fix_first else n
    if free > 26:
        raise ValueError(f"refusing to enumerate 2^{free} spin vectors")
    idx = np.arange(2**free, dtype=np.int64)[:, None]
    shifts = np.arange(free - 1, -1, -1, dtype=np.int64)
    bits = (idx >> shifts) & 1
    spins = (1 - 2 * bits).astype(np.int8)
    if fix_first:
        spins = np.hstack([np.ones((spins.shape[0], 1), dtype=np.int8), spins])
    return spins
