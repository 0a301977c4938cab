"""Classical spin pre/post-coding designers.

Three families:

* exhaustive_search: the global benchmark.  Enumerates one representative per
  joint sign class (first element of f and g pinned to +1, sign symmetry of
  rho), so the search space is 2^(n_t + n_r - 2) pairs.
* svd_sign_design: one-shot sign quantization of the leading singular pair;
  sign(Re(v1)) minimizes ||v1 - f||^2 over the spin cube.
* rq_design / rqm_design: alternating maximizers of the one-sided Rayleigh
  quotients.  rq_design quantizes inside the loop (spin iterates); rqm_design
  iterates on the complex relaxations and quantizes once on exit, which makes
  its inner loop exactly power iteration on H H^H.

Both iterative designers stop when the relative SNR change drops below delta
or after K iterations, and return the last iterate (not the best seen); no
monotonicity is guaranteed for the quantized alternation, which is why
DesignResult carries the per-iteration trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from spinbeam.linalg import leading_triplet, rank1_top_eigvec
from spinbeam.model import (
    ChannelMatrix,
    CodingPair,
    SpinVector,
    SystemParams,
    enumerate_spins,
    evaluate_snr,
    relaxed_snr,
    spin_signs,
)

__all__ = [
    "IterControl",
    "DesignResult",
    "SizeGuardExceeded",
    "DesignBreakdown",
    "exhaustive_search",
    "svd_sign_design",
    "rq_design",
    "rqm_design",
]

# cap on chunk size (complex values) when tabulating the exhaustive search
_ES_CHUNK_VALUES = 2**21


class SizeGuardExceeded(ValueError):
    """Problem too large for exhaustive enumeration."""


class DesignBreakdown(RuntimeError):
    """An alternating step degenerated (zero direction); carries the iteration."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


@dataclass(frozen=True)
class IterControl:
    """Stopping rule for the alternating designers: tolerance delta and cap K."""

    rel_tol_delta: float = 0.01
    max_iters_k: int = 10

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol_delta < 1.0):
            raise ValueError(f"rel_tol_delta must lie in (0, 1), got {self.rel_tol_delta!r}")
        if not isinstance(self.max_iters_k, int) or self.max_iters_k < 1:
            raise ValueError(f"max_iters_k must be an integer >= 1, got {self.max_iters_k!r}")


@dataclass(frozen=True, eq=False)
class DesignResult:
    """Outcome of one design run.

    trace holds the per-iteration SNR values (for rqm_design these are the
    complex-relaxation values the stopping rule saw).  relaxation carries the
    final complex (g_r, f_r) pair for designers that iterate on relaxations.
    failed_restarts counts sampler-failed restarts in the annealing designer.
    """

    pair: CodingPair
    iterations_used: int
    converged_by_tolerance: bool
    trace: tuple[float, ...] | None = None
    relaxation: tuple[np.ndarray, np.ndarray] | None = None
    failed_restarts: int = 0

    def __post_init__(self) -> None:
        if self.iterations_used < 1:
            raise ValueError(f"iterations_used must be >= 1, got {self.iterations_used!r}")
        if self.trace is not None and len(self.trace) != self.iterations_used:
            raise ValueError(
                f"trace length {len(self.trace)} != iterations_used {self.iterations_used}"
            )


def exhaustive_search(params: SystemParams, h: ChannelMatrix) -> DesignResult:
    """Globally optimal pair by enumeration over joint sign classes.

    Enumeration order is g-index major, f-index minor (see enumerate_spins for
    the within-vector order); ties break toward the lowest enumeration index.
    """
    if params.n_t + params.n_r > 30:
        raise SizeGuardExceeded(
            f"n_t + n_r = {params.n_t + params.n_r} exceeds 30 "
            f"(2^{params.n_t + params.n_r - 2} pairs); use the annealing designer qa_design"
        )
    _require_shape(params, h)

    f_table = enumerate_spins(params.n_t).astype(np.float64)
    g_table = enumerate_spins(params.n_r).astype(np.float64)
    hf = h.entries @ f_table.T  # n_r x 2^(n_t-1)

    n_f = f_table.shape[0]
    chunk_rows = max(1, _ES_CHUNK_VALUES // n_f)
    best_val = -1.0
    best_gi = 0
    best_fi = 0
    for start in range(0, g_table.shape[0], chunk_rows):
        block = g_table[start : start + chunk_rows]
        vals = np.abs(block @ hf) ** 2
        flat = int(np.argmax(vals))
        if vals.flat[flat] > best_val:
            best_val = float(vals.flat[flat])
            best_gi = start + flat // n_f
            best_fi = flat % n_f

    g = SpinVector(g_table[best_gi].astype(np.int8))
    f = SpinVector(f_table[best_fi].astype(np.int8))
    pair = CodingPair.from_vectors(params, h, g, f)
    return DesignResult(
        pair=pair, iterations_used=1, converged_by_tolerance=False, trace=(pair.snr,)
    )


def svd_sign_design(
    params: SystemParams,
    h: ChannelMatrix,
    tol: float = 1e-10,
    max_iter: int | None = None,
) -> DesignResult:
    """Sign-quantized leading singular pair: f = sign(Re(v1)), g = sign(Re(u1))."""
    _require_shape(params, h)
    trip = leading_triplet(h, tol=tol, max_iter=max_iter)
    f = SpinVector(spin_signs(trip.v1.real))
    g = SpinVector(spin_signs(trip.u1.real))
    pair = CodingPair.from_vectors(params, h, g, f)
    return DesignResult(
        pair=pair, iterations_used=1, converged_by_tolerance=False, trace=(pair.snr,)
    )


def rq_design(
    params: SystemParams,
    h: ChannelMatrix,
    ctrl: IterControl,
    g0: SpinVector | None = None,
    f0: SpinVector | None = None,
) -> DesignResult:
    """Alternating Rayleigh-quotient design with in-loop sign quantization.

    Each iteration maximizes the one-sided quotient in closed form (the Gram
    is rank one, so its top eigenvector is the matched direction) and
    quantizes immediately: f <- sign(Re(H^H g / ||.||)), then g <- sign(Re(H f
    / ||.||)).  f0 only seeds rho_old for the first stopping-rule evaluation.
    """
    _require_shape(params, h)
    if g0 is None:
        g0 = SpinVector.all_plus(params.n_r)
    if f0 is None:
        f0 = SpinVector.all_plus(params.n_t)
    if len(g0) != params.n_r:
        raise ValueError(f"g0 has length {len(g0)}, expected n_r = {params.n_r}")

    g = g0
    rho_old = evaluate_snr(params, h, g0, f0)
    trace: list[float] = []
    k = 0
    while True:
        k += 1
        if k > 1:
            rho_old = trace[-1]
        a = h.entries.conj().T @ g.spins.astype(np.float64)
        if np.linalg.norm(a) == 0.0:
            raise DesignBreakdown(f"H^H g vanished at iteration {k}", iteration=k)
        f = SpinVector(spin_signs(rank1_top_eigvec(a).real))
        b = h.entries @ f.spins.astype(np.float64)
        if np.linalg.norm(b) == 0.0:
            raise DesignBreakdown(f"H f vanished at iteration {k}", iteration=k)
        g = SpinVector(spin_signs(rank1_top_eigvec(b).real))
        rho_new = evaluate_snr(params, h, g, f)
        trace.append(rho_new)
        converged = _rel_change(rho_new, rho_old) < ctrl.rel_tol_delta
        if converged or k >= ctrl.max_iters_k:
            break

    pair = CodingPair(g=g, f=f, snr=rho_new)
    return DesignResult(
        pair=pair, iterations_used=k, converged_by_tolerance=converged, trace=tuple(trace)
    )


def rqm_design(
    params: SystemParams,
    h: ChannelMatrix,
    ctrl: IterControl,
    g0_complex: np.ndarray | None = None,
    f0_complex: np.ndarray | None = None,
    seed: int = 0,
) -> DesignResult:
    """Alternating design on complex relaxations, quantized once on exit.

    The loop alternates f_r <- H^H g_r / ||.|| and g_r <- H f_r / ||.||
    (Hermitian pairing of the rank-1 Gram), which is power iteration on
    H H^H.  Convergence is tracked on the SNR formula evaluated with the
    complex iterates; the returned pair is (sign(Re(g_r)), sign(Re(f_r)))
    with its spin-domain SNR.  When g0_complex is omitted, a deterministic
    unit vector is drawn from a Philox stream keyed by seed.
    """
    _require_shape(params, h)
    if g0_complex is None:
        rng = np.random.Generator(np.random.Philox(key=seed % 2**64))
        g0_complex = rng.standard_normal(params.n_r) + 1j * rng.standard_normal(params.n_r)
    g_r = np.asarray(g0_complex, dtype=np.complex128)
    if g_r.shape != (params.n_r,):
        raise ValueError(f"g0_complex has shape {g_r.shape}, expected ({params.n_r},)")
    if np.linalg.norm(g_r) == 0.0:
        raise ValueError("g0_complex must be non-zero")
    if f0_complex is None:
        f0_complex = np.ones(params.n_t, dtype=np.complex128) / math.sqrt(params.n_t)

    rho_old = relaxed_snr(params, h, g_r, np.asarray(f0_complex, dtype=np.complex128))
    trace: list[float] = []
    k = 0
    while True:
        k += 1
        if k > 1:
            rho_old = trace[-1]
        a = h.entries.conj().T @ g_r
        if np.linalg.norm(a) == 0.0:
            raise DesignBreakdown(f"H^H g_r vanished at iteration {k}", iteration=k)
        f_r = rank1_top_eigvec(a)
        b = h.entries @ f_r
        if np.linalg.norm(b) == 0.0:
            raise DesignBreakdown(f"H f_r vanished at iteration {k}", iteration=k)
        g_r = rank1_top_eigvec(b)
        rho_new = relaxed_snr(params, h, g_r, f_r)
        trace.append(rho_new)
        converged = _rel_change(rho_new, rho_old) < ctrl.rel_tol_delta
        if converged or k >= ctrl.max_iters_k:
            break

    f = SpinVector(spin_signs(f_r.real))
    g = SpinVector(spin_signs(g_r.real))
    pair = CodingPair.from_vectors(params, h, g, f)
    return DesignResult(
        pair=pair,
        iterations_used=k,
        converged_by_tolerance=converged,
        trace=tuple(trace),
        relaxation=(g_r, f_r),
    )


def _rel_change(rho_new: float, rho_old: float) -> float:
    # degenerate start (rho_old = 0) must not read as converged
    if rho_old == 0.0:
        return math.inf
    return abs(rho_new - rho_old) / abs(rho_old)


def _require_shape(params: SystemParams, h: ChannelMatrix) -> None:
    if h.entries.shape != (params.n_r, params.n_t):
        raise ValueError(
            f"channel matrix is {h.entries.shape[0]}x{h.entries.shape[1]}, "
            f"expected n_r x n_t = {params.n_r}x{params.n_t}"
        )
