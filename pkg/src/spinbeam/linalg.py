"""Complex linear-algebra kernels: leading singular triplet and rank-1 eigenvectors.

Everything spectral the designers need is either the leading singular triplet
of the channel (power iteration on the smaller of H^H H and H H^H) or the top
eigenvector of a rank-1 Hermitian outer product a a^H, which is a/||a|| in
closed form.  No general-purpose eigensolver is used outside the test oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from spinbeam.model import ChannelMatrix

__all__ = ["SingularTriplet", "ConvergenceError", "leading_triplet", "rank1_top_eigvec"]

DEFAULT_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """Power iteration ran out of iterations; carries the last residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class SingularTriplet:
    """Leading triplet (lambda_1, u_1, v_1) with H v_1 ~= sqrt(lambda_1) u_1."""

    sigma1_sq: float
    u1: np.ndarray
    v1: np.ndarray

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma1_sq) and self.sigma1_sq >= 0):
            raise ValueError(f"sigma1_sq must be finite and >= 0, got {self.sigma1_sq!r}")
        for name, vec in (("u1", self.u1), ("v1", self.v1)):
            norm = float(np.linalg.norm(vec))
            if abs(norm - 1.0) > 1e-10:
                raise ValueError(f"{name} must be unit norm, got ||{name}|| = {norm!r}")


def default_max_iter(n_t: int, n_r: int, tol: float) -> int:
    return 10 * max(n_t, n_r) * math.ceil(math.log10(1.0 / tol))


def leading_triplet(
    h: ChannelMatrix,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    start_seed: int = 0,
) -> SingularTriplet:
    """Leading singular triplet of H by power iteration on the smaller Gram.

    The start vector is drawn from a Philox stream keyed by start_seed, so the
    output is deterministic for a fixed H (per platform).  Convergence is
    declared when ||A x - lambda x|| <= tol * lambda for the iterated Gram A.
    The global phase is fixed so the largest-magnitude entry of v1 is real and
    positive (ties broken toward the lowest index); u1 is rotated by the same
    phase so the singular-pair relation is preserved.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    mat = h.entries
    if np.abs(mat).max() == 0.0:
        raise ValueError("zero channel matrix has no leading singular triplet")
    n_r, n_t = mat.shape
    if max_iter is None:
        max_iter = default_max_iter(n_t, n_r, tol)
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter!r}")

    # Iterate on the smaller of H^H H (n_t x n_t) and H H^H (n_r x n_r).
    on_right = n_t <= n_r
    gram = mat.conj().T @ mat if on_right else mat @ mat.conj().T

    rng = np.random.Generator(np.random.Philox(key=start_seed % 2**64))
    dim = gram.shape[0]
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    x /= np.linalg.norm(x)

    resid = math.inf
    for _ in range(max_iter):
        y = gram @ x
        lam = float((x.conj() @ y).real)
        resid = float(np.linalg.norm(y - lam * x))
        if lam > 0 and resid <= tol * lam:
            break
        norm_y = float(np.linalg.norm(y))
        if norm_y == 0.0:
            # start vector happened to lie in the nullspace; re-draw once
            x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            x /= np.linalg.norm(x)
            continue
        x = y / norm_y
    else:
        raise ConvergenceError(
            f"power iteration did not converge within {max_iter} iterations "
            f"(last residual {resid:.3e}); retry with a different start_seed",
            residual=resid,
        )

    if on_right:
        v1 = x
        w = mat @ v1
        sigma = float(np.linalg.norm(w))
        u1 = w / sigma
    else:
        u1 = x
        w = mat.conj().T @ u1
        sigma = float(np.linalg.norm(w))
        v1 = w / sigma

    # Phase gauge: rotate the pair so the largest-magnitude entry of v1 is
    # real-positive; np.argmax takes the first maximum, i.e. the lowest index.
    k = int(np.argmax(np.abs(v1)))
    phase = v1[k] / abs(v1[k])
    v1 = v1 * phase.conjugate()
    u1 = u1 * phase.conjugate()

    return SingularTriplet(sigma1_sq=sigma * sigma, u1=u1, v1=v1)


def rank1_top_eigvec(a: np.ndarray) -> np.ndarray:
    """Top eigenvector of the rank-1 Hermitian matrix a a^H, i.e. a/||a||."""
    a = np.asarray(a, dtype=np.complex128)
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        raise ValueError("zero vector has no direction")
    return a / norm
