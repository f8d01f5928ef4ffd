"""Random states and unitaries for tests, self-checks and solver restarts."""

from __future__ import annotations

import numpy as np

from .operators import DensityOperator


def random_ket(dim: int, rng: np.random.Generator, real: bool = False) -> np.ndarray:
    v = rng.standard_normal(dim).astype(np.complex128)
    if not real:
        v = v + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_probabilities(dim: int, rng: np.random.Generator) -> np.ndarray:
    p = rng.dirichlet(np.ones(dim))
    # keep entries well away from zero so log-based measures stay finite
    p = p + 1e-3
    return p / p.sum()


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None,
                   subsystem_dims=None) -> DensityOperator:
    k = dim if rank is None else rank
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityOperator(m / np.trace(m).real, subsystem_dims)


def density_in_basis(probs, unitary: np.ndarray, subsystem_dims=None) -> DensityOperator:
    """``U diag(probs) U^dagger`` with Hermitian symmetrisation."""
    m = (unitary * np.asarray(probs, dtype=float)) @ unitary.conj().T
    m = (m + m.conj().T) / 2
    return DensityOperator(m, subsystem_dims)
