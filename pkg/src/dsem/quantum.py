"""Information measures over pairs of density operators.

Each two-argument measure can be evaluated two ways: ``method="spectral"``
sums over all eigenpairs weighted by the soft-alignment matrix
``W[i, j] = |<a_i|b_j>|^2``; ``method="trace"`` works with operator
functions and matrix traces.  The two routes share only the eigensolver.
"""

from __future__ import annotations

import math

import numpy as np

from . import classical
from .classical import ProbabilityDistribution
from .errors import UsageError
from .operators import (
    ZERO_TOL,
    DensityOperator,
    as_density,
    operator_log2,
    operator_sqrt,
)

# mass of A lying in the kernel of B above which S(A||B) is infinite
SUPPORT_TOL = 1e-10
_METHODS = ("spectral", "trace")


def _pair(a, b) -> tuple[DensityOperator, DensityOperator]:
    a, b = as_density(a), as_density(b)
    if a.dim != b.dim:
        raise UsageError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return a, b


def _check_method(method: str) -> None:
    if method not in _METHODS:
        raise UsageError(f"method must be one of {_METHODS}, got {method!r}")


def von_neumann_entropy(a, method: str = "spectral") -> float:
    """Entropy of ``a`` in bits: ``-Tr(A log2 A)``."""
    _check_method(method)
    a = as_density(a)
    if method == "spectral":
        return classical.shannon_entropy(a.eigenvalues)
    h = -float(np.trace(a.matrix @ operator_log2(a)).real)
    return abs(h) if h == 0 else h


def soft_alignment_weights(a, b) -> np.ndarray:
    """Squared overlaps ``|<a_i|b_j>|^2`` between the two eigenbases.

    Rows follow ``a``'s eigenvalues in descending order, columns ``b``'s.
    The result is doubly stochastic.
    """
    a, b = _pair(a, b)
    overlap = a.eigenkets.conj().T @ b.eigenkets
    return np.abs(overlap) ** 2


def soft_aligned(a, b, values) -> np.ndarray:
    """Replace each per-eigenket value of ``b`` by its soft-aligned average.

    Given ``values[j]`` attached to ``b``'s j-th eigenket, returns
    ``sum_j values[j] W[i, j]`` for every eigenket i of ``a``.  With
    ``values = beta`` this is the measurement probability of ``a_i``, with
    ``sqrt(beta)`` the fidelity weight, with ``log2(beta)`` the cross-entropy
    term.
    """
    w = soft_alignment_weights(a, b)
    v = np.asarray(values, dtype=float)
    if v.shape != (w.shape[1],):
        raise UsageError(f"expected {w.shape[1]} values, got shape {v.shape}")
    return w @ v


def measurement_probabilities(observable, state) -> ProbabilityDistribution:
    """Outcome distribution of projecting ``state`` onto the eigenkets of ``observable``.

    ``probs[i] = <a_i| B |a_i>`` and ``outcomes[i]`` is the eigenvalue of
    ``a_i``.  No collapse is modelled.  Under a degenerate observable the
    per-ket split depends on the chosen eigenbasis; use
    :func:`measurement_by_eigenvalue` for a basis-independent answer.
    """
    a, b = _pair(observable, state)
    v = a.eigenkets
    p = np.einsum("ki,kl,li->i", v.conj(), b.matrix, v).real
    p = np.clip(p, 0.0, None)
    return ProbabilityDistribution(p / p.sum(), outcomes=a.eigenvalues)


def measurement_by_eigenvalue(observable, state, tol: float = 1e-10) -> ProbabilityDistribution:
    """Measurement probabilities summed over each eigenspace of ``observable``."""
    dist = measurement_probabilities(observable, state)
    vals, probs = [], []
    for value, p in zip(dist.outcomes, dist.probs):
        if vals and abs(vals[-1] - value) <= tol:
            probs[-1] += p
        else:
            vals.append(float(value))
            probs.append(float(p))
    return ProbabilityDistribution(probs, outcomes=vals)


def statistical_outcome(observable, state, method: str = "spectral") -> float:
    """Expected eigenvalue of ``observable`` when measured on ``state``; equals ``Tr(AB)``."""
    _check_method(method)
    a, b = _pair(observable, state)
    if method == "spectral":
        w = soft_alignment_weights(a, b)
        return float(a.eigenvalues @ w @ b.eigenvalues)
    return float(np.trace(a.matrix @ b.matrix).real)


def fidelity(a, b, method: str = "spectral") -> float:
    """Similarity ``Tr(sqrt(A) sqrt(B))``.

    This is the product-of-roots form, not Uhlmann's ``Tr sqrt(sqrt(A) B sqrt(A))``.
    For commuting arguments it is the Bhattacharyya coefficient of the
    aligned spectra.
    """
    _check_method(method)
    a, b = _pair(a, b)
    if method == "spectral":
        w = soft_alignment_weights(a, b)
        f = float(np.sqrt(a.eigenvalues) @ w @ np.sqrt(b.eigenvalues))
    else:
        f = float(np.trace(operator_sqrt(a) @ operator_sqrt(b)).real)
    return min(1.0, max(0.0, f))


def smooth_density(a, eps: float) -> DensityOperator:
    """Lift zero eigenvalues of ``a`` to ``eps`` and renormalise.

    The eigenbasis is kept, so the result has full support.
    """
    a = as_density(a)
    vals = np.array(a.eigenvalues, dtype=float)
    vals[vals <= ZERO_TOL] = eps
    vals /= vals.sum()
    v = a.eigenkets
    m = (v * vals) @ v.conj().T
    return DensityOperator((m + m.conj().T) / 2, a.subsystem_dims)


def support_violation(a, b) -> float:
    """Weight of ``a`` that falls in the kernel of ``b``: ``Tr(A P_ker(B))``."""
    a, b = _pair(a, b)
    ker = b.eigenkets[:, b.eigenvalues <= ZERO_TOL]
    if ker.shape[1] == 0:
        return 0.0
    return float(np.einsum("ki,kl,li->", ker.conj(), a.matrix, ker).real)


def quantum_relative_entropy(a, b, method: str = "spectral", smoothing: float | None = None) -> float:
    """``S(A||B) = Tr(A log2 A) - Tr(A log2 B)`` in bits.

    Returns ``math.inf`` when the support of ``a`` is not contained in the
    support of ``b``.  With ``smoothing`` set, both operators first have
    their zero eigenvalues lifted to that value (see :func:`smooth_density`).
    """
    _check_method(method)
    a, b = _pair(a, b)
    if smoothing is not None:
        a, b = smooth_density(a, smoothing), smooth_density(b, smoothing)
    if support_violation(a, b) > SUPPORT_TOL:
        return math.inf

    if method == "spectral":
        alpha, beta = a.eigenvalues, b.eigenvalues
        w = soft_alignment_weights(a, b)
        on_a = alpha > ZERO_TOL
        on_b = beta > ZERO_TOL
        self_term = float(np.sum(alpha[on_a] * np.log2(alpha[on_a])))
        cross = w[np.ix_(on_a, on_b)] @ np.log2(beta[on_b])
        return self_term - float(alpha[on_a] @ cross)

    self_term = np.trace(a.matrix @ operator_log2(a)).real
    cross = np.trace(a.matrix @ operator_log2(b)).real
    return float(self_term - cross)
