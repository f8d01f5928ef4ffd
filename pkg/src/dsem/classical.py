"""Classical information measures over discrete distributions.

All logarithms are base 2.  These functions double as reduction oracles for
the operator-valued measures in :mod:`dsem.quantum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError, ValidationError
from .operators import ZERO_TOL

SUM_TOL = 1e-10


def _check_probs(p: np.ndarray, what: str) -> None:
    if p.size == 0:
        raise ValidationError(f"{what} is empty")
    if not np.all(np.isfinite(p)):
        raise ValidationError(f"{what} has non-finite entries")
    if np.any(p < -SUM_TOL):
        raise ValidationError(f"{what} has negative entries")
    total = p.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise ValidationError(f"{what} sums to {total!r}, not 1")


@dataclass(frozen=True)
class ProbabilityDistribution:
    probs: np.ndarray
    outcomes: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1:
            raise ValidationError(f"distribution must be 1-D, got shape {p.shape}")
        _check_probs(p, "distribution")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)
        if self.outcomes is not None:
            x = np.asarray(self.outcomes, dtype=float).ravel()
            if x.shape != p.shape:
                raise ValidationError(f"{x.size} outcomes for {p.size} probabilities")
            x.flags.writeable = False
            object.__setattr__(self, "outcomes", x)

    def __len__(self):
        return len(self.probs)


@dataclass(frozen=True)
class JointDistribution:
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 2:
            raise ValidationError(f"joint table must be 2-D, got shape {t.shape}")
        _check_probs(t.ravel(), "joint table")
        t = np.clip(t, 0.0, None)
        t.flags.writeable = False
        object.__setattr__(self, "table", t)

    def marginal_x(self) -> ProbabilityDistribution:
        return ProbabilityDistribution(self.table.sum(axis=1))

    def marginal_y(self) -> ProbabilityDistribution:
        return ProbabilityDistribution(self.table.sum(axis=0))


def _probs(x) -> np.ndarray:
    if isinstance(x, ProbabilityDistribution):
        return x.probs
    return ProbabilityDistribution(x).probs


def smooth(p, eps: float) -> np.ndarray:
    """Replace zero probabilities by ``eps`` and renormalise."""
    p = np.array(_probs(p), dtype=float)
    p[p <= ZERO_TOL] = eps
    return p / p.sum()


def shannon_entropy(x) -> float:
    """``-sum p log2 p`` in bits, with ``0 log 0 = 0``."""
    p = _probs(x)
    nz = p[p > ZERO_TOL]
    h = -float(np.sum(nz * np.log2(nz)))
    return abs(h) if h == 0 else h


def expected_value(x: ProbabilityDistribution) -> float:
    if not isinstance(x, ProbabilityDistribution) or x.outcomes is None:
        raise UsageError("expected_value needs a distribution with outcome values")
    return float(np.dot(x.outcomes, x.probs))


def bhattacharyya(x, y) -> float:
    p, q = _probs(x), _probs(y)
    if p.shape != q.shape:
        raise UsageError(f"length mismatch: {p.size} vs {q.size}")
    return float(min(1.0, np.sum(np.sqrt(p * q))))


def kl_divergence(x, y, smoothing: float | None = None) -> float:
    """KL divergence of ``y`` from ``x`` in bits.

    Returns ``math.inf`` when ``x`` puts mass where ``y`` has none, unless
    ``smoothing`` is given, in which case both inputs are smoothed first.
    """
    p, q = _probs(x), _probs(y)
    if p.shape != q.shape:
        raise UsageError(f"length mismatch: {p.size} vs {q.size}")
    if smoothing is not None:
        p, q = smooth(p, smoothing), smooth(q, smoothing)
    support = p > ZERO_TOL
    if np.any(q[support] <= ZERO_TOL):
        return math.inf
    ps, qs = p[support], q[support]
    return float(np.sum(ps * (np.log2(ps) - np.log2(qs))))


def joint_entropy(j: JointDistribution) -> float:
    return shannon_entropy(j.table.ravel())


def mutual_information(j, method: str = "entropy") -> float:
    """Mutual information of a joint table.

    ``method="entropy"`` evaluates ``H(X) + H(Y) - H(X, Y)``;
    ``method="logratio"`` sums ``p(x,y) log2(p(x,y) / (p(x) p(y)))`` directly.
    """
    if not isinstance(j, JointDistribution):
        j = JointDistribution(j)
    if method == "entropy":
        val = shannon_entropy(j.marginal_x()) + shannon_entropy(j.marginal_y()) - joint_entropy(j)
    elif method == "logratio":
        t = j.table
        px, py = t.sum(axis=1), t.sum(axis=0)
        prod = np.outer(px, py)
        nz = t > ZERO_TOL
        val = float(np.sum(t[nz] * (np.log2(t[nz]) - np.log2(prod[nz]))))
    else:
        raise UsageError(f"unknown method {method!r}")
    return val
