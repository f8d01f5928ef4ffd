"""Dense complex linear algebra for density operators.

Every matrix is a ``numpy.ndarray`` of dtype ``complex128``; kets are 1-D
arrays.  :class:`DensityOperator` wraps a validated matrix together with its
subsystem layout and a lazily computed, deterministically ordered spectrum.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DegenerateInputError, UsageError, ValidationError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
NEGATIVE_EIGENVALUE_TOL = 1e-10
NORM_TOL = 1e-10
ZERO_TOL = 1e-12  # support threshold: eigenvalues at or below are treated as 0
DEFAULT_MAX_DIM = 4096

_TIE_TOL = 1e-10
_PHASE_TOL = 1e-10


def max_dim() -> int:
    """Largest operator dimension allowed; ``DSEM_MAX_DIM`` overrides the default."""
    raw = os.environ.get("DSEM_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"DSEM_MAX_DIM must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"DSEM_MAX_DIM must be a positive integer, got {raw!r}")
    return value


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, DensityOperator):
        return m.matrix
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def _check_hermitian(m: np.ndarray, atol: float = HERMITIAN_TOL) -> None:
    diff = np.abs(m - m.conj().T)
    if diff.size == 0:
        return
    flat = int(np.argmax(diff))
    i, j = divmod(flat, m.shape[0])
    if diff[i, j] > atol:
        raise ValidationError(
            f"matrix is not Hermitian: entry ({i}, {j}) = {m[i, j]!r} but "
            f"conj of entry ({j}, {i}) = {np.conj(m[j, i])!r}"
        )


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order and the matching orthonormal eigenkets.

    ``eigenkets[:, i]`` is the eigenket for ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenkets: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def ket(self, i: int) -> np.ndarray:
        return self.eigenkets[:, i]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenkets
        return (v * self.eigenvalues) @ v.conj().T

    def apply(self, func, support_tol: float | None = None) -> np.ndarray:
        """Return ``sum_i func(value_i) |a_i><a_i|``.

        With ``support_tol`` set, eigenvalues at or below it are left out.
        """
        vals = np.asarray(self.eigenvalues, dtype=float)
        keep = np.ones(len(vals), dtype=bool) if support_tol is None else vals > support_tol
        v = self.eigenkets[:, keep]
        return (v * func(vals[keep])) @ v.conj().T


def _fix_phase(vecs: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible amplitude is real positive."""
    mags = np.abs(vecs)
    big = mags > _PHASE_TOL
    lead_idx = np.argmax(big, axis=0)
    cols = np.arange(vecs.shape[1])
    lead = vecs[lead_idx, cols]
    phase = np.ones(vecs.shape[1], dtype=np.complex128)
    has = big[lead_idx, cols]
    phase[has] = np.abs(lead[has]) / lead[has]
    return vecs * phase


def _tie_order(vecs: np.ndarray, group: list[int]) -> list[int]:
    """``group`` sorted by descending lexicographic (re, im) amplitude key."""
    sub = vecs[:, group]
    keys = np.round(np.stack([sub.real, sub.imag], axis=1).reshape(-1, len(group)), 10)
    # np.lexsort treats the last key as primary and sorts ascending
    order = np.lexsort(-keys[::-1])
    return [group[i] for i in order]


def spectral_decompose(h) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix with reproducible ordering.

    Eigenvalues are sorted descending.  Each eigenket carries a global phase
    that makes its first non-negligible amplitude real and positive; within a
    group of tied eigenvalues, kets are ordered by descending lexicographic
    comparison of their (re, im) amplitudes.
    """
    m = _as_matrix(h)
    _check_hermitian(m)
    if np.iscomplexobj(m) and not m.imag.any():
        m = m.real  # the real solver is several times faster
    vals, vecs = np.linalg.eigh(m)
    vecs = _fix_phase(vecs.astype(np.complex128))

    order = list(np.argsort(-vals, kind="stable"))
    ordered = []
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and vals[order[start]] - vals[order[stop]] <= _TIE_TOL:
            stop += 1
        group = order[start:stop]
        if len(group) > 1:
            group = _tie_order(vecs, group)
        ordered.extend(group)
        start = stop

    return Spectrum(_readonly(vals[ordered]), _readonly(vecs[:, ordered]))


def _clamp(spec: Spectrum) -> Spectrum:
    vals = np.array(spec.eigenvalues, dtype=float)
    low = vals.min() if vals.size else 0.0
    if low < -NEGATIVE_EIGENVALUE_TOL:
        raise ValidationError(f"matrix is not positive semidefinite: eigenvalue {low!r}")
    vals[vals < 0] = 0.0
    return Spectrum(_readonly(vals), spec.eigenkets)


def _check_positive(m: np.ndarray) -> None:
    # m + tol*I admits a Cholesky factor iff its smallest eigenvalue exceeds -tol;
    # this avoids a full eigendecomposition, which stays lazy
    shifted = m + NEGATIVE_EIGENVALUE_TOL * np.eye(m.shape[0])
    try:
        np.linalg.cholesky(shifted.real if not m.imag.any() else shifted)
    except np.linalg.LinAlgError:
        low = np.linalg.eigvalsh(m)[0]
        raise ValidationError(f"matrix is not positive semidefinite: eigenvalue {low!r}") from None


class DensityOperator:
    """A trace-one, positive semidefinite Hermitian matrix.

    Instances are immutable.  ``subsystem_dims`` records the tensor-product
    layout; its product must equal the matrix dimension.
    """

    __slots__ = ("_matrix", "_dims", "_spectrum", "_lock")

    def __init__(self, matrix, subsystem_dims: Sequence[int] | None = None, *, validate: bool = True):
        m = np.array(matrix, dtype=np.complex128, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValidationError(f"density operator must be a non-empty square matrix, got shape {m.shape}")
        dims = (m.shape[0],) if subsystem_dims is None else tuple(int(d) for d in subsystem_dims)
        if not dims or any(d < 1 for d in dims) or int(np.prod(dims)) != m.shape[0]:
            raise ValidationError(f"subsystem dims {dims} do not multiply to dimension {m.shape[0]}")
        m.flags.writeable = False
        self._matrix = m
        self._dims = dims
        self._spectrum = None
        self._lock = threading.Lock()
        if validate:
            _check_hermitian(m)
            tr = np.trace(m)
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValidationError(f"trace must be 1, got {tr!r}")
            _check_positive(m)

    @classmethod
    def pure(cls, ket, subsystem_dims=None) -> "DensityOperator":
        k = np.asarray(ket, dtype=np.complex128).ravel()
        norm = np.linalg.norm(k)
        if norm == 0:
            raise DegenerateInputError("cannot build a state from the zero vector")
        k = k / norm
        return cls(np.outer(k, k.conj()), subsystem_dims)

    @classmethod
    def diagonal(cls, probs, subsystem_dims=None) -> "DensityOperator":
        return cls(np.diag(np.asarray(probs, dtype=float)), subsystem_dims)

    @classmethod
    def maximally_mixed(cls, dim: int, subsystem_dims=None) -> "DensityOperator":
        return cls(np.eye(dim) / dim, subsystem_dims)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def subsystem_dims(self) -> tuple[int, ...]:
        return self._dims

    @property
    def spectrum(self) -> Spectrum:
        if self._spectrum is None:
            with self._lock:
                if self._spectrum is None:
                    self._spectrum = _clamp(spectral_decompose(self._matrix))
        return self._spectrum

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    @property
    def eigenkets(self) -> np.ndarray:
        return self.spectrum.eigenkets

    def rank(self, tol: float = ZERO_TOL) -> int:
        return int(np.count_nonzero(self.eigenvalues > tol))

    def with_dims(self, subsystem_dims: Sequence[int]) -> "DensityOperator":
        out = DensityOperator(self._matrix, subsystem_dims, validate=False)
        out._spectrum = self._spectrum
        return out

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim}, subsystem_dims={self._dims})"


def as_density(x, subsystem_dims=None) -> DensityOperator:
    if isinstance(x, DensityOperator):
        return x
    return DensityOperator(x, subsystem_dims)


def operator_sqrt(a: DensityOperator) -> np.ndarray:
    """Unique positive square root, computed on the spectrum."""
    return as_density(a).spectrum.apply(np.sqrt)


def operator_log2(a: DensityOperator) -> np.ndarray:
    """Base-2 logarithm restricted to the support of ``a``.

    Eigenvalues at or below ``ZERO_TOL`` contribute nothing, so the result is
    zero on the kernel.
    """
    return as_density(a).spectrum.apply(np.log2, support_tol=ZERO_TOL)


def tensor_product(a: DensityOperator, b: DensityOperator, *, limit: int | None = None) -> DensityOperator:
    a, b = as_density(a), as_density(b)
    cap = max_dim() if limit is None else limit
    dim = a.dim * b.dim
    if dim > cap:
        raise CapacityError(f"tensor product dimension {dim} exceeds max_dim {cap}")
    return DensityOperator(np.kron(a.matrix, b.matrix), a.subsystem_dims + b.subsystem_dims, validate=False)


def tensor_all(ops: Iterable[DensityOperator], *, limit: int | None = None) -> DensityOperator:
    return reduce(lambda x, y: tensor_product(x, y, limit=limit), ops)


def _keep_indices(keep, n: int) -> list[int]:
    idx = [keep] if np.isscalar(keep) else list(keep)
    if not idx:
        raise UsageError("at least one subsystem must be kept")
    for k in idx:
        if not isinstance(k, (int, np.integer)) or not 0 <= k < n:
            raise UsageError(f"subsystem index {k!r} out of range for {n} subsystems")
    if len(set(idx)) != len(idx):
        raise UsageError(f"duplicate subsystem indices in {idx}")
    return sorted(int(k) for k in idx)


def partial_trace(c: DensityOperator, keep) -> DensityOperator:
    """Trace out every subsystem except ``keep`` (an index or a list of indices)."""
    c = as_density(c)
    dims = c.subsystem_dims
    n = len(dims)
    if n < 2:
        raise UsageError("partial trace needs at least two subsystems")
    kept = _keep_indices(keep, n)
    if n > 26:
        raise CapacityError("at most 26 subsystems are supported")

    letters = "abcdefghijklmnopqrstuvwxyz"
    upper = letters.upper()
    rows = [letters[i] for i in range(n)]
    cols = [upper[i] if i in kept else letters[i] for i in range(n)]
    out = [letters[i] for i in kept] + [upper[i] for i in kept]
    expr = "".join(rows) + "".join(cols) + "->" + "".join(out)
    kd = [dims[i] for i in kept]
    size = int(np.prod(kd))
    reduced = np.einsum(expr, c.matrix.reshape(dims + dims)).reshape(size, size)
    return DensityOperator(reduced, kd, validate=False)


def commutator_deviation(a, b) -> float:
    """Largest absolute entry of ``AB - BA``."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise UsageError(f"dimension mismatch: {ma.shape[0]} vs {mb.shape[0]}")
    return float(np.max(np.abs(ma @ mb - mb @ ma)))


def density_from_mixture(kets, weights, subsystem_dims=None) -> DensityOperator:
    """Trace-normalised mixture ``sum_i w_i |k_i><k_i|``."""
    rows = [np.asarray(k, dtype=np.complex128).ravel() for k in kets]
    if not rows:
        raise DegenerateInputError("no kets given")
    dims = {r.shape[0] for r in rows}
    if len(dims) != 1:
        raise UsageError(f"kets have different dimensions: {sorted(dims)}")
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape[0] != len(rows):
        raise UsageError(f"{len(rows)} kets but {w.shape[0]} weights")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValidationError("weights must be finite and nonnegative")
    if not np.any(w > 0):
        raise DegenerateInputError("all mixture weights are zero")
    k = np.vstack(rows)
    m = (k.T * w) @ k.conj()
    tr = np.trace(m).real
    if tr <= 0:
        raise DegenerateInputError("mixture has zero trace")
    return DensityOperator(m / tr, subsystem_dims)
