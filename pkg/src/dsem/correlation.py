"""Correlation in bipartite states: total, quantum (entanglement) and classical.

The quantum share is the relative entropy of entanglement, i.e. the relative
entropy from ``C`` to the closest separable state.  It is found numerically by
minimising over separable states written as mixtures of pure product states,

    D(theta) = sum_k softmax(z)_k |u_k><u_k| (x) |v_k><v_k|,

with unconstrained real parameters (the kets are normalised inside the map).
Each restart runs an optional L-BFGS descent with an analytic gradient and
then a coordinate-wise pattern search.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import softmax

from .errors import CapacityError, UsageError, ValidationError
from .operators import (
    NORM_TOL,
    DensityOperator,
    as_density,
    partial_trace,
    tensor_product,
)
from .quantum import quantum_relative_entropy, von_neumann_entropy

_ZERO_WEIGHT_LOGIT = -40.0


@dataclass(frozen=True)
class SolverConfig:
    """Settings for the relative-entropy-of-entanglement search."""

    restarts: int = 16
    max_iter: int = 5000
    seed: int = 0
    rel_tol: float = 1e-7
    components: int | None = None  # default (d1*d2)**2
    subsystem_cap: int = 4
    accelerate: bool = True
    log_floor: float = 1e-12
    initial_step: float = 0.05
    min_step: float = 1e-7
    workers: int = 1
    # relative entropy is nonnegative, so a candidate at or below this value
    # is already optimal and the remaining restarts are skipped
    zero_value: float = 1e-12

    def __post_init__(self):
        if self.restarts < 1:
            raise UsageError("restarts must be at least 1")
        if self.max_iter < 1:
            raise UsageError("max_iter must be at least 1")
        if self.components is not None and self.components < 1:
            raise UsageError("components must be positive")


@dataclass(frozen=True)
class SeparableState:
    """Mixture of pure product states ``sum_k w_k |u_k><u_k| (x) |v_k><v_k|``.

    ``left_kets`` has shape ``(K, d1)`` and ``right_kets`` ``(K, d2)``; rows
    are normalised on construction.
    """

    weights: np.ndarray
    left_kets: np.ndarray
    right_kets: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        u = np.atleast_2d(np.array(self.left_kets, dtype=np.complex128))
        v = np.atleast_2d(np.array(self.right_kets, dtype=np.complex128))
        if not (len(w) == u.shape[0] == v.shape[0]):
            raise ValidationError(f"component counts differ: {len(w)}, {u.shape[0]}, {v.shape[0]}")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            raise ValidationError("weights must be nonnegative and sum to 1")
        for name, kets in (("left", u), ("right", v)):
            norms = np.linalg.norm(kets, axis=1)
            if np.any(norms < NORM_TOL):
                raise ValidationError(f"{name} ket has zero norm")
            kets /= norms[:, None]
        for name, arr in (("weights", w), ("left_kets", u), ("right_kets", v)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def components(self) -> int:
        return len(self.weights)

    @property
    def dims(self) -> tuple[int, int]:
        return self.left_kets.shape[1], self.right_kets.shape[1]

    def product_kets(self) -> np.ndarray:
        k = np.einsum("ka,kb->kab", self.left_kets, self.right_kets)
        return k.reshape(self.components, -1)

    def to_density(self) -> DensityOperator:
        w = self.product_kets()
        m = (w.T * self.weights) @ w.conj()
        m = (m + m.conj().T) / 2
        return DensityOperator(m / np.trace(m).real, self.dims)

    @classmethod
    def random(cls, d1: int, d2: int, components: int, rng: np.random.Generator) -> "SeparableState":
        def kets(d):
            return rng.standard_normal((components, d)) + 1j * rng.standard_normal((components, d))

        return cls(rng.dirichlet(np.ones(components)), kets(d1), kets(d2))


@dataclass(frozen=True)
class EntanglementResult:
    quantum: float
    nearest_separable: SeparableState
    iterations: int
    converged: bool
    restart_values: tuple[float, ...] = ()


@dataclass(frozen=True)
class CorrelationReport:
    """Total, quantum and classical correlation in bits.

    ``quantum`` and ``classical`` are ``None`` when the subsystems were too
    large for the entanglement search; ``note`` then says why.
    """

    total: float
    quantum: float | None
    classical: float | None
    nearest_separable: SeparableState | None = None
    solver_iterations: int = 0
    converged: bool = True
    note: str | None = field(default=None, compare=False)


class ProductCheck(NamedTuple):
    is_product: bool
    deviation: float


def _bipartite(c) -> DensityOperator:
    c = as_density(c)
    if len(c.subsystem_dims) != 2:
        raise UsageError(f"expected a bipartite state, got subsystem dims {c.subsystem_dims}")
    return c


def reductions(c) -> tuple[DensityOperator, DensityOperator]:
    c = _bipartite(c)
    return partial_trace(c, 0), partial_trace(c, 1)


def total_correlation(c, method: str = "entropy") -> float:
    """Quantum mutual information ``S(A) + S(B) - S(C)``.

    ``method="relative"`` evaluates the same quantity as ``S(C || A (x) B)``.
    """
    c = _bipartite(c)
    a, b = reductions(c)
    if method == "entropy":
        return von_neumann_entropy(a) + von_neumann_entropy(b) - von_neumann_entropy(c)
    if method == "relative":
        return quantum_relative_entropy(c, tensor_product(a, b))
    raise UsageError(f"unknown method {method!r}")


def is_product_state(c, tol: float = 1e-8) -> ProductCheck:
    c = _bipartite(c)
    a, b = reductions(c)
    dev = float(np.max(np.abs(c.matrix - np.kron(a.matrix, b.matrix))))
    return ProductCheck(dev < tol, dev)


class _Objective:
    """``S(C || D(theta))`` with a floored logarithm, plus its gradient."""

    def __init__(self, c: DensityOperator, components: int, floor: float):
        self.c = c.matrix
        self.d1, self.d2 = c.subsystem_dims
        self.k = components
        self.floor = floor
        self.neg_entropy = -von_neumann_entropy(c)
        k, d1, d2 = components, self.d1, self.d2
        self.sizes = (k, k * d1, k * d1, k * d2, k * d2)
        self.n_params = sum(self.sizes)

    def split(self, theta):
        parts = np.split(theta, np.cumsum(self.sizes)[:-1])
        z = parts[0]
        ux, uy = parts[1].reshape(self.k, self.d1), parts[2].reshape(self.k, self.d1)
        vx, vy = parts[3].reshape(self.k, self.d2), parts[4].reshape(self.k, self.d2)
        return z, ux + 1j * uy, vx + 1j * vy

    def unpack(self, theta):
        z, zu, zv = self.split(theta)
        nu = np.linalg.norm(zu, axis=1)
        nv = np.linalg.norm(zv, axis=1)
        nu[nu == 0] = 1.0
        nv[nv == 0] = 1.0
        return softmax(z), zu / nu[:, None], zv / nv[:, None], (zu, nu, zv, nv)

    def pack(self, state: SeparableState) -> np.ndarray:
        w = state.weights
        z = np.where(w > 0, np.log(np.where(w > 0, w, 1.0)), _ZERO_WEIGHT_LOGIT)
        u, v = state.left_kets, state.right_kets
        return np.concatenate([z, u.real.ravel(), u.imag.ravel(), v.real.ravel(), v.imag.ravel()])

    def state(self, theta) -> SeparableState:
        g, u, v, _ = self.unpack(theta)
        return SeparableState(g / g.sum(), u, v)

    def _density(self, g, u, v):
        w = np.einsum("ka,kb->kab", u, v).reshape(self.k, -1)
        m = (w.T * g) @ w.conj()
        return (m + m.conj().T) / 2, w

    def value(self, theta) -> float:
        g, u, v, _ = self.unpack(theta)
        d, _ = self._density(g, u, v)
        lam, q = np.linalg.eigh(d)
        logs = np.log2(np.maximum(lam, self.floor))
        cq = q.conj().T @ self.c @ q
        return self.neg_entropy - float(np.real(np.sum(np.diag(cq) * logs)))

    def value_and_grad(self, theta):
        g, u, v, (zu, nu, zv, nv) = self.unpack(theta)
        d, w = self._density(g, u, v)
        lam, q = np.linalg.eigh(d)
        lam_f = np.maximum(lam, self.floor)
        logs = np.log2(lam_f)
        cq = q.conj().T @ self.c @ q
        val = self.neg_entropy - float(np.real(np.sum(np.diag(cq) * logs)))

        # divided differences of log2 on the spectrum (Daleckii-Krein)
        deriv = np.where(lam > self.floor, 1.0 / (lam_f * math.log(2)), 0.0)
        diff = lam[:, None] - lam[None, :]
        close = np.abs(diff) <= 1e-9 * np.maximum(lam_f[:, None], lam_f[None, :])
        safe = np.where(close, 1.0, diff)
        dd = np.where(close, 0.5 * (deriv[:, None] + deriv[None, :]), (logs[:, None] - logs[None, :]) / safe)
        grad_d = -(q @ (dd * cq) @ q.conj().T)

        gw = w @ grad_d.T  # rows are (G w_k)^T
        gk = np.real(np.einsum("ka,ka->k", w.conj(), gw))
        dz = g * (gk - g @ gk)

        m = gw.reshape(self.k, self.d1, self.d2).conj()
        p = np.einsum("kab,kb->ka", m, v)
        r = np.einsum("kab,ka->kb", m, u)

        def ket_grad(pp, zz, nn):
            proj = np.real(np.sum(pp * zz, axis=1))[:, None]
            scale = (2 * g)[:, None]
            gx = scale * (pp.real / nn[:, None] - proj * zz.real / nn[:, None] ** 3)
            gy = scale * (-pp.imag / nn[:, None] - proj * zz.imag / nn[:, None] ** 3)
            return gx, gy

        gux, guy = ket_grad(p, zu, nu)
        gvx, gvy = ket_grad(r, zv, nv)
        grad = np.concatenate([dz, gux.ravel(), guy.ravel(), gvx.ravel(), gvy.ravel()])
        return val, grad


def _pattern_search(obj: _Objective, theta, f, cfg: SolverConfig, budget: int):
    step = cfg.initial_step
    sweeps = 0
    converged = False
    theta = theta.copy()
    while sweeps < budget:
        sweeps += 1
        start = f
        for i in range(theta.size):
            base = theta[i]
            for delta in (step, -step):
                theta[i] = base + delta
                trial = obj.value(theta)
                if trial < f:
                    f = trial
                    break
            else:
                theta[i] = base
        gain = start - f
        if gain <= 0:
            step *= 0.5
            if step < cfg.min_step:
                converged = True
                break
        elif gain < cfg.rel_tol * max(abs(start), 1.0):
            converged = True
            break
    return theta, f, sweeps, converged


def _run_restart(obj: _Objective, theta0, cfg: SolverConfig):
    f0 = obj.value(theta0)
    theta, f = theta0, f0
    iters = 0
    if cfg.accelerate:
        res = minimize(
            obj.value_and_grad, theta0, jac=True, method="L-BFGS-B",
            options={"maxiter": cfg.max_iter, "ftol": cfg.rel_tol * 1e-3, "gtol": 1e-9},
        )
        iters += int(res.nit)
        if res.fun < f:
            theta, f = np.asarray(res.x, dtype=float), float(res.fun)
    budget = max(cfg.max_iter - iters, 1)
    theta, f, sweeps, converged = _pattern_search(obj, theta, f, cfg, budget)
    return theta, iters + sweeps, converged


def _marginal_seed(c: DensityOperator, k: int) -> SeparableState:
    a, b = reductions(c)
    weights, left, right = [], [], []
    for i, alpha in enumerate(a.eigenvalues):
        for j, beta in enumerate(b.eigenvalues):
            weights.append(alpha * beta)
            left.append(a.eigenkets[:, i])
            right.append(b.eigenkets[:, j])
    return _pad(np.array(weights), np.array(left), np.array(right), k)


def _pad(weights, left, right, k) -> SeparableState:
    weights = np.clip(weights, 0.0, None)
    n = len(weights)
    if n < k:
        d1, d2 = left.shape[1], right.shape[1]
        extra_l = np.tile(np.eye(d1, dtype=complex)[0], (k - n, 1))
        extra_r = np.tile(np.eye(d2, dtype=complex)[0], (k - n, 1))
        weights = np.concatenate([weights, np.zeros(k - n)])
        left = np.vstack([left, extra_l])
        right = np.vstack([right, extra_r])
    return SeparableState(weights / weights.sum(), left, right)


def relative_entropy_of_entanglement(c, config: SolverConfig | None = None,
                                     initial: SeparableState | None = None) -> EntanglementResult:
    """Minimum of ``S(C || D)`` over separable ``D``, found by multi-start search.

    Candidates are, in order: the product of ``C``'s reductions, ``initial``
    if given, then ``config.restarts`` random starts.  The best candidate by
    exact relative entropy wins, ties going to the earlier one.  A candidate
    at or below ``config.zero_value`` ends the search early.  A run that
    hits the iteration cap is reported with ``converged=False``.
    """
    cfg = config or SolverConfig()
    c = _bipartite(c)
    d1, d2 = c.subsystem_dims
    if max(d1, d2) > cfg.subsystem_cap:
        raise CapacityError(
            f"subsystem dims ({d1}, {d2}) exceed the entanglement solver cap {cfg.subsystem_cap}"
        )
    k = cfg.components or (d1 * d2) ** 2
    if initial is not None:
        if initial.dims != (d1, d2):
            raise UsageError(f"initial state dims {initial.dims} do not match {(d1, d2)}")
        k = max(k, initial.components)
    obj = _Objective(c, k, cfg.log_floor)

    starts = [obj.pack(_marginal_seed(c, k))]
    if initial is not None:
        starts.append(obj.pack(_pad(initial.weights, initial.left_kets, initial.right_kets, k)))
    for seq in np.random.SeedSequence(cfg.seed).spawn(cfg.restarts):
        starts.append(np.random.default_rng(seq).standard_normal(obj.n_params))

    def run(theta0):
        state = obj.state(theta0)
        value = quantum_relative_entropy(c, state.to_density())
        if value <= cfg.zero_value:
            return value, state, 0, True
        theta, iters, converged = _run_restart(obj, theta0, cfg)
        state = obj.state(theta)
        value = quantum_relative_entropy(c, state.to_density())
        return value, state, iters, converged

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = []
        for theta0 in starts:
            results.append(run(theta0))
            if results[-1][0] <= cfg.zero_value:
                break

    # the first candidate at zero wins outright, so the choice is the same
    # whether or not the remaining restarts were run
    zeros = [i for i, r in enumerate(results) if r[0] <= cfg.zero_value]
    best = zeros[0] if zeros else min(range(len(results)), key=lambda i: (results[i][0], i))
    value, state, _, converged = results[best]
    return EntanglementResult(
        quantum=value,
        nearest_separable=state,
        iterations=sum(r[2] for r in results),
        converged=converged,
        restart_values=tuple(r[0] for r in results),
    )


def classical_correlation(c, config: SolverConfig | None = None,
                          initial: SeparableState | None = None) -> CorrelationReport:
    """Split the total correlation of ``c`` into quantum and classical parts."""
    c = _bipartite(c)
    total = total_correlation(c)
    ree = relative_entropy_of_entanglement(c, config, initial)
    return CorrelationReport(
        total=total,
        quantum=ree.quantum,
        classical=total - ree.quantum,
        nearest_separable=ree.nearest_separable,
        solver_iterations=ree.iterations,
        converged=ree.converged,
    )


def correlation_report(c, config: SolverConfig | None = None) -> CorrelationReport:
    """Like :func:`classical_correlation`, but degrades to total-only above the solver cap."""
    cfg = config or SolverConfig()
    c = _bipartite(c)
    d1, d2 = c.subsystem_dims
    if max(d1, d2) > cfg.subsystem_cap:
        return CorrelationReport(
            total=total_correlation(c), quantum=None, classical=None, converged=False,
            note=f"subsystem dims ({d1}, {d2}) exceed the entanglement solver cap {cfg.subsystem_cap}",
        )
    return classical_correlation(c, cfg)
