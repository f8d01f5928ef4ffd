"""Embedded invariant checks run by ``dsem selftest``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import classical, quantum
from .correlation import SolverConfig, relative_entropy_of_entanglement, total_correlation
from .ensembles import density_in_basis, random_density, random_probabilities, random_unitary
from .operators import DensityOperator

FAULTS = ("entropy-sign",)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _max_err(pairs) -> float:
    return max(abs(a - b) for a, b in pairs)


def run_selftest(seed: int = 0, faults=(), trials: int = 20) -> list[Check]:
    unknown = set(faults) - set(FAULTS)
    if unknown:
        raise ValueError(f"unknown fault(s): {sorted(unknown)}")
    rng = np.random.default_rng(seed)

    entropy = quantum.von_neumann_entropy
    if "entropy-sign" in faults:
        def entropy(a, method="spectral"):
            return -quantum.von_neumann_entropy(a, method)

    checks = []

    def record(name, ok, detail):
        checks.append(Check(name, bool(ok), detail))

    states = [random_density(int(rng.integers(2, 9)), rng, rank=int(rng.integers(1, 4))) for _ in range(trials)]
    vals = [entropy(s) for s in states]
    record("entropy_nonnegative", min(vals) >= -1e-12, f"min={min(vals):.9g}")
    record("entropy_upper_bound",
           all(v <= math.log2(s.dim) + 1e-9 for v, s in zip(vals, states)), f"trials={trials}")

    fid, rel, out = [], [], []
    for _ in range(trials):
        d = int(rng.integers(2, 9))
        u = random_unitary(d, rng)
        p, q = random_probabilities(d, rng), random_probabilities(d, rng)
        a, b = density_in_basis(p, u), density_in_basis(q, u)
        fid.append((quantum.fidelity(a, b), classical.bhattacharyya(p, q)))
        rel.append((quantum.quantum_relative_entropy(a, b), classical.kl_divergence(p, q)))
        out.append((quantum.statistical_outcome(a, b), float(p @ q)))
    for name, pairs in (("reduction_fidelity_bhattacharyya", fid),
                        ("reduction_relative_entropy_kl", rel),
                        ("reduction_outcome_product", out)):
        err = _max_err(pairs)
        record(name, err < 1e-8, f"max_err={err:.3g}")

    spec_trace = []
    maps = []
    for _ in range(trials):
        d = int(rng.integers(2, 9))
        a, b = random_density(d, rng), random_density(d, rng)
        spec_trace += [
            (entropy(a), entropy(a, "trace")),
            (quantum.fidelity(a, b), quantum.fidelity(a, b, "trace")),
            (quantum.statistical_outcome(a, b), quantum.statistical_outcome(a, b, "trace")),
        ]
        alpha, beta = a.eigenvalues, b.eigenvalues
        maps += [
            (alpha @ quantum.soft_aligned(a, b, beta), quantum.statistical_outcome(a, b, "trace")),
            (np.sqrt(alpha) @ quantum.soft_aligned(a, b, np.sqrt(beta)), quantum.fidelity(a, b, "trace")),
            (alpha @ np.log2(alpha) - alpha @ quantum.soft_aligned(a, b, np.log2(beta)),
             quantum.quantum_relative_entropy(a, b, "trace")),
        ]
    err = _max_err(spec_trace)
    record("trace_vs_spectral", err < 1e-8, f"max_err={err:.3g}")
    err = _max_err(maps)
    record("soft_alignment_maps", err < 1e-8, f"max_err={err:.3g}")

    corr = []
    for _ in range(trials):
        d1, d2 = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        c = random_density(d1 * d2, rng, subsystem_dims=(d1, d2))
        corr.append((total_correlation(c), total_correlation(c, "relative")))
    err = _max_err(corr)
    record("correlation_identity", err < 1e-8, f"max_err={err:.3g}")

    bell = DensityOperator.pure(np.array([1, 0, 0, 1]) / math.sqrt(2), (2, 2))
    ree = relative_entropy_of_entanglement(bell, SolverConfig(restarts=4, seed=seed))
    record("bell_state_ree", abs(ree.quantum - 1.0) <= 0.02, f"value={ree.quantum:.9g}")
    return checks
