"""Word-level queries over a lexicon: ambiguity, similarity, entailment,
disambiguation and correlation inside a word's senses."""

from __future__ import annotations

from dataclasses import dataclass

from .classical import ProbabilityDistribution
from .correlation import CorrelationReport, SolverConfig, correlation_report, total_correlation
from .errors import UsageError
from .lexicon import Lexicon
from .operators import DensityOperator, partial_trace
from .quantum import (
    fidelity,
    measurement_by_eigenvalue,
    measurement_probabilities,
    quantum_relative_entropy,
    statistical_outcome,
    von_neumann_entropy,
)


def ambiguity(word: str, lex: Lexicon) -> float:
    """Entropy of the word's operator in bits; 0 for a single-sense word."""
    return von_neumann_entropy(lex[word])


def similarity(w1: str, w2: str, lex: Lexicon) -> float:
    return fidelity(lex[w1], lex[w2])


def entailment_score(w1: str, w2: str, lex: Lexicon) -> float:
    """``S(w2 || w1)``: how much information ``w1`` lacks to cover ``w2``.

    Lower means ``w1`` covers ``w2``'s meaning better.  Infinite when ``w2``
    has senses outside the support of ``w1``.
    """
    a, b = lex[w1], lex[w2]
    return quantum_relative_entropy(b, a)


@dataclass(frozen=True)
class Disambiguation:
    """Sense distribution of ``target`` measured against ``context``.

    ``senses.probs[i]`` is the probability of the target's i-th eigenket and
    ``senses.outcomes[i]`` its eigenvalue.  Only the first ``rank`` kets are
    senses proper; ``residual`` is the mass on the target's kernel.
    """

    context: str
    target: str
    senses: ProbabilityDistribution
    by_eigenvalue: ProbabilityDistribution
    outcome: float
    rank: int

    @property
    def residual(self) -> float:
        return float(self.senses.probs[self.rank:].sum())


def disambiguate(context: str, target: str, lex: Lexicon) -> Disambiguation:
    observable, state = lex[target], lex[context]
    return Disambiguation(
        context=context,
        target=target,
        senses=measurement_probabilities(observable, state),
        by_eigenvalue=measurement_by_eigenvalue(observable, state),
        outcome=statistical_outcome(observable, state),
        rank=observable.rank(),
    )


def _pair_indices(pair, lex: Lexicon) -> list[int]:
    if len(pair) != 2:
        raise UsageError(f"expected two subsystems, got {len(pair)}")
    idx = [lex.relation_index(p) for p in pair]
    if idx[0] == idx[1]:
        raise UsageError("the two subsystems must differ")
    return idx


def _reduce_to_pair(state: DensityOperator, idx: list[int]) -> DensityOperator:
    if len(state.subsystem_dims) == 2:
        return state if idx == [0, 1] else _swap(state)
    reduced = partial_trace(state, idx)
    return reduced if idx[0] < idx[1] else _swap(reduced)


def _swap(state: DensityOperator) -> DensityOperator:
    d1, d2 = state.subsystem_dims
    m = state.matrix.reshape(d1, d2, d1, d2).transpose(1, 0, 3, 2).reshape(d1 * d2, d1 * d2)
    return DensityOperator(m, (d2, d1), validate=False)


def sense_state(word: str, sense: int, lex: Lexicon) -> DensityOperator:
    """Pure state of the word's ``sense``-th eigenket."""
    op = lex[word]
    rank = op.rank()
    if not 0 <= sense < rank:
        raise UsageError(f"sense index {sense} out of range; {word!r} has {rank} senses")
    return DensityOperator.pure(op.eigenkets[:, sense], op.subsystem_dims)


def sense_correlation(word: str, sense: int, pair, lex: Lexicon,
                      config: SolverConfig | None = None) -> CorrelationReport:
    """Correlation between two relation subsystems inside one sense of ``word``.

    The other subsystems are traced out.  When the pair's dimensions exceed
    the solver cap only the total correlation is filled in.
    """
    idx = _pair_indices(pair, lex)
    return correlation_report(_reduce_to_pair(sense_state(word, sense, lex), idx), config)


def pair_mutual_information(word: str, pair, lex: Lexicon) -> float:
    """Quantum mutual information between two relation subsystems of the whole operator."""
    idx = _pair_indices(pair, lex)
    return total_correlation(_reduce_to_pair(lex[word], idx))


def topk(word: str, lex: Lexicon, k: int = 10) -> list[tuple[str, float]]:
    """The ``k`` other words most similar to ``word``, best first (ties by word)."""
    if k < 1:
        raise UsageError("k must be positive")
    ref = lex[word]
    scored = [(other, fidelity(ref, lex[other])) for other in lex.words() if other != word]
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:k]

