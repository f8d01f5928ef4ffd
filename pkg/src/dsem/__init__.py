"""Word meanings as density operators over dependency contexts.

The package is layered: :mod:`dsem.operators` provides the linear-algebra
substrate, :mod:`dsem.classical` and :mod:`dsem.quantum` the information
measures, :mod:`dsem.correlation` the total/quantum/classical correlation
split, :mod:`dsem.corpus` and :mod:`dsem.lexicon` lexicon construction and
storage, and :mod:`dsem.semantics` the word-level queries.
"""

from .classical import (
    JointDistribution,
    ProbabilityDistribution,
    bhattacharyya,
    expected_value,
    kl_divergence,
    mutual_information,
    shannon_entropy,
)
from .correlation import (
    CorrelationReport,
    EntanglementResult,
    SeparableState,
    SolverConfig,
    classical_correlation,
    correlation_report,
    is_product_state,
    relative_entropy_of_entanglement,
    total_correlation,
)
from .corpus import (
    DependencyToken,
    Document,
    DocumentKet,
    build_document_ket,
    build_lexical_density_operator,
    build_lexicon,
    build_vocabularies,
    parse_corpus,
)
from .errors import (
    BadMagicError,
    CapacityError,
    ChecksumError,
    DegenerateInputError,
    DsemError,
    LexiconFormatError,
    MissingWordError,
    ParseError,
    StructuralError,
    TruncatedFileError,
    UsageError,
    ValidationError,
    VersionMismatchError,
)
from .lexicon import Lexicon, RelationVocabulary, load_lexicon, save_lexicon
from .operators import (
    DensityOperator,
    Spectrum,
    commutator_deviation,
    density_from_mixture,
    operator_log2,
    operator_sqrt,
    partial_trace,
    spectral_decompose,
    tensor_product,
)
from .quantum import (
    fidelity,
    measurement_by_eigenvalue,
    measurement_probabilities,
    quantum_relative_entropy,
    soft_alignment_weights,
    statistical_outcome,
    von_neumann_entropy,
)
from .semantics import (
    Disambiguation,
    ambiguity,
    disambiguate,
    entailment_score,
    sense_correlation,
    similarity,
    topk,
)

__version__ = "0.1.0"
