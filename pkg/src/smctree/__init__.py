"""Context-tree selection for variable-length Markov chains.

The pipeline: count suffix windows of a sample, scan the penalized-likelihood
maximizer over its penalty constant to enumerate the champion trees, then pick
the smallest champion whose likelihood gain over its successor shrinks under a
renewal-block bootstrap.
"""

from .constraints import (
    DofMode,
    FullRule,
    IncidenceRule,
    RhythmRule,
    SuffixPatternRule,
    chi,
    df_tree,
    parse_rules_text,
    validate_consistency,
)
from .counting import CountTrie, build_count_trie, mle
from .errors import (
    DepthExceededError,
    FormatError,
    InstanceTooLargeError,
    InsufficientRenewalPointsError,
    InvalidTreeError,
    SampleTooShortError,
    SmcTreeError,
    UnobservedContextError,
    UnresolvablePastError,
)
from .estimation import (
    ChampionEntry,
    ChampionSet,
    CtmSolver,
    bic_estimate,
    brute_force_champions,
    champion_set,
    enumerate_admissible_trees,
    fit_pct,
    log_likelihood,
    per_context_log_likelihood,
)
from .resampling import (
    BlockStore,
    BootstrapConfig,
    BootstrapReport,
    SmcRule,
    SmcSelection,
    bootstrap_deltas,
    resample,
    smc_select,
    split_renewal_blocks,
)
from .simulation import RHYTHM_ALPHABET, rhythm_reference_model, simulate
from .trees import (
    Alphabet,
    Context,
    ContextTree,
    EMPTY_CONTEXT,
    ProbabilisticContextTree,
    SymbolSequence,
    TreeOrder,
    compare_trees,
    context_of,
    is_suffix,
    validate_tree,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "BlockStore",
    "BootstrapConfig",
    "BootstrapReport",
    "ChampionEntry",
    "ChampionSet",
    "Context",
    "ContextTree",
    "CountTrie",
    "CtmSolver",
    "DepthExceededError",
    "DofMode",
    "EMPTY_CONTEXT",
    "FormatError",
    "FullRule",
    "IncidenceRule",
    "InstanceTooLargeError",
    "InsufficientRenewalPointsError",
    "InvalidTreeError",
    "ProbabilisticContextTree",
    "RHYTHM_ALPHABET",
    "RhythmRule",
    "SampleTooShortError",
    "SmcRule",
    "SmcSelection",
    "SmcTreeError",
    "SuffixPatternRule",
    "SymbolSequence",
    "TreeOrder",
    "UnobservedContextError",
    "UnresolvablePastError",
    "bic_estimate",
    "bootstrap_deltas",
    "brute_force_champions",
    "build_count_trie",
    "champion_set",
    "chi",
    "compare_trees",
    "context_of",
    "df_tree",
    "enumerate_admissible_trees",
    "fit_pct",
    "is_suffix",
    "log_likelihood",
    "mle",
    "parse_rules_text",
    "per_context_log_likelihood",
    "resample",
    "rhythm_reference_model",
    "simulate",
    "smc_select",
    "split_renewal_blocks",
    "validate_consistency",
    "validate_tree",
]
