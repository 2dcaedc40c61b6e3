"""Predictability of categorical event sequences.

Lempel-Ziv entropy-rate estimation (marginal, joint, conditional) and
first-order Markov next-partner prediction for interaction logs.
"""

__version__ = "0.1.0"

from .core import (
    Alphabet,
    CategoricalSequence,
    EmpiricalDistribution,
    encode_labels,
    marginal,
    pair,
    project,
)
from .entropy import (
    EntropyReport,
    MatchLengths,
    analyze_sequence,
    conditional_lz_rate,
    effective_choices,
    iid_rate,
    joint_lz_rate,
    lz_rate,
    match_lengths,
    match_lengths_naive,
    plugin_entropy,
    uniform_rate,
)
from .ingest import (
    BinnedEventStream,
    EventLog,
    InteractionEvent,
    LogFormatError,
    bin_events,
    format_event_log,
    gap_sequence,
    location_sequence,
    parse_event_log,
    partner_sequence,
)
from .markov import (
    EvaluationResult,
    MarkovModel,
    fit,
    mc_entropy_rate,
    rolling_evaluate,
    top_k,
    transition_probs,
    update,
)
from .synth import (
    analytic_markov_rate,
    gen_event_log,
    gen_iid,
    gen_markov,
    gen_periodic,
    stay_matrix,
)
