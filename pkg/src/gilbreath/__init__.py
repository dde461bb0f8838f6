"""Absolute-difference triangle toolkit: Gilbreath-style verification and experiments."""

from .triangle import (
    ParityRow,
    Row,
    RowExhaustedError,
    StopRule,
    TriangleHistory,
    diff_step,
    iterate_until,
    parity_step,
    ultimate_iterate,
)
from .parity import ParityMask, mask, mask_via_binomial, parity_of_ultimate, prob_even
from .blocks import (
    BlockReport,
    BlockSpec,
    check_block_destruction,
    check_inverse_iterates,
    detect_event_cascade,
    longest_block,
)
from .walks import (
    Coloring,
    RegularDigraph,
    WalkProbability,
    all_red_probability,
    check_bootstrap,
    debruijn_graph,
    remark_counterexample,
    ultimate_iterate_coloring,
)
from .experiments import (
    ExperimentConfig,
    ExperimentRecord,
    Schedule,
    derive_trial_stream,
    estimate_ultimate_zero,
    run_collapse_experiment,
    run_leading_term_experiment,
    sample_gap_sequence,
    sample_uniform,
)
from .primes import SieveConfig, Verdict, sieve_primes, stabilization_predicate, verify_gilbreath
from .lifting import ExoticCertificate, LiftConstraint, lift_search, preimages, verify_certificate

__version__ = "0.1.0"
