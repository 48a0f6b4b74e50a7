"""Simulator of two-prover quantum verification of 2-out-of-4 SAT with linear optics."""

from .errors import (
    CapacityError,
    CompilationError,
    ConfigError,
    InputError,
    ParseError,
    QmaSatError,
    StrategyError,
)
from .sat import (
    Cnf3,
    SatInstance24,
    census,
    eval_clause24,
    parse_cnf,
    parse_instance,
    reduce_3sat,
    serialize_instance,
    solutions,
)
from .states import cheat_common_var, improper_theta, overlap, parse_state, proper_state
from .verifier import (
    Matching,
    ProtocolParams,
    TestKind,
    Verdict,
    clause_projection_prob,
    enumerate_matchings,
    product_accept_prob,
    run_protocol,
    statistical_fidelity,
    swap_reject_prob,
    uniformity_outcome_dist,
    uniformity_reject_exact,
)

__version__ = "0.1.0"
