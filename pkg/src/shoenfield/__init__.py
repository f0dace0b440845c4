"""Deterministic, non-deterministic and probabilistic Shoenfield register
machines: execution, computation trees, exact acceptance probabilities,
Monte Carlo estimation and bounded-error decisions."""

from .machine import (
    DEFAULT_POLICY,
    AcceptancePolicy,
    ChoiceOutOfRange,
    Configuration,
    Continues,
    Dec,
    FuelExhausted,
    Halted,
    HaltedRun,
    Inc,
    NotDeterministic,
    Outcome,
    Program,
    ProgramLine,
    WeightError,
    apply_instruction,
    chain,
    evaluate_acceptance,
    run_deterministic,
    step,
)
from .nsm import (
    AllHalted,
    AlreadyHalted,
    ComputationTree,
    NodeNotInTree,
    SomeRunning,
    Status,
    TraceMismatch,
    TraceStep,
    build_tree,
    exists_accepting_leaf,
    expand,
    extract_trace,
    replay_trace,
    universal_halting,
)
from .parser import (
    EmptyLineError,
    MixedAnnotationError,
    Mode,
    ParseError,
    ProgramSyntaxError,
    SourceProgram,
    WeightSumError,
    format_program,
    parse_program,
)
from .psm import (
    BudgetExceeded,
    Decision,
    EpsilonOutOfRange,
    EstimateReport,
    EtaOutOfRange,
    PathResult,
    ProbabilityInterval,
    RandomSource,
    Verdict,
    decide_bounded_error,
    estimate_acceptance,
    exact_acceptance,
    exact_acceptance_memoized,
    lift_deterministic,
    sample_path,
    sample_size,
)
from .testkit import GeneratorParams, InvalidParams, generate_inputs, generate_program

__version__ = "0.1.0"
