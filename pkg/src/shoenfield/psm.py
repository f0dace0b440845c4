"""Probabilistic execution: path sampling, exact acceptance probability by
exhaustive enumeration of choice sequences, Monte Carlo estimation with a
Chernoff-sized sample, and the bounded-error decision procedure.

All probabilities are exact ``Fraction`` values. Runs are bounded by an
explicit step budget (``fuel``); probability mass on paths that are still
running when fuel runs out is reported separately as unresolved.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional

from .machine import (
    DEFAULT_POLICY,
    AcceptancePolicy,
    Configuration,
    MachineError,
    Outcome,
    Program,
    ProgramLine,
    apply_instruction,
    is_halted,
)
from .nsm import TraceStep

DEFAULT_NODE_CAP = 10_000_000
SEED_BITS = 64


class BudgetExceeded(MachineError):
    def __init__(self, cap):
        super().__init__(f"exact enumeration would explore more than {cap} states")
        self.cap = cap


class EpsilonOutOfRange(MachineError):
    pass


class EtaOutOfRange(MachineError):
    pass


def _check_seed(seed):
    if not isinstance(seed, int) or not 0 <= seed < 2 ** SEED_BITS:
        raise ValueError(f"seed must be an integer in [0, 2**{SEED_BITS}), got {seed!r}")


class RandomSource:
    """Reproducible stream of choice indices.

    Each draw picks index ``i`` with probability exactly equal to the line's
    ``i``-th weight: a uniform integer in ``[0, L)`` is drawn, ``L`` being
    the LCM of the line's weight denominators, and compared against the
    integer-scaled cumulative weights.

    ``stream`` separates independent runs derived from one seed.
    """

    def __init__(self, seed: int = 0, stream: int = 0):
        _check_seed(seed)
        if stream < 0:
            raise ValueError("stream must be non-negative")
        self.seed = seed
        self.stream = stream
        self._rng = random.Random((stream << SEED_BITS) | seed)

    def draw(self, line: ProgramLine) -> int:
        total, cumulative = _cumulative(line)
        r = self._rng.randrange(total)
        for i, c in enumerate(cumulative):
            if r < c:
                return i
        raise AssertionError("weights do not sum to 1")


@lru_cache(maxsize=4096)
def _cumulative(line: ProgramLine):
    lcm = 1
    for w in line.weights:
        lcm = lcm * w.denominator // math.gcd(lcm, w.denominator)
    acc = 0
    cumulative = []
    for w in line.weights:
        acc += w.numerator * (lcm // w.denominator)
        cumulative.append(acc)
    return lcm, tuple(cumulative)


def lift_deterministic(program: Program) -> Program:
    """Turn a deterministic program into a probabilistic one whose single
    choice per line carries weight 1."""
    program.require_deterministic()
    return Program.deterministic(*(ln.instructions[0] for ln in program.lines))


@dataclass(frozen=True)
class PathResult:
    outcome: Outcome
    trace: tuple
    path_probability: Fraction
    steps: int
    random_choices: int
    final: Configuration


def sample_path(program: Program, inputs: Mapping[int, int] | None, fuel: int,
                rng: RandomSource, policy: AcceptancePolicy = DEFAULT_POLICY) -> PathResult:
    program.require_distributions()
    return _sample_path(program, Configuration.initial(inputs), fuel, rng, policy)


def _sample_path(program, config, fuel, rng, policy):
    probability = Fraction(1)
    trace = []
    random_choices = 0
    steps = 0
    while True:
        if is_halted(program, config):
            outcome = Outcome.ACCEPT if policy.accepts(config) else Outcome.REJECT
            break
        if steps == fuel:
            outcome = Outcome.UNRESOLVED
            break
        line = program.lines[config.counter]
        if line.width == 1:
            choice = 0
        else:
            choice = rng.draw(line)
            random_choices += 1
        instr, weight = line.choices[choice]
        probability *= weight
        trace.append(TraceStep(config.counter, choice, instr))
        config = apply_instruction(config, instr)
        steps += 1
    return PathResult(outcome, tuple(trace), probability, steps, random_choices, config)


@dataclass(frozen=True)
class ProbabilityInterval:
    """Exact split of probability mass after a fuel-bounded enumeration.

    The true acceptance probability lies in ``[lower, upper]``.
    """

    accept_mass: Fraction
    reject_mass: Fraction
    unresolved_mass: Fraction

    @property
    def lower(self) -> Fraction:
        return self.accept_mass

    @property
    def upper(self) -> Fraction:
        return self.accept_mass + self.unresolved_mass

    def as_tuple(self):
        return (self.accept_mass, self.reject_mass, self.unresolved_mass)


def _prepare(program, fuel):
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    program.require_distributions()


def exact_acceptance(program: Program, inputs: Mapping[int, int] | None, fuel: int,
                     policy: AcceptancePolicy = DEFAULT_POLICY,
                     node_cap: int = DEFAULT_NODE_CAP) -> ProbabilityInterval:
    """Walk every choice sequence of length at most ``fuel`` depth first,
    adding each path's probability to the bucket its end state falls into.

    Zero-weight choices are skipped; they carry no mass.
    """
    _prepare(program, fuel)
    # per-line (instruction, numerator, denominator) with zero weights dropped
    table = [tuple((i, w.numerator, w.denominator) for i, w in ln.choices if w)
             for ln in program.lines]
    # mass buckets keyed by path-probability denominator, summed at the end
    buckets = ({}, {}, {})
    explored = 0
    stack = [(Configuration.initial(inputs), 0, 1, 1)]
    while stack:
        config, depth, num, den = stack.pop()
        explored += 1
        if explored > node_cap:
            raise BudgetExceeded(node_cap)
        if config.counter >= len(table):
            bucket = buckets[0] if policy.accepts(config) else buckets[1]
        elif depth == fuel:
            bucket = buckets[2]
        else:
            for instr, wn, wd in reversed(table[config.counter]):
                stack.append((apply_instruction(config, instr), depth + 1, num * wn, den * wd))
            continue
        bucket[den] = bucket.get(den, 0) + num
    masses = [sum((Fraction(n, d) for d, n in b.items()), Fraction(0)) for b in buckets]
    return ProbabilityInterval(*masses)


def exact_acceptance_memoized(program: Program, inputs: Mapping[int, int] | None, fuel: int,
                              policy: AcceptancePolicy = DEFAULT_POLICY,
                              node_cap: int = DEFAULT_NODE_CAP) -> ProbabilityInterval:
    """Same result as :func:`exact_acceptance`, but mass arriving at equal
    configurations with equal remaining fuel is merged before expanding.

    Proceeds one step level at a time, so remaining fuel is implied by the
    level and the per-level dictionary is keyed by configuration alone.
    """
    _prepare(program, fuel)
    accept = reject = Fraction(0)
    level = {Configuration.initial(inputs): Fraction(1)}
    explored = 0
    for depth in range(fuel + 1):
        nxt = {}
        for config, mass in level.items():
            explored += 1
            if explored > node_cap:
                raise BudgetExceeded(node_cap)
            if is_halted(program, config):
                if policy.accepts(config):
                    accept += mass
                else:
                    reject += mass
                continue
            if depth == fuel:
                nxt[config] = nxt.get(config, 0) + mass
                continue
            for instr, w in program.lines[config.counter].choices:
                if w:
                    succ = apply_instruction(config, instr)
                    nxt[succ] = nxt.get(succ, 0) + mass * w
        level = nxt
        if not level:
            break
    unresolved = sum(level.values(), Fraction(0))
    return ProbabilityInterval(accept, reject, unresolved)


def _ln3_bounds(terms: int):
    """Rational bounds ``lo < ln 3 < hi`` from ln 3 = 2 atanh(1/2)."""
    quarter = Fraction(1, 4)
    power = Fraction(1, 2)
    total = Fraction(0)
    for k in range(terms):
        total += power / (2 * k + 1)
        power *= quarter
    # remaining terms are below a geometric series with ratio 1/4
    tail = power / (2 * terms + 1) / (1 - quarter)
    return 2 * total, 2 * (total + tail)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def sample_size(epsilon) -> int:
    """Number of samples ceil(ln 3 / epsilon**2), computed exactly.

    ln 3 is irrational, so ln 3 / epsilon**2 is never an integer for rational
    epsilon, and tightening the rational bounds always settles the ceiling.
    """
    eps = _as_fraction(epsilon)
    if not 0 < eps <= 1:
        raise EpsilonOutOfRange(f"epsilon must lie in (0, 1], got {eps}")
    scale = 1 / (eps * eps)
    terms = 32
    while True:
        lo, hi = _ln3_bounds(terms)
        k_lo, k_hi = math.ceil(lo * scale), math.ceil(hi * scale)
        if k_lo == k_hi:
            return k_lo
        terms *= 2


@dataclass(frozen=True)
class EstimateReport:
    estimate: Fraction
    sample_count: int
    accepts: int
    rejects: int
    unresolved: int
    epsilon: Fraction
    seed: int


def estimate_acceptance(program: Program, inputs: Mapping[int, int] | None, epsilon,
                        fuel: int, seed: int = 0,
                        policy: AcceptancePolicy = DEFAULT_POLICY) -> EstimateReport:
    eps = _as_fraction(epsilon)
    k = sample_size(eps)
    program.require_distributions()
    _check_seed(seed)
    start = Configuration.initial(inputs)
    counts = {Outcome.ACCEPT: 0, Outcome.REJECT: 0, Outcome.UNRESOLVED: 0}
    for run in range(k):
        result = _sample_path(program, start, fuel, RandomSource(seed, run), policy)
        counts[result.outcome] += 1
    accepts = counts[Outcome.ACCEPT]
    return EstimateReport(Fraction(accepts, k), k, accepts, counts[Outcome.REJECT],
                          counts[Outcome.UNRESOLVED], eps, seed)


class Decision(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    UNDETERMINED = "undetermined"


UNRESOLVED_MASS = "unresolved-mass"
ESTIMATE_IN_GAP = "estimate-in-gap"


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    reason: Optional[str] = None
    interval: Optional[ProbabilityInterval] = None
    estimate: Optional[EstimateReport] = None


HALF = Fraction(1, 2)


def decide_bounded_error(program: Program, inputs: Mapping[int, int] | None, eta, fuel: int,
                         mode: str = "exact", seed: int = 0,
                         policy: AcceptancePolicy = DEFAULT_POLICY,
                         node_cap: int = DEFAULT_NODE_CAP) -> Verdict:
    """Decide acceptance with gap ``eta`` around 1/2.

    ``mode="exact"`` compares the exact probability interval against 1/2.
    ``mode="sampled"`` estimates with epsilon = eta and accepts iff the
    accepting fraction exceeds 1/2. Unresolved samples count as not
    accepting; if they alone could flip the comparison the verdict is
    undetermined.
    """
    eta = _as_fraction(eta)
    if not 0 < eta < HALF:
        raise EtaOutOfRange(f"eta must lie in (0, 1/2), got {eta}")
    if mode == "exact":
        interval = exact_acceptance_memoized(program, inputs, fuel, policy, node_cap)
        if interval.accept_mass > HALF:
            return Verdict(Decision.ACCEPT, interval=interval)
        if interval.upper <= HALF:
            return Verdict(Decision.REJECT, interval=interval)
        return Verdict(Decision.UNDETERMINED, UNRESOLVED_MASS, interval=interval)
    if mode == "sampled":
        report = estimate_acceptance(program, inputs, eta, fuel, seed, policy)
        k, acc = report.sample_count, report.accepts
        if 2 * acc <= k < 2 * (acc + report.unresolved):
            return Verdict(Decision.UNDETERMINED, ESTIMATE_IN_GAP, estimate=report)
        if report.estimate > HALF:
            return Verdict(Decision.ACCEPT, estimate=report)
        return Verdict(Decision.REJECT, estimate=report)
    raise ValueError(f"unknown mode {mode!r}; use 'exact' or 'sampled'")
