"""Programs, configurations and the single-step semantics shared by every
machine variant (deterministic, non-deterministic, probabilistic).

A program is a list of lines; each line holds one or more weighted
instructions. Deterministic programs have exactly one choice per line.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Mapping, Union


class MachineError(Exception):
    pass


class ChoiceOutOfRange(MachineError):
    def __init__(self, line, choice, width):
        super().__init__(f"line {line} has {width} choice(s), got choice {choice}")
        self.line = line
        self.choice = choice
        self.width = width


class NotDeterministic(MachineError):
    def __init__(self, line, width):
        super().__init__(f"line {line} has {width} choices; a deterministic program needs exactly one")
        self.line = line
        self.width = width


class WeightError(MachineError):
    def __init__(self, line, total):
        super().__init__(f"weights on line {line} sum to {total}, expected 1")
        self.line = line
        self.total = total


@dataclass(frozen=True)
class Inc:
    register: int

    def __post_init__(self):
        _check_natural("register", self.register)

    def __str__(self):
        return f"INC {self.register}"


@dataclass(frozen=True)
class Dec:
    register: int
    target: int

    def __post_init__(self):
        _check_natural("register", self.register)
        _check_natural("target", self.target)

    def __str__(self):
        return f"DEC {self.register},{self.target}"


Instruction = Union[Inc, Dec]


def _check_natural(name, value):
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ValueError(f"{name} must be a natural number, got {value!r}")


@dataclass(frozen=True)
class ProgramLine:
    """One program line: a non-empty tuple of ``(instruction, weight)`` pairs.

    Weights are exact rationals. Whether they sum to one is checked by the
    probabilistic operations (and the parser), not here, so that a
    non-deterministic reading can ignore them.
    """

    choices: tuple

    def __post_init__(self):
        choices = tuple((instr, Fraction(w)) for instr, w in self.choices)
        if not choices:
            raise ValueError("a program line needs at least one instruction")
        for instr, w in choices:
            if not isinstance(instr, (Inc, Dec)):
                raise TypeError(f"not an instruction: {instr!r}")
            if w < 0:
                raise ValueError(f"negative weight {w}")
        object.__setattr__(self, "choices", choices)

    @classmethod
    def single(cls, instr: Instruction) -> "ProgramLine":
        return cls(((instr, Fraction(1)),))

    @classmethod
    def uniform(cls, *instrs: Instruction) -> "ProgramLine":
        w = Fraction(1, len(instrs)) if instrs else Fraction(1)
        return cls(tuple((i, w) for i in instrs))

    @property
    def width(self) -> int:
        return len(self.choices)

    @property
    def instructions(self) -> tuple:
        return tuple(i for i, _ in self.choices)

    @property
    def weights(self) -> tuple:
        return tuple(w for _, w in self.choices)


@dataclass(frozen=True)
class Program:
    lines: tuple = ()

    def __post_init__(self):
        lines = tuple(self.lines)
        for ln in lines:
            if not isinstance(ln, ProgramLine):
                raise TypeError(f"not a ProgramLine: {ln!r}")
        object.__setattr__(self, "lines", lines)

    @classmethod
    def deterministic(cls, *instrs: Instruction) -> "Program":
        return cls(tuple(ProgramLine.single(i) for i in instrs))

    def __len__(self):
        return len(self.lines)

    def __getitem__(self, index) -> ProgramLine:
        return self.lines[index]

    @property
    def is_deterministic(self) -> bool:
        return all(ln.width == 1 for ln in self.lines)

    def require_deterministic(self):
        for n, ln in enumerate(self.lines):
            if ln.width != 1:
                raise NotDeterministic(n, ln.width)

    def require_distributions(self):
        """Raise WeightError unless every line's weights sum to exactly 1."""
        for n, ln in enumerate(self.lines):
            total = sum(ln.weights, Fraction(0))
            if total != 1:
                raise WeightError(n, total)


@dataclass(frozen=True)
class Configuration:
    """Register contents plus instruction counter.

    Registers are stored sparsely as a sorted tuple of ``(index, value)``
    pairs with zero values dropped, so equal machine states compare and hash
    equal.
    """

    registers: tuple = ()
    counter: int = 0

    def __post_init__(self):
        regs = self.registers
        if isinstance(regs, Mapping):
            regs = regs.items()
        cleaned = {}
        for idx, val in regs:
            _check_natural("register index", idx)
            _check_natural("register value", val)
            if val:
                cleaned[idx] = val
        _check_natural("counter", self.counter)
        object.__setattr__(self, "registers", tuple(sorted(cleaned.items())))

    @classmethod
    def initial(cls, inputs: Mapping[int, int] | None = None) -> "Configuration":
        return cls(dict(inputs or {}), 0)

    def get(self, index: int) -> int:
        for idx, val in self.registers:
            if idx == index:
                return val
        return 0

    def as_dict(self) -> dict:
        return dict(self.registers)

    def __str__(self):
        regs = " ".join(f"R{i}={v}" for i, v in self.registers) or "-"
        return f"{regs} | {self.counter}"


def _make(registers: tuple, counter: int) -> Configuration:
    # registers must already be sorted, sparse and non-negative
    config = object.__new__(Configuration)
    object.__setattr__(config, "registers", registers)
    object.__setattr__(config, "counter", counter)
    return config


def _adjust(registers: tuple, index: int, delta: int) -> tuple:
    out = []
    placed = False
    for idx, val in registers:
        if idx == index:
            placed = True
            val += delta
            if val:
                out.append((idx, val))
            continue
        if not placed and idx > index:
            # only reachable for an increment of an absent register
            out.append((index, delta))
            placed = True
        out.append((idx, val))
    if not placed:
        out.append((index, delta))
    return tuple(out)


def apply_instruction(config: Configuration, instr: Instruction) -> Configuration:
    if isinstance(instr, Inc):
        return _make(_adjust(config.registers, instr.register, 1), config.counter + 1)
    if config.get(instr.register) > 0:
        return _make(_adjust(config.registers, instr.register, -1), instr.target)
    return _make(config.registers, config.counter + 1)


def is_halted(program: Program, config: Configuration) -> bool:
    return config.counter >= len(program.lines)


@dataclass(frozen=True)
class Continues:
    next: Configuration


@dataclass(frozen=True)
class Halted:
    final: Configuration


def step(program: Program, config: Configuration, choice: int = 0):
    """Execute the line addressed by the counter using the given choice.

    Returns ``Halted(config)`` unchanged if the counter is past the last line.
    """
    if is_halted(program, config):
        return Halted(config)
    line = program.lines[config.counter]
    if not 0 <= choice < line.width:
        raise ChoiceOutOfRange(config.counter, choice, line.width)
    return Continues(apply_instruction(config, line.choices[choice][0]))


@dataclass(frozen=True)
class HaltedRun:
    final: Configuration
    steps: int

    halted = True


@dataclass(frozen=True)
class FuelExhausted:
    last: Configuration
    steps: int

    halted = False

    @property
    def final(self):
        return self.last


def chain(program: Program, inputs: Mapping[int, int] | None, fuel: int) -> Iterator[Configuration]:
    """Yield the computation chain of a deterministic program, initial
    configuration first, for at most ``fuel`` steps."""
    program.require_deterministic()
    config = Configuration.initial(inputs)
    yield config
    for _ in range(fuel):
        if is_halted(program, config):
            return
        config = apply_instruction(config, program.lines[config.counter].choices[0][0])
        yield config


def run_deterministic(program: Program, inputs: Mapping[int, int] | None, fuel: int):
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    steps = -1
    for steps, config in enumerate(chain(program, inputs, fuel)):
        pass
    if is_halted(program, config):
        return HaltedRun(config, steps)
    return FuelExhausted(config, steps)


class Outcome(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    NOT_HALTED = "not-halted"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class AcceptancePolicy:
    """A halted configuration accepts iff ``accept_register`` holds a
    positive value."""

    accept_register: int = 0

    def __post_init__(self):
        _check_natural("accept_register", self.accept_register)

    def accepts(self, config: Configuration) -> bool:
        return config.get(self.accept_register) > 0


DEFAULT_POLICY = AcceptancePolicy()


def evaluate_acceptance(config: Configuration, policy: AcceptancePolicy = DEFAULT_POLICY,
                        halted: bool = True) -> Outcome:
    if not halted:
        return Outcome.NOT_HALTED
    return Outcome.ACCEPT if policy.accepts(config) else Outcome.REJECT
