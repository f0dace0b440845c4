"""Seeded random programs and inputs for property tests."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .machine import Dec, Inc, Program, ProgramLine
from .parser import Mode


class InvalidParams(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorParams:
    """Shape of generated programs.

    ``line_count`` is an inclusive ``(low, high)`` range. DEC targets are drawn
    from ``[0, lines + jump_span]`` so some jumps leave the program and halt.
    Probabilistic weights are ``k_i / sum(k)`` with each ``k_i`` drawn from
    ``[1, weight_denominator_bound]``.
    """

    line_count: tuple = (1, 8)
    max_choices_per_line: int = 1
    register_span: int = 4
    jump_span: int = 2
    mode: Mode = Mode.DETERMINISTIC
    weight_denominator_bound: int = 4

    def validate(self):
        if not isinstance(self.mode, Mode):
            raise InvalidParams(f"unknown mode {self.mode!r}")
        lo, hi = self.line_count
        if not 0 <= lo <= hi:
            raise InvalidParams(f"bad line_count range {self.line_count}")
        if self.max_choices_per_line < 1:
            raise InvalidParams("max_choices_per_line must be at least 1")
        if self.mode is Mode.DETERMINISTIC and self.max_choices_per_line != 1:
            raise InvalidParams("deterministic mode allows exactly one choice per line")
        if self.register_span < 1:
            raise InvalidParams("register_span must be at least 1")
        if self.jump_span < 0:
            raise InvalidParams("jump_span must be non-negative")
        if self.weight_denominator_bound < 1:
            raise InvalidParams("weight_denominator_bound must be at least 1")


def _instruction(rng, params, lines):
    reg = rng.randrange(params.register_span)
    if rng.random() < 0.5:
        return Inc(reg)
    return Dec(reg, rng.randint(0, lines + params.jump_span))


def _weights(rng, m, bound):
    draws = [rng.randint(1, bound) for _ in range(m)]
    total = sum(draws)
    return [Fraction(d, total) for d in draws]


def generate_program(params: GeneratorParams, seed: int) -> Program:
    params.validate()
    rng = random.Random(seed)
    lo, hi = params.line_count
    n = rng.randint(lo, hi)
    lines = []
    for _ in range(n):
        m = rng.randint(1, params.max_choices_per_line)
        instrs = [_instruction(rng, params, n) for _ in range(m)]
        if params.mode is Mode.PROBABILISTIC:
            weights = _weights(rng, m, params.weight_denominator_bound)
            lines.append(ProgramLine(tuple(zip(instrs, weights))))
        else:
            lines.append(ProgramLine.uniform(*instrs))
    return Program(tuple(lines))


def generate_inputs(register_span: int, value_bound: int, seed: int) -> dict:
    rng = random.Random(seed)
    inputs = {}
    for reg in range(register_span):
        value = rng.randint(0, value_bound)
        if value:
            inputs[reg] = value
    return inputs
