"""Text format for register-machine programs (``.shm`` files).

::

    # comments run to end of line
    0: DEC 1,3
    1: INC 0 | INC 1              # uniform 1/2 each
    2: [1/3] INC 0 | [2/3] DEC 9,2

Line indices must count up from 0. A line is either fully annotated with
weights or not at all; unannotated multi-choice lines get uniform weights.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .machine import Dec, Inc, Program, ProgramLine


class Mode(Enum):
    DETERMINISTIC = "deterministic"
    NONDETERMINISTIC = "nondeterministic"
    PROBABILISTIC = "probabilistic"


class ParseError(Exception):
    """Base class for program-text errors; ``line`` and ``column`` are 1-based."""

    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ProgramSyntaxError(ParseError):
    pass


class WeightSumError(ParseError):
    pass


class MixedAnnotationError(ParseError):
    pass


class EmptyLineError(ParseError):
    pass


@dataclass(frozen=True)
class SourceProgram:
    text: str
    parsed: Program
    mode: Mode


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<int>\d+)
  | (?P<word>[A-Za-z]+)
  | (?P<punct>[:|\[\]/,])
  | (?P<comment>\#.*)
""", re.VERBOSE)


def _tokenize(text, lineno):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ProgramSyntaxError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind == "comment":
            break
        if kind != "ws":
            tokens.append((kind, m.group(), pos + 1))
        pos = m.end()
    return tokens


class _LineParser:
    def __init__(self, tokens, lineno, eol_col):
        self.tokens = tokens
        self.i = 0
        self.lineno = lineno
        self.eol_col = eol_col

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def error(self, message, tok=None):
        col = tok[2] if tok else self.eol_col
        return ProgramSyntaxError(message, self.lineno, col)

    def expect(self, kind, value=None):
        tok = self.peek()
        if tok is None or tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = "end of line" if tok is None else repr(tok[1])
            raise self.error(f"expected {want}, got {got}", tok)
        self.i += 1
        return tok

    def integer(self):
        return int(self.expect("int")[1])

    def weight(self):
        self.expect("punct", "[")
        num = self.integer()
        den = 1
        tok = self.peek()
        if tok is not None and tok[1] == "/":
            self.i += 1
            den_tok = self.peek()
            den = self.integer()
            if den == 0:
                raise self.error("zero denominator in weight", den_tok)
        self.expect("punct", "]")
        return Fraction(num, den)

    def instruction(self):
        tok = self.peek()
        if tok is None or tok[0] != "word":
            got = "end of line" if tok is None else repr(tok[1])
            raise self.error(f"expected INC or DEC, got {got}", tok)
        self.i += 1
        if tok[1] == "INC":
            return Inc(self.integer())
        if tok[1] == "DEC":
            reg = self.integer()
            self.expect("punct", ",")
            return Dec(reg, self.integer())
        raise self.error(f"unknown instruction {tok[1]!r}", tok)

    def choice(self):
        tok = self.peek()
        weight = None
        if tok is not None and tok[1] == "[":
            weight = self.weight()
        return self.instruction(), weight


def parse_program(text: str) -> SourceProgram:
    lines = []
    annotated_any = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(raw, lineno)
        if not tokens:
            continue
        p = _LineParser(tokens, lineno, len(raw) + 1)
        idx_tok = p.peek()
        index = p.integer()
        if index != len(lines):
            raise ProgramSyntaxError(f"expected line index {len(lines)}, got {index}",
                                     lineno, idx_tok[2])
        p.expect("punct", ":")
        if p.peek() is None:
            raise EmptyLineError(f"line {index} has no instructions", lineno, p.eol_col)
        choices = [p.choice()]
        while p.peek() is not None:
            p.expect("punct", "|")
            choices.append(p.choice())

        weights = [w for _, w in choices]
        annotated = [w is not None for w in weights]
        if any(annotated) and not all(annotated):
            raise MixedAnnotationError(
                f"line {index} annotates {sum(annotated)} of {len(choices)} choices",
                lineno, idx_tok[2])
        if all(annotated):
            annotated_any = True
            total = sum(weights, Fraction(0))
            if total != 1:
                raise WeightSumError(f"weights on line {index} sum to {total}, expected 1",
                                     lineno, idx_tok[2])
            lines.append(ProgramLine(tuple(choices)))
        else:
            lines.append(ProgramLine.uniform(*(instr for instr, _ in choices)))

    program = Program(tuple(lines))
    if annotated_any:
        mode = Mode.PROBABILISTIC
    elif program.is_deterministic:
        mode = Mode.DETERMINISTIC
    else:
        mode = Mode.NONDETERMINISTIC
    return SourceProgram(text, program, mode)


def format_line(line: ProgramLine) -> str:
    show = line.width > 1 or any(w != 1 for w in line.weights)
    parts = []
    for instr, w in line.choices:
        parts.append(f"[{w}] {instr}" if show else str(instr))
    return " | ".join(parts)


def format_program(program: Program) -> str:
    return "".join(f"{n}: {format_line(ln)}\n" for n, ln in enumerate(program.lines))
