"""Command-line front end: ``shm <command> [options]``.

Exit codes:
    0 ok / accept      1 reject            2 parse or usage error
    3 not deterministic  4 fuel exhausted  5 weight error
    6 node budget exceeded  7 epsilon/eta out of range
    8 undetermined     9 invalid generator parameters
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import nsm, psm
from .machine import (
    AcceptancePolicy,
    Configuration,
    NotDeterministic,
    WeightError,
    chain,
    run_deterministic,
)
from .parser import Mode, ParseError, format_program, parse_program
from .testkit import GeneratorParams, InvalidParams, generate_program

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_PARSE = 2
EXIT_NOT_DETERMINISTIC = 3
EXIT_FUEL = 4
EXIT_WEIGHT = 5
EXIT_BUDGET = 6
EXIT_RANGE = 7
EXIT_UNDETERMINED = 8
EXIT_PARAMS = 9


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def fraction_json(value: Fraction) -> dict:
    value = Fraction(value)
    return {"fraction": f"{value.numerator}/{value.denominator}", "decimal": float(value)}


def registers_json(config: Configuration) -> dict:
    return {str(i): v for i, v in config.registers}


def config_json(config: Configuration) -> dict:
    return {"registers": registers_json(config), "counter": config.counter}


def parse_reg(text: str):
    try:
        idx, val = text.split("=", 1)
        idx, val = int(idx), int(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected I=V with naturals, got {text!r}")
    if idx < 0 or val < 0:
        raise argparse.ArgumentTypeError(f"register index and value must be natural: {text!r}")
    return idx, val


def natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return value


def positive(text: str) -> int:
    value = natural(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def seed_value(text: str) -> int:
    value = natural(text)
    if value >= 2 ** psm.SEED_BITS:
        raise argparse.ArgumentTypeError(f"seed must be below 2**{psm.SEED_BITS}")
    return value


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}", EXIT_PARSE)
    try:
        return parse_program(text)
    except ParseError as exc:
        raise CliError(f"{path}:{exc.line}:{exc.column}: {type(exc).__name__}: {exc.message}",
                       EXIT_PARSE)


def inputs_of(args) -> dict:
    inputs = {}
    for idx, val in args.reg or ():
        inputs[idx] = val
    return inputs


def emit(args, command, parameters, result, text_lines, started):
    if args.format == "structured":
        timing = {"wall_ms": round((time.perf_counter() - started) * 1000, 3) if args.timing else None}
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "parameters": parameters,
            "result": result,
            "timing": timing,
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _common_params(args):
    return {"inputs": {str(k): v for k, v in sorted(inputs_of(args).items())},
            "accept_reg": args.accept_reg}


def cmd_run(args, started):
    src = load(args.program)
    program = src.parsed
    try:
        program.require_deterministic()
    except NotDeterministic as exc:
        raise CliError(str(exc), EXIT_NOT_DETERMINISTIC)
    result = run_deterministic(program, inputs_of(args), args.fuel)
    status = "halted" if result.halted else "fuel-exhausted"
    payload = {"status": status, "steps": result.steps, **config_json(result.final)}
    lines = []
    if args.trace:
        configs = list(chain(program, inputs_of(args), args.fuel))
        payload["chain"] = [config_json(c) for c in configs]
        lines += [f"{i:>6}  {c}" for i, c in enumerate(configs)]
    regs = " ".join(f"R{i}={v}" for i, v in result.final.registers) or "(all zero)"
    lines += [f"status: {status}", f"steps: {result.steps}",
              f"counter: {result.final.counter}", f"registers: {regs}"]
    params = {"fuel": args.fuel, **_common_params(args)}
    emit(args, "run", params, payload, lines, started)
    return EXIT_OK if result.halted else EXIT_FUEL


def _dot_escape(s):
    return s.replace("\\", "\\\\").replace('"', '\\"')


def tree_graph(tree: nsm.ComputationTree) -> str:
    out = ["digraph computation {",
           f"  graph [node_count={tree.node_count}, truncated={str(tree.truncated).lower()}];"]
    for n in tree.nodes:
        regs = " ".join(f"R{i}={v}" for i, v in n.config.registers)
        label = _dot_escape(f"{regs or '-'} | {n.config.counter}")
        out.append(f'  n{n.id} [label="{label}", depth={n.depth}, counter={n.config.counter}, '
                   f'registers="{regs}", status="{n.status.value}"];')
    for parent, child, choice in tree.edges():
        out.append(f'  n{parent.id} -> n{child.id} [label="{choice}", choice={choice}];')
    out.append("}")
    return "\n".join(out)


def cmd_tree(args, started):
    src = load(args.program)
    tree = nsm.build_tree(src.parsed, inputs_of(args), args.depth, args.node_budget)
    if args.format == "graph":
        print(tree_graph(tree))
        return EXIT_OK
    payload = {
        "node_count": tree.node_count,
        "truncated": tree.truncated,
        "nodes": [{"id": n.id, "depth": n.depth, "counter": n.config.counter,
                   "registers": registers_json(n.config), "status": n.status.value}
                  for n in tree.nodes],
        "edges": [{"parent": p.id, "child": c.id, "choice": ch} for p, c, ch in tree.edges()],
    }
    lines = [f"nodes: {tree.node_count}  truncated: {str(tree.truncated).lower()}"]
    for n in tree.nodes:
        via = "" if n.parent is None else f"  <- #{n.parent.id} choice {n.choice}"
        lines.append(f"{'  ' * n.depth}#{n.id} [{n.status.value}] {n.config}{via}")
    params = {"depth": args.depth, "node_budget": args.node_budget, **_common_params(args)}
    emit(args, "tree", params, payload, lines, started)
    return EXIT_OK


def interval_json(iv: psm.ProbabilityInterval) -> dict:
    return {"accept": fraction_json(iv.accept_mass),
            "reject": fraction_json(iv.reject_mass),
            "unresolved": fraction_json(iv.unresolved_mass)}


def interval_lines(iv: psm.ProbabilityInterval):
    return [f"accept: {iv.accept_mass}", f"reject: {iv.reject_mass}",
            f"unresolved: {iv.unresolved_mass}",
            f"acceptance probability in [{iv.lower}, {iv.upper}]"]


def cmd_prob(args, started):
    src = load(args.program)
    engine = psm.exact_acceptance if args.engine == "naive" else psm.exact_acceptance_memoized
    iv = engine(src.parsed, inputs_of(args), args.fuel, AcceptancePolicy(args.accept_reg),
                node_cap=args.node_cap)
    params = {"fuel": args.fuel, "engine": args.engine, "node_cap": args.node_cap,
              **_common_params(args)}
    emit(args, "prob", params, interval_json(iv), interval_lines(iv), started)
    return EXIT_OK


def estimate_json(rep: psm.EstimateReport) -> dict:
    return {"estimate": fraction_json(rep.estimate), "sample_count": rep.sample_count,
            "accepts": rep.accepts, "rejects": rep.rejects, "unresolved": rep.unresolved,
            "epsilon": fraction_json(rep.epsilon), "seed": rep.seed}


def estimate_lines(rep: psm.EstimateReport):
    return [f"estimate: {rep.estimate}", f"samples (k): {rep.sample_count}",
            f"accepts: {rep.accepts}", f"rejects: {rep.rejects}",
            f"unresolved: {rep.unresolved}", f"epsilon: {rep.epsilon}", f"seed: {rep.seed}"]


def cmd_estimate(args, started):
    src = load(args.program)
    rep = psm.estimate_acceptance(src.parsed, inputs_of(args), args.epsilon, args.fuel,
                                  args.seed, AcceptancePolicy(args.accept_reg))
    params = {"fuel": args.fuel, "epsilon": fraction_json(args.epsilon), "seed": args.seed,
              **_common_params(args)}
    emit(args, "estimate", params, estimate_json(rep), estimate_lines(rep), started)
    return EXIT_OK


def cmd_decide(args, started):
    src = load(args.program)
    verdict = psm.decide_bounded_error(src.parsed, inputs_of(args), args.eta, args.fuel,
                                       mode=args.mode, seed=args.seed,
                                       policy=AcceptancePolicy(args.accept_reg),
                                       node_cap=args.node_cap)
    payload = {"verdict": verdict.decision.value, "reason": verdict.reason}
    lines = [f"verdict: {verdict.decision.value}"
             + (f" ({verdict.reason})" if verdict.reason else "")]
    if verdict.interval is not None:
        payload["interval"] = interval_json(verdict.interval)
        lines += interval_lines(verdict.interval)
    if verdict.estimate is not None:
        payload["estimate"] = estimate_json(verdict.estimate)
        lines += estimate_lines(verdict.estimate)
    params = {"fuel": args.fuel, "eta": fraction_json(args.eta), "mode": args.mode,
              "seed": args.seed, "node_cap": args.node_cap, **_common_params(args)}
    emit(args, "decide", params, payload, lines, started)
    return {psm.Decision.ACCEPT: EXIT_OK, psm.Decision.REJECT: EXIT_REJECT,
            psm.Decision.UNDETERMINED: EXIT_UNDETERMINED}[verdict.decision]


GEN_MODES = {"det": Mode.DETERMINISTIC, "nondet": Mode.NONDETERMINISTIC,
             "prob": Mode.PROBABILISTIC}


def cmd_gen(args, started):
    lo = args.lines if args.min_lines is None else args.min_lines
    mode = GEN_MODES[args.mode]
    max_choices = args.max_choices
    if max_choices is None:
        max_choices = 1 if mode is Mode.DETERMINISTIC else 3
    params = GeneratorParams(line_count=(lo, args.lines), max_choices_per_line=max_choices,
                             register_span=args.register_span, jump_span=args.jump_span,
                             mode=mode, weight_denominator_bound=args.weight_bound)
    try:
        program = generate_program(params, args.seed)
    except InvalidParams as exc:
        raise CliError(str(exc), EXIT_PARAMS)
    sys.stdout.write(format_program(program))
    return EXIT_OK


def cmd_check(args, started):
    src = load(args.program)
    program = src.parsed
    canonical = format_program(program)
    again = parse_program(canonical)
    fixpoint = again.parsed == program and format_program(again.parsed) == canonical
    width = max((ln.width for ln in program.lines), default=0)
    try:
        program.require_distributions()
        weights = "ok"
    except WeightError as exc:
        weights = str(exc)
    payload = {"status": "ok" if fixpoint else "round-trip-failed", "mode": src.mode.value,
               "lines": len(program), "max_choices": width, "weights": weights,
               "round_trip": fixpoint}
    lines = [payload["status"], f"mode: {src.mode.value}", f"lines: {len(program)}",
             f"max choices per line: {width}", f"weights: {weights}",
             f"round trip: {'fixpoint' if fixpoint else 'MISMATCH'}"]
    emit(args, "check", {}, payload, lines, started)
    return EXIT_OK if fixpoint else EXIT_PARSE


def build_parser() -> argparse.ArgumentParser:
    env_cap = os.environ.get("SHM_NODE_CAP")
    default_cap = int(env_cap) if env_cap else psm.DEFAULT_NODE_CAP

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("program", help="path to a .shm program")
    common.add_argument("--reg", action="append", type=parse_reg, metavar="I=V",
                        help="initial register value (repeatable)")
    common.add_argument("--accept-reg", type=natural, default=0,
                        help="register that must be positive for acceptance (default 0)")
    common.add_argument("--timing", action="store_true",
                        help="record wall-clock time in structured output")

    fuel = argparse.ArgumentParser(add_help=False)
    fuel.add_argument("--fuel", type=natural, default=10000, help="step budget (default 10000)")

    cap = argparse.ArgumentParser(add_help=False)
    cap.add_argument("--node-cap", type=natural, default=default_cap,
                     help="max states explored by exact enumeration")

    def fmt(p, graph=False):
        choices = ["text", "structured", "graph"] if graph else ["text", "structured"]
        p.add_argument("--format", choices=choices, default="text")

    parser = argparse.ArgumentParser(prog="shm", description="Shoenfield register machine toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common, fuel], help="run a deterministic program")
    p.add_argument("--trace", action="store_true", help="list every configuration of the chain")
    fmt(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("tree", parents=[common], help="build the non-deterministic computation tree")
    p.add_argument("--depth", type=natural, default=10)
    p.add_argument("--node-budget", type=positive, default=10000)
    fmt(p, graph=True)
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("prob", parents=[common, fuel, cap], help="exact acceptance probability")
    p.add_argument("--engine", choices=["naive", "memoized"], default="memoized")
    fmt(p)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("estimate", parents=[common, fuel], help="Monte Carlo acceptance estimate")
    p.add_argument("--epsilon", type=parse_fraction, required=True)
    p.add_argument("--seed", type=seed_value, default=0)
    fmt(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("decide", parents=[common, fuel, cap], help="bounded-error decision")
    p.add_argument("--eta", type=parse_fraction, required=True)
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--seed", type=seed_value, default=0)
    fmt(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("gen", help="generate a random program")
    p.add_argument("--mode", choices=sorted(GEN_MODES), default="det")
    p.add_argument("--lines", type=natural, default=5, help="line count (maximum if --min-lines given)")
    p.add_argument("--min-lines", type=natural, default=None)
    p.add_argument("--max-choices", type=natural, default=None)
    p.add_argument("--register-span", type=natural, default=4)
    p.add_argument("--jump-span", type=natural, default=2)
    p.add_argument("--weight-bound", type=natural, default=4)
    p.add_argument("--seed", type=seed_value, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="validate a program and confirm the format round trip")
    p.add_argument("program")
    p.add_argument("--format", choices=["text", "structured"], default="text")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        return args.func(args, started)
    except CliError as exc:
        print(f"shm: {exc}", file=sys.stderr)
        return exc.code
    except NotDeterministic as exc:
        print(f"shm: {exc}", file=sys.stderr)
        return EXIT_NOT_DETERMINISTIC
    except WeightError as exc:
        print(f"shm: {exc}", file=sys.stderr)
        return EXIT_WEIGHT
    except psm.BudgetExceeded as exc:
        print(f"shm: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (psm.EpsilonOutOfRange, psm.EtaOutOfRange) as exc:
        print(f"shm: {exc}", file=sys.stderr)
        return EXIT_RANGE


if __name__ == "__main__":
    sys.exit(main())
