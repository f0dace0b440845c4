"""Computation trees for non-deterministic programs.

Every multi-choice line branches into one child per instruction. Trees are
built breadth-first under a depth bound and a node budget; nodes that were
not expanded because of either limit are marked as frontier nodes.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

from .machine import (
    DEFAULT_POLICY,
    AcceptancePolicy,
    Configuration,
    Dec,
    Inc,
    MachineError,
    Program,
    apply_instruction,
    is_halted,
)


class AlreadyHalted(MachineError):
    pass


class NodeNotInTree(MachineError):
    pass


class TraceMismatch(MachineError):
    def __init__(self, index, reason):
        super().__init__(f"trace step {index}: {reason}")
        self.index = index
        self.reason = reason


class Status(Enum):
    EXPANDED = "expanded"
    HALTED = "halted"
    FRONTIER = "frontier"


@dataclass(frozen=True)
class TraceStep:
    line: int
    choice: int
    instruction: Inc | Dec


Trace = tuple  # of TraceStep


@dataclass(eq=False)
class TreeNode:
    id: int
    config: Configuration
    depth: int
    parent: Optional["TreeNode"] = None
    choice: Optional[int] = None
    status: Status = Status.FRONTIER
    children: list = field(default_factory=list)  # (choice, TreeNode)

    def __repr__(self):
        return f"TreeNode(id={self.id}, depth={self.depth}, config={self.config}, {self.status.value})"


@dataclass
class ComputationTree:
    root: TreeNode
    program: Program
    nodes: list  # breadth-first creation order; nodes[i].id == i

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def truncated(self) -> bool:
        return any(n.status is Status.FRONTIER for n in self.nodes)

    def leaves(self):
        return [n for n in self.nodes if n.status is Status.HALTED]

    def frontier(self):
        return [n for n in self.nodes if n.status is Status.FRONTIER]

    def edges(self):
        for n in self.nodes:
            for choice, child in n.children:
                yield n, child, choice


def expand(program: Program, config: Configuration) -> list:
    if is_halted(program, config):
        raise AlreadyHalted(f"counter {config.counter} is past the last line ({len(program)})")
    return [apply_instruction(config, instr) for instr in program.lines[config.counter].instructions]


def build_tree(program: Program, inputs: Mapping[int, int] | None,
               depth_bound: int, node_budget: int = 100_000) -> ComputationTree:
    if depth_bound < 0:
        raise ValueError("depth_bound must be non-negative")
    if node_budget < 1:
        raise ValueError("node_budget must be at least 1")
    root = TreeNode(0, Configuration.initial(inputs), 0)
    nodes = [root]
    head = 0
    while head < len(nodes):
        node = nodes[head]
        head += 1
        if is_halted(program, node.config):
            node.status = Status.HALTED
            continue
        if node.depth >= depth_bound:
            continue
        line = program.lines[node.config.counter]
        # expand all children or none, so Expanded nodes always have full width
        if len(nodes) + line.width > node_budget:
            continue
        node.status = Status.EXPANDED
        for choice, instr in enumerate(line.instructions):
            child = TreeNode(len(nodes), apply_instruction(node.config, instr),
                             node.depth + 1, node, choice)
            node.children.append((choice, child))
            nodes.append(child)
    return ComputationTree(root, program, nodes)


@dataclass(frozen=True)
class AllHalted:
    max_depth: int
    leaf_count: int

    all_halted = True


@dataclass(frozen=True)
class SomeRunning:
    live_frontier: int
    halted_leaves: int

    all_halted = False


def universal_halting(program: Program, inputs: Mapping[int, int] | None, fuel: int):
    """Check whether every branch halts within ``fuel`` steps.

    Works level by level on configuration multisets, so the counts are the
    exact node counts of the unmerged tree without materializing it.
    """
    level = Counter([Configuration.initial(inputs)])
    halted = 0
    max_depth = 0
    for depth in range(fuel + 1):
        running = Counter()
        for config, mult in level.items():
            if is_halted(program, config):
                halted += mult
                max_depth = depth
            else:
                running[config] += mult
        if not running:
            return AllHalted(max_depth, halted)
        if depth == fuel:
            return SomeRunning(sum(running.values()), halted)
        level = Counter()
        for config, mult in running.items():
            for succ in expand(program, config):
                level[succ] += mult
    raise AssertionError("unreachable")


def extract_trace(tree: ComputationTree, leaf: TreeNode) -> tuple:
    if not (0 <= leaf.id < len(tree.nodes) and tree.nodes[leaf.id] is leaf):
        raise NodeNotInTree(f"node {leaf.id} does not belong to this tree")
    steps = []
    node = leaf
    while node.parent is not None:
        parent = node.parent
        line = parent.config.counter
        instr = tree.program.lines[line].instructions[node.choice]
        steps.append(TraceStep(line, node.choice, instr))
        node = parent
    return tuple(reversed(steps))


@dataclass(frozen=True)
class LeafSearch:
    """Result of searching a tree for an accepting halted leaf.

    ``trace`` is None when no accepting leaf was materialized; in that case
    the answer is only conclusive if the tree was not truncated.
    """

    trace: Optional[tuple]
    node: Optional[TreeNode]
    truncated: bool

    @property
    def found(self) -> bool:
        return self.trace is not None

    @property
    def inconclusive(self) -> bool:
        return self.trace is None and self.truncated


def exists_accepting_leaf(tree: ComputationTree,
                          policy: AcceptancePolicy = DEFAULT_POLICY) -> LeafSearch:
    for node in tree.nodes:
        if node.status is Status.HALTED and policy.accepts(node.config):
            return LeafSearch(extract_trace(tree, node), node, tree.truncated)
    return LeafSearch(None, None, tree.truncated)


def replay_trace(program: Program, inputs: Mapping[int, int] | None, trace) -> Configuration:
    config = Configuration.initial(inputs)
    for i, entry in enumerate(trace):
        if config.counter != entry.line:
            raise TraceMismatch(i, f"counter is {config.counter}, trace says line {entry.line}")
        if is_halted(program, config):
            raise TraceMismatch(i, f"machine already halted at counter {config.counter}")
        line = program.lines[config.counter]
        if not 0 <= entry.choice < line.width:
            raise TraceMismatch(i, f"line {entry.line} has no choice {entry.choice}")
        instr = line.instructions[entry.choice]
        if instr != entry.instruction:
            raise TraceMismatch(i, f"recorded {entry.instruction}, program has {instr}")
        config = apply_instruction(config, instr)
    return config
