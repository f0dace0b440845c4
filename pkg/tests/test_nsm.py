import pytest
from hypothesis import given, strategies as st

from shoenfield import (
    AllHalted,
    AlreadyHalted,
    Configuration,
    Dec,
    Inc,
    NodeNotInTree,
    Program,
    SomeRunning,
    Status,
    TraceMismatch,
    TraceStep,
    build_tree,
    chain,
    exists_accepting_leaf,
    expand,
    extract_trace,
    parse_program,
    replay_trace,
    universal_halting,
)

from strategies import det_programs, programs, register_maps


def prog(text):
    return parse_program(text).parsed


def test_expand_single():
    p = Program.deterministic(Inc(1))
    assert expand(p, Configuration({1: 0}, 0)) == [Configuration({1: 1}, 1)]


def test_expand_two_choices():
    p = prog("0: INC 0 | DEC 9,2")
    assert expand(p, Configuration({}, 0)) == [Configuration({0: 1}, 1), Configuration({}, 1)]


def test_expand_halted():
    with pytest.raises(AlreadyHalted):
        expand(prog("0: INC 0\n1: INC 0\n2: INC 0"), Configuration({}, 5))


def test_tree_of_empty_program():
    tree = build_tree(Program(), {}, 5, 10)
    assert tree.node_count == 1
    assert tree.root.status is Status.HALTED and not tree.truncated


def test_tree_one_branching_line():
    tree = build_tree(prog("0: INC 0 | INC 1"), {}, 1, 100)
    assert tree.node_count == 3
    assert [n.status for n in tree.nodes] == [Status.EXPANDED, Status.HALTED, Status.HALTED]
    assert [c for c, _ in tree.root.children] == [0, 1]
    assert not tree.truncated


def test_tree_loop_is_a_truncated_path(loop):
    tree = build_tree(loop, {}, 4, 100)
    assert tree.node_count == 5
    assert [n.depth for n in tree.nodes] == [0, 1, 2, 3, 4]
    assert tree.nodes[-1].status is Status.FRONTIER
    assert tree.truncated


def test_node_budget_cuts_expansion():
    tree = build_tree(prog("0: INC 0 | INC 1 | INC 2\n1: INC 0 | INC 1 | INC 2"), {}, 10, 6)
    # root + 3 children = 4; expanding another would need 3 more
    assert tree.node_count == 4
    assert [n.status for n in tree.nodes[1:]] == [Status.FRONTIER] * 3


def test_universal_halting_both_branches_halt():
    assert universal_halting(prog("0: INC 0 | INC 1"), {}, 2) == AllHalted(1, 2)
    assert universal_halting(prog("0: INC 0 | DEC 9,0"), {}, 2) == AllHalted(1, 2)


def test_universal_halting_counts_by_hand():
    # line 0 branches; INC 9 leads to the loop 0->1->0, INC 0 halts via DEC 9,0 falling through.
    # depth 1: {R9=1|1}, {R0=1|1}; depth 2: {|0}, {R0=1|2 halted}; depth 3: {R9=1|1},{R0=1|1} ...
    # every two levels one more halted leaf; at fuel 10 the live frontier holds one node.
    report = universal_halting(prog("0: INC 9 | INC 0\n1: DEC 9,0"), {}, 10)
    assert report == SomeRunning(1, 5)


def test_accepting_leaf_found():
    tree = build_tree(prog("0: INC 0 | DEC 9,2"), {}, 1, 10)
    result = exists_accepting_leaf(tree)
    assert result.found
    assert result.trace == (TraceStep(0, 0, Inc(0)),)


def test_no_accepting_leaf():
    tree = build_tree(prog("0: DEC 9,2 | DEC 9,2"), {}, 1, 10)
    result = exists_accepting_leaf(tree)
    assert not result.found and not result.inconclusive


def test_empty_program_has_no_accepting_leaf():
    result = exists_accepting_leaf(build_tree(Program(), {}, 3, 10))
    assert result.trace is None and not result.inconclusive


def test_truncated_search_is_inconclusive(loop):
    result = exists_accepting_leaf(build_tree(loop, {}, 6, 100))
    assert result.trace is None and result.inconclusive


def test_extract_root_trace_is_empty():
    tree = build_tree(prog("0: INC 0 | INC 1"), {}, 1, 10)
    assert extract_trace(tree, tree.root) == ()


def test_extract_depth_one_trace():
    tree = build_tree(prog("0: INC 0 | DEC 3,7"), {}, 1, 10)
    leaf = tree.root.children[1][1]
    assert extract_trace(tree, leaf) == (TraceStep(0, 1, Dec(3, 7)),)


def test_extract_depth_two_trace_replays():
    p = prog("0: INC 0 | INC 1\n1: INC 2 | DEC 1,5")
    tree = build_tree(p, {}, 2, 100)
    leaf = tree.nodes[-1]
    assert leaf.depth == 2
    trace = extract_trace(tree, leaf)
    assert len(trace) == 2
    assert replay_trace(p, {}, trace) == leaf.config


def test_extract_foreign_node():
    p = prog("0: INC 0 | INC 1")
    t1, t2 = build_tree(p, {}, 1, 10), build_tree(p, {}, 1, 10)
    with pytest.raises(NodeNotInTree):
        extract_trace(t1, t2.nodes[1])


def test_replay_empty_trace():
    assert replay_trace(Program.deterministic(Inc(0)), {1: 5}, ()) == Configuration({1: 5}, 0)


def test_replay_mismatched_instruction():
    p = Program.deterministic(Dec(1, 0))
    with pytest.raises(TraceMismatch) as err:
        replay_trace(p, {}, (TraceStep(0, 0, Inc(1)),))
    assert err.value.index == 0


def test_replay_wrong_line_and_bad_choice():
    p = prog("0: INC 0 | INC 1\n1: INC 2")
    with pytest.raises(TraceMismatch) as err:
        replay_trace(p, {}, (TraceStep(0, 0, Inc(0)), TraceStep(0, 0, Inc(0))))
    assert err.value.index == 1
    with pytest.raises(TraceMismatch):
        replay_trace(p, {}, (TraceStep(0, 2, Inc(0)),))


@given(programs(max_lines=5, max_choices=3), register_maps, st.integers(0, 7))
def test_tree_structure_invariants(p, inputs, depth):
    tree = build_tree(p, inputs, depth, 3000)
    internal = leaves = frontier = 0
    for n in tree.nodes:
        halted = n.config.counter >= len(p)
        assert (n.status is Status.HALTED) == halted
        if n.status is Status.EXPANDED:
            internal += 1
            assert len(n.children) == p.lines[n.config.counter].width
            assert all(child.depth == n.depth + 1 for _, child in n.children)
            assert expand(p, n.config) == [child.config for _, child in n.children]
        else:
            assert n.children == []
            leaves += n.status is Status.HALTED
            frontier += n.status is Status.FRONTIER
    assert leaves + frontier + internal == tree.node_count
    assert tree.truncated == (frontier > 0)


@given(programs(max_lines=5, max_choices=3), register_maps, st.integers(0, 7))
def test_every_leaf_replays(p, inputs, depth):
    tree = build_tree(p, inputs, depth, 3000)
    for leaf in tree.leaves():
        trace = extract_trace(tree, leaf)
        assert [s.line for s in trace] == _counters_along(leaf)
        assert replay_trace(p, inputs, trace) == leaf.config


def _counters_along(node):
    out = []
    while node.parent is not None:
        out.append(node.parent.config.counter)
        node = node.parent
    return out[::-1]


@given(det_programs(), register_maps, st.integers(0, 25))
def test_deterministic_tree_is_the_run_chain(p, inputs, depth):
    tree = build_tree(p, inputs, depth, 10_000)
    assert [n.config for n in tree.nodes] == list(chain(p, inputs, depth))
    assert [n.depth for n in tree.nodes] == list(range(tree.node_count))


@given(programs(max_lines=4, max_choices=3), register_maps, st.integers(0, 6))
def test_universal_halting_agrees_with_tree(p, inputs, fuel):
    report = universal_halting(p, inputs, fuel)
    tree = build_tree(p, inputs, fuel, 10 ** 6)
    leaves = tree.leaves()
    if tree.truncated:
        assert report == SomeRunning(len(tree.frontier()), len(leaves))
    else:
        assert report == AllHalted(max(n.depth for n in leaves), len(leaves))
