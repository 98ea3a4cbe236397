import pytest

from ultratree.words import (ExplicitWindow, FullShift, LanguageTable,
                             fibonacci_spec, language_table)
from ultratree.tree import (InfeasibleChoiceError, StructuralError,
                            approximation_graph, build_tree, choice_function,
                            graph_is_connected, horizontal_edges, tree_for)
from ultratree.metrics import DeltaSequence


def test_full_shift_tree_shape():
    tree = tree_for(FullShift(2), 3)
    assert [len(lv) for lv in tree.levels] == [1, 2, 4, 8]
    assert tree.a("") == 1 and tree.a("ab") == 1
    assert tree.leaves() == tree.levels[3]
    assert tree.parent("aba") == "ab"
    assert tree.is_branching("a") and not tree.is_branching("aaa")


def test_fibonacci_tree_single_branching_per_level():
    tree = tree_for(fibonacci_spec(), 8)
    for n in range(8):
        branching = [v for v in tree.levels[n] if tree.a(v) > 0]
        assert len(branching) == 1


def test_structural_errors():
    with pytest.raises(StructuralError):
        build_tree(LanguageTable(2, (("",), ("a", "b"), ("ba",)),
                                 (True,) * 3))
    with pytest.raises(StructuralError):
        build_tree(LanguageTable(2, (("",), ("a", "b"), ("aa", "ab")),
                                 (True,) * 3))


def test_horizontal_edges():
    tree = tree_for(FullShift(2), 3)
    assert horizontal_edges(tree, 1) == [("a", "b")]
    assert len(horizontal_edges(tree, 3)) == 4
    tree3 = tree_for(FullShift(3), 2)
    assert len(horizontal_edges(tree3, 2)) == 3 * 3
    with pytest.raises(ValueError):
        horizontal_edges(tree, 0)


def test_canonical_choice():
    tree = tree_for(FullShift(2), 4)
    tau = choice_function(tree)
    assert tau("") == "a"
    assert tau.representative[""] == "aaaa"
    assert tau.representative["b"] == "baaa"


def test_seeded_choice_deterministic():
    tree = tree_for(FullShift(2), 5)
    t1 = choice_function(tree, policy="seeded-random", seed=11)
    t2 = choice_function(tree, policy="seeded-random", seed=11)
    t3 = choice_function(tree, policy="seeded-random", seed=12)
    assert t1.selection == t2.selection
    assert t1.selection != t3.selection


def test_adversarial_path_choice():
    tree = tree_for(FullShift(2), 3)
    tau = choice_function(tree, policy="adversarial-path", path="aaa",
                          bits=(1, 0, 1))
    assert tau("") == "b"
    assert tau("a") == "aa"
    assert tau("aa") == "aab"
    with pytest.raises(ValueError):
        choice_function(tree, policy="adversarial-path", path="aa",
                        bits=(0, 0))
    fib = tree_for(fibonacci_spec(), 4)
    # most Fibonacci nodes have a single child, so deviation is infeasible
    path = fib.leaves()[0]
    nonbranching = next(n for n in range(4) if fib.a(path[:n]) == 0)
    bits = [0] * 4
    bits[nonbranching] = 1
    with pytest.raises(InfeasibleChoiceError):
        choice_function(fib, policy="adversarial-path", path=path,
                        bits=bits)


def test_unknown_policy():
    tree = tree_for(FullShift(2), 2)
    with pytest.raises(ValueError):
        choice_function(tree, policy="alphabetical")


def test_approximation_graph_depth1():
    tree = tree_for(FullShift(2), 1)
    tau = choice_function(tree)
    delta = DeltaSequence.exponential()
    graph = approximation_graph(tree, tau, delta)
    assert graph.edge_list() == [("a", "b", delta[0])]


def test_approximation_graph_collapse_keeps_min_length():
    tree = tree_for(FullShift(2), 2)
    tau = choice_function(tree)
    delta = DeltaSequence.exponential()
    graph = approximation_graph(tree, tau, delta)
    # the root edge (a, b) collapses onto (aa, ba); the sibling edges at
    # level 2 connect aa-ab and ba-bb with the shorter length delta_1
    lengths = {frozenset((u, v)): d for u, v, d in graph.edge_list()}
    assert lengths[frozenset(("aa", "ba"))] == delta[0]
    assert lengths[frozenset(("aa", "ab"))] == delta[1]


def test_graph_connected_on_specs():
    delta = DeltaSequence.exponential()
    for spec in (FullShift(2), FullShift(3), fibonacci_spec(),
                 ExplicitWindow("abaababaab")):
        tree = build_tree(language_table(spec, 5))
        for policy, kw in (("canonical", {}),
                           ("seeded-random", {"seed": 3})):
            tau = choice_function(tree, policy=policy, **kw)
            graph = approximation_graph(tree, tau, delta)
            assert graph_is_connected(graph)
