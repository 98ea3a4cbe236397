import math
import random

import pytest

from ultratree.words import FullShift, SturmianCF, fibonacci_spec
from ultratree.tree import approximation_graph, choice_function, tree_for
from ultratree.metrics import (DeltaSequence, DepthMismatchError,
                               OrderDiagnostic, beta_bar_profile,
                               beta_profile, common_prefix_length,
                               continuity_witness, continuity_witness_fast,
                               delta_from_name, enumerate_choice_functions,
                               graph_distance_oracle, graph_distances,
                               inf_spectral_distance, lipschitz_estimate,
                               lipschitz_estimate_fast, spectral_distance,
                               spectral_distance_range_bruteforce,
                               sup_spectral_distance, trend_verdict,
                               ultrametric_distance)

SPECS = (FullShift(2), FullShift(3), fibonacci_spec(),
         SturmianCF((), ("linear",)))


# ---------------------------------------------------------------------------
# delta sequences


def test_delta_families():
    exp = DeltaSequence.exponential()
    assert exp[0] == 1.0
    assert exp[3] == pytest.approx(math.exp(-3))
    harm = DeltaSequence.harmonic()
    assert harm.prefix(3) == [1.0, 0.5, pytest.approx(1 / 3)]
    geo = DeltaSequence.geometric(0.5)
    assert geo[4] == pytest.approx(0.5 ** 4)


def test_delta_ratio_survives_underflow():
    exp = DeltaSequence.exponential()
    assert exp[800] == 0.0  # underflows as a value
    assert exp.ratio(801, 800) == pytest.approx(math.exp(-1))
    assert exp.ratio(800, 790) == pytest.approx(math.exp(-10))


def test_delta_table_and_errors():
    tab = DeltaSequence.table([1.0, 0.25, 0.1])
    assert tab[1] == 0.25
    with pytest.raises(IndexError):
        tab[3]
    with pytest.raises(ValueError):
        DeltaSequence.table([1.0, 0.0])
    increasing = DeltaSequence.table([0.5, 0.7])
    with pytest.raises(ValueError):
        increasing[1]
    with pytest.raises(ValueError):
        DeltaSequence.geometric(1.5)


def test_delta_powerlog_decreasing():
    for a, b in ((1.5, 0.0), (1.0, 1.0), (0.5, 2.0)):
        d = DeltaSequence.powerlog(a, b)
        vals = d.prefix(200)
        assert all(x > y for x, y in zip(vals, vals[1:]))


def test_delta_tail_bounds():
    exp = DeltaSequence.exponential()
    assert exp.tail_bound(10) >= sum(exp[n] for n in range(10, 200))
    assert DeltaSequence.harmonic().tail_bound(10) == math.inf
    pl = DeltaSequence.powerlog(2.0, 0.0)
    assert pl.tail_bound(10) >= sum(pl[n] for n in range(10, 5000))


def test_delta_from_name():
    assert delta_from_name("exp").name == "exponential"
    assert delta_from_name("harmonic").name == "harmonic"
    assert delta_from_name("geom:0.5")[1] == 0.5
    assert delta_from_name("powerlog:1.5,0").name == "powerlog:1.5,0.0"
    with pytest.raises(ValueError):
        delta_from_name("zeno")


# ---------------------------------------------------------------------------
# distances


def test_ultrametric_basics():
    delta = DeltaSequence.exponential()
    assert common_prefix_length("abab", "abba") == 2
    assert ultrametric_distance("abab", "abab", delta) == 0.0
    assert ultrametric_distance("abab", "abba", delta) == delta[2]
    with pytest.raises(DepthMismatchError):
        ultrametric_distance("ab", "abc", delta)


def test_ultrametric_law():
    delta = DeltaSequence.exponential()
    tree = tree_for(FullShift(2), 6)
    rng = random.Random(0)
    leaves = tree.leaves()
    for _ in range(200):
        x, y, z = (rng.choice(leaves) for _ in range(3))
        d = ultrametric_distance
        assert d(x, y, delta) <= max(d(x, z, delta), d(y, z, delta)) + 1e-15


def test_profiles():
    tree = tree_for(fibonacci_spec(), 5)
    tau = choice_function(tree)
    xi = tau.representative[""]
    assert beta_profile(tree, tau, xi) == [0] * 5
    bar = beta_bar_profile(tree, xi)
    assert all(b in (0, 1) for b in bar)
    assert sum(bar) == sum(1 for n in range(5) if tree.a(xi[:n]) > 0)


def test_sandwich_property():
    delta = DeltaSequence.exponential()
    for spec in SPECS:
        tree = tree_for(spec, 6)
        leaves = tree.leaves()
        rng = random.Random(1)
        taus = [choice_function(tree),
                choice_function(tree, policy="seeded-random", seed=5)]
        for _ in range(100):
            x, y = rng.choice(leaves), rng.choice(leaves)
            lo = inf_spectral_distance(tree, delta, x, y)
            hi = sup_spectral_distance(tree, delta, x, y)
            assert lo == ultrametric_distance(x, y, delta)
            for tau in taus:
                d = spectral_distance(tree, tau, delta, x, y)
                assert lo - 1e-15 <= d <= hi + 1e-15


def test_spectral_distance_matches_graph_oracle():
    delta = DeltaSequence.exponential()
    for spec in SPECS:
        tree = tree_for(spec, 6)
        tau = choice_function(tree, policy="seeded-random", seed=9)
        graph = approximation_graph(tree, tau, delta)
        reps = sorted(set(tau.representative.values()))
        rng = random.Random(2)
        pairs = [(rng.choice(reps), rng.choice(reps)) for _ in range(40)]
        pairs = [(x, y) for x, y in pairs if x != y]
        dists = graph_distances(graph, pairs)
        for (x, y), dg in zip(pairs, dists):
            dc = spectral_distance(tree, tau, delta, x, y)
            assert abs(dc - dg) <= 1e-12
            assert abs(graph_distance_oracle(graph, x, y) - dg) <= 1e-15


def test_triangle_inequality_on_representatives():
    delta = DeltaSequence.exponential()
    tree = tree_for(FullShift(2), 6)
    tau = choice_function(tree, policy="seeded-random", seed=4)
    reps = sorted(set(tau.representative.values()))
    rng = random.Random(3)
    for _ in range(100):
        x, y, z = (rng.choice(reps) for _ in range(3))
        dxy = spectral_distance(tree, tau, delta, x, y)
        dxz = spectral_distance(tree, tau, delta, x, z)
        dzy = spectral_distance(tree, tau, delta, z, y)
        assert dxy <= dxz + dzy + 1e-12


def test_bruteforce_range_matches_global_enumeration():
    delta = DeltaSequence.exponential()
    tree = tree_for(FullShift(2), 3)
    leaves = tree.leaves()
    taus = list(enumerate_choice_functions(tree))
    assert len(taus) == 2 ** 7
    for x in leaves:
        for y in leaves:
            if x >= y:
                continue
            vals = [spectral_distance(tree, tau, delta, x, y)
                    for tau in taus]
            lo, hi = spectral_distance_range_bruteforce(tree, delta, x, y)
            assert min(vals) == lo and max(vals) == hi


def test_extremes_equal_closed_forms():
    delta = DeltaSequence.exponential()
    for spec in SPECS:
        tree = tree_for(spec, 4)
        leaves = tree.leaves()
        for x in leaves:
            for y in leaves:
                if x >= y:
                    continue
                lo, hi = spectral_distance_range_bruteforce(tree, delta,
                                                            x, y)
                assert lo == ultrametric_distance(x, y, delta)
                assert hi == sup_spectral_distance(tree, delta, x, y)


# ---------------------------------------------------------------------------
# order diagnostics


def harmonic_number(n):
    return sum(1.0 / k for k in range(1, n + 1))


def test_full_binary_harmonic_closed_forms():
    N = 12
    delta = DeltaSequence.harmonic()
    tree = tree_for(FullShift(2), N)
    w = continuity_witness(tree, delta)
    assert w.value == pytest.approx(harmonic_number(N) - 1.0)
    c = lipschitz_estimate(tree, delta)
    expected = max((m + 1) * (harmonic_number(N) - harmonic_number(m + 1))
                   for m in range(N))
    assert c.value == pytest.approx(expected)


def test_exponential_delta_bound():
    delta = DeltaSequence.exponential()
    bound = 1.0 / (math.e - 1.0)
    for spec in SPECS:
        tree = tree_for(spec, 10)
        assert lipschitz_estimate(tree, delta).value <= bound + 1e-12


def test_summable_delta_bounds_witness():
    delta = DeltaSequence.geometric(0.5)
    tree = tree_for(fibonacci_spec(), 12)
    w = continuity_witness(tree, delta)
    assert w.value <= sum(delta[n] for n in range(12))


def test_monotonicity_in_depth():
    delta = DeltaSequence.harmonic()
    prev_c, prev_w = 0.0, 0.0
    for N in range(2, 10):
        tree = tree_for(fibonacci_spec(), N)
        c = lipschitz_estimate(tree, delta).value
        w = continuity_witness(tree, delta).value
        assert c >= prev_c - 1e-15 and w >= prev_w - 1e-15
        prev_c, prev_w = c, w


def test_fast_engines_match_tree_engine():
    for delta in (DeltaSequence.exponential(), DeltaSequence.harmonic()):
        for spec, N in ((FullShift(2), 12), (FullShift(3), 8),
                        (fibonacci_spec(), 21),
                        (SturmianCF((), ("linear",)), 21)):
            tree = tree_for(spec, N)
            slow_c = lipschitz_estimate(tree, delta).value
            slow_w = continuity_witness(tree, delta).value
            fast_c = lipschitz_estimate_fast(spec, delta, N).value
            fast_w = continuity_witness_fast(spec, delta, N).value
            assert fast_c == pytest.approx(slow_c, abs=1e-12)
            assert fast_w == pytest.approx(slow_w, abs=1e-12)


def test_fast_engine_rejects_unsupported_spec():
    with pytest.raises(TypeError):
        lipschitz_estimate_fast(object(), DeltaSequence.harmonic(), 8)


def test_witnesses_reported():
    delta = DeltaSequence.harmonic()
    tree = tree_for(fibonacci_spec(), 8)
    c = lipschitz_estimate(tree, delta)
    assert isinstance(c, OrderDiagnostic)
    assert tree.a(c.witness_node) > 0
    assert len(c.witness_path) == 8
    assert c.per_level and all(v <= c.value + 1e-15
                               for _, v in c.per_level)


def test_trend_verdict():
    assert trend_verdict([1.0, 1.001]) == "yes"
    assert trend_verdict([1.0, 1.5]) == "no"
    assert trend_verdict([1.0, 1.1]) == "undecided"
    assert trend_verdict([1.0]) == "undecided"
