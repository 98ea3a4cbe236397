"""Ultrametric and spectral distances with their order diagnostics.

Points at finite resolution are depth-N words (root-to-leaf paths in the
tree of words).  The ultrametric is d(x, y) = delta_m with m the length of
the longest common prefix; the spectral distance of a choice function adds
delta-weighted deviation terms along both tails.  The Lipschitz estimate
C(N) and the continuity witness W(N) summarize how far the supremum
distance can drift from the ultrametric.
"""

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .words import (FullShift, SturmianCF, border_array,
                    sturmian_characteristic)


class DepthMismatchError(ValueError):
    pass


class UnreachableVertexError(RuntimeError):
    """A vertex pair is disconnected; the graph invariant is broken."""


# ---------------------------------------------------------------------------
# delta sequences


class DeltaSequence:
    """Strictly decreasing positive null sequence of edge lengths.

    The sequence is defined through the natural log of its values, which
    keeps ratios of far-apart entries computable even where the values
    themselves underflow to float zero (exponential delta does so near
    index 750).  The decreasing property is asserted on every realized
    prefix of the logs.  tail_bound(N), when available in closed form,
    bounds the remainder sum from index N on.
    """

    def __init__(self, log_fn, name, tail_fn=None):
        self._log_fn = log_fn
        self.name = name
        self._tail = tail_fn
        self._logs = []

    def log(self, n):
        if n < 0:
            raise IndexError("delta index must be >= 0")
        c = self._logs
        while len(c) <= n:
            lv = self._log_fn(len(c))
            if c and lv >= c[-1]:
                raise ValueError(
                    "delta is not strictly decreasing at %d" % len(c))
            c.append(lv)
        return c[n]

    def __getitem__(self, n):
        lv = self.log(n)
        vals = self.__dict__.setdefault("_values", {})
        v = vals.get(n)
        if v is None:
            v = vals[n] = math.exp(lv)
        return v

    def prefix(self, N):
        return [self[n] for n in range(N)]

    def ratio(self, n, m):
        """delta_n / delta_m without intermediate underflow."""
        return math.exp(self.log(n) - self.log(m))

    def tail_bound(self, N):
        """Upper bound for sum of delta_n over n >= N, or None."""
        return None if self._tail is None else self._tail(N)

    @classmethod
    def exponential(cls):
        return cls(lambda n: -float(n), "exponential",
                   lambda N: math.exp(-N) / (1.0 - math.exp(-1.0)))

    @classmethod
    def harmonic(cls):
        return cls(lambda n: -math.log(n + 1), "harmonic",
                   lambda N: math.inf)

    @classmethod
    def geometric(cls, q):
        if not 0 < q < 1:
            raise ValueError("geometric ratio must be in (0, 1)")
        lq = math.log(q)
        return cls(lambda n: n * lq, "geometric:%r" % q,
                   lambda N: q ** N / (1.0 - q))

    @classmethod
    def powerlog(cls, a, b):
        """delta_n = ln^b(n + 2 + s) / (n + 1 + s)^a, with the index shift s
        chosen so the sequence decreases from the start."""
        if a <= 0 or b < 0:
            raise ValueError("need a > 0 and b >= 0")
        shift = max(0, math.ceil(math.exp(b / a)) - 2)

        def log_fn(n):
            return b * math.log(math.log(n + 2 + shift)) \
                - a * math.log(n + 1 + shift)

        tail = None
        if a > 1 and b == 0:
            def tail(N):
                return (N + shift) ** (1 - a) / (a - 1)
        return cls(log_fn, "powerlog:%r,%r" % (a, b), tail)

    @classmethod
    def table(cls, values):
        vals = [float(v) for v in values]
        for v in vals:
            if v <= 0:
                raise ValueError("table entries must be positive")

        def log_fn(n):
            if n >= len(vals):
                raise IndexError("delta table exhausted at index %d" % n)
            return math.log(vals[n])

        return cls(log_fn, "table[%d]" % len(vals))


def delta_from_name(name):
    """Parse a delta family descriptor like "exp", "harmonic",
    "powerlog:1.5,1" or "geom:0.5"."""
    if name in ("exp", "exponential"):
        return DeltaSequence.exponential()
    if name == "harmonic":
        return DeltaSequence.harmonic()
    if name.startswith("powerlog:"):
        a, b = (float(x) for x in name.split(":", 1)[1].split(","))
        return DeltaSequence.powerlog(a, b)
    if name.startswith("geom:"):
        return DeltaSequence.geometric(float(name.split(":", 1)[1]))
    raise ValueError("unknown delta family %r" % name)


# ---------------------------------------------------------------------------
# distances


def common_prefix_length(x, y):
    m = 0
    for cx, cy in zip(x, y):
        if cx != cy:
            break
        m += 1
    return m


def ultrametric_distance(xi, eta, delta):
    """d(xi, eta) = delta at the longest-common-prefix length."""
    if len(xi) != len(eta):
        raise DepthMismatchError("points live at different depths")
    if xi == eta:
        return 0.0
    return delta[common_prefix_length(xi, eta)]


def beta_profile(tree, tau, xi):
    """Deviation bits of xi against tau: bit n is 0 exactly when tau selects
    xi's continuation at the level-n prefix."""
    N = len(xi)
    return [0 if tau.selection[xi[:n]] == xi[:n + 1] else 1
            for n in range(N)]


def beta_bar_profile(tree, xi):
    """Supremum profile: bit n is 1 exactly when the level-n prefix branches."""
    N = len(xi)
    return [1 if tree.a(xi[:n]) > 0 else 0 for n in range(N)]


def spectral_distance(tree, tau, delta, xi, eta):
    """Closed-form spectral distance of the choice function tau."""
    if len(xi) != len(eta):
        raise DepthMismatchError("points live at different depths")
    if xi == eta:
        return 0.0
    N = len(xi)
    m = common_prefix_length(xi, eta)
    # the two tails are summed separately (ascending), so the result is
    # bitwise identical to the factored enumeration over tail choices
    tail_x = tail_y = 0.0
    sel = tau.selection
    for n in range(m + 1, N):
        if sel[xi[:n]] != xi[:n + 1]:
            tail_x += delta[n]
        if sel[eta[:n]] != eta[:n + 1]:
            tail_y += delta[n]
    return delta[m] + tail_x + tail_y


def sup_spectral_distance(tree, delta, xi, eta):
    """Supremum over choice functions, evaluated by the branching profile."""
    if len(xi) != len(eta):
        raise DepthMismatchError("points live at different depths")
    if xi == eta:
        return 0.0
    N = len(xi)
    m = common_prefix_length(xi, eta)
    tail_x = tail_y = 0.0
    for n in range(m + 1, N):
        if tree.a(xi[:n]) > 0:
            tail_x += delta[n]
        if tree.a(eta[:n]) > 0:
            tail_y += delta[n]
    return delta[m] + tail_x + tail_y


def inf_spectral_distance(tree, delta, xi, eta):
    """Infimum over choice functions; equals the ultrametric."""
    return ultrametric_distance(xi, eta, delta)


# ---------------------------------------------------------------------------
# graph oracle


def _graph_csr(graph):
    cached = getattr(graph, "_csr", None)
    if cached is not None:
        return cached
    n = len(graph.vertices)
    rows, cols, vals = [], [], []
    for (i, j), d in graph.edges.items():
        rows += [i, j]
        cols += [j, i]
        vals += [d, d]
    mat = csr_matrix((vals, (rows, cols)), shape=(n, n))
    object.__setattr__(graph, "_csr", mat)
    return mat


def graph_distance_oracle(graph, u, v):
    """Shortest-path length between two vertices (Dijkstra)."""
    iu, iv = graph.index[u], graph.index[v]
    dist = dijkstra(_graph_csr(graph), directed=False, indices=iu)
    d = dist[iv]
    if math.isinf(d):
        raise UnreachableVertexError(
            "vertices %r and %r are disconnected" % (u, v))
    return float(d)


def graph_distances(graph, pairs):
    """Shortest-path lengths for many vertex pairs at once."""
    sources = sorted({graph.index[u] for u, _ in pairs})
    src_pos = {s: i for i, s in enumerate(sources)}
    dist = dijkstra(_graph_csr(graph), directed=False, indices=sources)
    out = []
    for u, v in pairs:
        d = dist[src_pos[graph.index[u]], graph.index[v]]
        if math.isinf(d):
            raise UnreachableVertexError(
                "vertices %r and %r are disconnected" % (u, v))
        out.append(float(d))
    return out


# ---------------------------------------------------------------------------
# exhaustive choice-function oracles (small depth)


def _tail_sums(tree, delta, word, m):
    """All achievable deviation-sum values along the prefix chain of a word,
    over every assignment of choices at its prefixes of lengths m+1..N-1."""
    N = len(word)
    sums = {0.0}
    for n in range(m + 1, N):
        v = word[:n]
        opts = set()
        for child in tree.children[v]:
            opts.add(0.0 if child == word[:n + 1] else delta[n])
        sums = {s + o for s in sums for o in opts}
    return sums


def spectral_distance_range_bruteforce(tree, delta, xi, eta):
    """Exact min and max of the spectral distance over all choice functions.

    The distance depends only on the selections at the prefixes of the two
    points, and below the fork those selections are independent, so the
    enumeration runs over the fork node's choices times all combinations
    along the two tails.  Every combination is realized by some global
    choice function.
    """
    if xi == eta:
        return 0.0, 0.0
    m = common_prefix_length(xi, eta)
    fork = xi[:m]
    base = delta[m]
    sums_x = _tail_sums(tree, delta, xi, m)
    sums_y = _tail_sums(tree, delta, eta, m)
    lo = base + min(sums_x) + min(sums_y)
    hi = base + max(sums_x) + max(sums_y)
    return lo, hi


def enumerate_choice_functions(tree):
    """Yield every choice function of a small tree.  Exponential; tests only."""
    from .tree import _finish
    nodes = [v for n in range(tree.depth) for v in tree.levels[n]]
    child_lists = [tree.children[v] for v in nodes]
    for combo in product(*child_lists):
        yield _finish(tree, dict(zip(nodes, combo)))


# ---------------------------------------------------------------------------
# Lipschitz and continuity diagnostics (generic tree engine)


@dataclass(frozen=True)
class OrderDiagnostic:
    value: float
    witness_node: str
    witness_path: str
    per_level: tuple = field(default=(), compare=False)


def _deviation_dp(tree, delta):
    """Bottom-up maxima T(v) of the branching-weighted delta sum along
    descendant paths, with lexicographically least maximizing child."""
    N = tree.depth
    T = {w: 0.0 for w in tree.leaves()}
    arg = {w: None for w in tree.leaves()}
    for n in range(N - 1, -1, -1):
        for v in tree.levels[n]:
            best, best_c = -1.0, None
            for c in tree.children[v]:
                gain = 0.0
                if len(c) <= N - 1 and tree.a(c) > 0:
                    gain = delta[len(c)]
                val = gain + T[c]
                if val > best:
                    best, best_c = val, c
            T[v] = best
            arg[v] = best_c
    return T, arg


def _descend(arg, v):
    while arg.get(v) is not None:
        v = arg[v]
    return v


def lipschitz_estimate(tree, delta, N=None):
    """C(N): the largest ratio T(v)/delta_m over branching nodes v at level
    m, where T(v) is the maximal deviation-weighted delta sum along
    descendant paths of v."""
    if N is None:
        N = tree.depth
    if N != tree.depth:
        raise ValueError("tree depth and N must agree")
    T, arg = _deviation_dp(tree, delta)
    best, best_v = 0.0, None
    series = []
    for m in range(N):
        level_best, level_v = -1.0, None
        for v in tree.levels[m]:
            if tree.a(v) <= 0:
                continue
            val = T[v] / delta[m]
            if val > level_best:
                level_best, level_v = val, v
        if level_v is None:
            continue
        series.append((m, level_best))
        if level_best > best:
            best, best_v = level_best, level_v
    if best_v is None:
        return OrderDiagnostic(0.0, "", "", ())
    return OrderDiagnostic(best, best_v, _descend(arg, best_v),
                           tuple(series))


def continuity_witness(tree, delta, N=None):
    """W(N): the maximal branching-weighted delta sum over root-to-leaf
    paths, levels 1 through N-1."""
    if N is None:
        N = tree.depth
    if N != tree.depth:
        raise ValueError("tree depth and N must agree")
    T, arg = _deviation_dp(tree, delta)
    return OrderDiagnostic(T[""], "", _descend(arg, ""), ())


# ---------------------------------------------------------------------------
# fast engines for the two structured families
#
# Full shifts: every node branches, so the path maxima are plain suffix
# sums of delta.  Sturmian subshifts: exactly one word per length branches
# (the length-n suffix of the characteristic word), and a path's branching
# prefixes form a border chain of those suffixes, which the failure array
# of the reversed characteristic word encodes.


def _full_shift_ratios(delta, N):
    """B[m] = sum over n in m+1..N-1 of delta_n/delta_m, every level
    branching, evaluated through the one-step ratio recurrence."""
    B = [0.0] * N
    for m in range(N - 2, -1, -1):
        B[m] = delta.ratio(m + 1, m) * (1.0 + B[m + 1])
    return B


def _single_rs_ratios(spec, delta, N):
    """Branching-chain ratios for a subshift with one right special word
    per length (the length-n suffix of the characteristic word).

    A path's branching prefixes form a border chain of those suffixes; the
    failure array of the reversed characteristic word encodes the chains.
    B[m] is the largest achievable sum of delta_n/delta_m over chains lying
    strictly above level m and passing through it.
    """
    word = sturmian_characteristic(spec, max(N, 2))
    rev = word[::-1][:N]
    fail = border_array(rev)
    B = [0.0] * N
    for m in range(N - 1, 0, -1):
        f = fail[m]
        cand = delta.ratio(m, f) * (1.0 + B[m])
        if cand > B[f]:
            B[f] = cand
    return B, rev, fail


def lipschitz_estimate_fast(spec, delta, N):
    """Evaluation of C(N) for full shifts and Sturmian specs through
    closed-form branching structure; agrees with the tree engine but
    scales to depths in the thousands."""
    if isinstance(spec, FullShift):
        if spec.k == 1:
            return OrderDiagnostic(0.0, "", "")
        B = _full_shift_ratios(delta, N)
        m = max(range(N), key=lambda i: B[i])
        return OrderDiagnostic(B[m], "a" * m, "a" * N)
    if isinstance(spec, SturmianCF):
        B, rev, _ = _single_rs_ratios(spec, delta, N)
        m = max(range(N), key=lambda i: B[i])
        return OrderDiagnostic(B[m], rev[:m][::-1], "")
    raise TypeError("no fast engine for %r" % (spec,))


def continuity_witness_fast(spec, delta, N):
    """Fast evaluation of W(N) for full shifts and Sturmian specs."""
    if isinstance(spec, FullShift):
        if spec.k == 1:
            return OrderDiagnostic(0.0, "", "")
        B = _full_shift_ratios(delta, N)
        return OrderDiagnostic(delta[0] * B[0], "", "a" * N)
    if isinstance(spec, SturmianCF):
        B, rev, _ = _single_rs_ratios(spec, delta, N)
        return OrderDiagnostic(delta[0] * B[0], "", rev[::-1])
    raise TypeError("no fast engine for %r" % (spec,))


# ---------------------------------------------------------------------------
# trend verdicts


def trend_verdict(values, grow_threshold=0.25, flat_threshold=0.01):
    """Classify the last doubling step of a series as bounded ("yes"),
    unbounded ("no") or "undecided"."""
    if len(values) < 2 or values[-2] == 0:
        return "undecided"
    growth = (values[-1] - values[-2]) / values[-2]
    if growth < flat_threshold:
        return "yes"
    if growth > grow_threshold:
        return "no"
    return "undecided"
