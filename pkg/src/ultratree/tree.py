"""Truncated trees of words and their approximation graphs.

Level n of the tree holds the admissible words of length n; a node's parent
is its length-(n-1) prefix.  Horizontal edges join distinct siblings, and
the edge between children of a level-n vertex has length delta_n.  A choice
function selects one child per vertex; quotienting the horizontal edges by
those selections gives the metric approximation graph.
"""

import random
from dataclasses import dataclass, field

from .words import LanguageTable, language_table


class StructuralError(ValueError):
    """The input table or tree violates a structural invariant."""


class InfeasibleChoiceError(ValueError):
    """A requested deviation bit cannot be realized at its node."""


@dataclass(frozen=True)
class MichonTree:
    """Tree of words up to a depth bound.

    levels[n] is the sorted tuple of length-n words; children maps every
    non-leaf word to its sorted child tuple.  The branching number a(v) is
    the child count minus one.
    """

    depth: int
    levels: tuple
    children: dict = field(compare=False)

    def a(self, v):
        return len(self.children[v]) - 1

    def parent(self, v):
        return v[:-1]

    def is_branching(self, v):
        return len(v) < self.depth and self.a(v) > 0

    def leaves(self):
        return self.levels[self.depth]


def build_tree(table):
    """Assemble the tree of words from a language table."""
    if not isinstance(table, LanguageTable):
        table = language_table(table[0], table[1])
    N = table.depth
    children = {}
    for n in range(1, N + 1):
        seen = table.level_set(n - 1)
        for w in table.levels[n]:
            p = w[:-1]
            if p not in seen:
                raise StructuralError("orphan word %r at length %d" % (w, n))
            children.setdefault(p, []).append(w)
    for n in range(N):
        for v in table.levels[n]:
            if v not in children:
                raise StructuralError(
                    "word %r at length %d has no extension" % (v, len(v)))
    frozen = {v: tuple(sorted(cs)) for v, cs in children.items()}
    return MichonTree(N, table.levels, frozen)


def tree_for(spec, N, **kwargs):
    return build_tree(language_table(spec, N, **kwargs))


def horizontal_edges(tree, n):
    """Unordered sibling pairs at level n (their common parent sits at
    level n-1, so each pair carries length delta_{n-1})."""
    if not 1 <= n <= tree.depth:
        raise ValueError("level out of range")
    out = []
    for v in tree.levels[n - 1]:
        cs = tree.children[v]
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                out.append((cs[i], cs[j]))
    return out


@dataclass(frozen=True)
class ChoiceFunction:
    """One selected child per non-leaf node, with the induced depth-N
    representative of every node."""

    selection: dict = field(compare=False)
    representative: dict = field(compare=False)

    def __call__(self, v):
        return self.selection[v]


def _finish(tree, selection):
    rep = {w: w for w in tree.leaves()}
    for n in range(tree.depth - 1, -1, -1):
        for v in tree.levels[n]:
            rep[v] = rep[selection[v]]
    return ChoiceFunction(selection, rep)


def choice_function(tree, policy="canonical", seed=None, path=None,
                    bits=None):
    """Build a choice function.

    policy "canonical" takes the lexicographically least child everywhere;
    "seeded-random" draws children uniformly from a 64-bit seed;
    "adversarial-path" takes a root-to-leaf word and deviation bits c_n and
    selects, at each path node of level n with c_n = 1, a child off the
    path (canonical elsewhere).
    """
    if policy == "canonical":
        return _finish(tree, {v: cs[0] for v, cs in tree.children.items()})
    if policy == "seeded-random":
        rng = random.Random(seed)
        sel = {}
        for n in range(tree.depth):
            for v in tree.levels[n]:
                sel[v] = rng.choice(tree.children[v])
        return _finish(tree, sel)
    if policy == "adversarial-path":
        if path is None or bits is None:
            raise ValueError("adversarial-path needs path and bits")
        if len(path) != tree.depth:
            raise ValueError("path must be a depth-%d word" % tree.depth)
        sel = {v: cs[0] for v, cs in tree.children.items()}
        for n, c in enumerate(bits):
            v = path[:n]
            nxt = path[:n + 1]
            if c == 0:
                sel[v] = nxt
            elif c == 1:
                others = [u for u in tree.children[v] if u != nxt]
                if not others:
                    raise InfeasibleChoiceError(
                        "node %r has no sibling to deviate to" % v)
                sel[v] = others[0]
            else:
                raise ValueError("bits must be 0 or 1")
        return _finish(tree, sel)
    raise ValueError("unknown policy %r" % policy)


@dataclass(frozen=True)
class MetricGraph:
    """Quotient of the horizontal edges by a choice function.

    Vertices are the depth-N representative words; edges carry the shortest
    length among the horizontal edges that collapsed onto the pair.
    """

    vertices: tuple
    index: dict = field(compare=False)
    edges: dict = field(compare=False)  # (i, j) with i < j -> length

    def edge_list(self):
        return [(self.vertices[i], self.vertices[j], d)
                for (i, j), d in sorted(self.edges.items())]


def approximation_graph(tree, tau, delta):
    """The metric graph Gamma(tau) for edge lengths drawn from delta."""
    vertices = tuple(tree.leaves())
    index = {w: i for i, w in enumerate(vertices)}
    rep = tau.representative
    edges = {}
    for n in range(1, tree.depth + 1):
        length = delta[n - 1]
        for v in tree.levels[n - 1]:
            cs = tree.children[v]
            for i in range(len(cs)):
                ri = index[rep[cs[i]]]
                for j in range(i + 1, len(cs)):
                    rj = index[rep[cs[j]]]
                    key = (ri, rj) if ri < rj else (rj, ri)
                    old = edges.get(key)
                    if old is None or length < old:
                        edges[key] = length
    return MetricGraph(vertices, index, edges)


def graph_is_connected(graph):
    """Traversal check used by the structural tests."""
    n = len(graph.vertices)
    if n == 0:
        return True
    adj = [[] for _ in range(n)]
    for (i, j) in graph.edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == n
