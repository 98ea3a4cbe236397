"""Languages of one-sided subshifts.

Words are plain strings over the alphabet "a", "b", "c", ... (symbol index
order).  A subshift is described declaratively by a spec object and its
language is materialized level by level, up to a depth bound, as a
LanguageTable.  On top of the table sit the usual combinatorial statistics:
right special words, the complexity function, repetitivity, and the
repulsiveness estimators.
"""

import string
from dataclasses import dataclass, field
from itertools import product

ALPHABET = string.ascii_lowercase


class UnknownSymbolError(ValueError):
    """A word contains a symbol outside the substitution's domain."""


class InsufficientDataError(ValueError):
    """A finite coefficient list ran out before the requested length."""


class OutOfDepthError(ValueError):
    """A query asked for a length at or beyond the table depth."""


def alphabet(k):
    """The first k symbols as a string."""
    if k < 1:
        raise ValueError("alphabet size must be at least 1")
    if k > len(ALPHABET):
        raise ValueError("alphabet size capped at %d" % len(ALPHABET))
    return ALPHABET[:k]


# ---------------------------------------------------------------------------
# subshift specs


@dataclass(frozen=True)
class FullShift:
    """Every word over a k-letter alphabet is admissible."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("full shift needs k >= 1")


@dataclass(frozen=True)
class ExplicitWindow:
    """The language is the factor set of one explicit finite word."""

    window: str

    def __post_init__(self):
        if not self.window:
            raise ValueError("window must be nonempty")


@dataclass(frozen=True)
class Substitution:
    """A primitive-style substitution with a seed letter it fixes.

    rules maps each letter to a nonempty image word; the image of the seed
    must start with the seed so that iteration converges to a one-sided
    fixed point.
    """

    rules: tuple  # sorted tuple of (letter, image) pairs
    seed: str

    def __post_init__(self):
        rules = dict(self.rules)
        for letter, image in rules.items():
            if not image:
                raise ValueError("erasing rule for %r" % letter)
        if self.seed not in rules:
            raise ValueError("seed %r has no rule" % self.seed)
        if not rules[self.seed].startswith(self.seed):
            raise ValueError("rule for seed %r does not fix it" % self.seed)

    @classmethod
    def from_rules(cls, rules, seed):
        return cls(tuple(sorted(rules.items())), seed)

    def rule_map(self):
        return dict(self.rules)


# tail rules for continued fraction coefficients past the explicit prefix:
#   ("constant", c)  mu_i = c
#   ("linear",)      mu_i = i
#   ("pow2",)        mu_i = 2**i
TAIL_FAMILIES = ("constant", "linear", "pow2")


@dataclass(frozen=True)
class SturmianCF:
    """Sturmian subshift from continued fraction data [1+mu_0, mu_1, ...].

    mu is a finite coefficient prefix; tail optionally extends it by a
    simple formula so that arbitrarily long characteristic words exist.
    """

    mu: tuple = ()
    tail: tuple = None

    def __post_init__(self):
        for i, m in enumerate(self.mu):
            if m < 0 or (i >= 1 and m < 1):
                raise ValueError("bad CF coefficient mu_%d = %r" % (i, m))
        if self.tail is not None and self.tail[0] not in TAIL_FAMILIES:
            raise ValueError("unknown tail rule %r" % (self.tail,))

    def coefficient(self, i):
        if i < len(self.mu):
            return self.mu[i]
        if self.tail is None:
            raise InsufficientDataError(
                "CF prefix exhausted at index %d and no tail rule" % i)
        kind = self.tail[0]
        if kind == "constant":
            return self.tail[1]
        if kind == "linear":
            return i
        return 2 ** i


def fibonacci_spec():
    """All CF coefficients equal to 1."""
    return SturmianCF(mu=(), tail=("constant", 1))


# ---------------------------------------------------------------------------
# substitutions and characteristic words


def substitution_apply(rules, w):
    """Apply a substitution (letter -> word map) to a word."""
    out = []
    for letter in w:
        if letter not in rules:
            raise UnknownSymbolError("no rule for symbol %r" % letter)
        out.append(rules[letter])
    return "".join(out)


SIGMA0 = {"a": "a", "b": "ba"}
SIGMA1 = {"a": "ab", "b": "b"}


def sturmian_characteristic(spec, min_len):
    """A long suffix of the left-infinite Sturmian characteristic word.

    Returns the first word R_k = sigma0^mu_0 sigma1^mu_1 ... sigma0^mu_2k (b)
    of length at least min_len.  Successive R_k nest as suffixes, so any
    returned word is a suffix of every longer one.
    """
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    if not isinstance(spec, SturmianCF):
        spec = SturmianCF(mu=tuple(spec))
    # maintain the composed images A = Phi(a), B = Phi(b) where Phi is the
    # product of the substitution powers taken so far, extended on the right
    a_img, b_img = "a", "b"
    i = 0
    while True:
        m = spec.coefficient(i)
        if i % 2 == 0:
            # compose with sigma0^m: a -> a, b -> b a^m
            b_img = b_img + a_img * m
            if len(b_img) >= min_len:
                return b_img
        else:
            # compose with sigma1^m: a -> a b^m, b -> b
            a_img = a_img + b_img * m
        i += 1
        if i > 10_000:
            raise InsufficientDataError(
                "characteristic word did not reach length %d" % min_len)


def substitution_fixed_point(spec, min_len):
    """Prefix (of length >= min_len) of the fixed point of a substitution."""
    rules = spec.rule_map()
    w = spec.seed
    while len(w) < min_len:
        nxt = substitution_apply(rules, w)
        if len(nxt) == len(w):
            raise InsufficientDataError(
                "substitution fixed point stalls at length %d" % len(w))
        w = nxt
    return w


# ---------------------------------------------------------------------------
# language tables


@dataclass(frozen=True)
class LanguageTable:
    """Admissible words per length up to a depth bound.

    levels[n] is the sorted tuple of admissible words of length n (levels[0]
    holds just the empty word).  stabilized[n] records whether the count at
    length n was unchanged across the last window doubling; exact specs set
    every flag.
    """

    depth: int
    levels: tuple
    stabilized: tuple
    spec: object = None
    _sets: tuple = field(default=None, compare=False, repr=False)

    def level_set(self, n):
        if self._sets is None:
            object.__setattr__(self, "_sets",
                               tuple(frozenset(lv) for lv in self.levels))
        return self._sets[n]

    @property
    def counts(self):
        return tuple(len(lv) for lv in self.levels)


DEFAULT_WINDOW_CAP = 2 ** 20


def _factor_levels(window, N):
    """All factors of the window, grouped by length, with occurrence starts."""
    L = len(window)
    levels = [{"": None}]
    cur = {}
    for i, letter in enumerate(window):
        cur.setdefault(letter, []).append(i)
    levels.append(cur)
    n = 1
    while n < N:
        nxt = {}
        for w, starts in cur.items():
            for i in starts:
                j = i + n
                if j < L:
                    nxt.setdefault(w + window[j], []).append(i)
        if not nxt:
            break
        levels.append(nxt)
        cur = nxt
        n += 1
    while len(levels) <= N:
        levels.append({})
    return levels


def _prune_levels(levels, N):
    """Enforce right-extendability and factor closure by fixed point.

    Words seen only at the very end of the window may lack a right
    extension; dropping them can orphan longer words that contain them, so
    the two pruning passes repeat until nothing changes.
    """
    kept = [set(lv) for lv in levels]
    changed = True
    while changed:
        changed = False
        for n in range(N - 1, 0, -1):
            child_prefixes = {c[:-1] for c in kept[n + 1]}
            alive = kept[n] & child_prefixes
            if len(alive) != len(kept[n]):
                kept[n] = alive
                changed = True
        for n in range(2, N + 1):
            below = kept[n - 1]
            alive = {w for w in kept[n] if w[:-1] in below and w[1:] in below}
            if len(alive) != len(kept[n]):
                kept[n] = alive
                changed = True
    return kept


def _window_for(spec, length):
    if isinstance(spec, SturmianCF):
        word = sturmian_characteristic(spec, length)
        return word[-length:] if len(word) > length else word
    if isinstance(spec, Substitution):
        word = substitution_fixed_point(spec, length)
        return word[:length]
    raise TypeError("no window construction for %r" % (spec,))


def language_table(spec, N, window_cap=DEFAULT_WINDOW_CAP):
    """Enumerate the admissible words of length <= N for a spec.

    Window-generated specs (Sturmian, substitution) are enumerated from a
    finite window which is doubled until the per-length counts stop
    changing; the flags record where that stabilization was observed.
    FullShift and ExplicitWindow are exact by construction.
    """
    if N < 1:
        raise ValueError("depth must be >= 1")

    if isinstance(spec, FullShift):
        ab = alphabet(spec.k)
        levels = [("",)]
        for n in range(1, N + 1):
            levels.append(tuple("".join(t) for t in product(ab, repeat=n)))
        return LanguageTable(N, tuple(levels), tuple([True] * (N + 1)), spec)

    if isinstance(spec, ExplicitWindow):
        raw = _factor_levels(spec.window, N)
        levels = [tuple(sorted(lv)) for lv in raw]
        return LanguageTable(N, tuple(levels), tuple([True] * (N + 1)), spec)

    length = max(4 * N, 64)
    prev_counts = None
    flags = [False] * (N + 1)
    kept = None
    while True:
        window = _window_for(spec, length)
        raw = _factor_levels(window, N)
        kept = _prune_levels(raw, N)
        counts = tuple(len(s) for s in kept)
        if prev_counts is not None:
            flags = [counts[n] == prev_counts[n] for n in range(N + 1)]
            if all(flags):
                break
        prev_counts = counts
        if 2 * length > window_cap:
            break
        length *= 2
    levels = tuple(tuple(sorted(s)) for s in kept)
    return LanguageTable(N, levels, tuple(flags), spec)


# ---------------------------------------------------------------------------
# statistics on tables


def right_special_words(table, n):
    """Length-n words with at least two one-letter right extensions."""
    if n >= table.depth:
        raise OutOfDepthError("need length %d < depth %d" % (n, table.depth))
    ext_count = {}
    for x in table.levels[n + 1]:
        ext_count[x[:-1]] = ext_count.get(x[:-1], 0) + 1
    return {w for w, c in ext_count.items() if c >= 2}


def _right_special_sets(table):
    """Right special words for every length below depth, computed in one pass."""
    rs = [set() for _ in range(table.depth)]
    for n in range(1, table.depth + 1):
        ext_count = {}
        for w in table.levels[n]:
            ext_count[w[:-1]] = ext_count.get(w[:-1], 0) + 1
        for w, c in ext_count.items():
            if c >= 2:
                rs[n - 1].add(w)
    return rs


def complexity_profile(table):
    """The complexity counts P(n) and their increments g(n) = P(n+1) - P(n)."""
    P = table.counts
    g = tuple(P[n + 1] - P[n] for n in range(table.depth))
    return P, g


def border_array(w):
    """Failure function: b[i] = length of the longest proper border of w[:i]."""
    n = len(w)
    b = [0] * (n + 1)
    k = 0
    for i in range(1, n):
        while k and w[i] != w[k]:
            k = b[k]
        if w[i] == w[k]:
            k += 1
        b[i + 1] = k
    return b


REPULSIVENESS_INF = float("inf")


def repulsiveness_estimates(table, N=None):
    """Minimal relative overlap gap over prefix-and-suffix pairs.

    l_hat minimizes (|W| - |w|) / |w| over pairs w != W in the table with
    |W| <= N and w both a prefix and a suffix of W; l_hat_R does the same
    with both words required to be right special.  Candidate w for a fixed
    W is its longest proper border (longest right-special border for the
    restricted variant), found through the border array.  Returns
    (l_hat, l_hat_R, witnesses) where witnesses maps each estimate name to
    its minimizing pair or None.
    """
    if N is None:
        N = table.depth
    if N > table.depth:
        raise OutOfDepthError("N exceeds table depth")
    rs = _right_special_sets(table)
    rs_max = table.depth - 1
    best = REPULSIVENESS_INF
    best_pair = None
    best_rs = REPULSIVENESS_INF
    best_rs_pair = None
    for n in range(2, N + 1):
        for W in table.levels[n]:
            b = border_array(W)
            k = b[n]
            if k >= 1:
                ratio = (n - k) / k
                if ratio < best:
                    best, best_pair = ratio, (W[:k], W)
            if n <= rs_max and W in rs[n]:
                k = b[n]
                while k >= 1 and W[:k] not in rs[k]:
                    k = b[k]
                if k >= 1:
                    ratio = (n - k) / k
                    if ratio < best_rs:
                        best_rs, best_rs_pair = ratio, (W[:k], W)
    witnesses = {"l_hat": best_pair, "l_hat_R": best_rs_pair}
    return best, best_rs, witnesses


def repulsiveness_bruteforce(table, N=None, right_special_only=False):
    """Quadratic pair scan over the whole table; test oracle only."""
    if N is None:
        N = table.depth
    rs = _right_special_sets(table) if right_special_only else None
    best = REPULSIVENESS_INF
    best_pair = None
    for n in range(2, N + 1):
        for W in table.levels[n]:
            if right_special_only and (n > table.depth - 1 or W not in rs[n]):
                continue
            for k in range(1, n):
                w = W[:k]
                if W[n - k:] != w:
                    continue
                if right_special_only and w not in rs[k]:
                    continue
                ratio = (n - k) / k
                if ratio < best:
                    best, best_pair = ratio, (w, W)
    return best, best_pair


REPETITIVITY_NOT_FOUND = None


def repetitivity_estimate(table, n):
    """Smallest n' <= depth such that every length-n' word contains every
    length-n word as a factor; None when no such n' exists in the table."""
    if n >= table.depth + 1:
        raise OutOfDepthError("n exceeds table depth")
    targets = table.levels[n]
    if not targets:
        return REPETITIVITY_NOT_FOUND
    for np in range(n, table.depth + 1):
        hosts = table.levels[np]
        if not hosts:
            continue
        if all(all(t in h for t in targets) for h in hosts):
            return np
    return REPETITIVITY_NOT_FOUND
