"""Word problem for finite C-groups.

Letters are vertices of a C-graph.  A letter ``y_u`` conjugates ``y_v`` to
``y_{pi_u(v)}``, i.e. ``y_u^-1 y_v y_u = y_{pi_u(v)}``.  The bounded
universe holds the positive words in which each letter occurs fewer times
than its period.  The classes of the refined partition of that universe
are the elements of the finite quotient G~ obtained by killing every
``y^p``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cgraph import CGraph, prune_free_factors
from .errors import CapExceeded, NotAGroup, PartitionViolation, PositionOutOfRange
from .groups import FiniteGroup, close_generators, commutator_subgroup
from .unionfind import UnionFind

Word = tuple[int, ...]

DEFAULT_UNIVERSE_CAP = 300_000
DEFAULT_ROUND_CAP = 100
DEFAULT_LITERAL_CAP = 2_000_000
DEFAULT_COSET_CAP = 2_000_000


# --------------------------------------------------------------------------
# letters and rewriting


class Letters:
    """Action tables of a C-graph in the form needed for rewriting words."""

    def __init__(self, gamma: CGraph):
        self.gamma = gamma
        self.action = gamma.action
        self.n = gamma.n_vertices
        self.inv_action = np.argsort(self.action, axis=1) if self.n else self.action
        self.period = [int(x) for x in gamma.vertex_period]
        self.component = [int(x) for x in gamma.component_of]
        # left[a][b]: the label c with y_a y_b = y_c y_a
        self.left = [[int(self.inv_action[a, b]) for b in range(self.n)] for a in range(self.n)]
        # right[a][b]: the label c with y_a y_b = y_b y_c
        self.right = [[int(self.action[b, a]) for b in range(self.n)] for a in range(self.n)]


def reduce_word(w: Sequence[int], gamma: CGraph) -> Word:
    """Delete the leftmost block of p equal consecutive letters (p = period)."""
    w = tuple(w)
    per = gamma.vertex_period
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        p = int(per[w[i]])
        if j - i >= p:
            return w[:i] + w[i + p:]
        i = j
    return w


def all_reductions(w: Sequence[int], periods: Sequence[int]) -> list[Word]:
    """Every word obtained by deleting one block of p equal consecutive letters."""
    w = tuple(w)
    out = []
    for i in range(len(w)):
        p = periods[w[i]]
        if i + p <= len(w) and all(x == w[i] for x in w[i:i + p]):
            out.append(w[:i] + w[i + p:])
    return out


def braid_step(w: Sequence[int], j: int, gamma: CGraph | Letters, inverse: bool = False) -> Word:
    """sigma_j on words (1-based): ``(y_a, y_b) -> (y_c, y_a)`` with ``y_a y_b = y_c y_a``.

    The inverse step sends ``(y_a, y_b)`` to ``(y_b, y_d)`` with ``y_a y_b = y_b y_d``.
    """
    L = gamma if isinstance(gamma, Letters) else Letters(gamma)
    w = tuple(w)
    if not 1 <= j < len(w):
        raise PositionOutOfRange(f"position {j} not in 1..{len(w) - 1}")
    a, b = w[j - 1], w[j]
    pair = (b, L.right[a][b]) if inverse else (L.left[a][b], a)
    return w[: j - 1] + pair + w[j + 1:]


def normalize(w: Sequence[int], L: Letters) -> Word:
    """Deterministic rewrite into the bounded universe.

    While some letter occurs at least p times, its last p occurrences are
    gathered into one block by carrying each copy to the right unchanged
    (the letters it passes are conjugated), and the block is deleted.
    Every step is a relation of the quotient, so the image is preserved.
    """
    w = list(w)
    per = L.period
    left = L.left
    while True:
        counts: dict[int, int] = {}
        for x in w:
            counts[x] = counts.get(x, 0) + 1
        over = [x for x, c in counts.items() if c >= per[x]]
        if not over:
            return tuple(w)
        v = min(over)
        p = per[v]
        positions = [k for k, x in enumerate(w) if x == v][-p:]
        end = positions[-1]
        # carry earlier copies right until they sit just before the block
        block_start = end
        for pos in reversed(positions[:-1]):
            k = pos
            while k + 1 < block_start:
                # (v, x) -> (x', v) with v x = x' v
                x = w[k + 1]
                w[k], w[k + 1] = left[v][x], v
                k += 1
            block_start -= 1
        del w[block_start:block_start + p]


def word_universe(gamma: CGraph, cap: int = DEFAULT_UNIVERSE_CAP) -> list[Word]:
    """All words with each letter used fewer times than its period, by length then lexicographically."""
    n = gamma.n_vertices
    per = [int(x) for x in gamma.vertex_period]
    if any(p < 2 for p in per):
        raise ValueError("prune period-1 vertices before building the universe")
    level: list[tuple[Word, tuple[int, ...]]] = [((), (0,) * n)]
    out: list[Word] = [()]
    while level:
        nxt = []
        for w, cnt in level:
            for v in range(n):
                if cnt[v] + 1 < per[v]:
                    c2 = cnt[:v] + (cnt[v] + 1,) + cnt[v + 1:]
                    nxt.append((w + (v,), c2))
        level = nxt
        out.extend(w for w, _ in nxt)
        if len(out) > cap:
            raise CapExceeded("word universe", cap)
    return out


def universe_size(gamma: CGraph) -> int:
    """|W~| by counting arrangements of letter multiplicities."""
    per = [int(x) for x in gamma.vertex_period]
    # sum over count vectors of (sum)! / prod(c!), via exponential generating functions
    dist = {0: Fraction(1)}
    for p in per:
        new: dict[int, Fraction] = {}
        for tot, wt in dist.items():
            for c in range(p):
                new[tot + c] = new.get(tot + c, Fraction(0)) + wt / math.factorial(c)
        dist = new
    return int(sum(wt * math.factorial(t) for t, wt in dist.items()))


# --------------------------------------------------------------------------
# partition refinement


@dataclass
class WordClassPartition:
    gamma: CGraph = field(repr=False)
    universe: list[Word] = field(repr=False)
    classes: list[list[int]]  # universe indices, each block ascending, blocks by first member
    rounds: int
    trace: list[dict]
    strategy: str
    pair_product: np.ndarray | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return len(self.classes)

    @cached_property
    def index(self) -> dict[Word, int]:
        return {w: k for k, w in enumerate(self.universe)}

    @cached_property
    def label(self) -> np.ndarray:
        lab = np.empty(len(self.universe), dtype=np.int64)
        for c, block in enumerate(self.classes):
            lab[block] = c
        return lab

    def class_of(self, w: Sequence[int]) -> int:
        return int(self.label[self.index[tuple(w)]])

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "universe_size": len(self.universe),
            "rounds": self.rounds,
            "N": self.N,
            "trace": self.trace,
        }


def _blocks_from_labels(labels: np.ndarray) -> list[list[int]]:
    order = np.argsort(labels, kind="stable")
    blocks: dict[int, list[int]] = {}
    for i in order:
        blocks.setdefault(int(labels[i]), []).append(int(i))
    return sorted(blocks.values(), key=lambda b: b[0])


def _check_partition(classes: list[list[int]], size: int, round_no: int) -> None:
    seen = np.zeros(size, dtype=np.int64)
    for b in classes:
        seen[b] += 1
    if np.any(seen != 1):
        bad = np.flatnonzero(seen != 1)[:10].tolist()
        raise PartitionViolation(f"round {round_no}: classes do not partition the universe",
                                 {"round": round_no, "bad_words": bad})


def _trace_entry(round_no: int, classes: list[list[int]], **extra) -> dict:
    sizes = sorted((len(b) for b in classes), reverse=True)
    entry = {"round": round_no, "N": len(classes), "class_sizes": sizes}
    entry.update(extra)
    return entry


def _refine_letters(gamma: CGraph, universe: list[Word], max_rounds: int) -> WordClassPartition:
    """Refinement by single-letter products and the defining relations.

    Each round merges the classes of ``N(u y)`` over all words u of one
    class (so right multiplication by a letter is well defined on classes)
    and merges the two ends of every defining relation read from every
    word.  At the fixpoint the classes are the fibres of the universe over G~.
    """
    L = Letters(gamma)
    U = len(universe)
    index = {w: k for k, w in enumerate(universe)}
    V = gamma.n_vertices
    succ = np.empty((U, V), dtype=np.int64)
    for k, w in enumerate(universe):
        for y in range(V):
            succ[k, y] = index[normalize(w + (y,), L)]
    # relations read from every word: u y^p = u, u a b = u (a.b) a
    src, dst = [], []
    ar = np.arange(U)
    for y in range(V):
        cur = ar
        for _ in range(L.period[y]):
            cur = succ[cur, y]
        src.append(ar)
        dst.append(cur)
    for a in range(V):
        for b in range(V):
            c = L.left[a][b]
            e1 = succ[succ[:, a], b]
            e2 = succ[succ[:, c], a]
            src.append(e1)
            dst.append(e2)
    rel_src = np.concatenate(src)
    rel_dst = np.concatenate(dst)
    labels = np.arange(U)
    classes = [[k] for k in range(U)]
    trace = [_trace_entry(0, classes)]
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        # representative of each word's class and congruence edges
        first = np.full(U, U, dtype=np.int64)
        np.minimum.at(first, labels, ar)
        rep = first[labels]
        s_parts = [rel_src, ar]
        d_parts = [rel_dst, rep]
        for y in range(V):
            s_parts.append(succ[:, y])
            d_parts.append(succ[rep, y])
        s = np.concatenate(s_parts)
        d = np.concatenate(d_parts)
        graph = coo_matrix((np.ones(len(s), dtype=np.int8), (s, d)), shape=(U, U)).tocsr()
        n_new, new_labels = connected_components(graph, directed=True, connection="weak")
        classes = _blocks_from_labels(new_labels)
        _check_partition(classes, U, rounds)
        trace.append(_trace_entry(rounds, classes))
        changed = n_new != len(set(labels.tolist()))
        labels = new_labels
        if not changed:
            break
    else:
        raise CapExceeded("refinement rounds", max_rounds)
    return WordClassPartition(gamma, universe, classes, rounds, trace, "letters")


class _OrbitMemo:
    """Braid orbits of words and the universe words reachable from them."""

    def __init__(self, gamma: CGraph, universe_index: dict[Word, int], cap: int):
        self.L = Letters(gamma)
        self.periods = self.L.period
        self.uindex = universe_index
        self.orbit_of: dict[Word, int] = {}
        self.members: list[list[Word]] = []
        self.reach_memo: dict[int, frozenset[int]] = {}
        self.cap = cap
        self.explored = 0

    def orbit(self, w: Word) -> int:
        hit = self.orbit_of.get(w)
        if hit is not None:
            return hit
        oid = len(self.members)
        left = self.L.left
        seen = [w]
        self.orbit_of[w] = oid
        q = deque([w])
        while q:
            u = q.popleft()
            for j in range(len(u) - 1):
                a, b = u[j], u[j + 1]
                v = u[:j] + (left[a][b], a) + u[j + 2:]
                if v not in self.orbit_of:
                    self.orbit_of[v] = oid
                    seen.append(v)
                    q.append(v)
                    self.explored += 1
                    if self.explored > self.cap:
                        raise CapExceeded("braid orbit exploration", self.cap)
        self.members.append(seen)
        return oid

    def reach(self, oid: int) -> frozenset[int]:
        """Universe words reachable by alternating orbit closure and reductions."""
        hit = self.reach_memo.get(oid)
        if hit is not None:
            return hit
        out: set[int] = set()
        for u in self.members[oid]:
            k = self.uindex.get(u)
            if k is not None:
                out.add(k)
            for r in all_reductions(u, self.periods):
                out |= self.reach(self.orbit(r))
        res = frozenset(out)
        self.reach_memo[oid] = res
        return res


def _refine_literal(gamma: CGraph, universe: list[Word], max_rounds: int, cap: int) -> WordClassPartition:
    """The pair-concatenation procedure with exact braid orbits.

    Each round forms the concatenations of every ordered pair of classes,
    merges pairs whose concatenations share a braid orbit, applies the left
    and right overlap rules, and maps each merged pair class back into the
    universe through orbit closure and reductions.
    """
    U = len(universe)
    index = {w: k for k, w in enumerate(universe)}
    memo = _OrbitMemo(gamma, index, cap)
    classes = [[k] for k in range(U)]
    trace = [_trace_entry(0, classes)]
    pair_product = None
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        N = len(classes)
        words = [[universe[k] for k in b] for b in classes]
        orbs = [[None] * N for _ in range(N)]
        for i in range(N):
            for j in range(N):
                orbs[i][j] = {memo.orbit(u + v) for u in words[i] for v in words[j]}
        puf = UnionFind(N * N)
        owner: dict[int, int] = {}
        for i in range(N):
            for j in range(N):
                for o in orbs[i][j]:
                    prev = owner.setdefault(o, i * N + j)
                    puf.union(prev, i * N + j)
        # left rule: rows meeting in some column are merged in every column
        row_uf, col_uf = UnionFind(N), UnionFind(N)
        for j in range(N):
            seen: dict[int, int] = {}
            for i in range(N):
                for o in orbs[i][j]:
                    row_uf.union(seen.setdefault(o, i), i)
        for i in range(N):
            seen = {}
            for j in range(N):
                for o in orbs[i][j]:
                    col_uf.union(seen.setdefault(o, j), j)
        for i in range(N):
            ri = row_uf.find(i)
            for j in range(N):
                puf.union(i * N + j, ri * N + j)
                puf.union(i * N + j, i * N + col_uf.find(j))
        # overline of each merged pair class
        blocks: dict[int, set[int]] = {}
        for i in range(N):
            for j in range(N):
                acc = blocks.setdefault(puf.find(i * N + j), set())
                for o in orbs[i][j]:
                    acc |= memo.reach(o)
        sets = list(blocks.values())
        wuf = UnionFind(U)
        covered = np.zeros(U, dtype=bool)
        overlaps = 0
        owner_word = np.full(U, -1, dtype=np.int64)
        for sid, sset in enumerate(sets):
            members = sorted(sset)
            covered[members] = True
            for k in members:
                if owner_word[k] >= 0 and owner_word[k] != sid:
                    overlaps += 1
                owner_word[k] = sid
            for k in members[1:]:
                wuf.union(members[0], k)
        if not covered.all():
            raise PartitionViolation(f"round {rounds}: words outside every overline",
                                     {"round": rounds, "uncovered": np.flatnonzero(~covered)[:10].tolist()})
        new_classes = wuf.groups()
        _check_partition(new_classes, U, rounds)
        trace.append(_trace_entry(rounds, new_classes, overlapping_words=overlaps))
        if len(new_classes) == N:
            # fixpoint: each pair class lands in one class
            lab = np.empty(U, dtype=np.int64)
            for c, b in enumerate(new_classes):
                lab[b] = c
            pair_product = np.empty((N, N), dtype=np.int64)
            for i in range(N):
                for j in range(N):
                    targets = {int(lab[k]) for o in orbs[i][j] for k in memo.reach(o)}
                    if len(targets) != 1:
                        raise PartitionViolation(f"pair ({i},{j}) spreads over classes {sorted(targets)}")
                    pair_product[i, j] = targets.pop()
            classes = new_classes
            break
        classes = new_classes
    else:
        raise CapExceeded("refinement rounds", max_rounds)
    return WordClassPartition(gamma, universe, classes, rounds, trace, "literal", pair_product)


def refine_partition(gamma: CGraph, strategy: str = "auto", universe_cap: int = DEFAULT_UNIVERSE_CAP,
                     max_rounds: int = DEFAULT_ROUND_CAP, literal_cap: int = DEFAULT_LITERAL_CAP) -> WordClassPartition:
    """Refine the singleton partition of the bounded universe to its fixpoint.

    ``strategy`` is ``"literal"`` (pair concatenations and braid orbits),
    ``"letters"`` (single-letter products and defining relations) or
    ``"auto"``, which tries the literal route on small universes and falls
    back to the letter route when the orbit budget runs out.
    """
    if any(p < 2 for p in gamma.periods):
        raise ValueError("prune period-1 vertices first (prune_free_factors)")
    universe = word_universe(gamma, universe_cap)
    if strategy == "letters":
        return _refine_letters(gamma, universe, max_rounds)
    if strategy == "literal":
        return _refine_literal(gamma, universe, max_rounds, literal_cap)
    if strategy != "auto":
        raise ValueError(f"unknown strategy {strategy!r}")
    if len(universe) <= 200:
        try:
            return _refine_literal(gamma, universe, max_rounds, literal_cap)
        except CapExceeded:
            pass
    return _refine_letters(gamma, universe, max_rounds)


# --------------------------------------------------------------------------
# the finite quotient


@dataclass
class TildeGroup:
    """Finite group given by right multiplication of letters on its elements.

    Element ``c`` is represented by the positive word ``words[c]``;
    ``letter_action[c, y]`` is the element ``c * y``.
    """

    gamma: CGraph = field(repr=False)
    letter_action: np.ndarray
    words: list[Word] = field(repr=False)
    identity: int = 0
    source: str = ""

    @property
    def order(self) -> int:
        return int(self.letter_action.shape[0])

    def evaluate(self, w: Sequence[int], start: int | None = None) -> int:
        c = self.identity if start is None else start
        act = self.letter_action
        for y in w:
            c = int(act[c, y])
        return c

    def _walk_all(self, w: Sequence[int]) -> np.ndarray:
        cur = np.arange(self.order)
        for y in w:
            cur = self.letter_action[cur, y]
        return cur

    @cached_property
    def product(self) -> np.ndarray:
        n = self.order
        table = np.empty((n, n), dtype=np.int64)
        for c in range(n):
            table[:, c] = self._walk_all(self.words[c])
        return table

    @cached_property
    def inverse(self) -> np.ndarray:
        """Inverse of ``y_1..y_k`` read as ``y_k^(p-1) .. y_1^(p-1)``."""
        per = [int(x) for x in self.gamma.vertex_period]
        out = np.empty(self.order, dtype=np.int64)
        for c, w in enumerate(self.words):
            inv_word = [y for y in reversed(w) for _ in range(per[y] - 1)]
            out[c] = self.evaluate(inv_word)
        return out

    def verify(self, rng_seed: int = 0, samples: int = 200_000) -> None:
        """Check the group axioms; raises ``NotAGroup`` with a witness."""
        T = self.product
        n = self.order
        e = self.identity
        ar = np.arange(n)
        if not (np.array_equal(T[e], ar) and np.array_equal(T[:, e], ar)):
            c = int(np.flatnonzero((T[e] != ar) | (T[:, e] != ar))[0])
            raise NotAGroup("identity fails", (e, c))
        for c in range(n):
            if len(np.unique(T[c])) != n:
                raise NotAGroup("row is not a permutation", (c,))
        inv = self.inverse
        bad = np.flatnonzero(T[ar, inv] != e)
        if bad.size:
            raise NotAGroup("inverse word fails", (int(bad[0]), int(inv[bad[0]])))
        if n <= 256:
            lhs = T[T[:, :, None], ar[None, None, :]]  # (ab)c
            rhs = T[ar[:, None, None], T[None, :, :]]  # a(bc)
            diff = np.argwhere(lhs != rhs)
        else:
            rng = np.random.default_rng(rng_seed)
            a, b, c = rng.integers(0, n, size=(3, samples))
            diff = np.flatnonzero(T[T[a, b], c] != T[a, T[b, c]])
            diff = np.stack([a[diff], b[diff], c[diff]], axis=1)
        if len(diff):
            raise NotAGroup("associativity fails", tuple(int(x) for x in diff[0]))

    def as_permutation_group(self) -> FiniteGroup:
        """Regular representation generated by the letters."""
        perms = [tuple(int(x) for x in self.letter_action[:, y]) for y in range(self.letter_action.shape[1])]
        return close_generators(perms, cap=max(self.order, 1), degree=max(self.order, 1))

    @cached_property
    def commutator_order(self) -> int:
        return commutator_subgroup(self.as_permutation_group()).order

    @cached_property
    def period_product(self) -> int:
        return math.prod(self.gamma.periods)

    def check_abelianization(self) -> None:
        n, P = self.order, self.period_product
        if n % P or n // P != self.commutator_order:
            raise NotAGroup(f"|G~| = {n}, |[G~,G~]| = {self.commutator_order}, prod p = {P}", (n, P))

    def ab_vector(self, c: int) -> tuple[int, ...]:
        """Letter count per component modulo the period (well defined on G~)."""
        comp = self.gamma.component_of
        per = self.gamma.periods
        counts = [0] * len(per)
        for y in self.words[c]:
            counts[int(comp[y])] += 1
        return tuple(x % p for x, p in zip(counts, per))


def tilde_group(partition: WordClassPartition, gamma: CGraph | None = None, check_all_words: bool = True) -> TildeGroup:
    """Group structure on the classes of a fixpoint partition.

    Right multiplication by a letter sends class c to the class of the
    normalised word ``rep(c) y``.  Every word of every class is checked to
    act like its representative.  When the literal route recorded its pair
    products, the table is compared with them.
    """
    gamma = gamma or partition.gamma
    L = Letters(gamma)
    U = partition.universe
    lab = partition.label
    idx = partition.index
    reps = [U[b[0]] for b in partition.classes]
    N = len(reps)
    V = gamma.n_vertices
    act = np.empty((N, V), dtype=np.int64)
    for c, w in enumerate(reps):
        for y in range(V):
            act[c, y] = lab[idx[normalize(w + (y,), L)]]
    ident = int(lab[idx[()]])
    tg = TildeGroup(gamma, act, reps, ident, f"partition/{partition.strategy}")
    if check_all_words:
        for c, block in enumerate(partition.classes):
            for k in block:
                if tg.evaluate(U[k]) != c:
                    raise NotAGroup("word does not evaluate to its own class", (k, c))
                for y in range(V):
                    if lab[idx[normalize(U[k] + (y,), L)]] != act[c, y]:
                        raise NotAGroup("letter action not constant on a class", (k, y, c))
    tg.verify()
    tg.check_abelianization()
    if partition.pair_product is not None and not np.array_equal(partition.pair_product, tg.product):
        bad = np.argwhere(partition.pair_product != tg.product)[0]
        raise NotAGroup("pair products disagree with letter products", tuple(int(x) for x in bad))
    return tg


# --------------------------------------------------------------------------
# coset enumeration (independent route to G~)


class _CosetTable:
    """Felsch-free HLT coset enumeration over the trivial subgroup."""

    def __init__(self, ngens: int, relators: list[list[int]], cap: int):
        self.ncols = 2 * ngens
        self.table: list[list[int | None]] = [[None] * self.ncols]
        self.p = [0]
        self.relators = relators
        self.cap = cap

    def rep(self, c: int) -> int:
        p = self.p
        r = c
        while p[r] != r:
            r = p[r]
        while p[c] != r:
            p[c], c = r, p[c]
        return r

    def define(self, c: int, x: int) -> None:
        n = len(self.table)
        if n >= self.cap:
            raise CapExceeded("coset table", self.cap)
        self.table.append([None] * self.ncols)
        self.p.append(n)
        self.table[c][x] = n
        self.table[n][x ^ 1] = c

    def _merge(self, k: int, l: int, queue: list[int]) -> None:
        k, l = self.rep(k), self.rep(l)
        if k == l:
            return
        lo, hi = min(k, l), max(k, l)
        self.p[hi] = lo
        queue.append(hi)

    def coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []
        self._merge(a, b, queue)
        i = 0
        T = self.table
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(self.ncols):
                f = T[e][x]
                if f is None:
                    continue
                if T[f][x ^ 1] == e:
                    T[f][x ^ 1] = None
                e1, f1 = self.rep(e), self.rep(f)
                if T[e1][x] is not None:
                    self._merge(f1, T[e1][x], queue)
                elif T[f1][x ^ 1] is not None:
                    self._merge(e1, T[f1][x ^ 1], queue)
                else:
                    T[e1][x] = f1
                    T[f1][x ^ 1] = e1

    def scan_and_fill(self, c: int, w: list[int]) -> None:
        T = self.table
        f, b = c, c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and T[f][w[i]] is not None:
                f = T[f][w[i]]
                i += 1
            if i > j:
                if f != c:
                    self.coincidence(f, c)
                return
            while j >= i and T[b][w[j] ^ 1] is not None:
                b = T[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                T[f][w[i]] = b
                T[b][w[i] ^ 1] = f
                return
            self.define(f, w[i])

    def run(self) -> None:
        c = 0
        while c < len(self.table):
            if self.p[c] == c:
                for w in self.relators:
                    self.scan_and_fill(c, w)
                    if self.p[c] != c:
                        break
                if self.p[c] == c:
                    for x in range(self.ncols):
                        if self.table[c][x] is None:
                            self.define(c, x)
            c += 1

    def compact(self) -> np.ndarray:
        live = [c for c in range(len(self.table)) if self.p[c] == c]
        pos = {c: k for k, c in enumerate(live)}
        ngens = self.ncols // 2
        act = np.empty((len(live), ngens), dtype=np.int64)
        for k, c in enumerate(live):
            for y in range(ngens):
                act[k, y] = pos[self.rep(self.table[c][2 * y])]
        return act


def presentation_relators(gamma: CGraph) -> list[list[int]]:
    """Relators ``y^p`` and ``y_u^-1 y_v y_u y_w^-1`` (w = pi_u(v)) in column encoding."""
    per = [int(x) for x in gamma.vertex_period]
    n = gamma.n_vertices
    rels = [[2 * v] * per[v] for v in range(n)]
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            w = int(gamma.action[u, v])
            rels.append([2 * u + 1, 2 * v, 2 * u, 2 * w + 1])
    return rels


def coset_tilde_group(gamma: CGraph, cap: int = DEFAULT_COSET_CAP) -> TildeGroup:
    """G~ by coset enumeration of its presentation, relabelled breadth-first from the identity."""
    if gamma.n_vertices == 0:
        return TildeGroup(gamma, np.zeros((1, 0), dtype=np.int64), [()], 0, "coset")
    ct = _CosetTable(gamma.n_vertices, presentation_relators(gamma), cap)
    ct.run()
    act = ct.compact()
    # breadth-first relabelling along positive letters gives representative words
    n, V = act.shape
    order, words = [0], {0: ()}
    q = deque([0])
    while q:
        c = q.popleft()
        for y in range(V):
            d = int(act[c, y])
            if d not in words:
                words[d] = words[c] + (y,)
                order.append(d)
                q.append(d)
    new = {c: k for k, c in enumerate(order)}
    act2 = np.empty_like(act)
    for c in range(n):
        for y in range(V):
            act2[new[c], y] = new[int(act[c, y])]
    tg = TildeGroup(gamma, act2, [words[c] for c in order], 0, "coset")
    tg.verify()
    tg.check_abelianization()
    return tg


# --------------------------------------------------------------------------
# equality of words in the C-group


class CGroupSolver:
    """Decides equality of positive words in the C-group of a graph.

    A positive word is determined by the counts of its period-1 letters
    (central free factors), its letter count per remaining component, and
    its image in G~.
    """

    def __init__(self, gamma: CGraph, tilde: TildeGroup | None = None, method: str = "auto",
                 universe_cap: int = DEFAULT_UNIVERSE_CAP):
        self.full = gamma
        self.reduced, self.pruned = prune_free_factors(gamma)
        kept = [v for v in range(gamma.n_vertices) if v not in set(self.pruned)]
        self.to_reduced = {v: k for k, v in enumerate(kept)}
        self.pruned_pos = {v: k for k, v in enumerate(self.pruned)}
        self.partition = None
        if tilde is None:
            if (method in ("auto", "partition") and self.reduced.n_vertices
                    and universe_size(self.reduced) <= universe_cap):
                self.partition = refine_partition(self.reduced, "letters" if method == "auto" else "auto",
                                                  universe_cap=universe_cap)
                tilde = tilde_group(self.partition, self.reduced)
            else:
                tilde = coset_tilde_group(self.reduced)
        self.tilde = tilde

    def invariants(self, w: Iterable[int]) -> tuple:
        free = [0] * len(self.pruned)
        comp = [0] * len(self.reduced.components)
        residual = []
        for v in w:
            if v in self.pruned_pos:
                free[self.pruned_pos[v]] += 1
            else:
                r = self.to_reduced[v]
                residual.append(r)
                comp[int(self.reduced.component_of[r])] += 1
        return tuple(free), tuple(comp), self.tilde.evaluate(residual)

    def equal(self, w1: Iterable[int], w2: Iterable[int]) -> bool:
        return self.invariants(w1) == self.invariants(w2)


def words_equal_in_cgroup(gamma: CGraph, w1: Sequence[int], w2: Sequence[int],
                          solver: CGroupSolver | None = None) -> bool:
    """Equality of two positive words (vertex sequences) in the C-group of ``gamma``."""
    solver = solver or CGroupSolver(gamma)
    return solver.equal(w1, w2)
