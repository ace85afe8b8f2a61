"""Exact Hurwitz-class counting by vectorised enumeration.

All tuples of a given type are listed with their classes in ascending
order.  Tuples of a type vector are moved into this sorted pattern by
braids, so it is enough to list the sorted ones and connect them with
generators of the subgroup of braids preserving the pattern: the
adjacent swaps inside a block and the pure-braid generators ``A_ij``
joining positions of different blocks.

Tuples are listed by a meet-in-the-middle join on partial products.
Orbits are connected components of the move graph, found with
``scipy.sparse.csgraph``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cgraph import EquippedGroup
from .groups import is_generating

DEFAULT_TUPLE_CAP = 20_000_000


@dataclass(frozen=True)
class ClassCount:
    """Result of one enumeration.  ``count`` is None when a cap was hit."""

    tau: tuple[int, ...]
    target: int
    count: int | None
    representatives: tuple[tuple[int, ...], ...] = ()
    orbit_sizes: tuple[int, ...] = ()
    n_tuples: int = 0
    n_orbits_total: int = 0
    capped: bool = False
    detail: str = ""

    def __int__(self) -> int:
        if self.count is None:
            raise ValueError("capped enumeration has no exact count")
        return self.count


def _pattern(tau: Sequence[int]) -> list[int]:
    return [i for i, k in enumerate(tau) for _ in range(k)]


def _expand(G, members: list[np.ndarray], cap: int):
    """All tuples over the given member lists with their ordered products."""
    rows = np.zeros((1, 0), dtype=np.int64)
    prod = np.zeros(1, dtype=np.int64)
    for mem in members:
        size = len(rows) * len(mem)
        if size > cap:
            return None, None
        rows = np.concatenate([np.repeat(rows, len(mem), axis=0), np.tile(mem, len(rows))[:, None]], axis=1)
        prod = G.mul_many(np.repeat(prod, len(mem)), np.tile(mem, len(prod)))
    return rows, prod


def _join(G, left, lprod, right, rprod, target: int, cap: int, threads: int):
    """Pairs (l, r) with lprod[l] * rprod[r] == target."""
    order = np.argsort(rprod, kind="stable")
    rs = rprod[order]
    need = G.mul_many(G.inverse[lprod], target)
    lo = np.searchsorted(rs, need, side="left")
    hi = np.searchsorted(rs, need, side="right")
    counts = hi - lo
    total = int(counts.sum())
    if total > cap:
        return None
    if total == 0:
        return np.zeros((0, left.shape[1] + right.shape[1]), dtype=np.int64)

    def chunk(idx):
        c = counts[idx]
        li = np.repeat(idx, c)
        starts = np.repeat(lo[idx], c)
        offs = np.arange(int(c.sum())) - np.repeat(np.cumsum(c) - c, c)
        ri = order[starts + offs]
        return np.concatenate([left[li], right[ri]], axis=1)

    idx_all = np.flatnonzero(counts)
    if threads > 1 and len(idx_all) > 1:
        parts = np.array_split(idx_all, threads)
        with ThreadPoolExecutor(threads) as ex:
            pieces = list(ex.map(chunk, parts))
        return np.concatenate(pieces, axis=0)
    return chunk(idx_all)


def enumerate_tuples(eg: EquippedGroup, tau: Sequence[int], target: int = 0,
                     cap_tuples: int = DEFAULT_TUPLE_CAP, threads: int = 1):
    """Sorted-pattern tuples of type ``tau`` with product ``target``, rows in lexicographic order.

    Returns None if the tuple count exceeds ``cap_tuples``.
    """
    G = eg.group
    pat = _pattern(tau)
    n = len(pat)
    members = [np.asarray(eg.classes[i].members, dtype=np.int64) for i in pat]
    if n == 1:
        rows = members[0][members[0] == target][:, None]
        return rows
    # balance the two halves by their sizes
    sizes = np.array([len(m) for m in members], dtype=float)
    logs = np.cumsum(np.log(sizes))
    h = int(np.argmin(np.abs(logs - logs[-1] / 2))) + 1
    h = min(max(h, 1), n - 1)
    left, lprod = _expand(G, members[:h], cap_tuples)
    right, rprod = _expand(G, members[h:], cap_tuples)
    if left is None or right is None:
        return None
    rows = _join(G, left, lprod, right, rprod, target, cap_tuples, threads)
    if rows is None:
        return None
    if len(rows):
        order = np.lexsort(rows.T[::-1])
        rows = rows[order]
    return rows


MAX_WORD_COLUMNS = 64  # lowered in tests to exercise the multi-word path


class _Codec:
    """Lexicographic integer codes for rows of local O indices.

    Short rows get one int64 code.  Longer rows are cut into chunks that
    each fit a uint64, and the big-endian chunk words are compared as raw
    bytes, which is again lexicographic.
    """

    def __init__(self, eg: EquippedGroup, n: int):
        self.lookup = np.full(eg.group.order, -1, dtype=np.int64)
        self.lookup[np.asarray(eg.O, dtype=np.int64)] = np.arange(len(eg.O))
        self.base = len(eg.O)
        self.n = n
        per_word = max(1, min(MAX_WORD_COLUMNS, int(63 // np.log2(max(self.base, 2)))))
        self.fits = n <= per_word and n * np.log2(max(self.base, 2)) < 62
        if self.fits:
            self.weights = self.base ** np.arange(n - 1, -1, -1, dtype=np.int64)
        else:
            self.bounds = [(c, min(c + per_word, n)) for c in range(0, n, per_word)]

    def _word(self, cols: np.ndarray) -> np.ndarray:
        w = np.zeros(len(cols), dtype=np.uint64)
        for k in range(cols.shape[1]):
            w = w * np.uint64(self.base) + cols[:, k].astype(np.uint64)
        return w

    def words(self, local: np.ndarray) -> np.ndarray:
        return np.stack([self._word(local[:, a:b]) for a, b in self.bounds], axis=1).astype(">u8")

    def moved_words(self, words: np.ndarray, local: np.ndarray, lo: int, hi: int, block: np.ndarray) -> np.ndarray:
        """Words of ``local`` with columns lo..hi replaced by ``block``."""
        out = words.copy()
        for c, (a, b) in enumerate(self.bounds):
            if b <= lo or a > hi:
                continue
            cols = local[:, a:b].copy()
            s, e = max(a, lo), min(b, hi + 1)
            cols[:, s - a:e - a] = block[:, s - lo:e - lo]
            out[:, c] = self._word(cols)
        return out

    @staticmethod
    def keys(words: np.ndarray) -> np.ndarray:
        words = np.ascontiguousarray(words)
        return words.view(f"V{8 * words.shape[1]}").ravel()


LOCAL_TABLE_LIMIT = 2048


class _Moves:
    """Hurwitz moves on arrays of local O-indices, applied in place.

    Small O gets flat conjugation tables ``fwd[a*m+b] = b^-1 a b`` and
    ``bwd[a*m+b] = a b a^-1``; larger O goes through the group.
    """

    def __init__(self, eg: EquippedGroup, lookup: np.ndarray):
        G = eg.group
        self.G, self.lookup = G, lookup
        self.O = np.asarray(eg.O, dtype=np.int64)
        self.m = m = len(self.O)
        self.fwd = self.bwd = None
        if m <= LOCAL_TABLE_LIMIT:
            A, B = np.meshgrid(self.O, self.O, indexing="ij")
            self.fwd = lookup[G.conj_many(A, B)].ravel()
            self.bwd = lookup[G.conj_many(B, G.inverse[A])].ravel()

    def _conj(self, a, b):  # local b^-1 a b
        if self.fwd is not None:
            return self.fwd[a * self.m + b]
        return self.lookup[self.G.conj_many(self.O[a], self.O[b])]

    def _conj_back(self, a, b):  # local a b a^-1
        if self.bwd is not None:
            return self.bwd[a * self.m + b]
        return self.lookup[self.G.conj_many(self.O[b], self.G.inverse[self.O[a]])]

    def forward(self, x: np.ndarray, j: int) -> None:
        """(a, b) -> (b, b^-1 a b) at columns j, j+1."""
        a, b = x[:, j].copy(), x[:, j + 1].copy()
        x[:, j] = b
        x[:, j + 1] = self._conj(a, b)

    def backward(self, x: np.ndarray, j: int) -> None:
        """(a, b) -> (a b a^-1, a) at columns j, j+1."""
        a, b = x[:, j].copy(), x[:, j + 1].copy()
        x[:, j] = self._conj_back(a, b)
        x[:, j + 1] = a

    def apply(self, rows: np.ndarray, gen: tuple) -> tuple[int, int, np.ndarray]:
        """Columns ``lo..hi`` of ``rows`` after the generator, as a new block.

        ``("s", j)`` is the swap at j, j+1; ``("A", i, j)`` is the pure braid
        s_{j-1} ... s_{i+1} s_i^2 s_{i+1}^-1 ... s_{j-1}^-1 (0-based strands).
        """
        if gen[0] == "s":
            lo, hi = gen[1], gen[1] + 1
            x = rows[:, lo:hi + 1].copy()
            self.forward(x, 0)
            return lo, hi, x
        lo, hi = gen[1], gen[2]
        x = rows[:, lo:hi + 1].copy()
        k = hi - lo
        for q in range(k - 1, 0, -1):
            self.backward(x, q)
        self.forward(x, 0)
        self.forward(x, 0)
        for q in range(1, k):
            self.forward(x, q)
        return lo, hi, x


def move_generators(pat: Sequence[int]) -> list[tuple]:
    gens = []
    n = len(pat)
    for j in range(n - 1):
        if pat[j] == pat[j + 1]:
            gens.append(("s", j))
    for i in range(n):
        for j in range(i + 1, n):
            if pat[i] != pat[j]:
                gens.append(("A", i, j))
    return gens


def _index_of(codes_sorted: np.ndarray, codes: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(codes_sorted, codes)
    if np.any(pos >= len(codes_sorted)) or np.any(codes_sorted[np.minimum(pos, len(codes_sorted) - 1)] != codes):
        raise AssertionError("move left the enumerated tuple set")
    return pos


def enumerate_classes(eg: EquippedGroup, tau: Sequence[int], target: int = 0, require_generating: bool = True,
                      cap_tuples: int = DEFAULT_TUPLE_CAP, threads: int = 1, **_ignored) -> ClassCount:
    """Count Hurwitz classes of tuples of type ``tau`` with product ``target``.

    Representatives are the lexicographically least class-sorted tuple of
    each class.  With ``require_generating`` only classes whose entries
    generate the group are kept; this is checked once per class since the
    generated subgroup is a class invariant.
    """
    tau = tuple(int(x) for x in tau)
    if len(tau) != eg.m:
        raise ValueError(f"type vector has {len(tau)} entries, expected {eg.m}")
    if sum(tau) < 1 or min(tau) < 0:
        raise ValueError("type vector must be nonnegative with positive total")
    G = eg.group
    rows = enumerate_tuples(eg, tau, target, cap_tuples, threads)
    if rows is None:
        return ClassCount(tau, target, None, capped=True, detail=f"more than {cap_tuples} tuples")
    N = len(rows)
    if N == 0:
        return ClassCount(tau, target, 0, n_tuples=0)
    pat = _pattern(tau)
    if N == 1:  # every move maps the set to itself
        rep = tuple(int(x) for x in rows[0])
        if require_generating and not is_generating(G, set(rep)):
            return ClassCount(tau, target, 0, n_tuples=1, n_orbits_total=1)
        return ClassCount(tau, target, 1, (rep,), (1,), 1, 1)
    codec = _Codec(eg, len(pat))
    local = codec.lookup[rows]
    if codec.fits:
        codes = local @ codec.weights
    else:
        words = codec.words(local)
        codes = codec.keys(words)
    # rows are lexicographically sorted, hence so are their codes
    moves = _Moves(eg, codec.lookup)
    ident = np.arange(N)
    labels = ident
    pending_s, pending_d, pending = [], [], 0

    def merge():
        """Fold pending edges into ``labels`` (each tuple's least class-mate so far)."""
        nonlocal labels, pending_s, pending_d, pending
        s = np.concatenate([ident] + pending_s)
        d = np.concatenate([labels] + pending_d)
        graph = coo_matrix((np.ones(len(s), dtype=np.int8), (s, d)), shape=(N, N)).tocsr()
        n_comp, comp = connected_components(graph, directed=True, connection="weak")
        first = np.full(n_comp, N, dtype=np.int64)
        np.minimum.at(first, comp, ident)
        labels = first[comp]
        pending_s, pending_d, pending = [], [], 0
        return n_comp, comp

    for gen in move_generators(pat):
        lo, hi, block = moves.apply(local, gen)
        if codec.fits:
            moved_codes = codes + (block - local[:, lo:hi + 1]) @ codec.weights[lo:hi + 1]
            target_idx = _index_of(codes, moved_codes)
        else:
            moved = codec.keys(codec.moved_words(words, local, lo, hi, block))
            target_idx = _index_of(codes, moved)
        keep = target_idx != ident
        pending_s.append(np.flatnonzero(keep))
        pending_d.append(target_idx[keep])
        pending += len(pending_d[-1])
        if pending > 2 * N:
            merge()
    n_comp, labels = merge()
    first = np.full(n_comp, N, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(N))
    sizes = np.bincount(labels, minlength=n_comp)
    order = np.argsort(first)
    reps, orbit_sizes = [], []
    for c in order:
        rep = tuple(int(x) for x in rows[first[c]])
        if require_generating and not is_generating(G, set(rep)):
            continue
        reps.append(rep)
        orbit_sizes.append(int(sizes[c]))
    return ClassCount(tau, target, len(reps), tuple(reps), tuple(orbit_sizes), N, int(n_comp))
