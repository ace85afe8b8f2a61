"""The factorization semigroup: tuples of O-elements modulo Hurwitz moves.

Tuples are plain tuples of group-element indices.  A forward move at
position ``i`` (1-based) replaces ``(a, b)`` by ``(b, b^-1 a b)``; the
backward move replaces it by ``(a b a^-1, a)``.  Two tuples are equal in the
semigroup when one is reachable from the other by moves.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .cgraph import CGraph, EquippedGroup, build_cgraph, canonical_exponents, is_ample
from .errors import InsufficientData, PositionOutOfRange, Undecided
from .groups import Subgroup, is_generating, subgroup_generated

if TYPE_CHECKING:
    from .enumeration import ClassCount

DEFAULT_ORBIT_CAP = 2_000_000
DEFAULT_CACHE_BUDGET = 4_000_000
FORWARD, BACKWARD = "forward", "backward"


# --------------------------------------------------------------------------
# elementary data


@dataclass(frozen=True)
class TypeVector:
    counts: tuple[int, ...]

    def __add__(self, other: "TypeVector") -> "TypeVector":
        return TypeVector(tuple(a + b for a, b in zip(self.counts, other.counts)))

    @property
    def length(self) -> int:
        return sum(self.counts)


def hurwitz_move(eg: EquippedGroup, t: Sequence[int], pos: int, direction: str = FORWARD) -> tuple[int, ...]:
    """Apply one move at the adjacent pair ``(pos, pos+1)``, positions 1-based."""
    t = tuple(t)
    if not 1 <= pos < len(t):
        raise PositionOutOfRange(f"position {pos} not in 1..{len(t) - 1}")
    G = eg.group
    a, b = t[pos - 1], t[pos]
    if direction == FORWARD:
        pair = (b, G.conj(a, b))
    elif direction == BACKWARD:
        pair = (G.conj(b, G.inv(a)), a)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return t[: pos - 1] + pair + t[pos + 1:]


def alpha(eg: EquippedGroup, t: Sequence[int]) -> int:
    """Ordered product of the entries."""
    return eg.group.product(t)


def type_of(eg: EquippedGroup, t: Sequence[int]) -> TypeVector:
    counts = [0] * eg.m
    cls = eg.class_of
    for g in t:
        counts[cls[g]] += 1
    return TypeVector(tuple(counts))


def generated_subgroup(eg: EquippedGroup, t: Sequence[int]) -> Subgroup:
    return subgroup_generated(eg.group, set(t))


def conjugate_tuple(eg: EquippedGroup, g: int, t: Sequence[int]) -> tuple[int, ...]:
    """Simultaneous conjugation ``a -> g a g^-1`` of every entry."""
    G = eg.group
    ginv = G.inv(g)
    return tuple(G.conj(a, ginv) for a in t)


def rho(eg: EquippedGroup, g: int, t: Sequence[int]) -> tuple[int, ...]:
    return conjugate_tuple(eg, g, t)


def lam(eg: EquippedGroup, g: int, t: Sequence[int]) -> tuple[int, ...]:
    return conjugate_tuple(eg, eg.group.inv(g), t)


def rho_s(eg: EquippedGroup, s: Sequence[int], t: Sequence[int]) -> tuple[int, ...]:
    return conjugate_tuple(eg, alpha(eg, s), t)


def lam_s(eg: EquippedGroup, s: Sequence[int], t: Sequence[int]) -> tuple[int, ...]:
    return lam(eg, alpha(eg, s), t)


@dataclass(frozen=True)
class Factorization:
    """A tuple of O-elements bound to its equipped group, with cached invariants."""

    eg: EquippedGroup = field(repr=False, compare=False)
    entries: tuple[int, ...]

    def __post_init__(self):
        O = self.eg.class_of
        bad = [g for g in self.entries if g not in O]
        if bad:
            raise ValueError(f"entries outside O: {bad}")

    @cached_property
    def alpha(self) -> int:
        return alpha(self.eg, self.entries)

    @cached_property
    def tau(self) -> TypeVector:
        return type_of(self.eg, self.entries)

    @cached_property
    def subgroup(self) -> Subgroup:
        return generated_subgroup(self.eg, self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __add__(self, other: "Factorization") -> "Factorization":
        return Factorization(self.eg, self.entries + other.entries)

    def move(self, pos: int, direction: str = FORWARD) -> "Factorization":
        return Factorization(self.eg, hurwitz_move(self.eg, self.entries, pos, direction))


# --------------------------------------------------------------------------
# orbit machinery


@dataclass(frozen=True)
class OrbitSummary:
    canonical_rep: tuple[int, ...]
    orbit_size: int | None  # None when capped
    visited: int

    @property
    def capped(self) -> bool:
        return self.orbit_size is None


class OrbitEngine:
    """Conjugation tables on O plus a cache of completed orbits.

    Internally tuples use local indices into the sorted O, so lexicographic
    order of local tuples agrees with element-index order.
    """

    def __init__(self, eg: EquippedGroup, cache_budget: int = DEFAULT_CACHE_BUDGET):
        self.eg = eg
        G = eg.group
        O = np.asarray(eg.O, dtype=np.int64)
        self.O = eg.O
        self.local = {g: k for k, g in enumerate(eg.O)}
        lookup = np.full(G.order, -1, dtype=np.int64)
        lookup[O] = np.arange(len(O))
        # fwd[a][b] = b^-1 a b ; bwd[a][b] = a b a^-1   (local indices)
        self.fwd = lookup[G.conj_many(O[:, None], O[None, :])].tolist()
        self.bwd = lookup[G.conj_many(O[None, :], G.inverse[O][:, None])].tolist()
        self.cache: dict[tuple[int, ...], tuple[tuple[int, ...], int]] = {}
        self.cache_budget = cache_budget
        # least n >= 1 with g^n central, and the least class-mate of each letter
        from .groups import center

        Z = set(center(G).members)
        self.central_exponent = []
        for g in eg.O:
            n, acc = 1, g
            while acc not in Z:
                acc = G.mul(acc, g)
                n += 1
            self.central_exponent.append(n)
        cls = eg.class_of
        first = {}
        for k, g in enumerate(eg.O):
            first.setdefault(cls[g], k)
        self.class_min = [first[cls[g]] for g in eg.O]
        self._gen_cache: dict[frozenset, bool] = {}

    def to_local(self, t: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.local[g] for g in t)

    def to_global(self, t: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.O[k] for k in t)

    def orbit(self, t: Sequence[int], cap: int = DEFAULT_ORBIT_CAP) -> tuple[tuple[int, ...], int | None, int, set | None]:
        """BFS orbit of a local tuple: (min rep, size or None, visited, members)."""
        start = tuple(t)
        hit = self.cache.get(start)
        if hit is not None:
            return hit[0], hit[1], hit[1], None
        fwd = self.fwd
        n = len(start)
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for s in frontier:
                for i in range(n - 1):
                    a, b = s[i], s[i + 1]
                    if a == b:
                        continue
                    u = s[:i] + (b, fwd[a][b]) + s[i + 2:]
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
                if len(seen) > cap:
                    return min(seen), None, len(seen), seen
            frontier = nxt
        rep = min(seen)
        if len(self.cache) + len(seen) <= self.cache_budget:
            entry = (rep, len(seen))
            for s in seen:
                self.cache[s] = entry
        return rep, len(seen), len(seen), seen

    # ---- constructive normal form
    def greedy_normal_form(self, t: Sequence[int]) -> tuple[int, ...]:
        """Sound but incomplete reduction: at each position bring the least reachable letter.

        The letter at position j can reach position i conjugated by the product
        of any subsequence of the letters it passes; the least such value over
        all j >= i is moved into place.  Equal outputs certify equality.
        """
        t = list(t)
        n = len(t)
        bwd = self.bwd
        for i in range(n - 1):
            best_val, best_j, best_path = t[i], i, None
            for j in range(i + 1, n):
                levels = []
                reach = {t[j]: None}
                for q in range(j - 1, i - 1, -1):
                    g = t[q]
                    back = {}
                    for r in reach:
                        back[r] = (r, False)
                    for r in reach:
                        c = bwd[g][r]
                        if c not in back:
                            back[c] = (r, True)
                    levels.append(back)
                    reach = back
                v = min(reach)
                if v < best_val:
                    best_val, best_j, best_path = v, j, levels
            if best_path is None:
                continue
            # recover the choices from position i outwards
            choices = []
            v = best_val
            for back in reversed(best_path):
                prev, conj = back[v]
                choices.append(conj)
                v = prev
            choices.reverse()  # choices[k] refers to crossing t[j-1-k]
            j = best_j
            for k, conj in enumerate(choices):
                q = j - 1 - k
                a, b = t[q], t[q + 1]
                if conj:
                    t[q], t[q + 1] = bwd[a][b], a
                else:
                    t[q], t[q + 1] = b, self.fwd[a][b]
            assert t[i] == best_val
        return tuple(t)

    def _generates(self, letters) -> bool:
        key = frozenset(letters)
        hit = self._gen_cache.get(key)
        if hit is None:
            hit = is_generating(self.eg.group, [self.O[k] for k in key])
            self._gen_cache[key] = hit
        return hit

    def transfer_blocks(self, t: Sequence[int]) -> tuple[int, ...]:
        """Replace central blocks ``x_g^n`` by ``x_h^n`` for the least class-mate h.

        Valid when the remaining letters generate the group: such a block
        commutes with every letter, and conjugating it by the rest reaches
        every class-mate.
        """
        t = list(t)
        i = 0
        while i < len(t):
            g = t[i]
            j = i
            while j < len(t) and t[j] == g:
                j += 1
            n = self.central_exponent[g]
            h = self.class_min[g]
            if h != g and j - i >= n:
                rest = t[:i] + t[i + n:]
                if self._generates(rest):
                    t[i:i + n] = [h] * n
                    continue
            i = j
        return tuple(t)

    def normal_form(self, t: Sequence[int], window: int = 6, cap: int = 200_000, rounds: int = 8) -> tuple[int, ...]:
        """Greedy pass, block transfer and exact canonicalisation of a tail window, to a fixpoint."""
        cur = tuple(t)
        for _ in range(rounds):
            nf = self.transfer_blocks(self.greedy_normal_form(cur))
            nf = self.greedy_normal_form(nf)
            w = min(window, len(nf))
            if w >= 2:
                rep, size, _, _ = self.orbit(nf[-w:], cap)
                if size is not None:
                    nf = nf[:-w] + rep
            if nf == cur:
                break
            cur = nf
        return cur


def engine_for(eg: EquippedGroup) -> OrbitEngine:
    """One shared engine (and cache) per equipped group."""
    eng = eg.__dict__.get("_orbit_engine")
    if eng is None:
        eng = OrbitEngine(eg)
        eg.__dict__["_orbit_engine"] = eng
    return eng


def cgraph_for(eg: EquippedGroup) -> CGraph:
    gamma = eg.__dict__.get("_cgraph")
    if gamma is None:
        gamma = build_cgraph(eg)
        eg.__dict__["_cgraph"] = gamma
    return gamma


def canonical_form(eg: EquippedGroup, t: Sequence[int], cap: int = DEFAULT_ORBIT_CAP) -> OrbitSummary:
    """Least tuple in the Hurwitz orbit of ``t``; flagged capped if the search stopped early."""
    if cap < 1:
        raise ValueError("cap must be positive")
    eng = engine_for(eg)
    rep, size, visited, _ = eng.orbit(eng.to_local(t), cap)
    return OrbitSummary(eng.to_global(rep), size, visited)


def _invariants(eg: EquippedGroup, t: Sequence[int]):
    return alpha(eg, t), type_of(eg, t), generated_subgroup(eg, t).members


def same_class(eg: EquippedGroup, t1: Sequence[int], t2: Sequence[int], cap: int = DEFAULT_ORBIT_CAP,
               use_normal_form: bool = True) -> bool:
    """Decide Hurwitz equivalence; raises ``Undecided`` when caps stop the search."""
    t1, t2 = tuple(t1), tuple(t2)
    if t1 == t2:
        return True
    if len(t1) != len(t2) or _invariants(eg, t1) != _invariants(eg, t2):
        return False
    eng = engine_for(eg)
    l1, l2 = eng.to_local(t1), eng.to_local(t2)
    for a, b in ((l1, l2), (l2, l1)):
        rep, size, _, members = eng.orbit(a, cap)
        if size is not None:
            if members is None:
                hit = eng.cache.get(b)
                return hit is not None and hit[0] == rep
            return b in members
    if use_normal_form and eng.normal_form(l1) == eng.normal_form(l2):
        return True
    raise Undecided("orbit search capped", cap=cap)


def stabilizing_word(eg: EquippedGroup) -> tuple[int, ...]:
    """Canonical word of the shortest ample set of components, as element tuple.

    Each vertex of the chosen components is repeated p times.  Falls back to
    all components when no proper subset is ample or there are too many to try.
    """
    gamma = cgraph_for(eg)
    comps = range(len(gamma.components))
    best = None
    if len(gamma.components) <= 12:
        weight = lambda sub: sum(gamma.sizes[i] * gamma.periods[i] for i in sub)
        subsets = (c for r in range(1, len(gamma.components) + 1) for c in itertools.combinations(comps, r))
        for sub in sorted(subsets, key=weight):
            if is_ample(gamma, sub):
                best = sub
                break
    return tuple(gamma.elements[v] for v, p in canonical_exponents(gamma, best) for _ in range(p))


def stabilized_equal(eg: EquippedGroup, t1: Sequence[int], t2: Sequence[int], max_pad: int = 4,
                     cap: int = DEFAULT_ORBIT_CAP, pad_word: Sequence[int] | None = None) -> bool:
    """Test ``t1 s^k`` against ``t2 s^k`` for k = 0..max_pad.

    Returns False straight away when the products or types differ, True on
    the first pad that decides equality, and raises ``Undecided`` otherwise.
    """
    t1, t2 = tuple(t1), tuple(t2)
    if t1 == t2:
        return True
    if alpha(eg, t1) != alpha(eg, t2) or type_of(eg, t1) != type_of(eg, t2):
        return False
    s = tuple(pad_word) if pad_word is not None else stabilizing_word(eg)
    for k in range(max_pad + 1):
        pad = s * k
        try:
            if same_class(eg, t1 + pad, t2 + pad, cap):
                return True
        except Undecided:
            continue
    raise Undecided("no pad settled equality", max_pad=max_pad, cap=cap)


def e_pair(eg: EquippedGroup, t1: Sequence[int], t2: Sequence[int], cap: int = 100_000,
           max_len: int = 6, orbit_cap: int = 200_000) -> int:
    """Shortest length of a word s with ``t1 s`` equal to ``t2 s``.

    Searches appended words in order of length; each comparison is an exact
    orbit test.  Raises ``Undecided`` when the word budget runs out.
    """
    t1, t2 = tuple(t1), tuple(t2)
    if alpha(eg, t1) != alpha(eg, t2):
        raise ValueError("products differ; no common multiplier exists")
    tried = 0
    for k in range(max_len + 1):
        for s in itertools.product(eg.O, repeat=k):
            tried += 1
            if tried > cap:
                raise Undecided("word budget exhausted", cap=cap)
            try:
                if same_class(eg, t1 + s, t2 + s, orbit_cap, use_normal_form=False):
                    return k
            except Undecided:
                continue
    raise Undecided("no multiplier up to max length", max_len=max_len)


# --------------------------------------------------------------------------
# counting


def chi_coefficients(eg: EquippedGroup, max_total_length: int, **caps) -> dict[tuple[int, ...], "ClassCount"]:
    """Class counts for every type vector of total length 1..max_total_length."""
    from .enumeration import enumerate_classes

    if max_total_length < 1:
        raise ValueError("max_total_length must be at least 1")
    out = {}
    for total in range(1, max_total_length + 1):
        for tau in _compositions(total, eg.m):
            out[tau] = enumerate_classes(eg, tau, 0, True, **caps)
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class TailReport:
    ok: bool
    threshold: int | None
    residues: tuple[int, ...]
    period: int
    minimal_period: int | None
    monotone_violations: tuple[tuple[int, int], ...]
    detail: str = ""


def rational_tail_check(h: dict[int, int] | Sequence[int], p: int, n: int, a: int) -> TailReport:
    """Look for a threshold past which ``h`` is ``pn``-periodic with values in {0, a}.

    ``h`` maps length to count (a sequence is read as indexed from 0).  The
    tail must cover at least one full period plus one term.
    """
    seq = dict(h) if isinstance(h, dict) else dict(enumerate(h))
    if not seq:
        raise InsufficientData("empty sequence")
    P = p * n
    ks = sorted(seq)
    lo, hi = ks[0], ks[-1]
    if any(k not in seq for k in range(lo, hi + 1)):
        raise InsufficientData("sequence has gaps")
    if all(v == 0 for v in seq.values()):
        return TailReport(True, lo, (), P, 1, (), "all zero")

    def periodic_from(T):
        tail = [(k, seq[k]) for k in range(T, hi + 1)]
        if any(v not in (0, a) for _, v in tail):
            return False
        return all(seq[k] == seq[k - P] for k in range(T + P, hi + 1))

    threshold = None
    for T in range(lo, hi + 1):
        if periodic_from(T):
            threshold = T
            break
    if threshold is None or hi - threshold + 1 < P + 1:
        if threshold is None:
            return TailReport(False, None, (), P, None, (), "no periodic tail with values in {0, a}")
        raise InsufficientData(f"tail from {threshold} shorter than one period plus one term")
    residues = tuple(sorted({k % P for k in range(threshold, hi + 1) if seq[k] == a}))
    minimal = next(d for d in range(1, P + 1) if P % d == 0
                   and all(seq[k] == seq[k - d] for k in range(threshold + d, hi + 1)))
    viol = tuple((k, k + P) for k in range(threshold, hi + 1 - P) if seq[k + P] > seq[k])
    return TailReport(not viol, threshold, residues, P, minimal, viol)
