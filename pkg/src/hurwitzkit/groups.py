"""Finite permutation groups with indexed elements.

Elements are numbered in breadth-first order from the identity, expanding
each element by the sorted generators.  A product ``g h`` means "apply g,
then h", so as image arrays ``(g h)[x] = h[g[x]]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, InvalidPermutation, ParseError

Perm = tuple[int, ...]

DENSE_TABLE_LIMIT = 4096
DEFAULT_GROUP_CAP = 10**6

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


# --------------------------------------------------------------------------
# cycle notation


def parse_cycles(text: str, degree: int | None = None) -> Perm:
    """Parse ``(1 2)(3 4 5)`` into a 0-based image tuple.

    ``()``, ``id`` and ``identity`` denote the identity.  Points are 1-based;
    commas and spaces both separate points.
    """
    s = text.strip()
    if s.lower() in ("", "()", "id", "identity", "1", "e"):
        return tuple(range(degree or 0))
    stripped = _CYCLE_RE.sub("", s)
    if stripped.strip():
        raise ParseError(f"unexpected text outside cycles: {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(s):
        parts = [p for p in re.split(r"[,\s]+", body.strip()) if p]
        try:
            pts = [int(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"non-integer point in {text!r}") from exc
        if any(p < 1 for p in pts):
            raise ParseError(f"points are 1-based: {text!r}")
        if len(set(pts)) != len(pts):
            raise InvalidPermutation(f"repeated point inside a cycle: {text!r}")
        cycles.append(pts)
    top = max((max(c) for c in cycles if c), default=0)
    d = max(degree or 0, top)
    if degree is not None and top > degree:
        raise InvalidPermutation(f"{text!r} moves points beyond degree {degree}")
    img = list(range(d))
    for c in cycles:
        # cycles compose left to right, matching the product convention
        step = list(range(d))
        for a, b in zip(c, c[1:] + c[:1]):
            step[a - 1] = b - 1
        img = [step[x] for x in img]
    return tuple(img)


def format_cycles(perm: Sequence[int]) -> str:
    """Cycle notation of a 0-based image sequence; the identity is ``()``."""
    n = len(perm)
    done = [False] * n
    out = []
    for start in range(n):
        if done[start] or perm[start] == start:
            done[start] = True
            continue
        cyc = [start]
        done[start] = True
        x = perm[start]
        while x != start:
            cyc.append(x)
            done[x] = True
            x = perm[x]
        out.append("(" + " ".join(str(c + 1) for c in cyc) + ")")
    return "".join(out) or "()"


def check_permutation(img: Sequence[int], degree: int) -> Perm:
    """Pad ``img`` to ``degree`` and verify it is a bijection."""
    img = tuple(int(x) for x in img) + tuple(range(len(img), degree))
    if len(img) != degree or sorted(img) != list(range(degree)):
        raise InvalidPermutation(f"not a bijection of 1..{degree}: {img}")
    return img


def parse_group_text(text: str) -> tuple[int | None, list[Perm]]:
    """Read a group file: optional ``degree: d`` header, one generator per line.

    Blank lines and ``#`` comments are ignored.
    """
    degree = None
    gens: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("degree"):
            try:
                degree = int(line.split(":", 1)[1])
            except (IndexError, ValueError) as exc:
                raise ParseError(f"bad degree header: {raw!r}") from exc
            continue
        gens.append(line)
    perms = [parse_cycles(g, degree) for g in gens]
    return degree, perms


# --------------------------------------------------------------------------
# subgroup / class containers


@dataclass(frozen=True)
class Subgroup:
    """A subgroup as a sorted tuple of element indices."""

    members: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g: int) -> bool:
        return g in self._set

    def __len__(self) -> int:
        return len(self.members)

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.members)


@dataclass(frozen=True)
class ConjugacyClass:
    representative: int
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, g: int) -> bool:
        return g in self._set

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.members)


# --------------------------------------------------------------------------
# the group


@dataclass(eq=False)
class FiniteGroup:
    """Enumerated permutation group.

    ``images[i]`` is the 0-based image array of element ``i``; element 0 is
    the identity.  Multiplication uses a dense table when the order is at
    most ``DENSE_TABLE_LIMIT`` and composes images otherwise.
    """

    degree: int
    images: np.ndarray
    generators: tuple[int, ...]

    def __post_init__(self):
        self.images = np.ascontiguousarray(self.images, dtype=np.int16)
        self.images.setflags(write=False)
        n = len(self.images)
        if self.degree <= 15:
            self._weights = np.int64(self.degree) ** np.arange(self.degree, dtype=np.int64)
        else:
            # wrapping int64 hash; uniqueness over the group is verified below
            rng = np.random.default_rng(0x5EED)
            self._weights = rng.integers(1, 2**62, size=self.degree, dtype=np.int64)
        keys = self._encode(self.images)
        order = np.argsort(keys, kind="stable")
        self._keys = keys[order]
        self._key_ids = order.astype(np.int64)
        if self.degree > 15 and np.any(self._keys[1:] == self._keys[:-1]):
            raise RuntimeError("hash collision among group elements")
        ident = np.arange(self.degree, dtype=np.int16)
        if n == 0 or not np.array_equal(self.images[0], ident):
            raise ValueError("element 0 must be the identity")
        inv_img = np.empty_like(self.images)
        rows = np.arange(n)[:, None]
        inv_img[rows, self.images] = np.arange(self.degree, dtype=np.int16)[None, :]
        self.inverse = self.index_many(inv_img)
        self.inverse.setflags(write=False)
        self._table = None

    # ---- encoding and lookup
    def _encode(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64).reshape(-1, self.degree)
        with np.errstate(over="ignore"):
            return arr @ self._weights

    def index_many(self, arr: np.ndarray) -> np.ndarray:
        """Element indices of a stack of image rows; raises KeyError if absent."""
        arr = np.asarray(arr).reshape(-1, self.degree)
        keys = self._encode(arr)
        pos = np.searchsorted(self._keys, keys)
        pos = np.minimum(pos, len(self._keys) - 1)
        ids = self._key_ids[pos]
        if not np.all(self._keys[pos] == keys):
            raise KeyError("permutation not in group")
        if self.degree > 15 and not np.array_equal(self.images[ids], arr):
            raise KeyError("permutation not in group")
        return ids

    def index(self, perm: Sequence[int]) -> int:
        img = check_permutation(perm, self.degree)
        try:
            return int(self.index_many(np.array([img]))[0])
        except KeyError:
            raise KeyError(f"{format_cycles(img)} is not in the group") from None

    def parse_element(self, text: str) -> int:
        return self.index(parse_cycles(text, self.degree))

    # ---- basic structure
    @property
    def order(self) -> int:
        return len(self.images)

    def __len__(self) -> int:
        return self.order

    def element(self, i: int) -> Perm:
        return tuple(int(x) for x in self.images[i])

    def format(self, i: int) -> str:
        return format_cycles(self.images[i])

    @property
    def table(self) -> np.ndarray | None:
        """Dense multiplication table, built lazily for small groups."""
        if self._table is None and self.order <= DENSE_TABLE_LIMIT:
            n = self.order
            t = np.empty((n, n), dtype=np.int32)
            for i in range(n):
                # row i: g_i * g_j, i.e. g_j[g_i[x]]
                t[i] = self.index_many(self.images[:, self.images[i]])
            t.setflags(write=False)
            self._table = t
        return self._table

    def mul(self, a: int, b: int) -> int:
        t = self.table
        if t is not None:
            return int(t[a, b])
        return int(self.index_many(self.images[b][self.images[a]][None, :])[0])

    def mul_many(self, a, b) -> np.ndarray:
        """Vectorised products ``a[k] * b[k]`` (broadcasting allowed)."""
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        t = self.table
        if t is not None:
            return t[a, b].astype(np.int64)
        shape = a.shape
        a, b = a.ravel(), b.ravel()
        img = np.take_along_axis(self.images[b], self.images[a].astype(np.int64), axis=1)
        return self.index_many(img).reshape(shape)

    def conj_many(self, a, b) -> np.ndarray:
        """Vectorised conjugates ``b^-1 a b``."""
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        t = self.table
        if t is not None:
            return t[t[self.inverse[b], a], b].astype(np.int64)
        shape = a.shape
        a, b = a.ravel(), b.ravel()
        binv = self.images[self.inverse[b]].astype(np.int64)
        step = np.take_along_axis(self.images[a].astype(np.int64), binv, axis=1)
        img = np.take_along_axis(self.images[b].astype(np.int64), step, axis=1)
        return self.index_many(img).reshape(shape)

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def conj(self, a: int, b: int) -> int:
        """``b^-1 a b``."""
        return int(self.conj_many(np.array([a]), np.array([b]))[0])

    def product(self, seq: Iterable[int]) -> int:
        acc = 0
        for g in seq:
            acc = self.mul(acc, g)
        return acc

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        acc, base = 0, a
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            k >>= 1
        return acc

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.ones(self.order, dtype=np.int64)
        cur = np.arange(self.order)
        pending = cur != 0
        k = 1
        while pending.any():
            k += 1
            cur = self.mul_many(cur, np.arange(self.order))
            done = pending & (cur == 0)
            orders[done] = k
            pending &= ~done
        return orders

    def element_order(self, a: int) -> int:
        return int(self.element_orders[a])

    @cached_property
    def identity(self) -> int:
        return 0

    def digest_source(self) -> str:
        """Stable text used to fingerprint the group for caching."""
        gens = sorted(self.format(g) for g in self.generators)
        return f"degree:{self.degree};" + ";".join(gens)


# --------------------------------------------------------------------------
# construction


def close_generators(
    gens: Iterable[Sequence[int] | str],
    cap: int = DEFAULT_GROUP_CAP,
    degree: int | None = None,
) -> FiniteGroup:
    """Enumerate the group generated by ``gens``.

    Generators may be image sequences or cycle-notation strings.  Raises
    ``CapExceeded`` once more than ``cap`` elements have been found.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    raw = [parse_cycles(g, degree) if isinstance(g, str) else tuple(g) for g in gens]
    d = max([degree or 0, 1] + [len(g) for g in raw])
    perms = sorted({check_permutation(g, d) for g in raw})
    identity = tuple(range(d))
    gens_nontrivial = [g for g in perms if g != identity]
    elements = [identity]
    index = {identity: 0}
    i = 0
    while i < len(elements):
        g = elements[i]
        for s in gens_nontrivial:
            h = tuple(s[x] for x in g)
            if h not in index:
                index[h] = len(elements)
                elements.append(h)
                if len(elements) > cap:
                    raise CapExceeded("group order", cap)
        i += 1
    images = np.array(elements, dtype=np.int16).reshape(len(elements), d)
    gen_ids = tuple(sorted({index[g] for g in gens_nontrivial}))
    return FiniteGroup(degree=d, images=images, generators=gen_ids)


def group_from_text(text: str, cap: int = DEFAULT_GROUP_CAP) -> FiniteGroup:
    degree, perms = parse_group_text(text)
    return close_generators(perms, cap=cap, degree=degree)


# --------------------------------------------------------------------------
# queries


def _closure(G: FiniteGroup, gens: Sequence[int], early_exit: bool = False) -> np.ndarray:
    """Boolean membership mask of the subgroup generated by ``gens``."""
    visited = np.zeros(G.order, dtype=bool)
    visited[0] = True
    gens = np.unique(np.asarray([g for g in gens if g != 0], dtype=np.int64))
    if gens.size == 0:
        return visited
    frontier = np.array([0], dtype=np.int64)
    count = 1
    while frontier.size:
        nxt = G.mul_many(frontier[:, None], gens[None, :]).ravel()
        nxt = np.unique(nxt[~visited[nxt]])
        visited[nxt] = True
        count += nxt.size
        if early_exit and 2 * count > G.order:
            visited[:] = True
            return visited
        frontier = nxt
    return visited


def subgroup_generated(G: FiniteGroup, elems: Iterable[int]) -> Subgroup:
    mask = _closure(G, list(elems))
    return Subgroup(tuple(int(x) for x in np.flatnonzero(mask)))


def is_generating(G: FiniteGroup, elems: Iterable[int]) -> bool:
    """True when ``elems`` generate all of G (stops once past half the order)."""
    return bool(_closure(G, list(elems), early_exit=True).all())


def conjugacy_class(G: FiniteGroup, g: int) -> ConjugacyClass:
    if not 0 <= g < G.order:
        raise IndexError(f"element index {g} out of range")
    seen = {g}
    frontier = np.array([g], dtype=np.int64)
    gens = np.asarray(G.generators, dtype=np.int64)
    while frontier.size and gens.size:
        nxt = G.conj_many(frontier[:, None], gens[None, :]).ravel()
        fresh = [int(x) for x in np.unique(nxt) if int(x) not in seen]
        seen.update(fresh)
        frontier = np.array(fresh, dtype=np.int64)
    members = tuple(sorted(seen))
    return ConjugacyClass(members[0], members)


def conjugacy_classes(G: FiniteGroup) -> list[ConjugacyClass]:
    """All classes, ordered by representative index."""
    owner = np.full(G.order, -1, dtype=np.int64)
    out = []
    for g in range(G.order):
        if owner[g] >= 0:
            continue
        c = conjugacy_class(G, g)
        owner[list(c.members)] = len(out)
        out.append(c)
    return out


def centralizer(G: FiniteGroup, S: Iterable[int]) -> Subgroup:
    allg = np.arange(G.order)
    mask = np.ones(G.order, dtype=bool)
    for s in set(S):
        mask &= G.mul_many(allg, s) == G.mul_many(s, allg)
    return Subgroup(tuple(int(x) for x in np.flatnonzero(mask)))


def center(G: FiniteGroup) -> Subgroup:
    # the centralizer of a generating set is the centralizer of every element
    return centralizer(G, G.generators)


def commutator(G: FiniteGroup, g: int, h: int) -> int:
    """``g^-1 h^-1 g h``."""
    return G.product([G.inv(g), G.inv(h), g, h])


def normal_closure(G: FiniteGroup, elems: Iterable[int]) -> Subgroup:
    gens = sorted(set(elems) - {0})
    mask = _closure(G, gens)
    changed = True
    while changed:
        changed = False
        for x in G.generators:
            for c in list(gens):
                y = G.conj(c, x)
                if not mask[y]:
                    gens.append(y)
                    mask = _closure(G, gens)
                    changed = True
    return Subgroup(tuple(int(x) for x in np.flatnonzero(mask)))


def commutator_subgroup(G: FiniteGroup) -> Subgroup:
    """Derived subgroup: normal closure of commutators of generators."""
    gens = G.generators
    comms = {commutator(G, a, b) for a in gens for b in gens}
    return normal_closure(G, comms)
