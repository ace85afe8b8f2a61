"""Equipped groups and their C-graphs.

A C-graph is stored as an action table: ``action[u, v]`` is the vertex
``pi_u(v)``.  For a graph built from an equipped group, ``pi_u(v)`` is the
conjugate ``u^-1 v u``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, GeneratingPrecondition, NotAmple
from .groups import ConjugacyClass, FiniteGroup, conjugacy_class, is_generating

DEFAULT_VERTEX_CAP = 4096


@dataclass(eq=False)
class EquippedGroup:
    """A group together with a numbered list of non-trivial conjugacy classes."""

    group: FiniteGroup
    classes: tuple[ConjugacyClass, ...]

    def __post_init__(self):
        self.classes = tuple(self.classes)
        seen: set[int] = set()
        for c in self.classes:
            if 0 in c.members:
                raise ValueError("the identity may not belong to O")
            if seen.intersection(c.members):
                raise ValueError("equipment lists the same class twice")
            seen.update(c.members)

    @classmethod
    def from_representatives(cls, group: FiniteGroup, reps: Iterable[int | str]) -> "EquippedGroup":
        ids = [group.parse_element(r) if isinstance(r, str) else int(r) for r in reps]
        return cls(group, tuple(conjugacy_class(group, g) for g in ids))

    @cached_property
    def O(self) -> tuple[int, ...]:
        return tuple(sorted(g for c in self.classes for g in c.members))

    @cached_property
    def class_of(self) -> dict[int, int]:
        """Element index -> class number, for elements of O."""
        return {g: i for i, c in enumerate(self.classes) for g in c.members}

    @cached_property
    def class_array(self) -> np.ndarray:
        arr = np.full(self.group.order, -1, dtype=np.int64)
        for g, i in self.class_of.items():
            arr[g] = i
        return arr

    @property
    def m(self) -> int:
        return len(self.classes)

    def generates(self) -> bool:
        return is_generating(self.group, self.O)

    def require_generating(self) -> None:
        if not self.generates():
            raise GeneratingPrecondition("O does not generate G")

    def sub(self, class_indices: Sequence[int]) -> "EquippedGroup":
        return EquippedGroup(self.group, tuple(self.classes[i] for i in class_indices))

    def digest_source(self) -> str:
        reps = ",".join(self.group.format(c.representative) for c in self.classes)
        return self.group.digest_source() + "|O:" + reps


@dataclass(eq=False)
class CGraph:
    """Labelled graph given by per-label vertex maps.

    ``components`` lists vertex indices per component; ``elements`` maps a
    vertex to its group element when the graph comes from an equipped group.
    """

    action: np.ndarray
    components: tuple[tuple[int, ...], ...]
    elements: tuple[int, ...] | None = None
    component_labels: tuple[int, ...] | None = None
    group: FiniteGroup | None = field(default=None, repr=False)

    def __post_init__(self):
        self.action = np.asarray(self.action, dtype=np.int64)
        if self.component_labels is None:
            self.component_labels = tuple(range(len(self.components)))

    @classmethod
    def from_action(cls, action: Sequence[Sequence[int]]) -> "CGraph":
        """Hand-built graph; components are found by connectivity."""
        action = np.asarray(action, dtype=np.int64)
        return cls(action, _connected_components(action))

    @property
    def n_vertices(self) -> int:
        return int(self.action.shape[0])

    @cached_property
    def component_of(self) -> np.ndarray:
        arr = np.empty(self.n_vertices, dtype=np.int64)
        for i, comp in enumerate(self.components):
            arr[list(comp)] = i
        return arr

    @cached_property
    def vertex_orders(self) -> np.ndarray:
        """Order of each permutation pi_v."""
        out = np.empty(self.n_vertices, dtype=np.int64)
        ident = np.arange(self.n_vertices)
        for v in range(self.n_vertices):
            out[v] = _perm_order(self.action[v], ident)
        return out

    @cached_property
    def periods(self) -> tuple[int, ...]:
        return tuple(period(self, i) for i in range(len(self.components)))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.components)

    @cached_property
    def vertex_period(self) -> np.ndarray:
        return np.array([self.periods[c] for c in self.component_of], dtype=np.int64)

    def vertex_of(self, element: int) -> int:
        return self._vertex_index[element]

    @cached_property
    def _vertex_index(self) -> dict[int, int]:
        if self.elements is None:
            raise ValueError("graph has no element labels")
        return {g: v for v, g in enumerate(self.elements)}

    def label(self, v: int) -> str:
        if self.elements is not None and self.group is not None:
            return self.group.format(self.elements[v])
        return f"v{v}"

    def to_json(self) -> dict:
        return {
            "vertices": [
                {"index": v, "component": int(self.component_of[v]), "label": self.label(v)}
                for v in range(self.n_vertices)
            ],
            "components": [list(c) for c in self.components],
            "periods": list(self.periods),
            "sizes": list(self.sizes),
            "action": self.action.tolist(),
        }


def _perm_order(perm: np.ndarray, ident: np.ndarray) -> int:
    cur = perm.copy()
    k = 1
    while not np.array_equal(cur, ident):
        cur = perm[cur]
        k += 1
        if k > len(perm) ** 3 + 2:
            raise ValueError("label does not act as a permutation")
    return k


def _connected_components(action: np.ndarray) -> tuple[tuple[int, ...], ...]:
    n = action.shape[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u in range(n):
        for v in range(n):
            w = int(action[u, v])
            if 0 <= w < n:
                a, b = find(v), find(w)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    comps: dict[int, list[int]] = {}
    for v in range(n):
        comps.setdefault(find(v), []).append(v)
    return tuple(tuple(c) for c in sorted(comps.values()))


def build_cgraph(eg: EquippedGroup, cap_vertices: int = DEFAULT_VERTEX_CAP) -> CGraph:
    """C-graph of ``eg``; components follow the class numbering.

    Raises ``CapExceeded`` when O has more than ``cap_vertices`` elements,
    since the action table is quadratic in |O|.
    """
    G = eg.group
    ordered = [g for c in eg.classes for g in c.members]
    if len(ordered) > cap_vertices:
        raise CapExceeded("C-graph vertices", cap_vertices)
    # components = classes when O generates; in general a class may split,
    # so connectivity is computed directly
    pos = {g: k for k, g in enumerate(ordered)}
    elems = np.asarray(ordered, dtype=np.int64)
    conj = G.conj_many(elems[None, :], elems[:, None])  # conj[u, v] = u^-1 v u
    lookup = np.full(G.order, -1, dtype=np.int64)
    lookup[elems] = np.arange(len(elems))
    raw_action = lookup[conj] if len(elems) else np.zeros((0, 0), np.int64)
    # orbit minima under all labels; the labels act by permutations, so
    # propagating minima along images converges to the orbit minimum
    root = np.arange(len(elems))
    while len(elems):
        nxt = np.minimum(root, root[raw_action].min(axis=0))
        if np.array_equal(nxt, root):
            break
        root = nxt

    def find(k):
        return int(root[k])

    groups: dict[int, list[int]] = {}
    for k in range(len(elems)):
        groups.setdefault(find(k), []).append(ordered[k])
    cls_of = eg.class_of
    comp_list = sorted(groups.values(), key=lambda mem: (cls_of[mem[0]], min(mem)))
    comp_list = [sorted(mem) for mem in comp_list]
    vertex_elems = [g for mem in comp_list for g in mem]
    vpos = {g: v for v, g in enumerate(vertex_elems)}
    perm = np.array([pos[g] for g in vertex_elems], dtype=np.int64)
    to_new = np.array([vpos[g] for g in ordered], dtype=np.int64)
    action = to_new[raw_action[np.ix_(perm, perm)]] if len(elems) else raw_action
    components, start = [], 0
    for mem in comp_list:
        components.append(tuple(range(start, start + len(mem))))
        start += len(mem)
    labels = tuple(cls_of[mem[0]] for mem in comp_list)
    return CGraph(action, tuple(components), tuple(vertex_elems), labels, G)


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class AxiomResult:
    name: str
    status: str  # "pass", "fail" or "not checked"
    witness: tuple | None = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass(frozen=True)
class ValidationReport:
    results: tuple[AxiomResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "tag": "conditions (i)-(iv) verified; (v) assumed" if self.ok else "violations found",
            "axioms": [
                {"name": r.name, "status": r.status, "witness": list(r.witness) if r.witness else None, "detail": r.detail}
                for r in self.results
            ],
        }


def validate_cgraph(gamma: CGraph) -> ValidationReport:
    """Check conditions (i)-(iv) exhaustively; (v) is reported as not checked."""
    A = gamma.action
    n = gamma.n_vertices
    res = []
    # (i) every label acts bijectively
    bad = None
    for u in range(n):
        row = A[u]
        if row.min(initial=0) < 0 or row.max(initial=-1) >= n or len(set(row.tolist())) != n:
            counts = np.bincount(np.clip(row, 0, n - 1), minlength=n)
            dup = int(np.flatnonzero(counts != 1)[0]) if np.any(counts != 1) else -1
            bad = (u, dup)
            break
    res.append(AxiomResult("(i) bijective labels", "fail" if bad else "pass", bad,
                           "label u maps two vertices onto the same vertex" if bad else ""))
    bijective = bad is None
    # (ii) loops
    diag = A[np.arange(n), np.arange(n)] if n else np.zeros(0, np.int64)
    miss = np.flatnonzero(diag != np.arange(n))
    res.append(AxiomResult("(ii) self loops", "fail" if miss.size else "pass",
                           (int(miss[0]),) if miss.size else None))
    # (iii) loop symmetry
    fixed = A == np.arange(n)[None, :] if n else np.zeros((0, 0), bool)
    asym = np.argwhere(fixed != fixed.T)
    res.append(AxiomResult("(iii) loop symmetry", "fail" if asym.size else "pass",
                           tuple(int(x) for x in asym[0]) if asym.size else None))
    # (iv) pi_v3 o pi_v1 = pi_{pi_v3(v1)} o pi_v3
    wit = None
    if bijective:
        for v3 in range(n):
            lhs = A[v3][A]  # lhs[v1, v] = pi_v3(pi_v1(v))
            rhs = A[A[v3]][:, A[v3]]  # rhs[v1, v] = pi_{pi_v3(v1)}(pi_v3(v))
            diff = np.argwhere(lhs != rhs)
            if diff.size:
                v1, v = (int(x) for x in diff[0])
                wit = (v, v1, v3)
                break
        res.append(AxiomResult("(iv) equivariance", "fail" if wit else "pass", wit))
    else:
        res.append(AxiomResult("(iv) equivariance", "fail", None, "skipped: labels are not bijective"))
    res.append(AxiomResult("(v) fundamental group condition", "not checked", None,
                           "assumed for graphs built from groups"))
    return ValidationReport(tuple(res))


def equivariance_conjugation_form(gamma: CGraph) -> bool:
    """Check pi_u o pi_w o pi_u^-1 = pi_{pi_u(w)} for every pair of labels."""
    A = gamma.action
    n = gamma.n_vertices
    for u in range(n):
        inv_u = np.argsort(A[u])
        for w in range(n):
            if not np.array_equal(A[u][A[w][inv_u]], A[A[u, w]]):
                return False
    return True


# --------------------------------------------------------------------------
# periods, ampleness, distances


def period(gamma: CGraph, component: int) -> int:
    """Least p with pi_v^p trivial for every vertex v of the component."""
    if not 0 <= component < len(gamma.components):
        raise IndexError(f"no component {component}")
    orders = {int(gamma.vertex_orders[v]) for v in gamma.components[component]}
    return math.lcm(*orders)


def _label_set(gamma: CGraph, subset: Iterable[int]) -> list[int]:
    subset = list(subset)
    if not subset:
        raise ValueError("component subset must be nonempty")
    return [v for i in subset for v in gamma.components[i]]


def _bfs(gamma: CGraph, source: int, labels: Sequence[int]) -> dict[int, int]:
    dist = {source: 0}
    q = deque([source])
    A = gamma.action
    while q:
        v = q.popleft()
        for u in labels:
            w = int(A[u, v])
            if w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


def is_ample(gamma: CGraph, subset: Iterable[int]) -> bool:
    labels = _label_set(gamma, subset)
    for comp in gamma.components:
        if len(_bfs(gamma, comp[0], labels)) != len(comp):
            return False
    return True


def diameter(gamma: CGraph, subset: Iterable[int] | None = None) -> int:
    """Largest shortest-path length inside any component using labels from ``subset``."""
    subset = range(len(gamma.components)) if subset is None else list(subset)
    if not gamma.components:
        return 0
    if not is_ample(gamma, subset):
        raise NotAmple("chosen components do not connect every component")
    labels = _label_set(gamma, subset)
    d = 0
    for comp in gamma.components:
        for v in comp:
            d = max(d, max(_bfs(gamma, v, labels).values()))
    return d


def canonical_exponents(gamma: CGraph, subset: Iterable[int] | None = None) -> list[tuple[int, int]]:
    """Vertices of the chosen components, each with its component period."""
    subset = range(len(gamma.components)) if subset is None else list(subset)
    return [(v, gamma.periods[i]) for i in subset for v in gamma.components[i]]


def canonical_word(gamma: CGraph, subset: Iterable[int] | None = None) -> tuple[int, ...]:
    """The canonical element as a vertex word, each vertex repeated p times."""
    return tuple(v for v, p in canonical_exponents(gamma, subset) for _ in range(p))


def threshold_T1(gamma: CGraph) -> int:
    d = diameter(gamma)
    top = max((n * p for n, p in zip(gamma.sizes, gamma.periods)), default=0)
    return (d + 1) * top + 1


def prune_free_factors(gamma: CGraph) -> tuple[CGraph, list[int]]:
    """Drop period-1 vertices; returns the residual graph and the dropped vertices."""
    keep_comps = [i for i, p in enumerate(gamma.periods) if p > 1]
    pruned = [v for i, p in enumerate(gamma.periods) if p == 1 for v in gamma.components[i]]
    kept = [v for i in keep_comps for v in gamma.components[i]]
    sub = gamma.action[np.ix_(kept, kept)] if kept else np.zeros((0, 0), np.int64)
    lookup = np.full(gamma.n_vertices, -1, dtype=np.int64)
    lookup[kept] = np.arange(len(kept))
    action = lookup[sub] if kept else sub
    comps, start = [], 0
    for i in keep_comps:
        comps.append(tuple(range(start, start + len(gamma.components[i]))))
        start += len(gamma.components[i])
    elems = tuple(gamma.elements[v] for v in kept) if gamma.elements is not None else None
    labels = tuple(gamma.component_labels[i] for i in keep_comps)
    return CGraph(action, tuple(comps), elems, labels, gamma.group), pruned
