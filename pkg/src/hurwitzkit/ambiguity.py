"""The ambiguity index of an equipped group, by three independent routes.

* partition: refine the bounded word universe, then count the classes of
  the commutator part whose group value is trivial;
* commutator: ``|[G~, G~]| / |[G, G]|`` with G~ from coset enumeration;
* orbits: class counts of product-one generating tuples on a growing grid
  of type vectors.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .cgraph import EquippedGroup, prune_free_factors, threshold_T1
from .enumeration import enumerate_classes
from .errors import (CapExceeded, DivisibilityViolation, GeneratingPrecondition, NonConstantEvaluation,
                     Undecided)
from .facsemi import alpha, cgraph_for, stabilized_equal, type_of
from .groups import commutator_subgroup
from .wordproblem import (DEFAULT_UNIVERSE_CAP, CGroupSolver, coset_tilde_group, refine_partition,
                          tilde_group)

PLATEAU_TUPLE_CAP = 3_000_000


# --------------------------------------------------------------------------
# partition route


@dataclass
class PartitionResult:
    value: int
    tilde_order: int
    commutator_classes: int
    unity_classes: list[list[int]]  # representative words (reduced-graph vertices)
    plain_evaluation_constant: bool
    plain_witness: tuple | None
    strategy: str
    rounds: int


def _residual_graph(eg: EquippedGroup):
    gamma = cgraph_for(eg)
    reduced, pruned = prune_free_factors(gamma)
    return gamma, reduced, pruned


def ambiguity_via_partition(eg: EquippedGroup, strategy: str = "auto",
                            universe_cap: int = DEFAULT_UNIVERSE_CAP) -> PartitionResult:
    """Count classes of the refined partition that represent the identity of G.

    A class qualifies when its words have, in every component, a letter
    count divisible by the period, and the corrected value
    ``beta(w) * prod_i (g_i^p_i)^(-t_i/p_i)`` is trivial, where t_i is the
    letter count of component i and g_i any element of that component.
    The correction removes the central factors killed in G~; the corrected
    value is checked to be the same for every word of the class.
    """
    if not eg.generates():
        raise GeneratingPrecondition("O does not generate G")
    G = eg.group
    gamma, reduced, _ = _residual_graph(eg)
    if reduced.n_vertices == 0:
        return PartitionResult(1, 1, 1, [[]], True, None, "trivial", 0)
    part = refine_partition(reduced, strategy, universe_cap=universe_cap)
    tg = tilde_group(part, reduced)
    per = reduced.periods
    comp_of = [int(x) for x in reduced.component_of]
    elems = reduced.elements
    z = []
    for i, comp in enumerate(reduced.components):
        powers = {G.power(elems[v], per[i]) for v in comp}
        if len(powers) != 1:
            raise NonConstantEvaluation(f"component {i} has distinct p-th powers", tuple(powers))
        z.append(powers.pop())
    plain_constant, plain_witness = True, None
    value, comm_classes, unity = 0, 0, []
    for c, block in enumerate(part.classes):
        residues, corrected, plain = set(), set(), set()
        for k in block:
            w = part.universe[k]
            t = [0] * len(per)
            for y in w:
                t[comp_of[y]] += 1
            residues.add(tuple(x % p for x, p in zip(t, per)))
            val = G.product(elems[y] for y in w)
            plain.add(val)
            for i, ti in enumerate(t):
                if ti % per[i] == 0:
                    val = G.mul(val, G.power(z[i], -(ti // per[i])))
            corrected.add(val)
        if len(residues) != 1:
            raise NonConstantEvaluation(f"class {c} mixes letter counts modulo periods", tuple(residues))
        if len(plain) != 1 and plain_constant:
            plain_constant, plain_witness = False, (c, tuple(sorted(plain)))
        if any(residues.pop()):
            continue
        comm_classes += 1
        if len(corrected) != 1:
            raise NonConstantEvaluation(f"class {c} has several corrected values", tuple(sorted(corrected)))
        if corrected.pop() == 0:
            value += 1
            unity.append(list(part.universe[block[0]]))
    if tg.order != comm_classes * math.prod(per):
        raise DivisibilityViolation(f"{tg.order} classes but {comm_classes} in the commutator part")
    return PartitionResult(value, tg.order, comm_classes, unity, plain_constant, plain_witness,
                           part.strategy, part.rounds)


# --------------------------------------------------------------------------
# commutator route


@dataclass
class CommutatorResult:
    value: int
    tilde_order: int
    tilde_commutator: int
    group_commutator: int
    period_product: int


def ambiguity_via_commutator(eg: EquippedGroup) -> CommutatorResult:
    """``|[G~, G~]| / |[G, G]|`` with G~ built by coset enumeration."""
    if not eg.generates():
        raise GeneratingPrecondition("O does not generate G")
    _, reduced, _ = _residual_graph(eg)
    tg = coset_tilde_group(reduced)
    P = math.prod(reduced.periods)
    if tg.order % P:
        raise DivisibilityViolation(f"|G~| = {tg.order} not divisible by {P}")
    comm = tg.commutator_order
    if comm != tg.order // P:
        raise DivisibilityViolation(f"|[G~,G~]| = {comm} but |G~|/prod p = {tg.order // P}")
    gc = commutator_subgroup(eg.group).order
    if comm % gc:
        raise DivisibilityViolation(f"|[G~,G~]| = {comm} not divisible by |[G,G]| = {gc}")
    return CommutatorResult(comm // gc, tg.order, comm, gc, P)


# --------------------------------------------------------------------------
# orbit route


@dataclass
class PlateauResult:
    value: int | None
    tau_witness: tuple[int, ...] | None
    certified: bool
    threshold_T1: int | None
    trace: list[dict] = field(default_factory=list)
    detail: str = ""


def plateau_steps(eg: EquippedGroup) -> tuple[int, ...]:
    """Per-class grid step: lcm of the period and the order of the class elements."""
    gamma = cgraph_for(eg)
    steps = []
    for i, c in enumerate(eg.classes):
        comps = [k for k, lab in enumerate(gamma.component_labels) if lab == i]
        p = math.lcm(*(gamma.periods[k] for k in comps))
        steps.append(math.lcm(p, eg.group.element_order(c.representative)))
    return tuple(steps)


def ambiguity_via_orbit_stabilization(eg: EquippedGroup, cap_tuples: int = PLATEAU_TUPLE_CAP,
                                      max_samples: int = 12, threads: int = 1) -> PlateauResult:
    """Class counts of product-one generating tuples along ``tau = k * step``.

    The plateau is the common value of the last two nonzero counts.  It is
    certified when the sample it rests on has every coordinate at least T1.
    """
    if not eg.generates():
        raise GeneratingPrecondition("O does not generate G")
    steps = plateau_steps(eg)
    try:
        T1 = threshold_T1(cgraph_for(eg))
    except Exception:  # not ample: no certification possible
        T1 = None
    trace = []
    for k in range(1, max_samples + 1):
        tau = tuple(k * s for s in steps)
        res = enumerate_classes(eg, tau, 0, True, cap_tuples=cap_tuples, threads=threads)
        trace.append({"tau": list(tau), "count": res.count, "tuples": res.n_tuples, "capped": res.capped})
        if res.capped:
            break
        done = [e for e in trace if e["count"]]
        if (T1 is not None and len(done) >= 2 and done[-1]["count"] == done[-2]["count"]
                and min(tau) >= T1):
            break
    nonzero = [e for e in trace if e["count"]]
    if len(nonzero) < 2 or nonzero[-1]["count"] != nonzero[-2]["count"]:
        return PlateauResult(None, None, False, T1, trace, "no plateau within caps")
    last = nonzero[-1]
    certified = T1 is not None and min(last["tau"]) >= T1
    return PlateauResult(last["count"], tuple(last["tau"]), certified, T1, trace)


# --------------------------------------------------------------------------
# combined report


@dataclass
class AmbiguityReport:
    value: int | None
    methods_agree: bool
    per_method: dict
    diagnostics: dict

    def to_json(self) -> dict:
        return {"value": self.value, "methodsAgree": self.methods_agree,
                "perMethod": self.per_method, "diagnostics": self.diagnostics,
                "certified": self.value is not None and self.methods_agree}


def ambiguity_report(eg: EquippedGroup, methods: Sequence[str] = ("partition", "commutator", "orbits"),
                     cap_tuples: int = PLATEAU_TUPLE_CAP, universe_cap: int = DEFAULT_UNIVERSE_CAP) -> AmbiguityReport:
    """Run the chosen methods and compare; capped methods are reported but not compared."""
    per, values, diag = {}, {}, {}
    if "commutator" in methods:
        try:
            c = ambiguity_via_commutator(eg)
            per["commutatorFormula"] = asdict(c)
            values["commutator"] = c.value
            diag.update({"tilde_order": c.tilde_order, "tilde_commutator": c.tilde_commutator,
                         "group_commutator": c.group_commutator, "period_product": c.period_product})
        except CapExceeded as exc:
            per["commutatorFormula"] = {"value": None, "capped": str(exc)}
    if "partition" in methods:
        try:
            p = ambiguity_via_partition(eg, universe_cap=universe_cap)
            per["partitionCount"] = asdict(p)
            values["partition"] = p.value
            diag["unity_classes"] = p.unity_classes
        except CapExceeded as exc:
            per["partitionCount"] = {"value": None, "capped": str(exc)}
    if "orbits" in methods:
        o = ambiguity_via_orbit_stabilization(eg, cap_tuples=cap_tuples)
        per["orbitPlateau"] = asdict(o)
        if o.certified:
            values["orbits"] = o.value
    distinct = set(values.values())
    agree = len(distinct) <= 1
    value = distinct.pop() if len(distinct) == 1 else None
    return AmbiguityReport(value, agree, per, diag)


def monotone_bound_check(eg: EquippedGroup, subclass_indices: Sequence[int]) -> dict:
    """Compare the index of O with that of the sub-equipment on the chosen classes."""
    sub = eg.sub(subclass_indices)
    if not sub.generates():
        raise GeneratingPrecondition("sub-equipment does not generate G")
    a_full = ambiguity_via_commutator(eg).value
    a_sub = ambiguity_via_commutator(sub).value
    return {"a_full": a_full, "a_sub": a_sub, "holds": a_full <= a_sub}


# --------------------------------------------------------------------------
# stability


def random_pair(eg: EquippedGroup, length: int, rng: random.Random, tries: int = 10_000):
    """Two random tuples with equal product and type."""
    O = eg.O
    classes = [c.members for c in eg.classes]
    t1 = tuple(rng.choice(O) for _ in range(length))
    tau = type_of(eg, t1).counts
    target = alpha(eg, t1)
    G = eg.group
    for _ in range(tries):
        pat = [i for i, k in enumerate(tau) for _ in range(k)]
        rng.shuffle(pat)
        head = [rng.choice(classes[i]) for i in pat[:-1]]
        need = G.mul(G.inv(G.product(head)), target)
        if eg.class_of.get(need) == pat[-1]:
            return t1, tuple(head) + (need,)
    return t1, t1


def non_stabilizing_pair(eg: EquippedGroup, partition_result: PartitionResult | None = None):
    """A pair with equal product and type but distinct images in the C-group.

    Built from a unity class other than the identity class: its word and a
    power word with the same letter counts have the same value in G.  Both
    are padded once with the canonical element so they generate G.
    Returns None when the index is 1.
    """
    pr = partition_result or ambiguity_via_partition(eg)
    if pr.value <= 1:
        return None
    gamma, reduced, _ = _residual_graph(eg)
    per = reduced.periods
    w2 = next(w for w in pr.unity_classes if w)
    counts = [0] * len(per)
    for y in w2:
        counts[int(reduced.component_of[y])] += 1
    w1 = [reduced.components[i][0] for i, t in enumerate(counts) for _ in range(t)]
    to_elem = reduced.elements
    from .facsemi import stabilizing_word

    pad = stabilizing_word(eg)
    t1 = tuple(to_elem[y] for y in w1) + pad
    t2 = tuple(to_elem[y] for y in w2) + pad
    solver = CGroupSolver(gamma)
    v1 = [gamma.vertex_of(g) for g in t1]
    v2 = [gamma.vertex_of(g) for g in t2]
    return {"t1": t1, "t2": t2, "distinct_in_cgroup": not solver.equal(v1, v2),
            "same_alpha": alpha(eg, t1) == alpha(eg, t2), "same_tau": type_of(eg, t1) == type_of(eg, t2)}


@dataclass
class StabilityReport:
    a: int
    pairs: int
    stabilized: int
    undecided: int
    contradictions: int
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        if self.a == 1:
            return self.stabilized == self.pairs and self.contradictions == 0
        return self.witness is not None and self.witness["distinct_in_cgroup"] and self.contradictions == 0


def stability_check(eg: EquippedGroup, n_pairs: int = 100, length: int = 4, max_pad: int = 4,
                    cap: int = 200_000, seed: int = 0, witness_pads: int = 1) -> StabilityReport:
    """Sample same-(alpha, tau) pairs when the index is 1; exhibit a lasting pair otherwise."""
    a = ambiguity_via_commutator(eg).value
    rng = random.Random(seed)
    if a == 1:
        ok = und = 0
        for _ in range(n_pairs):
            t1, t2 = random_pair(eg, length, rng)
            try:
                if stabilized_equal(eg, t1, t2, max_pad, cap):
                    ok += 1
            except Undecided:
                und += 1
        return StabilityReport(a, n_pairs, ok, und, 0)
    wit = non_stabilizing_pair(eg)
    contradictions = 0
    if wit is not None:
        try:
            if stabilized_equal(eg, wit["t1"], wit["t2"], witness_pads, cap):
                contradictions = 1
        except Undecided:
            pass
        wit = {k: (list(v) if isinstance(v, tuple) else v) for k, v in wit.items()}
    return StabilityReport(a, 0, 0, 0, contradictions, wit)
