"""Scheduling and capacity algorithms under oblivious power.

Every scheduler re-verifies its output before returning it, so a
:class:`Schedule` handed back to the caller always satisfies the p-signal
condition it declares.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import InvalidPropertyError, InvariantError, PreconditionError, ValidationError
from .linkgraphs import (
    LinkGraph,
    build_H,
    build_Uz,
    length_groups,
    nondecreasing_length_order,
    well_separated_classes,
    length_keys,
)
from .metricspace import z1
from .sinrcore import (
    Instance,
    PowerAssignment,
    is_p_signal,
    is_sinr_feasible,
    max_affectance,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Schedule:
    slots: Tuple[Tuple[int, ...], ...]
    power: PowerAssignment
    mode: str
    p_certified: float
    algorithm: str = ""
    params: Dict = field(default_factory=dict, compare=False)
    diagnostics: Dict = field(default_factory=dict, compare=False)

    @property
    def length(self) -> int:
        return len(self.slots)

    def links(self) -> List[int]:
        return [v for s in self.slots for v in s]


@dataclass(frozen=True)
class CapacityResult:
    chosen: Tuple[int, ...]
    power: PowerAssignment
    total_weight: float
    algorithm: str = ""
    params: Dict = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return len(self.chosen)


def verify_schedule(sched: Schedule, inst: Instance, cover: Optional[Iterable[int]] = None) -> None:
    seen: Set[int] = set()
    for slot in sched.slots:
        if seen & set(slot):
            raise InvariantError("slots overlap")
        seen |= set(slot)
        if not is_p_signal(slot, sched.power, sched.p_certified, inst):
            raise InvariantError(f"slot {slot} is not {sched.p_certified}-signal")
    if cover is not None and seen != set(cover):
        raise InvariantError("schedule does not cover the input")


def _make_schedule(slots, power, p, inst, algorithm, params, cover) -> Schedule:
    slots = tuple(tuple(s) for s in slots)
    diag = {"max_affectance": [max_affectance(s, power, inst) for s in slots]}
    sched = Schedule(slots, power, inst.mode, p, algorithm, params, diag)
    verify_schedule(sched, inst, cover)
    return sched


def _make_capacity(chosen, power, inst, algorithm, params) -> CapacityResult:
    chosen = tuple(chosen)
    if not is_sinr_feasible(chosen, power, inst):
        raise InvariantError(f"{algorithm}: chosen set is not SINR-feasible")
    total = math.fsum(inst.links[i].weight for i in chosen)
    return CapacityResult(chosen, power, total, algorithm, params)


# -- generic inductive-graph algorithms ------------------------------------


def greedy_pi_subset(order: Sequence[int], G: LinkGraph) -> List[int]:
    """Keep each node, in order, unless a kept node is adjacent to it."""
    kept: List[int] = []
    blocked: Set[int] = set()
    for v in order:
        if v not in blocked:
            kept.append(v)
            blocked |= G.adj[v]
    return kept


def firstfit_partition(order: Sequence[int], G: LinkGraph) -> List[List[int]]:
    """First-fit colouring over the *reverse* of ``order``."""
    classes: List[List[int]] = []
    colour: Dict[int, int] = {}
    for v in reversed(list(order)):
        used = {colour[u] for u in G.adj[v] if u in colour}
        c = next(i for i in range(len(classes) + 1) if i not in used)
        if c == len(classes):
            classes.append([])
        classes[c].append(v)
        colour[v] = c
    return classes


def firstfit_in_order(order: Sequence[int], G: LinkGraph) -> List[List[int]]:
    return firstfit_partition(list(reversed(list(order))), G)


def stack_push_phase(
    order: Sequence[int], G: LinkGraph, weights: Dict[int, float]
) -> Tuple[List[int], Dict[int, float]]:
    """Local-ratio push phase; returns the stack and the residual weight of each pushed node."""
    residual = {v: float(weights[v]) for v in order}
    pos = {v: i for i, v in enumerate(order)}
    stack: List[int] = []
    wbar: Dict[int, float] = {}
    for i, v in enumerate(order):
        if residual[v] > 0:
            stack.append(v)
            wbar[v] = residual[v]
            for u in G.adj[v]:
                if pos[u] > i:
                    residual[u] -= residual[v]
    return stack, wbar


def stack_weighted_pi_subset(
    order: Sequence[int],
    G: LinkGraph,
    weights: Dict[int, float],
    pi_test: Callable[[Sequence[int]], bool],
) -> List[int]:
    order = list(order)
    if any(weights[v] < 0 for v in order):
        raise ValidationError("weights must be nonnegative")
    stack, wbar = stack_push_phase(order, G, weights)
    chosen: List[int] = []
    for u in reversed(stack):
        if not pi_test([u]):
            raise InvalidPropertyError(f"property rejects singleton {u}")
        if pi_test(chosen + [u]):
            chosen.append(u)
    got = math.fsum(weights[v] for v in chosen)
    bound = math.fsum(wbar.values())
    if got < bound * (1 - 1e-12) - 1e-12:
        raise InvariantError(f"stack output weight {got} below stack residual total {bound}")
    return chosen


# -- nearly-equilength links and unit-disc graphs --------------------------


def default_equilength_p(inst: Instance) -> float:
    """``2^(alpha/2) * beta``: head-room for reuse of the slots under mean power."""
    return 2 ** (inst.alpha / 2) * inst.beta


def _check_equilength(L: Sequence[int], inst: Instance) -> None:
    if not L:
        return
    ll = inst.log2_lengths[list(L)]
    if ll.max() - ll.min() >= 1:
        raise PreconditionError("links are not nearly-equilength (length ratio >= 2)")


def schedule_equilength_udg(L: Sequence[int], inst: Instance, p: Optional[float] = None) -> Schedule:
    """First-fit colouring of ``U_{z1(p)}(L)`` in input order, under uniform power."""
    L = list(L)
    _check_equilength(L, inst)
    p = default_equilength_p(inst) if p is None else p
    power = PowerAssignment.uniform()
    if not L:
        return _make_schedule([], power, p, inst, "udg", {"p": p}, [])
    G = build_Uz(L, z1(p, inst.fading), inst)
    slots = firstfit_in_order(L, G)
    return _make_schedule(slots, power, p, inst, "udg", {"p": p}, L)


def capacity_equilength(L: Sequence[int], inst: Instance) -> CapacityResult:
    """Maximal independent set of ``U_{z1(beta)}(L)`` taken greedily in input order."""
    L = list(L)
    _check_equilength(L, inst)
    power = PowerAssignment.uniform()
    if not L:
        return _make_capacity([], power, inst, "udg", {})
    G = build_Uz(L, z1(inst.beta, inst.fading), inst)
    return _make_capacity(greedy_pi_subset(L, G), power, inst, "udg", {})


def weighted_capacity_equilength(L: Sequence[int], inst: Instance) -> CapacityResult:
    """Repeatedly take a heaviest remaining link and discard its neighbours."""
    L = list(L)
    _check_equilength(L, inst)
    power = PowerAssignment.uniform()
    if not L:
        return _make_capacity([], power, inst, "udg-weighted", {})
    G = build_Uz(L, z1(inst.beta, inst.fading), inst)
    ranked = sorted(L, key=lambda i: (-inst.links[i].weight, inst.links[i].id))
    return _make_capacity(greedy_pi_subset(ranked, G), power, inst, "udg-weighted", {})


# -- arbitrary lengths, uniform power --------------------------------------


def schedule_lengthgroups_uniform(L: Sequence[int], inst: Instance, p: Optional[float] = None) -> Schedule:
    L = list(L)
    p = default_equilength_p(inst) if p is None else p
    groups, _ = length_groups(L, inst)
    slots: List[Tuple[int, ...]] = []
    for members in groups.values():
        slots.extend(schedule_equilength_udg(members, inst, p).slots)
    return _make_schedule(slots, PowerAssignment.uniform(), p, inst, "groups", {"p": p}, L)


class OnlineScheduler:
    """First-fit online scheduling by length band; never looks ahead."""

    def __init__(self, inst: Instance, p: Optional[float] = None):
        self.inst = inst
        self.p = default_equilength_p(inst) if p is None else p
        self.z = z1(self.p, inst.fading)
        self.slots: List[List[int]] = []
        self._band_slots: Dict[int, List[int]] = {}
        self.assignment: List[int] = []

    def add(self, v: int) -> int:
        inst = self.inst
        key = length_keys([v], inst)[v]
        # band floor 2^(key-1) is a lower bound on every length in the band
        radius_log2 = math.log2(self.z) + key - 1
        for s in self._band_slots.setdefault(key, []):
            if all(_sender_log2_dist(v, u, inst) >= radius_log2 for u in self.slots[s]):
                self.slots[s].append(v)
                self.assignment.append(s)
                return s
        self.slots.append([v])
        self._band_slots[key].append(len(self.slots) - 1)
        self.assignment.append(len(self.slots) - 1)
        return len(self.slots) - 1

    def schedule(self) -> Schedule:
        return _make_schedule(
            self.slots, PowerAssignment.uniform(), self.p, self.inst, "online", {"p": self.p}, None
        )


def _sender_log2_dist(v: int, u: int, inst: Instance) -> float:
    a, b = inst.links[v].sender, inst.links[u].sender
    if len(a) == 1:
        d = abs(a[0] - b[0])
    else:
        d = math.hypot(*(x - y for x, y in zip(a, b)))
    return math.log2(d) if d else -math.inf


def online_schedule(stream: Iterable[int], inst: Instance, p: Optional[float] = None) -> Schedule:
    sched = OnlineScheduler(inst, p)
    for v in stream:
        sched.add(v)
    return sched.schedule()


def capacity_random_group(L: Sequence[int], inst: Instance, seed: int) -> CapacityResult:
    """Pick one nonempty length group uniformly at random and solve it greedily."""
    groups, _ = length_groups(list(L), inst)
    if not groups:
        return _make_capacity([], PowerAssignment.uniform(), inst, "random-group", {"seed": seed})
    key = random.Random(seed).choice(sorted(groups))
    res = capacity_equilength(groups[key], inst)
    return CapacityResult(res.chosen, res.power, res.total_weight, "random-group",
                          {"seed": seed, "group": key})


# -- mean power -------------------------------------------------------------


def _class_graphs(L: Sequence[int], inst: Instance):
    part = well_separated_classes(list(L), inst)
    for c in part.nonempty():
        G = build_H(c, inst, part)
        yield c, G, nondecreasing_length_order(c, inst)


def schedule_meanpower(L: Sequence[int], inst: Instance) -> Schedule:
    """First-fit (reverse inductive order) colouring of H on each well-separated class."""
    L = list(L)
    slots: List[List[int]] = []
    for _, G, order in _class_graphs(L, inst):
        slots.extend(firstfit_partition(order, G))
    return _make_schedule(
        slots, PowerAssignment.mean(inst.alpha), inst.beta, inst, "mean", {"mode": inst.mode}, L
    )


def capacity_meanpower(L: Sequence[int], inst: Instance) -> CapacityResult:
    best: List[int] = []
    for _, G, order in _class_graphs(L, inst):
        got = greedy_pi_subset(order, G)
        if len(got) > len(best):
            best = got
    return _make_capacity(best, PowerAssignment.mean(inst.alpha), inst, "mean", {"mode": inst.mode})


def weighted_capacity_meanpower(L: Sequence[int], inst: Instance) -> CapacityResult:
    power = PowerAssignment.mean(inst.alpha)
    weights = {i: inst.links[i].weight for i in L}
    best: List[int] = []
    best_w = -1.0
    for _, G, order in _class_graphs(L, inst):
        got = stack_weighted_pi_subset(order, G, weights, lambda S: is_sinr_feasible(S, power, inst))
        w = math.fsum(weights[i] for i in got)
        if w > best_w:
            best, best_w = got, w
    return _make_capacity(best, power, inst, "mean-weighted", {"mode": inst.mode})


# -- refinement -------------------------------------------------------------


def strengthen_schedule(sched: Schedule, p_target: float, inst: Instance) -> Schedule:
    """Split every slot by first-fit into ``p_target``-signal subslots."""
    if p_target < sched.p_certified:
        raise ValidationError("p_target must be at least the schedule's certified p")
    out: List[List[int]] = []
    blowup: List[int] = []
    for slot in sched.slots:
        sub: List[List[int]] = []
        for v in slot:
            if not is_p_signal([v], sched.power, p_target, inst):
                raise InvariantError(f"link {v} fails p_target on its own")
            for s in sub:
                if is_p_signal(s + [v], sched.power, p_target, inst):
                    s.append(v)
                    break
            else:
                sub.append([v])
        out.extend(sub)
        blowup.append(len(sub))
    res = _make_schedule(
        out, sched.power, p_target, inst, sched.algorithm + "+strengthen",
        dict(sched.params, p_target=p_target), sched.links(),
    )
    res.diagnostics["blowup"] = blowup
    return res


def warn_if_small_beta(inst: Instance) -> bool:
    if inst.beta < 3**inst.alpha:
        log.warning(
            "beta=%g < 3^alpha=%g: proven approximation ratios assume beta >= 3^alpha; "
            "feasibility checks remain exact", inst.beta, 3**inst.alpha,
        )
        return True
    return False
