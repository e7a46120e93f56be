"""Exhaustive ground truth for small instances.

Subsets of a link list ``L`` are bitmasks: bit ``i`` stands for ``L[i]``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import OracleScaleError, ValidationError
from .linkgraphs import LinkGraph
from .sinrcore import Instance, PowerAssignment, is_p_signal, pc_radius

POWER_CONTROL = "pc"
BOUNDARY_EPS = 1e-9
HARD_LIMIT = 22

Feasibility = Union[PowerAssignment, str]


@dataclass(frozen=True)
class OracleBudget:
    max_links: int = 14
    max_subsets: int = 1 << HARD_LIMIT

    def __post_init__(self):
        if not 0 <= self.max_links <= HARD_LIMIT:
            raise ValidationError(f"max_links must be within [0, {HARD_LIMIT}]")

    @classmethod
    def from_env(cls) -> OracleBudget:
        raw = os.environ.get("SINRSCHED_ORACLE_MAX")
        if raw is None:
            return cls()
        try:
            return cls(max_links=int(raw))
        except ValueError:
            raise ValidationError(f"SINRSCHED_ORACLE_MAX must be an integer, got {raw!r}")

    def check(self, n: int) -> None:
        if n > self.max_links or (1 << n) > self.max_subsets:
            raise OracleScaleError(f"{n} links exceed the oracle budget of {self.max_links}")


@dataclass(frozen=True)
class FeasibleTable:
    links: Tuple[int, ...]
    table: np.ndarray
    boundary: int = 0

    @property
    def n(self) -> int:
        return len(self.links)

    def members(self, mask: int) -> List[int]:
        return [self.links[i] for i in range(self.n) if mask >> i & 1]

    def feasible_masks(self) -> np.ndarray:
        return np.flatnonzero(self.table)


def _bits(n: int, start: int, stop: int) -> np.ndarray:
    masks = np.arange(start, stop, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(bool)


def _fixed_power_table(L: List[int], P: PowerAssignment, inst: Instance) -> np.ndarray:
    n = len(L)
    if inst.precision == "log2":
        return _pruned_table(n, lambda mask: is_p_signal(_members(L, mask), P, inst.beta, inst))
    A = inst.affectance_matrix(P)[np.ix_(L, L)]
    A = np.where(np.isfinite(A), A, 1e300)
    # noise expressed in affectance units: N * l_v^alpha / P_v
    lengths = inst.lengths[L]
    noise = inst.noise * lengths**inst.alpha / np.array([P.power(x) for x in lengths])
    limit = 1.0 / inst.beta
    out = np.empty(1 << n, dtype=bool)
    chunk = 1 << 16
    for start in range(0, 1 << n, chunk):
        stop = min(start + chunk, 1 << n)
        B = _bits(n, start, stop)
        load = B.astype(float) @ A + noise
        out[start:stop] = np.all((load <= limit) | ~B, axis=1)
    return out


def _members(L, mask):
    return [L[i] for i in range(len(L)) if mask >> i & 1]


def _pruned_table(n: int, test) -> np.ndarray:
    ok = np.zeros(1 << n, dtype=bool)
    ok[0] = True
    for mask in range(1, 1 << n):
        rest = mask
        good = True
        while rest:
            b = rest & -rest
            if not ok[mask ^ b]:
                good = False
                break
            rest ^= b
        if good and test(mask):
            ok[mask] = True
    return ok


def feasible_subsets(
    L: Sequence[int], feas: Feasibility, inst: Instance, budget: Optional[OracleBudget] = None
) -> FeasibleTable:
    """Feasibility indicator for all ``2^|L|`` subsets.

    ``feas`` is a fixed :class:`PowerAssignment` (SINR test including noise) or
    :data:`POWER_CONTROL` (some power vector works; noise ignored).
    """
    L = list(L)
    (budget or OracleBudget()).check(len(L))
    if feas == POWER_CONTROL:
        radii = {}

        def test(mask):
            radii[mask] = pc_radius(_members(L, mask), inst)
            return radii[mask] < 1.0

        table = _pruned_table(len(L), test)
        boundary = sum(1 for r in radii.values() if abs(r - 1.0) <= BOUNDARY_EPS)
        return FeasibleTable(tuple(L), table, boundary)
    if not isinstance(feas, PowerAssignment):
        raise ValidationError(f"unknown feasibility mode {feas!r}")
    return FeasibleTable(tuple(L), _fixed_power_table(L, feas, inst))


def _popcounts(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts += (masks >> i) & 1
    return counts


def opt_capacity(
    L: Sequence[int], feas: Feasibility, inst: Instance, budget: Optional[OracleBudget] = None,
    table: Optional[FeasibleTable] = None,
) -> List[int]:
    """Maximum-cardinality feasible subset; ties go to the smallest bitmask."""
    L = list(L)
    if not L:
        return []
    table = table or feasible_subsets(L, feas, inst, budget)
    size = np.where(table.table, _popcounts(len(L)), -1)
    return table.members(int(np.argmax(size)))


def opt_weighted_capacity(
    L: Sequence[int], feas: Feasibility, inst: Instance, budget: Optional[OracleBudget] = None,
    table: Optional[FeasibleTable] = None,
) -> List[int]:
    L = list(L)
    if not L:
        return []
    table = table or feasible_subsets(L, feas, inst, budget)
    w = np.array([inst.links[i].weight for i in L], dtype=float)
    totals = _bits(len(L), 0, 1 << len(L)).astype(float) @ w
    totals = np.where(table.table, totals, -np.inf)
    return table.members(int(np.argmax(totals)))


def opt_schedule(
    L: Sequence[int], feas: Feasibility, inst: Instance, budget: Optional[OracleBudget] = None,
    table: Optional[FeasibleTable] = None,
) -> Tuple[int, List[List[int]]]:
    """Minimum number of feasible slots covering ``L`` and one optimal partition.

    ``best[mask] = 1 + min best[mask - sub]`` over feasible ``sub`` of ``mask``
    holding the lowest set bit; O(3^n).
    """
    L = list(L)
    n = len(L)
    if n == 0:
        return 0, []
    table = table or feasible_subsets(L, feas, inst, budget)
    ok = table.table.tolist()
    full = (1 << n) - 1
    INF = n + 1
    best = [INF] * (1 << n)
    choice = [0] * (1 << n)
    best[0] = 0
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        sub = rest
        b = INF
        pick = low
        while True:
            cand = sub | low
            if ok[cand]:
                c = best[mask ^ cand] + 1
                if c < b:
                    b, pick = c, cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask] = b
        choice[mask] = pick
    parts = []
    mask = full
    while mask:
        parts.append(table.members(choice[mask]))
        mask ^= choice[mask]
    return best[full], parts


def independence_number(G: LinkGraph, within: Optional[Sequence[int]] = None) -> int:
    """Exact maximum independent set size by branching on a max-degree vertex."""
    nodes = list(G.nodes if within is None else within)
    idx = {v: i for i, v in enumerate(nodes)}
    nbr = [0] * len(nodes)
    for v in nodes:
        for u in G.adj[v]:
            if u in idx:
                nbr[idx[v]] |= 1 << idx[u]

    def solve(cand: int) -> int:
        if cand == 0:
            return 0
        best_v, best_deg = -1, -1
        c = cand
        while c:
            b = c & -c
            i = b.bit_length() - 1
            deg = bin(nbr[i] & cand).count("1")
            if deg == 0:
                return 1 + solve(cand ^ b)
            if deg > best_deg:
                best_v, best_deg = i, deg
            c ^= b
        b = 1 << best_v
        take = 1 + solve(cand & ~b & ~nbr[best_v])
        if best_deg <= 1:
            return take
        return max(take, solve(cand ^ b))

    return solve((1 << len(nodes)) - 1)
