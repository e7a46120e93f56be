"""Conflict graphs over link indices and the length-class machinery."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import InvariantError, OracleScaleError, ValidationError
from .metricspace import z1
from .sinrcore import Instance, PowerAssignment

MAX_NEIGHBORHOOD = 22


@dataclass(frozen=True)
class LinkGraph:
    nodes: Tuple[int, ...]
    adj: Dict[int, FrozenSet[int]]
    label: str = ""

    @classmethod
    def from_edges(cls, nodes: Iterable[int], edges: Iterable[Tuple[int, int]], label: str = "") -> LinkGraph:
        nodes = tuple(nodes)
        adj = {v: set() for v in nodes}
        for u, v in edges:
            if u == v:
                raise ValidationError("self-loops are not allowed")
            adj[u].add(v)
            adj[v].add(u)
        return cls(nodes, {v: frozenset(s) for v, s in adj.items()}, label)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def neighbors(self, v: int) -> FrozenSet[int]:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(s) for s in self.adj.values()), default=0)

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((u, v) for u in self.adj for v in self.adj[u] if u < v)

    def is_independent(self, S: Iterable[int]) -> bool:
        S = set(S)
        return all(not (self.adj[v] & S) for v in S)

    def induced(self, S: Iterable[int]) -> LinkGraph:
        keep = [v for v in self.nodes if v in set(S)]
        ks = set(keep)
        return LinkGraph(tuple(keep), {v: self.adj[v] & ks for v in keep}, self.label)

    def edge_list_text(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges())


def _pairs_to_graph(nodes: Sequence[int], mask: np.ndarray, label: str) -> LinkGraph:
    nodes = tuple(nodes)
    iu, ju = np.nonzero(np.triu(mask, 1))
    return LinkGraph.from_edges(nodes, ((nodes[i], nodes[j]) for i, j in zip(iu, ju)), label)


def is_q_independent(v: int, w: int, q: float, inst: Instance) -> bool:
    """``d_vw * d_wv >= q^2 * l_v * l_w`` with mode-aware distances."""
    if not q > 0:
        raise ValidationError("q must be positive")
    LD = inst.log2_distance_matrix()
    ll = inst.log2_lengths
    return bool(LD[v, w] + LD[w, v] >= 2 * math.log2(q) + ll[v] + ll[w])


def build_Gq(L: Sequence[int], q: float, inst: Instance) -> LinkGraph:
    """Adjacent iff not q-independent."""
    if not q > 0:
        raise ValidationError("q must be positive")
    L = list(L)
    LD = inst.log2_distance_matrix()[np.ix_(L, L)]
    ll = inst.log2_lengths[L]
    with np.errstate(invalid="ignore"):
        lhs = LD + LD.T
        rhs = 2 * math.log2(q) + ll[:, None] + ll[None, :]
    return _pairs_to_graph(L, lhs < rhs, f"G_q({q:g})")


def sender_distances(L: Sequence[int], inst: Instance) -> np.ndarray:
    """Pairwise sender distances (float path only)."""
    S = inst.senders[list(L)]
    return np.linalg.norm(S[:, None, :] - S[None, :, :], axis=-1)


def _log2_sender_distances(L: Sequence[int], inst: Instance) -> np.ndarray:
    xs = [inst.links[i].sender[0] for i in L]
    out = np.empty((len(xs), len(xs)))
    for a, xa in enumerate(xs):
        for b, xb in enumerate(xs):
            d = abs(xa - xb)
            out[a, b] = math.log2(d) if d else -math.inf
    return out


def senders_closer_than(L: Sequence[int], inst: Instance, radius_log2: np.ndarray, strict: bool) -> np.ndarray:
    """Boolean matrix: sender distance below ``2**radius_log2[row]`` (``<`` or ``<=``)."""
    L = list(L)
    radius_log2 = np.broadcast_to(np.asarray(radius_log2, dtype=float), (len(L),))
    if inst.precision == "log2":
        D = _log2_sender_distances(L, inst)
        R = radius_log2[:, None]
    else:
        D = sender_distances(L, inst)
        R = np.exp2(radius_log2)[:, None]
    return D < R if strict else D <= R


def build_Uz(L: Sequence[int], z: float, inst: Instance) -> LinkGraph:
    """Unit-disc graph on senders: adjacent iff sender distance ``< z * d_min(L)``."""
    if not z > 0:
        raise ValidationError("z must be positive")
    L = list(L)
    if not L:
        raise ValidationError("U_z needs a nonempty link set")
    if inst.precision == "log2":
        radius = math.log2(z) + float(inst.log2_lengths[L].min())
        return _pairs_to_graph(L, senders_closer_than(L, inst, radius, strict=True), f"U_z({z:g})")
    d = float(inst.lengths[L].min())
    return _pairs_to_graph(L, sender_distances(L, inst) < z * d, f"U_z({z:g})")


def length_key(log2_len: float, exact_len=None) -> int:
    """``ceil(lg l)``; exact for integer lengths."""
    if isinstance(exact_len, int):
        return (exact_len - 1).bit_length()
    return math.ceil(log2_len)


def length_keys(L: Sequence[int], inst: Instance) -> Dict[int, int]:
    out = {}
    for i in L:
        link = inst.links[i]
        exact = None
        if inst.precision == "log2":
            exact = abs(link.sender[0] - link.receiver[0])
        out[i] = length_key(float(inst.log2_lengths[i]), exact)
    return out


def length_groups(L: Sequence[int], inst: Instance) -> Tuple[Dict[int, List[int]], int]:
    """Group link indices by ``ceil(lg length)``; returns (groups, g(L))."""
    groups: Dict[int, List[int]] = defaultdict(list)
    for i, k in length_keys(L, inst).items():
        groups[k].append(i)
    groups = dict(sorted(groups.items()))
    return groups, len(groups)


@dataclass(frozen=True)
class ClassPartition:
    M: int
    classes: Tuple[Tuple[int, ...], ...]
    tau: float
    lambda_sep: float
    keys: Dict[int, int]

    def nonempty(self) -> List[Tuple[int, ...]]:
        return [c for c in self.classes if c]


def class_params(n: int, beta: float, alpha: float) -> Tuple[float, float, int]:
    """(tau, Lambda, M) with ``tau = 2 beta n``, ``Lambda = 2 tau^(2/alpha)``."""
    tau = 2 * beta * n
    lam = 2 * tau ** (2 / alpha)
    M = math.ceil(math.log2(2 * lam))
    return tau, lam, M


def well_separated_classes(L: Sequence[int], inst: Instance) -> ClassPartition:
    L = list(L)
    tau, lam, M = class_params(max(inst.n, 1), inst.beta, inst.alpha)
    keys = length_keys(L, inst)
    classes: List[List[int]] = [[] for _ in range(M)]
    for i in L:
        classes[keys[i] % M].append(i)
    part = ClassPartition(M, tuple(tuple(c) for c in classes), tau, lam, keys)
    for c in part.classes:
        _check_well_separated(c, inst, lam)
    return part


def _check_well_separated(c: Sequence[int], inst: Instance, lam: float) -> None:
    if len(c) < 2:
        return
    ll = np.array([float(inst.log2_lengths[i]) for i in c])
    gap = np.abs(ll[:, None] - ll[None, :])
    bad = (gap >= 1) & (gap <= math.log2(lam))
    if bad.any():
        raise InvariantError("class is not well-separated")


def t_close(v: int, w: int, t: float, inst: Instance) -> bool:
    """``max(a_v(w), a_w(v)) >= t`` under mean power."""
    if not t > 0:
        raise ValidationError("t must be positive")
    LA = inst.log2_affectance_matrix(PowerAssignment.mean(inst.alpha))
    return bool(max(LA[v, w], LA[w, v]) >= math.log2(t))


def h_separation(inst: Instance) -> float:
    """Sender separation factor used by rule (a) of the H graph."""
    return z1(2 ** (1 + inst.alpha / 2) * inst.beta, inst.fading)


def build_H(S: Sequence[int], inst: Instance, partition: ClassPartition) -> LinkGraph:
    """Conflict graph of one well-separated class.

    Same length band: adjacent iff sender distance ``<= z * d_band``.
    Different bands: adjacent iff ``1/tau``-close under mean power.
    """
    S = list(S)
    if not S:
        return LinkGraph((), {}, "H")
    z = h_separation(inst)
    keys = np.array([partition.keys[i] for i in S])
    same_band = keys[:, None] == keys[None, :]
    # minimum length per band, in whichever scale the precision path compares
    scale = inst.log2_lengths if inst.precision == "log2" else inst.lengths
    band_min = {}
    for i, k in zip(S, keys):
        band_min[k] = min(band_min.get(k, math.inf), float(scale[i]))
    if inst.precision == "log2":
        radius = np.array([math.log2(z) + band_min[k] for k in keys])
        near = senders_closer_than(S, inst, radius, strict=False)
    else:
        dband = np.array([band_min[k] for k in keys])
        near = sender_distances(S, inst) <= z * dband[:, None]
    rule_a = same_band & near
    LA = inst.log2_affectance_matrix(PowerAssignment.mean(inst.alpha))[np.ix_(S, S)]
    close = np.maximum(LA, LA.T) >= -math.log2(partition.tau)
    rule_b = ~same_band & close
    return _pairs_to_graph(S, rule_a | rule_b, "H")


def max_feasible_subset_size(V: Sequence[int], feasibility_test: Callable[[Sequence[int]], bool]) -> int:
    """Largest ``X`` within ``V`` with ``feasibility_test(X)``; exhaustive, hereditary pruning."""
    V = list(V)
    m = len(V)
    if m > MAX_NEIGHBORHOOD:
        raise OracleScaleError(f"neighbourhood of size {m} exceeds {MAX_NEIGHBORHOOD}")
    ok = bytearray(1 << m)
    ok[0] = 1
    best = 0
    for mask in range(1, 1 << m):
        low = mask & -mask
        if not ok[mask ^ low]:
            continue
        # every one-smaller subset must be feasible for a hereditary property
        rest = mask ^ low
        good = True
        while rest:
            b = rest & -rest
            if not ok[mask ^ b]:
                good = False
                break
            rest ^= b
        if not good:
            continue
        members = [V[i] for i in range(m) if mask >> i & 1]
        if feasibility_test(members):
            ok[mask] = 1
            best = max(best, len(members))
    return best


def measured_inductiveness(
    G: LinkGraph, order: Sequence[int], feasibility_test: Callable[[Sequence[int]], bool]
) -> int:
    """Smallest k for which ``order`` witnesses k-pi-inductiveness of ``G``."""
    order = list(order)
    if sorted(order) != sorted(G.nodes):
        raise ValidationError("order must be a permutation of the graph's nodes")
    pos = {v: i for i, v in enumerate(order)}
    k = 0
    for i, v in enumerate(order):
        hood = [v] + sorted((u for u in G.adj[v] if pos[u] > i), key=pos.__getitem__)
        k = max(k, max_feasible_subset_size(hood, feasibility_test))
    return k


def nondecreasing_length_order(S: Sequence[int], inst: Instance) -> List[int]:
    return sorted(S, key=lambda i: (float(inst.log2_lengths[i]), inst.links[i].id))
