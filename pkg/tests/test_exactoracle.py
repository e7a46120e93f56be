import itertools

import numpy as np
import pytest

from sinrsched.errors import OracleScaleError, ValidationError
from sinrsched.exactoracle import (
    POWER_CONTROL,
    OracleBudget,
    feasible_subsets,
    independence_number,
    opt_capacity,
    opt_schedule,
    opt_weighted_capacity,
)
from sinrsched.instancegen import gen_random
from sinrsched.linkgraphs import LinkGraph
from sinrsched.sinrcore import PowerAssignment, is_sinr_feasible, pc_feasible

UNIFORM = PowerAssignment.uniform()


def restricted_growth_strings(n):
    """Every set partition of range(n), once each."""
    def rec(prefix, top):
        if len(prefix) == n:
            yield prefix
            return
        for b in range(top + 2):
            yield from rec(prefix + [b], max(top, b))

    if n == 0:
        yield []
        return
    yield from rec([0], 0)


def brute_schedule(n, feasible):
    best = None
    for rgs in restricted_growth_strings(n):
        k = max(rgs) + 1
        if best is not None and k >= best:
            continue
        blocks = [[i for i in range(n) if rgs[i] == b] for b in range(k)]
        if all(feasible(B) for B in blocks):
            best = k
    return best


def brute_capacity(n, feasible, weight=lambda S: len(S)):
    return max(weight(S) for r in range(n + 1) for S in itertools.combinations(range(n), r) if feasible(list(S)))


def test_bell_numbers():
    assert [sum(1 for _ in restricted_growth_strings(n)) for n in range(7)] == [1, 1, 2, 5, 15, 52, 203]


def test_small_subsets_feasible(line):
    inst = line([(0, 1), (1, 0), (0, 1)], beta=1.5)
    for feas in (UNIFORM, POWER_CONTROL):
        table = feasible_subsets(range(3), feas, inst)
        assert table.table[0] and table.table[1] and table.table[2] and table.table[4]
    # all-colocated triple: nothing beyond singletons
    table = feasible_subsets(range(3), UNIFORM, inst)
    assert sorted(table.feasible_masks()) == [0, 1, 2, 4]


def test_capacity_edge_cases(line):
    inst = line([(0, 1)])
    assert opt_capacity([], UNIFORM, inst) == []
    far = line([(i * 1e6, i * 1e6 + 1) for i in range(5)])
    assert opt_capacity(range(5), UNIFORM, far) == [0, 1, 2, 3, 4]
    assert opt_schedule(range(5), UNIFORM, far)[0] == 1
    clash = line([(0, 1), (1, 0), (0, 1), (1, 0)], beta=1.5)
    assert opt_schedule(range(4), UNIFORM, clash)[0] == 4
    assert opt_schedule([], UNIFORM, clash) == (0, [])


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("feas", ["uniform", "mean", "pc"])
def test_oracles_match_brute_force(seed, feas):
    inst = gen_random(7, 12.0, 1.0, 4.0, seed, weights=True)
    if feas == "pc":
        F, test = POWER_CONTROL, lambda S: pc_feasible(S, inst)
    else:
        F = PowerAssignment.parse(feas, inst.alpha)
        test = lambda S: is_sinr_feasible(S, F, inst)
    L = list(range(7))
    assert len(opt_capacity(L, F, inst)) == brute_capacity(7, test)
    w = lambda S: sum(inst.links[i].weight for i in S)
    assert w(opt_weighted_capacity(L, F, inst)) == pytest.approx(brute_capacity(7, test, w))
    count, parts = opt_schedule(L, F, inst)
    assert count == brute_schedule(7, test)
    assert sorted(v for p in parts for v in p) == L
    assert all(test(p) for p in parts)


def test_capacity_tie_break_smallest_mask(line):
    inst = line([(0, 1), (1, 0), (50, 51)])
    assert opt_capacity(range(3), UNIFORM, inst) == [0, 2]


def test_budget(monkeypatch, line):
    inst = line([(10 * i, 10 * i + 1) for i in range(6)])
    with pytest.raises(OracleScaleError):
        opt_capacity(range(6), UNIFORM, inst, OracleBudget(max_links=5))
    monkeypatch.setenv("SINRSCHED_ORACLE_MAX", "3")
    assert OracleBudget.from_env().max_links == 3
    monkeypatch.setenv("SINRSCHED_ORACLE_MAX", "many")
    with pytest.raises(ValidationError):
        OracleBudget.from_env()
    with pytest.raises(ValidationError):
        OracleBudget(max_links=40)


def test_pc_boundary_count(line):
    # symmetric pair with radius exactly beta * 0.25 = 1
    inst = line([(0, 1), (3, 2)], beta=4.0)
    table = feasible_subsets(range(2), POWER_CONTROL, inst)
    assert table.boundary == 1
    assert not table.table[3]


def test_independence_number():
    path = LinkGraph.from_edges(range(5), [(i, i + 1) for i in range(4)])
    assert independence_number(path) == 3
    cycle = LinkGraph.from_edges(range(7), [(i, (i + 1) % 7) for i in range(7)])
    assert independence_number(cycle) == 3
    assert independence_number(cycle, within=[0, 1, 2]) == 2
    rng = np.random.default_rng(5)
    for _ in range(20):
        edges = [(u, v) for u, v in itertools.combinations(range(9), 2) if rng.random() < 0.4]
        G = LinkGraph.from_edges(range(9), edges)
        brute = max(r for r in range(10) for S in itertools.combinations(range(9), r) if G.is_independent(S))
        assert independence_number(G) == brute
