import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sinrsched.errors import ColocationError, ValidationError
from sinrsched.instancegen import gen_random
from sinrsched.logscalar import LogScalar, log2_sum
from sinrsched.sinrcore import (
    BI,
    UNI,
    Link,
    PowerAssignment,
    affectance_pair,
    affectance_set,
    affectance_totals,
    directed_distance,
    gain_ratio_matrix,
    is_p_signal,
    is_sinr_feasible,
    max_affectance,
    pc_feasible,
    pc_radius,
)

from conftest import make_instance

UNIFORM = PowerAssignment.uniform()


def naive_affectance(inst, w, v, P):
    """Straight from coordinates, no caches or logarithms."""
    lw, lv = inst.links[w], inst.links[v]
    if inst.mode == UNI:
        d = math.dist(lw.sender, lv.receiver)
    else:
        d = min(math.dist(a, b) for a in (lw.sender, lw.receiver) for b in (lv.sender, lv.receiver))
    return P.power(lw.length) / P.power(lv.length) * (lv.length / d) ** inst.alpha


def collatz_wielandt_bounds(M, iters=2000):
    """Power iteration on ``M + I``; min/max of ``(Mx)_i / x_i`` bracket the Perron root."""
    x = np.ones(M.shape[0])
    shifted = M + np.eye(M.shape[0])
    for _ in range(iters):
        x = shifted @ x
        x /= x.max()
    ratios = (M @ x) / x
    return ratios.min(), ratios.max()


def test_directed_distance_modes():
    v = Link(0, (0, 0), (1, 0))
    w = Link(1, (5, 0), (6, 0))
    assert directed_distance(v, w, UNI) == 6
    assert directed_distance(v, w, BI) == 4
    assert directed_distance(v, w, BI) == directed_distance(w, v, BI)
    for mode in (UNI, BI):
        assert directed_distance(v, v, mode) == 1


def test_link_validation():
    with pytest.raises(ValidationError):
        Link(0, (0, 0), (0, 0))
    with pytest.raises(ValidationError):
        Link(0, (0, 0), (1, 0), weight=-1)
    with pytest.raises(ValidationError):
        Link(0, (0, 0), (1,))


def test_affectance_uniform_example(line):
    # l_v = l_w = 1, d_wv = d(s_w, r_v) = 2
    inst = line([(0, 1), (3, 4)])
    assert affectance_pair(1, 0, UNIFORM, inst) == pytest.approx(0.25, rel=1e-15)


def test_affectance_mean_example(line):
    # l_v = 1, l_w = 4, d_wv = 4
    inst = line([(0, 1), (5, 9)])
    assert affectance_pair(1, 0, PowerAssignment.mean(2), inst) == pytest.approx(0.25, rel=1e-15)


def test_affectance_decay(line):
    inst = line([(0, 1), (1 + 10**6, 2 + 10**6)])
    assert affectance_pair(1, 0, UNIFORM, inst) == pytest.approx(1e-12, rel=1e-9)


def test_affectance_colocated_raises(line):
    inst = line([(0, 1), (1, 0)])
    with pytest.raises(ColocationError):
        affectance_pair(1, 0, UNIFORM, inst)
    with pytest.raises(ColocationError):
        affectance_set([0, 1], 0, UNIFORM, inst)
    assert not is_p_signal([0, 1], UNIFORM, 1.0, inst)
    assert not is_sinr_feasible([0, 1], UNIFORM, inst)


def test_affectance_set_examples(line):
    inst = line([(0, 1), (3, 4), (-3, -2)])
    assert affectance_set([0], 0, UNIFORM, inst) == 0
    assert affectance_pair(2, 0, UNIFORM, inst) == pytest.approx(1 / 16)
    assert affectance_set([0, 1, 2], 0, UNIFORM, inst) == pytest.approx(0.25 + 1 / 16)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("mode", [UNI, BI])
def test_affectance_set_matches_pair_sum(seed, mode):
    inst = gen_random(5, 20.0, 1.0, 4.0, seed, mode=mode)
    for P in (UNIFORM, PowerAssignment.mean(inst.alpha), PowerAssignment.linear(inst.alpha)):
        for v in range(5):
            expected = math.fsum(naive_affectance(inst, w, v, P) for w in range(5) if w != v)
            assert affectance_set(range(5), v, P, inst) == pytest.approx(expected, rel=1e-12)


def test_sinr_feasible_boundaries(line):
    inst = line([(0, 1)], noise=0.0, beta=1e9)
    assert is_sinr_feasible([0], UNIFORM, inst)
    # mutual affectance exactly 1/4 and beta = 4: feasible because >= is not strict
    inst = line([(0, 1), (3, 2)], beta=4.0)
    assert affectance_pair(0, 1, UNIFORM, inst) == affectance_pair(1, 0, UNIFORM, inst) == 0.25
    assert is_sinr_feasible([0, 1], UNIFORM, inst)
    assert is_p_signal([0, 1], UNIFORM, 4.0, inst)
    assert not is_p_signal([0, 1], UNIFORM, 4.0000001, inst)
    # signal 1 / 2^2 = 0.25, noise 0.3: SNR below any beta >= 1
    inst = line([(0, 2)], noise=0.3)
    assert not is_sinr_feasible([0], UNIFORM, inst)


def test_sinr_equals_beta_signal_without_noise():
    for seed in range(10):
        inst = gen_random(6, 15.0, 1.0, 3.0, seed, beta=1.5)
        P = PowerAssignment.mean(inst.alpha)
        for mask in range(1, 64):
            S = [i for i in range(6) if mask >> i & 1]
            assert is_sinr_feasible(S, P, inst) == is_p_signal(S, P, inst.beta, inst)


def test_affectance_totals_and_max(line):
    inst = line([(0, 1), (3, 4)])
    assert list(affectance_totals([0, 1], UNIFORM, inst)) == pytest.approx([0.25, 1 / 16])
    assert max_affectance([0, 1], UNIFORM, inst) == pytest.approx(0.25)
    assert max_affectance([0], UNIFORM, inst) == 0


def test_power_control_examples(line):
    inst = line([(0, 1)])
    assert pc_feasible([0], inst)
    # symmetric pair, off-diagonal 0.25 both ways
    sym = [(0, 1), (3, 2)]
    assert pc_radius([0, 1], line(sym, beta=1.0)) == pytest.approx(0.25)
    assert pc_feasible([0, 1], line(sym, beta=3.99))
    assert not pc_feasible([0, 1], line(sym, beta=4.0))
    three = line([(0, 1), (0, 1), (1, 0)], beta=1.0)
    assert not pc_feasible([0, 1, 2], three)


@pytest.mark.parametrize("seed", range(8))
def test_spectral_radius_against_power_iteration(seed):
    inst = gen_random(6, 20.0, 1.0, 5.0, seed)
    F = gain_ratio_matrix(range(6), inst)
    # F is nonnegative with a positive off-diagonal, hence irreducible
    lo, hi = collatz_wielandt_bounds(F)
    assert hi - lo <= 1e-9 * hi
    assert lo * (1 - 1e-9) <= pc_radius(range(6), inst) <= hi * (1 + 1e-9)


def test_pc_dominates_every_fixed_power():
    # a fixed assignment that works certifies power-control feasibility
    for seed in range(20):
        inst = gen_random(5, 25.0, 1.0, 6.0, seed, beta=1.0)
        for P in (UNIFORM, PowerAssignment.mean(inst.alpha), PowerAssignment.linear(inst.alpha)):
            for mask in range(1, 32):
                S = [i for i in range(5) if mask >> i & 1]
                if is_p_signal(S, P, inst.beta, inst):
                    assert pc_radius(S, inst) <= 1 + 1e-12


def test_power_assignment_parse():
    assert PowerAssignment.parse("mean", 3) == PowerAssignment(1.5, 0)
    assert PowerAssignment.parse("psi", 3) == PowerAssignment(3, -1)
    assert PowerAssignment.parse("custom:1,2", 3) == PowerAssignment(1, 2)
    for bad in ("loud", "custom:1", "custom:a,b"):
        with pytest.raises(ValidationError):
            PowerAssignment.parse(bad, 3)
    assert PowerAssignment.linear(3).power(2.0) == 8
    assert PowerAssignment.log_power().power(8.0) == pytest.approx(3)


def test_log_power_needs_long_links(line):
    inst = line([(0, 1), (5, 9)])
    with pytest.raises(ValidationError):
        is_sinr_feasible([0, 1], PowerAssignment.log_power(), inst)


def test_instance_validation():
    with pytest.raises(ValidationError):
        make_instance([((0, 0), (1, 0))], beta=0)
    with pytest.raises(ValidationError):
        make_instance([((0, 0), (1, 0))], noise=-1)
    with pytest.raises(ValidationError):
        make_instance([((0, 0), (1, 0))], mode="tri")
    with pytest.raises(ValidationError):
        make_instance([((0.0,), (1.0,))], dim=1, precision="log2")
    with pytest.raises(ValidationError):
        make_instance([((0, 0), (1, 0))], precision="log2")


ints = st.integers(-(10**4), 10**4)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(ints, ints).filter(lambda sr: sr[0] != sr[1]), min_size=2, max_size=5))
def test_log2_precision_agrees_with_float(pairs):
    kw = dict(alpha=2.5, dim=1, C=1.0)
    fl = make_instance([((float(s),), (float(r),)) for s, r in pairs], **kw)
    lg = make_instance([((s,), (r,)) for s, r in pairs], precision="log2", **kw)
    P = PowerAssignment.mean(2.5)
    S = list(range(len(pairs)))
    a = affectance_totals(S, P, fl)
    b = affectance_totals(S, P, lg)
    for x, y in zip(a, b):
        if math.isinf(x):
            assert y == math.inf
        else:
            assert LogScalar.from_log2(y).to_float() == pytest.approx(x, rel=1e-9)
    if np.all(np.isfinite(a)):
        assert is_sinr_feasible(S, P, fl) == is_sinr_feasible(S, P, lg) or np.any(
            np.isclose(a, 1.0, rtol=1e-9)
        )
        assert pc_radius(S, lg) == pytest.approx(pc_radius(S, fl), rel=1e-6)


def test_logscalar_arithmetic():
    big = LogScalar.from_value(2**5000)
    assert big.log2mag == 5000
    assert (big * big).log2mag == 10000
    assert (big / big).to_float() == 1
    assert big.to_float() == math.inf
    assert (LogScalar.from_value(3) + LogScalar.from_value(5)).to_float() == pytest.approx(8)
    assert (LogScalar.from_value(3) - LogScalar.from_value(5)).to_float() == pytest.approx(-2)
    assert (LogScalar.from_value(3) - LogScalar.from_value(3)).sign == 0
    assert LogScalar.from_value(-2) < LogScalar.zero() < LogScalar.from_value(1e-300)
    assert log2_sum([]) == -math.inf
    assert log2_sum([10000.0, 10000.0]) == pytest.approx(10001.0)
