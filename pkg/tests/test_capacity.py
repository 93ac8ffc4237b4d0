import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from icap import capacity, matlib, regimes
from icap.capacity import Formula
from icap.channel import ChannelInstance
from icap.errors import ConstraintViolation, DimensionError, NotZIC, ShapeMismatch, SingularBarrier
from icap.verify import load_fixture, random_noisy_zic

from .strategies import cmatrix, psd, seeds

LOG2 = math.log(2.0)


def _scalar(a, b, P1=1.0, P2=1.0):
    return ChannelInstance([[1.0]], [[math.sqrt(a)]], [[math.sqrt(b)]], [[1.0]], [[P1]], [[P2]])


# ------------------------------------------------------------------ rates

@given(st.floats(0.0, 50.0), st.floats(0.0, 10.0))
def test_scalar_rates(P, g):
    assert capacity.single_user_rate([[math.sqrt(g)]], [[P]]) == pytest.approx(math.log1p(g * P), abs=1e-12)


@given(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0.01, 5))
def test_tin_rate_scalar(P1, P2, a):
    v = capacity.tin_rate([[1.0]], [[P1]], [[math.sqrt(a)]], [[P2]])
    assert v == pytest.approx(math.log1p(P1 / (1 + a * P2)), rel=1e-12)


@given(cmatrix(3, 2), psd(2), cmatrix(3, 2), psd(2))
def test_chain_rule_mac(H1, S1, H2, S2):
    # log|I + H1 S1 H1^H + H2 S2 H2^H| = log|I + H2 S2 H2^H| + TIN rate of user 1
    mac = capacity.mac_sum_rate(H1, S1, H2, S2)
    split = capacity.single_user_rate(H2, S2) + capacity.tin_rate(H1, S1, H2, S2)
    assert mac == pytest.approx(split, rel=1e-10, abs=1e-10)
    assert capacity.tin_rate(H1, S1, H2, S2) <= capacity.single_user_rate(H1, S1) + 1e-10


def test_rate_shape_checks():
    with pytest.raises(ShapeMismatch):
        capacity.single_user_rate(np.eye(2), np.eye(3))


# ---------------------------------------------------------------- regions

def test_example1_rectangle():
    inst = load_fixture("ex1")
    region = capacity.very_strong_region(inst)
    assert region.proven
    assert region.components["R1max"] == pytest.approx(1.3863, abs=1e-3)
    assert len(region.vertices) == 4


def test_example2_pentagon():
    inst = load_fixture("ex2")
    region = capacity.aligned_strong_region(inst, regimes.check_aligned_strong(inst, inst.offsets))
    assert region.proven
    assert region.components["R1max"] == pytest.approx(1.6770, abs=1e-3)
    assert region.components["R2max"] == pytest.approx(1.8636, abs=1e-3)
    c = min(region.components["sum_rx1"], region.components["sum_rx2"])
    assert c == pytest.approx(3.2812, abs=1e-3)
    assert len(region.vertices) == 5


@given(st.floats(0, 5), st.floats(0, 5), st.floats(0, 12))
def test_region_vertices_are_feasible_and_extreme(a, b, c):
    region = capacity.region_from_limits(a, b, c)
    for v in region.vertices:
        assert region.contains(*v)
    # the region's support in the sum direction is attained at a vertex
    best = max(x + y for x, y in region.vertices)
    assert best == pytest.approx(min(c, a + b), abs=1e-12)
    assert region.vertices[0] == (0.0, 0.0)


def test_region_bits_scaling_and_unproven_tag():
    inst = _scalar(0.5, 0.5)
    region = capacity.very_strong_region(inst)
    assert not region.proven
    bits = region.scaled(1 / LOG2)
    assert bits.components["R1max"] == pytest.approx(1.0, abs=1e-12)


# ----------------------------------------------------------- sum capacity

def test_example3_sum():
    res = capacity.noisy_sum_capacity(load_fixture("ex3"))
    assert res.formula is Formula.ZIC_NOISY_SUM and res.proven
    assert res.value == pytest.approx(5.6622, abs=1e-3)


def test_example4_sum_and_beamforming():
    inst = load_fixture("ex4")
    res = capacity.noisy_sum_capacity(inst)
    assert res.proven
    assert res.value == pytest.approx(7.7171, abs=1e-3)
    g1 = np.array([[1.2133], [-0.0181], [1.5899]])
    g2 = np.array([[0.5673], [-1.4460], [1.1345]])
    assert capacity.tin_sum_rate(inst, g1 @ g1.T, g2 @ g2.T) == pytest.approx(9.9162, abs=1e-3)


def test_example5_sum():
    res = capacity.noisy_sum_capacity(load_fixture("ex5"))
    assert res.value == pytest.approx(5.9541, abs=1e-3)


def test_unproven_result_is_tagged():
    res = capacity.noisy_sum_capacity(_scalar(2.0, 2.0))
    assert not res.proven
    assert "tag" in res.to_mapping()
    assert res.to_mapping("bits")["value_bits"] == pytest.approx(res.value / LOG2)


@given(st.floats(0.01, 0.99), st.floats(0.1, 5), st.floats(0.1, 5))
def test_zic_swap_gives_same_sum(a, P1, P2):
    inst = _scalar(a, 0.0, P1, P2)
    v1 = capacity.noisy_sum_capacity(inst).value
    v2 = capacity.noisy_sum_capacity(inst.swap_users()).value
    assert v1 == pytest.approx(v2, rel=1e-12)
    assert v1 == pytest.approx(math.log1p(P1 / (1 + a * P2)) + math.log1p(P2), rel=1e-12)


@given(st.floats(1.5, 8), st.floats(0.01, 0.5), st.floats(0.1, 2.0), st.floats(0.1, 2.0))
def test_mixed_sum_is_min_of_branches(b, a, P1, P2):
    inst = _scalar(a, b, P1, P2)
    res = capacity.mixed_sum_capacity(inst)
    assert res.proven
    assert res.value == pytest.approx(min(res.branches.values()), rel=1e-12)
    assert res.value <= capacity.single_user_sum(inst).value + 1e-12


@given(st.floats(1e-3, 0.2), st.floats(1e-3, 0.2), st.floats(0.1, 2.0), st.floats(0.1, 2.0))
def test_noisy_sum_below_interference_free(a, b, P1, P2):
    inst = _scalar(a, b, P1, P2)
    assert capacity.noisy_sum_capacity(inst).value <= capacity.single_user_sum(inst).value + 1e-12


# ------------------------------------------------------------ waterfilling

@given(cmatrix(), st.floats(0.01, 20.0))
def test_waterfill_kkt(H, P):
    sol = capacity.waterfill_solution(H, P)
    assert np.trace(sol.covariance).real == pytest.approx(P, rel=1e-10)
    active = sol.powers > 0
    levels = sol.powers[active] + 1 / sol.gains[active]
    assert np.ptp(levels) <= 1e-9 * max(1.0, sol.level)
    assert np.all(1 / sol.gains[~active] >= sol.level - 1e-9)
    assert matlib.loewner_leq(np.zeros_like(sol.covariance), sol.covariance)


@given(cmatrix(), st.floats(0.01, 20.0), seeds)
def test_waterfill_beats_random_feasible(H, P, seed):
    rng = np.random.default_rng(seed)
    best = capacity.single_user_rate(H, capacity.waterfill(H, P))
    X = rng.standard_normal((H.shape[1],) * 2) + 1j * rng.standard_normal((H.shape[1],) * 2)
    S = X @ X.conj().T
    S *= P / np.trace(S).real
    assert capacity.single_user_rate(H, S) <= best + 1e-10


def test_waterfill_rejects_negative_power():
    with pytest.raises(ConstraintViolation):
        capacity.waterfill(np.eye(2), -1.0)


def test_parallel_waterfill_example5():
    inst = load_fixture("ex5_power")
    sol = capacity.parallel_tin_waterfill(inst, *inst.power)
    assert sol.converged
    assert np.allclose(np.diag(sol.S1).real, [2.0922, 3.3021, 2.6057], atol=1e-3)
    assert sol.value == pytest.approx(6.1066, abs=1e-3)


def test_parallel_waterfill_needs_diagonal():
    with pytest.raises(DimensionError):
        capacity.parallel_tin_waterfill(load_fixture("ex4"), 1.0, 1.0)


# ------------------------------------------------------------------ bound

def test_bound_equals_sum_capacity_at_witness():
    rng = np.random.default_rng(7)
    for _ in range(10):
        inst = random_noisy_zic(rng)
        v = regimes.check_noisy_zic(inst)
        assert v.satisfied
        obj = capacity.bound_objective(v.witness.A.conj().T, inst.S1, inst.S2, inst)
        assert obj == pytest.approx(capacity.noisy_sum_capacity(inst, v).value, abs=1e-9)


def test_bound_domain_errors():
    inst = _scalar(0.5, 0.0)
    with pytest.raises(SingularBarrier):
        capacity.bound_objective([[1.0]], inst.S1, inst.S2, inst)
    with pytest.raises(ConstraintViolation):
        capacity.bound_objective([[0.1]], [[2.0]], inst.S2, inst)
    with pytest.raises(ShapeMismatch):
        capacity.bound_objective(np.zeros((2, 2)), inst.S1, inst.S2, inst)


def test_bound_gradients_match_finite_differences():
    rng = np.random.default_rng(3)
    inst = random_noisy_zic(rng)
    r1, r2 = inst.H1.shape[0], inst.H4.shape[0]
    A = 0.3 * (rng.standard_normal((r2, r1)) + 1j * rng.standard_normal((r2, r1))) / np.sqrt(r1 * r2)
    S1h, S2h = 0.5 * inst.S1, 0.5 * inst.S2
    val, g1, g2, gA = capacity._bound_value_grads(A, S1h, S2h, inst)
    assert val == pytest.approx(capacity.bound_objective(A, S1h, S2h, inst), abs=1e-12)
    h = 1e-6
    dA = rng.standard_normal(A.shape) + 1j * rng.standard_normal(A.shape)
    fd = (capacity.bound_objective(A + h * dA, S1h, S2h, inst)
          - capacity.bound_objective(A - h * dA, S1h, S2h, inst)) / (2 * h)
    assert fd == pytest.approx(np.real(np.vdot(gA, dA)), rel=1e-5, abs=1e-7)
    d2 = 0.1 * inst.S2
    fd2 = (capacity.bound_objective(A, S1h, S2h + h * d2, inst)
           - capacity.bound_objective(A, S1h, S2h - h * d2, inst)) / (2 * h)
    assert fd2 == pytest.approx(np.real(np.vdot(g2, d2)), rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("a, P1, P2", [(0.3, 1.0, 2.0), (0.8, 4.0, 0.5)])
def test_heuristic_scalar_closed_form(a, P1, P2):
    est = capacity.bound_minimax_heuristic(_scalar(a, 0.0, P1, P2))
    assert not est.certified
    assert est.value == pytest.approx(math.log1p(P1 / (1 + a * P2)) + math.log1p(P2), abs=1e-3)


def test_heuristic_is_deterministic():
    inst = _scalar(0.4, 0.0, 1.0, 1.0)
    a = capacity.bound_minimax_heuristic(inst, budget=5)
    b = capacity.bound_minimax_heuristic(inst, budget=5)
    assert a.value == b.value


def test_heuristic_needs_one_sided():
    with pytest.raises(NotZIC):
        capacity.bound_minimax_heuristic(_scalar(0.4, 0.4))
