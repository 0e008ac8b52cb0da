import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from hapsopt import noma
from hapsopt.oracles import allocation_grid, max_servable, qos_lp_feasible

coef = st.lists(st.floats(1e-3, 10.0), min_size=1, max_size=6).map(lambda xs: np.sort(xs)[::-1])
omegas = st.floats(0.0, 2.0)


def test_two_user_example():
    a = noma.allocate([0.1, 0.05], 1.0)
    assert a.regime == "feasible"
    np.testing.assert_allclose(a.fractions, [0.55, 0.45])
    assert a.rate == pytest.approx(1 + math.log2(10))
    r = noma.rate(noma.sinr(a.fractions, [0.1, 0.05]))
    np.testing.assert_allclose(r, [1.0, math.log2(10)])


def test_two_user_example_matches_grid_search():
    best, alpha = allocation_grid([0.1, 0.05], 1.0)
    assert best == pytest.approx(1 + math.log2(10), abs=1e-12)
    np.testing.assert_allclose(alpha, [0.55, 0.45], atol=1e-12)


def test_zero_threshold_gives_everything_to_strongest():
    a = noma.allocate([0.9, 0.4, 0.2], 0.0)
    np.testing.assert_allclose(a.fractions, [0, 0, 1])
    assert a.rate == pytest.approx(math.log2(1 + 1 / 0.2))


def test_single_unservable_user_takes_full_budget():
    A, om = [2.0], 1.0  # (2^1 - 1) * 2 > 1
    a = noma.allocate(A, om)
    assert (a.regime, a.cutoff) == ("partial", 1)
    np.testing.assert_allclose(a.fractions, [1.0])
    assert a.rate == pytest.approx(math.log2(1.5))


def test_only_strongest_user_servable():
    A, om = np.array([50.0, 5.0, 0.5]), 1.0
    a = noma.allocate(A, om)
    assert a.cutoff == 2
    alpha_3 = (2**om - 1) * A[2]
    np.testing.assert_allclose(a.fractions, [0.0, 1 - alpha_3, alpha_3])
    assert a.rate == pytest.approx(om + math.log2(1 + (1 - alpha_3) / (alpha_3 + A[1])))
    # the leftover user gets the most it can while user 3 keeps its threshold
    grid = np.linspace(0, 1 - alpha_3, 2001)
    rates = [noma.rate(noma.sinr([0, x, 1 - x], A))[1] for x in grid]
    assert rates[-1] == pytest.approx(max(rates))


def test_unsorted_input_rejected():
    with pytest.raises(ValueError, match="sorted"):
        noma.sinr([0.5, 0.5], [0.1, 0.2])


def test_feasible_allocator_refuses_infeasible_cell():
    with pytest.raises(ValueError):
        noma.allocate_feasible([5.0, 4.0], 2.0)
    with pytest.raises(ValueError):
        noma.allocate_partial([0.01, 0.001], 0.1)


@given(coef, omegas)
def test_feasible_split_meets_qos_and_spends_budget(A, om):
    assume(noma.is_feasible(A, om))
    a = noma.allocate_feasible(A, om)
    r = noma.rate(noma.sinr(a.fractions, A))
    assert np.all(r >= om * (1 - 1e-9) - 1e-12)
    assert a.fractions.sum() == pytest.approx(1.0, abs=1e-9)
    assert a.rate == pytest.approx(r.sum(), rel=1e-9)


@given(coef, omegas)
def test_partial_split_serves_strongest_suffix(A, om):
    assume(not noma.is_feasible(A, om))
    for rule in ("threshold", "optimal"):
        a = noma.allocate_partial(A, om, rule)
        r = noma.rate(noma.sinr(a.fractions, A))
        met = r >= om * (1 - noma.QOS_RTOL)
        assert np.all(met[a.cutoff:])
        assert met.sum() == len(A) - a.cutoff or a.cutoff == len(A)
        assert a.fractions.sum() == pytest.approx(1.0, abs=1e-9)
        assert a.rate == pytest.approx(r.sum(), rel=1e-9)


@given(coef, omegas)
def test_optimal_partial_rule_never_worse(A, om):
    assume(not noma.is_feasible(A, om))
    assert noma.allocate_partial(A, om, "optimal").rate >= noma.allocate_partial(A, om).rate - 1e-12


@given(coef, omegas, st.floats(0.0, 1.0))
def test_raising_threshold_never_serves_more_users(A, om, extra):
    assert noma.allocate(A, om + extra).qos_users <= noma.allocate(A, om).qos_users


@given(coef, omegas)
def test_feasibility_agrees_with_linear_program(A, om):
    assert noma.is_feasible(A, om) == qos_lp_feasible(A, om)


@given(st.lists(st.floats(1e-2, 10.0), min_size=1, max_size=3).map(lambda xs: np.sort(xs)[::-1]), omegas)
def test_served_count_is_best_possible(A, om):
    assert noma.allocate(A, om).qos_users == max_servable(A, om)


def test_min_powers_recursion():
    A, om = np.array([0.3, 0.2, 0.1]), 0.5
    c = 2**om - 1
    a3 = c * A[2]
    a2 = c * (a3 + A[1])
    a1 = c * (a2 + a3 + A[0])
    np.testing.assert_allclose(noma.min_powers(A, om), [a1, a2, a3])


def test_equal_power_and_network_report():
    cells = [np.array([0.4, 0.1]), np.array([0.2])]
    allocs = [noma.equal_power(2), noma.equal_power(1)]
    rep = noma.evaluate_network(cells, allocs, 2.0, omega_bps=0.5)
    expect0 = 2 * np.log2(1 + np.array([0.5 / 0.9, 0.5 / 0.1]))
    np.testing.assert_allclose(rep.user_rates[0], expect0)
    assert rep.total == pytest.approx(expect0.sum() + 2 * math.log2(6))
    assert [f.tolist() for f in rep.qos_met] == [[True, True], [True]]


def test_network_shape_errors():
    with pytest.raises(ValueError):
        noma.evaluate_network([np.array([0.1])], [], 1.0)
    with pytest.raises(ValueError):
        noma.evaluate_network([np.array([0.1])], [np.array([0.5, 0.5])], 1.0)
