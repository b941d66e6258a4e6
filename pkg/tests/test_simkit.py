"""Monte-Carlo cross-checks: jump-chain and slot-level simulators."""

import numpy as np
import pytest

from cellwlan.dcf import (backoff_preset, frame_exchange_times,
                          mac_phy_preset)
from cellwlan.multicell import MulticellInput, solve_fixed_point
from cellwlan.simkit import simulate_ctmc, simulate_slotted, slots_for
from cellwlan.topology import enumerate_independent_sets, graph_from_edges

MP = mac_phy_preset("dot11b-11mbps", 8000.0)
BO = backoff_preset("dot11b-11mbps")


def chain():
    return graph_from_edges([1, 2, 3], [(1, 2), (2, 3)])


def chain_solution(n=10):
    inp = MulticellInput(graph=chain(), node_counts=(n, n, n), mac_phy=MP,
                         backoff=BO)
    return solve_fixed_point(inp)


def test_slots_for():
    assert slots_for(994e-6, 20e-6) == 50
    assert slots_for(13540.0 / 11.0 * 1e-6, 20e-6) == 62
    assert slots_for(20e-6, 20e-6) == 1
    assert slots_for(60e-6, 20e-6) == 3  # exact multiple, no float creep
    assert slots_for(1e-9, 20e-6) == 1
    with pytest.raises(ValueError):
        slots_for(0.0, 20e-6)
    with pytest.raises(ValueError):
        slots_for(1.0, 0.0)


def test_ctmc_is_deterministic_per_seed():
    sol = chain_solution()
    lam = sol.activation_rates
    mu = 1.0 / sol.mean_activities
    a = simulate_ctmc(sol.state_space, lam, mu, transitions=20_000, seed=9)
    b = simulate_ctmc(sol.state_space, lam, mu, transitions=20_000, seed=9)
    np.testing.assert_array_equal(a.holding_time, b.holding_time)
    np.testing.assert_array_equal(a.empirical_pi, b.empirical_pi)
    c = simulate_ctmc(sol.state_space, lam, mu, transitions=20_000, seed=10)
    assert not np.array_equal(a.holding_time, c.holding_time)


def test_ctmc_occupancy_matches_product_form():
    sol = chain_solution()
    lam = sol.activation_rates
    mu = 1.0 / sol.mean_activities
    run = simulate_ctmc(sol.state_space, lam, mu, transitions=200_000, seed=1)
    tv = 0.5 * np.abs(run.empirical_pi - sol.pi).sum()
    assert tv <= 0.01
    assert run.empirical_x == pytest.approx(sol.x, abs=0.01)
    # the x estimate is exactly the blocked-mass complement of pi-hat
    np.testing.assert_allclose(
        run.empirical_x,
        run.empirical_pi @ (~sol.state_space.blocked_mask), rtol=1e-12)


def test_ctmc_validation():
    sol = chain_solution()
    ss = sol.state_space
    with pytest.raises(ValueError):
        simulate_ctmc(ss, [1.0, 1.0], [1.0, 1.0, 1.0], transitions=10)
    with pytest.raises(ValueError):
        simulate_ctmc(ss, [1.0, 1.0, 1.0], [1.0, 0.0, 1.0], transitions=10)
    iso = enumerate_independent_sets(graph_from_edges([1], []))
    with pytest.raises(ValueError):
        simulate_ctmc(iso, [0.0], [1.0], transitions=10)  # absorbing


def test_slotted_counters_are_consistent():
    sol = chain_solution()
    run = simulate_slotted(chain(), (10, 10, 10), sol.beta, 62, 50,
                           horizon_slots=50_000, seed=4,
                           slot_time=MP.slot_time)
    horizon = run.horizon_slots
    total = run.active_slots + run.blocked_slots + run.backoff_slots
    np.testing.assert_array_equal(total, horizon)
    # estimator identities over the raw counters
    np.testing.assert_allclose(
        run.empirical_beta, run.tagged_attempts / run.backoff_slots,
        rtol=1e-12)
    np.testing.assert_allclose(
        run.empirical_gamma,
        run.tagged_collisions / np.maximum(run.tagged_attempts, 1),
        rtol=1e-12)
    np.testing.assert_allclose(
        run.empirical_x, 1.0 - run.blocked_slots / horizon, rtol=1e-12)
    np.testing.assert_allclose(
        run.throughput_pkts,
        run.successes / (horizon * MP.slot_time), rtol=1e-12)
    # every solitary tagged success is also a cell success
    solo = run.tagged_attempts - run.tagged_collisions
    assert np.all(solo <= run.successes)
    assert np.all(run.tagged_collisions <= run.tagged_attempts)


def test_slotted_is_deterministic_per_seed():
    sol = chain_solution()
    a = simulate_slotted(chain(), (10, 10, 10), sol.beta, 62, 50, 30_000,
                         seed=5)
    b = simulate_slotted(chain(), (10, 10, 10), sol.beta, 62, 50, 30_000,
                         seed=5)
    np.testing.assert_array_equal(a.tagged_attempts, b.tagged_attempts)
    np.testing.assert_array_equal(a.successes, b.successes)
    c = simulate_slotted(chain(), (10, 10, 10), sol.beta, 62, 50, 30_000,
                         seed=6)
    assert not np.array_equal(a.backoff_slots, c.backoff_slots)


def test_slotted_blocking_matches_analytic_x():
    sol = chain_solution()
    run = simulate_slotted(chain(), (10, 10, 10), sol.beta, 62, 50,
                           horizon_slots=300_000, seed=1)
    np.testing.assert_allclose(run.empirical_x, sol.x, atol=0.02)


def test_slotted_collision_reduction_single_cell():
    # one isolated cell: a tagged attempt collides exactly when one of the
    # n-1 cellmates attempts in the same slot
    iso = graph_from_edges([1], [])
    run = simulate_slotted(iso, (5,), [0.2], 10, 5, horizon_slots=300_000,
                           seed=1)
    want = 1.0 - 0.8 ** 4
    assert run.empirical_gamma[0] == pytest.approx(want, abs=0.01)
    assert run.blocked_slots[0] == 0
    assert run.empirical_x[0] == 1.0


def test_slotted_two_cell_exclusion():
    # two dependent cells can never be active in the same slot; with one
    # node each there are no intra-cell collisions, only cross-cell ones
    g = graph_from_edges([1, 2], [(1, 2)])
    run = simulate_slotted(g, (1, 1), [0.3, 0.3], 8, 4,
                           horizon_slots=100_000, seed=2)
    assert np.all(run.active_slots + run.blocked_slots
                  + run.backoff_slots == 100_000)
    # blocked time exists on both sides and successes happen
    assert run.blocked_slots.min() > 0
    assert run.successes.min() > 0


def test_slotted_validation():
    with pytest.raises(ValueError):
        simulate_slotted(chain(), (10, 10), [0.1, 0.1, 0.1], 10, 5, 100)
    with pytest.raises(ValueError):
        simulate_slotted(chain(), (10, 10, 10), [0.1, 1.5, 0.1], 10, 5, 100)
    with pytest.raises(ValueError):
        simulate_slotted(chain(), (10, 10, 10), [0.1, 0.1, 0.1], 0, 5, 100)


def test_slotted_throughput_only_with_slot_time():
    sol = chain_solution()
    run = simulate_slotted(chain(), (10, 10, 10), sol.beta, 62, 50, 10_000,
                           seed=1)
    assert run.throughput_pkts is None
