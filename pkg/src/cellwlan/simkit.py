"""Stochastic cross-checks for the analytic model.

Two simulators live here.  ``simulate_ctmc`` runs the continuous-time
jump chain over the independent sets directly, with the analytic
activation and deactivation rates; its empirical occupancy should match
the product-form law.  ``simulate_slotted`` drops a level: cells attempt
per slot with given per-node probabilities, attempts in the same slot
collide, and busy periods hold the channel for integer numbers of slots.
Its counters give empirical attempt, collision and blocking statistics
that the analytic fixed point must reproduce.

Both use a counter-based generator (Philox) so runs replay exactly from
a seed, with draws taken in fixed-size chunks.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .topology import ContentionGraph, StateSpace

_CHUNK = 1 << 16


@dataclass
class CtmcRun:
    """Empirical occupancy of a simulated activation/deactivation chain."""

    seed: int
    transitions: int
    holding_time: np.ndarray      # per state, simulated seconds
    empirical_pi: np.ndarray
    empirical_x: np.ndarray       # per cell: active-or-contending fraction


def simulate_ctmc(state_space: StateSpace, activation_rates, deactivation_rates,
                  transitions: int = 10_000_000, seed: int = 1) -> CtmcRun:
    """Simulate the jump chain over feasible states.

    From state A, each contending cell i activates at rate lam_i and each
    active cell deactivates at rate mu_i.  Holding times are sampled, so
    the occupancy estimate is a genuine trajectory average.
    """
    lam = np.asarray(activation_rates, dtype=float)
    mu = np.asarray(deactivation_rates, dtype=float)
    n_states = len(state_space)
    if lam.shape != (len(state_space.cells),) or mu.shape != lam.shape:
        raise ValueError("need one activation and one deactivation rate per cell")
    if np.any(lam < 0) or np.any(mu <= 0):
        raise ValueError("rates must be lam >= 0, mu > 0")

    # Per-state transition tables: cumulative rates for sampling, target
    # state indices, and the inverse total rate for holding times.
    cums: list[list[float]] = []
    targets: list[list[int]] = []
    inv_rate: list[float] = []
    for s, members in enumerate(state_space.states):
        row_c, row_t, acc = [], [], 0.0
        for j, c in enumerate(state_space.cells):
            if state_space.contending_mask[s, j] and lam[j] > 0.0:
                acc += lam[j]
                row_c.append(acc)
                row_t.append(state_space.index_of(members + (c,)))
        for c in members:
            acc += mu[state_space.cell_column(c)]
            row_c.append(acc)
            row_t.append(state_space.index_of(tuple(m for m in members if m != c)))
        if not row_c:
            raise ValueError("absorbing state; no transitions available")
        cums.append(row_c)
        targets.append(row_t)
        inv_rate.append(1.0 / acc)

    rng = np.random.Generator(np.random.Philox(seed))
    hold = [0.0] * n_states
    s = 0  # empty state
    done = 0
    while done < transitions:
        k = min(_CHUNK, transitions - done)
        us = rng.random(k)
        es = rng.standard_exponential(k)
        for t in range(k):
            row = cums[s]
            hold[s] += es[t] * inv_rate[s]
            j = bisect_right(row, us[t] * row[-1])
            s = targets[s][min(j, len(row) - 1)]
        done += k

    holding = np.asarray(hold)
    pi_hat = holding / holding.sum()
    x_hat = pi_hat @ (~state_space.blocked_mask)
    return CtmcRun(seed=seed, transitions=transitions, holding_time=holding,
                   empirical_pi=pi_hat, empirical_x=x_hat)


def slots_for(duration: float, slot_time: float) -> int:
    """Duration as a whole number of slots, rounded up, at least 1."""
    if duration <= 0 or slot_time <= 0:
        raise ValueError("duration and slot_time must be > 0")
    return max(1, math.ceil(duration / slot_time - 1e-12))


@dataclass
class SlottedRun:
    """Counter set from a slot-level simulation.

    One tagged node per cell measures attempt/collision statistics
    (``tagged_attempts``, ``tagged_collisions``); ``backoff_slots`` counts
    the slots in which the cell was contending, so tagged_attempts /
    backoff_slots estimates the per-slot attempt probability.  Cell-level
    ``successes`` count delivered frames.
    """

    seed: int
    horizon_slots: int
    cells: tuple[int, ...]
    backoff_slots: np.ndarray
    blocked_slots: np.ndarray
    active_slots: np.ndarray
    tagged_attempts: np.ndarray
    tagged_collisions: np.ndarray
    successes: np.ndarray
    empirical_beta: np.ndarray
    empirical_gamma: np.ndarray
    empirical_x: np.ndarray
    throughput_pkts: np.ndarray | None  # None when no slot_time was given


def simulate_slotted(graph: ContentionGraph, node_counts, beta,
                     t_success_slots: int, t_collision_slots: int,
                     horizon_slots: int, seed: int = 1,
                     slot_time: float | None = None) -> SlottedRun:
    """Slot-synchronous simulation of coupled cells.

    Per slot, every node of every contending cell attempts independently
    with its cell's per-node probability.  A cell with at least one
    attempt seizes the channel for the next ``t_success_slots`` slots if
    the attempt was solitary (no cellmate, no attempt in any contending
    neighbor), else for ``t_collision_slots``.  Attempts only collide
    within their own slot; a cell neighboring an active cell is blocked
    and spends no backoff.  Holds start the slot after the attempt.
    """
    n_cells = graph.size
    n = [int(m) for m in node_counts]
    b = [float(x) for x in beta]
    if len(n) != n_cells or len(b) != n_cells:
        raise ValueError("need node_count and beta per cell")
    if min(n) < 1 or min(b) < 0 or max(b) > 1:
        raise ValueError("need node counts >= 1 and beta in [0, 1]")
    if t_success_slots < 1 or t_collision_slots < 1:
        raise ValueError("hold durations must be >= 1 slot")

    cols = {c: j for j, c in enumerate(graph.cells)}
    nbrs = [sorted(cols[x] for x in graph.neighbors(c)) for c in graph.cells]

    # inverse CDF of the number of attempting cellmates, Binomial(n-1, beta)
    other_cum: list[list[float]] = []
    for j in range(n_cells):
        m = n[j] - 1
        pmf = [math.comb(m, k) * b[j] ** k * (1.0 - b[j]) ** (m - k)
               for k in range(m + 1)]
        cum, acc = [], 0.0
        for p in pmf:
            acc += p
            cum.append(acc)
        cum[-1] = 1.0
        other_cum.append(cum)

    hold = [0] * n_cells
    backoff = [0] * n_cells
    blocked = [0] * n_cells
    active = [0] * n_cells
    a_tag = [0] * n_cells
    c_tag = [0] * n_cells
    succ = [0] * n_cells

    rng = np.random.Generator(np.random.Philox(seed))
    attempts = [0] * n_cells   # attempters this slot, contending cells only
    done = 0
    while done < horizon_slots:
        k = min(_CHUNK, horizon_slots - done)
        us = rng.random((k, 2 * n_cells))
        for t in range(k):
            row = us[t]
            contending = []
            for j in range(n_cells):
                if hold[j] > 0:
                    active[j] += 1
                    attempts[j] = 0
                elif any(hold[q] > 0 for q in nbrs[j]):
                    blocked[j] += 1
                    attempts[j] = 0
                else:
                    contending.append(j)
                    backoff[j] += 1
                    tagged = row[2 * j] < b[j]
                    others = bisect_right(other_cum[j], row[2 * j + 1])
                    attempts[j] = others + (1 if tagged else 0)
                    if tagged:
                        a_tag[j] += 1
            # resolve every attempt against the same slot snapshot: only
            # contending cells have nonzero attempts, so the clash check
            # is symmetric regardless of processing order
            new_holds = []
            for j in contending:
                m = attempts[j]
                if m == 0:
                    continue
                clash = any(attempts[q] > 0 for q in nbrs[j])
                if m == 1 and not clash:
                    succ[j] += 1
                    new_holds.append((j, t_success_slots))
                else:
                    new_holds.append((j, t_collision_slots))
                if row[2 * j] < b[j] and (m > 1 or clash):
                    c_tag[j] += 1
            for j, h in new_holds:
                hold[j] = h + 1  # +1: decremented below, occupancy starts next slot
            for j in range(n_cells):
                if hold[j] > 0:
                    hold[j] -= 1
        done += k

    backoff_a = np.asarray(backoff, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        beta_hat = np.where(backoff_a > 0, np.asarray(a_tag) / backoff_a, np.nan)
        gamma_hat = np.where(np.asarray(a_tag) > 0,
                             np.asarray(c_tag) / np.maximum(a_tag, 1), np.nan)
    x_hat = 1.0 - np.asarray(blocked, dtype=float) / horizon_slots
    thpt = None
    if slot_time is not None:
        thpt = np.asarray(succ, dtype=float) / (horizon_slots * slot_time)
    return SlottedRun(
        seed=seed, horizon_slots=horizon_slots, cells=graph.cells,
        backoff_slots=np.asarray(backoff), blocked_slots=np.asarray(blocked),
        active_slots=np.asarray(active),
        tagged_attempts=np.asarray(a_tag), tagged_collisions=np.asarray(c_tag),
        successes=np.asarray(succ),
        empirical_beta=beta_hat, empirical_gamma=gamma_hat, empirical_x=x_hat,
        throughput_pkts=thpt)
