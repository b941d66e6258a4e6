"""Single-cell saturated CSMA/CA model: backoff, attempts, frame timing.

Everything here is per-cell and ignores other cells; the multi-cell
machinery layers coupling on top.  Internally all quantities are SI
(seconds, bits, bits per second).  The attempt probability of a saturated
node is tied to its collision probability through the mean backoff drawn
after each of the allowed retransmission attempts; the cell-level slot
structure (idle / success / collision) then gives saturation throughput.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np


class ConvergenceError(Exception):
    """Raised when a damped fixed-point iteration fails to settle."""


@dataclass(frozen=True)
class MacPhyParams:
    """Timing and rate parameters of the MAC/PHY.

    ``overhead_time`` is the fixed per-frame airtime (PHY preamble and
    header plus MAC header) added to every frame before its body bits are
    clocked out at ``data_rate`` (or ``control_rate`` for control frames).
    """

    slot_time: float
    sifs: float
    difs: float
    overhead_time: float
    data_rate: float
    control_rate: float
    payload_bits: float
    ack_bits: float = 112.0
    access_mode: str = "basic"  # "basic" | "rts-cts"
    rts_bits: float = 160.0
    cts_bits: float = 112.0

    def __post_init__(self) -> None:
        if self.access_mode not in ("basic", "rts-cts"):
            raise ValueError(f"unknown access_mode {self.access_mode!r}")
        if min(self.slot_time, self.data_rate, self.control_rate) <= 0:
            raise ValueError("slot_time and rates must be > 0")
        if min(self.sifs, self.difs, self.overhead_time, self.payload_bits,
               self.ack_bits, self.rts_bits, self.cts_bits) < 0:
            raise ValueError("times and sizes must be >= 0")

    def with_payload(self, payload_bits: float) -> "MacPhyParams":
        return dataclasses.replace(self, payload_bits=float(payload_bits))


@dataclass(frozen=True)
class BackoffParams:
    """Retry limit and the mean backoff (in slots) after each attempt."""

    retry_limit: int
    mean_backoffs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.mean_backoffs) != self.retry_limit + 1:
            raise ValueError("need retry_limit + 1 mean backoffs")
        if any(b < 0 for b in self.mean_backoffs):
            raise ValueError("mean backoffs must be >= 0")


def mean_backoffs(cw_min: int, cw_max: int, retry_limit: int) -> BackoffParams:
    """Mean backoffs for binary exponential backoff with a window ceiling.

    After the k-th collision the window is min(2^k * cw_min, cw_max) slots
    and the drawn backoff is uniform on {0, ..., window - 1}, so its mean
    is (window - 1) / 2.
    """
    if cw_min < 1 or cw_max < cw_min or retry_limit < 0:
        raise ValueError("need 1 <= cw_min <= cw_max and retry_limit >= 0")
    bs = tuple((min((2**k) * cw_min, cw_max) - 1) / 2
               for k in range(retry_limit + 1))
    return BackoffParams(retry_limit=retry_limit, mean_backoffs=bs)


def attempt_probability(gamma: float, backoff: BackoffParams) -> float:
    """Per-slot attempt probability of a saturated node, given its
    collision probability.

    Renewal ratio: attempts per packet over mean backoff slots per packet,
    each weighted by the chance gamma^k of reaching attempt k.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma = {gamma} outside [0, 1]")
    weights = np.power(gamma, np.arange(backoff.retry_limit + 1))
    denom = float(np.dot(weights, backoff.mean_backoffs))
    if denom <= 0.0:
        raise ValueError("all reachable mean backoffs are zero; "
                         "attempt probability undefined")
    return float(weights.sum()) / denom


def frame_exchange_times(p: MacPhyParams) -> tuple[float, float]:
    """Durations (t_success, t_collision) of one channel activity burst.

    Basic access: success is DATA + SIFS + ACK + DIFS, collision is DATA +
    DIFS.  RTS/CTS: success is the four-frame exchange, collision costs
    only the RTS + DIFS.
    """
    t_data = p.overhead_time + p.payload_bits / p.data_rate
    t_ack = p.overhead_time + p.ack_bits / p.control_rate
    if p.access_mode == "basic":
        t_success = t_data + p.sifs + t_ack + p.difs
        t_collision = t_data + p.difs
    else:
        t_rts = p.overhead_time + p.rts_bits / p.control_rate
        t_cts = p.overhead_time + p.cts_bits / p.control_rate
        t_success = t_rts + p.sifs + t_cts + p.sifs + t_data + p.sifs + t_ack + p.difs
        t_collision = t_rts + p.difs
    return t_success, t_collision


@dataclass(frozen=True)
class SingleCellSolution:
    """Converged operating point of one isolated saturated cell.

    ``slot_fractions`` is (idle, success, collision) per virtual slot;
    ``throughput_pkts`` is delivered packets per second for the whole cell.
    """

    node_count: int
    beta: float
    gamma: float
    throughput_pkts: float
    slot_fractions: tuple[float, float, float]
    iterations: int
    residual: float


def _slot_fractions(beta: float, n: int) -> tuple[float, float, float]:
    p_idle = (1.0 - beta) ** n
    p_succ = n * beta * (1.0 - beta) ** (n - 1)
    return p_idle, p_succ, 1.0 - p_idle - p_succ


def solve_single_cell(node_count: int, mac_phy: MacPhyParams,
                      backoff: BackoffParams, tol: float = 1e-10,
                      damping: float = 0.5, max_iterations: int = 10000) -> SingleCellSolution:
    """Solve the attempt/collision fixed point for one isolated cell.

    Damped iteration of beta <- G(1 - (1 - beta)^(n-1)); for a single node
    this reduces to beta = G(0) immediately.
    """
    n = int(node_count)
    if n < 1:
        raise ValueError("node_count must be >= 1")
    t_s, t_c = frame_exchange_times(mac_phy)
    beta = attempt_probability(0.0, backoff)  # start from 1 / b_0
    resid = np.inf
    for it in range(1, max_iterations + 1):
        gamma = 1.0 - (1.0 - beta) ** (n - 1)
        target = attempt_probability(gamma, backoff)
        resid = abs(target - beta)
        beta = (1.0 - damping) * beta + damping * target
        if resid <= tol:
            break
    else:
        raise ConvergenceError(
            f"single-cell fixed point: residual {resid:.3e} > tol {tol:.1e} "
            f"after {max_iterations} iterations")
    gamma = 1.0 - (1.0 - beta) ** (n - 1)
    p_idle, p_succ, p_coll = _slot_fractions(beta, n)
    cycle = p_idle * mac_phy.slot_time + p_succ * t_s + p_coll * t_c
    return SingleCellSolution(
        node_count=n, beta=beta, gamma=gamma,
        throughput_pkts=p_succ / cycle,
        slot_fractions=(p_idle, p_succ, p_coll),
        iterations=it, residual=resid)


# Preset: 11 Mb/s DSSS PHY with long preamble.  192 us PHY overhead plus a
# 34-byte MAC header clocked at the data rate; ACK is 14 bytes at the
# control rate.  Payload is a free knob, so the preset is a factory.
_DOT11B_11MBPS = dict(
    slot_time=20e-6, sifs=10e-6, difs=50e-6,
    overhead_time=192e-6 + 272.0 / 11e6,
    data_rate=11e6, control_rate=11e6,
    ack_bits=112.0, rts_bits=160.0, cts_bits=112.0)

_MAC_PHY_PRESETS = {"dot11b-11mbps": _DOT11B_11MBPS}
_BACKOFF_PRESETS = {"dot11b-11mbps": (32, 1024, 7), "dot11b": (32, 1024, 7)}


def mac_phy_preset(name: str, payload_bits: float,
                   access_mode: str = "basic") -> MacPhyParams:
    """Named MAC/PHY parameter set with the given payload size."""
    try:
        base = _MAC_PHY_PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown MAC/PHY preset {name!r}; "
                       f"have {sorted(_MAC_PHY_PRESETS)}") from None
    return MacPhyParams(payload_bits=float(payload_bits),
                        access_mode=access_mode, **base)


def backoff_preset(name: str) -> BackoffParams:
    """Named contention-window ladder."""
    try:
        cw_min, cw_max, k = _BACKOFF_PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown backoff preset {name!r}; "
                       f"have {sorted(_BACKOFF_PRESETS)}") from None
    return mean_backoffs(cw_min, cw_max, k)


def mac_phy_preset_names() -> tuple[str, ...]:
    return tuple(sorted(_MAC_PHY_PRESETS))
