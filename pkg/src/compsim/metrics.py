"""Per-user SINR, Shannon rate, transmission delay, and fairness metrics.

SINR on a PRB counts the user's cooperating BSs as signal and every other
BS active on that PRB as interference; rate is the per-PRB Shannon rate;
delay is file size over rate.  Jain's index is computed over the scheduled
edge users of one drop.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import ChannelState
from .power import PowerAllocation
from .scheduling import ClusterAssignment


@dataclass(frozen=True)
class UserMetrics:
    user_id: int
    sinr: float  # linear
    rate_bps: float
    delay_s: float


@dataclass(frozen=True)
class MetricsReport:
    per_user: tuple[UserMetrics, ...]
    sum_edge_throughput_bps: float
    mean_edge_throughput_bps: float
    jain_index: float

    def rates(self) -> np.ndarray:
        return np.array([u.rate_bps for u in self.per_user])

    def delays(self) -> np.ndarray:
        return np.array([u.delay_s for u in self.per_user])


def sinr(
    assignment: ClusterAssignment,
    power: PowerAllocation,
    channel: ChannelState,
    b: int,
    user: int,
) -> float:
    """Linear SINR of `user` scheduled on PRB `b`."""
    entry = None
    for su in assignment.per_prb.get(b, []):
        if su.user_id == user:
            entry = su
            break
    if entry is None:
        raise LookupError(f"user {user} is not scheduled on PRB {b}")
    P = power.per_prb_per_bs[b, :]
    received = P * channel.gain[:, user]
    cbs = np.fromiter(entry.cbs, dtype=int)
    signal = received[cbs].sum()
    interference = received.sum() - signal
    return float(signal / (interference + channel.noise_power))


def rate(sinr_linear: float, bandwidth_hz: float, n_prb: int) -> float:
    """Per-PRB Shannon rate (B / R) * log2(1 + sinr) in bit/s."""
    if sinr_linear < 0:
        raise ValueError(f"sinr must be >= 0, got {sinr_linear}")
    return bandwidth_hz / n_prb * math.log2(1.0 + sinr_linear)


def delay(rate_bps: float, file_size_bits: float) -> float:
    """Transmission delay in seconds; infinite (not an error) at zero rate."""
    if rate_bps < 0:
        raise ValueError(f"rate_bps must be >= 0, got {rate_bps}")
    if file_size_bits <= 0:
        raise ValueError(f"file_size_bits must be > 0, got {file_size_bits}")
    if rate_bps == 0:
        return math.inf
    return file_size_bits / rate_bps


def jain(rates) -> float:
    """Jain's fairness index (sum r)^2 / (K * sum r^2), in (0, 1]."""
    r = np.asarray(rates, dtype=float)
    if r.size == 0:
        raise ValueError("rates must be nonempty")
    if np.any(r < 0):
        raise ValueError("rates must be nonnegative")
    total_sq = float(np.sum(r * r))
    if total_sq == 0:
        raise ValueError("at least one rate must be positive")
    return float(np.sum(r)) ** 2 / (r.size * total_sq)


def compute_report(
    assignment: ClusterAssignment,
    power: PowerAllocation,
    channel: ChannelState,
    file_size_bits: float,
) -> MetricsReport:
    """Metrics over every scheduled edge user of one drop."""
    rows = []
    for prb, su in assignment.entries():
        s = sinr(assignment, power, channel, prb, su.user_id)
        r = rate(s, channel.bandwidth_hz, channel.n_prb)
        rows.append(UserMetrics(su.user_id, s, r, delay(r, file_size_bits)))
    rows.sort(key=lambda u: u.user_id)
    rates = np.array([u.rate_bps for u in rows])
    return MetricsReport(
        per_user=tuple(rows),
        sum_edge_throughput_bps=float(rates.sum()),
        mean_edge_throughput_bps=float(rates.mean()) if len(rows) else 0.0,
        jain_index=jain(rates) if len(rows) else float("nan"),
    )


CSV_HEADER = "user_id,sinr_linear,rate_bps,delay_s"


def report_rows(report: MetricsReport) -> list[str]:
    return [
        f"{u.user_id},{u.sinr:.12g},{u.rate_bps:.12g},{u.delay_s:.12g}"
        for u in report.per_user
    ]


def report_to_csv(report: MetricsReport, path) -> None:
    Path(path).write_text("\n".join([CSV_HEADER, *report_rows(report)]) + "\n")


def report_to_json(report: MetricsReport, path=None) -> dict:
    doc = {
        "per_user": [
            {
                "user_id": u.user_id,
                "sinr_linear": u.sinr,
                "rate_bps": u.rate_bps,
                "delay_s": u.delay_s,
            }
            for u in report.per_user
        ],
        "sum_edge_throughput_bps": report.sum_edge_throughput_bps,
        "mean_edge_throughput_bps": report.mean_edge_throughput_bps,
        "jain_index": report.jain_index,
    }
    if path is not None:
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")
    return doc
