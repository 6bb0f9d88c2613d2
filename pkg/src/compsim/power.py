"""Bargaining-based power control.

Users are typed high/low against an RSRP threshold and weighted 2/1.  For
two clusters sharing a PRB the transmit powers follow the closed-form
bargaining solution: same-type pairs transmit at the power cap, while in a
mixed pair the cluster serving the low-type user backs off to
sigma^2 / (n * g_cross), the stationary point of the log product utility.
With one cluster (or three or more) per PRB the product utility is
monotone in every power, so each BS transmits at its per-PRB budget.

An exhaustive grid search over the feasible power box acts as the
independent check on the closed form and is kept free of any shared logic
with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import ChannelState
from .config import watts_to_dbm
from .scheduling import ClusterAssignment

LN2 = math.log(2.0)


class InfeasiblePowerError(ValueError):
    """The C2 floor p0/g exceeds the power cap for some user."""


@dataclass(frozen=True)
class UserType:
    kind: str  # "high" | "low"
    weight: float


HIGH = UserType("high", 2.0)
LOW = UserType("low", 1.0)


def classify_user(rsrp: float, rho0: float) -> UserType:
    """High-type iff RSRP strictly exceeds rho0 (boundary counts as low)."""
    if rho0 <= 0:
        raise ValueError(f"rho0 must be > 0, got {rho0}")
    return HIGH if rsrp > rho0 else LOW


def utility_T(sinr: float, rate_bps: float, file_size_bits: float) -> float:
    """Delay-aware utility sinr * exp(1 / delay) with delay = file size / rate."""
    if sinr < 0:
        raise ValueError(f"sinr must be >= 0, got {sinr}")
    if rate_bps <= 0:
        raise ValueError(f"rate_bps must be > 0, got {rate_bps}")
    if file_size_bits <= 0:
        raise ValueError(f"file_size_bits must be > 0, got {file_size_bits}")
    return sinr * math.exp(rate_bps / file_size_bits)


def utility_T_shannon(
    sinr: float, bandwidth_hz: float, n_prb: int, file_size_bits: float
) -> float:
    """Same utility with the Shannon rate substituted in closed form:
    sinr * (1 + sinr) ** (B / (R * file_size_bits * ln 2))."""
    if sinr < 0:
        raise ValueError(f"sinr must be >= 0, got {sinr}")
    exponent = bandwidth_hz / (n_prb * file_size_bits * LN2)
    return sinr * (1.0 + sinr) ** exponent


@dataclass(frozen=True)
class TwoUserInstance:
    """Two clusters of n BSs each, serving one user apiece on a shared PRB.

    g1, g2 are the serving-link gains of user 1 and user 2; g3 is the
    cross gain from cluster 2 onto user 1 and g4 from cluster 1 onto
    user 2.  Every BS in a cluster transmits at that cluster's power.
    """

    n: int
    g1: float
    g2: float
    g3: float
    g4: float
    sigma2: float
    p_max: float
    p0: float
    types: tuple[UserType, UserType]
    bandwidth_hz: float = 3e6
    n_prb: int = 15
    file_size_bits: float = 100 * 2**20 * 8

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        for name in ("g1", "g2", "g3", "g4", "sigma2", "p_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.p0 < 0:
            raise ValueError(f"p0 must be >= 0, got {self.p0}")

    @property
    def weights(self) -> tuple[float, float]:
        return self.types[0].weight, self.types[1].weight

    @property
    def power_floor(self) -> tuple[float, float]:
        """Lowest powers honoring the decodability floor on the serving links."""
        return self.p0 / self.g1, self.p0 / self.g2

    def sinrs(self, p1, p2):
        g1 = self.n * p1 * self.g1 / (self.n * p2 * self.g3 + self.sigma2)
        g2 = self.n * p2 * self.g2 / (self.n * p1 * self.g4 + self.sigma2)
        return g1, g2


def f1_value(inst: TwoUserInstance, p1, p2):
    """Product objective gamma1^w1 * gamma2^w2 (delay factor dropped)."""
    w1, w2 = inst.weights
    gamma1, gamma2 = inst.sinrs(p1, p2)
    return gamma1**w1 * gamma2**w2


def u1_value(inst: TwoUserInstance, p1, p2):
    """Full delay-aware product objective T1^w1 * T2^w2."""
    w1, w2 = inst.weights
    gamma1, gamma2 = inst.sinrs(p1, p2)
    exponent = inst.bandwidth_hz / (inst.n_prb * inst.file_size_bits * LN2)
    t1 = gamma1 * (1.0 + gamma1) ** exponent
    t2 = gamma2 * (1.0 + gamma2) ** exponent
    return t1**w1 * t2**w2


def f2_value(inst: TwoUserInstance, p1: float, p2: float) -> float:
    """Natural log of the product objective."""
    w1, w2 = inst.weights
    gamma1, gamma2 = inst.sinrs(p1, p2)
    return w1 * math.log(gamma1) + w2 * math.log(gamma2)


def f2_gradient(inst: TwoUserInstance, p1: float, p2: float) -> tuple[float, float]:
    """Analytic partials of the log objective with respect to p1 and p2."""
    w1, w2 = inst.weights
    n = inst.n
    d1 = w1 / p1 - n * inst.g4 * w2 / (n * p1 * inst.g4 + inst.sigma2)
    d2 = w2 / p2 - n * inst.g3 * w1 / (n * p2 * inst.g3 + inst.sigma2)
    return d1, d2


@dataclass(frozen=True)
class HessianReport:
    A: float  # d2F2/dp1^2
    C: float  # d2F2/dp2^2 (the cross term B is identically zero)
    det_ok: bool  # A*C > 0
    a_neg: bool  # A < 0


def hessian_conditions(inst: TwoUserInstance, p1: float, p2: float) -> HessianReport:
    if p1 <= 0 or p2 <= 0:
        raise ValueError("powers must be positive")
    w1, w2 = inst.weights
    n = inst.n
    A = -w1 / p1**2 + n**2 * inst.g4**2 * w2 / (n * p1 * inst.g4 + inst.sigma2) ** 2
    C = w1 * n**2 * inst.g3**2 / (n * p2 * inst.g3 + inst.sigma2) ** 2 - w2 / p2**2
    return HessianReport(A=A, C=C, det_ok=A * C > 0, a_neg=A < 0)


def _clamp(value: float, lo: float, hi: float, label: str, events: list[str]) -> float:
    if value < lo:
        events.append(f"{label} clamped up to C2 floor")
        return lo
    if value > hi:
        events.append(f"{label} clamped down to p_max")
        return hi
    return value


def two_user_nbs_power(inst: TwoUserInstance) -> tuple[float, float, str]:
    """Closed-form bargaining powers for a two-cluster PRB.

    Returns (p1, p2, case label); clamp events against the [p0/g, p_max]
    box are appended to the label.
    """
    lo1, lo2 = inst.power_floor
    if lo1 > inst.p_max:
        raise InfeasiblePowerError(
            f"user 1: power floor p0/g1 = {lo1:.3e} W exceeds p_max = {inst.p_max:.3e} W"
        )
    if lo2 > inst.p_max:
        raise InfeasiblePowerError(
            f"user 2: power floor p0/g2 = {lo2:.3e} W exceeds p_max = {inst.p_max:.3e} W"
        )

    kind1, kind2 = inst.types[0].kind, inst.types[1].kind
    events: list[str] = []
    if kind1 == kind2:
        case = "same-type"
        p1, p2 = inst.p_max, inst.p_max
    elif kind1 == "high":
        case = "high-low"
        p1 = inst.p_max
        p2 = _clamp(inst.sigma2 / (inst.n * inst.g3), lo2, inst.p_max, "p2", events)
    else:
        case = "low-high"
        p1 = _clamp(inst.sigma2 / (inst.n * inst.g4), lo1, inst.p_max, "p1", events)
        p2 = inst.p_max
    if events:
        case = case + " (" + "; ".join(events) + ")"
    return p1, p2, case


def grid_oracle(
    inst: TwoUserInstance, grid: int = 200, objective: str = "F1"
) -> tuple[float, float, float]:
    """Exhaustive argmax of the chosen objective on a uniform grid over the
    feasible power box.  Ties resolve to the lowest (p1, p2) indices.

    Kept independent of the closed form: nothing here inspects user types
    beyond their weights.
    """
    if grid < 10:
        raise ValueError(f"grid must be >= 10, got {grid}")
    if objective not in ("F1", "U1"):
        raise ValueError(f"objective must be 'F1' or 'U1', got {objective!r}")
    lo1, lo2 = inst.power_floor
    p1s = np.linspace(lo1, inst.p_max, grid)
    p2s = np.linspace(lo2, inst.p_max, grid)
    fn = f1_value if objective == "F1" else u1_value
    values = fn(inst, p1s[:, None], p2s[None, :])
    flat = int(np.argmax(values))
    i1, i2 = divmod(flat, grid)
    return float(p1s[i1]), float(p2s[i2]), float(values[i1, i2])


@dataclass
class PowerAllocation:
    """Per-PRB, per-BS transmit power in watts; [n_prb, n_bs]."""

    per_prb_per_bs: np.ndarray
    case_labels: list[str]

    def total_per_bs(self) -> np.ndarray:
        return self.per_prb_per_bs.sum(axis=0)

    def active_count_per_bs(self) -> np.ndarray:
        return (self.per_prb_per_bs > 0).sum(axis=0)


def multi_user_power(
    assignment: ClusterAssignment,
    channel: ChannelState,
    types: dict[int, UserType] | None,
    p_max: float,
) -> PowerAllocation:
    """Max-power rule: every BS in a cluster transmits at its per-PRB budget,
    the budget being p_max split equally across the PRBs it is active on.

    `types` is accepted for interface parity with the bargaining path; the
    max-power rule does not depend on it.
    """
    del types
    alloc = np.zeros((channel.n_prb, channel.n_bs))
    active = assignment.active_prbs_by_bs()
    for bs, prbs in active.items():
        share = p_max / len(prbs)
        for prb in prbs:
            alloc[prb, bs] = share
    return PowerAllocation(alloc, case_labels=[])


def nbs_allocation(
    assignment: ClusterAssignment,
    channel: ChannelState,
    types: dict[int, UserType],
    p_max: float,
    p0: float,
    file_size_bits: float,
) -> PowerAllocation:
    """Bargaining power control over a cluster assignment.

    PRBs carrying exactly two clusters get the closed-form two-user powers
    (cluster-aggregate gains, n = smaller cluster size); PRBs with one or
    three-plus clusters fall back to the monotone max-power rule.
    """
    alloc = np.zeros((channel.n_prb, channel.n_bs))
    labels: list[str] = []
    active = assignment.active_prbs_by_bs()
    cap = {bs: p_max / len(prbs) for bs, prbs in active.items()}

    for prb in sorted(assignment.per_prb):
        users = assignment.per_prb[prb]
        if len(users) == 2:
            a, b = users
            inst = _instance_from_clusters(a, b, channel, types, cap, p0, file_size_bits)
            p1, p2, case = two_user_nbs_power(inst)
            labels.append(f"prb {prb}: {case}")
            for bs in a.cbs:
                alloc[prb, bs] = min(p1, cap[bs])
            for bs in b.cbs:
                alloc[prb, bs] = min(p2, cap[bs])
        else:
            for su in users:
                for bs in su.cbs:
                    alloc[prb, bs] = cap[bs]
            labels.append(f"prb {prb}: max-power ({len(users)} clusters)")
    return PowerAllocation(alloc, case_labels=labels)


def _instance_from_clusters(a, b, channel, types, cap, p0, file_size_bits):
    bs1 = sorted(a.cbs)
    bs2 = sorted(b.cbs)
    g1 = float(np.mean(channel.gain[bs1, a.user_id]))
    g2 = float(np.mean(channel.gain[bs2, b.user_id]))
    g3 = float(np.mean(channel.gain[bs2, a.user_id]))
    g4 = float(np.mean(channel.gain[bs1, b.user_id]))
    p_cap = min(min(cap[bs] for bs in bs1), min(cap[bs] for bs in bs2))
    return TwoUserInstance(
        n=min(len(bs1), len(bs2)),
        g1=g1,
        g2=g2,
        g3=g3,
        g4=g4,
        sigma2=channel.noise_power,
        p_max=p_cap,
        p0=p0,
        types=(types[a.user_id], types[b.user_id]),
        bandwidth_hz=channel.bandwidth_hz,
        n_prb=channel.n_prb,
        file_size_bits=file_size_bits,
    )


def background_fill(alloc: PowerAllocation, channel: ChannelState, p_max: float) -> PowerAllocation:
    """Full-buffer background load under frequency reuse 1.

    BSs that serve no scheduled edge user on any PRB still carry their own
    cells' interior traffic, so they transmit on every PRB with the budget
    split across all of them.  They never join a cooperating set; the SINR
    denominator picks them up as interference.  Cluster powers are left
    untouched.
    """
    filled = alloc.per_prb_per_bs.copy()
    idle = np.flatnonzero(alloc.total_per_bs() == 0)
    filled[:, idle] = p_max / channel.n_prb
    return PowerAllocation(filled, case_labels=list(alloc.case_labels))


def multi_user_log_utility(powers, serving_gains, weights, interference_plus_noise):
    """Log product utility of a many-cluster PRB in the per-cluster view.

    serving_gains is [n_users, n_bs] with zeros outside each user's
    cooperating set; each user's interference-plus-noise is held fixed, so
    the value is sum_i w_i * ln(sum_j P_j g_ij / D_i) -- monotone increasing
    in every active power, which is what justifies the max-power rule.
    """
    powers = np.asarray(powers, dtype=float)
    serving_gains = np.asarray(serving_gains, dtype=float)
    signal = serving_gains @ powers
    return float(np.sum(np.asarray(weights) * np.log(signal / np.asarray(interference_plus_noise))))


def check_power_constraints(
    alloc: PowerAllocation,
    assignment: ClusterAssignment,
    channel: ChannelState,
    p_max: float,
    p0: float,
    rtol: float = 1e-9,
) -> list[str]:
    """Violations of nonnegativity, the per-BS power budget, and the serving
    RSRP floor; empty when the allocation is feasible."""
    problems = []
    P = alloc.per_prb_per_bs
    if np.any(P < 0):
        problems.append("negative power entry")
    totals = P.sum(axis=0)
    over = np.flatnonzero(totals > p_max * (1 + rtol))
    for bs in over:
        problems.append(f"BS {bs}: total power {totals[bs]:.4e} W exceeds budget {p_max:.4e} W")
    for prb, su in assignment.entries():
        for bs in su.cbs:
            received = P[prb, bs] * channel.gain[bs, su.user_id]
            if received < p0 * (1 - rtol):
                problems.append(
                    f"PRB {prb}, BS {bs} -> user {su.user_id}: received "
                    f"{watts_to_dbm(received):.1f} dBm below floor {watts_to_dbm(p0):.1f} dBm"
                )
    return problems


def power_to_csv(alloc: PowerAllocation, path) -> None:
    """Write active (prb, bs_id, watts, dBm) rows."""
    lines = ["prb,bs_id,watts,dbm"]
    P = alloc.per_prb_per_bs
    for prb, bs in zip(*np.nonzero(P)):
        watts = P[prb, bs]
        lines.append(f"{prb},{bs},{watts:.12g},{float(watts_to_dbm(watts)):.6f}")
    Path(path).write_text("\n".join(lines) + "\n")
