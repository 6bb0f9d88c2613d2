"""Scenario orchestration: seeded Monte-Carlo drops and parameter sweeps.

Every drop is deterministic given (seed, drop_index), and all algorithm
arms evaluated at the same sweep point share drop seeds, hence topologies,
so differences between arms are attributable to the algorithm alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrics, power, scheduling
from .channel import ChannelState, compute_channel
from .config import ConfigurationError, ScenarioConfig
from .metrics import MetricsReport
from .power import PowerAllocation, UserType, classify_user
from .scheduling import ClusterAssignment, EdgeUserSet
from .topology import Topology, build_topology

SWEEP_AXES = ("cluster_size", "cell_radius", "damping")
_AXIS_FIELD = {
    "cluster_size": "cluster_size",
    "cell_radius": "cell_radius_m",
    "damping": "damping",
}


@dataclass(frozen=True)
class DropResult:
    topology: Topology
    channel: ChannelState
    edge: EdgeUserSet
    assignment: ClusterAssignment
    power: PowerAllocation
    report: MetricsReport


@dataclass(frozen=True)
class SweepPoint:
    x_value: float
    mean_edge_throughput_bps: float
    # transmission delay of the mean-rate edge user (file size over mean
    # throughput), the convention used by the delay comparisons; per-user
    # delays live in the per-drop MetricsReports
    mean_delay_s: float
    jain: float
    stderr: float


@dataclass(frozen=True)
class SweepResult:
    axis: str
    algorithm: str
    points: tuple[SweepPoint, ...]


def drop_seed(config: ScenarioConfig, drop_index: int) -> int:
    """Stable 64-bit topology seed for one drop; independent of algorithm."""
    ss = np.random.SeedSequence([int(config.seed), int(drop_index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def user_types(edge: EdgeUserSet, rho0_w: float) -> dict[int, UserType]:
    return {u.user_id: classify_user(u.rsrp_best, rho0_w) for u in edge.users}


def run_drop_full(config: ScenarioConfig, drop_index: int) -> DropResult:
    """One end-to-end drop: topology, channel, edge selection, clustering,
    power control, metrics."""
    topo_config = config.replace(seed=drop_seed(config, drop_index))
    topology = build_topology(topo_config)
    channel = compute_channel(
        topology,
        antenna_gain_db=config.antenna_gain_db,
        bandwidth_hz=config.bandwidth_hz,
        n_prb=config.n_prb,
        noise_psd_dbm_hz=config.noise_psd_dbm_hz,
    )
    edge = scheduling.select_edge_users(
        channel,
        topology,
        margin_db=config.edge_margin_db,
        per_cell=config.edge_users_per_cell,
    )

    if config.algorithm == "ap_comp":
        assignment = scheduling.form_clusters(
            channel,
            edge,
            p0=config.p0_w,
            lam=config.damping,
            max_iterations=config.ap_max_iterations,
            stability_window=config.ap_stability_window,
        )
        alloc = power.nbs_allocation(
            assignment,
            channel,
            types=user_types(edge, config.rho0_w),
            p_max=config.max_power_w,
            p0=config.p0_w,
            file_size_bits=config.file_size_bits,
        )
    else:
        size = config.cluster_size if config.algorithm == "common_comp" else 1
        assignment = scheduling.fixed_size_clusters(channel, edge, size)
        alloc = power.multi_user_power(
            assignment,
            channel,
            types=user_types(edge, config.rho0_w),
            p_max=config.max_power_w,
        )

    if config.background_load:
        alloc = power.background_fill(alloc, channel, config.max_power_w)

    report = metrics.compute_report(assignment, alloc, channel, config.file_size_bits)
    return DropResult(topology, channel, edge, assignment, alloc, report)


def run_drop(config: ScenarioConfig, drop_index: int) -> MetricsReport:
    return run_drop_full(config, drop_index).report


def run_scenario(config: ScenarioConfig) -> list[MetricsReport]:
    """All drops of one scenario, in drop-index order."""
    reports = []
    for i in range(config.n_drops):
        try:
            reports.append(run_drop(config, i))
        except Exception as exc:
            raise RuntimeError(f"drop {i} of scenario failed: {exc}") from exc
    return reports


def aggregate(reports: list[MetricsReport], file_size_bits: float):
    """(mean throughput, mean delay, mean jain, stderr of throughput).

    The delay is the file transmission time at the mean edge throughput,
    so the delay ordering across algorithm arms is the inverse of their
    throughput ordering by construction.
    """
    throughputs = np.array([r.mean_edge_throughput_bps for r in reports])
    jains = np.array([r.jain_index for r in reports])
    stderr = (
        float(np.std(throughputs, ddof=1) / np.sqrt(len(throughputs)))
        if len(throughputs) > 1
        else 0.0
    )
    mean_thr = float(throughputs.mean())
    mean_delay = file_size_bits / mean_thr if mean_thr > 0 else float("inf")
    return mean_thr, mean_delay, float(jains.mean()), stderr


def run_sweep(config: ScenarioConfig, axis: str, values) -> SweepResult:
    """Run `config.n_drops` drops of `config.algorithm` at each axis value."""
    if axis not in SWEEP_AXES:
        raise ConfigurationError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    if len(values) == 0:
        raise ConfigurationError("sweep needs at least one value")
    field = _AXIS_FIELD[axis]
    points = []
    for x in sorted(values):
        coerced = int(x) if field == "cluster_size" else float(x)
        point_config = config.replace(**{field: coerced})
        try:
            reports = run_scenario(point_config)
        except RuntimeError as exc:
            raise RuntimeError(f"sweep {axis}={x}: {exc}") from exc
        thr, dly, jn, stderr = aggregate(reports, point_config.file_size_bits)
        points.append(SweepPoint(float(x), thr, dly, jn, stderr))
    return SweepResult(axis=axis, algorithm=config.algorithm, points=tuple(points))


SWEEP_CSV_HEADER = "axis,x,algorithm,mean_throughput_bps,mean_delay_s,jain,stderr,n_drops"


def sweeps_to_csv(results: list[SweepResult], n_drops: int, path) -> None:
    lines = [SWEEP_CSV_HEADER]
    for res in results:
        for p in res.points:
            lines.append(
                f"{res.axis},{p.x_value:g},{res.algorithm},"
                f"{p.mean_edge_throughput_bps:.12g},{p.mean_delay_s:.12g},"
                f"{p.jain:.12g},{p.stderr:.12g},{n_drops}"
            )
    Path(path).write_text("\n".join(lines) + "\n")
