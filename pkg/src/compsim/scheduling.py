"""Transmission scheduling pipeline.

Edge users are detected by the best-minus-second-best RSRP margin, a
BS-by-BS similarity matrix is built from the RSRP each candidate BS would
deliver to the other BSs' edge users, affinity propagation groups the BSs
into cooperating sets, weak members are pruned against an RSRP threshold,
and the resulting clusters are laid out on PRBs so that no BS serves two
users on the same PRB.  A fixed-size strongest-RSRP baseline shares the
same PRB layout machinery.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import affinity
from .channel import ChannelState
from .config import watts_to_dbm
from .topology import Topology

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EdgeUser:
    user_id: int
    serving_bs: int
    rsrp_best: float  # watts at max transmit power
    rsrp_second: float

    @property
    def margin_db(self) -> float:
        return 10.0 * np.log10(self.rsrp_best / self.rsrp_second)


@dataclass(frozen=True)
class EdgeUserSet:
    users: tuple[EdgeUser, ...]

    def __len__(self) -> int:
        return len(self.users)

    def by_serving_bs(self) -> dict[int, list[EdgeUser]]:
        out: dict[int, list[EdgeUser]] = {}
        for u in self.users:
            out.setdefault(u.serving_bs, []).append(u)
        return out


@dataclass(frozen=True)
class ScheduledUser:
    user_id: int
    cbs: frozenset[int]  # cooperating BS ids, pairwise disjoint per PRB


@dataclass
class ClusterAssignment:
    """Per-PRB mapping of scheduled edge users to their cooperating-BS sets."""

    per_prb: dict[int, list[ScheduledUser]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    serving_below_threshold: int = 0

    def entries(self):
        """(prb, ScheduledUser) pairs in deterministic order."""
        for prb in sorted(self.per_prb):
            for su in self.per_prb[prb]:
                yield prb, su

    def scheduled_users(self) -> list[int]:
        return [su.user_id for _, su in self.entries()]

    def active_prbs_by_bs(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for prb, su in self.entries():
            for bs in su.cbs:
                out.setdefault(bs, []).append(prb)
        return out

    def validate_disjoint(self):
        for prb, users in self.per_prb.items():
            seen: set[int] = set()
            for su in users:
                overlap = seen & su.cbs
                if overlap:
                    raise ValueError(f"PRB {prb}: BSs {sorted(overlap)} serve two users")
                seen |= su.cbs


def select_edge_users(
    channel: ChannelState,
    topology: Topology,
    margin_db: float = 6.0,
    per_cell: int = 1,
) -> EdgeUserSet:
    """Users whose best and second-best RSRP differ by less than `margin_db`,
    keeping the `per_cell` most interference-dominated per cell (smallest
    margin first, lowest user id on ties)."""
    if margin_db <= 0:
        raise ValueError(f"margin_db must be > 0, got {margin_db}")
    rsrp = channel.rsrp
    if rsrp.shape[0] < 2:
        raise ValueError("edge detection needs at least two BSs")

    serving = np.argmax(rsrp, axis=0)
    order = np.sort(rsrp, axis=0)
    best = order[-1, :]
    second = order[-2, :]
    margins = 10.0 * np.log10(best / second)
    home = topology.user_home_cells()

    candidates: dict[int, list[tuple[float, int]]] = {}
    for uid in range(rsrp.shape[1]):
        if margins[uid] < margin_db:
            candidates.setdefault(int(home[uid]), []).append((float(margins[uid]), uid))

    chosen: list[EdgeUser] = []
    for cell in sorted(candidates):
        for margin, uid in sorted(candidates[cell])[:per_cell]:
            chosen.append(
                EdgeUser(
                    user_id=uid,
                    serving_bs=int(serving[uid]),
                    rsrp_best=float(best[uid]),
                    rsrp_second=float(second[uid]),
                )
            )
    chosen.sort(key=lambda u: u.user_id)
    return EdgeUserSet(tuple(chosen))


def _ap_nodes(edge: EdgeUserSet) -> tuple[list[int], list[int]]:
    """BSs participating in the AP problem and the edge user associated with
    each: a BS's user is its smallest-margin (then lowest-id) edge user."""
    node_bs: list[int] = []
    node_user: list[int] = []
    for bs, users in sorted(edge.by_serving_bs().items()):
        best = min(users, key=lambda u: (u.margin_db, u.user_id))
        node_bs.append(bs)
        node_user.append(best.user_id)
    return node_bs, node_user


def build_similarity(channel: ChannelState, edge: EdgeUserSet) -> affinity.APProblem:
    """S(m, n) = RSRP in dBm delivered by BS m to the edge user associated
    with BS n; diagonal set by the median-preference default."""
    if len(edge) == 0:
        raise ValueError("no edge users to schedule")
    node_bs, node_user = _ap_nodes(edge)
    S = watts_to_dbm(channel.rsrp[np.ix_(node_bs, node_user)])
    return affinity.APProblem(affinity.with_preference(S))


def _assign_prbs(
    clusters: list[tuple[int, frozenset[int]]],
    n_prb: int,
    warnings: list[str],
) -> dict[int, list[ScheduledUser]]:
    """Round-robin PRB layout: cluster i starts at PRB i mod n_prb and takes
    the first slot where its BS set conflicts with nothing already placed."""
    per_prb: dict[int, list[ScheduledUser]] = {}
    occupied: dict[int, set[int]] = {b: set() for b in range(n_prb)}
    for i, (user_id, cbs) in enumerate(clusters):
        placed = False
        for step in range(n_prb):
            prb = (i + step) % n_prb
            if not (occupied[prb] & cbs):
                per_prb.setdefault(prb, []).append(ScheduledUser(user_id, cbs))
                occupied[prb] |= cbs
                placed = True
                break
        if not placed:
            warnings.append(f"user {user_id}: no conflict-free PRB, left unscheduled")
            log.debug("user %d could not be scheduled on any of %d PRBs", user_id, n_prb)
    return per_prb


def form_clusters(
    channel: ChannelState,
    edge: EdgeUserSet,
    p0: float,
    lam: float = 0.5,
    max_iterations: int = 200,
    stability_window: int = 10,
) -> ClusterAssignment:
    """AP-clustered cooperating sets.

    Each exemplar BS's cluster serves that BS's edge user; members whose
    RSRP at the served user falls below `p0` are pruned (the serving BS is
    always kept, with below-threshold servings counted, not pruned).
    """
    if len(edge) == 0:
        raise ValueError("no edge users to schedule")
    node_bs, node_user = _ap_nodes(edge)
    S = watts_to_dbm(channel.rsrp[np.ix_(node_bs, node_user)])
    problem = affinity.APProblem(
        affinity.with_preference(S),
        damping=lam,
        max_iterations=max_iterations,
        stability_window=stability_window,
    )
    result = affinity.cluster(problem)

    assignment = ClusterAssignment()
    clusters: list[tuple[int, frozenset[int]]] = []
    for ex in result.exemplars:
        user = node_user[ex]
        serving = node_bs[ex]
        members = [node_bs[m] for m in result.members(ex)]
        kept = [b for b in members if channel.rsrp[b, user] >= p0]
        if members and not kept:
            assignment.warnings.append(
                f"cluster of BS {serving}: all members below threshold, degenerated to serving BS"
            )
        if channel.rsrp[serving, user] < p0:
            assignment.serving_below_threshold += 1
        clusters.append((user, frozenset([serving, *kept])))

    assignment.per_prb = _assign_prbs(clusters, channel.n_prb, assignment.warnings)
    assignment.validate_disjoint()
    return assignment


def fixed_size_clusters(
    channel: ChannelState,
    edge: EdgeUserSet,
    size: int,
) -> ClusterAssignment:
    """Baseline: every edge user served by its `size` strongest-RSRP BSs,
    spread over PRBs so the sets stay disjoint within each PRB."""
    if size < 1:
        raise ValueError(f"cluster size must be >= 1, got {size}")
    assignment = ClusterAssignment()
    n_bs = channel.n_bs
    if size > n_bs:
        assignment.warnings.append(f"cluster size {size} capped to BS count {n_bs}")
        log.warning("cluster size %d exceeds BS count %d; capped", size, n_bs)
        size = n_bs

    clusters: list[tuple[int, frozenset[int]]] = []
    for u in edge.users:
        # strongest first; lowest bs id on exact ties
        order = np.lexsort((np.arange(n_bs), -channel.rsrp[:, u.user_id]))
        clusters.append((u.user_id, frozenset(int(b) for b in order[:size])))

    assignment.per_prb = _assign_prbs(clusters, channel.n_prb, assignment.warnings)
    assignment.validate_disjoint()
    return assignment


def assignment_to_json(
    assignment: ClusterAssignment,
    topology: Topology,
    path=None,
) -> dict:
    """Exportable cluster map: BS and scheduled-user positions plus the
    (user_id, bs_ids, prb) triples.  Written to `path` when given."""
    scheduled = {su.user_id for _, su in assignment.entries()}
    doc = {
        "bs": [
            {"id": bs.bs_id, "x": bs.position[0], "y": bs.position[1], "kind": bs.kind}
            for bs in topology.base_stations
        ],
        "users": [
            {"id": u.id, "x": u.position[0], "y": u.position[1]}
            for u in topology.users
            if u.id in scheduled
        ],
        "clusters": [
            {"user_id": su.user_id, "bs_ids": sorted(su.cbs), "prb": prb}
            for prb, su in assignment.entries()
        ],
        "warnings": list(assignment.warnings),
    }
    if path is not None:
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")
    return doc
