import json
from itertools import combinations

import numpy as np
import pytest
from conftest import synthetic_topology

from compsim import affinity
from compsim.channel import compute_channel, path_loss_db
from compsim.config import ScenarioConfig, watts_to_dbm
from compsim.scheduling import (
    assignment_to_json,
    build_similarity,
    fixed_size_clusters,
    form_clusters,
    select_edge_users,
)
from compsim.sim import run_drop_full
from compsim.topology import build_topology


def line_setup():
    """Two BS pairs on a line, one user centered in each pair."""
    bs = [(-150.0, 0.0), (-50.0, 0.0), (50.0, 0.0), (150.0, 0.0)]
    users = [(-100.0, 0.0), (100.0, 0.0)]
    topo = synthetic_topology(bs, users)
    return topo, compute_channel(topo)


class TestSelectEdgeUsers:
    def test_equidistant_user_is_edge(self):
        topo, ch = line_setup()
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=2)
        assert {u.user_id for u in edge.users} == {0, 1}
        for u in edge.users:
            assert u.margin_db == pytest.approx(0.0, abs=1e-9)
            assert u.rsrp_best >= u.rsrp_second

    def test_center_user_is_not_edge(self):
        # user 1 m from its BS, next BS sqrt(3)*50 m away: margin far above 6 dB
        topo = synthetic_topology([(0.0, 0.0), (86.6, 0.0)], [(1.0, 0.0)])
        ch = compute_channel(topo)
        margin = path_loss_db(86.6 - 1.0) - path_loss_db(1.0)
        assert margin > 6.0
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=5)
        assert len(edge) == 0

    def test_per_cell_keeps_smallest_margin(self):
        # three users in one cell at increasing imbalance
        topo = synthetic_topology(
            [(-100.0, 0.0), (100.0, 0.0)],
            [(0.0, 0.0), (-10.0, 0.0), (-20.0, 0.0)],
        )
        ch = compute_channel(topo)
        edge_all = select_edge_users(ch, topo, margin_db=20.0, per_cell=3)
        assert len(edge_all) == 3
        edge_one = select_edge_users(ch, topo, margin_db=20.0, per_cell=1)
        assert [u.user_id for u in edge_one.users] == [0]  # margin 0 beats the rest

    def test_serving_attains_best(self):
        cfg = ScenarioConfig(users_per_cell=50, seed=13)
        topo = build_topology(cfg)
        ch = compute_channel(topo)
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=10)
        assert len(edge) > 0
        for u in edge.users:
            assert ch.rsrp[u.serving_bs, u.user_id] == pytest.approx(u.rsrp_best)

    def test_nonpositive_margin_rejected(self):
        topo, ch = line_setup()
        with pytest.raises(ValueError, match="margin_db"):
            select_edge_users(ch, topo, margin_db=0.0)


class TestBuildSimilarity:
    def test_rsrp_entries_match_link_budget(self):
        topo, ch = line_setup()
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=2)
        problem = build_similarity(ch, edge)
        # nodes are the serving BSs of users 0 and 1 (one per pair)
        assert problem.n == 2
        # cross entry: RSRP from the other pair's serving BS at this user
        node_bs = sorted({u.serving_bs for u in edge.users})
        user_of = {u.serving_bs: u.user_id for u in edge.users}
        for i, m in enumerate(node_bs):
            for j, n in enumerate(node_bs):
                if i == j:
                    continue
                d = abs(topo.base_stations[m].position[0]
                        - topo.users[user_of[n]].position[0])
                expected_dbm = 43.0 - path_loss_db(d) + 5.0
                assert problem.similarity[i, j] == pytest.approx(expected_dbm, rel=1e-9)

    def test_colocated_bs_identical_rows(self):
        bs = [(0.0, 0.0), (0.0, 0.0), (200.0, 0.0)]
        users = [(60.0, 0.0), (160.0, 0.0), (198.0, 0.0)]
        topo = synthetic_topology(bs, users)
        ch = compute_channel(topo)
        edge = select_edge_users(ch, topo, margin_db=60.0, per_cell=3)
        problem = build_similarity(ch, edge)
        node_bs = sorted({u.serving_bs for u in edge.users})
        if 0 in node_bs and 1 in node_bs:
            i, j = node_bs.index(0), node_bs.index(1)
            off = [k for k in range(problem.n) if k not in (i, j)]
            np.testing.assert_allclose(
                problem.similarity[i, off], problem.similarity[j, off], rtol=1e-12
            )

    def test_power_shift_moves_similarity_and_keeps_assignment(self):
        bs = [(-150.0, 0.0), (-50.0, 0.0), (50.0, 0.0), (150.0, 0.0)]
        users = [(-100.0, 10.0), (-95.0, -25.0), (100.0, 10.0), (108.0, -30.0)]
        shift_db = 7.0
        p_ref = 10 ** (43.0 / 10.0) / 1000.0
        results = []
        sims = []
        for p in (p_ref, p_ref * 10 ** (shift_db / 10.0)):
            topo = synthetic_topology(bs, users, p_max=p)
            ch = compute_channel(topo)
            edge = select_edge_users(ch, topo, margin_db=12.0, per_cell=4)
            problem = build_similarity(ch, edge)
            sims.append(problem.similarity)
            results.append(affinity.cluster(problem).assignment)
        mask = ~np.eye(sims[0].shape[0], dtype=bool)
        np.testing.assert_allclose(
            sims[1][mask] - sims[0][mask], shift_db, atol=1e-9
        )
        np.testing.assert_array_equal(results[0], results[1])

    def test_empty_edge_set_raises(self):
        topo, ch = line_setup()
        from compsim.scheduling import EdgeUserSet

        with pytest.raises(ValueError, match="no edge users"):
            build_similarity(ch, EdgeUserSet(()))


class TestFormClusters:
    def test_no_pruning_with_zero_threshold(self):
        topo, ch = line_setup()
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=2)
        assignment = form_clusters(ch, edge, p0=0.0)
        sets = [su.cbs for _, su in assignment.entries()]
        assert sets  # AP clusters pass through intact
        assert not assignment.warnings

    def test_total_pruning_degenerates_to_serving(self):
        cfg = ScenarioConfig(users_per_cell=40, seed=21)
        topo = build_topology(cfg)
        ch = compute_channel(topo)
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=10)
        assignment = form_clusters(ch, edge, p0=1.0)  # 1 W received: impossible
        serving = {u.serving_bs for u in edge.users}
        for _, su in assignment.entries():
            assert len(su.cbs) == 1
            assert next(iter(su.cbs)) in serving
        assert assignment.serving_below_threshold == len(list(assignment.entries()))
        multi = [w for w in assignment.warnings if "degenerated" in w]
        assert multi  # at least one multi-member cluster collapsed

    def test_symmetric_four_bs_two_user_clusters(self):
        topo, ch = line_setup()
        # hand-set similarity: column n scores RSRP at the user nearest BS n
        col_user = [0, 0, 1, 1]
        S = np.array(
            [[float(watts_to_dbm(ch.rsrp[m, col_user[n]])) for n in range(4)]
             for m in range(4)]
        )
        problem = affinity.APProblem(affinity.with_preference(S))
        res = affinity.cluster(problem)
        groups = {frozenset(np.flatnonzero(res.assignment == e)) for e in res.exemplars}
        assert groups == {frozenset({0, 1}), frozenset({2, 3})}
        # exhaustive exemplar-set search agrees
        best_score, best_groups = -np.inf, None
        n = 4
        Sp = problem.similarity
        for r in range(1, n + 1):
            for E in combinations(range(n), r):
                assign = [m if m in E else E[int(np.argmax(Sp[m, list(E)]))] for m in range(n)]
                score = sum(Sp[e, e] for e in E) + sum(
                    Sp[m, assign[m]] for m in range(n) if m not in E
                )
                if score > best_score + 1e-12:
                    best_score = score
                    best_groups = {frozenset(np.flatnonzero(np.array(assign) == e)) for e in E}
        assert groups == best_groups


class TestFixedSizeClusters:
    def test_size_one_is_strongest_bs(self):
        cfg = ScenarioConfig(users_per_cell=30, seed=17)
        topo = build_topology(cfg)
        ch = compute_channel(topo)
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=10)
        assignment = fixed_size_clusters(ch, edge, size=1)
        for _, su in assignment.entries():
            assert su.cbs == frozenset({int(np.argmax(ch.rsrp[:, su.user_id]))})

    def test_size_two_takes_top_pair(self):
        topo, ch = line_setup()
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=2)
        assignment = fixed_size_clusters(ch, edge, size=2)
        by_user = {su.user_id: su.cbs for _, su in assignment.entries()}
        assert by_user[0] == frozenset({0, 1})
        assert by_user[1] == frozenset({2, 3})

    def test_overlapping_top_sets_get_distinct_prbs(self):
        bs = [(-100.0, 0.0), (0.0, 0.0), (100.0, 0.0)]
        users = [(-50.0, 0.0), (50.0, 0.0)]
        topo = synthetic_topology(bs, users)
        ch = compute_channel(topo)
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=2)
        assignment = fixed_size_clusters(ch, edge, size=2)
        prbs = [prb for prb, _ in assignment.entries()]
        assert len(prbs) == 2
        assert prbs[0] != prbs[1]  # both want BS 1

    def test_oversized_request_capped_with_warning(self):
        topo, ch = line_setup()
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=2)
        assignment = fixed_size_clusters(ch, edge, size=99)
        assert any("capped" in w for w in assignment.warnings)
        for _, su in assignment.entries():
            assert len(su.cbs) <= 4

    def test_rejects_zero_size(self):
        topo, ch = line_setup()
        edge = select_edge_users(ch, topo, margin_db=6.0, per_cell=2)
        with pytest.raises(ValueError, match="size"):
            fixed_size_clusters(ch, edge, size=0)


class TestAssignmentProperties:
    @pytest.mark.parametrize("algorithm", ["ap_comp", "common_comp", "no_comp"])
    def test_per_prb_disjointness(self, algorithm):
        cfg = ScenarioConfig(algorithm=algorithm, users_per_cell=60, seed=29,
                             cluster_size=4)
        result = run_drop_full(cfg, 0)
        result.assignment.validate_disjoint()  # raises on violation
        for _, su in result.assignment.entries():
            assert len(su.cbs) >= 1

    def test_retained_members_meet_threshold(self):
        cfg = ScenarioConfig(users_per_cell=60, seed=29, p0_dbm=-95.0)
        result = run_drop_full(cfg, 0)
        serving = {u.user_id: u.serving_bs for u in result.edge.users}
        p0 = cfg.p0_w
        for _, su in result.assignment.entries():
            for bs in su.cbs:
                if bs != serving.get(su.user_id):
                    assert result.channel.rsrp[bs, su.user_id] >= p0

    def test_determinism(self):
        cfg = ScenarioConfig(users_per_cell=40, seed=31)
        a = run_drop_full(cfg, 0).assignment
        b = run_drop_full(cfg, 0).assignment
        assert list(a.entries()) == list(b.entries())


class TestJsonExport:
    def test_schema_and_counts(self, tmp_path):
        cfg = ScenarioConfig(users_per_cell=40, seed=37)
        result = run_drop_full(cfg, 0)
        path = tmp_path / "clusters.json"
        doc = assignment_to_json(result.assignment, result.topology, path)
        loaded = json.loads(path.read_text())
        assert loaded == doc
        assert len(doc["bs"]) == result.topology.n_bs
        assert {c["user_id"] for c in doc["clusters"]} == set(
            result.assignment.scheduled_users()
        )
        for c in doc["clusters"]:
            assert set(c) == {"user_id", "bs_ids", "prb"}
            assert c["bs_ids"] == sorted(c["bs_ids"])
