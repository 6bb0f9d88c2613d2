import numpy as np
import pytest

from compsim.config import ConfigurationError, ScenarioConfig
from compsim.sim import (
    aggregate,
    drop_seed,
    run_drop,
    run_drop_full,
    run_scenario,
    run_sweep,
    sweeps_to_csv,
)


def quick_config(**kw):
    defaults = dict(users_per_cell=30, n_drops=3, seed=5)
    defaults.update(kw)
    return ScenarioConfig(**defaults)


class TestDrops:
    def test_deterministic_reports(self):
        cfg = quick_config()
        a = run_drop(cfg, 0)
        b = run_drop(cfg, 0)
        assert a == b  # frozen dataclasses with identical floats

    def test_drop_indices_differ(self):
        cfg = quick_config()
        assert drop_seed(cfg, 0) != drop_seed(cfg, 1)
        a = run_drop(cfg, 0)
        b = run_drop(cfg, 1)
        assert a.mean_edge_throughput_bps != b.mean_edge_throughput_bps

    def test_algorithm_arms_share_topology(self):
        base = quick_config()
        arms = [run_drop_full(base.replace(algorithm=a), 0)
                for a in ("ap_comp", "common_comp", "no_comp")]
        ref = arms[0].topology
        for other in arms[1:]:
            assert other.topology == ref

    def test_no_comp_single_strongest_bs_at_pmax(self):
        cfg = quick_config(algorithm="no_comp", users_per_cell=6,
                           edge_users_per_cell=1, background_load=False)
        result = run_drop_full(cfg, 0)
        for _, su in result.assignment.entries():
            assert len(su.cbs) == 1
            bs = next(iter(su.cbs))
            assert bs == int(np.argmax(result.channel.rsrp[:, su.user_id]))
        active = result.power.active_count_per_bs()
        P = result.power.per_prb_per_bs
        for bs in np.flatnonzero(active == 1):
            assert P[:, bs].max() == pytest.approx(cfg.max_power_w)

    def test_ap_beats_no_comp_paired(self):
        ap = run_scenario(quick_config(algorithm="ap_comp", n_drops=4))
        no = run_scenario(quick_config(algorithm="no_comp", n_drops=4))
        thr_ap, _, _, _ = aggregate(ap, 8e8)
        thr_no, _, _, _ = aggregate(no, 8e8)
        assert thr_ap > thr_no

    def test_failed_drop_aborts_with_context(self):
        cfg = quick_config(users_per_cell=1, edge_margin_db=1e-6)
        # a margin this small yields no edge users -> the drop fails
        with pytest.raises(RuntimeError, match="drop 0"):
            run_scenario(cfg)


class TestAggregate:
    def test_values_and_stderr(self):
        cfg = quick_config(n_drops=4)
        reports = run_scenario(cfg)
        thr, dly, jn, stderr = aggregate(reports, cfg.file_size_bits)
        per = [r.mean_edge_throughput_bps for r in reports]
        assert thr == pytest.approx(np.mean(per))
        assert stderr == pytest.approx(np.std(per, ddof=1) / np.sqrt(len(per)))
        assert dly == pytest.approx(cfg.file_size_bits / thr)
        assert 0 < jn <= 1

    def test_single_drop_stderr_zero(self):
        reports = run_scenario(quick_config(n_drops=1))
        assert aggregate(reports, 8e8)[3] == 0.0

    def test_permutation_invariant(self):
        reports = run_scenario(quick_config(n_drops=4))
        forward = aggregate(reports, 8e8)
        backward = aggregate(list(reversed(reports)), 8e8)
        assert forward == pytest.approx(backward, rel=1e-12)


class TestSweep:
    def test_cluster_size_one_equals_no_comp(self):
        common = run_sweep(
            quick_config(algorithm="common_comp", n_drops=2), "cluster_size", [1]
        )
        no = run_sweep(quick_config(algorithm="no_comp", n_drops=2), "cluster_size", [1])
        assert common.points[0].mean_edge_throughput_bps == pytest.approx(
            no.points[0].mean_edge_throughput_bps, rel=1e-12
        )

    def test_points_ordered_by_x(self):
        res = run_sweep(
            quick_config(algorithm="common_comp", n_drops=1), "cluster_size", [3, 1, 2]
        )
        assert [p.x_value for p in res.points] == [1.0, 2.0, 3.0]

    def test_radius_axis(self):
        res = run_sweep(quick_config(n_drops=1), "cell_radius", [50.0, 100.0])
        assert res.axis == "cell_radius"
        assert len(res.points) == 2

    def test_damping_axis(self):
        res = run_sweep(quick_config(n_drops=1), "damping", [0.3, 0.7])
        assert [p.x_value for p in res.points] == [0.3, 0.7]

    def test_unknown_axis_rejected(self):
        with pytest.raises(ConfigurationError, match="axis"):
            run_sweep(quick_config(), "bandwidth", [1.0])

    def test_empty_values_rejected(self):
        with pytest.raises(ConfigurationError, match="value"):
            run_sweep(quick_config(), "damping", [])

    def test_csv_layout(self, tmp_path):
        res = run_sweep(
            quick_config(algorithm="common_comp", n_drops=1), "cluster_size", [1, 2]
        )
        path = tmp_path / "sweep_cluster_size.csv"
        sweeps_to_csv([res], 1, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == (
            "axis,x,algorithm,mean_throughput_bps,mean_delay_s,jain,stderr,n_drops"
        )
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "cluster_size"
        assert first[2] == "common_comp"


class TestSweepRatios:
    def test_ap_over_common_at_every_radius(self):
        # paired arms, fixed common size; ratio stays well above 1.1
        radii = [50.0, 150.0, 300.0, 500.0]
        base = quick_config(users_per_cell=60, n_drops=3, cluster_size=3)
        ap = run_sweep(base.replace(algorithm="ap_comp"), "cell_radius", radii)
        common = run_sweep(base.replace(algorithm="common_comp"), "cell_radius", radii)
        for pa, pc in zip(ap.points, common.points):
            assert pa.x_value == pc.x_value
            assert pa.mean_edge_throughput_bps / pc.mean_edge_throughput_bps >= 1.1


class TestEmittedAllocations:
    @pytest.mark.parametrize("algorithm", ["ap_comp", "common_comp", "no_comp"])
    def test_power_constraints_hold(self, algorithm):
        from compsim.power import check_power_constraints

        cfg = quick_config(algorithm=algorithm, users_per_cell=60)
        result = run_drop_full(cfg, 0)
        problems = check_power_constraints(
            result.power, result.assignment, result.channel,
            p_max=cfg.max_power_w, p0=cfg.p0_w,
        )
        assert problems == []


class TestConfig:
    def test_table_defaults(self):
        cfg = ScenarioConfig()
        assert cfg.n_cells == 19
        assert cfg.bandwidth_hz == 3e6
        assert cfg.max_power_dbm == 43.0
        assert cfg.n_prb == 15
        assert cfg.users_per_cell == 100
        assert cfg.antenna_gain_db == 5.0
        assert cfg.noise_psd_dbm_hz == -174.0
        assert cfg.cell_radius_m == 50.0
        assert cfg.max_power_w == pytest.approx(19.9526231, rel=1e-8)

    def test_file_size_conventions(self):
        binary = ScenarioConfig(file_size_mb=100.0, file_size_convention="binary")
        decimal = ScenarioConfig(file_size_mb=100.0, file_size_convention="decimal")
        assert binary.file_size_bits == pytest.approx(8.388608e8)
        assert decimal.file_size_bits == pytest.approx(8e8)

    def test_yaml_roundtrip(self, tmp_path):
        path = tmp_path / "scenario.yaml"
        path.write_text(
            "deployment: nsa\ncell_radius_m: 200\nusers_per_cell: 50\nseed: 9\n"
        )
        cfg = ScenarioConfig.from_file(path)
        assert cfg.deployment == "nsa"
        assert cfg.cell_radius_m == 200.0
        assert cfg.users_per_cell == 50
        assert cfg.seed == 9

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("cell_radius: 100\n")
        with pytest.raises(ConfigurationError, match="cell_radius"):
            ScenarioConfig.from_file(path)

    def test_override_coercion(self):
        cfg = ScenarioConfig().with_overrides(
            {"cell_radius_m": "200", "algorithm": "no_comp", "background_load": "false"}
        )
        assert cfg.cell_radius_m == 200.0
        assert cfg.algorithm == "no_comp"
        assert cfg.background_load is False

    def test_invalid_values_name_field(self):
        for field, value in [
            ("deployment", "lte"),
            ("algorithm", "zf"),
            ("n_cells", 20),
            ("damping", 1.0),
            ("n_drops", 0),
            ("file_size_convention", "mixed"),
        ]:
            with pytest.raises(ConfigurationError, match=field):
                ScenarioConfig(**{field: value})
