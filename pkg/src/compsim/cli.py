"""Command-line entry point.

    compsim run      --config scenario.yaml --out results [--set key=value ...]
    compsim sweep    --axis cluster_size --values 1..6 --out results
    compsim validate --config scenario.yaml

`run` executes one scenario (all its drops) and writes metrics.csv,
clusters.json, and resolved_config.json; `sweep` writes sweep_<axis>.csv
for every algorithm arm relevant to the axis; `validate` prints the fully
resolved parameter set.  File values are overridden by repeated
--set key=value flags.  All randomness flows from the config seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import metrics, scheduling, sim
from .config import ConfigurationError, ScenarioConfig

SWEEP_ARMS = {
    "cluster_size": ["ap_comp", "common_comp", "no_comp"],
    "cell_radius": ["ap_comp", "common_comp", "no_comp"],
    "damping": ["ap_comp"],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compsim",
        description="Downlink CoMP system simulator: clustering, power control, metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML scenario config (defaults used if omitted)")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config key (repeatable)",
        )

    p_run = sub.add_parser("run", help="run one scenario and write metrics")
    common(p_run)
    p_run.add_argument("--out", default="results", help="output directory")

    p_sweep = sub.add_parser("sweep", help="sweep one axis across algorithm arms")
    common(p_sweep)
    p_sweep.add_argument("--out", default="results", help="output directory")
    p_sweep.add_argument("--axis", required=True, choices=sorted(sim.SWEEP_AXES))
    p_sweep.add_argument(
        "--values",
        required=True,
        help="comma list (0.1,0.5,0.9) or integer range (1..6)",
    )

    p_val = sub.add_parser("validate", help="check a config and print resolved parameters")
    common(p_val)
    return parser


def load_config(args) -> ScenarioConfig:
    if args.config is not None:
        path = Path(args.config)
        try:
            text_ok = path.is_file()
        except OSError:
            text_ok = False
        if not text_ok:
            raise FileNotFoundError(f"cannot read config file: {args.config}")
        config = ScenarioConfig.from_file(path)
    else:
        config = ScenarioConfig()
    overrides = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value
    return config.with_overrides(overrides) if overrides else config


def parse_values(spec: str) -> list[float]:
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return [float(v) for v in range(int(lo), int(hi) + 1)]
    return [float(v) for v in spec.split(",") if v.strip()]


def ensure_outdir(out: str) -> Path:
    outdir = Path(out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        probe = outdir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise PermissionError(f"cannot write output directory {out!r}: {exc}") from exc
    return outdir


def cmd_validate(args) -> int:
    config = load_config(args)
    config.validate()
    print("configuration OK; resolved parameters:")
    for key, value in config.as_dict().items():
        print(f"  {key:24s} = {value}")
    print(f"  {'(derived) n_bs':24s} = "
          f"{config.n_cells * (1 + (config.small_bs_per_cell if config.deployment == 'nsa' else 0))}")
    print(f"  {'(derived) noise_w_per_prb':24s} = {_noise(config):.6e}")
    return 0


def _noise(config: ScenarioConfig) -> float:
    from .channel import noise_power_w

    return noise_power_w(config.bandwidth_hz, config.n_prb, config.noise_psd_dbm_hz)


def cmd_run(args) -> int:
    config = load_config(args)
    outdir = ensure_outdir(args.out)

    per_drop = []
    clusters_doc_written = False
    for i in range(config.n_drops):
        result = sim.run_drop_full(config, i)
        per_drop.append(result.report)
        if not clusters_doc_written:
            scheduling.assignment_to_json(
                result.assignment, result.topology, outdir / "clusters.json"
            )
            clusters_doc_written = True

    lines = ["drop," + metrics.CSV_HEADER]
    for i, report in enumerate(per_drop):
        lines.extend(f"{i},{row}" for row in metrics.report_rows(report))
    (outdir / "metrics.csv").write_text("\n".join(lines) + "\n")
    config.to_json(outdir / "resolved_config.json")

    thr, dly, jn, stderr = sim.aggregate(per_drop, config.file_size_bits)
    print(f"scenario: {config.algorithm}, {config.deployment}, "
          f"radius {config.cell_radius_m:g} m, {config.n_drops} drops")
    print(f"  mean edge throughput : {thr:.4e} bps (stderr {stderr:.2e})")
    print(f"  mean delay           : {dly:.4f} s")
    print(f"  mean Jain index      : {jn:.4f}")
    print(f"wrote {outdir / 'metrics.csv'}, {outdir / 'clusters.json'}, "
          f"{outdir / 'resolved_config.json'}")
    return 0


def cmd_sweep(args) -> int:
    config = load_config(args)
    outdir = ensure_outdir(args.out)
    values = parse_values(args.values)

    results = []
    for algorithm in SWEEP_ARMS[args.axis]:
        arm = config.replace(algorithm=algorithm)
        results.append(sim.run_sweep(arm, args.axis, values))

    path = outdir / f"sweep_{args.axis}.csv"
    sim.sweeps_to_csv(results, config.n_drops, path)
    config.to_json(outdir / "resolved_config.json")
    for res in results:
        best = max(res.points, key=lambda p: p.mean_edge_throughput_bps)
        print(f"{res.algorithm:12s}: best mean throughput {best.mean_edge_throughput_bps:.4e} bps "
              f"at {args.axis}={best.x_value:g}")
    print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        parser.error(f"unknown command {args.command!r}")
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PermissionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
