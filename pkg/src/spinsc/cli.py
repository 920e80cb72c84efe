"""Command-line front end: experiment orchestration and file emission.

Subcommands: sbg-characterize, scc-report, allocate, fusion-run, cost-report,
pv-sweep.  Every output is a UTF-8 CSV with a one-line header and floats at 6
significant digits (heat maps are binary 8-bit PGM), and every run is a pure
function of the configuration, so re-running a command reproduces its files
byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import allocator, cost, experiments, fusion
from .config import ConfigError, RunConfig, load_config
from .device import WriteDirection, characterization_rows
from .logic import ScNetlist, cluster_terminals, clusters_of, extract_conflict_sets
from .sbg import SbgArraySpec, SbgMode, build_array, generate

# Transistor count per self-control generator cell, used for K_cmos.
T_PER_SBG = 92


def fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_pgm(path: Path, weights: np.ndarray) -> None:
    """Max-normalized 8-bit binary PGM heat map."""
    peak = float(weights.max())
    scale = 255.0 / peak if peak > 0 else 0.0
    gray = np.round(weights * scale).astype(np.uint8)
    header = f"P5\n{gray.shape[1]} {gray.shape[0]}\n255\n".encode("ascii")
    path.write_bytes(header + gray.tobytes())


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_sbg_characterize(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    paths = []
    for direction in (WriteDirection.P_TO_AP, WriteDirection.AP_TO_P):
        rows = characterization_rows(cfg.device.params,
                                     list(cfg.report.characterize_voltages),
                                     list(cfg.report.characterize_durations),
                                     direction)
        path = out / f"characterize_{direction.value}.csv"
        write_csv(path, ["voltage", "duration", "probability"], rows)
        paths.append(path)
    return paths


def cmd_array_report(cfg: RunConfig) -> list[Path]:
    """Per-unit density error and energy for the configured generator array."""
    out = _out_dir(cfg)
    levels = cfg.array.resolved_levels()
    multiplicity = cfg.array.multiplicity or tuple(1 for _ in levels)
    if len(multiplicity) != len(levels):
        raise ConfigError("array multiplicity must match the level count")
    spec = SbgArraySpec(tuple(levels), tuple(multiplicity), cfg.array.mode)
    units = build_array(spec, cfg.master_seed, params=cfg.device.params,
                        write_duration_ns=cfg.device.write_duration_ns,
                        read_energy_nj=cfg.device.read_energy_nj,
                        pv_sigmas=cfg.pv_sigmas)
    n = cfg.bitstream_len
    rows = []
    for idx, unit in enumerate(units):
        density = generate(unit, n).value()
        rows.append((idx, unit.target_p, density, abs(density - unit.target_p),
                     unit.energy_nj, unit.writes, unit.reads))
    path = out / "array_report.csv"
    write_csv(path, ["unit", "target_p", "density", "abs_error",
                     "energy_nj", "writes", "reads"], rows)
    return [path]


def cmd_scc_report(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    rep = cfg.report
    self_rows = experiments.self_scc_table(
        rep.scc_probs, rep.scc_lengths, rep.scc_pairs, cfg.master_seed,
        mode=cfg.array.mode, params=cfg.device.params)
    cross_rows = experiments.cross_scc_table(
        rep.scc_cross, rep.scc_lengths, rep.scc_pairs, cfg.master_seed,
        mode=cfg.array.mode, params=cfg.device.params)
    self_path = out / "self_scc.csv"
    cross_path = out / "cross_scc.csv"
    write_csv(self_path, ["p", "n", "mean_abs_scc"], self_rows)
    write_csv(cross_path, ["p1", "p2", "n", "mean_abs_scc"], cross_rows)
    return [self_path, cross_path]


def _load_assignment(path: Path) -> dict[str, float]:
    values: dict[str, float] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'terminal = probability'")
        name, _, value = line.partition("=")
        values[name.strip()] = float(value)
    return values


def cmd_allocate(cfg: RunConfig, netlist_path: Path, assignment_path: Path) -> list[Path]:
    out = _out_dir(cfg)
    net = ScNetlist.parse(netlist_path.read_text(encoding="utf-8"))
    raw_assignment = _load_assignment(assignment_path)
    missing = [t for t in net.terminals if t not in raw_assignment]
    if missing:
        raise ConfigError(f"assignment misses terminals: {missing}")

    conflict_sets = extract_conflict_sets(net)
    levels = sorted(set(raw_assignment.values()))
    assignment = allocator.quantize_assignment(raw_assignment, levels)

    by_value: dict[float, list[str]] = {}
    for t in net.terminals:
        by_value.setdefault(assignment[t], []).append(t)
    classes = [members for _, members in sorted(by_value.items())]
    cluster_map = cluster_terminals(net, conflict_sets, classes)
    clusters = clusters_of(cluster_map)
    cluster_order = list(clusters)
    cluster_assignment = {cid: assignment[members[0]] for cid, members in clusters.items()}
    cluster_sets = [frozenset(cluster_map[t] for t in group) for group in conflict_sets]

    spec = allocator.size_array(cluster_sets, levels, policy="trace",
                                trace=[cluster_assignment],
                                terminal_order=cluster_order, mode=cfg.array.mode)
    matrix = allocator.allocate(cluster_assignment, spec, cluster_sets, cluster_order)

    matrix_path = out / "matrix.csv"
    entries = [(int(r), int(c)) for r, c in zip(*np.nonzero(matrix.control))]
    write_csv(matrix_path, ["row", "col"], sorted(entries))

    m = spec.total_units
    n_terminals = len(net.terminals)
    n_prime = len(clusters)
    k_energy, k_cmos = allocator.cost_metrics(T_PER_SBG, n_terminals, m, n_prime)
    summary_path = out / "allocate_summary.csv"
    write_csv(summary_path, ["m", "n_terminals", "n_clustered", "k_energy", "k_cmos"],
              [(m, n_terminals, n_prime, k_energy, k_cmos)])
    print(f"allocated {n_terminals} terminals onto {m} generators "
          f"({n_prime} clustered columns)")
    return [matrix_path, summary_path]


def cmd_fusion_run(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    fus = cfg.fusion
    problem = fusion.make_problem(
        grid_w=fus.grid_w, grid_h=fus.grid_h, target_xy=fus.target,
        noise_d=fus.noise_d, noise_b=fus.noise_b, master_seed=cfg.master_seed,
        plane=fus.plane, sensors=fus.sensors, sigma_b=fus.sigma_b)
    pipeline = fusion.FusionPipeline(problem, level_count=fus.level_count,
                                     params=cfg.device.params, mode=cfg.array.mode,
                                     write_duration_ns=cfg.device.write_duration_ns,
                                     read_energy_nj=cfg.device.read_energy_nj)
    n = cfg.bitstream_len
    estimate, stats = pipeline.run(n, cfg.master_seed, pv_sigmas=cfg.pv_sigmas)
    exact = fusion.exact_posterior(problem)
    kl = fusion.kl_divergence(exact, estimate,
                              zero_floor=fusion.default_zero_floor(n, fus.grid_w, fus.grid_h))
    ax, ay = estimate.argmax()

    posterior_path = out / "posterior.csv"
    rows = [(x, y, float(estimate.weights[x, y]))
            for x in range(fus.grid_w) for y in range(fus.grid_h)]
    write_csv(posterior_path, ["x", "y", "weight"], rows)
    pgm_path = out / "posterior.pgm"
    write_pgm(pgm_path, estimate.weights)
    exact_path = out / "posterior_exact.csv"
    write_csv(exact_path, ["x", "y", "weight"],
              [(x, y, float(exact.weights[x, y]))
               for x in range(fus.grid_w) for y in range(fus.grid_h)])
    summary_path = out / "fusion_summary.csv"
    write_csv(summary_path, ["n", "kl", "argmax_x", "argmax_y"], [(n, kl, ax, ay)])
    print(f"{n},{fmt(kl)},{ax},{ay}")
    return [posterior_path, pgm_path, exact_path, summary_path]


def cmd_cost_report(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    rows = cost.comparison_rows()
    path = out / "cost_report.csv"
    header = ["method", "e_cyc_nj", "t_cyc_ns", "n_cyc", "e_tot_uj", "t_tot_us", "n_cmos_k"]
    write_csv(path, header, [tuple(r[h] for h in header) for r in rows])
    reference = cost.SHARED_ARRAY_REFERENCE
    for profile in (cost.MTJ_BASELINE, cost.FPGA_BASELINE):
        ratio = cost.compare(profile, reference)
        print(f"{profile.label} / {reference.label} energy ratio: {fmt(ratio)}")
    return [path]


def cmd_pv_sweep(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    rep = cfg.report
    sigmas = (cfg.pv_sigma_area, cfg.pv_sigma_tox)
    results = experiments.density_sweep(
        rep.sweep_probs, rep.sweep_lengths, rep.sweep_repeats, cfg.master_seed,
        mode=SbgMode.SIMPLE, params=cfg.device.params, pv_sigmas=sigmas,
        write_duration_ns=cfg.device.write_duration_ns,
        read_energy_nj=cfg.device.read_energy_nj)
    path = out / "pv_sweep.csv"
    write_csv(path, ["n", "avg_error", "max_error"],
              [(r.length, r.avg_error, r.max_error) for r in results])
    return [path]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsc",
        description="MTJ stochastic-computing Bayesian inference simulator")
    parser.add_argument("--config", type=Path, default=None,
                        help="key-value configuration file")
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    parser.add_argument("--out-dir", type=Path, default=None, help="output directory")
    pv_group = parser.add_mutually_exclusive_group()
    pv_group.add_argument("--pv", dest="pv", action="store_true", default=None,
                          help="enable process variation")
    pv_group.add_argument("--no-pv", dest="pv", action="store_false",
                          help="disable process variation")
    parser.add_argument("--grid", type=str, default=None, help="fusion grid, e.g. 32x32")
    parser.add_argument("--bitstream-len", type=int, default=None,
                        help="stream length for fusion runs")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sbg-characterize", help="voltage/duration/probability sweep")
    sub.add_parser("array-report", help="per-unit density error and energy")
    sub.add_parser("scc-report", help="self- and cross-correlation tables")
    alloc = sub.add_parser("allocate", help="size and route a netlist onto the array")
    alloc.add_argument("--netlist", type=Path, required=True)
    alloc.add_argument("--assignment", type=Path, required=True)
    sub.add_parser("fusion-run", help="stochastic target-locating inference")
    sub.add_parser("cost-report", help="platform cost comparison table")
    sub.add_parser("pv-sweep", help="density error under process variation")
    return parser


def apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.out_dir is not None:
        cfg = replace(cfg, out_dir=str(args.out_dir))
    if args.pv is not None:
        cfg = replace(cfg, pv=args.pv)
    if args.bitstream_len is not None:
        cfg = replace(cfg, bitstream_len=args.bitstream_len)
    if args.grid is not None:
        w, _, h = args.grid.lower().partition("x")
        try:
            cfg = replace(cfg, fusion=replace(cfg.fusion, grid_w=int(w), grid_h=int(h)))
        except ValueError as exc:
            raise ConfigError(f"cannot parse grid {args.grid!r}") from exc
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = apply_overrides(load_config(args.config), args)
        if args.command == "sbg-characterize":
            files = cmd_sbg_characterize(cfg)
        elif args.command == "array-report":
            files = cmd_array_report(cfg)
        elif args.command == "scc-report":
            files = cmd_scc_report(cfg)
        elif args.command == "allocate":
            files = cmd_allocate(cfg, args.netlist, args.assignment)
        elif args.command == "fusion-run":
            files = cmd_fusion_run(cfg)
        elif args.command == "cost-report":
            files = cmd_cost_report(cfg)
        elif args.command == "pv-sweep":
            files = cmd_pv_sweep(cfg)
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in files:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
