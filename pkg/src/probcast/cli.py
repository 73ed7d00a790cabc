"""Command-line entry point: ``probcast <subcommand> [options]``."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .centrality import write_probability_vector
from .engine import aggregate, write_aggregate_csv, write_metrics_csv
from .errors import ConfigError, ConsensusError
from .experiments import (
    FIGURES,
    ExperimentConfig,
    build_setup,
    checkpoint_grid,
    design_probabilities,
    load_config_file,
    reproduce,
    run_corrected_realizations,
    run_realizations,
    series_for,
    write_manifest,
)
from .graph import erdos_renyi, is_connected, max_degree, read_edgelist, write_edgelist
from .mixing import base_mixing_matrix, default_epsilon, verify_convergence_conditions
from .optimizer import objective, write_trace_csv
from .calibrate import save_alpha


def _add_config_options(ap: argparse.ArgumentParser) -> None:
    """Experiment flags; every default is None so config files can fill the gaps."""
    add = ap.add_argument
    add("--config", help="flat key=value configuration file")
    add("--graph", help="edge-list file (otherwise an Erdos-Renyi graph is generated)")
    add("--n", type=int)
    add("--edge-prob", type=float)
    add("--graph-seed", type=int)
    add("--K", "-K", type=float)
    add("--epsilon", type=float)
    add("--method", help="full|degree|pagerank|betweenness|uniform|spsa|file:<path>")
    add("--beta", type=float)
    add("--damping", type=float)
    add("--realizations", type=int)
    add("--slot-budget", type=int)
    add("--tol", type=float)
    add("--max-rounds", type=int)
    add("--checkpoint", type=int)
    add("--init-seed", type=int)
    add("--schedule-seed", type=int)
    add("--calibration-seed", type=int, help="schedule seed for calibration (negative control only)")
    add("--calibration-tol", type=float)
    add("--spsa-seed", type=int)
    add("--spsa-iterations", type=int)
    add("--spsa-a", type=float)
    add("--spsa-c", type=float)
    add("--p-min", type=float)
    add("--p-init")
    add("--output", "-o")


_CONFIG_KEYS = [name for name in ExperimentConfig.field_types()]


def _config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        cfg = cfg.updated(load_config_file(args.config))
    flags = {k: getattr(args, k) for k in _CONFIG_KEYS if getattr(args, k, None) is not None}
    cfg = cfg.updated(flags)
    cfg.validate()
    return cfg


def cmd_generate(args) -> int:
    g = erdos_renyi(args.n, args.edge_prob, args.seed, args.max_retries)
    write_edgelist(g, args.output)
    print(f"n={g.n} edges={g.num_edges} max_degree={max_degree(g)} connected={is_connected(g)}")
    print(f"wrote {args.output}")
    return 0


def cmd_verify(args) -> int:
    if args.graph:
        g, _ = read_edgelist(args.graph)
    else:
        g = erdos_renyi(args.n, args.edge_prob, args.graph_seed)
    eps = args.epsilon if args.epsilon is not None else default_epsilon(g)
    report = verify_convergence_conditions(base_mixing_matrix(g, eps))
    print(f"n={g.n} edges={g.num_edges} max_degree={max_degree(g)} epsilon={eps!r} connected={is_connected(g)}")
    sys.stdout.write(report.to_text())
    return 0 if report.all_hold else 1


def _out(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_outputs(cfg, name, trajs, x0s, out: Path) -> None:
    runs = series_for(trajs, x0s)
    write_metrics_csv(runs, out / f"{name}_metrics.csv")
    write_aggregate_csv(aggregate(runs, checkpoint_grid(cfg, runs)), out / f"{name}_aggregate.csv")
    final = np.mean([r[-1].rmse for r in runs])
    print(f"{name}: realizations={len(runs)} mean_terminal_rmse={final:.6g} "
          f"statuses={sorted({t.status for t in trajs})}")


def cmd_run(args) -> int:
    cfg = _config(args)
    setup = build_setup(cfg)
    out = _out(cfg)
    p, trace = design_probabilities(setup, cfg.method)
    name = cfg.method.replace(":", "_").replace("/", "_")
    write_probability_vector(p, out / f"{name}_p.txt")
    trajs, x0s = run_realizations(setup, p)
    _write_run_outputs(cfg, name, trajs, x0s, out)
    write_manifest(cfg, out / "manifest.txt", {"command": "run", "graph_hash": setup.graph_hash})
    return 0


def cmd_corrected_run(args) -> int:
    cfg = _config(args)
    setup = build_setup(cfg)
    out = _out(cfg)
    p, _ = design_probabilities(setup, cfg.method)
    name = cfg.method.replace(":", "_").replace("/", "_") + "_corrected"
    trajs, x0s, alphas = run_corrected_realizations(setup, p, args.alpha_dir)
    with open(out / f"{name}_calibration.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["realization", "rounds", "calibration_slots", "separate_run_slots", "nominal_JKN", "spread"])
        for r, a in enumerate(alphas):
            w.writerow([r, a.rounds, a.slots, a.separate_run_slots, repr(float(a.nominal_slots(cfg.K))), repr(float(a.spread))])
            save_alpha(a, out / f"{name}_alpha_{r}.txt", setup.graph_hash, p)
    total_cal = sum(a.slots for a in alphas)
    total_run = sum(int(t.cumulative_slots[-1]) for t in trajs)
    print(f"calibration slots (matrix form)={total_cal} consensus slots={total_run}")
    _write_run_outputs(cfg, name, trajs, x0s, out)
    write_manifest(cfg, out / "manifest.txt", {"command": "corrected-run", "graph_hash": setup.graph_hash})
    return 0


def cmd_optimize_p(args) -> int:
    cfg = _config(args)
    setup = build_setup(cfg)
    out = _out(cfg)
    p_init, _ = design_probabilities(setup, cfg.p_init)
    p, trace = design_probabilities(setup, "spsa")
    write_probability_vector(p, out / "spsa_p.txt")
    write_trace_csv(trace, out / "spsa_trace.csv")
    print(f"objective initial={objective(setup.W, p_init):.12g} best={trace.best_f:.12g} "
          f"evaluations={trace.evaluations}")
    write_manifest(cfg, out / "manifest.txt", {"command": "optimize-p", "graph_hash": setup.graph_hash})
    return 0


def cmd_reproduce(args) -> int:
    cfg = _config(args)
    for path in reproduce(cfg, args.figure):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="probcast", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a connected Erdos-Renyi edge list")
    gen.add_argument("--n", type=int, default=100)
    gen.add_argument("--edge-prob", type=float, default=0.1)
    gen.add_argument("--seed", type=int, default=7)
    gen.add_argument("--max-retries", type=int, default=1000)
    gen.add_argument("--output", "-o", default="graph.txt")
    gen.set_defaults(func=cmd_generate)

    ver = sub.add_parser("verify", help="check the consensus conditions of W = I - eps L")
    ver.add_argument("--graph")
    ver.add_argument("--n", type=int, default=100)
    ver.add_argument("--edge-prob", type=float, default=0.1)
    ver.add_argument("--graph-seed", type=int, default=7)
    ver.add_argument("--epsilon", type=float)
    ver.set_defaults(func=cmd_verify)

    for name, func, text in [
        ("run", cmd_run, "biased consensus runs for one probability design"),
        ("corrected-run", cmd_corrected_run, "pre-compensated runs (calibration + replay)"),
        ("optimize-p", cmd_optimize_p, "SPSA optimization of the broadcast probabilities"),
    ]:
        p = sub.add_parser(name, help=text)
        _add_config_options(p)
        if name == "corrected-run":
            p.add_argument("--alpha-dir", help="directory of cached alpha files")
        p.set_defaults(func=func)

    rep = sub.add_parser("reproduce", help="CSV bundle for one figure")
    rep.add_argument("figure", choices=sorted(FIGURES))
    _add_config_options(rep)
    rep.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ConsensusError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
