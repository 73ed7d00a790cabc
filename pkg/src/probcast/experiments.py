"""Experiment configuration and the three figure pipelines.

Each realization ``r`` draws its initial values from block ``r`` of the
``(init_seed, "init-values")`` stream and its schedules from the
``(schedule_seed, "schedule:r")`` stream, so every curve is a pure
function of the configuration.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .calibrate import (
    CALIBRATION_STOP,
    AlphaWeights,
    alpha_cache_key,
    corrected_run,
    estimate_alpha,
    load_alpha,
    save_alpha,
)
from .centrality import (
    betweenness_scores,
    check_probability_vector,
    default_beta,
    degree_scores,
    pagerank_scores,
    probability_vector,
    read_probability_vector,
    shifted_scores,
    uniform_probability,
)
from .engine import (
    MetricsRow,
    StopRule,
    Trajectory,
    aggregate,
    metrics_series,
    run_consensus,
    write_aggregate_csv,
)
from .errors import ConfigError
from .graph import Graph, erdos_renyi, graph_hash, is_connected, read_edgelist
from .mixing import base_mixing_matrix
from .optimizer import OptimizationTrace, SpsaConfig, spsa_optimize
from .scheduler import ScheduleStream
from .streams import Stream

__all__ = [
    "ExperimentConfig",
    "Setup",
    "load_config_file",
    "write_manifest",
    "build_setup",
    "design_probabilities",
    "seed_bundle",
    "initial_values",
    "schedule_stream",
    "run_realizations",
    "run_corrected_realizations",
    "Curve",
    "FIGURES",
    "reproduce",
]

METHODS = ("full", "degree", "pagerank", "betweenness", "uniform", "spsa")


@dataclass
class ExperimentConfig:
    graph: str | None = None  # edge-list path; generated when unset
    n: int = 100
    edge_prob: float = 0.1
    graph_seed: int = 7
    max_retries: int = 1000
    K: float = 80.0
    epsilon: float | None = None  # None means 1 / (max_degree + 1)
    method: str = "betweenness"
    beta: float | None = None  # None means 1% of the largest betweenness
    damping: float = 0.85
    realizations: int = 10
    slot_budget: int | None = 20_000
    tol: float = 1e-8
    max_rounds: int = 10_000
    checkpoint: int = 100
    init_seed: int = 1
    schedule_seed: int = 2
    calibration_seed: int | None = None  # None means schedule_seed (required for exactness)
    calibration_tol: float = 1e-12
    spsa_seed: int = 3
    spsa_iterations: int = 500
    spsa_a: float = 0.5
    spsa_c: float = 0.05
    p_min: float = 0.01
    p_init: str = "betweenness"
    output: str = "out"

    @classmethod
    def field_types(cls) -> dict[str, Any]:
        return {f.name: f.type for f in dataclasses.fields(cls)}

    def updated(self, values: dict[str, Any]) -> "ExperimentConfig":
        known = self.field_types()
        clean = {}
        for key, raw in values.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown configuration key {key!r}")
            clean[name] = _coerce(name, known[name], raw)
        return dataclasses.replace(self, **clean)

    def validate(self, n: int | None = None) -> None:
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.K <= 0 or (n is not None and self.K > n):
            raise ConfigError(f"K={self.K} must lie in (0, N={n}]")
        if self.graph is not None and not Path(self.graph).exists():
            raise ConfigError(f"graph file {self.graph} does not exist")
        if not (self.method in METHODS or self.method.startswith("file:")):
            raise ConfigError(f"unknown method {self.method!r}")
        if self.checkpoint < 1:
            raise ConfigError("checkpoint must be >= 1")

    def stop_rule(self) -> StopRule:
        return StopRule(tol=self.tol, max_rounds=self.max_rounds, max_slots=self.slot_budget)

    def spsa_config(self) -> SpsaConfig:
        return SpsaConfig(
            iterations=self.spsa_iterations, a=self.spsa_a, c=self.spsa_c, p_min=self.p_min, seed=self.spsa_seed
        )


def _coerce(name: str, typ: Any, raw: Any) -> Any:
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    typ = str(typ)
    if text.lower() in ("none", "") and "None" in typ:
        return None
    try:
        if typ.startswith("int"):
            return int(text)
        if typ.startswith("float"):
            return float(text)
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from exc
    return text


def load_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key=value`` text; ``#`` starts a comment line."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def write_manifest(cfg: ExperimentConfig, path: str | Path, extra: dict[str, Any] | None = None) -> None:
    lines = [f"# probcast {__version__} manifest; reusable as --config"]
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        lines.append(f"{f.name}={'none' if value is None else value}")
    for key, value in (extra or {}).items():
        lines.append(f"# {key}={value}")
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class Setup:
    graph: Graph
    W: np.ndarray
    epsilon: float
    cfg: ExperimentConfig

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def graph_hash(self) -> str:
        return graph_hash(self.graph)


def build_setup(cfg: ExperimentConfig) -> Setup:
    if cfg.graph is not None:
        g, _ = read_edgelist(cfg.graph)
    else:
        g = erdos_renyi(cfg.n, cfg.edge_prob, cfg.graph_seed, cfg.max_retries)
    cfg.validate(g.n)
    if not is_connected(g):
        raise ConfigError("graph is not connected")
    eps = cfg.epsilon if cfg.epsilon is not None else 1.0 / (max(len(a) for a in g.adjacency_lists()) + 1)
    return Setup(g, base_mixing_matrix(g, eps), eps, cfg)


def design_probabilities(setup: Setup, method: str) -> tuple[np.ndarray, OptimizationTrace | None]:
    """Broadcast probabilities for a method selector; SPSA also returns its trace."""
    cfg, g, K = setup.cfg, setup.graph, setup.cfg.K
    if method == "full":
        return np.ones(g.n), None
    if method == "uniform":
        return uniform_probability(g.n, K), None
    if method == "degree":
        return probability_vector(degree_scores(g), K), None
    if method == "pagerank":
        return probability_vector(pagerank_scores(g, cfg.damping), K), None
    if method == "betweenness":
        b = betweenness_scores(g)
        beta = cfg.beta if cfg.beta is not None else default_beta(b)
        return probability_vector(shifted_scores(b, beta), K), None
    if method == "spsa":
        if cfg.p_init == "spsa":
            raise ConfigError("p_init cannot be spsa")
        p0, _ = design_probabilities(setup, cfg.p_init)
        return spsa_optimize(setup.W, K, p0, cfg.spsa_config())
    if method.startswith("file:"):
        p = read_probability_vector(method[5:])
        if p.size != g.n:
            raise ConfigError(f"probability file has {p.size} entries, graph has {g.n} nodes")
        return check_probability_vector(p), None
    raise ConfigError(f"unknown method {method!r}")


def seed_bundle(cfg: ExperimentConfig, bundle: int) -> ExperimentConfig:
    """Configuration with the ``bundle``-th (init, schedule) seed pair; bundle 0 keeps the defaults."""
    return dataclasses.replace(cfg, init_seed=2 * bundle + 1, schedule_seed=2 * bundle + 2)


def initial_values(cfg: ExperimentConfig, realization: int, n: int) -> np.ndarray:
    return Stream(cfg.init_seed, "init-values").normal(realization, n)


def schedule_stream(seed: int, realization: int) -> ScheduleStream:
    return ScheduleStream(seed, f"schedule:{realization}")


def checkpoint_grid(cfg: ExperimentConfig, runs: list[list[MetricsRow]]) -> np.ndarray:
    top = cfg.slot_budget
    if top is None:
        top = max(run[-1].cumulative_slots for run in runs)
    return np.arange(0, top + 1, cfg.checkpoint)


def run_realizations(setup: Setup, p: np.ndarray) -> tuple[list[Trajectory], list[np.ndarray]]:
    cfg = setup.cfg
    trajs, x0s = [], []
    for r in range(cfg.realizations):
        x0 = initial_values(cfg, r, setup.n)
        trajs.append(run_consensus(setup.W, x0, p, schedule_stream(cfg.schedule_seed, r), cfg.stop_rule()))
        x0s.append(x0)
    return trajs, x0s


def run_corrected_realizations(
    setup: Setup, p: np.ndarray, alpha_dir: str | Path | None = None
) -> tuple[list[Trajectory], list[np.ndarray], list[AlphaWeights]]:
    """Calibrate and run each realization; alpha files are reused from ``alpha_dir`` when present."""
    cfg = setup.cfg
    calib_seed = cfg.schedule_seed if cfg.calibration_seed is None else cfg.calibration_seed
    calib_stop = StopRule(tol=cfg.calibration_tol, max_rounds=CALIBRATION_STOP.max_rounds)
    trajs, x0s, alphas = [], [], []
    for r in range(cfg.realizations):
        x0 = initial_values(cfg, r, setup.n)
        cal_stream = schedule_stream(calib_seed, r)
        alpha = None
        cache = None
        if alpha_dir is not None:
            key = alpha_cache_key(setup.graph_hash, p, cal_stream.seed, cal_stream.label)
            cache = Path(alpha_dir) / f"alpha_{key}.txt"
            if cache.exists():
                alpha, _ = load_alpha(cache)
        if alpha is None:
            alpha = estimate_alpha(setup.W, p, cal_stream, calib_stop)
            if cache is not None:
                cache.parent.mkdir(parents=True, exist_ok=True)
                save_alpha(alpha, cache, setup.graph_hash, p)
        res = corrected_run(
            setup.W, x0, p, schedule_stream(cfg.schedule_seed, r), cfg.stop_rule(), alpha=alpha
        )
        trajs.append(res.trajectory)
        x0s.append(x0)
        alphas.append(alpha)
    return trajs, x0s, alphas


def series_for(trajs: list[Trajectory], x0s: list[np.ndarray]) -> list[list[MetricsRow]]:
    return [metrics_series(t, float(np.mean(x0))) for t, x0 in zip(trajs, x0s)]


@dataclass
class Curve:
    name: str
    runs: list[list[MetricsRow]]
    trajectories: list[Trajectory]
    x0s: list[np.ndarray]
    p: np.ndarray


FIGURES = {
    "fig1": ("full", "degree", "pagerank", "betweenness"),
    "fig2": ("full", "betweenness", "betweenness-corrected"),
    "fig3": ("full", "betweenness", "spsa"),
}


def figure_curves(setup: Setup, figure: str) -> tuple[list[Curve], dict[str, Any]]:
    if figure not in FIGURES:
        raise ConfigError(f"unknown figure {figure!r}; choose from {sorted(FIGURES)}")
    curves, info = [], {}
    designed: dict[str, np.ndarray] = {}
    for name in FIGURES[figure]:
        method = name.removesuffix("-corrected")
        if method not in designed:
            p, trace = design_probabilities(setup, method)
            designed[method] = p
            if trace is not None:
                info["spsa_initial_objective"] = repr(float(trace.objectives[0]))
                info["spsa_best_objective"] = repr(float(trace.best_f))
        p = designed[method]
        if name.endswith("-corrected"):
            trajs, x0s, alphas = run_corrected_realizations(setup, p)
            info["calibration_rounds"] = ",".join(str(a.rounds) for a in alphas)
            info["calibration_slots"] = ",".join(str(a.slots) for a in alphas)
        else:
            trajs, x0s = run_realizations(setup, p)
        curves.append(Curve(name, series_for(trajs, x0s), trajs, x0s, p))
    return curves, info


def reproduce(cfg: ExperimentConfig, figure: str, outdir: str | Path | None = None) -> list[Path]:
    """Write one aggregated CSV per curve of ``figure`` plus a manifest; returns the paths."""
    setup = build_setup(cfg)
    out = Path(outdir if outdir is not None else cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    curves, info = figure_curves(setup, figure)
    written = []
    for curve in curves:
        grid = checkpoint_grid(cfg, curve.runs)
        path = out / f"{figure}_{curve.name}.csv"
        write_aggregate_csv(aggregate(curve.runs, grid), path)
        written.append(path)
    manifest = out / f"{figure}_manifest.txt"
    extra = {"figure": figure, "graph_hash": setup.graph_hash, "epsilon": repr(float(setup.epsilon)), **info}
    write_manifest(cfg, manifest, extra)
    written.append(manifest)
    return written
