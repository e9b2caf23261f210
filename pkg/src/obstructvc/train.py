"""Training on obstruction pools or random-subgraph pools, model selection, evaluation."""

from __future__ import annotations

import csv
import logging
import math
from collections import deque
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .graph import Graph, er_sample, induced_subgraph, is_vertex_cover, read_graph
from .obstructions import generate_up_to, read_level
from .s2v import Adam, DivergenceError, ModelParams, greedy_cover, run_episode, train_step
from .solvers import (APPROX2, DEFAULT_BUDGET, EXACT, GREEDY, MODEL, UnsolvedError,
                      exact_vc, greedy_maxdeg, matching_2approx)

log = logging.getLogger(__name__)

POOL_MODES = ("obstructions", "random-subgraphs")
# levels up to this k are cheap enough to build in memory when no directory is given
IN_MEMORY_K_MAX = 5


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


class PoolError(ValueError):
    pass


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch, best, report):
        self.epoch, self.best, self.report = epoch, best, report
        super().__init__(f"training diverged at epoch {epoch} (non-finite loss)")


@dataclass
class TrainConfig:
    pool_mode: str = "obstructions"
    k_min: int = 1
    k_max: int = 3
    obstruction_dir: Optional[str] = None
    target_graph: Optional[str] = None
    subgraph_min: int = 15
    subgraph_max: int = 60
    subgraph_pool_size: int = 10000
    epochs: int = 100
    episodes_per_epoch: int = 16
    batch_size: int = 64
    learning_rate: float = 1e-3
    max_grad_norm: float = 10.0
    p: int = 64
    T: int = 4
    n_step: int = 2
    discount: float = 1.0
    replay_size: int = 50000
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay_epochs: int = 0
    target_refresh: int = 100
    init_scale: float = 0.01
    seed: int = 0
    validation_count: int = 20
    validation_n: int = 15
    validation_p: float = 0.15
    validation_seed: int = 1000
    exact_budget: int = DEFAULT_BUDGET

    def validate(self) -> "TrainConfig":
        errors = []
        if self.pool_mode not in POOL_MODES:
            errors.append(f"pool_mode must be one of {POOL_MODES}, got {self.pool_mode!r}")
        if self.pool_mode == "random-subgraphs" and not self.target_graph:
            errors.append("pool_mode=random-subgraphs requires target_graph")
        if self.pool_mode == "obstructions" and not 1 <= self.k_min <= self.k_max:
            errors.append(f"need 1 <= k_min <= k_max, got {self.k_min}..{self.k_max}")
        if not 1 <= self.subgraph_min <= self.subgraph_max:
            errors.append("need 1 <= subgraph_min <= subgraph_max")
        for name in ("epochs", "episodes_per_epoch", "batch_size", "p", "n_step",
                     "replay_size", "target_refresh", "validation_count", "subgraph_pool_size"):
            if getattr(self, name) < 1:
                errors.append(f"{name} must be >= 1")
        if self.T < 0:
            errors.append("T must be >= 0")
        if self.learning_rate < 0:
            errors.append("learning_rate must be >= 0")
        for name in ("eps_start", "eps_end", "validation_p"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                errors.append(f"{name} must lie in [0, 1]")
        if errors:
            raise ConfigError(errors)
        return self

    def decay_epochs(self) -> int:
        return self.eps_decay_epochs or max(1, self.epochs // 2)


def parse_config(text: str) -> TrainConfig:
    """Flat ``key = value`` lines; ``#`` starts a comment. All errors are reported together."""
    types = {f.name: f.type for f in fields(TrainConfig)}
    values, errors = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected key=value, got {line!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in types:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        kind = types[key]
        try:
            if kind == "int":
                values[key] = int(value)
            elif kind == "float":
                values[key] = float(value)
            elif kind == "Optional[str]" and value.lower() in ("", "none"):
                values[key] = None
            else:
                values[key] = value
        except ValueError:
            errors.append(f"line {lineno}: {key} expects {kind}, got {value!r}")
    if errors:
        raise ConfigError(errors)
    try:
        return TrainConfig(**values).validate()
    except ConfigError as exc:
        raise ConfigError(errors + exc.errors) from None


def format_config(config: TrainConfig) -> str:
    return "".join(f"{f.name} = {getattr(config, f.name)}\n" for f in fields(TrainConfig))


# ---------------------------------------------------------------- pools and data

def _seeds(seed: int):
    init, pool, episodes, replay = np.random.SeedSequence(seed).spawn(4)
    return {"init": int(init.generate_state(1)[0]), "pool": pool,
            "episodes": episodes, "replay": replay}


def build_pool(config: TrainConfig) -> list[Graph]:
    """Training graphs: stored obstruction levels, or random induced subgraphs of a target."""
    if config.pool_mode == "obstructions":
        ks = range(config.k_min, config.k_max + 1)
        if config.obstruction_dir:
            try:
                pool = [g for k in ks for g in read_level(config.obstruction_dir, k).graphs()]
            except FileNotFoundError as exc:
                raise PoolError(str(exc)) from None
        elif config.k_max <= IN_MEMORY_K_MAX:
            levels = generate_up_to(config.k_max, budget=config.exact_budget)
            pool = [g for k in ks for g in levels[k].graphs()]
        else:
            raise PoolError(f"missing obstruction level k={config.k_max}: set obstruction_dir "
                            f"(in-memory generation stops at k={IN_MEMORY_K_MAX})")
    elif config.pool_mode == "random-subgraphs":
        if config.target_graph is None:
            raise PoolError("random-subgraphs mode needs a target graph")
        target = (config.target_graph if isinstance(config.target_graph, Graph)
                  else read_graph(config.target_graph))
        rng = np.random.default_rng(_seeds(config.seed)["pool"])
        hi = min(config.subgraph_max, target.n)
        lo = min(config.subgraph_min, hi)
        pool = []
        for _ in range(config.subgraph_pool_size):
            size = int(rng.integers(lo, hi + 1))
            pool.append(induced_subgraph(target, rng.choice(target.n, size, replace=False)))
    else:
        raise PoolError(f"unknown pool mode {config.pool_mode!r}")
    if not pool:
        raise PoolError("training pool is empty")
    return pool


def er_graph_set(count: int, n: int, p: float, seed: int) -> list[Graph]:
    """``count`` ER graphs with consecutive seeds ``seed, seed + 1, ...``."""
    return [er_sample(n, p, seed + i) for i in range(count)]


def validation_set(config: TrainConfig) -> list[Graph]:
    return er_graph_set(config.validation_count, config.validation_n,
                        config.validation_p, config.validation_seed)


# ---------------------------------------------------------------- reports

@dataclass
class GraphRecord:
    name: str
    n: int
    m: int
    sizes: dict[str, int]
    exact: Optional[int] = None


@dataclass
class EvalReport:
    graphs: list[GraphRecord] = field(default_factory=list)
    history: list[dict] = field(default_factory=list)
    initial_validation_mean: Optional[float] = None
    best_epoch: int = 0

    def column(self, tag: str) -> list[Optional[int]]:
        return [r.exact if tag == EXACT else r.sizes.get(tag) for r in self.graphs]


def mse(report: EvalReport, algorithm: str) -> float:
    """Mean of (algorithm size - exact vc)^2 over graphs that have both values."""
    diffs = [(r.exact if algorithm == EXACT else r.sizes[algorithm]) - r.exact
             for r in report.graphs
             if r.exact is not None and (algorithm == EXACT or algorithm in r.sizes)]
    if not diffs:
        raise ValueError(f"no graph has both an exact value and a {algorithm!r} size")
    return float(np.mean(np.square(diffs)))


def evaluate(params: Optional[ModelParams], graphs, names=None,
             budget: int = DEFAULT_BUDGET) -> EvalReport:
    """Cover sizes of the model, both heuristics and the exact solver on each graph.

    ``params=None`` skips the model column. Exact values that exceed the
    solver budget are left as ``None``.
    """
    names = names or [f"g{i}" for i in range(len(graphs))]
    report = EvalReport()
    for name, g in zip(names, graphs):
        sizes = {GREEDY: greedy_maxdeg(g).size, APPROX2: matching_2approx(g).size}
        if params is not None:
            sizes[MODEL] = greedy_cover(g, params).size
        try:
            exact = exact_vc(g, budget=budget).size
        except UnsolvedError:
            log.warning("%s: exact vertex cover over budget, leaving it blank", name)
            exact = None
        report.graphs.append(GraphRecord(name, g.n, g.m, sizes, exact))
    return report


def _model_sizes(params, graphs):
    out = []
    for g in graphs:
        res = greedy_cover(g, params)
        if not is_vertex_cover(g, res.cover):  # pragma: no cover - run_episode guarantees it
            raise AssertionError("model produced an invalid cover")
        out.append(res.size)
    return out


# ---------------------------------------------------------------- training

def epsilon_at(config: TrainConfig, epoch: int) -> float:
    frac = min(1.0, (epoch - 1) / config.decay_epochs())
    return config.eps_start + frac * (config.eps_end - config.eps_start)


def train(config: TrainConfig, pool=None, validation=None, progress=None):
    """Train with experience replay; return ``(best_params, report)``.

    After every epoch the greedy policy is scored on the validation graphs;
    the returned parameters minimize the mean validation cover size, with
    the untrained parameters as a candidate and the earliest epoch winning
    ties. ``report.history`` holds one row per epoch.
    """
    config.validate()
    pool = build_pool(config) if pool is None else pool
    validation = validation_set(config) if validation is None else validation
    exact = [exact_vc(g, budget=config.exact_budget).size for g in validation]
    seeds = _seeds(config.seed)
    ep_rng = np.random.default_rng(seeds["episodes"])
    replay_rng = np.random.default_rng(seeds["replay"])

    params = ModelParams.init(config.p, config.T, seeds["init"], config.init_scale)
    target = params.copy()
    optimizer = Adam()
    replay: deque = deque(maxlen=config.replay_size)

    report = EvalReport(graphs=[])
    sizes = _model_sizes(params, validation)
    best, best_mean = params.copy(), float(np.mean(sizes))
    report.initial_validation_mean = best_mean
    steps = 0
    for epoch in range(1, config.epochs + 1):
        eps = epsilon_at(config, epoch)
        fresh = 0
        for _ in range(config.episodes_per_epoch):
            g = pool[int(ep_rng.integers(len(pool)))]
            _, trs = run_episode(g, params, eps, int(ep_rng.integers(2**63)), config.n_step)
            replay.extend(trs)
            fresh += len(trs)
        losses = []
        for _ in range(max(1, math.ceil(fresh / config.batch_size))):
            if not replay:
                break
            take = min(config.batch_size, len(replay))
            idx = replay_rng.choice(len(replay), take, replace=False)
            try:
                params, loss = train_step([replay[i] for i in idx], params, config.learning_rate,
                                          config.discount, target, optimizer, config.max_grad_norm)
            except DivergenceError:
                raise TrainingDiverged(epoch, best, report) from None
            losses.append(loss)
            steps += 1
            if steps % config.target_refresh == 0:
                target = params.copy()
        sizes = _model_sizes(params, validation)
        mean = float(np.mean(sizes))
        row = {"epoch": epoch, "pool_mode": config.pool_mode,
               "validation_mean_cover": mean,
               "loss_mean": float(np.mean(losses)) if losses else float("nan"),
               "mse_vs_exact": float(np.mean(np.square(np.subtract(sizes, exact))))}
        report.history.append(row)
        if mean < best_mean:
            best, best_mean, report.best_epoch = params.copy(), mean, epoch
        if progress:
            progress(row)
    names = [f"val{i}" for i in range(len(validation))]
    report.graphs = [GraphRecord(nm, g.n, g.m, {MODEL: s}, e) for nm, g, s, e in
                     zip(names, validation, _model_sizes(best, validation), exact)]
    return best, report


# ---------------------------------------------------------------- files

HISTORY_HEADER = ["epoch", "pool_mode", "validation_mean_cover", "loss_mean", "mse_vs_exact"]
EVAL_HEADER = ["graph_name", "n", "m", "alg1", "alg2", "model", "exact"]


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_history_csv(report: EvalReport, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(HISTORY_HEADER)
        for row in report.history:
            w.writerow([_fmt(row[k]) for k in HISTORY_HEADER])


def read_history_csv(path) -> list[dict]:
    with open(path, newline="") as f:
        return [{"epoch": int(r["epoch"]), "pool_mode": r["pool_mode"],
                 "validation_mean_cover": float(r["validation_mean_cover"]),
                 "loss_mean": float(r["loss_mean"]), "mse_vs_exact": float(r["mse_vs_exact"])}
                for r in csv.DictReader(f)]


def write_evaluation_csv(report: EvalReport, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(EVAL_HEADER)
        for r in report.graphs:
            w.writerow([r.name, r.n, r.m, _fmt(r.sizes.get(GREEDY)), _fmt(r.sizes.get(APPROX2)),
                        _fmt(r.sizes.get(MODEL)), _fmt(r.exact)])


def write_manifest(config: TrainConfig, report: EvalReport, path, pool_size: int) -> None:
    lines = [f"obstructvc {__version__}", "[config]", format_config(config).rstrip("\n"),
             "[seeds]",
             "init/pool/episodes/replay = SeedSequence(seed).spawn(4)",
             f"validation = ER(n={config.validation_n}, p={config.validation_p}) "
             f"seeds {config.validation_seed}..{config.validation_seed + config.validation_count - 1}",
             "[notes]",
             "hyper-parameter defaults are stand-ins for the unpublished reference setup",
             "one epoch = episodes_per_epoch episodes + ceil(new transitions / batch_size) updates",
             "[result]",
             f"pool_size = {pool_size}",
             f"epochs_run = {len(report.history)}",
             f"initial_validation_mean = {report.initial_validation_mean!r}",
             f"best_epoch = {report.best_epoch}"]
    Path(path).write_text("\n".join(lines) + "\n")
