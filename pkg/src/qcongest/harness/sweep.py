"""Deterministic trial execution over a grid of network sizes."""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from .. import graphs
from ..netmodel import Graph, RandomSource, derive_seed
from ..protocols import (
    quantum_agreement,
    quantum_general_le,
    quantum_le_complete,
    quantum_qw_le,
    quantum_rw_le,
)
from .config import ConfigError, SweepConfig, evaluate
from .records import RunRecord, write_csv

DEFAULT_K = {
    "complete": "ceil(n ** (1/3))",
    "random-walk": "ceil(tau ** (2/3) * n ** (1/3))",
    "diameter2": "ceil(n ** (2/3))",
}
VERTEX_TRANSITIVE = ("complete", "hypercube", "cycle")


def graph_params(family: str, n: int) -> dict:
    if family == "diameter2_random":
        return {"p": min(1.0, 2.0 * n ** (-1 / 3))}
    if family == "gnm":
        return {"m": min(n * (n - 1) // 2, round(n ** 1.5))}
    return {}


def build_graph(cfg: SweepConfig, n: int) -> Graph:
    family = cfg.graph_family
    spec = graphs.GraphSpec(family, n, derive_seed(cfg.seed, "graph", family, n), graph_params(family, n))
    return graphs.generate(spec)


def mixing_time(graph: Graph, family: str, tolerance: float | None = None) -> int:
    starts = np.array([0]) if family in VERTEX_TRANSITIVE else None
    return graphs.estimate_mixing_time(graph, tolerance, starts=starts, max_degree_walk=True)


@dataclass(frozen=True)
class PointParams:
    """Resolved per-n parameters shared by every trial at that size."""

    protocol: str
    n: int
    m: int
    k: int | None
    tau: int | None
    eps: float | None
    gamma: float | None
    inputs: str


def resolve_point(cfg: SweepConfig, graph: Graph) -> PointParams:
    n = graph.n
    names: dict[str, float] = {"n": n, "m": graph.m}
    tau = None
    if cfg.protocol == "random-walk":
        if cfg.tau == "auto":
            tol = evaluate(cfg.tv_tolerance, **names) if cfg.tv_tolerance else None
            tau = mixing_time(graph, cfg.graph_family, tol)
        else:
            tau = int(cfg.tau)
        tau = max(1, tau)
        names["tau"] = tau
    k = None
    if cfg.protocol in DEFAULT_K:
        k = int(math.ceil(evaluate(cfg.k or DEFAULT_K[cfg.protocol], **names) - 1e-9))
    eps = gamma = None
    if cfg.protocol == "agreement":
        eps = float(evaluate(cfg.eps, **names))
        gamma = float(evaluate(cfg.gamma, **names))
    return PointParams(cfg.protocol, n, graph.m, k, tau, eps, gamma, cfg.inputs)


def agreement_inputs(pattern: str, n: int, seed: int) -> np.ndarray:
    if pattern == "half":
        return (np.arange(n) % 2).astype(np.int64)
    if pattern == "zeros":
        return np.zeros(n, dtype=np.int64)
    if pattern == "ones":
        return np.ones(n, dtype=np.int64)
    return np.random.default_rng(derive_seed(seed, "inputs")).integers(0, 2, n)


def execute(point: PointParams, graph: Graph, seed: int, constants) -> Any:
    rng = RandomSource(seed)
    p = point.protocol
    if p == "complete":
        return quantum_le_complete(graph, point.k, rng, constants)
    if p == "random-walk":
        return quantum_rw_le(graph, point.tau, point.k, rng, constants)
    if p == "diameter2":
        return quantum_qw_le(graph, point.k, rng, constants)
    if p == "tree-merge":
        return quantum_general_le(graph, rng, constants)
    if p == "agreement":
        inputs = agreement_inputs(point.inputs, graph.n, seed)
        return quantum_agreement(graph, inputs, point.eps, point.gamma, rng, constants)
    raise ConfigError(f"unknown protocol {p!r}")


def run_trial(point: PointParams, graph: Graph, seed: int, constants, timing: bool = False) -> tuple[RunRecord, Any]:
    t0 = time.perf_counter()
    out = execute(point, graph, seed, constants)
    wall = (time.perf_counter() - t0) * 1000 if timing else 0.0
    led = out.ledger
    rec = RunRecord(
        protocol=point.protocol, n=point.n, m=point.m, k=point.k, tau=point.tau,
        eps=point.eps, gamma=point.gamma, seed=seed, valid=bool(out.valid),
        rounds=led.rounds, classical_msgs=led.classical_messages, quantum_msgs=led.quantum_messages,
        wall_ms=round(wall, 3),
    )
    return rec, out


def trial_seed(master: int, protocol: str, n: int, trial: int) -> int:
    return derive_seed(master, protocol, n, trial)


_WORKER: dict = {}


def _init_worker(point: PointParams, graph: Graph, constants, timing: bool) -> None:
    _WORKER.update(point=point, graph=graph, constants=constants, timing=timing)


def _worker_trial(seed: int) -> RunRecord:
    w = _WORKER
    return run_trial(w["point"], w["graph"], seed, w["constants"], w["timing"])[0]


def run_sweep(cfg: SweepConfig, write: bool = True, progress=None) -> list[RunRecord]:
    """All trials of ``cfg`` in (n, trial) order; written to ``cfg.out`` when set."""
    records: list[RunRecord] = []
    for n in cfg.ns:
        graph = build_graph(cfg, n)
        point = resolve_point(cfg, graph)
        seeds = [trial_seed(cfg.seed, cfg.protocol, n, t) for t in range(cfg.trials)]
        if cfg.workers > 1 and cfg.trials > 1:
            with ProcessPoolExecutor(
                cfg.workers, initializer=_init_worker, initargs=(point, graph, cfg.constants, cfg.timing)
            ) as pool:
                chunk = max(1, cfg.trials // (4 * cfg.workers))
                batch = list(pool.map(_worker_trial, seeds, chunksize=chunk))
        else:
            batch = [run_trial(point, graph, s, cfg.constants, cfg.timing)[0] for s in seeds]
        records.extend(batch)
        if progress:
            progress(n, batch)
    if write and cfg.out:
        write_csv(records, cfg.out)
    return records


def with_overrides(cfg: SweepConfig, **overrides) -> SweepConfig:
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})


def output_path(cfg: SweepConfig, base: str | Path | None) -> str | None:
    """Where a sweep writes; several sweeps sharing one override path get name suffixes."""
    if base is None:
        return cfg.out
    base = Path(base)
    suffix = cfg.name.partition(".")[2]
    return str(base.with_name(f"{base.stem}-{suffix}{base.suffix}")) if suffix else str(base)
