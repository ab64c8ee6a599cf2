"""Named validation batteries with machine-readable reports."""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from ..netmodel import ParameterError
from ..protocols.common import NON_ELECTED
from ..qprims import grover_phase_distribution, grover_success_probability
from ..statevec import (
    CheckingCircuit,
    grover_iterate,
    grover_star_run,
    marked_pointer_probability,
    phase_estimation_exact_distribution,
)
from .config import SweepConfig
from .fit import fit_scaling
from .sweep import build_graph, resolve_point, run_sweep, run_trial, trial_seed

SUITES = ("qprims-oracle", "protocol-invariants", "scaling")
ORACLE_TOL = 1e-9
SCALING_BUDGET_S = 120.0


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    threshold: float | None = None
    detail: str = ""


@dataclass
class Report:
    suite: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, value=None, threshold=None, detail: str = "") -> None:
        plain = lambda x: x.item() if isinstance(x, np.generic) else x  # noqa: E731
        self.checks.append(Check(name, bool(passed), plain(value), plain(threshold), detail))

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "checks": [asdict(c) for c in self.checks],
        }


def _qprims_oracle(report: Report, max_leaves: int = 8, max_iterations: int = 8, max_points: int = 16) -> None:
    worst = 0.0
    cost_ok = norm_ok = True
    for L in range(1, max_leaves + 1):
        for t_f in range(L + 1):
            marked = set(range(1, t_f + 1))
            run = grover_star_run(L, marked, 0)
            circuit = CheckingCircuit(run.state.layout, marked)
            for t in range(max_iterations + 1):
                if t:
                    run = grover_iterate(run, circuit)
                exact = marked_pointer_probability(run.state, marked)
                worst = max(worst, abs(exact - grover_success_probability(L, t_f, t)))
                cost_ok &= run.rounds == 4 * t and run.messages == 4 * t
                norm_ok &= abs(run.state.norm() - 1.0) <= 1e-10
    report.add("grover-star-equivalence", worst <= ORACLE_TOL, worst, ORACLE_TOL,
               f"stars up to {max_leaves} leaves, all marked counts, t <= {max_iterations}")
    report.add("checking-cost-4-per-iterate", cost_ok)
    report.add("norm-preserved", norm_ok)
    worst = 0.0
    for L in range(1, max_leaves + 1):
        for t_f in range(L + 1):
            for P in range(1, max_points + 1):
                d = phase_estimation_exact_distribution(L, set(range(1, t_f + 1)), P)
                worst = max(worst, float(np.abs(d - grover_phase_distribution(L, t_f, P)).max()))
    report.add("phase-estimation-equivalence", worst <= ORACLE_TOL, worst, ORACLE_TOL,
               f"P <= {max_points}")


def rate_floor(target: float, trials: int) -> float:
    """``target`` minus three binomial standard deviations at that rate."""
    return target - 3 * math.sqrt(target * (1 - target) / trials)


def _protocol_invariants(report: Report, n: int = 256, trials: int = 40, seed: int = 0) -> None:
    floor = rate_floor(0.95, trials)
    for protocol in ("complete", "random-walk", "diameter2", "tree-merge", "agreement"):
        eps = "n ** (-1/5)" if protocol == "agreement" else None
        gamma = "2/15" if protocol == "agreement" else "0"
        cfg = SweepConfig(name="sweep", protocol=protocol, ns=[n], trials=trials, seed=seed, eps=eps, gamma=gamma)
        graph = build_graph(cfg, n)
        point = resolve_point(cfg, graph)
        valid = recount_ok = budget_ok = safety_ok = top_ok = 0
        for t in range(trials):
            rec, out = run_trial(point, graph, trial_seed(seed, protocol, n, t), cfg.constants)
            ctx = out.context
            valid += rec.valid
            recount_ok += ctx.recount_classical() == rec.classical_msgs and ctx.recount_quantum() == rec.quantum_msgs
            budget_ok += rec.rounds <= out.budget_rounds
            if protocol == "agreement":
                safety_ok += len(out.decided_values) <= 1
            elif protocol == "diameter2":
                top = out.top_candidate
                top_ok += top is None or out.status[top] != NON_ELECTED
        rate = valid / trials
        report.add(f"{protocol}:validity-rate", rate >= floor, rate, floor, f"n={n}, {trials} trials")
        report.add(f"{protocol}:ledger-recount", recount_ok == trials, recount_ok, trials)
        report.add(f"{protocol}:round-budget", budget_ok == trials, budget_ok, trials)
        if protocol == "agreement":
            report.add("agreement:no-disagreement", safety_ok == trials, safety_ok, trials)
        if protocol == "diameter2":
            report.add("diameter2:top-candidate-survives", top_ok == trials, top_ok, trials)


def _scaling(report: Report, seed: int = 0) -> None:
    t0 = time.perf_counter()
    cfg = SweepConfig(name="sweep", protocol="complete", ns=[64, 128, 256, 512], trials=5, seed=seed)
    records = run_sweep(cfg, write=False)
    fit = fit_scaling(records, "total_msgs")
    elapsed = time.perf_counter() - t0
    report.add("smoke-records", len(records) == 20, len(records), 20)
    report.add("smoke-fit-finite", math.isfinite(fit.slope) and math.isfinite(fit.residual), fit.slope)
    report.add("smoke-runtime", elapsed <= SCALING_BUDGET_S, elapsed, SCALING_BUDGET_S)


_RUNNERS: dict[str, Callable[..., None]] = {
    "qprims-oracle": _qprims_oracle,
    "protocol-invariants": _protocol_invariants,
    "scaling": _scaling,
}


def validate(suite: str, **options) -> Report:
    if suite not in _RUNNERS:
        raise ParameterError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    report = Report(suite)
    t0 = time.perf_counter()
    _RUNNERS[suite](report, **options)
    report.seconds = time.perf_counter() - t0
    return report
