"""
Seeded randomized verification of the weak-value identities and inequalities.

Trial ``i`` draws everything from ``default_rng([seed, i])``, so any single
trial can be regenerated without replaying the ones before it, and results do
not depend on how trials are split across workers.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hilbert import Observable, State, random_hermitian, random_state, random_unitary
from .weakvalue import (
    BOUND_SLACK,
    PpsEnsemble,
    anomaly_bounds,
    decompose_weak_value,
    identity_resolution_average,
    tradeoff_check,
)

CHECKS = (
    "decomposition",
    "identity_resolution",
    "lower_bound",
    "upper_bound",
    "lambda_max_gap",
    "tradeoff",
)
# Command that replays each check from a single problem document.
REPLAY_COMMAND = {
    "decomposition": "decompose",
    "identity_resolution": "average",
    "lower_bound": "bounds",
    "upper_bound": "bounds",
    "lambda_max_gap": "bounds",
    "tradeoff": "tradeoff",
}
MIN_OVERLAP = 1e-6
DECOMPOSITION_TOL = 1e-10
RESOLUTION_TOL = 1e-9


@dataclass
class Problem:
    A: Observable
    B: Observable
    psi: State
    phi: State
    basis: np.ndarray


def draw_problem(seed: int, index: int, dims: Sequence[int]) -> Problem:
    rng = np.random.default_rng([seed, index])
    d = int(dims[rng.integers(len(dims))])
    A = random_hermitian(d, rng)
    B = random_hermitian(d, rng)
    psi = random_state(d, rng)
    phi = random_state(d, rng)
    while abs(np.vdot(phi.amplitudes, psi.amplitudes)) <= MIN_OVERLAP:
        phi = random_state(d, rng)
    return Problem(A, B, psi, phi, random_unitary(d, rng))


def evaluate(problem: Problem, slack: float = BOUND_SLACK) -> dict:
    """Excess beyond tolerance for every check (``<= 0`` means satisfied)."""
    e = PpsEnsemble(problem.psi, problem.phi)
    report = decompose_weak_value(problem.A, e)
    bounds = anomaly_bounds(problem.A, e, report)
    resolution = identity_resolution_average(problem.A, problem.psi, problem.basis)
    tradeoff = tradeoff_check(problem.A, problem.B, e, slack)
    diff = report.weak_value - (report.average + report.anomalous)
    decomposition = max(abs(diff.real), abs(diff.imag))
    return {
        "decomposition": decomposition - DECOMPOSITION_TOL,
        "identity_resolution": max(
            abs(resolution.weighted_sum - report.average),
            abs(resolution.anomalous_weighted_sum),
        )
        - RESOLUTION_TOL,
        "lower_bound": bounds.lower - bounds.anomaly_modulus - slack,
        "upper_bound": bounds.anomaly_modulus - bounds.upper - slack,
        "lambda_max_gap": bounds.lambda_max_gap - bounds.lambda_gap_bound - slack,
        "tradeoff": tradeoff.rhs - tradeoff.lhs - slack,
    }


def _run_chunk(args):
    seed, start, stop, dims, slack = args
    return [evaluate(draw_problem(seed, i, dims), slack) for i in range(start, stop)]


@dataclass
class FuzzSummary:
    trials: int
    dims: list
    seed: int
    slack: float
    violations: dict = field(default_factory=dict)
    worst_excess: dict = field(default_factory=dict)
    first_violation: dict = field(default_factory=dict)

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())


def run_fuzz(
    trials: int,
    dims: Sequence[int] = range(2, 9),
    seed: int = 0,
    slack: float = BOUND_SLACK,
    workers: int = 1,
    chunk: int = 2000,
) -> FuzzSummary:
    dims = [int(d) for d in dims]
    tasks = [(seed, s, min(s + chunk, trials), dims, slack) for s in range(0, trials, chunk)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_run_chunk, tasks))
    else:
        chunks = [_run_chunk(t) for t in tasks]

    summary = FuzzSummary(trials, dims, seed, slack)
    summary.violations = {name: 0 for name in CHECKS}
    summary.worst_excess = {name: -np.inf for name in CHECKS}
    index = 0
    # merged strictly in trial order
    for results in chunks:
        for excess in results:
            for name in CHECKS:
                x = excess[name]
                if x > summary.worst_excess[name]:
                    summary.worst_excess[name] = x
                if x > 0:
                    summary.violations[name] += 1
                    summary.first_violation.setdefault(name, index)
            index += 1
    return summary

