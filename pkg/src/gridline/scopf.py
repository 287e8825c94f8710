"""Preventative N-1 security-constrained DCOPF via contingency screening.

Instead of enumerating every (monitored, outaged) branch pair up front,
post-contingency flows are estimated from the base dispatch with the LODF
matrix, only the violated pairs get constraint rows, and the model is
re-solved until no new violations appear. Rows accumulate across
iterations (never dropped), so the objective is nondecreasing and the
procedure terminates. Appended rows carry penalized slacks so a violation
whose avoidance is costlier than the penalty shows up as nonzero slack
with its shadow price capped at the penalty, instead of infeasibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dispatch import (DEFAULT_PENALTY, DispatchResult, FlowRow, HourData,
                       base_flow_rows, build_problem, solve_problem)
from .factors import SensitivityFactors
from .lp import OPTIMAL
from .network import Network

SCREEN_TOLERANCE = 1e-6  # relative to each contingency limit
DEFAULT_MAX_ITERATIONS = 20


@dataclass(frozen=True)
class Violation:
    monitored: int  # branch position
    outaged: int  # branch position
    overload: float  # MW beyond the contingency limit


@dataclass(frozen=True)
class ViolationSet:
    """Screened (monitored, outaged) pairs, sorted by overload descending
    (ties by pair) for deterministic iteration order."""

    violations: tuple[Violation, ...]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(v.monitored, v.outaged) for v in self.violations]

    def __len__(self) -> int:
        return len(self.violations)

    def __bool__(self) -> bool:
        return bool(self.violations)


@dataclass
class ActiveRowSet:
    """Cumulative contingency rows, one per distinct (monitored, outaged)
    pair, in first-seen order."""

    rows: list[FlowRow] = field(default_factory=list)
    _pairs: set[tuple[int, int]] = field(default_factory=set)

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return pair in self._pairs

    def add(self, pair: tuple[int, int], row: FlowRow) -> None:
        if pair in self._pairs:
            raise ValueError(f"duplicate contingency row for pair {pair}")
        self._pairs.add(pair)
        self.rows.append(row)


def post_contingency_flows(f_base: np.ndarray, lodf: np.ndarray) -> np.ndarray:
    """L x L matrix whose column c holds branch flows after the outage of c.

    Radial columns are NaN (invalid, never screened); diagonal entries are
    exactly zero for non-radial outages since LODF[c, c] = -1.
    """
    if f_base.shape[0] != lodf.shape[0]:
        raise ValueError("flow vector and LODF dimensions disagree")
    return f_base[:, None] + lodf * f_base[None, :]


def screen_violations(f_cont: np.ndarray, contingency_limits: np.ndarray,
                      tolerance: float = SCREEN_TOLERANCE) -> ViolationSet:
    """All pairs whose post-contingency flow magnitude exceeds the monitored
    branch's contingency limit (plus a relative feasibility tolerance).

    NaN columns (radial outages) and the b = c diagonal are excluded; a
    branch's own outage leaves zero flow on itself.
    """
    limits = np.asarray(contingency_limits, dtype=float)
    overload = np.abs(f_cont) - limits[:, None]
    with np.errstate(invalid="ignore"):
        mask = overload > tolerance * limits[:, None]
    np.fill_diagonal(mask, False)
    found = [Violation(int(b), int(c), float(overload[b, c]))
             for b, c in zip(*np.nonzero(mask))]
    found.sort(key=lambda v: (-v.overload, v.monitored, v.outaged))
    return ViolationSet(tuple(found))


@dataclass
class ScopfResult:
    dispatch: DispatchResult
    iterations: int  # while-loop passes (penalized re-solves)
    violations: ViolationSet  # residual; nonempty only on a flagged exit
    converged: bool
    flow_rows: tuple[FlowRow, ...]  # base rows + appended contingency rows
    trace: list[tuple[int, int, float]]  # (iteration, rows appended, objective)


def contingency_row(factors: SensitivityFactors, monitored: int, outaged: int,
                    limit: float) -> FlowRow:
    """Post-contingency flow on the monitored branch as a function of
    injections: PTDF_b + LODF[b, c] * PTDF_c, limited at the monitored
    branch's contingency rating, slack-allowed."""
    coefficients = factors.ptdf[monitored] + factors.lodf[monitored, outaged] * factors.ptdf[outaged]
    return FlowRow(coefficients, float(limit), True, monitored, outaged)


def solve_scdcopf(network: Network, factors: SensitivityFactors, data: HourData,
                  normal_limits: np.ndarray, contingency_limits: np.ndarray,
                  max_iterations: int = DEFAULT_MAX_ITERATIONS,
                  penalty_price: float = DEFAULT_PENALTY,
                  slack_base_rows: bool = False) -> ScopfResult:
    """Iterative contingency screening and constraint generation.

    Solve the base DCOPF, screen post-contingency flows, append one
    penalized row per violated pair (cumulative, deduplicated), re-solve,
    and re-screen on the updated physical flows until clean. An hour that
    still shows violations after ``max_iterations`` passes, or whose
    remaining violations are all slack-absorbed (re-solving would not
    change the LP), is returned flagged rather than silently accepted.

    Base-case rows are hard by default, keeping base solutions physical;
    ``slack_base_rows`` extends the penalized slacks to them as well.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    contingency_limits = np.asarray(contingency_limits, dtype=float)
    base_rows = base_flow_rows(network, factors.ptdf, normal_limits,
                               slack_allowed=slack_base_rows)
    result = solve_problem(
        build_problem(network, data, base_rows, penalty_price), ptdf=factors.ptdf)
    trace: list[tuple[int, int, float]] = []
    empty = ViolationSet(())
    if result.status != OPTIMAL:
        return ScopfResult(result, 0, empty, False, tuple(base_rows), trace)

    violations = screen_violations(
        post_contingency_flows(result.flows, factors.lodf), contingency_limits)
    trace.append((0, 0, result.objective))
    active = ActiveRowSet()
    iterations = 0
    while violations and iterations < max_iterations:
        new_pairs = [p for p in violations.pairs if p not in active]
        if not new_pairs:
            break  # every violated pair already has a (slack-absorbed) row
        iterations += 1
        for monitored, outaged in new_pairs:
            active.add((monitored, outaged),
                       contingency_row(factors, monitored, outaged,
                                       contingency_limits[monitored]))
        problem = build_problem(network, data, base_rows + active.rows, penalty_price)
        result = solve_problem(problem, ptdf=factors.ptdf)
        if result.status != OPTIMAL:
            return ScopfResult(result, iterations, violations, False,
                               tuple(problem.flow_rows), trace)
        violations = screen_violations(
            post_contingency_flows(result.flows, factors.lodf), contingency_limits)
        trace.append((iterations, len(new_pairs), result.objective))

    rows = tuple(base_rows + active.rows)
    return ScopfResult(result, iterations, violations, not violations, rows, trace)


def verify_n1(flows: np.ndarray, lodf: np.ndarray, contingency_limits: np.ndarray,
              tolerance: float = SCREEN_TOLERANCE) -> ViolationSet:
    """Exhaustive post-check over every (monitored, outaged) pair,
    independent of the screening path."""
    return screen_violations(post_contingency_flows(flows, lodf),
                             contingency_limits, tolerance)
