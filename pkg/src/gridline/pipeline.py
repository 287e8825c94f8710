"""Multi-hour, multi-regime run orchestration and reporting.

Hours are independent (no unit commitment or ramping), so each
(regime, hour) task solves in isolation and the task list is mapped over a
worker pool. All shared inputs are immutable and results are merged in
task order, which makes outputs identical for any worker count.

Cross-regime aggregates (costs, generation, curtailment, emissions and the
congestion decomposition) are computed only over hours that solved cleanly
in every requested regime, so comparisons are always like-for-like.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from .dispatch import (DEFAULT_PENALTY, hour_data, solve_copperplate)
from .errors import GridlineError
from .factors import build_factors
from .lp import OPTIMAL
from .network import (VARIABLE_FUELS, HourlySeries, Network, load_hourly_series,
                      load_network)
from .ratings import (AAR, DLR, RATED_REGIMES, SLR, RatingParams, RatingSeries,
                      build_rating_series)
from .scopf import DEFAULT_MAX_ITERATIONS, solve_scdcopf
from .util import format_hour, write_csv
from .weather import load_weather

UNCONGESTED = "uncongested"
ALL_REGIMES = RATED_REGIMES + (UNCONGESTED,)

DEFAULT_EMISSION_FACTORS = {"coal": 1.0, "natural_gas": 0.42}  # tons CO2 / MWh
BINDING_DUAL_TOL = 1e-9

CONGESTION_PROXY_NOTE = ("congestion_cost_proxy_usd = sum over binding rows of "
                         "|shadow price| x row limit; attribution to branches "
                         "is a congestion-rent-like proxy, and duals of "
                         "degenerate optima are basis-dependent")


@dataclass(frozen=True)
class RunConfig:
    case_directory: Path
    output_directory: Path
    weather_file: Path | None = None
    regimes: tuple[str, ...] = (SLR, DLR, UNCONGESTED)
    hours: tuple[datetime, datetime] | None = None  # inclusive span; None = whole series
    params: RatingParams = RatingParams()
    penalty_price: float = DEFAULT_PENALTY
    worker_count: int = 1
    emission_factors: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_EMISSION_FACTORS))
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    strict_availability: bool = True
    slack_bus: int | None = None
    slack_base_rows: bool = False

    def __post_init__(self):
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if not self.regimes:
            raise ValueError("at least one regime required")
        unknown = [r for r in self.regimes if r not in ALL_REGIMES]
        if unknown:
            raise ValueError(f"unknown regime(s) {unknown}; choose from {ALL_REGIMES}")


@dataclass
class HourOutcome:
    """Everything the aggregation step needs from one (regime, hour) solve."""

    regime: str
    hour: datetime
    status: str
    converged: bool
    objective: float | None = None
    p_gen: np.ndarray | None = None
    flows: np.ndarray | None = None
    iterations: int = 0
    residual_violations: int = 0
    # (monitored branch id, outaged branch id or "", row limit, dual, slack)
    binding_rows: list[tuple[int, object, float, float, float]] = field(default_factory=list)
    trace: list[tuple[int, int, float]] = field(default_factory=list)
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL and self.converged


@dataclass(frozen=True)
class _WorkerState:
    network: Network
    factors: object
    series: HourlySeries
    ratings: dict[str, RatingSeries]
    penalty_price: float
    max_iterations: int
    slack_base_rows: bool


_STATE: _WorkerState | None = None


def _init_worker(state: _WorkerState) -> None:
    global _STATE
    _STATE = state


def _solve_task(state: _WorkerState, task: tuple[str, int]) -> HourOutcome:
    regime, pos = task
    network, series = state.network, state.series
    hour = series.hours[pos]
    data = hour_data(network, series, hour)
    try:
        if regime == UNCONGESTED:
            result = solve_copperplate(network, data, state.factors)
            outcome = HourOutcome(regime, hour, result.status, result.status == OPTIMAL,
                                  result.objective, result.p_gen, result.flows)
            if result.status == OPTIMAL:
                outcome.trace = [(0, 0, result.objective)]
            return outcome
        rating = state.ratings[regime]
        solution = solve_scdcopf(
            network, state.factors, data,
            rating.normal_limit[pos], rating.contingency_limit[pos],
            state.max_iterations, state.penalty_price, state.slack_base_rows)
        result = solution.dispatch
        outcome = HourOutcome(regime, hour, result.status, solution.converged,
                              result.objective, result.p_gen, result.flows,
                              solution.iterations, len(solution.violations),
                              trace=list(solution.trace))
        if result.status == OPTIMAL:
            for r, row in enumerate(solution.flow_rows):
                dual = float(result.row_duals[r])
                slack = float(result.slack_values[r])
                if abs(dual) > BINDING_DUAL_TOL or slack > BINDING_DUAL_TOL:
                    outage = ("" if row.outage_branch is None
                              else network.branches[row.outage_branch].id)
                    outcome.binding_rows.append(
                        (network.branches[row.monitored_branch].id, outage,
                         row.limit, dual, slack))
        return outcome
    except GridlineError as exc:
        return HourOutcome(regime, hour, "error", False,
                           message=f"{regime} {format_hour(hour)}: {exc}")


def _solve_task_global(task: tuple[str, int]) -> HourOutcome:
    return _solve_task(_STATE, task)


@dataclass
class RegimeSummary:
    regime: str
    solved_hours: int
    total_cost: float
    congestion_cost: float | None
    generation_mwh: dict[str, float]
    curtailment_mwh: dict[str, float]
    emissions_tons: float
    infeasible_hours: list[str]
    unconverged_hours: list[str]
    error_hours: list[str]


@dataclass
class RunSummary:
    regimes: dict[str, RegimeSummary]
    hours: list[datetime]
    common_hours: list[datetime]
    congestion_tables: dict[str, list[tuple[int, float, int]]]

    @property
    def all_ok(self) -> bool:
        return all(not s.infeasible_hours and not s.unconverged_hours
                   and not s.error_hours for s in self.regimes.values())

    def to_json_dict(self) -> dict:
        return {
            "hours": {
                "count": len(self.hours),
                "first": format_hour(self.hours[0]),
                "last": format_hour(self.hours[-1]),
            },
            "common_feasible_hours": len(self.common_hours),
            "congestion_metric_note": CONGESTION_PROXY_NOTE,
            "regimes": {
                name: {
                    "solved_hours": s.solved_hours,
                    "total_cost_usd": s.total_cost,
                    "congestion_cost_usd": s.congestion_cost,
                    "generation_twh": {f: mwh / 1e6 for f, mwh in s.generation_mwh.items()},
                    "generation_mwh": s.generation_mwh,
                    "curtailment_twh": {f: mwh / 1e6 for f, mwh in s.curtailment_mwh.items()},
                    "curtailment_mwh": s.curtailment_mwh,
                    "emissions_mmt": s.emissions_tons / 1e6,
                    "emissions_tons": s.emissions_tons,
                    "infeasible_hours": s.infeasible_hours,
                    "unconverged_hours": s.unconverged_hours,
                    "error_hours": s.error_hours,
                }
                for name, s in self.regimes.items()
            },
        }


def emissions(generation_mwh: dict[str, float], factors: dict[str, float]) -> float:
    """Tons of CO2 from per-fuel generation and per-fuel emission factors."""
    if any(v < 0 for v in factors.values()):
        raise ValueError("emission factors must be nonnegative")
    return sum(factors.get(fuel, 0.0) * mwh for fuel, mwh in generation_mwh.items())


def congestion_by_branch(outcomes: list[HourOutcome]) -> list[tuple[int, float, int]]:
    """Per monitored branch: summed |dual| x row limit over all binding rows
    and hours, plus the count of hours with at least one binding row.
    Sorted by metric descending (ties by branch id)."""
    cost: dict[int, float] = {}
    hours_binding: dict[int, set[datetime]] = {}
    for outcome in outcomes:
        for branch_id, _outage, limit, dual, _slack in outcome.binding_rows:
            cost[branch_id] = cost.get(branch_id, 0.0) + abs(dual) * limit
            hours_binding.setdefault(branch_id, set()).add(outcome.hour)
    table = [(b, cost[b], len(hours_binding[b])) for b in cost]
    table.sort(key=lambda row: (-row[1], row[0]))
    return table


def _select_hours(series: HourlySeries, span) -> list[datetime]:
    if span is None:
        return list(series.hours)
    first, last = span
    hours = [h for h in series.hours if first <= h <= last]
    if not hours:
        raise GridlineError(
            f"requested hours {format_hour(first)}..{format_hour(last)} "
            "not covered by the demand series")
    return hours


def run(config: RunConfig) -> RunSummary:
    """Execute a full multi-regime study and write all report files."""
    network = load_network(config.case_directory)
    series = load_hourly_series(config.case_directory, network,
                                strict=config.strict_availability)
    hours = _select_hours(series, config.hours)
    series = series.restrict(hours)
    factors = build_factors(network, config.slack_bus)

    needs_weather = any(r in (AAR, DLR) for r in config.regimes)
    weather = None
    if needs_weather:
        if config.weather_file is None:
            raise GridlineError("regimes aar/dlr require a weather file")
        weather = load_weather(config.weather_file)

    ratings = {}
    for regime in config.regimes:
        if regime == UNCONGESTED:
            continue
        try:
            ratings[regime] = build_rating_series(network, weather, hours, regime,
                                                  config.params)
        except GridlineError as exc:
            raise GridlineError(f"{regime} ratings: {exc}") from None

    state = _WorkerState(network, factors, series, ratings,
                         config.penalty_price, config.max_iterations,
                         config.slack_base_rows)
    tasks = [(regime, pos) for regime in config.regimes for pos in range(len(hours))]
    if config.worker_count == 1:
        outcomes = [_solve_task(state, task) for task in tasks]
    else:
        with Pool(config.worker_count, initializer=_init_worker,
                  initargs=(state,)) as pool:
            outcomes = pool.map(_solve_task_global, tasks)

    by_regime: dict[str, list[HourOutcome]] = {r: [] for r in config.regimes}
    for outcome in outcomes:
        by_regime[outcome.regime].append(outcome)

    common = [pos for pos in range(len(hours))
              if all(by_regime[r][pos].ok for r in config.regimes)]
    summary = _aggregate(config, network, series, by_regime, common)
    _write_outputs(config, network, series, by_regime, ratings, summary)
    return summary


def _aggregate(config, network, series, by_regime, common_positions) -> RunSummary:
    hours = list(series.hours)
    fuels = sorted({g.fuel for g in network.generators})
    summaries: dict[str, RegimeSummary] = {}
    totals: dict[str, float] = {}
    for regime, outcomes in by_regime.items():
        total = sum(outcomes[pos].objective for pos in common_positions)
        generation = {fuel: 0.0 for fuel in fuels}
        curtailment = {fuel: 0.0 for fuel in VARIABLE_FUELS}
        for pos in common_positions:
            p = outcomes[pos].p_gen
            for g, gen in enumerate(network.generators):
                generation[gen.fuel] += float(p[g])
                if gen.fuel in curtailment:
                    curtailment[gen.fuel] += float(series.availability[pos, g] - p[g])
        totals[regime] = total
        summaries[regime] = RegimeSummary(
            regime=regime,
            solved_hours=sum(1 for o in outcomes if o.ok),
            total_cost=total,
            congestion_cost=None,
            generation_mwh=generation,
            curtailment_mwh=curtailment,
            emissions_tons=emissions(generation, config.emission_factors),
            infeasible_hours=[format_hour(o.hour) for o in outcomes
                              if o.status == "infeasible"],
            unconverged_hours=[format_hour(o.hour) for o in outcomes
                               if o.status == OPTIMAL and not o.converged],
            error_hours=[o.message for o in outcomes if o.status == "error"],
        )
    if UNCONGESTED in totals:
        for regime, s in summaries.items():
            s.congestion_cost = totals[regime] - totals[UNCONGESTED]
    tables = {regime: congestion_by_branch([o for o in outcomes if o.ok])
              for regime, outcomes in by_regime.items()}
    return RunSummary(summaries, hours, [hours[pos] for pos in common_positions], tables)


def _write_outputs(config, network, series, by_regime, ratings, summary) -> None:
    out = Path(config.output_directory)
    out.mkdir(parents=True, exist_ok=True)
    gen_ids = [g.id for g in network.generators]
    branch_ids = [b.id for b in network.branches]

    for regime, outcomes in by_regime.items():
        regime_dir = out / regime
        write_csv(regime_dir / "dispatch.csv", ["time", "gen_id", "mw"],
                  ((format_hour(o.hour), gen_ids[g], float(o.p_gen[g]))
                   for o in outcomes if o.status == OPTIMAL
                   for g in range(len(gen_ids))))
        write_csv(regime_dir / "flows.csv", ["time", "branch_id", "mw"],
                  ((format_hour(o.hour), branch_ids[l], float(o.flows[l]))
                   for o in outcomes if o.status == OPTIMAL and o.flows is not None
                   for l in range(len(branch_ids))))
        if regime in ratings:
            rating = ratings[regime]
            write_csv(regime_dir / "ratings.csv",
                      ["time", "branch_id", "regime", "multiplier",
                       "normal_limit_mva", "contingency_limit_mva"],
                      ((format_hour(hour), branch_ids[l], regime,
                        float(rating.multiplier[h, l]),
                        float(rating.normal_limit[h, l]),
                        float(rating.contingency_limit[h, l]))
                       for h, hour in enumerate(rating.hours)
                       for l in range(len(branch_ids))))
        write_csv(regime_dir / "congestion_by_branch.csv",
                  ["branch_id", "congestion_cost_proxy_usd", "binding_hours"],
                  summary.congestion_tables[regime])
        write_csv(regime_dir / "iteration_trace.csv",
                  ["hour", "iteration", "violations_added", "objective"],
                  ((format_hour(o.hour), it, added, float(obj))
                   for o in outcomes for it, added, obj in o.trace))

    payload = summary.to_json_dict()
    with open(out / "summary.json", "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
