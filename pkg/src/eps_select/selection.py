"""Parallel strategy selection: race, uncensor, eliminate, solve the rest.

Per sampled subproblem every live strategy is raced under a relative timeout
of ``timeout_factor`` times the first finisher's cost; unfinished runs are
recorded censored at that limit. In work-units mode the race is derived from
full deterministic runs (memoized), which is exactly equivalent to the
idealized parallel race and also yields the no-timeout cost for reporting.
In wall mode the first finisher is discovered by exponentially doubling a
shared budget.

Selection then proceeds: pick the strategy with the smallest column total
(censored values counted as-is), re-solving its own timeouts until the
cheapest fully-uncensored strategy ``s_b`` emerges; compare every other
strategy against ``s_b`` with the censoring-safe WSR test, re-solving pairs
censored below the validity threshold to(j); eliminate the significantly
slower ones. A strategy that beats ``s_b`` in the WSR test is fully
uncensored and confirmed with a paired t-test before taking over as the new
``s_b`` (prior eliminations stand). Remaining indistinguishable strategies
lose the final tie-break on sample totals. The winner solves everything
outside the sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .csp import Model
from .decomposition import (
    Decomposition,
    DecompositionConfig,
    Sample,
    Subproblem,
    decompose,
    sample_size_rule,
    srs_sample,
)
from .runner import run_pool
from .search import Incumbent, SolveMode, TimeMode, solve
from .strategies import ALL_STRATEGIES, StrategyId
from .wsr import (
    CensorPlan,
    Decision,
    PairedDiffs,
    WsrResult,
    censor_plan,
    paired_ttest,
    wsr_test,
)

_LIVE = object()  # sentinel: use the oracle's current incumbent


@dataclass(frozen=True)
class Observation:
    value: float
    censored: bool
    censor_limit: Optional[float] = None
    solutions: int = 0
    objective: Optional[int] = None
    work: Optional[float] = None  # true cost when known (uncensored: == value)


class RuntimeMatrix:
    """(subproblem x strategy) observations; censored entries carry the limit
    they were stopped at as their value."""

    def __init__(self, strategies: Sequence[StrategyId], sub_ids: Sequence[int]):
        self.strategies = tuple(strategies)
        self.sub_ids = list(sub_ids)
        self.entries: dict[tuple[int, StrategyId], Observation] = {}

    def set(self, sub: int, sid: StrategyId, obs: Observation) -> None:
        self.entries[(sub, sid)] = obs

    def get(self, sub: int, sid: StrategyId) -> Observation:
        return self.entries[(sub, sid)]

    def column(self, sid: StrategyId) -> list[Observation]:
        return [self.entries[(sub, sid)] for sub in self.sub_ids]

    def column_total(self, sid: StrategyId) -> float:
        return sum(self.entries[(sub, sid)].value for sub in self.sub_ids)

    def censored_subs(self, sid: StrategyId) -> list[int]:
        return [s for s in self.sub_ids if self.entries[(s, sid)].censored]

    def censored_counts(self) -> dict[StrategyId, int]:
        return {sid: len(self.censored_subs(sid)) for sid in self.strategies}


@dataclass
class RaceConfig:
    timeout_factor: float = 2.0
    alpha: float = 0.01
    sample_seed: int = 0
    time_mode: TimeMode = TimeMode.WORK

    def __post_init__(self):
        if self.timeout_factor <= 1.0:
            raise ValueError("timeout_factor must be > 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")


@dataclass
class PssConfig:
    decomposition: DecompositionConfig = field(default_factory=DecompositionConfig)
    race: RaceConfig = field(default_factory=RaceConfig)
    sample_size: Optional[int] = None
    strategies: tuple[StrategyId, ...] = ALL_STRATEGIES
    persist_counters: bool = False


@dataclass
class PhaseCosts:
    race: float = 0.0
    race_without_to: float = 0.0
    uncensor: float = 0.0
    resolve: float = 0.0

    @property
    def selection(self) -> float:
        return self.race + self.uncensor + self.resolve


# ---------------------------------------------------------------------------
# cost oracles


class MatrixOracle:
    """Replays a fixed runtime matrix (fixtures, synthetic experiments)."""

    has_true_costs = True

    def __init__(self, costs: dict[StrategyId, Sequence[float]]):
        self.costs = {s: list(v) for s, v in costs.items()}
        self.strategies = tuple(costs.keys())
        lengths = {len(v) for v in self.costs.values()}
        if len(lengths) != 1:
            raise ValueError("all strategy columns must have the same length")
        self.sub_ids = list(range(lengths.pop()))

    def current_bound(self) -> Optional[int]:
        return None

    def merge_objectives(self, observations: Iterable[Observation]) -> None:
        pass

    def full(self, sub: int, sid: StrategyId, bound=_LIVE) -> Observation:
        w = self.costs[sid][sub]
        return Observation(value=w, censored=False, work=w)

    def limited(self, sub: int, sid: StrategyId, limit: float, bound=_LIVE) -> Observation:
        w = self.costs[sid][sub]
        if w <= limit:
            return Observation(value=w, censored=False, work=w)
        return Observation(value=limit, censored=True, censor_limit=limit)


class ModelOracle:
    """Runs the real solver on decomposed subproblems, memoizing full runs.

    Work mode exposes true costs (deterministic), so races are computed
    analytically from memoized full runs; wall mode measures elapsed time
    and cannot promise true costs cheaply. The optimization incumbent lives
    here; races pin a bound explicitly so all paired runs see the same one.
    """

    def __init__(
        self,
        model: Model,
        subproblems: Sequence[Subproblem],
        strategies: Sequence[StrategyId] = ALL_STRATEGIES,
        time_mode: TimeMode = TimeMode.WORK,
        shared_cache: Optional[dict] = None,
        persist_counters: bool = False,
    ):
        self.model = model
        self.subs = {s.id: s for s in subproblems}
        self.sub_ids = [s.id for s in subproblems]
        self.strategies = tuple(strategies)
        self.time_mode = time_mode
        self.has_true_costs = time_mode is TimeMode.WORK and not persist_counters
        self.incumbent = (
            Incumbent(model.objective.maximize) if model.objective is not None else None
        )
        self.mode = (
            SolveMode.OPTIMIZE if model.objective is not None else SolveMode.ALL_SOLUTIONS
        )
        self._cache = shared_cache if shared_cache is not None else {}
        self._persist = persist_counters
        self._counters: dict[StrategyId, object] = {}

    def current_bound(self) -> Optional[int]:
        return self.incumbent.value if self.incumbent is not None else None

    def merge_objectives(self, observations: Iterable[Observation]) -> None:
        if self.incumbent is None:
            return
        for o in observations:
            if not o.censored:
                self.incumbent.propose(o.objective)

    def _solve(self, sub: int, sid: StrategyId, bound, budget=None, wall_ms=None):
        counters = None
        if self._persist:
            from .strategies import CounterState

            counters = self._counters.setdefault(sid, CounterState(self.model.n))
        return solve(
            self.model,
            self.subs[sub].assignment,
            sid,
            self.mode,
            budget=budget,
            bound=bound,
            counters=counters,
            wall_limit_ms=wall_ms,
        )

    def full(self, sub: int, sid: StrategyId, bound=_LIVE) -> Observation:
        live = bound is _LIVE
        b = self.current_bound() if live else bound
        key = (sub, sid, b)
        obs = self._cache.get(key) if not self._persist else None
        if obs is None:
            out = self._solve(sub, sid, b)
            value = out.work_used if self.time_mode is TimeMode.WORK else out.wall_ms
            obs = Observation(
                value=value,
                censored=False,
                solutions=out.solutions_found,
                objective=out.best_objective,
                work=value,
            )
            if not self._persist:
                self._cache[key] = obs
        if live:
            self.merge_objectives((obs,))
        return obs

    def limited(self, sub: int, sid: StrategyId, limit: float, bound=_LIVE) -> Observation:
        b = self.current_bound() if bound is _LIVE else bound
        if self.has_true_costs:
            obs = self.full(sub, sid, b)
            if obs.value <= limit:
                return obs
            return Observation(value=limit, censored=True, censor_limit=limit)
        if self.time_mode is TimeMode.WORK:
            out = self._solve(sub, sid, b, budget=int(limit))
        else:
            out = self._solve(sub, sid, b, wall_ms=limit)
        if out.complete:
            value = out.work_used if self.time_mode is TimeMode.WORK else out.wall_ms
            return Observation(
                value=value,
                censored=False,
                solutions=out.solutions_found,
                objective=out.best_objective,
                work=value,
            )
        return Observation(value=limit, censored=True, censor_limit=limit)


# ---------------------------------------------------------------------------
# the selection pipeline


def race(
    oracle, sub: int, alive: Sequence[StrategyId], cfg: RaceConfig, bound=_LIVE
) -> dict[StrategyId, Observation]:
    """Race all live strategies on one subproblem under the relative timeout.

    The first finisher (cost t*) is always uncensored; everyone still running
    at ``timeout_factor * t*`` is stopped and recorded censored at that value.
    Censored runs contribute no objective improvements.
    """
    if not alive:
        raise ValueError("need at least one strategy")
    factor = cfg.timeout_factor
    if getattr(oracle, "has_true_costs", False):
        full = {s: oracle.full(sub, s, bound) for s in alive}
        tstar = min(o.value for o in full.values())
        limit = factor * tstar
        out = {}
        for s, o in full.items():
            if o.value <= limit:
                out[s] = o
            else:
                out[s] = Observation(value=limit, censored=True, censor_limit=limit)
        return out
    # discover the first finisher by doubling a shared budget
    budget = 1.0
    while True:
        runs = {s: oracle.limited(sub, s, budget, bound) for s in alive}
        finishers = {s: o for s, o in runs.items() if not o.censored}
        if finishers:
            break
        budget *= 2.0
    tstar = min(o.value for o in finishers.values())
    limit = factor * tstar
    out = {}
    for s in alive:
        o = runs[s]
        if not o.censored and o.value <= limit:
            out[s] = o
        else:
            out[s] = oracle.limited(sub, s, limit, bound)
    return out


def find_uncensored_best(
    matrix: RuntimeMatrix, oracle, race_bounds: dict, costs: PhaseCosts
) -> StrategyId:
    """Smallest-total strategy, re-solving its timeouts until fully uncensored.

    Each round takes the argmin of the column totals (censored values counted
    as-is); if that column still has censored entries they are re-solved with
    no timeout and the round repeats. Terminates because every round either
    returns or strictly uncensores a column.
    """
    while True:
        sb = min(matrix.strategies, key=lambda s: (matrix.column_total(s), _ord(matrix, s)))
        censored = matrix.censored_subs(sb)
        if not censored:
            return sb
        for sub in censored:
            obs = oracle.full(sub, sb, race_bounds.get(sub, _LIVE))
            matrix.set(sub, sb, obs)
            costs.uncensor += obs.value


def _ord(matrix: RuntimeMatrix, sid: StrategyId) -> int:
    return matrix.strategies.index(sid)


class ElimKind(Enum):
    ELIMINATED = "eliminated"
    SURVIVES = "survives"
    REVERSAL = "reversal"


@dataclass
class ElimResult:
    kind: ElimKind
    wsr: WsrResult
    plan: CensorPlan
    ttest: Optional[Decision] = None


def eliminate(
    matrix: RuntimeMatrix,
    oracle,
    race_bounds: dict,
    s_b: StrategyId,
    s_i: StrategyId,
    cfg: RaceConfig,
    costs: PhaseCosts,
) -> ElimResult:
    """Censoring-safe WSR comparison of ``s_i`` against the uncensored best.

    d_max is taken from the uncensored pairs only; every pair censored below
    its threshold to(j) = d_max + t_b(j) + 1 is re-solved with budget to(j).
    Re-solves can reveal new positive differences, so the plan is iterated to
    a fixpoint before testing (one pass is the common case).
    """
    subs = matrix.sub_ids
    while True:
        t_b = [matrix.get(s, s_b).value for s in subs]
        obs_i = [matrix.get(s, s_i) for s in subs]
        observed = [tb - o.value for tb, o in zip(t_b, obs_i) if not o.censored]
        plan = censor_plan(t_b, observed)
        need = [
            (s, to)
            for s, o, to in zip(subs, obs_i, plan.thresholds)
            if o.censored and o.censor_limit < to
        ]
        if not need:
            break
        for sub, to in need:
            obs = oracle.limited(sub, s_i, to, race_bounds.get(sub, _LIVE))
            matrix.set(sub, s_i, obs)
            costs.resolve += obs.value

    obs_i = [matrix.get(s, s_i) for s in subs]
    pd = PairedDiffs(
        tuple(tb - o.value for tb, o in zip(t_b, obs_i)),
        tuple(o.censored for o in obs_i),
    )
    result = wsr_test(pd, cfg.alpha)
    if result.decision is Decision.FIRST_BETTER:
        return ElimResult(ElimKind.ELIMINATED, result, plan)
    if result.decision is Decision.SECOND_BETTER:
        # remove the timeouts of s_i entirely, then let a t-test decide
        for sub in matrix.censored_subs(s_i):
            obs = oracle.full(sub, s_i, race_bounds.get(sub, _LIVE))
            matrix.set(sub, s_i, obs)
            costs.resolve += obs.value
        t_i = [matrix.get(s, s_i).value for s in subs]
        verdict = paired_ttest(t_b, t_i, cfg.alpha)
        if verdict is Decision.SECOND_BETTER:
            return ElimResult(ElimKind.REVERSAL, result, plan, ttest=verdict)
        return ElimResult(ElimKind.SURVIVES, result, plan, ttest=verdict)
    return ElimResult(ElimKind.SURVIVES, result, plan)


@dataclass
class SelectionOutcome:
    winner: StrategyId
    best_strategy: StrategyId  # the s_b anchor of the final elimination pass
    eliminated: list[tuple[StrategyId, WsrResult]]
    survivors: list[StrategyId]
    matrix: RuntimeMatrix
    costs: PhaseCosts
    comparisons: int
    reversals: int
    sample_totals: dict[StrategyId, float]
    race_censored_counts: dict[StrategyId, int]


def select_strategy(
    oracle,
    cfg: RaceConfig,
    sample_ids: Sequence[int],
    strategies: Optional[Sequence[StrategyId]] = None,
    initial_best: Optional[StrategyId] = None,
) -> SelectionOutcome:
    """Run the full selection phase on an oracle over the given sample.

    ``initial_best`` forces the anchor of the first elimination pass (testing
    hook for the reversal path); by default it is found by
    :func:`find_uncensored_best`.
    """
    strategies = tuple(strategies if strategies is not None else oracle.strategies)
    matrix = RuntimeMatrix(strategies, sorted(sample_ids))
    costs = PhaseCosts()
    race_bounds: dict[int, object] = {}

    for sub in matrix.sub_ids:
        bound = oracle.current_bound()
        obs = race(oracle, sub, strategies, cfg, bound)
        race_bounds[sub] = bound
        oracle.merge_objectives(obs.values())
        for s, o in obs.items():
            matrix.set(sub, s, o)
            costs.race += o.value
            if o.work is not None:
                costs.race_without_to += o.work
            elif getattr(oracle, "has_true_costs", False):
                costs.race_without_to += oracle.full(sub, s, bound).value
    race_censored = matrix.censored_counts()

    if initial_best is None:
        s_b = find_uncensored_best(matrix, oracle, race_bounds, costs)
    else:
        s_b = initial_best
        for sub in matrix.censored_subs(s_b):
            obs = oracle.full(sub, s_b, race_bounds.get(sub, _LIVE))
            matrix.set(sub, s_b, obs)
            costs.uncensor += obs.value

    eliminated: list[tuple[StrategyId, WsrResult]] = []
    survivors: list[StrategyId] = []
    comparisons = 0
    reversals = 0
    alive = [s for s in strategies if s is not s_b]
    while True:
        # cheapest comparisons first: ascending censored totals
        alive.sort(key=lambda s: (matrix.column_total(s), _ord(matrix, s)))
        restarted = False
        pending = list(alive)
        survivors = []
        for s_i in pending:
            res = eliminate(matrix, oracle, race_bounds, s_b, s_i, cfg, costs)
            comparisons += 1
            if res.kind is ElimKind.ELIMINATED:
                eliminated.append((s_i, res.wsr))
                alive.remove(s_i)
            elif res.kind is ElimKind.REVERSAL:
                # the former best is out; restart the pass against the rest
                eliminated.append((s_b, res.wsr))
                alive.remove(s_i)
                s_b = s_i
                reversals += 1
                restarted = True
                break
            else:
                survivors.append(s_i)
        if not restarted:
            break

    totals = {s: matrix.column_total(s) for s in strategies}
    pool = [s_b] + survivors
    winner = min(pool, key=lambda s: (totals[s], strategies.index(s)))

    return SelectionOutcome(
        winner=winner,
        best_strategy=s_b,
        eliminated=eliminated,
        survivors=survivors,
        matrix=matrix,
        costs=costs,
        comparisons=comparisons,
        reversals=reversals,
        sample_totals=totals,
        race_censored_counts=race_censored,
    )


@dataclass
class SelectionReport:
    winner: StrategyId
    eliminated: list[tuple[StrategyId, WsrResult]]
    survivors_tiebreak: Optional[list[StrategyId]]
    overall_confidence: float
    selection_cost: float
    solve_cost: float
    race_cost: float
    race_cost_without_timeouts: float
    uncensor_cost: float
    resolve_cost: float
    comparisons: int
    reversals: int
    alpha: float
    timeout_factor: float
    sample_ids: list[int]
    sample_seed: int
    population: int
    prefix_len: int
    decompose_work: float
    best_strategy: StrategyId
    best_total: float
    sample_totals: dict[StrategyId, float]
    race_censored_counts: dict[StrategyId, int]
    solutions_found: Optional[int]
    best_objective: Optional[int]
    strategies: tuple[StrategyId, ...]

    @property
    def total_cost(self) -> float:
        return self.selection_cost + self.solve_cost

    def to_dict(self) -> dict:
        return {
            "winner": self.winner.token,
            "eliminated": [
                {
                    "strategy": s.token,
                    "n": r.n,
                    "w_plus": r.w_plus,
                    "p_value": r.p_value,
                    "method": r.method.value,
                    "decision": r.decision.value,
                }
                for s, r in self.eliminated
            ],
            "survivors_tiebreak": (
                [s.token for s in self.survivors_tiebreak]
                if self.survivors_tiebreak
                else None
            ),
            "overall_confidence": self.overall_confidence,
            "selection_cost": self.selection_cost,
            "solve_cost": self.solve_cost,
            "total_cost": self.total_cost,
            "race_cost": self.race_cost,
            "race_cost_without_timeouts": self.race_cost_without_timeouts,
            "uncensor_cost": self.uncensor_cost,
            "resolve_cost": self.resolve_cost,
            "comparisons": self.comparisons,
            "reversals": self.reversals,
            "alpha": self.alpha,
            "timeout_factor": self.timeout_factor,
            "sample_size": len(self.sample_ids),
            "sample_seed": self.sample_seed,
            "population": self.population,
            "prefix_len": self.prefix_len,
            "decompose_work": self.decompose_work,
            "best_strategy": self.best_strategy.token,
            "best_total": self.best_total,
            "sample_totals": {s.token: v for s, v in self.sample_totals.items()},
            "race_censored_counts": {
                s.token: c for s, c in self.race_censored_counts.items()
            },
            "solutions_found": self.solutions_found,
            "best_objective": self.best_objective,
            "strategies": [s.token for s in self.strategies],
        }


def _report_from_outcome(
    out: SelectionOutcome,
    cfg: RaceConfig,
    population: int,
    prefix_len: int,
    decompose_work: float,
    solve_cost: float = 0.0,
    solutions: Optional[int] = None,
    best_objective: Optional[int] = None,
) -> SelectionReport:
    return SelectionReport(
        winner=out.winner,
        eliminated=out.eliminated,
        survivors_tiebreak=out.survivors if out.survivors else None,
        overall_confidence=(1.0 - cfg.alpha) ** out.comparisons,
        selection_cost=out.costs.selection,
        solve_cost=solve_cost,
        race_cost=out.costs.race,
        race_cost_without_timeouts=out.costs.race_without_to,
        uncensor_cost=out.costs.uncensor,
        resolve_cost=out.costs.resolve,
        comparisons=out.comparisons,
        reversals=out.reversals,
        alpha=cfg.alpha,
        timeout_factor=cfg.timeout_factor,
        sample_ids=list(out.matrix.sub_ids),
        sample_seed=cfg.sample_seed,
        population=population,
        prefix_len=prefix_len,
        decompose_work=decompose_work,
        best_strategy=out.best_strategy,
        best_total=out.matrix.column_total(out.best_strategy),
        sample_totals=out.sample_totals,
        race_censored_counts=out.race_censored_counts,
        solutions_found=solutions,
        best_objective=best_objective,
        strategies=out.matrix.strategies,
    )


def select_on_matrix(
    costs: dict[StrategyId, Sequence[float]],
    cfg: Optional[RaceConfig] = None,
    sample_ids: Optional[Sequence[int]] = None,
    initial_best: Optional[StrategyId] = None,
) -> SelectionReport:
    """Run the pipeline on a fixed runtime matrix (no model, no solve phase)."""
    cfg = cfg if cfg is not None else RaceConfig()
    oracle = MatrixOracle(costs)
    ids = list(sample_ids) if sample_ids is not None else list(oracle.sub_ids)
    out = select_strategy(oracle, cfg, ids, initial_best=initial_best)
    return _report_from_outcome(out, cfg, population=len(oracle.sub_ids), prefix_len=0, decompose_work=0.0)


def pss_select(
    model: Model,
    cfg: Optional[PssConfig] = None,
    oracle: Optional[ModelOracle] = None,
    decomposition: Optional[Decomposition] = None,
) -> SelectionReport:
    """Full PSS run: decompose, sample, select, solve the rest with the winner."""
    cfg = cfg if cfg is not None else PssConfig()
    rc = cfg.race
    if decomposition is None:
        decomposition = decompose(model, cfg.decomposition)
    subs = decomposition.subproblems
    population = len(subs)
    k = cfg.sample_size if cfg.sample_size is not None else sample_size_rule(population)
    sample: Sample = srs_sample(population, k, rc.sample_seed)
    if oracle is None:
        oracle = ModelOracle(
            model,
            subs,
            cfg.strategies,
            time_mode=rc.time_mode,
            persist_counters=cfg.persist_counters,
        )

    out = select_strategy(oracle, rc, sample.indices, cfg.strategies)
    winner = out.winner

    sampled = set(sample.indices)
    remainder = [s.id for s in subs if s.id not in sampled]
    results, _ = run_pool(
        remainder,
        cfg.decomposition.worker_count,
        lambda sub: oracle.full(sub, winner),
        time_mode=rc.time_mode,
        cost_fn=lambda obs: obs.value,
    )
    solve_cost = sum(r.result.value for r in results if not r.failed)

    solutions = None
    best_objective = None
    if model.objective is None:
        # sampled subproblems: exact counts from the uncensored best's column
        solutions = sum(out.matrix.get(s, out.best_strategy).solutions for s in out.matrix.sub_ids)
        solutions += sum(r.result.solutions for r in results if not r.failed)
    else:
        best_objective = oracle.current_bound()

    return _report_from_outcome(
        out,
        rc,
        population=population,
        prefix_len=decomposition.prefix_len,
        decompose_work=decomposition.work,
        solve_cost=solve_cost,
        solutions=solutions,
        best_objective=best_objective,
    )


def selection_cost_bound(report: SelectionReport) -> tuple[float, float]:
    """Measured race-phase cost and its guarantee s * factor * sum_j t(S_b, j).

    The bound holds because each subproblem's race spends at most
    ``timeout_factor`` times the first finisher's cost per strategy, and the
    first finisher is never slower than S_b.
    """
    s = len(report.strategies)
    bound = s * report.timeout_factor * report.best_total
    return report.race_cost, bound
