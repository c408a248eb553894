"""Comparison baselines: UCB1 bandit selection and parallel portfolios.

The bandit treats each strategy as an arm; each subproblem in queue order is
solved fully (no timeouts) by the arm maximizing mean reward plus the
sqrt(2 ln m / m_i) exploration bonus, untried arms first. The reward maps a
solving time t to ln(t_max/t) / ln(t_max/t_min) with t_max = 10*mu and
t_min = mu/10, mu being the running mean of all solving times observed so
far; times worse than t_max earn negative rewards and are never clamped.

The portfolio solves every subproblem with all of its strategies and pays
their summed cost, mirroring cost accounting that sums time across cores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .csp import Model
from .decomposition import DecompositionConfig, decompose
from .search import TimeMode
from .selection import ModelOracle, Observation
from .strategies import ALL_STRATEGIES, StrategyId


@dataclass
class RewardConfig:
    """t_max = 10*mu, t_min = mu/10 around the running mean solving time."""

    mu: float

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")

    @property
    def t_max(self) -> float:
        return 10.0 * self.mu

    @property
    def t_min(self) -> float:
        return self.mu / 10.0


def reward(t: float, rc: RewardConfig) -> float:
    """ln(t_max/t) / ln(t_max/t_min); 1 at t_min, 0.5 at mu, 0 at t_max,
    negative beyond (degenerate runs are punished, never clamped)."""
    if t <= 0:
        raise ValueError("solving time must be positive")
    return (math.log(rc.t_max) - math.log(t)) / (math.log(rc.t_max) - math.log(rc.t_min))


@dataclass
class BanditState:
    arms: int
    counts: list[int] = field(default_factory=list)
    reward_sums: list[float] = field(default_factory=list)
    history: list[tuple[int, float]] = field(default_factory=list)

    def __post_init__(self):
        if self.arms < 1:
            raise ValueError("need at least one arm")
        if not self.counts:
            self.counts = [0] * self.arms
        if not self.reward_sums:
            self.reward_sums = [0.0] * self.arms

    @property
    def m(self) -> int:
        return sum(self.counts)

    def record(self, arm: int, r: float) -> None:
        self.counts[arm] += 1
        self.reward_sums[arm] += r
        self.history.append((arm, r))


def ucb1_select(bs: BanditState) -> int:
    """Untried arms first (lowest index), then argmax of
    mean reward + sqrt(2 ln m / m_i), ties toward the lowest index."""
    for i in range(bs.arms):
        if bs.counts[i] == 0:
            return i
    m = bs.m
    best = 0
    best_p = -math.inf
    for i in range(bs.arms):
        p = bs.reward_sums[i] / bs.counts[i] + math.sqrt(2.0 * math.log(m) / bs.counts[i])
        if p > best_p:
            best = i
            best_p = p
    return best


@dataclass
class MabReport:
    total_cost: float
    pulls: dict[StrategyId, int]
    bandit: BanditState
    solutions_found: Optional[int] = None
    best_objective: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "total_cost": self.total_cost,
            "pulls": {s.token: c for s, c in self.pulls.items()},
            "solutions_found": self.solutions_found,
            "best_objective": self.best_objective,
        }


def mab_on_oracle(oracle, strategies: Optional[Sequence[StrategyId]] = None) -> MabReport:
    """UCB1 over the subproblem stream of an oracle (queue = id order)."""
    strategies = tuple(strategies if strategies is not None else oracle.strategies)
    bs = BanditState(len(strategies))
    total = 0.0
    time_sum = 0.0
    n_obs = 0
    solutions = 0
    for sub in oracle.sub_ids:
        arm = ucb1_select(bs)
        obs: Observation = oracle.full(sub, strategies[arm])
        total += obs.value
        solutions += obs.solutions
        # work-unit runs can finish at zero cost; a pull still costs one tick
        t = max(obs.value, 1.0)
        time_sum += t
        n_obs += 1
        rc = RewardConfig(mu=time_sum / n_obs)
        bs.record(arm, reward(t, rc))
    pulls = {s: bs.counts[i] for i, s in enumerate(strategies)}
    best_obj = oracle.current_bound()
    return MabReport(
        total_cost=total,
        pulls=pulls,
        bandit=bs,
        solutions_found=None if best_obj is not None else solutions,
        best_objective=best_obj,
    )


def mab_run(
    model: Model,
    cfg: Optional[DecompositionConfig] = None,
    strategies: Sequence[StrategyId] = ALL_STRATEGIES,
    time_mode: TimeMode = TimeMode.WORK,
    oracle: Optional[ModelOracle] = None,
) -> MabReport:
    if oracle is None:
        decomp = decompose(model, cfg if cfg is not None else DecompositionConfig())
        oracle = ModelOracle(model, decomp.subproblems, strategies, time_mode=time_mode)
    return mab_on_oracle(oracle, strategies)


@dataclass
class PortfolioReport:
    total_cost: float
    per_strategy: dict[StrategyId, float]
    solutions_found: Optional[int] = None
    best_objective: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "total_cost": self.total_cost,
            "per_strategy": {s.token: v for s, v in self.per_strategy.items()},
            "solutions_found": self.solutions_found,
            "best_objective": self.best_objective,
        }


def portfolio_on_oracle(oracle, strategies: Sequence[StrategyId]) -> PortfolioReport:
    """Every subproblem solved by all strategies; cost is the sum across them.

    All runs of one subproblem see the same incumbent (pinned per subproblem),
    like parallel workers started together; improvements merge afterwards.
    """
    if not strategies:
        raise ValueError("portfolio needs at least one strategy")
    per = {s: 0.0 for s in strategies}
    solutions = 0
    for sub in oracle.sub_ids:
        bound = oracle.current_bound()
        obs = {s: oracle.full(sub, s, bound) for s in strategies}
        oracle.merge_objectives(obs.values())
        first = obs[strategies[0]]
        solutions += first.solutions
        for s, o in obs.items():
            per[s] += o.value
    best_obj = oracle.current_bound()
    return PortfolioReport(
        total_cost=sum(per.values()),
        per_strategy=per,
        solutions_found=None if best_obj is not None else solutions,
        best_objective=best_obj,
    )


def portfolio_run(
    model: Model,
    strategies: Sequence[StrategyId],
    cfg: Optional[DecompositionConfig] = None,
    time_mode: TimeMode = TimeMode.WORK,
    oracle: Optional[ModelOracle] = None,
) -> PortfolioReport:
    if oracle is None:
        decomp = decompose(model, cfg if cfg is not None else DecompositionConfig())
        oracle = ModelOracle(model, decomp.subproblems, tuple(strategies), time_mode=time_mode)
    return portfolio_on_oracle(oracle, strategies)
