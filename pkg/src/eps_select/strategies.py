"""The seven dynamic variable-value strategies and the counters behind them.

Variable choice is a pure function of the current domains and the counter
state; all ties break toward the smallest variable index. Every strategy
assigns the minimum value of the chosen domain except ``wdegM``, which
assigns the maximum.
"""

from __future__ import annotations

from enum import Enum
from typing import Callable, Iterable, Optional

from .csp import Model, SearchState


class StrategyId(Enum):
    FF = "ff"            # first fail: min domain size
    ACT = "act"          # max activity
    WDEG_MIN = "wdegm"   # max weighted degree, min value
    WDEG_MAX = "wdegM"   # max weighted degree, max value
    MREGRET = "mregret"  # max (largest - second largest) in domain
    MOSTC = "mostc"      # most constrained variable (static degree)
    DWDEG = "dwdeg"      # min domain-size / weighted-degree ratio

    @property
    def token(self) -> str:
        return self.value


ALL_STRATEGIES: tuple[StrategyId, ...] = tuple(StrategyId)

_BY_TOKEN = {s.value: s for s in StrategyId}


def parse_strategy(token: str) -> StrategyId:
    try:
        return _BY_TOKEN[token]
    except KeyError:
        valid = ", ".join(s.value for s in StrategyId)
        raise ValueError(f"unknown strategy {token!r} (expected one of: {valid})") from None


def parse_strategies(tokens: str) -> tuple[StrategyId, ...]:
    return tuple(parse_strategy(t.strip()) for t in tokens.split(",") if t.strip())


class CounterState:
    """Per-search-run activity and weighted-degree counters.

    ``wdeg[v]`` goes up by one whenever a constraint containing ``v`` fails.
    ``activity[v]`` goes up by at most one per branching decision, when
    propagation pruned ``v`` under that decision. Counters reset at the start
    of every subproblem solve. An optional multiplicative decay (default 1.0,
    i.e. none) can be applied once per decision.
    """

    __slots__ = ("activity", "wdeg", "decay", "_last_bump")

    def __init__(self, n: int, decay: float = 1.0):
        if not 0.0 < decay <= 1.0:
            raise ValueError("decay must be in (0, 1]")
        self.activity = [0.0] * n
        self.wdeg = [0] * n
        self.decay = decay
        self._last_bump = [-1] * n

    def on_failure(self, scope: Iterable[int]) -> None:
        wdeg = self.wdeg
        for v in scope:
            wdeg[v] += 1

    def on_pruned(self, var: int, decision_index: int) -> None:
        if self._last_bump[var] != decision_index:
            self._last_bump[var] = decision_index
            self.activity[var] += 1.0

    def bump_pruned_many(self, pruned: Iterable[int], decision_index: int) -> None:
        last = self._last_bump
        act = self.activity
        for v in pruned:
            if last[v] != decision_index:
                last[v] = decision_index
                act[v] += 1.0

    def apply_decay(self) -> None:
        if self.decay < 1.0:
            g = self.decay
            self.activity = [a * g for a in self.activity]


def on_constraint_failure(counters: CounterState, scope: Iterable[int]) -> CounterState:
    counters.on_failure(scope)
    return counters


def on_propagation_event(counters: CounterState, var: int, decision_index: int) -> CounterState:
    counters.on_pruned(var, decision_index)
    return counters


def variable_chooser(
    model: Model, sid: StrategyId, counters: CounterState
) -> Callable[[list[int]], int]:
    """Compile ``sid`` into a closure ``doms -> var index`` (-1 = all assigned).

    The returned function is the hot path of the search; it scans domains once
    and keeps the first variable achieving the best criterion value.
    """
    n = model.n

    if sid is StrategyId.FF:

        def choose(doms: list[int]) -> int:
            best = -1
            bk = 0
            for v in range(n):
                d = doms[v]
                if d & (d - 1) == 0:
                    continue
                k = d.bit_count()
                if best < 0 or k < bk:
                    best = v
                    bk = k
            return best

    elif sid is StrategyId.ACT:
        act = counters.activity

        def choose(doms: list[int]) -> int:
            best = -1
            bk = 0.0
            for v in range(n):
                d = doms[v]
                if d & (d - 1) == 0:
                    continue
                k = act[v]
                if best < 0 or k > bk:
                    best = v
                    bk = k
            return best

    elif sid is StrategyId.WDEG_MIN or sid is StrategyId.WDEG_MAX:
        wdeg = counters.wdeg

        def choose(doms: list[int]) -> int:
            best = -1
            bk = 0
            for v in range(n):
                d = doms[v]
                if d & (d - 1) == 0:
                    continue
                k = wdeg[v]
                if best < 0 or k > bk:
                    best = v
                    bk = k
            return best

    elif sid is StrategyId.MREGRET:

        def choose(doms: list[int]) -> int:
            best = -1
            bk = -1
            for v in range(n):
                d = doms[v]
                if d & (d - 1) == 0:
                    continue
                hi = d.bit_length() - 1
                k = hi - (d ^ (1 << hi)).bit_length() + 1
                if best < 0 or k > bk:
                    best = v
                    bk = k
            return best

    elif sid is StrategyId.MOSTC:
        deg = model.static_degree

        def choose(doms: list[int]) -> int:
            best = -1
            bk = -1
            for v in range(n):
                d = doms[v]
                if d & (d - 1) == 0:
                    continue
                k = deg[v]
                if best < 0 or k > bk:
                    best = v
                    bk = k
            return best

    else:  # DWDEG: minimize size/wdeg, exact integer cross-comparison
        wdeg = counters.wdeg

        def choose(doms: list[int]) -> int:
            best = -1
            bs = 0
            bw = 1
            for v in range(n):
                d = doms[v]
                if d & (d - 1) == 0:
                    continue
                s = d.bit_count()
                w = wdeg[v]
                if w < 1:
                    w = 1
                # s/w < bs/bw  <=>  s*bw < bs*w
                if best < 0 or s * bw < bs * w:
                    best = v
                    bs = s
                    bw = w
            return best

    return choose


def select_variable(
    state: SearchState,
    model: Optional[Model],
    sid: StrategyId,
    counters: CounterState,
) -> Optional[int]:
    """Pick the next branching variable, or None when all are assigned."""
    m = model if model is not None else state.model
    v = variable_chooser(m, sid, counters)(state.masks)
    return None if v < 0 else v


def select_value(state: SearchState, var: int, sid: StrategyId) -> int:
    """Minimum of the domain for every strategy except wdegM (maximum)."""
    d = state.masks[var]
    if d == 0:
        raise ValueError("empty domain")
    base = state.model.lo
    if sid is StrategyId.WDEG_MAX:
        return d.bit_length() - 1 + base
    return (d & -d).bit_length() - 1 + base
