"""Randomised trials of unravel -> network -> ordering, keeping the best."""

from __future__ import annotations

import hashlib
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .graph import Graph
from .network import FusionNetwork, build_network
from .ordering import OVERHEAD, FusionSchedule, determine_order, random_order, _check
from .unravel import UnravelResult, check_components, unravel

__all__ = [
    "StrategyConfig",
    "Outcome",
    "Fixed",
    "Adaptive",
    "trial_rng",
    "run_trial",
    "optimize",
    "default_workers",
]

MATCHING = "matching"
RANDOM = "random"


@dataclass(frozen=True)
class StrategyConfig:
    """Settings of one optimisation run.

    ``unraveling=False`` is the no-unraveling ablation (s1) and
    ``ordering="random"`` the random-order ablation (s2).
    """

    p_succ: float = 0.5
    measure: str = OVERHEAD
    unraveling: bool = True
    ordering: str = MATCHING
    master_seed: int = 0

    def __post_init__(self) -> None:
        _check(self.p_succ, self.measure)
        if self.ordering not in (MATCHING, RANDOM):
            raise ValueError(f"unknown ordering {self.ordering!r}")

    @classmethod
    def for_strategy(cls, strategy: str, **kw) -> StrategyConfig:
        if strategy == "full":
            return cls(**kw)
        if strategy == "s1":
            return cls(unraveling=False, **kw)
        if strategy == "s2":
            return cls(ordering=RANDOM, **kw)
        raise ValueError(f"unknown strategy {strategy!r}; use full, s1 or s2")

    @property
    def strategy(self) -> str:
        if not self.unraveling and self.ordering == MATCHING:
            return "s1"
        if self.unraveling and self.ordering == RANDOM:
            return "s2"
        if self.unraveling:
            return "full"
        return "s1+s2"


@dataclass(frozen=True)
class Fixed:
    trials: int


@dataclass(frozen=True)
class Adaptive:
    m_init: int
    max_trials: int | None = None


@dataclass(frozen=True)
class Outcome:
    q_opt: float
    unravel_result: UnravelResult
    network: FusionNetwork
    schedule: FusionSchedule
    trial_index: int
    trials_run: int
    config: StrategyConfig
    batch_minima: tuple[float, ...] = field(default=())


def trial_rng(master_seed: int, trial_index: int) -> random.Random:
    """Independent RNG stream for one trial, stable across processes."""
    digest = hashlib.blake2b(
        f"{master_seed}:{trial_index}".encode(), digest_size=16
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


def run_trial(graph: Graph, cfg: StrategyConfig, trial_index: int) -> Outcome:
    rng = trial_rng(cfg.master_seed, trial_index)
    ur = unravel(graph, rng, enabled=cfg.unraveling)
    net = build_network(ur, rng)
    if cfg.ordering == MATCHING:
        sched = determine_order(net, cfg.p_succ, cfg.measure, rng)
    else:
        sched = random_order(net, cfg.p_succ, cfg.measure, rng)
    return Outcome(sched.q_value, ur, net, sched, trial_index, 1, cfg)


def _best_in_range(args) -> tuple[float, int]:
    graph, cfg, start, stop = args
    best = (float("inf"), -1)
    for i in range(start, stop):
        q = run_trial(graph, cfg, i).q_opt
        if (q, i) < best:
            best = (q, i)
    return best


def default_workers() -> int:
    env = os.environ.get("FUSEGRAPH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _batch(graph, cfg, start, count, workers, pool) -> tuple[float, int]:
    if pool is None or workers <= 1 or count < 2:
        return _best_in_range((graph, cfg, start, start + count))
    chunks = min(count, workers * 4)
    bounds = [start + count * k // chunks for k in range(chunks + 1)]
    jobs = [(graph, cfg, a, b) for a, b in zip(bounds, bounds[1:]) if b > a]
    return min(pool.map(_best_in_range, jobs))


def optimize(
    graph: Graph,
    cfg: StrategyConfig,
    mode: Fixed | Adaptive,
    workers: int | None = None,
) -> Outcome:
    """Best outcome over randomised trials.

    ``Fixed(m)`` runs trials ``0..m-1``. ``Adaptive(m_init)`` runs batches
    of ``m_init``, ``2*m_init``, ... trials (consecutive trial indices) and
    stops once a batch minimum fails to improve on the previous batch's.
    Ties between equal Q are broken by the smallest trial index, so the
    result does not depend on ``workers``.
    """
    check_components(graph)
    workers = default_workers() if workers is None else max(1, workers)
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        if isinstance(mode, Fixed):
            if mode.trials < 1:
                raise ValueError("need at least one trial")
            best = _batch(graph, cfg, 0, mode.trials, workers, pool)
            total = mode.trials
            minima = (best[0],)
        elif isinstance(mode, Adaptive):
            if mode.m_init < 1:
                raise ValueError("m_init must be >= 1")
            size, start = mode.m_init, 0
            prev = _batch(graph, cfg, start, size, workers, pool)
            best, minima = prev, [prev[0]]
            start += size
            while mode.max_trials is None or start + 2 * size <= mode.max_trials:
                size *= 2
                cur = _batch(graph, cfg, start, size, workers, pool)
                start += size
                minima.append(cur[0])
                best = min(best, cur)
                if prev[0] <= cur[0]:
                    break
                prev = cur
            total = start
            minima = tuple(minima)
        else:
            raise TypeError(f"unknown iteration mode {mode!r}")
    finally:
        if pool is not None:
            pool.shutdown()
    out = run_trial(graph, cfg, best[1])
    return Outcome(
        out.q_opt, out.unravel_result, out.network, out.schedule,
        best[1], total, cfg, minima,
    )
