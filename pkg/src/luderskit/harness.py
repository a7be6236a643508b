"""Seeded verification batches.

Trial ``t`` of a batch is fully determined by the master seed and ``t``:
its configuration is picked round-robin from the requested regimes,
dimensions and outcome counts, and its random stream comes from
:func:`~luderskit.ensembles.trial_rng`. Results are returned in trial
order whatever the thread count.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .ensembles import EnsembleConfig, Regime, lemma_instance, trial_rng
from .linalg import DEFAULT_TOL, Tolerances
from .signaling import draw_instance
from .theorem import DEFAULT_N_MAX, check_lemma, check_prop1, check_prop2, LemmaReport

__all__ = [
    "TrialResult",
    "BatchResult",
    "trial_configs",
    "run_prop1",
    "run_prop2",
    "builtin_lemma_fixtures",
    "run_lemma",
]

MIN_NONCOMMUTING = 1e-3


@dataclass(frozen=True, eq=False)
class TrialResult:
    trial: int
    config: EnsembleConfig
    report: object
    rejected_draws: int = 0

    @property
    def ok(self) -> bool:
        r = self.report
        extra = getattr(r, "crosscheck_agree", True) and getattr(r, "implication_holds", True)
        return r.verdict_consistent and extra

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "config": self.config.to_dict(),
            "rejected_draws": self.rejected_draws,
            "ok": self.ok,
            **self.report.to_dict(),
        }


@dataclass(frozen=True)
class BatchResult:
    results: List[TrialResult]

    @property
    def failures(self) -> List[TrialResult]:
        return [r for r in self.results if not r.ok]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def rejected(self) -> int:
        return sum(r.rejected_draws for r in self.results)


def trial_configs(seed: int, trials: int, dims: Sequence[int], outcomes: Sequence[int],
                  regimes: Sequence[Tuple[Regime, Optional[float]]]) -> List[EnsembleConfig]:
    """Configuration of every trial, cycling regimes fastest, then dims, then outcomes."""
    combos = [
        (reg, d, n)
        for n, d, reg in itertools.product(outcomes, dims, regimes)
    ]
    out = []
    for t in range(trials):
        (regime, lam), dim, n = combos[t % len(combos)]
        if regime is Regime.UNSHARP_QUBIT:
            dim, n = 2, 2
        out.append(EnsembleConfig(seed, dim, n, regime, lam))
    return out


def _map(fn: Callable, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def run_prop1(seed: int, trials: int, dims: Sequence[int], outcomes: Sequence[int],
              regimes: Sequence[Tuple[Regime, Optional[float]]],
              tol: Tolerances = DEFAULT_TOL, threads: int = 1) -> BatchResult:
    cfgs = trial_configs(seed, trials, dims, outcomes, regimes)

    def one(t):
        F, B, rejected = draw_instance(cfgs[t], t, tol)
        return TrialResult(t, cfgs[t], check_prop1(F, B, tol), rejected)

    return BatchResult(_map(one, range(trials), threads))


def run_prop2(seed: int, trials: int, dims: Sequence[int],
              regimes: Sequence[Tuple[Regime, Optional[float]]],
              tol: Tolerances = DEFAULT_TOL, threads: int = 1, n_max: int = DEFAULT_N_MAX,
              min_commutator: float = MIN_NONCOMMUTING) -> BatchResult:
    """Binary-family batch.

    Outside the commuting regime, draws with ``||[E, B]|| < min_commutator``
    are rejected and redrawn from the same trial stream.
    """
    cfgs = trial_configs(seed, trials, dims, [2], regimes)

    def one(t):
        cfg = cfgs[t]
        need = None if cfg.regime in (Regime.COMMUTING, Regime.UNSHARP_QUBIT) else min_commutator
        if cfg.dim == 1:
            need = None
        F, B, rejected = draw_instance(cfg, t, tol, need)
        return TrialResult(t, cfg, check_prop2(F.effects[0], B, tol, n_max), rejected)

    return BatchResult(_map(one, range(trials), threads))


def builtin_lemma_fixtures(seed: int = 0, n_random: int = 8) -> List[Tuple[str, np.ndarray, np.ndarray]]:
    """Named ``(x, a)`` pairs satisfying ``[x, [x, a]] = 0``.

    Fixed cases: the 2 x 2 nilpotent pair, a 3 x 3 shift against
    ``diag(2, 1, 0)``, a commuting diagonal pair, and a hermitian ``x``
    against a polynomial in ``x``. Then ``n_random`` exact shift
    constructions of dims 2..8.
    """
    fixtures = [
        ("nilpotent-2x2", np.array([[0, 1], [0, 0]], dtype=complex), np.diag([1.0, 0.0]).astype(complex)),
        ("shift-3x3", np.diag([1.0, 1.0], 1).astype(complex), np.diag([2.0, 1.0, 0.0]).astype(complex)),
        ("commuting-diagonal", np.diag([0.5, -1.0, 2.0]).astype(complex), np.diag([3.0, 1.0, -2.0]).astype(complex)),
    ]
    rng = trial_rng(seed, 0)
    H = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    H = (H + H.conj().T) / 4
    fixtures.append(("hermitian-polynomial", H, H @ H - 0.5 * H + np.eye(4)))
    for k in range(n_random):
        r = trial_rng(seed, k + 1)
        dim = 2 + k % 7
        x, a = lemma_instance(dim, r)
        fixtures.append((f"random-shift-{k}-d{dim}", x, a))
    return fixtures


def run_lemma(fixtures: Sequence[Tuple[str, np.ndarray, np.ndarray]],
              n_max: int = DEFAULT_N_MAX, tol: Tolerances = DEFAULT_TOL) -> List[LemmaReport]:
    return [check_lemma(x, a, n_max, tol, name=name) for name, x, a in fixtures]
