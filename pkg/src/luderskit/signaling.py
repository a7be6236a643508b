"""How much a nonselective measurement can shift the statistics of a test effect.

If a measurement of the family ``F`` in one region could change the
outcome statistics of an effect ``B`` measured in a causally separated
region, it would signal. The largest possible shift over all states is
the operator norm of the deviation operator, attained on a pure state.
Everything here works on one Hilbert space where ``F`` and ``B`` play
the two local roles.

Results are finite-dimensional evidence only.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .ensembles import (
    SIGMA_X,
    EnsembleConfig,
    Regime,
    qubit_deviation_prediction,
    random_instance,
    trial_rng,
    unsharp_qubit_family,
)
from .exceptions import LudersError, OutOfRange
from .linalg import DEFAULT_TOL, Tolerances, commutator, operator_norm
from .lueders import deviation, lueders_unsharp
from .quantum import DensityOperator, EffectFamily, expectation, pure_state

__all__ = [
    "SignalingRecord",
    "SweepRow",
    "ScanRecord",
    "ScanResult",
    "SeparationViolated",
    "max_signaling_state",
    "sweep_unsharpness",
    "scan_commutator_vs_deviation",
    "DEFAULT_LAMBDA_GRID",
]

DEFAULT_LAMBDA_GRID = [k / 20 for k in range(21)]

# Separation between the commuting and the non-commuting cluster of a scan.
NONCOMMUTING_MIN = 1e-3
NONCOMMUTING_DEV_FLOOR = 1e-12
COMMUTING_MAX = 1e-12
COMMUTING_DEV_CEIL = 1e-9


class SeparationViolated(LudersError, AssertionError):
    def __init__(self, offenders):
        self.offenders = offenders
        super().__init__(f"{len(offenders)} scan record(s) break the commuting/non-commuting separation")


@dataclass(frozen=True, eq=False)
class SignalingRecord:
    """Worst-case statistics shift and the pure state that achieves it.

    ``witness_value = tr[L(rho*) B] - tr[rho* B] = -tr[rho* D]`` where
    ``D`` is the deviation operator; its absolute value equals
    ``deviation_norm``.
    """

    deviation_norm: float
    witness_state: DensityOperator
    witness_value: float
    commutator_norm: float
    config: dict = field(default_factory=dict)

    def to_dict(self, include_operators=False) -> dict:
        out = {
            "kind": "signaling",
            "deviation_norm": self.deviation_norm,
            "witness_value": self.witness_value,
            "commutator_norm": self.commutator_norm,
            "config": dict(self.config),
        }
        if include_operators:
            from .serialization import operator_to_json

            out["witness_state"] = operator_to_json(self.witness_state.op)
        return out


def max_signaling_state(F: EffectFamily, B, tol: Tolerances = DEFAULT_TOL,
                        config: Optional[dict] = None) -> SignalingRecord:
    rep = deviation(F, B, tol)
    w, V = np.linalg.eigh(rep.deviation_op)
    j = int(np.argmax(np.abs(w)))
    return SignalingRecord(
        deviation_norm=rep.deviation_norm,
        witness_state=pure_state(V[:, j]),
        witness_value=float(-w[j]),
        commutator_norm=rep.max_commutator_norm,
        config=dict(config or {}),
    )


def signaling_shift(F: EffectFamily, B, rho: DensityOperator, tol: Tolerances = DEFAULT_TOL) -> float:
    """``tr[L(rho) B] - tr[rho B]`` computed through the channel itself."""
    return expectation(lueders_unsharp(F, rho), B, tol) - expectation(rho, B, tol)


@dataclass(frozen=True)
class SweepRow:
    lam: float
    measured: float
    predicted: float

    @property
    def abs_error(self) -> float:
        return abs(self.measured - self.predicted)


def sweep_unsharpness(lam_grid: Iterable[float] = DEFAULT_LAMBDA_GRID,
                      tol: Tolerances = DEFAULT_TOL) -> List[SweepRow]:
    """Deviation of ``sigma_x`` under the unsharp qubit family across ``lam_grid``."""
    rows = []
    for lam in lam_grid:
        lam = float(lam)
        if not 0.0 <= lam <= 1.0:
            raise OutOfRange(f"unsharpness must lie in [0, 1], got {lam}")
        F, _ = unsharp_qubit_family(lam, tol)
        rows.append(SweepRow(lam, deviation(F, SIGMA_X, tol).deviation_norm,
                             qubit_deviation_prediction(lam)))
    return rows


@dataclass(frozen=True)
class ScanRecord:
    trial: int
    seed: int
    dim: int
    n_outcomes: int
    regime: str
    commutator_norm: float
    deviation_norm: float
    rejected_draws: int = 0

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "dim": self.dim,
            "n_outcomes": self.n_outcomes,
            "regime": self.regime,
            "commutator_norm": self.commutator_norm,
            "deviation_norm": self.deviation_norm,
        }


@dataclass(frozen=True)
class ScanResult:
    records: List[ScanRecord]

    @property
    def rejected(self) -> int:
        return sum(r.rejected_draws for r in self.records)

    @property
    def rejection_rate(self) -> float:
        drawn = len(self.records) + self.rejected
        return self.rejected / drawn if drawn else 0.0


def separation_offenders(records: Sequence[ScanRecord]) -> List[ScanRecord]:
    bad = []
    for r in records:
        if r.commutator_norm > NONCOMMUTING_MIN and r.deviation_norm < NONCOMMUTING_DEV_FLOOR:
            bad.append(r)
        elif r.commutator_norm <= COMMUTING_MAX and r.deviation_norm > COMMUTING_DEV_CEIL:
            bad.append(r)
    return bad


def draw_instance(cfg: EnsembleConfig, counter: int, tol: Tolerances = DEFAULT_TOL,
                  min_commutator: Optional[float] = None, max_draws: int = 1000):
    """Draw ``(F, B)`` for trial ``counter``; optionally reject near-commuting pairs.

    Returns ``(F, B, rejected)``. The generator is derived from
    ``(cfg.seed, counter)`` only.
    """
    rng = trial_rng(cfg.seed, counter)
    rejected = 0
    for _ in range(max_draws):
        F, B = random_instance(cfg, rng, tol)
        if min_commutator is None:
            return F, B, rejected
        if max(operator_norm(commutator(E.op, B.op)) for E in F) >= min_commutator:
            return F, B, rejected
        rejected += 1
    raise LudersError(f"no draw with commutator >= {min_commutator} in {max_draws} attempts")


def scan_commutator_vs_deviation(configs: Sequence[EnsembleConfig] | EnsembleConfig,
                                 trials: int, tol: Tolerances = DEFAULT_TOL,
                                 min_commutator: Optional[float] = None,
                                 threads: int = 1, check: bool = True) -> ScanResult:
    """Record ``(max_i ||[E_i, B]||, deviation_norm)`` over seeded trials.

    ``configs`` may be one config or a list used round-robin by trial
    index. With ``min_commutator`` near-commuting generic draws are
    rejected and redrawn (the count is kept). When ``check`` is set, a
    :class:`SeparationViolated` is raised if a clearly non-commuting
    record has vanishing deviation or a commuting one a visible deviation.
    """
    if trials < 1:
        raise OutOfRange("trials must be >= 1")
    if isinstance(configs, EnsembleConfig):
        configs = [configs]

    def one(t):
        cfg = configs[t % len(configs)]
        need = min_commutator if cfg.regime is not Regime.COMMUTING else None
        F, B, rejected = draw_instance(cfg, t, tol, need)
        rep = deviation(F, B, tol)
        return ScanRecord(t, cfg.seed, cfg.dim, len(F), cfg.regime_label,
                          rep.max_commutator_norm, rep.deviation_norm, rejected)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            records = list(pool.map(one, range(trials)))
    else:
        records = [one(t) for t in range(trials)]
    result = ScanResult(records)
    if check:
        bad = separation_offenders(records)
        if bad:
            raise SeparationViolated(bad)
    return result
