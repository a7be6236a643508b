"""Nonselective Lüders state change, its Heisenberg dual, and the deviation operator.

For an effect family ``F = {E_i}`` the state change is

    rho  ->  sum_i E_i^(1/2) rho E_i^(1/2)

and its dual on observables is ``B -> sum_i E_i^(1/2) B E_i^(1/2)``. The
statistics of ``B`` are left unchanged for every state exactly when the
deviation operator ``B - dual(B)`` vanishes; since the deviation is
hermitian, its operator norm is the largest shift any state can see.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .exceptions import DimMismatch, IndexOutOfRange, NotHermitian
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_operator,
    dagger,
    hermitian_violation,
    max_commutator_norm,
    operator_norm,
)
from .quantum import (
    DensityOperator,
    Effect,
    EffectFamily,
    ProjectiveFamily,
    _frozen,
    make_projective_family,
)

__all__ = [
    "DeviationReport",
    "lueders_sharp",
    "lueders_unsharp",
    "selective_outcome",
    "heisenberg_dual",
    "deviation",
]


@dataclass(frozen=True, eq=False)
class DeviationReport:
    deviation_norm: float
    deviation_op: np.ndarray
    max_commutator_norm: float
    preserved: bool
    dim: int
    n_outcomes: int

    def to_dict(self) -> dict:
        return {
            "deviation_norm": self.deviation_norm,
            "max_commutator_norm": self.max_commutator_norm,
            "preserved": self.preserved,
            "dim": self.dim,
            "n_outcomes": self.n_outcomes,
        }


def _check_state(F: EffectFamily, rho: DensityOperator):
    if rho.op.shape != (F.dim, F.dim):
        raise DimMismatch(f"family acts on dim {F.dim}, state has shape {rho.op.shape}")


def _observable(F: EffectFamily, B, tol: Tolerances) -> np.ndarray:
    B = B.op if isinstance(B, Effect) else as_operator(B)
    if B.shape != (F.dim, F.dim):
        raise DimMismatch(f"family acts on dim {F.dim}, observable has shape {B.shape}")
    violation = hermitian_violation(B)
    if violation > tol.hermitian_tol:
        raise NotHermitian(violation, tol.hermitian_tol)
    return B


def _sandwich_sum(ops, X: np.ndarray) -> np.ndarray:
    out = np.zeros_like(X, dtype=np.complex128)
    for K in ops:
        out += K @ X @ K
    return 0.5 * (out + dagger(out))


def lueders_sharp(F: ProjectiveFamily, rho: DensityOperator) -> DensityOperator:
    """``sum_i P_i rho P_i`` for a projective family.

    A plain :class:`EffectFamily` is accepted if it passes the
    projectivity check.
    """
    if not isinstance(F, ProjectiveFamily):
        F = make_projective_family(F)
    _check_state(F, rho)
    return DensityOperator(_frozen(_sandwich_sum(F.ops, rho.op)))


def lueders_unsharp(F: EffectFamily, rho: DensityOperator) -> DensityOperator:
    """``sum_i E_i^(1/2) rho E_i^(1/2)``."""
    _check_state(F, rho)
    return DensityOperator(_frozen(_sandwich_sum(F.roots, rho.op)))


def selective_outcome(
    F: EffectFamily, i: int, rho: DensityOperator, tol: Tolerances = DEFAULT_TOL
) -> Tuple[float, Optional[DensityOperator]]:
    """Probability of outcome ``i`` and the conditional post-measurement state.

    The post-state is ``E_i^(1/2) rho E_i^(1/2) / p`` and is ``None`` when
    ``p <= tol.zero_tol``.
    """
    if not 0 <= i < len(F):
        raise IndexOutOfRange(f"outcome index {i} outside 0..{len(F) - 1}")
    _check_state(F, rho)
    p = float(np.einsum("ij,ji->", F.effects[i].op, rho.op).real)
    if p <= tol.zero_tol:
        return p, None
    S = F.roots[i]
    post = S @ rho.op @ S / p
    return p, DensityOperator(_frozen(0.5 * (post + dagger(post))))


def heisenberg_dual(F: EffectFamily, B, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``sum_i E_i^(1/2) B E_i^(1/2)`` for hermitian ``B``."""
    B = _observable(F, B, tol)
    return _sandwich_sum(F.roots, B)


def deviation(F: EffectFamily, B, tol: Tolerances = DEFAULT_TOL) -> DeviationReport:
    """Deviation operator ``B - dual(B)`` and its norm.

    For every state, ``tr[L(rho) B] - tr[rho B] = -tr[rho D]``, so the
    statistics of ``B`` survive the measurement for all states iff
    ``||D|| = 0``. ``preserved`` applies ``tol.zero_tol`` to that norm.
    """
    B = _observable(F, B, tol)
    D = B - _sandwich_sum(F.roots, B)
    D = 0.5 * (D + dagger(D))
    norm = operator_norm(D)
    return DeviationReport(
        deviation_norm=norm,
        deviation_op=D,
        max_commutator_norm=max_commutator_norm(F.ops, B),
        preserved=norm <= tol.zero_tol,
        dim=F.dim,
        n_outcomes=len(F),
    )
