"""Validated measurement-theory values: effects, POVMs, PV families, states.

Validation happens once, at construction. Every downstream function
trusts these types and does not re-check them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .exceptions import (
    DimMismatch,
    Incomplete,
    NotADensity,
    NotHermitian,
    NotProjective,
    SpectrumOutOfRange,
    LudersError,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_operator,
    dagger,
    hermitian_violation,
    operator_norm,
    psd_sqrt,
)

__all__ = [
    "MAX_OUTCOMES",
    "Effect",
    "EffectFamily",
    "ProjectiveFamily",
    "DensityOperator",
    "ProjectivityReport",
    "make_effect",
    "complement",
    "make_family",
    "make_projective_family",
    "make_density",
    "is_projective",
    "expectation",
]

MAX_OUTCOMES = 64


def _frozen(A: np.ndarray) -> np.ndarray:
    A = np.array(A, dtype=np.complex128, copy=True)
    A.setflags(write=False)
    return A


@dataclass(frozen=True, eq=False)
class Effect:
    """A hermitian operator with ``0 <= E <= I``.

    Build with :func:`make_effect`; the direct constructor skips validation.
    """

    op: np.ndarray
    spectrum: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return self.op.shape[0]


@dataclass(frozen=True, eq=False)
class DensityOperator:
    op: np.ndarray

    @property
    def dim(self) -> int:
        return self.op.shape[0]


@dataclass(frozen=True, eq=False)
class EffectFamily:
    """A finite list of effects summing to the identity.

    Square roots of all effects are computed eagerly at construction, so
    the family can be shared freely and reused across many channel
    applications.
    """

    effects: Tuple[Effect, ...]
    roots: Tuple[np.ndarray, ...] = field(repr=False, default=None)

    def __post_init__(self):
        if self.roots is None:
            roots = tuple(_frozen(psd_sqrt(E.op)) for E in self.effects)
            object.__setattr__(self, "roots", roots)

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    @property
    def ops(self) -> List[np.ndarray]:
        return [E.op for E in self.effects]

    def __len__(self):
        return len(self.effects)

    def __iter__(self):
        return iter(self.effects)

    def __getitem__(self, i):
        return self.effects[i]


@dataclass(frozen=True, eq=False)
class ProjectiveFamily(EffectFamily):
    """An effect family of mutually orthogonal projections (a PV measure)."""


@dataclass(frozen=True)
class ProjectivityReport:
    projective: bool
    max_idempotence_residual: float
    max_orthogonality_residual: float

    def __bool__(self):
        return self.projective


def make_effect(A, tol: Tolerances = DEFAULT_TOL) -> Effect:
    """Validate ``A`` as an effect and wrap it.

    Raises
    ------
    NotHermitian
        If ``||A - A^dag|| > tol.hermitian_tol``.
    SpectrumOutOfRange
        If an eigenvalue lies outside ``[-psd_tol, 1 + psd_tol]``.
    """
    A = as_operator(A)
    violation = hermitian_violation(A)
    if violation > tol.hermitian_tol:
        raise NotHermitian(violation, tol.hermitian_tol)
    w = np.linalg.eigvalsh(0.5 * (A + dagger(A)))
    if w[0] < -tol.psd_tol or w[-1] > 1.0 + tol.psd_tol:
        raise SpectrumOutOfRange(w[0], w[-1])
    spectrum = w.copy()
    spectrum.setflags(write=False)
    return Effect(_frozen(A), spectrum)


def complement(E: Effect) -> Effect:
    """``I - E``."""
    op = np.eye(E.dim, dtype=np.complex128) - E.op
    spectrum = None if E.spectrum is None else (1.0 - E.spectrum)[::-1].copy()
    return Effect(_frozen(op), spectrum)


def _coerce_effects(ops, tol) -> List[Effect]:
    effects = [E if isinstance(E, Effect) else make_effect(E, tol) for E in ops]
    if not effects:
        raise LudersError("an effect family needs at least one effect")
    if len(effects) > MAX_OUTCOMES:
        raise LudersError(f"at most {MAX_OUTCOMES} outcomes are supported, got {len(effects)}")
    if len({E.op.shape for E in effects}) != 1:
        raise DimMismatch("effects in a family must share one dimension")
    return effects


def make_family(ops: Sequence, tol: Tolerances = DEFAULT_TOL) -> EffectFamily:
    """Validate a complete family of effects (a POVM).

    Elements may be raw operators or already-validated :class:`Effect` s.

    Raises
    ------
    Incomplete
        If ``||sum_i E_i - I|| > tol.zero_tol``.
    """
    effects = _coerce_effects(ops, tol)
    total = sum(E.op for E in effects)
    residual = operator_norm(total - np.eye(effects[0].dim))
    if residual > tol.zero_tol:
        raise Incomplete(residual)
    return EffectFamily(tuple(effects))


def is_projective(F: EffectFamily, tol: Tolerances = DEFAULT_TOL) -> ProjectivityReport:
    """Check that every member is idempotent and members are pairwise orthogonal.

    The report is truthy exactly when the family is projective; it also
    carries the largest residuals found.
    """
    idem = max(operator_norm(E.op @ E.op - E.op) for E in F.effects)
    ortho = 0.0
    for j, Ej in enumerate(F.effects):
        for Ek in F.effects[j + 1:]:
            ortho = max(ortho, operator_norm(Ej.op @ Ek.op))
    ok = idem <= tol.zero_tol and ortho <= tol.zero_tol
    return ProjectivityReport(ok, idem, ortho)


def make_projective_family(ops: Sequence, tol: Tolerances = DEFAULT_TOL) -> ProjectiveFamily:
    F = ops if isinstance(ops, EffectFamily) else make_family(ops, tol)
    report = is_projective(F, tol)
    if not report:
        raise NotProjective(max(report.max_idempotence_residual, report.max_orthogonality_residual))
    # For a projection the square root is the projection itself.
    return ProjectiveFamily(F.effects, tuple(E.op for E in F.effects))


def make_density(A, tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    """Validate a density operator: hermitian, positive, unit trace."""
    A = as_operator(A)
    violation = hermitian_violation(A)
    if violation > tol.hermitian_tol:
        raise NotHermitian(violation, tol.hermitian_tol)
    w = np.linalg.eigvalsh(0.5 * (A + dagger(A)))
    if w[0] < -tol.psd_tol:
        raise NotADensity(f"state has negative eigenvalue {w[0]:.3e}")
    tr = np.trace(A).real
    if abs(tr - 1.0) > tol.zero_tol:
        raise NotADensity(f"state trace is {tr!r}, not 1")
    return DensityOperator(_frozen(A))


def pure_state(psi) -> DensityOperator:
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    psi = psi / np.linalg.norm(psi)
    return DensityOperator(_frozen(np.outer(psi, psi.conj())))


def expectation(rho: DensityOperator, B, tol: Tolerances = DEFAULT_TOL) -> float:
    """``tr[rho B]`` for hermitian ``B``.

    Raises
    ------
    DimMismatch, NotHermitian
    """
    B = B.op if isinstance(B, Effect) else as_operator(B)
    if B.shape != rho.op.shape:
        raise DimMismatch(f"state is {rho.op.shape}, observable is {B.shape}")
    violation = hermitian_violation(B)
    if violation > tol.hermitian_tol:
        raise NotHermitian(violation, tol.hermitian_tol)
    value = np.einsum("ij,ji->", rho.op, B)
    if abs(value.imag) > tol.zero_tol:
        raise NotHermitian(abs(value.imag))
    return float(value.real)
