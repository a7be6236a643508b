"""Executable forms of the generalized Lüders theorem.

Three checks live here:

* :func:`check_prop1` runs the eigenvalue-peeling argument for an
  arbitrary effect family and a test operator with discrete spectrum.
  The top eigenvalue ``b = ||B||`` and its projector ``P`` are split off,
  the condition ``E_i^(1/2) P = P E_i^(1/2) P`` is measured for every
  effect, and the procedure repeats on ``B - b P`` until nothing is left.
* :func:`check_prop2` handles binary families ``{E, I - E}`` through the
  double commutator ``[E^(1/2), [E^(1/2), B]]`` and the spectral radius
  of ``C = i[E^(1/2), B]``.
* :func:`check_lemma` verifies ``d^n(a^n) = n! (da)^n`` for an inner
  derivation with ``d^2 a = 0`` and that ``da`` is quasi-nilpotent.

Every check reports residuals rather than stopping at the first failure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .exceptions import DimMismatch, HypothesisViolated, ZeroOperator
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    anticommutator,
    as_operator,
    commutator,
    eig_hermitian,
    hermitian_violation,
    operator_norm,
    spectral_radius_sequence,
)
from .exceptions import NotHermitian
from .lueders import deviation
from .quantum import Effect, EffectFamily, complement, make_family

__all__ = [
    "CONSISTENT",
    "INCONSISTENT",
    "INCONCLUSIVE",
    "PeelLevel",
    "PeelStep",
    "Prop1Report",
    "Prop2Report",
    "LemmaReport",
    "peel_level",
    "check_prop1",
    "check_prop2",
    "derivation_power",
    "check_lemma",
]

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"

DEFAULT_N_MAX = 64


def _verdict(dev, dev_tol, commutes, gray_values) -> str:
    """Compare 'preserved' with 'commutes'.

    A disagreement is downgraded to inconclusive when any of the measured
    quantities sits in its indifference band ``(tol, 10 tol]``.
    """
    preserved = dev <= dev_tol
    if preserved == commutes:
        return CONSISTENT
    for value, t in [(dev, dev_tol), *gray_values]:
        if t < value <= 10 * t:
            return INCONCLUSIVE
    return INCONSISTENT


def _as_hermitian(B, tol) -> np.ndarray:
    B = B.op if isinstance(B, Effect) else as_operator(B)
    violation = hermitian_violation(B)
    if violation > tol.hermitian_tol:
        raise NotHermitian(violation, tol.hermitian_tol)
    return B


@dataclass(frozen=True, eq=False)
class PeelStep:
    eigenvalue: float
    projector: np.ndarray
    multiplicity: int
    remainder: np.ndarray
    residuals: List[float]


@dataclass(frozen=True, eq=False)
class PeelLevel:
    level: int
    eigenvalue: float
    projector: np.ndarray
    multiplicity: int
    residuals: List[float]
    commutes: bool

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def to_dict(self, include_operators=False) -> dict:
        out = {
            "level": self.level,
            "eigenvalue": self.eigenvalue,
            "multiplicity": self.multiplicity,
            "residuals": list(self.residuals),
            "max_residual": self.max_residual,
            "commutes": self.commutes,
        }
        if include_operators:
            from .serialization import operator_to_json

            out["projector"] = operator_to_json(self.projector)
        return out


def _projector_residuals(F: EffectFamily, P: np.ndarray) -> List[float]:
    return [operator_norm(S @ P - P @ S @ P) for S in F.roots]


def peel_level(B_cur, F: EffectFamily, tol: Tolerances = DEFAULT_TOL) -> PeelStep:
    """Split the top eigenvalue off a positive operator.

    Returns ``b = ||B_cur||``, the projector ``P`` of the top eigenvalue
    cluster, the remainder ``B_cur - b P`` and, for every effect,
    ``||E_i^(1/2) P - P E_i^(1/2) P||``. All residuals vanish iff every
    ``E_i`` commutes with ``P``.

    Raises
    ------
    ZeroOperator
        If ``||B_cur|| <= tol.zero_tol``; nothing is left to peel.
    """
    B_cur = _as_hermitian(B_cur, tol)
    if B_cur.shape != (F.dim, F.dim):
        raise DimMismatch(f"operator has shape {B_cur.shape}, family acts on dim {F.dim}")
    if operator_norm(B_cur) <= tol.zero_tol:
        raise ZeroOperator("remainder has vanished; peeling complete")
    top = eig_hermitian(B_cur, tol).clusters[0]
    P = top.projector
    return PeelStep(
        eigenvalue=top.eigenvalue,
        projector=P,
        multiplicity=top.multiplicity,
        remainder=B_cur - top.eigenvalue * P,
        residuals=_projector_residuals(F, P),
    )


@dataclass(frozen=True, eq=False)
class Prop1Report:
    levels: List[PeelLevel]
    deviation_norm: float
    max_commutator_norm: float
    all_commute: bool
    crosscheck_agree: bool
    verdict: str
    shift: float
    reconstruction_residual: float
    dev_tol: float
    comm_tol: float
    level_tol: float

    @property
    def verdict_consistent(self) -> bool:
        return self.verdict == CONSISTENT

    def first_failing_level(self, threshold: float = 1e-6) -> Optional[int]:
        """Index of the first level whose largest residual exceeds ``threshold``."""
        for lvl in self.levels:
            if lvl.max_residual > threshold:
                return lvl.level
        return None

    def to_dict(self, include_operators=False) -> dict:
        return {
            "kind": "prop1",
            "deviation_norm": self.deviation_norm,
            "max_commutator_norm": self.max_commutator_norm,
            "all_commute": self.all_commute,
            "crosscheck_agree": self.crosscheck_agree,
            "verdict": self.verdict,
            "verdict_consistent": self.verdict_consistent,
            "shift": self.shift,
            "reconstruction_residual": self.reconstruction_residual,
            "n_levels": len(self.levels),
            "first_failing_level": self.first_failing_level(),
            "tolerances": {
                "dev_tol": self.dev_tol,
                "comm_tol": self.comm_tol,
                "level_tol": self.level_tol,
            },
            "levels": [lvl.to_dict(include_operators) for lvl in self.levels],
        }


def check_prop1(F: EffectFamily, B, tol: Tolerances = DEFAULT_TOL) -> Prop1Report:
    """Check 'statistics preserved for all states iff every E_i commutes with B'.

    ``B`` is usually an :class:`Effect`; any hermitian operator is
    accepted; if it is not positive it is shifted by ``||B|| I`` before
    peeling (the shift is recorded and changes neither side of the
    equivalence).

    The peeling runs to completion on non-commuting inputs too, so every
    level's residual profile is available. Commutation is decided twice,
    from the level residuals and from ``max_i ||[E_i, B]||``; the report
    says whether the two agree.
    """
    B = _as_hermitian(B, tol)
    if B.shape != (F.dim, F.dim):
        raise DimMismatch(f"operator has shape {B.shape}, family acts on dim {F.dim}")
    dev = deviation(F, B, tol)
    b_norm = operator_norm(B)
    dev_tol = comm_tol = tol.theorem_tol * b_norm
    level_tol = tol.theorem_tol

    shift = 0.0
    if np.linalg.eigvalsh(0.5 * (B + B.conj().T))[0] < -tol.psd_tol:
        shift = b_norm
    B_pos = B + shift * np.eye(F.dim)

    stop_tol = tol.replace(zero_tol=tol.zero_tol * max(1.0, operator_norm(B_pos)))
    levels: List[PeelLevel] = []
    covered = np.zeros_like(B_pos)
    B_cur = B_pos
    for k in range(F.dim):
        try:
            step = peel_level(B_cur, F, stop_tol)
        except ZeroOperator:
            break
        levels.append(
            PeelLevel(k, step.eigenvalue, step.projector, step.multiplicity, step.residuals,
                      max(step.residuals) <= level_tol)
        )
        covered = covered + step.projector
        B_cur = step.remainder

    rank_left = F.dim - sum(lvl.multiplicity for lvl in levels)
    if rank_left > 0:
        # The kernel of B is the last spectral projector (eigenvalue 0).
        P0 = np.eye(F.dim) - covered
        res = _projector_residuals(F, P0)
        levels.append(PeelLevel(len(levels), 0.0, P0, rank_left, res, max(res) <= level_tol))

    recon = sum((lvl.eigenvalue - shift) * lvl.projector for lvl in levels)
    all_commute = all(lvl.commutes for lvl in levels)
    crosscheck = all_commute == (dev.max_commutator_norm <= comm_tol)
    max_level_residual = max(lvl.max_residual for lvl in levels)
    verdict = _verdict(
        dev.deviation_norm,
        dev_tol,
        all_commute,
        [(dev.max_commutator_norm, comm_tol), (max_level_residual, level_tol)],
    )
    return Prop1Report(
        levels=levels,
        deviation_norm=dev.deviation_norm,
        max_commutator_norm=dev.max_commutator_norm,
        all_commute=all_commute,
        crosscheck_agree=crosscheck,
        verdict=verdict,
        shift=shift,
        reconstruction_residual=operator_norm(recon - B),
        dev_tol=dev_tol,
        comm_tol=comm_tol,
        level_tol=level_tol,
    )


@dataclass(frozen=True, eq=False)
class Prop2Report:
    deviation_norm: float
    commutator_norm: float
    anticommutator_residual: float
    double_comm_norm: float
    identity_gap: float
    c_op: np.ndarray
    c_norm: float
    radius_seq: List[float]
    verdict: str
    implication_holds: bool
    dev_tol: float
    comm_tol: float

    @property
    def verdict_consistent(self) -> bool:
        return self.verdict == CONSISTENT

    @property
    def radius_tail(self) -> float:
        return self.radius_seq[-1]

    def to_dict(self, include_operators=False) -> dict:
        out = {
            "kind": "prop2",
            "deviation_norm": self.deviation_norm,
            "commutator_norm": self.commutator_norm,
            "anticommutator_residual": self.anticommutator_residual,
            "double_comm_norm": self.double_comm_norm,
            "identity_gap": self.identity_gap,
            "c_norm": self.c_norm,
            "radius_tail": self.radius_tail,
            "radius_seq": list(self.radius_seq),
            "verdict": self.verdict,
            "verdict_consistent": self.verdict_consistent,
            "implication_holds": self.implication_holds,
            "tolerances": {"dev_tol": self.dev_tol, "comm_tol": self.comm_tol},
        }
        if include_operators:
            from .serialization import operator_to_json

            out["c_op"] = operator_to_json(self.c_op)
        return out


def check_prop2(
    E: Effect, B, tol: Tolerances = DEFAULT_TOL, n_max: int = DEFAULT_N_MAX
) -> Prop2Report:
    """Check the binary-family form: ``{E, I - E}`` preserves ``B`` iff ``[E, B] = 0``.

    Besides the deviation and ``||[E, B]||`` this records the chain of
    operators the argument passes through:

    * ``anticommutator_residual = ||EB + BE - 2 E^(1/2) B E^(1/2)||``,
    * ``double_comm_norm = ||[E^(1/2), [E^(1/2), B]]||`` (the same operator;
      ``identity_gap`` is the norm of their difference),
    * ``C = i[E^(1/2), B]`` and ``||C^n||^(1/n)`` for ``n <= n_max``.

    ``implication_holds`` is false only if the deviation vanishes while
    ``C`` or its spectral radius does not.
    """
    B = _as_hermitian(B, tol)
    if B.shape != E.op.shape:
        raise DimMismatch(f"operator has shape {B.shape}, effect has shape {E.op.shape}")
    F = make_family([E, complement(E)], tol)
    dev = deviation(F, B, tol)
    S = F.roots[0]
    Emat = E.op

    first = anticommutator(Emat, B) - 2.0 * (S @ B @ S)
    dcomm = commutator(S, commutator(S, B))
    C = 1j * commutator(S, B)
    C = 0.5 * (C + C.conj().T)
    radius = spectral_radius_sequence(C, n_max)
    comm_norm = operator_norm(commutator(Emat, B))
    c_norm = operator_norm(C)

    b_norm = operator_norm(B)
    dev_tol = comm_tol = tol.theorem_tol * b_norm
    verdict = _verdict(dev.deviation_norm, dev_tol, comm_norm <= comm_tol,
                       [(comm_norm, comm_tol)])
    implication = True
    if dev.deviation_norm <= tol.zero_tol:
        implication = radius[-1] <= tol.radius_tol and c_norm <= tol.zero_tol * max(1.0, b_norm)
    return Prop2Report(
        deviation_norm=dev.deviation_norm,
        commutator_norm=comm_norm,
        anticommutator_residual=operator_norm(first),
        double_comm_norm=operator_norm(dcomm),
        identity_gap=float(np.max(np.abs(first - dcomm))),
        c_op=C,
        c_norm=c_norm,
        radius_seq=radius,
        verdict=verdict,
        implication_holds=implication,
        dev_tol=dev_tol,
        comm_tol=comm_tol,
    )


def derivation_power(x, a, n: int) -> np.ndarray:
    """Apply the inner derivation ``d = [x, .]`` to ``a`` ``n`` times."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x, a = as_operator(x), as_operator(a)
    if x.shape != a.shape:
        raise DimMismatch(f"shapes differ: {x.shape} vs {a.shape}")
    out = a
    for _ in range(n):
        out = x @ out - out @ x
    return out


@dataclass(frozen=True, eq=False)
class LemmaReport:
    d2a_norm: float
    da_norm: float
    residuals: List[float]
    residual_bounds: List[float]
    radius_seq: List[float]
    envelope: List[float]
    identity_ok: bool
    bound_ok: bool
    quasi_nilpotent: bool
    name: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.identity_ok and self.bound_ok and self.quasi_nilpotent

    def to_dict(self) -> dict:
        return {
            "kind": "lemma",
            "name": self.name,
            "d2a_norm": self.d2a_norm,
            "da_norm": self.da_norm,
            "residuals": list(self.residuals),
            "residual_bounds": list(self.residual_bounds),
            "radius_seq": list(self.radius_seq),
            "radius_tail": self.radius_seq[-1],
            "envelope": list(self.envelope),
            "identity_ok": self.identity_ok,
            "bound_ok": self.bound_ok,
            "quasi_nilpotent": self.quasi_nilpotent,
            "passed": self.passed,
            **self.extra,
        }


def check_lemma(
    x, a, n_max: int = DEFAULT_N_MAX, tol: Tolerances = DEFAULT_TOL, name: str = ""
) -> LemmaReport:
    """Verify the derivation lemma for ``d = [x, .]`` on a given ``a``.

    Requires ``d^2 a = 0`` (within ``tol.zero_tol * max(1, ||x||^2 ||a||)``).
    For ``n = 1..n_max`` it measures

    * ``||d^n(a^n) - n! (da)^n||`` against ``n! * scale_n * zero_tol`` with
      ``scale_n = max(1, (2||x|| ||a||)^n)``,
    * ``s_n = ||(da)^n||^(1/n)`` against the envelope
      ``(n!)^(-1/n) * 2||x|| * ||a||``,

    and declares ``da`` quasi-nilpotent when ``s_{n_max} <= tol.radius_tol``.

    Raises
    ------
    HypothesisViolated
        If ``d^2 a`` does not vanish.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    x, a = as_operator(x), as_operator(a)
    if x.shape != a.shape:
        raise DimMismatch(f"shapes differ: {x.shape} vs {a.shape}")
    x_norm, a_norm = operator_norm(x), operator_norm(a)
    d2a_norm = operator_norm(derivation_power(x, a, 2))
    hyp_tol = tol.zero_tol * max(1.0, x_norm ** 2 * a_norm)
    if d2a_norm > hyp_tol:
        raise HypothesisViolated(d2a_norm, hyp_tol)

    da = derivation_power(x, a, 1)
    d_norm_bound = 2.0 * x_norm
    residuals, bounds, envelope = [], [], []
    a_pow = np.eye(a.shape[0], dtype=np.complex128)
    da_pow = np.eye(a.shape[0], dtype=np.complex128)
    for n in range(1, n_max + 1):
        a_pow = a_pow @ a
        da_pow = da_pow @ da
        lhs = derivation_power(x, a_pow, n)
        fact = float(math.factorial(n))
        residuals.append(operator_norm(lhs - fact * da_pow))
        log_scale = max(0.0, n * math.log(max(d_norm_bound * a_norm, 1e-300)))
        bounds.append(math.exp(min(math.lgamma(n + 1) + log_scale, 700.0)) * tol.zero_tol)
        envelope.append(math.exp(-math.lgamma(n + 1) / n) * d_norm_bound * a_norm)

    radius = spectral_radius_sequence(da, n_max)
    identity_ok = all(r <= bnd for r, bnd in zip(residuals, bounds))
    bound_ok = all(s <= env * (1 + 1e-9) + tol.zero_tol for s, env in zip(radius, envelope))
    return LemmaReport(
        d2a_norm=d2a_norm,
        da_norm=operator_norm(da),
        residuals=residuals,
        residual_bounds=bounds,
        radius_seq=radius,
        envelope=envelope,
        identity_ok=identity_ok,
        bound_ok=bound_ok,
        quasi_nilpotent=radius[-1] <= tol.radius_tol,
        name=name,
    )
