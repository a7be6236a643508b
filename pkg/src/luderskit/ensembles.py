"""Seed-reproducible random states, effects and effect families.

Every generator draws from a ``numpy.random.Generator``. Batch drivers
obtain one generator per trial from :func:`trial_rng`, which derives an
independent stream from ``(seed, counter)`` through ``SeedSequence``
spawn keys, so results never depend on execution order or thread count.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .exceptions import LudersError, OutOfRange, SingularNormalizer
from .linalg import DEFAULT_TOL, Tolerances, dagger
from .quantum import (
    MAX_OUTCOMES,
    DensityOperator,
    Effect,
    EffectFamily,
    make_density,
    make_effect,
    make_family,
    make_projective_family,
)

__all__ = [
    "Regime",
    "EnsembleConfig",
    "trial_rng",
    "ginibre",
    "haar_unitary",
    "random_density",
    "random_effect",
    "random_family",
    "companion_effect",
    "random_instance",
    "commuting_instance",
    "unsharp_qubit_family",
    "qubit_deviation_prediction",
    "lemma_instance",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

MIN_SPREAD = 0.1
MAX_RETRIES = 16


class Regime(str, enum.Enum):
    GENERIC = "generic"
    COMMUTING = "commuting"
    PROJECTIVE = "projective"
    UNSHARP_QUBIT = "unsharp-qubit"


@dataclass(frozen=True)
class EnsembleConfig:
    seed: int
    dim: int
    n_outcomes: int = 2
    regime: Regime = Regime.GENERIC
    lam: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if not 0 <= self.seed < 2 ** 64:
            raise OutOfRange(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.dim < 1:
            raise OutOfRange(f"dim must be >= 1, got {self.dim}")
        if not 1 <= self.n_outcomes <= MAX_OUTCOMES:
            raise OutOfRange(f"n_outcomes must be in 1..{MAX_OUTCOMES}, got {self.n_outcomes}")
        if self.regime is Regime.UNSHARP_QUBIT:
            if self.dim != 2:
                raise OutOfRange("the unsharp-qubit regime needs dim = 2")
            if self.lam is None or not 0.0 <= self.lam <= 1.0:
                raise OutOfRange(f"unsharpness must lie in [0, 1], got {self.lam}")

    @property
    def regime_label(self) -> str:
        if self.regime is Regime.UNSHARP_QUBIT:
            return f"{self.regime.value}:{self.lam:g}"
        return self.regime.value

    def to_dict(self) -> dict:
        out = {"seed": self.seed, "dim": self.dim, "n_outcomes": self.n_outcomes,
               "regime": self.regime.value}
        if self.lam is not None:
            out["lambda"] = self.lam
        return out


def trial_rng(seed: int, counter: int = 0) -> np.random.Generator:
    """Independent generator for trial ``counter`` under master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(counter,))))


def _rng(cfg: EnsembleConfig, rng):
    return trial_rng(cfg.seed) if rng is None else rng


def ginibre(rng: np.random.Generator, rows: int, cols: Optional[int] = None) -> np.ndarray:
    """Matrix of independent standard complex Gaussians."""
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix.

    The phases of ``diag(R)`` are moved into ``Q`` so that the
    distribution is exactly Haar (Mezzadri's correction).
    """
    Q, R = np.linalg.qr(ginibre(rng, dim))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_density(cfg: EnsembleConfig, rng=None, tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    """Hilbert-Schmidt random state ``G G^dag / tr(G G^dag)``."""
    G = ginibre(_rng(cfg, rng), cfg.dim)
    rho = G @ dagger(G)
    rho = rho / np.trace(rho).real
    return make_density(0.5 * (rho + dagger(rho)), tol)


def _spread_values(rng, values: np.ndarray) -> np.ndarray:
    """Affinely map ``values`` onto ``[lo, hi]`` with ``hi - lo >= MIN_SPREAD``."""
    if len(values) == 1:
        return np.array([rng.uniform()])
    lo = rng.uniform(0.0, (1 - MIN_SPREAD) / 2)
    hi = 1.0 - rng.uniform(0.0, (1 - MIN_SPREAD) / 2)
    span = values.max() - values.min()
    return lo + (values - values.min()) * (hi - lo) / span


def _from_eigenbasis(V: np.ndarray, values: np.ndarray) -> np.ndarray:
    A = (V * values) @ dagger(V)
    return 0.5 * (A + dagger(A))


def random_effect(dim: int, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOL) -> Effect:
    """Effect with Haar-random eigenbasis and spectrum spread over part of ``[0, 1]``."""
    H = ginibre(rng, dim)
    w, V = np.linalg.eigh(H + dagger(H))
    return make_effect(_from_eigenbasis(V, _spread_values(rng, w)), tol)


def _generic_family(rng, dim, n, tol) -> EffectFamily:
    for _ in range(MAX_RETRIES):
        Fs = []
        for _ in range(n):
            G = ginibre(rng, dim)
            Fs.append(G @ dagger(G))
        w, V = np.linalg.eigh(sum(Fs))
        if w[0] < tol.psd_tol:
            continue
        M_inv_sqrt = (V / np.sqrt(w)) @ dagger(V)
        effects = []
        for Fi in Fs:
            Ei = M_inv_sqrt @ Fi @ M_inv_sqrt
            effects.append(0.5 * (Ei + dagger(Ei)))
        return make_family(effects, tol)
    raise SingularNormalizer(f"normalizer stayed singular after {MAX_RETRIES} draws")


def _commuting_weights(rng, dim, n) -> np.ndarray:
    """``(dim, n)`` nonnegative weights, each row summing to one."""
    return rng.dirichlet(np.ones(n), size=dim)


def _projective_family(rng, dim, n, tol) -> EffectFamily:
    H = ginibre(rng, dim)
    _, V = np.linalg.eigh(H + dagger(H))
    bins = np.array_split(np.arange(dim), n)
    ops = [V[:, b] @ dagger(V[:, b]) for b in bins]
    return make_projective_family(ops, tol)


def random_family(cfg: EnsembleConfig, rng=None, tol: Tolerances = DEFAULT_TOL) -> EffectFamily:
    """Random effect family for ``cfg.regime``.

    generic
        ``E_i = M^(-1/2) F_i M^(-1/2)`` with Wishart ``F_i`` and ``M = sum F_i``.
    commuting
        ``U diag(w_i) U^dag`` with Haar ``U`` and Dirichlet weights per diagonal slot.
    projective
        Eigenprojectors of a random hermitian matrix, grouped into
        ``n_outcomes`` contiguous bins (empty bins give zero projectors).
    unsharp-qubit
        ``{(I + lam sigma_z)/2, (I - lam sigma_z)/2}``.
    """
    rng = _rng(cfg, rng)
    dim, n = cfg.dim, cfg.n_outcomes
    if cfg.regime is Regime.UNSHARP_QUBIT:
        return unsharp_qubit_family(cfg.lam, tol)[0]
    if n == 1:
        return make_family([np.eye(dim)], tol)
    if cfg.regime is Regime.GENERIC:
        return _generic_family(rng, dim, n, tol)
    if cfg.regime is Regime.COMMUTING:
        return commuting_instance(dim, n, rng, tol)[0]
    return _projective_family(rng, dim, n, tol)


def _common_eigenbasis(F: EffectFamily, rng) -> np.ndarray:
    coeffs = rng.standard_normal(len(F))
    _, V = np.linalg.eigh(sum(c * E.op for c, E in zip(coeffs, F.effects)))
    return V


def companion_effect(cfg: EnsembleConfig, F: EffectFamily, rng=None,
                     tol: Tolerances = DEFAULT_TOL) -> Effect:
    """Test effect paired with ``F``.

    In the commuting regime it is diagonal in a common eigenbasis of the
    family (recovered by diagonalizing a random combination of the
    effects); otherwise it is an independent :func:`random_effect`. For
    the unsharp-qubit regime it is ``(I + sigma_x)/2``.
    """
    rng = _rng(cfg, rng)
    if cfg.regime is Regime.UNSHARP_QUBIT:
        return unsharp_qubit_family(cfg.lam, tol)[1]
    if cfg.regime is Regime.COMMUTING:
        V = _common_eigenbasis(F, rng)
        values = _spread_values(rng, rng.uniform(size=F.dim))
        return make_effect(_from_eigenbasis(V, values), tol)
    return random_effect(F.dim, rng, tol)


def commuting_instance(dim: int, n_outcomes: int, rng: np.random.Generator,
                       tol: Tolerances = DEFAULT_TOL,
                       n_clusters: Optional[int] = None) -> Tuple[EffectFamily, Effect]:
    """Jointly diagonal family and test effect sharing one Haar eigenbasis.

    With ``n_clusters`` the test effect has exactly that many distinct
    eigenvalues (each appearing at least once), spaced at least 0.05 apart.
    """
    U = haar_unitary(dim, rng)
    W = _commuting_weights(rng, dim, n_outcomes)
    F = make_family([_from_eigenbasis(U, W[:, i]) for i in range(n_outcomes)], tol)
    if n_clusters is None:
        values = _spread_values(rng, rng.uniform(size=dim))
    else:
        if not 1 <= n_clusters <= dim:
            raise OutOfRange(f"n_clusters must be in 1..{dim}")
        levels = np.sort(rng.choice(np.arange(1, 21), n_clusters, replace=False)) / 20.0
        slots = np.concatenate([np.arange(n_clusters),
                                rng.integers(0, n_clusters, dim - n_clusters)])
        values = levels[rng.permutation(slots)]
    return F, make_effect(_from_eigenbasis(U, values), tol)


def random_instance(cfg: EnsembleConfig, rng=None,
                    tol: Tolerances = DEFAULT_TOL) -> Tuple[EffectFamily, Effect]:
    """A (family, test effect) pair drawn according to ``cfg``."""
    rng = _rng(cfg, rng)
    if cfg.regime is Regime.COMMUTING:
        return commuting_instance(cfg.dim, cfg.n_outcomes, rng, tol)
    F = random_family(cfg, rng, tol)
    return F, companion_effect(cfg, F, rng, tol)


def unsharp_qubit_family(lam: float, tol: Tolerances = DEFAULT_TOL) -> Tuple[EffectFamily, Effect]:
    """``{(I +- lam sigma_z)/2}`` and the test effect ``(I + sigma_x)/2``.

    The deviation for ``sigma_x`` is ``1 - sqrt(1 - lam^2)``; for the
    returned effect it is half of that.
    """
    if not 0.0 <= lam <= 1.0:
        raise OutOfRange(f"unsharpness must lie in [0, 1], got {lam}")
    I = np.eye(2)
    F = make_family([(I + lam * SIGMA_Z) / 2, (I - lam * SIGMA_Z) / 2], tol)
    return F, make_effect((I + SIGMA_X) / 2, tol)


def qubit_deviation_prediction(lam: float) -> float:
    """Closed-form deviation norm of the unsharp qubit family for ``sigma_x``."""
    return 1.0 - np.sqrt(1.0 - lam * lam)


def lemma_instance(dim: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """A pair ``(x, a)`` with ``[x, [x, a]] = 0`` exactly and ``[x, a] != 0`` for dim >= 2.

    ``x`` is a scaled shift ``c N`` and ``a = c' diag(k) + p(x)`` with
    ``p`` an integer polynomial, so ``[x, a] = c' x`` commutes with ``x``.
    Both are conjugated by a random permutation. Scales are powers of
    two and entries small integers, which keeps every product exact in
    floating point.
    """
    if dim < 2:
        raise LudersError("lemma instances need dim >= 2")
    N = np.diag(np.ones(dim - 1), 1)
    c = 2.0 ** rng.integers(-2, 2)
    c_prime = 2.0 ** rng.integers(-2, 2) * rng.choice([-1.0, 1.0])
    x = c * N
    a = c_prime * np.diag(np.arange(dim, dtype=float)[::-1])
    for k, coef in enumerate(rng.integers(-2, 3, size=min(dim, 3))):
        a = a + coef * np.linalg.matrix_power(x, k)
    perm = rng.permutation(dim)
    Pm = np.eye(dim)[perm]
    return (Pm @ x @ Pm.T).astype(np.complex128), (Pm @ a @ Pm.T).astype(np.complex128)
