"""Dense complex-matrix kernel.

Operators are plain ``numpy`` arrays of shape ``(d, d)`` and dtype
``complex128``. Everything in this module is a pure function; inputs are
never modified.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import List, Sequence

import numpy as np

from .exceptions import DimMismatch, NotHermitian, NotPositive

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "Cluster",
    "SpectralDecomposition",
    "as_operator",
    "dagger",
    "hermitian_violation",
    "eig_hermitian",
    "psd_sqrt",
    "operator_norm",
    "commutator",
    "spectral_radius_sequence",
]


@dataclass(frozen=True)
class Tolerances:
    """Every numerical knob used to decide an exact relation.

    ``cluster_tol`` is relative: eigenvalues closer than
    ``cluster_tol * max(1, ||A||)`` are merged. ``theorem_tol`` is the
    relative threshold (times ``||B||``) used for the commutes/preserved
    verdicts, and ``radius_tol`` is the quasi-nilpotency cut-off for the
    last term of a spectral-radius sequence.
    """

    hermitian_tol: float = 1e-10
    psd_tol: float = 1e-10
    cluster_tol: float = 1e-8
    reconstruct_tol: float = 1e-10
    zero_tol: float = 1e-10
    theorem_tol: float = 1e-9
    radius_tol: float = 1e-6

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (value >= 0 and np.isfinite(value)):
                raise ValueError(f"tolerance {name} must be finite and >= 0, got {value!r}")

    def replace(self, **changes) -> "Tolerances":
        return Tolerances(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOL = Tolerances()


def as_operator(A) -> np.ndarray:
    """Return ``A`` as a square complex128 array (no copy if already one)."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimMismatch(f"expected a square d x d operator with d >= 1, got shape {A.shape}")
    return A


def dagger(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def _check_same_dim(*ops):
    dims = {op.shape for op in ops}
    if len(dims) != 1:
        raise DimMismatch(f"operator shapes differ: {sorted(dims)}")


def hermitian_violation(A) -> float:
    A = as_operator(A)
    return float(np.linalg.norm(A - dagger(A), 2))


def _hermitian_part(A, tol: float) -> np.ndarray:
    A = as_operator(A)
    violation = hermitian_violation(A)
    if violation > tol:
        raise NotHermitian(violation, tol)
    return 0.5 * (A + dagger(A))


@dataclass(frozen=True)
class Cluster:
    eigenvalue: float
    projector: np.ndarray
    multiplicity: int


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues in strictly decreasing order with their projectors."""

    clusters: List[Cluster]
    dim: int
    gap_tol: float = field(default=0.0)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([c.eigenvalue for c in self.clusters])

    @property
    def projectors(self) -> List[np.ndarray]:
        return [c.projector for c in self.clusters]

    @property
    def multiplicities(self) -> List[int]:
        return [c.multiplicity for c in self.clusters]

    def __len__(self):
        return len(self.clusters)

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for c in self.clusters:
            out += c.eigenvalue * c.projector
        return out


def eig_hermitian(A, tol: Tolerances = DEFAULT_TOL) -> SpectralDecomposition:
    """Spectral decomposition of a hermitian operator with eigenvalue clustering.

    Sorted eigenvalues whose adjacent gap is at most
    ``tol.cluster_tol * max(1, ||A||)`` are merged into one cluster,
    represented by their mean and the projector onto the joint eigenspace.

    Parameters
    ----------
    A : array_like
        Hermitian ``d x d`` matrix (within ``tol.hermitian_tol``).
    tol : Tolerances

    Returns
    -------
    SpectralDecomposition
        Clusters in strictly decreasing eigenvalue order.

    Raises
    ------
    NotHermitian
        If ``||A - A^dag|| > tol.hermitian_tol``.
    """
    H = _hermitian_part(A, tol.hermitian_tol)
    w, V = np.linalg.eigh(H)
    w, V = w[::-1], V[:, ::-1]
    scale = max(1.0, float(np.max(np.abs(w))))
    gap_tol = tol.cluster_tol * scale

    groups = [[0]]
    for j in range(1, len(w)):
        if w[groups[-1][-1]] - w[j] <= gap_tol:
            groups[-1].append(j)
        else:
            groups.append([j])

    clusters = []
    for g in groups:
        Vg = V[:, g]
        clusters.append(Cluster(float(np.mean(w[g])), Vg @ dagger(Vg), len(g)))
    return SpectralDecomposition(clusters, H.shape[0], gap_tol)


def psd_sqrt(E, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a positive semidefinite hermitian operator.

    Eigenvalues in ``[-tol.psd_tol, 0)`` are clamped to zero first.

    Raises
    ------
    NotHermitian, NotPositive
    """
    H = _hermitian_part(E, tol.hermitian_tol)
    w, V = np.linalg.eigh(H)
    if w[0] < -tol.psd_tol:
        raise NotPositive(w[0], tol.psd_tol)
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ dagger(V)
    return 0.5 * (root + dagger(root))


def operator_norm(A) -> float:
    """Largest singular value of ``A``."""
    A = as_operator(A)
    if np.array_equal(A, dagger(A)):
        return float(np.max(np.abs(np.linalg.eigvalsh(A))))
    return float(np.linalg.norm(A, 2))


def commutator(A, B) -> np.ndarray:
    """``AB - BA``."""
    A, B = as_operator(A), as_operator(B)
    _check_same_dim(A, B)
    return A @ B - B @ A


def anticommutator(A, B) -> np.ndarray:
    A, B = as_operator(A), as_operator(B)
    _check_same_dim(A, B)
    return A @ B + B @ A


def spectral_radius_sequence(A, n_max: int) -> List[float]:
    """Return ``[||A^n||^(1/n) for n = 1..n_max]``.

    Powers are accumulated with a running rescale so that neither
    overflow nor underflow distorts the roots; an exactly vanishing
    power yields exact zeros from then on.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    A = as_operator(A)
    seq = []
    Q = A.copy()
    log_scale = 0.0
    for n in range(1, n_max + 1):
        if n > 1:
            Q = Q @ A
        nrm = operator_norm(Q)
        if nrm == 0.0:
            seq.extend([0.0] * (n_max - n + 1))
            break
        log_scale += np.log(nrm)
        Q = Q / nrm
        seq.append(float(np.exp(log_scale / n)))
    return seq


def max_commutator_norm(ops: Sequence[np.ndarray], B) -> float:
    return max((operator_norm(commutator(E, B)) for E in ops), default=0.0)
