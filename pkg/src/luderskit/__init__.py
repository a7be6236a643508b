"""Numerics for sharp and unsharp Lüders measurements.

The package checks, on finite-dimensional examples, that a nonselective
Lüders measurement of an effect family leaves the statistics of a test
effect unchanged for every state exactly when the two commute.
"""
from .exceptions import *  # noqa: F401,F403
from .linalg import (
    DEFAULT_TOL,
    SpectralDecomposition,
    Tolerances,
    commutator,
    eig_hermitian,
    operator_norm,
    psd_sqrt,
    spectral_radius_sequence,
)
from .quantum import (
    DensityOperator,
    Effect,
    EffectFamily,
    ProjectiveFamily,
    complement,
    expectation,
    is_projective,
    make_density,
    make_effect,
    make_family,
    make_projective_family,
    pure_state,
)
from .lueders import (
    DeviationReport,
    deviation,
    heisenberg_dual,
    lueders_sharp,
    lueders_unsharp,
    selective_outcome,
)
from .theorem import (
    LemmaReport,
    PeelLevel,
    Prop1Report,
    Prop2Report,
    check_lemma,
    check_prop1,
    check_prop2,
    derivation_power,
    peel_level,
)
from .ensembles import (
    EnsembleConfig,
    Regime,
    companion_effect,
    haar_unitary,
    random_density,
    random_family,
    random_instance,
    trial_rng,
    unsharp_qubit_family,
)
from .signaling import (
    SignalingRecord,
    max_signaling_state,
    scan_commutator_vs_deviation,
    sweep_unsharpness,
)

__version__ = "0.1.0"
