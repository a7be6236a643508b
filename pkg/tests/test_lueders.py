import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from luderskit.ensembles import (
    EnsembleConfig,
    commuting_instance,
    random_density,
    random_family,
    trial_rng,
    unsharp_qubit_family,
)
from luderskit.exceptions import DimMismatch, IndexOutOfRange, NotHermitian
from luderskit.linalg import operator_norm
from luderskit.lueders import (
    deviation,
    heisenberg_dual,
    lueders_sharp,
    lueders_unsharp,
    selective_outcome,
)
from luderskit.quantum import expectation, make_density, make_family, make_projective_family, pure_state

PLUS = pure_state([1, 1])


def z_family():
    return make_projective_family([np.diag([1, 0]), np.diag([0, 1])])


def qubit_family(lam):
    return unsharp_qubit_family(lam)[0]


def channel_oracle(F, rho):
    """Independent route: square roots from scipy's Schur-based sqrtm."""
    out = np.zeros_like(rho.op)
    for E in F.effects:
        S = scipy.linalg.sqrtm(E.op)
        out = out + S @ rho.op @ S
    return out


class TestChannels:
    def test_single_outcome_is_identity(self):
        rho = random_density(EnsembleConfig(5, 3))
        out = lueders_sharp(make_family([np.eye(3)]), rho)
        np.testing.assert_allclose(out.op, rho.op, atol=1e-15)

    def test_sharp_kills_coherences(self):
        np.testing.assert_allclose(lueders_sharp(z_family(), PLUS).op, np.eye(2) / 2, atol=1e-15)

    def test_sharp_leaves_diagonal_states(self):
        rho = make_density(np.diag([0.3, 0.7]))
        np.testing.assert_allclose(lueders_sharp(z_family(), rho).op, rho.op, atol=1e-15)

    def test_unsharp_trivial_povm(self):
        rho = random_density(EnsembleConfig(9, 4))
        F = make_family([np.eye(4) / 2, np.eye(4) / 2])
        np.testing.assert_allclose(lueders_unsharp(F, rho).op, rho.op, atol=1e-15)

    def test_unsharp_qubit_scales_coherence(self, sx):
        # off-diagonals pick up sqrt(0.8*0.2) * 2 = 0.8
        out = lueders_unsharp(qubit_family(0.6), PLUS)
        np.testing.assert_allclose(out.op, (np.eye(2) + 0.8 * sx) / 2, atol=1e-15)

    def test_unsharp_reduces_to_sharp(self):
        for t in range(20):
            r = trial_rng(11, t)
            cfg = EnsembleConfig(11, 2 + t % 6, 1 + t % 4, "projective")
            F = random_family(cfg, r)
            rho = random_density(cfg, r)
            np.testing.assert_allclose(lueders_unsharp(F, rho).op, lueders_sharp(F, rho).op, atol=1e-10)

    def test_sharp_idempotent(self):
        for t in range(20):
            r = trial_rng(12, t)
            cfg = EnsembleConfig(12, 2 + t % 6, 1 + t % 4, "projective")
            F = random_family(cfg, r)
            once = lueders_sharp(F, random_density(cfg, r))
            np.testing.assert_allclose(lueders_sharp(F, once).op, once.op, atol=1e-10)

    def test_matches_independent_sqrt(self):
        for t in range(30):
            r = trial_rng(13, t)
            cfg = EnsembleConfig(13, 2 + t % 7, 2 + t % 3, "generic")
            F = random_family(cfg, r)
            rho = random_density(cfg, r)
            np.testing.assert_allclose(lueders_unsharp(F, rho).op, channel_oracle(F, rho), atol=1e-10)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            lueders_unsharp(z_family(), make_density(np.eye(3) / 3))

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(2, 16), n=st.integers(1, 8),
           regime=st.sampled_from(["generic", "commuting", "projective"]))
    def test_trace_positivity_duality(self, seed, d, n, regime):
        cfg = EnsembleConfig(seed, d, n, regime)
        r = trial_rng(seed)
        F = random_family(cfg, r)
        rho = random_density(cfg, r)
        G = r.standard_normal((d, d)) + 1j * r.standard_normal((d, d))
        B = (G + G.conj().T) / 2
        out = lueders_unsharp(F, rho)
        assert abs(np.trace(out.op).real - 1) <= 1e-10
        assert np.linalg.eigvalsh(out.op)[0] >= -1e-10
        lhs = expectation(out, B)
        rhs = expectation(rho, heisenberg_dual(F, B))
        assert abs(lhs - rhs) <= 1e-10


class TestSelective:
    def test_single_outcome(self):
        rho = random_density(EnsembleConfig(1, 3))
        p, post = selective_outcome(make_family([np.eye(3)]), 0, rho)
        assert p == pytest.approx(1.0)
        np.testing.assert_allclose(post.op, rho.op, atol=1e-15)

    def test_impossible_outcome(self):
        p, post = selective_outcome(z_family(), 1, pure_state([1, 0]))
        assert p == 0.0 and post is None

    def test_unsharp_outcome(self):
        p, post = selective_outcome(qubit_family(0.6), 0, make_density(np.eye(2) / 2))
        assert p == pytest.approx(0.5)
        np.testing.assert_allclose(post.op, np.diag([0.8, 0.2]), atol=1e-15)

    def test_outcomes_recombine(self):
        for t in range(20):
            r = trial_rng(14, t)
            cfg = EnsembleConfig(14, 2 + t % 5, 1 + t % 4, "generic")
            F, rho = random_family(cfg, r), random_density(cfg, r)
            total = np.zeros_like(rho.op)
            for i in range(len(F)):
                p, post = selective_outcome(F, i, rho)
                if post is not None:
                    total += p * post.op
            np.testing.assert_allclose(total, lueders_unsharp(F, rho).op, atol=1e-10)

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            selective_outcome(z_family(), 2, PLUS)


class TestDualAndDeviation:
    def test_dual_unital(self):
        for t in range(10):
            cfg = EnsembleConfig(15, 2 + t, 3)
            F = random_family(cfg, trial_rng(15, t))
            assert operator_norm(heisenberg_dual(F, np.eye(F.dim)) - np.eye(F.dim)) <= 1e-10

    def test_dual_sharp_kills_off_diagonal(self, sx):
        assert operator_norm(heisenberg_dual(z_family(), sx)) <= 1e-15

    def test_dual_unsharp_qubit(self, sx):
        lam = 0.6
        np.testing.assert_allclose(heisenberg_dual(qubit_family(lam), sx), np.sqrt(1 - lam ** 2) * sx,
                                   atol=1e-15)

    def test_dual_maps_effects_to_effects(self):
        for t in range(20):
            r = trial_rng(16, t)
            cfg = EnsembleConfig(16, 2 + t % 6, 2 + t % 3)
            F = random_family(cfg, r)
            from luderskit.ensembles import random_effect

            w = np.linalg.eigvalsh(heisenberg_dual(F, random_effect(cfg.dim, r)))
            assert w[0] >= -1e-10 and w[-1] <= 1 + 1e-10

    def test_dual_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            heisenberg_dual(z_family(), np.array([[0, 1], [0, 0]]))

    def test_deviation_commuting(self):
        for t in range(20):
            F, B = commuting_instance(2 + t % 7, 2 + t % 3, trial_rng(17, t))
            rep = deviation(F, B)
            assert rep.deviation_norm <= 1e-10
            assert rep.preserved

    def test_deviation_sharp(self, sx):
        rep = deviation(z_family(), sx)
        assert rep.deviation_norm == pytest.approx(1.0)
        np.testing.assert_allclose(rep.deviation_op, sx, atol=1e-15)
        assert not rep.preserved

    def test_deviation_unsharp(self, sx):
        rep = deviation(qubit_family(0.6), sx)
        assert rep.deviation_norm == pytest.approx(0.2, abs=1e-14)

    def test_deviation_is_statistics_shift(self):
        for t in range(20):
            r = trial_rng(18, t)
            cfg = EnsembleConfig(18, 2 + t % 6, 2 + t % 3)
            F = random_family(cfg, r)
            from luderskit.ensembles import random_effect

            B = random_effect(cfg.dim, r)
            rep = deviation(F, B)
            assert operator_norm(rep.deviation_op - rep.deviation_op.conj().T) == 0
            rho = random_density(cfg, r)
            shift = expectation(lueders_unsharp(F, rho), B) - expectation(rho, B)
            assert shift == pytest.approx(-expectation(rho, rep.deviation_op), abs=1e-12)
            assert abs(shift) <= rep.deviation_norm + 1e-12

    def test_report_json(self, sx):
        d = deviation(z_family(), sx).to_dict()
        assert d == {"deviation_norm": 1.0, "max_commutator_norm": pytest.approx(1.0),
                     "preserved": False, "dim": 2, "n_outcomes": 2}
