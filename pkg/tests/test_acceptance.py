"""Exit criteria. Each test prints one PASS/FAIL line in the terminal summary."""
import json
import math
import time

import numpy as np
import pytest

from luderskit.cli import main
from luderskit.ensembles import (
    EnsembleConfig,
    Regime,
    commuting_instance,
    ginibre,
    qubit_deviation_prediction,
    random_density,
    random_effect,
    random_instance,
    trial_rng,
)
from luderskit.harness import run_prop2
from luderskit.linalg import commutator, operator_norm, psd_sqrt
from luderskit.lueders import heisenberg_dual, lueders_unsharp
from luderskit.quantum import expectation
from luderskit.signaling import max_signaling_state, scan_commutator_vs_deviation, sweep_unsharpness
from luderskit.theorem import check_lemma, check_prop1, derivation_power

DIMS = range(2, 9)


def record(log, number, title, ok, detail):
    log.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")
    assert ok, detail


def test_1_sufficiency_commuting(acceptance_log):
    configs = [EnsembleConfig(2024, d, n, Regime.COMMUTING) for n in (2, 3, 4) for d in DIMS]
    start = time.perf_counter()
    res = scan_commutator_vs_deviation(configs, 1000)
    elapsed = time.perf_counter() - start
    worst = max(r.deviation_norm for r in res.records)
    ok = len(res.records) == 1000 and worst <= 1e-10 and elapsed < 10
    record(acceptance_log, 1, "commuting => preserved", ok,
           f"max deviation {worst:.2e} <= 1e-10 over 1000 trials, {elapsed:.1f}s < 10s")


def test_2_necessity_binary(acceptance_log):
    start = time.perf_counter()
    batch = run_prop2(2025, 1000, DIMS, [(Regime.GENERIC, None)])
    elapsed = time.perf_counter() - start
    reports = [r.report for r in batch.results]
    min_comm = min(r.commutator_norm for r in reports)
    min_dev = min(r.deviation_norm for r in reports)
    consistent = all(r.verdict_consistent for r in reports)
    ok = len(reports) == 1000 and min_comm >= 1e-3 and min_dev > 1e-12 and consistent and elapsed < 20
    record(acceptance_log, 2, "binary non-commuting => not preserved", ok,
           f"min ||[E,B]|| {min_comm:.2e}, min deviation {min_dev:.2e} > 1e-12, "
           f"all consistent={consistent}, rejected draws {batch.rejected}, {elapsed:.1f}s < 20s")


def test_3_qubit_sweep(acceptance_log):
    grid = [k / 20 for k in range(21)]
    rows = sweep_unsharpness(grid)
    # oracle: closed form evaluated independently here
    errs = [abs(r.measured - (1 - math.sqrt(1 - lam * lam))) for r, lam in zip(rows, grid)]
    anchors = {r.lam: r.measured for r in rows}
    ok = (
        max(errs) <= 1e-12
        and abs(anchors[0.0]) <= 1e-12
        and abs(anchors[0.6] - 0.2) <= 1e-12
        and abs(anchors[1.0] - 1.0) <= 1e-12
        and all(abs(r.predicted - qubit_deviation_prediction(r.lam)) == 0 for r in rows)
    )
    record(acceptance_log, 3, "unsharp qubit closed form", ok,
           f"max |measured - (1 - sqrt(1 - lam^2))| = {max(errs):.2e} <= 1e-12 on 21 points")


def test_4_peeling(acceptance_log):
    worst_res, worst_recon, level_counts = 0.0, 0.0, set()
    for t in range(50):
        F, B = commuting_instance(6, 3, trial_rng(404, t), n_clusters=4)
        rep = check_prop1(F, B)
        level_counts.add(len(rep.levels))
        worst_res = max(worst_res, max(lvl.max_residual for lvl in rep.levels))
        recon = sum(lvl.eigenvalue * lvl.projector for lvl in rep.levels)
        worst_recon = max(worst_recon, operator_norm(recon - B.op))
        assert rep.all_commute
    generic_ok = True
    for t in range(50):
        F, B = random_instance(EnsembleConfig(405, 6, 3, Regime.GENERIC), trial_rng(405, t))
        rep = check_prop1(F, B)
        generic_ok &= rep.first_failing_level(1e-6) is not None and not rep.all_commute
    ok = level_counts == {4} and worst_res <= 1e-10 and worst_recon <= 1e-10 and generic_ok
    record(acceptance_log, 4, "eigenvalue peeling", ok,
           f"levels {sorted(level_counts)} == [4], max residual {worst_res:.2e}, "
           f"reconstruction {worst_recon:.2e} <= 1e-10, generic failing level reported={generic_ok}")


def test_5_double_commutator_identity(acceptance_log):
    worst = 0.0
    for t in range(1000):
        r = trial_rng(505, t)
        d = 2 + t % 7
        E = random_effect(d, r).op
        G = ginibre(r, d)
        B = (G + G.conj().T) / 2
        S = psd_sqrt(E)
        lhs = E @ B + B @ E - 2 * S @ B @ S
        rhs = commutator(S, commutator(S, B))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    record(acceptance_log, 5, "EB + BE - 2 S B S == [S,[S,B]]", worst <= 1e-12,
           f"max entrywise gap {worst:.2e} <= 1e-12 over 1000 pairs")


def test_6_lemma_nilpotent(acceptance_log):
    x = np.array([[0, 1], [0, 0]], dtype=complex)
    a = np.diag([1.0, 0.0]).astype(complex)
    d2a = operator_norm(derivation_power(x, a, 2))
    rep = check_lemma(x, a, 64)
    tail = max(rep.radius_seq[1:])
    # independent check of d^n(a^n) = n! (da)^n for n <= 5
    da = derivation_power(x, a, 1)
    ident = max(
        operator_norm(derivation_power(x, np.linalg.matrix_power(a, n), n)
                      - math.factorial(n) * np.linalg.matrix_power(da, n))
        for n in range(1, 6)
    )
    ok = d2a <= 1e-15 and rep.radius_seq[0] == 1.0 and tail <= 1e-15 and ident <= 1e-12 \
        and max(rep.residuals[:5]) <= 1e-12 and rep.passed
    record(acceptance_log, 6, "derivation lemma, nilpotent fixture", ok,
           f"||d^2 a|| = {d2a:.1e}, s_1 = {rep.radius_seq[0]}, max s_n (n>=2) = {tail:.1e}, "
           f"max identity residual (n<=5) = {ident:.1e}")


def _batched_shifts(F, B, rhos):
    """tr[L(rho) B] - tr[rho B] for a stack of states, through the channel."""
    out = np.zeros_like(rhos)
    for S in F.roots:
        out += S @ rhos @ S
    return np.einsum("nij,ji->n", out - rhos, B).real


def test_7_achievability(acceptance_log):
    worst_match, worst_excess, instances = 0.0, -np.inf, 0
    for t in range(200):
        cfg = EnsembleConfig(707, 2 + t % 7, 2 + t % 3, Regime.GENERIC)
        r = trial_rng(707, t)
        F, B = random_instance(cfg, r)
        if max(operator_norm(commutator(E.op, B.op)) for E in F) < 1e-3:
            continue
        instances += 1
        rec = max_signaling_state(F, B)
        through_channel = expectation(lueders_unsharp(F, rec.witness_state), B) - expectation(rec.witness_state, B)
        worst_match = max(worst_match, abs(abs(rec.witness_value) - rec.deviation_norm),
                          abs(through_channel - rec.witness_value))
        d = cfg.dim
        G = r.standard_normal((10_000, d, d)) + 1j * r.standard_normal((10_000, d, d))
        rhos = G @ np.conj(np.swapaxes(G, 1, 2))
        rhos /= np.trace(rhos, axis1=1, axis2=2).real[:, None, None]
        worst_excess = max(worst_excess, float(np.max(np.abs(_batched_shifts(F, B.op, rhos)))) - rec.deviation_norm)
    ok = instances >= 195 and worst_match <= 1e-10 and worst_excess <= 1e-10
    record(acceptance_log, 7, "witness state achieves the deviation norm", ok,
           f"{instances} instances, max |witness - norm| {worst_match:.2e} <= 1e-10, "
           f"max sampled excess over norm {worst_excess:.2e} <= 1e-10 (10^4 states each)")


def test_8_channel_sanity(acceptance_log):
    worst_trace, worst_pos, worst_dual = 0.0, 0.0, 0.0
    regimes = [Regime.GENERIC, Regime.COMMUTING, Regime.PROJECTIVE]
    for t in range(1000):
        cfg = EnsembleConfig(808, 2 + t % 7, 1 + t % 4, regimes[t % 3])
        r = trial_rng(808, t)
        F, B = random_instance(cfg, r)
        rho = random_density(cfg, r)
        out = lueders_unsharp(F, rho)
        worst_trace = max(worst_trace, abs(np.trace(out.op).real - 1))
        worst_pos = min(worst_pos, float(np.linalg.eigvalsh(out.op)[0]))
        worst_dual = max(worst_dual, abs(expectation(out, B) - expectation(rho, heisenberg_dual(F, B))))
    ok = worst_trace <= 1e-12 and worst_pos >= -1e-10 and worst_dual <= 1e-10
    record(acceptance_log, 8, "channel sanity", ok,
           f"trace error {worst_trace:.1e} <= 1e-12, min eigenvalue {worst_pos:.1e} >= -1e-10, "
           f"duality residual {worst_dual:.1e} <= 1e-10")


@pytest.mark.parametrize("command", ["verify-prop1", "verify-prop2"])
def test_9_determinism(tmp_path, capsys, acceptance_log, command):
    paths = []
    for i, threads in enumerate(["1", "4", "1"]):
        p = tmp_path / f"r{i}.json"
        code = main([command, "--trials", "200", "--seed", "909", "--threads", threads,
                     "--no-timestamp", "--out", str(p)])
        assert code == 0
        paths.append(p)
    capsys.readouterr()
    blobs = [p.read_bytes() for p in paths]
    ok = blobs[0] == blobs[1] == blobs[2] and "timestamp" not in json.loads(blobs[0])
    record(acceptance_log, 9, f"{command} byte-identical across runs and --threads", ok,
           f"3 runs ({len(blobs[0])} bytes each) identical={ok}")
