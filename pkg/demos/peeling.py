"""Peeling a test effect into spectral levels, one projector at a time.

A commuting instance decomposes cleanly: every spectral projector of B
commutes with every effect. A generic instance fails at the first level.
"""
from luderskit import EnsembleConfig, Regime, check_prop1, random_instance, trial_rng
from luderskit.ensembles import commuting_instance

rng = trial_rng(7)
F, B = commuting_instance(6, 3, rng, n_clusters=4)
rep = check_prop1(F, B)
print("commuting instance, verdict:", rep.verdict)
for lvl in rep.levels:
    print(f"  level {lvl.level}: eigenvalue {lvl.eigenvalue:.3f}  rank {lvl.multiplicity}"
          f"  max residual {lvl.max_residual:.1e}")
print("  reconstruction residual:", rep.reconstruction_residual)

# %%
F, B = random_instance(EnsembleConfig(7, 6, 3, Regime.GENERIC), trial_rng(7, 1))
rep = check_prop1(F, B)
print("generic instance, verdict:", rep.verdict)
print("  deviation norm", round(rep.deviation_norm, 4), " first failing level", rep.first_failing_level())
