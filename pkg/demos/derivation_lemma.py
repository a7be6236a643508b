"""Nilpotent derivations: d^n(a^n) = n! (da)^n when d^2 a = 0."""
import numpy as np

from luderskit import check_lemma, trial_rng
from luderskit.ensembles import lemma_instance

x = np.array([[0, 1], [0, 0]], dtype=complex)
a = np.diag([1.0, 0.0]).astype(complex)
rep = check_lemma(x, a, n_max=12, name="nilpotent-2x2")
print(rep.name, "passed:", rep.passed)
print("  s_n:", np.round(rep.radius_seq, 3))
print("  envelope:", np.round(rep.envelope, 3))

# %% random exact constructions; s_n drops to zero once (da)^n vanishes
for k in range(4):
    x, a = lemma_instance(3 + k, trial_rng(3, k))
    rep = check_lemma(x, a, n_max=10)
    print(f"dim {3 + k}: ||da||={rep.da_norm:.3g}  s_n tail={rep.radius_seq[-1]:.1e}  passed={rep.passed}")
