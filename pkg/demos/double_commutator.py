"""For a binary family the deviation is a double commutator.

With S = sqrt(E) one has EB + BE - 2SBS = [S, [S, B]]. The deviation
operator is half the sum of that term for E and for I - E, so
tr(B D) is half the sum of two squared Hilbert-Schmidt norms.
"""
import numpy as np

from luderskit import check_prop2, commutator, deviation, make_family, psd_sqrt, trial_rng
from luderskit.ensembles import ginibre, random_effect

rng = trial_rng(11)
E = random_effect(4, rng)
G = ginibre(rng, 4)
B = (G + G.conj().T) / 2

S, T = psd_sqrt(E.op), psd_sqrt(np.eye(4) - E.op)
lhs = E.op @ B + B @ E.op - 2 * S @ B @ S
print("identity gap:", np.abs(lhs - commutator(S, commutator(S, B))).max())

D = deviation(make_family([E.op, np.eye(4) - E.op]), B).deviation_op
hs = 0.5 * (np.linalg.norm(commutator(S, B)) ** 2 + np.linalg.norm(commutator(T, B)) ** 2)
print("tr(BD) =", np.trace(B @ D).real, " half sum of HS norms =", hs)

# %% D is linear in B, while tr(B D) is quadratic in the commutator
for eps in [1e-1, 1e-2, 1e-3]:
    w, V = np.linalg.eigh(E.op)
    Bt = V @ np.diag(w) @ V.conj().T + eps * B
    rep = check_prop2(E, Bt)
    Dt = deviation(make_family([E.op, np.eye(4) - E.op]), Bt).deviation_op
    print(f"eps={eps:.0e}  ||[E,B]||={rep.commutator_norm:.2e}  ||D||={rep.deviation_norm:.2e}"
          f"  tr(BD)={np.trace(Bt @ Dt).real:.2e}  {rep.verdict}")
