"""Sharp versus unsharp Lüders measurement on a qubit."""
import numpy as np

from luderskit import (
    deviation,
    lueders_sharp,
    lueders_unsharp,
    make_family,
    make_projective_family,
    pure_state,
)
from luderskit.ensembles import SIGMA_X, SIGMA_Z

I2 = np.eye(2)

# %% sharp measurement of sigma_z kills the coherences of |+>
plus = pure_state(np.array([1, 1]) / np.sqrt(2))
Z = make_projective_family([(I2 + SIGMA_Z) / 2, (I2 - SIGMA_Z) / 2])
print("sharp output:\n", np.round(lueders_sharp(Z, plus).op, 6))

# %% an unsharp version only shrinks them
lam = 0.6
Z_soft = make_family([(I2 + lam * SIGMA_Z) / 2, (I2 - lam * SIGMA_Z) / 2])
out = lueders_unsharp(Z_soft, plus)
print("unsharp output:\n", np.round(out.op, 6))
print("off-diagonal:", out.op[0, 1].real, "expected", np.sqrt(1 - lam**2) / 2)

# %% the statistics of sigma_x move, those of sigma_z do not
for name, B in [("sigma_x", (I2 + SIGMA_X) / 2), ("sigma_z", (I2 + SIGMA_Z) / 2)]:
    rep = deviation(Z_soft, B)
    print(f"{name}: ||D|| = {rep.deviation_norm:.4f}  preserved = {rep.preserved}")
