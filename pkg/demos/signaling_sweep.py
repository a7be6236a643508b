"""Worst-case statistics shift for an unsharp sigma_z measurement.

Against sigma_x the shift grows as 1 - sqrt(1 - lam^2) with the
sharpness lam. The effect (I + sigma_x)/2 sees half of that, on the
state given by the top eigenvector of the deviation operator.
"""
from luderskit import max_signaling_state, sweep_unsharpness, unsharp_qubit_family

print(" lam   measured   predicted")
for row in sweep_unsharpness([k / 10 for k in range(11)]):
    print(f"{row.lam:4.1f}  {row.measured:.6f}   {row.predicted:.6f}")

F, B = unsharp_qubit_family(0.6)
rec = max_signaling_state(F, B)
print("\nlam = 0.6 witness state:\n", rec.witness_state.op.round(4))
print("shift on the witness:", rec.witness_value)
