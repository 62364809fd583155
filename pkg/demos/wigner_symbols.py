"""Exact 3-jm and 6-j symbols, and the unit tensors built from them."""
import numpy as np

from racah_frames import couple, six_j, three_jm, unit_tensor_matrix
from racah_frames.identities import exact_identity_suite

# Symbols come back as sign * sqrt(rational), so nothing is rounded
w = three_jm(1, 1, 0, 1, -1, 0)
print("(1 1 0; 1 -1 0) =", w, "=", float(w))
print("{1 1 0; 1 1 1} =", six_j(1, 1, 0, 1, 1, 1))
print("(1/2 1/2 1; 1/2 1/2 -1) =", three_jm("1/2", "1/2", 1, "1/2", "1/2", -1))

# a larger one, still exact
big = three_jm(6, 6, 6, 0, 0, 0)
print("(6 6 6; 0 0 0) squared =", big.square)

# Unit tensor u^(1)_0 for spin 1, rows m = 1, 0, -1
u10 = unit_tensor_matrix(2, 1, 0)
print("\nu^(1)_0 for j=1:")
print(np.round(u10.real, 6))
print("Tr(u u^dagger) =", np.trace(u10 @ u10.conj().T).real, " (1/(2k+1) = 1/3)")

# The product of two unit tensors expands back into unit tensors
expansion = couple(2, 1, 1, 1, -1)
print("\nu^(1)_1 u^(1)_-1 for j=1 expands as:")
for (big_k, big_q), c in sorted(expansion.items()):
    print(f"  K={big_k} Q={big_q}: {c:+.6f}")
recon = sum(c * unit_tensor_matrix(2, K, Q) for (K, Q), c in expansion.items())
print("reconstruction error:", np.max(np.abs(recon - unit_tensor_matrix(2, 1, 1) @ unit_tensor_matrix(2, 1, -1))))

# Exhaustive exact sweep at small j
for r in exact_identity_suite(6):
    print(f"{r.name:<18} {r.checked:>7} cases  {'exact' if r.passed else 'FAILED'}  {r.seconds:.2f}s")
