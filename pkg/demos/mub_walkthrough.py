"""A complete set of mutually unbiased bases in prime dimension, seen
through its tensor coefficients."""
import numpy as np

from racah_frames import build_prime_mubs, mub_battery, verify_mubs
from racah_frames.frame import vectorize
from racah_frames.mub import closed_form_dkq, mub_coefficients

d = 5
mubs = build_prime_mubs(d)
print("bases array:", mubs.bases.shape, " (basis a, vector alpha, component)")

states = mubs.states()
overlaps = np.abs(states.conj() @ states.T) ** 2
print("distinct squared overlaps:", np.unique(np.round(overlaps, 12)))

print()
print(verify_mubs(mubs).summary())

# Each projector has d^2 coefficients d_kq; the (0,0) one is 1/sqrt(d) for all
coeffs = mub_coefficients(mubs)
print("\nd_00 for every member:", set(np.round(np.array([c[0, 0] for c in coeffs]).real, 12)))

# The expansion and the closed-form double sum agree index by index
a, alpha = 2, 3
member = coeffs[mubs.labels.index((a, alpha))]
print(f"\nmember (a={a}, alpha={alpha}), first few coefficients:")
for (k, q), value in list(member.items())[:6]:
    print(f"  k={k} q={q:+d}  expansion {value:+.6f}   closed form {closed_form_dkq(d, a, alpha, k, q):+.6f}")

# Frame vectors of one basis are orthogonal apart from their shared (0,0) part
vecs = np.array([vectorize(c).components for c in coeffs])
print("\nGram block for basis 0:")
print(np.round((vecs[:d].conj() @ vecs[:d].T).real, 6))

print()
print(mub_battery(mubs).summary())
