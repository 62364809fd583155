"""Frame vectors and their Gram matrix: what the checks see when a family
is slightly wrong."""
import numpy as np

from racah_frames import search_fiducial, sic_battery
from racah_frames.frame import expand_states, gram, sic_gram_target, vectorize
from racah_frames.sic import SicCandidate

cand = search_fiducial(d=3)
vecs = [vectorize(c) for c in expand_states(cand.states, cand.two_j)]
rep = gram(vecs, sic_gram_target(3))
print("Gram matrix of the d=3 SIC frame vectors (real part):")
print(np.round(rep.matrix.real, 4))
print("eigenvalues:", np.round(np.sort(rep.eigen_spectrum), 6))
print("expected:    3 once, 3/4 eight times")
print("max deviation from target:", rep.max_deviation)

# Rotate member 4 by a small random unitary
rng = np.random.default_rng(0)
h = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
h = (h + h.conj().T) / 2
w, v = np.linalg.eigh(h / np.linalg.norm(h, 2))
kick = (v * np.exp(1e-3j * w)) @ v.conj().T
states = cand.states.copy()
states[4] = kick @ states[4]
bad = SicCandidate(cand.two_j, states, cand.provenance, cand.residual, False)

# The member is still a pure state, so the per-member checks still pass;
# the pairwise and collective ones catch it
print()
print(sic_battery(bad).summary())
