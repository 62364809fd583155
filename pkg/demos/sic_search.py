"""Searching for a Weyl-Heisenberg covariant SIC and checking what was found."""
import time

import numpy as np

from racah_frames import search_fiducial, sic_battery, verify_sic, wh_orbit
from racah_frames.sic import overlap_residual

# A random fiducial is far from a SIC
rng = np.random.default_rng(1)
psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
psi /= np.linalg.norm(psi)
print("random fiducial, d=4: residual", overlap_residual(wh_orbit(psi)))

for d in range(2, 9):
    start = time.perf_counter()
    cand = search_fiducial(d=d)
    elapsed = time.perf_counter() - start
    prov = cand.provenance
    print(
        f"d={d}: residual {cand.residual:.2e} restart {prov['restart']:>2} "
        f"descent {prov['iterations']:>5} polish {prov['polish_iterations']:>2}  {elapsed:.2f}s"
    )

# Look at d=3 closely
cand = search_fiducial(d=3, seed=42)
print("\nd=3 fiducial:", np.round(cand.fiducial, 6))
ov = np.abs(cand.states.conj() @ cand.states.T) ** 2
print("off-diagonal overlaps lie in", ov[~np.eye(9, dtype=bool)].min(), ov[~np.eye(9, dtype=bool)].max())
print("target 1/(d+1) =", 1 / 4)

print()
print(verify_sic(cand).summary())
print(sic_battery(cand).summary())
