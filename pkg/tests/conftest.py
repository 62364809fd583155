import os
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))


def random_unitary_near_identity(d: int, magnitude: float, rng) -> np.ndarray:
    """exp(i * magnitude * H) for a random Hermitian H of unit spectral norm."""
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (a + a.conj().T) / 2
    h /= np.linalg.norm(h, 2)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * magnitude * w)) @ v.conj().T


def perturb_member(states: np.ndarray, index: int, magnitude: float = 1e-3, seed: int = 0) -> np.ndarray:
    out = np.array(states, dtype=complex, copy=True)
    rng = np.random.default_rng(seed)
    out[index] = random_unitary_near_identity(out.shape[1], magnitude, rng) @ out[index]
    return out
