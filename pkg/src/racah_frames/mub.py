"""Complete sets of mutually unbiased bases in prime dimension.

For d = 2j + 1 prime, bases a = 0..d-1 have vectors

    |aα⟩ = d^{-1/2} Σ_m ω^{(j+m)(j-m+1)a/2 + (j+m)α} |j, m⟩,   ω = e^{2πi/d},

and basis a = d is the computational basis with |dα⟩ = |j, m⟩, α = j + m.
Phases are evaluated from exact rational exponents, so at d = 2 the
half-integer exponents give ω^{1/2} = i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .frame import (
    NUMERIC_TOL,
    TensorCoefficients,
    expand_states,
    mub_gram_target,
    structural_battery,
)
from .report import Check, Report
from .tensor import unit_tensor_matrix

__all__ = [
    "MubSet",
    "is_prime",
    "build_prime_mubs",
    "verify_mubs",
    "mub_coefficients",
    "closed_form_dkq",
    "mub_battery",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _omega_power(exponent: Fraction, d: int) -> complex:
    # reduce mod d first: exp(2πi t/d) is d-periodic in t
    t = exponent % d
    return complex(np.exp(2j * np.pi * float(t) / d))


@dataclass
class MubSet:
    """``bases[a, α]`` is the vector |aα⟩ (components ordered m = j..-j)."""

    two_j: int
    bases: np.ndarray
    omega_phase: Fraction | None = None

    @property
    def d(self) -> int:
        return self.two_j + 1

    @property
    def labels(self) -> list[tuple[int, int]]:
        return [(a, al) for a in range(self.bases.shape[0]) for al in range(self.bases.shape[1])]

    def states(self) -> np.ndarray:
        return self.bases.reshape(-1, self.d)

    def projectors(self) -> np.ndarray:
        s = self.states()
        return np.einsum("xa,xb->xab", s, s.conj())


def _exponent(two_j: int, tm: int, a: int, alpha: int) -> Fraction:
    # (j+m)(j-m+1) a/2 + (j+m) α
    n = (two_j + tm) // 2
    return Fraction(n * ((two_j - tm) // 2 + 1) * a, 2) + n * alpha


def build_prime_mubs(d: int) -> MubSet:
    """The d + 1 bases of the explicit prime-dimension construction."""
    if not isinstance(d, (int, np.integer)) or not is_prime(int(d)):
        raise ValueError(f"d must be prime for the explicit MUB construction, got {d}")
    d = int(d)
    two_j = d - 1
    bases = np.zeros((d + 1, d, d), dtype=complex)
    ms = [two_j - 2 * i for i in range(d)]  # twice m, descending
    for a in range(d):
        for alpha in range(d):
            for i, tm in enumerate(ms):
                bases[a, alpha, i] = _omega_power(_exponent(two_j, tm, a, alpha), d)
    bases[:d] /= np.sqrt(d)
    for alpha in range(d):
        # α = j + m, so α = 0 is m = -j, the last row in descending order
        bases[d, alpha, d - 1 - alpha] = 1.0
    return MubSet(two_j, bases, Fraction(1, d))


def verify_mubs(mubs: MubSet, tol: float = 1e-12) -> Report:
    """Squared overlaps against δ_αβ δ_ab + (1 - δ_ab)/d and the identity
    decomposition (1/(d+1)) Σ Π_aα = I."""
    d = mubs.d
    states = mubs.states()
    labels = mubs.labels
    overlaps = np.abs(states.conj() @ states.T) ** 2
    target = mub_gram_target(d, labels)
    dev = np.abs(overlaps - target)
    x, y = np.unravel_index(int(np.argmax(dev)), dev.shape)
    overlap_check = Check(
        "mub_overlaps",
        "|<a alpha|b beta>|^2 = delta delta + (1 - delta_ab)/d",
        bool(dev[x, y] <= tol),
        float(dev[x, y]),
        tol,
        (labels[x], labels[y]),
    )
    n_bases = mubs.bases.shape[0]
    resolved = mubs.projectors().sum(axis=0) / n_bases
    id_dev = float(np.max(np.abs(resolved - np.eye(d))))
    identity_check = Check(
        "identity_decomposition",
        "(1/(d+1)) sum_{a alpha} Pi_{a alpha} = I",
        bool(id_dev <= tol and n_bases == d + 1),
        id_dev,
        tol,
        None,
        {"bases": n_bases, "required": d + 1},
    )
    norms = np.abs(np.linalg.norm(states, axis=1) - 1)
    i = int(np.argmax(norms))
    norm_check = Check("unit_norm", "each |a alpha> has unit norm", bool(norms[i] <= tol), float(norms[i]), tol, labels[i])
    return Report(f"MUB verification (d={d})", [norm_check, overlap_check, identity_check])


def mub_coefficients(mubs: MubSet) -> list[TensorCoefficients]:
    """d_kq(aα) = (2k+1) conj(⟨aα|u^(k)_q|aα⟩) for every member, by expansion."""
    return expand_states(mubs.states(), mubs.two_j, mubs.labels)


def closed_form_dkq(d: int, a: int, alpha: int, k: int, q: int) -> complex:
    """d_kq(aα) from the closed-form double sum over (m, m').

    For a < d the phase exponent is θ(m, m') = (m - m')[(1 - m - m') a/2 + α];
    for a = d it reduces to δ_q0 (2k+1) (-1)^{j-m} (j k j; -m 0 m), α = j + m.
    """
    if not is_prime(d):
        raise ValueError(f"d must be prime, got {d}")
    two_j = d - 1
    if not (0 <= a <= d and 0 <= alpha < d and 0 <= k <= two_j and abs(q) <= k):
        raise ValueError("index out of range")
    u = unit_tensor_matrix(two_j, k, q)  # (-1)^{j-m}(j k j; -m q m') by entry
    if a == d:
        if q != 0:
            return 0j
        row = d - 1 - alpha  # m = α - j
        return complex((2 * k + 1) * u[row, row].real)
    total = 0j
    for r in range(d):
        tm = two_j - 2 * r
        for s in range(d):
            if u[r, s] == 0:
                continue
            tmp = two_j - 2 * s
            # θ with twice-values: (m - m') = (tm - tmp)/2, (1 - m - m') = (2 - tm - tmp)/2
            theta = Fraction((tm - tmp) * (2 - tm - tmp) * a, 8) + Fraction((tm - tmp) * alpha, 2)
            total += _omega_power(theta, d) * u[r, s].real
    return complex((2 * k + 1) / d * total)


def mub_battery(mubs: MubSet, tol: float = NUMERIC_TOL) -> Report:
    """Five structural relations for the d_kq(aα) of a MUB family."""
    coeffs = mub_coefficients(mubs)
    target = mub_gram_target(mubs.d, mubs.labels)
    return structural_battery(coeffs, target, weight=mubs.d + 1, tol=tol, title=f"MUB structural battery (d={mubs.d})")
