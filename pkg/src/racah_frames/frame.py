"""Unit-tensor expansion of operators and the shared structural checks.

An operator A on the spin-j space expands as A = Σ c_kq u^(k)_q with
c_kq = (2k+1) Tr(u^(k)_q† A).  For a pure state |Φ⟩⟨Φ| this is
(2k+1) conj(⟨Φ|u^(k)_q|Φ⟩).  Rescaling by 1/sqrt(2k+1) gives a vector in
C^{(2j+1)^2} whose Hermitian products reproduce Hilbert-Schmidt products of
the operators, which is what the Gram checks below rely on.

Coefficient arrays use zero-based flat index ``k*k + k + q``; serialized
output adds one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .report import Check, Report
from .tensor import basis_stack, coupling_coefficient, index_pairs

__all__ = [
    "TensorCoefficients",
    "FrameVector",
    "GramReport",
    "flat_index",
    "kq_from_index",
    "expand",
    "reconstruct",
    "vectorize",
    "devectorize",
    "gram",
    "sic_gram_target",
    "mub_gram_target",
    "rotational_invariant",
    "check_first_component",
    "check_conjugation",
    "check_rotational_invariance",
    "check_gram",
    "check_quadratic_system",
    "check_sum_rule",
    "check_informational_completeness",
    "structural_battery",
]

NUMERIC_TOL = 1e-10
SEARCH_TOL = 1e-8


def flat_index(k: int, q: int) -> int:
    """Zero-based position of (k, q); the one-based convention is this plus one."""
    if abs(q) > k:
        raise ValueError(f"|q| > k for (k, q) = ({k}, {q})")
    return k * k + k + q


def kq_from_index(i: int) -> tuple[int, int]:
    k = int(np.sqrt(i))
    while k * k > i:
        k -= 1
    while (k + 1) * (k + 1) <= i:
        k += 1
    return k, i - k * k - k


@lru_cache(maxsize=64)
def _weights(two_j: int) -> np.ndarray:
    w = np.array([2 * k + 1 for k, _ in index_pairs(two_j)], dtype=float)
    w.flags.writeable = False
    return w


@dataclass
class TensorCoefficients:
    """Coefficients c_kq of one operator, stored in flat (k, q) order."""

    two_j: int
    values: np.ndarray
    label: object = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        n = (self.two_j + 1) ** 2
        if self.values.shape != (n,):
            raise ValueError(f"expected {n} coefficients for two_j={self.two_j}, got {self.values.shape}")

    def __getitem__(self, kq: tuple[int, int]) -> complex:
        k, q = kq
        if not 0 <= k <= self.two_j:
            raise KeyError(kq)
        return complex(self.values[flat_index(k, q)])

    def items(self):
        for i, kq in enumerate(index_pairs(self.two_j)):
            yield kq, complex(self.values[i])

    def as_dict(self) -> dict[tuple[int, int], complex]:
        return dict(self.items())


@dataclass
class FrameVector:
    """The normalized coefficient vector v_i = c_kq / sqrt(2k+1)."""

    two_j: int
    components: np.ndarray
    label: object = None

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=complex)
        n = (self.two_j + 1) ** 2
        if self.components.shape != (n,):
            raise ValueError(f"frame vector for two_j={self.two_j} must have length {n}")

    def __getitem__(self, i: int) -> complex:
        """One-based component access, i = k^2 + k + q + 1."""
        if not 1 <= i <= len(self.components):
            raise IndexError(i)
        return complex(self.components[i - 1])


def expand(operator, two_j: int | None = None, label=None) -> TensorCoefficients:
    """Coefficients of ``operator`` in the unit-tensor basis."""
    a = np.asarray(operator, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("operator must be a square matrix")
    if two_j is None:
        two_j = a.shape[0] - 1
    if a.shape[0] != two_j + 1:
        raise ValueError(f"operator is {a.shape[0]}x{a.shape[0]} but two_j={two_j} needs dimension {two_j + 1}")
    flat = basis_stack(two_j).reshape((two_j + 1) ** 2, -1)
    return TensorCoefficients(two_j, _weights(two_j) * (flat.conj() @ a.ravel()), label)


def expand_states(states, two_j: int, labels=None) -> list[TensorCoefficients]:
    """Coefficients of |ψ⟩⟨ψ| for each row of ``states``."""
    states = np.asarray(states, dtype=complex)
    d = two_j + 1
    flat = basis_stack(two_j).reshape(d * d, -1)
    projectors = np.einsum("xa,xb->xab", states, states.conj()).reshape(len(states), -1)
    coeffs = (projectors @ flat.conj().T) * _weights(two_j)
    labels = labels if labels is not None else list(range(len(states)))
    return [TensorCoefficients(two_j, c, lab) for c, lab in zip(coeffs, labels)]


def reconstruct(coeffs: TensorCoefficients) -> np.ndarray:
    d = coeffs.two_j + 1
    flat = basis_stack(coeffs.two_j).reshape(d * d, -1)
    return (coeffs.values @ flat).reshape(d, d)


def vectorize(coeffs: TensorCoefficients) -> FrameVector:
    return FrameVector(coeffs.two_j, coeffs.values / np.sqrt(_weights(coeffs.two_j)), coeffs.label)


def devectorize(vector: FrameVector) -> TensorCoefficients:
    return TensorCoefficients(vector.two_j, vector.components * np.sqrt(_weights(vector.two_j)), vector.label)


# ---------------------------------------------------------------------------
# Gram analysis


@dataclass
class GramReport:
    matrix: np.ndarray
    target: np.ndarray | None
    target_description: str
    max_deviation: float
    eigen_spectrum: np.ndarray
    worst: tuple | None = None
    labels: list = field(default_factory=list)


def sic_gram_target(d: int, n: int | None = None) -> np.ndarray:
    """(d δ_xy + 1) / (d + 1) for n members (default d^2)."""
    n = d * d if n is None else n
    return (d * np.eye(n) + np.ones((n, n))) / (d + 1)


def mub_gram_target(d: int, labels: Sequence[tuple[int, int]]) -> np.ndarray:
    """δ_αβ δ_ab + (1 - δ_ab)/d for members labelled (a, α)."""
    a = np.array([lab[0] for lab in labels])
    al = np.array([lab[1] for lab in labels])
    same_basis = a[:, None] == a[None, :]
    same_vec = same_basis & (al[:, None] == al[None, :])
    return np.where(same_vec, 1.0, 0.0) + np.where(same_basis, 0.0, 1.0 / d)


def _stack(vectors) -> tuple[np.ndarray, int]:
    if not vectors:
        raise ValueError("need at least one vector")
    two_j = vectors[0].two_j
    if any(v.two_j != two_j for v in vectors):
        raise ValueError("all vectors must share two_j")
    return np.array([v.components for v in vectors]), two_j


def gram(vectors: Sequence[FrameVector], target=None, description: str = "") -> GramReport:
    """Hermitian products v(x)·v(y) = Σ_i conj(v_i(x)) v_i(y)."""
    mat, _ = _stack(vectors)
    g = mat.conj() @ mat.T
    g = 0.5 * (g + g.conj().T)
    spectrum = np.linalg.eigvalsh(g)
    labels = [v.label for v in vectors]
    if target is None:
        return GramReport(g, None, description, 0.0, spectrum, None, labels)
    target = np.asarray(target)
    dev = np.abs(g - target)
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return GramReport(g, target, description, float(dev[i, j]), spectrum, (labels[i], labels[j]), labels)


# ---------------------------------------------------------------------------
# single-relation checks


def _family(coeffs) -> list[TensorCoefficients]:
    if isinstance(coeffs, TensorCoefficients):
        return [coeffs]
    family = list(coeffs)
    if not family:
        raise ValueError("empty family")
    return family


def _coef_matrix(family) -> np.ndarray:
    return np.array([c.values for c in family])


def check_first_component(coeffs, tol: float = NUMERIC_TOL) -> Check:
    """c_00 = 1/sqrt(2j+1) for every member."""
    family = _family(coeffs)
    two_j = family[0].two_j
    dev = np.abs(_coef_matrix(family)[:, 0] - 1 / np.sqrt(two_j + 1))
    i = int(np.argmax(dev))
    return Check(
        "first_component",
        "c_00 = 1/sqrt(2j+1), independent of the member",
        bool(dev[i] <= tol),
        float(dev[i]),
        tol,
        family[i].label,
    )


@lru_cache(maxsize=64)
def _conjugate_partner(two_j: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = index_pairs(two_j)
    partner = np.array([flat_index(k, -q) for k, q in pairs])
    sign = np.array([(-1.0) ** (q % 2) for _, q in pairs])
    return partner, sign


def check_conjugation(coeffs, tol: float = NUMERIC_TOL) -> Check:
    """conj(c_kq) = (-1)^q c_{k,-q}; holds exactly when the operator is Hermitian."""
    family = _family(coeffs)
    partner, sign = _conjugate_partner(family[0].two_j)
    c = _coef_matrix(family)
    dev = np.abs(c.conj() - sign * c[:, partner])
    x, i = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return Check(
        "conjugation",
        "conj(c_kq) = (-1)^q c_k,-q",
        bool(dev[x, i] <= tol),
        float(dev[x, i]),
        tol,
        {"member": family[x].label, "kq": index_pairs(family[0].two_j)[i]},
    )


def rotational_invariant(cx: TensorCoefficients, cy: TensorCoefficients) -> complex:
    """Σ_k 1/(2k+1) Σ_q conj(c_kq(x)) c_kq(y)."""
    return complex(np.sum(cx.values.conj() * cy.values / _weights(cx.two_j)))


def check_rotational_invariance(pair, expected: float, tol: float = NUMERIC_TOL) -> Check:
    """The SO(3)-invariant pairing of two members against its expected value."""
    cx, cy = pair
    val = rotational_invariant(cx, cy)
    dev = abs(val - expected)
    return Check(
        "rotational_invariance",
        "sum_k 1/(2k+1) sum_q conj(c_kq(x)) c_kq(y)",
        bool(dev <= tol),
        dev,
        tol,
        (cx.label, cy.label),
        {"value": val, "expected": expected},
    )


def _invariant_matrix(family) -> np.ndarray:
    c = _coef_matrix(family)
    return (c.conj() / _weights(family[0].two_j)) @ c.T


def check_gram(coeffs, target: np.ndarray, tol: float = NUMERIC_TOL) -> Check:
    """All pairwise SO(3)-invariant pairings at once, against ``target``."""
    family = _family(coeffs)
    g = _invariant_matrix(family)
    dev = np.abs(g - np.asarray(target))
    x, y = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return Check(
        "rotational_invariance",
        "sum_k 1/(2k+1) sum_q conj(c_kq(x)) c_kq(y) matches the target Gram matrix",
        bool(dev[x, y] <= tol),
        float(dev[x, y]),
        tol,
        (family[x].label, family[y].label),
    )


@lru_cache(maxsize=16)
def coupling_tensor(two_j: int) -> np.ndarray:
    """gamma[KQ, kq, lp] = (-1)^{2j-Q}(k ℓ K; -q -p Q){k ℓ K; j j j}."""
    pairs = index_pairs(two_j)
    n = len(pairs)
    gam = np.zeros((n, n, n))
    for a, (k, q) in enumerate(pairs):
        for b, (l, p) in enumerate(pairs):
            big_q = q + p
            for big_k in range(max(abs(k - l), abs(big_q)), min(k + l, two_j) + 1):
                c = coupling_coefficient(two_j, k, q, l, p, big_k)
                if c:
                    gam[flat_index(big_k, big_q), a, b] = c / (2 * big_k + 1)
    gam.flags.writeable = False
    return gam


def quadratic_residuals(coeffs) -> np.ndarray:
    """c_KQ/(2K+1) - Σ gamma c_kq c_lp for every (K, Q), one row per member."""
    family = _family(coeffs)
    two_j = family[0].two_j
    gam = coupling_tensor(two_j)
    n = gam.shape[0]
    c = _coef_matrix(family)
    pairs = np.einsum("xa,xb->xab", c, c).reshape(len(family), n * n)
    rhs = pairs @ gam.reshape(n, n * n).T
    return c / _weights(two_j) - rhs


def check_quadratic_system(coeffs, tol: float = NUMERIC_TOL) -> Check:
    """Idempotency P^2 = P written in unit-tensor coefficients.

    The (K, Q) = (0, 0) equation is equivalent to ||v||^2 = 1; its residual is
    reported separately in ``details``.
    """
    family = _family(coeffs)
    pairs = index_pairs(family[0].two_j)
    r = np.abs(quadratic_residuals(family))
    x, i = np.unravel_index(int(np.argmax(r)), r.shape)
    worst = float(r[x, i])
    where = {"member": family[x].label, "KQ": pairs[i]}
    k0 = float(np.max(r[:, 0]))
    return Check(
        "quadratic_system",
        "c_KQ/(2K+1) = (-1)^(2j-Q) sum 3jm x 6j x c_kq c_lp",
        bool(worst <= tol),
        worst,
        tol,
        where,
        {"K0_residual": k0},
    )


@lru_cache(maxsize=64)
def _three_jm_table(two_j: int) -> np.ndarray:
    """W[i, m, m'] = (j k j; -m q m') = (-1)^{j-m} u^(k)_q[m, m']."""
    d = two_j + 1
    sign = np.array([(-1.0) ** i for i in range(d)])  # (-1)^{j-m}, m = j - row
    table = basis_stack(two_j) * sign[None, :, None]
    table.flags.writeable = False
    return table


def check_sum_rule(family, weight: float, tol: float = NUMERIC_TOL) -> Check:
    """Σ_x Σ_kq c_kq(x) (j k j; -m q m') = weight (-1)^{j-m} δ_mm'.

    ``weight`` is the multiple of the identity the family's projectors sum
    to: d for a SIC-POVM, d + 1 for a complete set of MUBs.
    """
    family = _family(family)
    two_j = family[0].two_j
    d = two_j + 1
    table = _three_jm_table(two_j)
    total = np.einsum("i,imn->mn", _coef_matrix(family).sum(axis=0), table)
    sign = np.array([(-1.0) ** i for i in range(d)])
    target = weight * np.diag(sign)
    dev = np.abs(total - target)
    r, s = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return Check(
        "sum_rule",
        "sum_x sum_kq c_kq(x) (j k j; -m q m') = weight (-1)^(j-m) delta_mm'",
        bool(dev[r, s] <= tol),
        float(dev[r, s]),
        tol,
        {"m_index": int(r), "mp_index": int(s)},
        {"weight": weight, "members": len(family)},
    )


def check_informational_completeness(vectors, rtol: float = 1e-9) -> Check:
    """Rank of the stacked frame vectors; complete iff it equals (2j+1)^2."""
    if vectors and isinstance(vectors[0], TensorCoefficients):
        vectors = [vectorize(c) for c in vectors]
    mat, two_j = _stack(list(vectors))
    n = (two_j + 1) ** 2
    sv = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(sv > rtol * sv[0])) if sv.size and sv[0] > 0 else 0
    smallest = float(sv[n - 1]) if len(sv) >= n else 0.0
    return Check(
        "informational_completeness",
        "probabilities Tr(P_x rho) determine rho: rank = (2j+1)^2",
        rank == n,
        float(n - rank),
        0.0,
        None,
        {"rank": rank, "required": n, "smallest_singular_value": smallest},
    )


def structural_battery(family, target: np.ndarray, weight: float, tol: float = NUMERIC_TOL, title: str = "structural battery") -> Report:
    """Run the five structural relations over a family of coefficient sets."""
    family = _family(family)
    return Report(
        title,
        [
            check_first_component(family, tol),
            check_conjugation(family, tol),
            check_gram(family, target, tol),
            check_quadratic_system(family, tol),
            check_sum_rule(family, weight, tol),
        ],
    )
