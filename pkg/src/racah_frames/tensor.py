"""Racah unit tensors u^(k)_q as dense matrices on the spin-j space.

Rows and columns are indexed by m = j, j-1, ..., -j, so index ``i`` holds
``m = j - i``.  Entries come from exact 3-jm values and are rounded once to
double precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .report import Check
from .wigner import six_j_float, three_jm_float

__all__ = [
    "DEFAULT_TOL",
    "UnitTensor",
    "index_pairs",
    "unit_tensor",
    "unit_tensor_matrix",
    "basis_stack",
    "coupling_coefficient",
    "couple",
    "check_hermitian_conjugation",
    "check_trace_orthogonality",
    "check_coupling",
    "check_lie_closure",
]

DEFAULT_TOL = 1e-12


def index_pairs(two_j: int) -> list[tuple[int, int]]:
    """All (k, q) in flattened order i = k^2 + k + q."""
    return [(k, q) for k in range(two_j + 1) for q in range(-k, k + 1)]


@dataclass(frozen=True)
class UnitTensor:
    two_j: int
    k: int
    q: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.two_j + 1


def _check_kq(two_j: int, k: int, q: int) -> None:
    if two_j < 0:
        raise ValueError("two_j must be nonnegative")
    if not 0 <= k <= two_j:
        raise ValueError(f"k={k} outside 0..2j={two_j}")
    if abs(q) > k:
        raise ValueError(f"|q|={abs(q)} exceeds k={k}")


@lru_cache(maxsize=4096)
def _matrix(two_j: int, k: int, q: int) -> np.ndarray:
    d = two_j + 1
    out = np.zeros((d, d), dtype=complex)
    for row in range(d):
        tm = two_j - 2 * row
        tmp = tm - 2 * q  # m' = m - q
        if abs(tmp) > two_j:
            continue
        col = (two_j - tmp) // 2
        val = three_jm_float(two_j, 2 * k, two_j, -tm, 2 * q, tmp)
        if ((two_j - tm) // 2) % 2:
            val = -val
        out[row, col] = val
    out.flags.writeable = False
    return out


def unit_tensor_matrix(two_j: int, k: int, q: int) -> np.ndarray:
    """Read-only matrix of u^(k)_q: entry (m, m') = (-1)^{j-m} (j k j; -m q m')."""
    _check_kq(two_j, k, q)
    return _matrix(two_j, k, q)


def unit_tensor(two_j: int, k: int, q: int) -> UnitTensor:
    return UnitTensor(two_j, k, q, unit_tensor_matrix(two_j, k, q))


@lru_cache(maxsize=64)
def basis_stack(two_j: int) -> np.ndarray:
    """Array of shape (N, d, d) holding every u^(k)_q in flattened order."""
    stack = np.array([_matrix(two_j, k, q) for k, q in index_pairs(two_j)])
    stack.flags.writeable = False
    return stack


def coupling_coefficient(two_j: int, k: int, q: int, l: int, p: int, big_k: int) -> float:
    """(-1)^{2j-Q}(2K+1)(k ℓ K; -q -p Q){k ℓ K; j j j} with Q = q + p."""
    big_q = q + p
    if abs(big_q) > big_k:
        return 0.0
    val = three_jm_float(2 * k, 2 * l, 2 * big_k, -2 * q, -2 * p, 2 * big_q)
    if val == 0.0:
        return 0.0
    val *= six_j_float(2 * k, 2 * l, 2 * big_k, two_j, two_j, two_j)
    if (two_j - big_q) % 2:
        val = -val
    return (2 * big_k + 1) * val


def couple(two_j: int, k: int, q: int, l: int, p: int) -> dict[tuple[int, int], float]:
    """Expansion of the product u^(k)_q u^(ℓ)_p in unit tensors.

    Returns ``{(K, Q): coefficient}``; only Q = q + p occurs.
    """
    _check_kq(two_j, k, q)
    _check_kq(two_j, l, p)
    out = {}
    big_q = q + p
    for big_k in range(max(abs(k - l), abs(big_q)), min(k + l, two_j) + 1):
        c = coupling_coefficient(two_j, k, q, l, p, big_k)
        if c != 0.0:
            out[big_k, big_q] = c
    return out


# ---------------------------------------------------------------------------
# checks


def check_hermitian_conjugation(two_j: int, k: int | None = None, q: int | None = None, tol: float = DEFAULT_TOL) -> Check:
    """u^(k)_q† = (-1)^q u^(k)_{-q}, for one (k, q) or all of them."""
    pairs = index_pairs(two_j) if k is None else [(k, q)]
    worst, where = -1.0, None
    for kk, qq in pairs:
        lhs = unit_tensor_matrix(two_j, kk, qq).conj().T
        rhs = (-1) ** (qq % 2) * unit_tensor_matrix(two_j, kk, -qq)
        dev = float(np.max(np.abs(lhs - rhs)))
        if dev > worst:
            worst, where = dev, (kk, qq)
    return Check("hermitian_conjugation", "u^(k)_q^dagger = (-1)^q u^(k)_-q", bool(worst <= tol), worst, tol, where)


def trace_gram(two_j: int) -> np.ndarray:
    """Matrix of Tr(u^(k)_q† u^(ℓ)_p) over flattened indices."""
    stack = basis_stack(two_j)
    flat = stack.reshape(len(stack), -1)
    return flat.conj() @ flat.T


def check_trace_orthogonality(two_j: int, tol: float = DEFAULT_TOL) -> Check:
    """Tr(u^(k)_q† u^(ℓ)_p) = δ_{kℓ} δ_{qp} / (2k+1) over all index pairs."""
    gram = trace_gram(two_j)
    ks = np.array([k for k, _ in index_pairs(two_j)])
    target = np.diag(1.0 / (2 * ks + 1))
    dev = np.abs(gram - target)
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    pairs = index_pairs(two_j)
    worst = float(dev[i, j])
    return Check(
        "trace_orthogonality",
        "Tr(u^(k)_q^dagger u^(l)_p) = delta delta / (2k+1)",
        bool(worst <= tol),
        worst,
        tol,
        (pairs[i], pairs[j]),
    )


def reconstruct_product(two_j: int, expansion: dict[tuple[int, int], float]) -> np.ndarray:
    d = two_j + 1
    out = np.zeros((d, d), dtype=complex)
    for (big_k, big_q), c in expansion.items():
        out += c * unit_tensor_matrix(two_j, big_k, big_q)
    return out


def check_coupling(two_j: int, tol: float = DEFAULT_TOL, *, k0_cross_check: bool = True) -> Check:
    """Every product u^(k)_q u^(ℓ)_p against its coupling-relation expansion.

    With ``k0_cross_check`` the K = 0 coefficient is also compared with the
    trace relation, since only u^(0)_0 = I/sqrt(2j+1) carries trace:
    c_00 = (-1)^q δ_{kℓ} δ_{q,-p} / ((2k+1) sqrt(2j+1)).
    """
    worst, where = -1.0, None
    pairs = index_pairs(two_j)
    sqrt_d = np.sqrt(two_j + 1)
    for k, q in pairs:
        a = unit_tensor_matrix(two_j, k, q)
        for l, p in pairs:
            b = unit_tensor_matrix(two_j, l, p)
            expansion = couple(two_j, k, q, l, p)
            direct = a @ b
            dev = float(np.max(np.abs(direct - reconstruct_product(two_j, expansion))))
            if k0_cross_check:
                c0 = expansion.get((0, 0), 0.0)
                expected = 0.0
                if k == l and q == -p:
                    expected = (-1) ** (q % 2) / ((2 * k + 1) * sqrt_d)
                dev = max(dev, abs(c0 - expected))
            if dev > worst:
                worst, where = dev, ((k, q), (l, p))
    return Check("coupling_relation", "u^(k)_q u^(l)_p expanded with 3-jm x 6-j", bool(worst <= tol), worst, tol, where)


def check_lie_closure(two_j: int, tol: float = DEFAULT_TOL) -> Check:
    """Unit tensors span gl(2j+1): full rank, and every commutator re-expands
    in the basis with zero residual."""
    stack = basis_stack(two_j)
    n = len(stack)
    flat = stack.reshape(n, -1)
    rank = int(np.linalg.matrix_rank(flat))
    weights = np.array([2 * k + 1 for k, _ in index_pairs(two_j)], dtype=float)
    worst = 0.0
    for i in range(n):
        comm = np.einsum("ab,jbc->jac", stack[i], stack) - np.einsum("iab,bc->iac", stack, stack[i])
        cf = comm.reshape(n, -1)
        coeffs = (cf @ flat.conj().T) * weights  # (2K+1) Tr(u_KQ† C)
        worst = max(worst, float(np.max(np.abs(cf - coeffs @ flat))))
    passed = bool(rank == n and worst <= tol)
    return Check(
        "lie_closure",
        "commutators close on the unit-tensor span of gl(2j+1)",
        passed,
        worst,
        tol,
        details={"rank": rank, "expected_rank": n},
    )
