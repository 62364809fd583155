"""SIC-POVM candidates: verification and numerical fiducial search.

The search works in the Weyl-Heisenberg covariant setting: a single fiducial
|ψ⟩ generates the d^2 states X^a Z^b |ψ⟩, and every pairwise overlap is an
overlap ⟨ψ|X^a Z^b|ψ⟩ up to a phase.  The penalty

    Σ_{x<y} (|⟨Φ_x|Φ_y⟩|^2 - 1/(d+1))^2

therefore collapses to (d^2/2) Σ_{(a,b) ≠ 0} (|⟨ψ|X^a Z^b|ψ⟩|^2 - 1/(d+1))^2,
minimized by gradient descent on the unit sphere with an adaptive step.
A non-covariant mode optimizing all d^2 states directly is also available.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .frame import (
    SEARCH_TOL,
    TensorCoefficients,
    check_informational_completeness,
    expand_states,
    gram,
    sic_gram_target,
    structural_battery,
    vectorize,
)
from .report import Check, Report

__all__ = [
    "SicCandidate",
    "SearchConfig",
    "shift_clock",
    "wh_orbit",
    "overlap_residual",
    "verify_sic",
    "search_fiducial",
    "sic_coefficients",
    "sic_battery",
]


@dataclass
class SicCandidate:
    two_j: int
    states: np.ndarray
    provenance: dict = field(default_factory=dict)
    residual: float = float("nan")
    converged: bool = False

    @property
    def d(self) -> int:
        return self.two_j + 1

    @property
    def fiducial(self) -> np.ndarray | None:
        fid = self.provenance.get("fiducial")
        return None if fid is None else np.asarray(fid, dtype=complex)


@dataclass(frozen=True)
class SearchConfig:
    d: int
    restarts: int = 50
    max_iterations: int = 20000
    tolerance: float = 1e-8
    seed: int = 42
    covariant: bool = True

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be positive")
        if self.restarts < 1 or self.max_iterations < 1:
            raise ValueError("restarts and max_iterations must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


def shift_clock(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic shift X|n⟩ = |n+1⟩ and clock Z = diag(1, ω, ..., ω^{d-1})."""
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return x, z


def wh_orbit(fiducial) -> np.ndarray:
    """The d^2 states X^a Z^b |ψ⟩, row index a*d + b."""
    psi = np.asarray(fiducial, dtype=complex)
    if psi.ndim != 1:
        raise ValueError("fiducial must be a vector")
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > 1e-12:
        raise ValueError(f"fiducial must be a unit vector (norm {norm})")
    d = len(psi)
    clock = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d)  # [b, n]
    zpsi = clock * psi  # row b: Z^b ψ
    out = np.empty((d * d, d), dtype=complex)
    for a in range(d):
        out[a * d : (a + 1) * d] = np.roll(zpsi, a, axis=1)
    return out


def overlap_residual(states) -> float:
    """max_{x≠y} | |⟨Φ_x|Φ_y⟩|^2 - 1/(d+1) |."""
    states = np.asarray(states)
    n, d = states.shape
    if n < 2:
        return 0.0
    ov = np.abs(states.conj() @ states.T) ** 2
    off = ~np.eye(n, dtype=bool)
    return float(np.max(np.abs(ov[off] - 1.0 / (d + 1))))


# ---------------------------------------------------------------------------
# covariant objective


class _CovariantObjective:
    """Penalty on the d^2 - 1 nontrivial displacement overlaps of one fiducial."""

    def __init__(self, d: int):
        self.d = d
        self.target = 1.0 / (d + 1)
        n = np.arange(d)
        self.fourier = np.exp(2j * np.pi * np.outer(n, n) / d)  # [n, b] = ω^{bn}
        self.shifts = [(n + a) % d for a in range(d)]
        self.mask = np.ones((d, d), dtype=bool)
        self.mask[0, 0] = False

    def overlaps(self, psi: np.ndarray) -> np.ndarray:
        """o[a, b] = ⟨ψ|X^a Z^b|ψ⟩ = Σ_n conj(ψ_{n+a}) ω^{bn} ψ_n."""
        u = np.array([psi[s].conj() * psi for s in self.shifts])
        return u @ self.fourier

    def value(self, psi: np.ndarray) -> float:
        o = self.overlaps(psi)
        e = np.abs(o[self.mask]) ** 2 - self.target
        return float(e @ e)

    def value_and_grad(self, psi: np.ndarray) -> tuple[float, np.ndarray, float]:
        """Penalty, its gradient with respect to conj(ψ), and the max residual."""
        d = self.d
        o = self.overlaps(psi)
        err = np.abs(o) ** 2 - self.target
        err[0, 0] = 0.0
        f = float(np.sum(err[self.mask] ** 2))
        w1 = 2 * err * o.conj()  # multiplies X^a Z^b ψ
        w2 = 2 * err * o  # multiplies (X^a Z^b)† ψ
        # Σ_ab w1[a,b] ω^{b(n-a)} ψ_{n-a}: first W1[a, m] = Σ_b w1[a,b] ω^{bm}
        big_w1 = w1 @ self.fourier.T
        # Σ_ab w2[a,b] ω^{-bn} ψ_{n+a}:  W2[a, n] = Σ_b w2[a,b] ω^{-bn}
        big_w2 = w2 @ self.fourier.conj().T
        g = np.zeros(d, dtype=complex)
        for a in range(d):
            s = self.shifts[a]
            # term 1 at index n uses m = n - a: roll the product forward by a
            g += np.roll(big_w1[a] * psi, a)
            g += big_w2[a] * psi[s]
        return f, g, float(np.max(np.abs(err)))


def _gauge(psi: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first nonzero component is real positive."""
    idx = int(np.argmax(np.abs(psi) > 1e-300))
    if psi[idx] == 0:
        return psi
    out = psi * (abs(psi[idx]) / psi[idx])
    out[idx] = abs(psi[idx])  # exactly real, no rounding residue
    return out


def _descend(obj, psi, max_iterations, stop, step=0.1):
    f, g, res = obj.value_and_grad(psi)
    it = 0
    while it < max_iterations and res > stop:
        it += 1
        # project out the radial component; the phase direction has zero gradient
        g = g - np.vdot(psi, g).real * psi
        trial = psi - step * g
        trial /= np.linalg.norm(trial)
        f_new, g_new, res_new = obj.value_and_grad(trial)
        if f_new < f:
            psi, f, g, res = trial, f_new, g_new, res_new
            step *= 1.1
        else:
            step *= 0.5
            if step < 1e-300:
                break
    return psi, res, it


# Residuals vanish only quadratically along some normal directions when the
# SIC set is a continuous family (d = 3), so gradient descent slows to
# F ~ 1/t there.  Gauss-Newton still contracts linearly on such zeros, so the
# descent hands over to a damped Gauss-Newton polish once inside a basin.
POLISH_SWITCH = 1e-4
POLISH_ITERATIONS = 200


def _covariant_residuals(psi: np.ndarray):
    """e_g = |<ψ|D_g|ψ>|^2 - 1/(d+1) over g != 0 and de/d(Re ψ, Im ψ)."""
    psi = psi[0]
    d = len(psi)
    orbit = wh_orbit(psi)[1:]  # D_g ψ
    n = np.arange(d)
    clock = np.exp(-2j * np.pi * np.outer(n, n) / d)  # [b, n] = ω^{-bn}
    adj = np.array([clock[b] * np.roll(psi, -a) for a in range(d) for b in range(d)])[1:]  # D_g† ψ
    o = orbit @ psi.conj()
    e = np.abs(o) ** 2 - 1.0 / (d + 1)
    a_vec, b_vec = orbit, adj.conj()
    do = np.concatenate([a_vec + b_vec, 1j * (b_vec - a_vec)], axis=1)
    return e, 2 * (o.conj()[:, None] * do).real


def _free_residuals(states: np.ndarray):
    """e_xy = |<Φ_x|Φ_y>|^2 - 1/(d+1) for x < y, with the Jacobian over all
    (Re Φ, Im Φ) laid out state by state."""
    n, d = states.shape
    xs, ys = np.triu_indices(n, 1)
    ov = np.einsum("pk,pk->p", states[xs].conj(), states[ys])
    e = np.abs(ov) ** 2 - 1.0 / (d + 1)
    jac = np.zeros((len(e), n, 2 * d))
    rows = np.arange(len(e))
    w = ov.conj()[:, None]
    jac[rows, xs, :d] = 2 * (w * states[ys]).real
    jac[rows, xs, d:] = 2 * (-1j * w * states[ys]).real
    jac[rows, ys, :d] = 2 * (w * states[xs].conj()).real
    jac[rows, ys, d:] = 2 * (1j * w * states[xs].conj()).real
    return e, jac.reshape(len(e), -1)


def _tangent_basis(states: np.ndarray) -> np.ndarray:
    # per state: real directions orthogonal to the norm and global-phase moves
    n, d = states.shape
    blocks = []
    for psi in states:
        x = np.concatenate([psi.real, psi.imag])
        ix = np.concatenate([-psi.imag, psi.real])
        proj = np.eye(2 * d) - np.outer(x, x) - np.outer(ix, ix)
        blocks.append(np.linalg.eigh(proj)[1][:, 2:])
    out = np.zeros((2 * d * n, (2 * d - 2) * n))
    for i, blk in enumerate(blocks):
        out[i * 2 * d : (i + 1) * 2 * d, i * (2 * d - 2) : (i + 1) * (2 * d - 2)] = blk
    return out


def _polish(residuals, states: np.ndarray, tol: float, iterations: int = POLISH_ITERATIONS):
    """Damped Gauss-Newton on the residual vector, stepping in the tangent space."""
    n, d = states.shape
    e, jac = residuals(states)
    cost = float(e @ e)
    mu = 1e-6
    it = 0
    while it < iterations and np.max(np.abs(e)) > tol * 1e-3:
        it += 1
        basis = _tangent_basis(states)
        jt = jac @ basis
        m = jt.shape[1]
        lhs = np.vstack([jt, np.sqrt(mu) * np.eye(m)])
        rhs = np.concatenate([-e, np.zeros(m)])
        delta = (basis @ np.linalg.lstsq(lhs, rhs, rcond=None)[0]).reshape(n, 2 * d)
        trial = states + delta[:, :d] + 1j * delta[:, d:]
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        e_new, jac_new = residuals(trial)
        cost_new = float(e_new @ e_new)
        if cost_new < cost:
            states, e, jac, cost = trial, e_new, jac_new, cost_new
            mu = max(mu / 3, 1e-15)
        else:
            mu *= 4
            if mu > 1e10:
                break
    return states, it


def _run_restart(config: SearchConfig, index: int):
    rng = np.random.default_rng(config.seed + index)
    d = config.d
    switch = max(config.tolerance, POLISH_SWITCH)
    if config.covariant:
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi = z / np.linalg.norm(z)
        psi, res, iters = _descend(_CovariantObjective(d), psi, config.max_iterations, switch)
        polish = 0
        if res <= switch:
            fid, polish = _polish(_covariant_residuals, psi[None, :], config.tolerance)
            psi = fid[0]
        psi = _gauge(psi)
        states = wh_orbit(psi)
        return index, states, psi, overlap_residual(states), (iters, polish)
    z = rng.standard_normal((d * d, d)) + 1j * rng.standard_normal((d * d, d))
    states = z / np.linalg.norm(z, axis=1, keepdims=True)
    states, res, iters = _descend_free(_FreeObjective(d), states, config.max_iterations, switch)
    polish = 0
    if res <= switch:
        states, polish = _polish(_free_residuals, states, config.tolerance)
    states = np.array([_gauge(s) for s in states])
    return index, states, None, overlap_residual(states), (iters, polish)


class _FreeObjective:
    """Penalty over all pairs of d^2 independent states."""

    def __init__(self, d: int):
        self.d = d
        self.target = 1.0 / (d + 1)
        self.off = ~np.eye(d * d, dtype=bool)

    def value_and_grad(self, states):
        ov = states.conj() @ states.T  # ⟨Φ_x|Φ_y⟩
        err = np.where(self.off, np.abs(ov) ** 2 - self.target, 0.0)
        f = 0.5 * float(np.sum(err**2))
        # ∂f/∂conj(Φ_x) = 2 Σ_y err_xy conj(⟨Φ_x|Φ_y⟩) Φ_y
        g = 2 * (err * ov.conj()) @ states
        return f, g, float(np.max(np.abs(err)))


def _descend_free(obj, states, max_iterations, stop, step=0.05):
    f, g, res = obj.value_and_grad(states)
    it = 0
    while it < max_iterations and res > stop:
        it += 1
        radial = np.sum(states.conj() * g, axis=1).real
        g = g - radial[:, None] * states
        trial = states - step * g
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        f_new, g_new, res_new = obj.value_and_grad(trial)
        if f_new < f:
            states, f, g, res = trial, f_new, g_new, res_new
            step *= 1.1
        else:
            step *= 0.5
            if step < 1e-300:
                break
    return states, res, it


def _thread_count() -> int:
    raw = os.environ.get("RACAH_FRAMES_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, n)


def search_fiducial(config: SearchConfig | None = None, **kwargs) -> SicCandidate:
    """Search for a SIC-POVM; returns the best candidate over the restarts.

    Restart ``i`` is seeded with ``seed + i``.  The first converged restart in
    index order is returned, and later restarts are skipped; if none converge
    the lowest residual wins, ties going to the lower index.  Restarts may run
    concurrently in batches (``RACAH_FRAMES_THREADS``), and the winner does not
    depend on the batch size.
    """
    if config is None:
        config = SearchConfig(**kwargs)
    elif kwargs:
        raise TypeError("pass either a SearchConfig or keyword arguments")
    d = config.d
    settings = {
        "restarts": config.restarts,
        "max_iterations": config.max_iterations,
        "tolerance": config.tolerance,
        "seed": config.seed,
        "mode": "covariant" if config.covariant else "free",
    }
    if d == 1:
        states = np.ones((1, 1), dtype=complex)
        prov = {"kind": "trivial", "fiducial": states[0], "restart": 0, "iterations": 0, "polish_iterations": 0, "config": settings}
        return SicCandidate(0, states, prov, 0.0, True)
    best = None
    workers = _thread_count()
    start = 0
    while start < config.restarts:
        batch = range(start, min(start + workers, config.restarts))
        if workers == 1 or len(batch) == 1:
            results = [_run_restart(config, i) for i in batch]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda i: _run_restart(config, i), batch))
        done = None
        for r in results:
            if r[3] <= config.tolerance:
                done = r
                break
            if best is None or r[3] < best[3]:
                best = r
        start = batch.stop
        if done is not None:
            best = done
            break
    index, states, psi, res, (descent, polish) = best
    prov = {
        "kind": "weyl-heisenberg orbit" if config.covariant else "explicit list",
        "fiducial": psi,
        "restart": index,
        "iterations": descent,
        "polish_iterations": polish,
        "config": settings,
    }
    return SicCandidate(d - 1, states, prov, res, res <= config.tolerance)


# ---------------------------------------------------------------------------
# verification


def verify_sic(candidate: SicCandidate, tol: float = SEARCH_TOL) -> Report:
    """Trace condition, normalization, identity decomposition and completeness."""
    states = np.asarray(candidate.states)
    d = candidate.d
    n = len(states)
    checks = []
    norms = np.abs(np.linalg.norm(states, axis=1) ** 2 - 1)
    i = int(np.argmax(norms))
    checks.append(Check("normalization", "Tr(P_x^2) = 1", bool(norms[i] <= tol), float(norms[i]), tol, i))
    ov = np.abs(states.conj() @ states.T) ** 2
    off = ~np.eye(n, dtype=bool)
    dev = np.where(off, np.abs(ov - 1.0 / (d + 1)), 0.0)
    x, y = np.unravel_index(int(np.argmax(dev)), dev.shape)
    checks.append(
        Check(
            "trace_condition",
            "Tr(P_x P_y) = |<Phi_x|Phi_y>|^2 = 1/(d+1) for x != y",
            bool(dev[x, y] <= tol and n == d * d),
            float(dev[x, y]),
            tol,
            (int(x), int(y)),
            {"members": n, "required": d * d},
        )
    )
    resolved = np.einsum("xa,xb->ab", states, states.conj()) / d
    id_dev = float(np.max(np.abs(resolved - np.eye(d))))
    checks.append(Check("identity_decomposition", "(1/d) sum_x P_x = I", id_dev <= tol, id_dev, tol))
    coeffs = sic_coefficients(candidate)
    checks.append(check_informational_completeness([vectorize(c) for c in coeffs]))
    return Report(f"SIC verification (d={d})", checks)


def sic_coefficients(candidate: SicCandidate) -> list[TensorCoefficients]:
    """c_kq(x) = (2k+1) conj(⟨Φ_x|u^(k)_q|Φ_x⟩) for each state."""
    return expand_states(candidate.states, candidate.two_j)


def sic_battery(candidate: SicCandidate, tol: float = SEARCH_TOL, spectrum_tol: float = 1e-6) -> Report:
    """The five structural relations with SIC targets plus the Gram spectrum
    {d (once), d/(d+1) (d^2 - 1 times)}."""
    d = candidate.d
    coeffs = sic_coefficients(candidate)
    n = len(coeffs)
    report = structural_battery(coeffs, sic_gram_target(d, n), weight=d, tol=tol, title=f"SIC structural battery (d={d})")
    spec = np.sort(gram([vectorize(c) for c in coeffs]).eigen_spectrum)
    expected = np.sort(np.array([d] + [d / (d + 1)] * (d * d - 1)))
    if len(spec) == len(expected):
        dev = float(np.max(np.abs(spec - expected)))
    else:
        dev = float("inf")
    report.checks.append(
        Check(
            "gram_spectrum",
            "Gram eigenvalues {d, d/(d+1) x (d^2-1)}",
            bool(dev <= spectrum_tol),
            dev,
            spectrum_tol,
            details={"spectrum": spec},
        )
    )
    return report
