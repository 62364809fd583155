"""Exhaustive exact verification of the 3-jm / 6-j identity suite.

Every 3-jm symbol factors as ``n * sqrt(R)`` with ``n`` an integer and ``R`` a
ratio of factorials (see :func:`racah_frames.wigner.three_jm_parts`).  Inside
each identity all terms share one radical once the magnetic factorials, which
appear squared, are pulled out.  Dividing both sides by that common nonzero
radical leaves an equality between integers (or rationals), so the sweeps
below are exact and run on plain Python ints held in numpy object arrays.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import lcm

import numpy as np

from .tensor import basis_stack, index_pairs
from .wigner import _triangle_twice, factorial, six_j_float, six_j_parts, three_jm_float, three_jm_parts

__all__ = [
    "SuiteResult",
    "orthogonality_mm_suite",
    "orthogonality_kq_suite",
    "barycenter_suite",
    "contraction_suite",
    "exact_identity_suite",
    "float_identity_suite",
]


@dataclass
class SuiteResult:
    name: str
    max_two_j: int
    checked: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    exact: bool = True
    residual: float = 0.0  # worst float deviation; stays 0 for exact sweeps

    @property
    def passed(self) -> bool:
        return not self.failures

    def _fail(self, where):
        if len(self.failures) < 50:
            self.failures.append(where)
        else:
            self.failures[-1] = ("...", where)


def _hfact(tj: int, tm: int) -> int:
    """(j+m)!(j-m)!"""
    return factorial((tj + tm) // 2) * factorial((tj - tm) // 2)


def _mvals(tj: int) -> list[int]:
    return list(range(-tj, tj + 1, 2))


def _sign(x: int) -> int:
    return -1 if x % 2 else 1


def orthogonality_mm_suite(max_two_j: int, _flip=None) -> SuiteResult:
    """Σ_{mm'} (j j' k; m m' q)(j j' ℓ; m m' p) = δ_{kℓ}δ_{qp}Δ(j,j',k)/(2k+1).

    Pairs with q ≠ p have no common (m, m') support and vanish term by term,
    so the sweep evaluates the q = p blocks: for fixed (j, j', q) the full
    Gram matrix over every admissible pair (k, ℓ).
    """
    res = SuiteResult("orthogonality_mm", max_two_j)
    t0 = time.perf_counter()
    for tj in range(max_two_j + 1):
        for tjp in range(max_two_j + 1):
            ks_all = list(range(abs(tj - tjp), tj + tjp + 1, 2))
            for tq in range(-(tj + tjp), tj + tjp + 1, 2):
                ks = [tk for tk in ks_all if abs(tq) <= tk]
                ms = [tm for tm in _mvals(tj) if abs(-tq - tm) <= tjp]
                if not ks or not ms:
                    continue
                vec = np.empty((len(ks), len(ms)), dtype=object)
                weights = np.empty(len(ms), dtype=object)
                for b, tm in enumerate(ms):
                    weights[b] = _hfact(tj, tm) * _hfact(tjp, -tq - tm)
                for a, tk in enumerate(ks):
                    for b, tm in enumerate(ms):
                        vec[a, b] = three_jm_parts(tj, tjp, tk, tm, -tq - tm, tq)[0]
                if _flip is not None and _flip == (tj, tjp, tq):
                    vec[0, 0] = -vec[0, 0]
                gram = (vec * weights) @ vec.T
                for a, tk in enumerate(ks):
                    # diagonal: (k+q)!(k-q)! * Z / E_k == 1/(2k+1)
                    e_k = (
                        factorial((tj + tjp + tk) // 2 + 1)
                        * factorial((tj + tjp - tk) // 2)
                        * factorial((tj - tjp + tk) // 2)
                        * factorial((-tj + tjp + tk) // 2)
                    )
                    g_k = _hfact(tk, tq)
                    for b, tl in enumerate(ks):
                        res.checked += 1
                        z = gram[a, b]
                        if a == b:
                            ok = g_k * z * (tk + 1) == e_k
                        else:
                            ok = z == 0
                        if not ok:
                            res._fail((tj, tjp, tk, tq, tl, tq))
    res.seconds = time.perf_counter() - t0
    return res


def orthogonality_kq_suite(max_two_j: int) -> SuiteResult:
    """Σ_{kq} (2k+1)(j j' k; m m' q)(j j' k; M M' q) = δ_{mM}δ_{m'M'}.

    Blocks with m + m' ≠ M + M' share no q and vanish term by term; each
    remaining block is a weighted Gram matrix over rows (m, m').
    """
    res = SuiteResult("orthogonality_kq", max_two_j)
    t0 = time.perf_counter()
    for tj in range(max_two_j + 1):
        for tjp in range(max_two_j + 1):
            ks_all = list(range(abs(tj - tjp), tj + tjp + 1, 2))
            for tq in range(-(tj + tjp), tj + tjp + 1, 2):
                ms = [tm for tm in _mvals(tj) if abs(-tq - tm) <= tjp]
                ks = [tk for tk in ks_all if abs(tq) <= tk]
                if not ms:
                    continue
                e = []
                for tk in ks:
                    e.append(
                        factorial((tj + tjp + tk) // 2 + 1)
                        * factorial((tj + tjp - tk) // 2)
                        * factorial((tj - tjp + tk) // 2)
                        * factorial((-tj + tjp + tk) // 2)
                    )
                common = lcm(*e) if e else 1
                weights = np.array(
                    [(tk + 1) * _hfact(tk, tq) * (common // ek) for tk, ek in zip(ks, e)]
                    or [0],
                    dtype=object,
                )
                vec = np.zeros((len(ms), max(len(ks), 1)), dtype=object)
                for a, tm in enumerate(ms):
                    for b, tk in enumerate(ks):
                        vec[a, b] = three_jm_parts(tj, tjp, tk, tm, -tq - tm, tq)[0]
                gram = (vec * weights) @ vec.T
                for a, tm in enumerate(ms):
                    h = _hfact(tj, tm) * _hfact(tjp, -tq - tm)
                    for b in range(len(ms)):
                        res.checked += 1
                        z = gram[a, b]
                        ok = (h * z == common) if a == b else (z == 0)
                        if not ok:
                            res._fail((tj, tjp, tm, -tq - tm, ms[b], -tq - ms[b]))
    res.seconds = time.perf_counter() - t0
    return res


def barycenter_suite(max_two_j: int) -> SuiteResult:
    """Σ_m (-1)^{j-m}(j k j; -m q m) = sqrt(2j+1) δ_{k0}δ_{q0}.

    q ≠ 0 terms violate the magnetic selection rule individually; q = 0 terms
    share the radical k!/sqrt(E_k).
    """
    res = SuiteResult("barycenter", max_two_j)
    t0 = time.perf_counter()
    for tj in range(max_two_j + 1):
        for tk in range(0, 2 * tj + 1, 2):
            z = 0
            for tm in _mvals(tj):
                n = three_jm_parts(tj, tk, tj, -tm, 0, tm)[0]
                z += _sign((tj - tm) // 2) * n * _hfact(tj, tm)
            res.checked += 1
            if tk == 0:
                # z / sqrt((2j+1)!(2j)!) == sqrt(2j+1)
                ok = z > 0 and z * z == (tj + 1) * factorial(tj + 1) * factorial(tj)
            else:
                ok = z == 0
            if not ok:
                res._fail((tj, tk, 0))
    res.seconds = time.perf_counter() - t0
    return res


def contraction_suite(max_two_j: int, _flip=None) -> SuiteResult:
    """Σ_{mm'M}(-1)^{j-M}(j k j;-m q M)(j ℓ j;-M p m')(j K j;-m Q m')
    = (-1)^{2j-Q}(k ℓ K;-q -p Q){k ℓ K; j j j}.

    For every j, every (k, q), (ℓ, p) and every K with |Q| ≤ K ≤ 2j, where
    Q = q + p (other Q vanish by the selection rule).  K values that break the
    triangle with (k, ℓ) are included: both sides must then vanish.
    """
    res = SuiteResult("contraction", max_two_j)
    t0 = time.perf_counter()
    for tj in range(max_two_j + 1):
        ks = list(range(0, 2 * tj + 1, 2))  # twice-values of k = 0..2j
        ms = _mvals(tj)
        hf = {tm: _hfact(tj, tm) for tm in ms}
        kfac = {tk: factorial(tk // 2) ** 2 * factorial(tj - tk // 2) for tk in ks}
        c6 = {}
        for tk in ks:
            for tl in ks:
                for tbk in ks:
                    s, _ = six_j_parts(tk, tl, tbk, tj, tj, tj)
                    c6[tk, tl, tbk] = (
                        s * kfac[tk] * kfac[tl] * kfac[tbk] / factorial((tk + tl + tbk) // 2 + 1)
                    )
        qs = range(-2 * tj, 2 * tj + 1, 2)
        for tq in qs:
            for tp in qs:
                tbq = tq + tp
                kq = [tk for tk in ks if abs(tq) <= tk]
                lp = [tl for tl in ks if abs(tp) <= tl]
                bigk = [tk for tk in ks if abs(tbq) <= tk]
                if not kq or not lp or not bigk:
                    continue
                # m runs where m, M = m - q and m' = M - p are all in range
                mm = [tm for tm in ms if abs(tm - tq) <= tj and abs(tm - tq - tp) <= tj]
                if not mm:
                    # LHS is an empty sum; RHS must vanish as well
                    _contraction_compare(res, tj, tq, tp, kq, lp, bigk, None, c6, _flip)
                    continue
                a = np.empty((len(kq), len(mm)), dtype=object)
                b = np.empty((len(lp), len(mm)), dtype=object)
                c = np.empty((len(bigk), len(mm)), dtype=object)
                for col, tm in enumerate(mm):
                    tbm = tm - tq
                    tmp = tbm - tp
                    w = _sign((tj - tbm) // 2) * hf[tm] * hf[tbm] * hf[tmp]
                    for row, tk in enumerate(kq):
                        a[row, col] = three_jm_parts(tj, tk, tj, -tm, tq, tbm)[0]
                    for row, tl in enumerate(lp):
                        b[row, col] = w * three_jm_parts(tj, tl, tj, -tbm, tp, tmp)[0]
                    for row, tbk in enumerate(bigk):
                        c[row, col] = three_jm_parts(tj, tbk, tj, -tm, tbq, tmp)[0]
                z = (a[:, None, :] * b[None, :, :]) @ c.T
                _contraction_compare(res, tj, tq, tp, kq, lp, bigk, z, c6, _flip)
    res.seconds = time.perf_counter() - t0
    return res


def _contraction_compare(res, tj, tq, tp, kq, lp, bigk, z, c6, flip):
    tbq = tq + tp
    phase = _sign((2 * tj - tbq) // 2)
    for i, tk in enumerate(kq):
        for jj, tl in enumerate(lp):
            for kk, tbk in enumerate(bigk):
                res.checked += 1
                lhs = 0 if z is None else z[i, jj, kk]
                if flip is not None and flip == (tj, tk, tq, tl, tp, tbk):
                    lhs = -lhs
                n3 = three_jm_parts(tk, tl, tbk, -tq, -tp, tbq)[0] if _triangle_twice(tk, tl, tbk) else 0
                coef = c6[tk, tl, tbk]
                if n3 == 0 or coef == 0:
                    ok = lhs == 0
                else:
                    ok = lhs * coef.denominator == phase * n3 * coef.numerator
                if not ok:
                    res._fail((tj, tk, tq, tl, tp, tbk, tbq))


def exact_identity_suite(max_two_j: int) -> list[SuiteResult]:
    """Run all four exact sweeps for every twice-j up to ``max_two_j``."""
    return [
        orthogonality_mm_suite(max_two_j),
        orthogonality_kq_suite(max_two_j),
        barycenter_suite(max_two_j),
        contraction_suite(max_two_j),
    ]


# ---------------------------------------------------------------------------
# the same relations in double precision


def _record(res: SuiteResult, dev: float, tol: float, where) -> None:
    res.checked += 1
    res.residual = max(res.residual, dev)
    if dev > tol:
        res._fail(where)


def _float_orthogonality(max_two_j: int, tol: float, flip) -> list[SuiteResult]:
    mm = SuiteResult("orthogonality_mm", max_two_j, exact=False)
    kq = SuiteResult("orthogonality_kq", max_two_j, exact=False)
    for tj in range(max_two_j + 1):
        for tjp in range(max_two_j + 1):
            ks_all = list(range(abs(tj - tjp), tj + tjp + 1, 2))
            for tq in range(-(tj + tjp), tj + tjp + 1, 2):
                ks = [tk for tk in ks_all if abs(tq) <= tk]
                ms = [tm for tm in _mvals(tj) if abs(-tq - tm) <= tjp]
                if not ks or not ms:
                    continue
                a = np.array([[three_jm_float(tj, tjp, tk, tm, -tq - tm, tq) for tm in ms] for tk in ks])
                if flip == (tj, tjp, tq):
                    a[0, 0] = -a[0, 0]
                w = np.array([tk + 1 for tk in ks], dtype=float)
                dev = np.abs(a @ a.T - np.diag(1 / w))
                for i, j in zip(*np.nonzero(dev == dev.max())):
                    _record(mm, float(dev[i, j]), tol, (tj, tjp, ks[i], tq, ks[j], tq))
                    break
                mm.checked += dev.size - 1
                dev = np.abs((a.T * w) @ a - np.eye(len(ms)))
                _record(kq, float(dev.max()), tol, (tj, tjp, tq))
                kq.checked += dev.size - 1
    return [mm, kq]


def _float_barycenter(max_two_j: int, tol: float) -> SuiteResult:
    res = SuiteResult("barycenter", max_two_j, exact=False)
    for tj in range(max_two_j + 1):
        stack = basis_stack(tj)
        traces = np.einsum("nii->n", stack).real
        for n, (k, q) in enumerate(index_pairs(tj)):
            expected = np.sqrt(tj + 1) if k == 0 else 0.0
            _record(res, abs(traces[n] - expected), tol, (tj, 2 * k, 2 * q))
    return res


def _float_contraction(max_two_j: int, tol: float) -> SuiteResult:
    """The triple sum is Tr(u_kq u_lp u_KQ^T) for the real unit tensors."""
    res = SuiteResult("contraction", max_two_j, exact=False)
    for tj in range(max_two_j + 1):
        pairs = index_pairs(tj)
        stack = basis_stack(tj).real
        n, d = len(pairs), tj + 1
        flat = stack.reshape(n, d * d)
        six = {}
        for i, (k, q) in enumerate(pairs):
            lhs = np.einsum("ij,bjk->bik", stack[i], stack).reshape(n, d * d) @ flat.T
            for b, (l, p) in enumerate(pairs):
                for c, (big_k, big_q) in enumerate(pairs):
                    rhs = 0.0
                    if big_q == q + p and _triangle_twice(2 * k, 2 * l, 2 * big_k):
                        key = (k, l, big_k)
                        if key not in six:
                            six[key] = six_j_float(2 * k, 2 * l, 2 * big_k, tj, tj, tj)
                        phase = _sign((2 * tj - 2 * big_q) // 2)
                        rhs = phase * three_jm_float(2 * k, 2 * l, 2 * big_k, -2 * q, -2 * p, 2 * big_q) * six[key]
                    _record(res, abs(lhs[b, c] - rhs), tol, (tj, 2 * k, 2 * q, 2 * l, 2 * p, 2 * big_k, 2 * big_q))
    return res


def float_identity_suite(max_two_j: int, tol: float = 1e-12, _flip=None) -> list[SuiteResult]:
    """The four identity families in double precision, to tolerance ``tol``.

    Much faster than the exact sweeps at large j and a cross-check of the
    float symbol paths and unit-tensor matrices.
    """
    out = []
    t0 = time.perf_counter()
    out.extend(_float_orthogonality(max_two_j, tol, _flip))
    out.append(_float_barycenter(max_two_j, tol))
    out.append(_float_contraction(max_two_j, tol))
    dt = time.perf_counter() - t0
    for r in out:
        r.seconds = dt / len(out)
    return out
