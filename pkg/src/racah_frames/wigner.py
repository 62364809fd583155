"""Exact Wigner 3-jm and 6-j symbols.

Angular momenta are handled as *twice* their value so that every quantity is
an integer.  Symbols are evaluated with Racah's single-sum formula written in
binomial form: the alternating sum is an exact integer and the remaining
factorial prefactor sits under one square root, so a symbol is returned as
``sign * sqrt(rational)`` without any loss.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

__all__ = [
    "HalfInt",
    "SignedSqrtRational",
    "SurdSum",
    "NonExactSum",
    "QuantumNumberError",
    "IdentityCheck",
    "as_twice",
    "triangle",
    "three_jm",
    "six_j",
    "three_jm_float",
    "six_j_float",
    "identity_orthogonality_mm",
    "identity_orthogonality_kq",
    "identity_barycenter",
    "identity_contraction",
]


class QuantumNumberError(ValueError):
    """Raised for malformed (j, m) input, e.g. a parity mismatch."""


@dataclass(frozen=True, order=True)
class HalfInt:
    """An integer or half-integer, stored as twice its value."""

    twice: int

    @classmethod
    def parse(cls, value) -> "HalfInt":
        return cls(as_twice(value))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __float__(self) -> float:
        return self.twice / 2

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def as_twice(value) -> int:
    """Return twice ``value`` as an exact integer.

    Accepts :class:`HalfInt`, ints, :class:`fractions.Fraction`, integral or
    half-integral floats and strings such as ``"3/2"`` or ``"-1"``.
    """
    if isinstance(value, HalfInt):
        return value.twice
    if isinstance(value, bool):
        raise TypeError("booleans are not quantum numbers")
    if isinstance(value, int):
        return 2 * value
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, float):
        if not math.isfinite(value) or (2 * value) != int(2 * value):
            raise QuantumNumberError(f"{value!r} is not a half-integer")
        return int(2 * value)
    if isinstance(value, _RationalABC):
        t = 2 * Fraction(value)
        if t.denominator != 1:
            raise QuantumNumberError(f"{value} is not a half-integer")
        return t.numerator
    raise TypeError(f"cannot interpret {value!r} as a half-integer")


# ---------------------------------------------------------------------------
# exact values


@dataclass(frozen=True)
class SignedSqrtRational:
    """The exact number ``sign * sqrt(square)`` with ``square`` rational."""

    sign: int
    square: Fraction

    def __post_init__(self):
        square = Fraction(self.square)
        object.__setattr__(self, "square", square)
        if square < 0:
            raise ValueError("square must be nonnegative")
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if (self.sign == 0) != (square == 0):
            raise ValueError("sign is zero exactly when square is zero")

    @classmethod
    def zero(cls) -> "SignedSqrtRational":
        return cls(0, Fraction(0))

    @classmethod
    def from_rational(cls, value) -> "SignedSqrtRational":
        value = Fraction(value)
        return cls((value > 0) - (value < 0), value * value)

    @classmethod
    def from_parts(cls, coeff, radicand) -> "SignedSqrtRational":
        """Build ``coeff * sqrt(radicand)``."""
        coeff = Fraction(coeff)
        radicand = Fraction(radicand)
        if coeff == 0 or radicand == 0:
            return cls.zero()
        return cls(1 if coeff > 0 else -1, coeff * coeff * radicand)

    def is_zero(self) -> bool:
        return self.sign == 0

    def __bool__(self) -> bool:
        return self.sign != 0

    def __neg__(self) -> "SignedSqrtRational":
        return SignedSqrtRational(-self.sign, self.square)

    def __mul__(self, other):
        if isinstance(other, SignedSqrtRational):
            return SignedSqrtRational(self.sign * other.sign, self.square * other.square)
        if isinstance(other, (int, Fraction)):
            return self * SignedSqrtRational.from_rational(other)
        return NotImplemented

    __rmul__ = __mul__

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        sq = self.square
        try:
            return self.sign * math.sqrt(float(sq))
        except OverflowError:
            return self.sign * math.exp(0.5 * (math.log(sq.numerator) - math.log(sq.denominator)))

    def as_rational(self) -> Fraction | None:
        """The value as a Fraction when it is rational, else None."""
        num, den = self.square.numerator, self.square.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return self.sign * Fraction(rn, rd)
        return None

    def radical_form(self) -> tuple[Fraction, int]:
        """Return ``(c, s)`` with value ``c * sqrt(s)`` and ``s`` squarefree.

        Raises NonExactSum if the radicand could not be reduced (only possible
        when it carries a prime factor beyond the trial-division bound).
        """
        if self.sign == 0:
            return Fraction(0), 1
        num, den = self.square.numerator, self.square.denominator
        # sqrt(num/den) = sqrt(num*den)/den
        out, free = _split_square(num * den)
        return self.sign * Fraction(out, den), free

    def __str__(self) -> str:
        if self.sign == 0:
            return "0"
        rational = self.as_rational()
        if rational is not None:
            return str(rational)
        return f"{'+' if self.sign > 0 else '-'}sqrt({self.square})"

    def __repr__(self) -> str:
        return f"SignedSqrtRational({self})"


class NonExactSum(ArithmeticError):
    """A surd could not be reduced to squarefree form exactly."""


_TRIAL_PRIMES_LIMIT = 2000


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    sieve = bytearray([1]) * (_TRIAL_PRIMES_LIMIT + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(_TRIAL_PRIMES_LIMIT) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def _split_square(n: int) -> tuple[int, int]:
    """Write ``n = out**2 * free`` with ``free`` squarefree."""
    if n == 0:
        return 0, 1
    out, free = 1, 1
    for p in _trial_primes():
        if n % p:
            continue
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out *= p ** (e // 2)
        if e % 2:
            free *= p
        if n == 1:
            return out, free
    root = math.isqrt(n)
    if root * root != n:
        raise NonExactSum("radicand has an unresolved large prime factor")
    return out * root, free


class SurdSum:
    """Exact sum of surds, grouped by squarefree radical.

    Square roots of distinct squarefree integers are linearly independent over
    the rationals, so two sums are equal exactly when their groups agree.
    """

    def __init__(self, terms=()):
        self._groups: dict[int, Fraction] = {}
        for t in terms:
            self.add(t)

    def add(self, value: SignedSqrtRational) -> None:
        if value.sign == 0:
            return
        coeff, free = value.radical_form()
        total = self._groups.get(free, Fraction(0)) + coeff
        if total:
            self._groups[free] = total
        else:
            self._groups.pop(free, None)

    def groups(self) -> dict[int, Fraction]:
        return dict(self._groups)

    def single(self) -> SignedSqrtRational:
        """The sum as one SignedSqrtRational; fails if several radicals remain."""
        if not self._groups:
            return SignedSqrtRational.zero()
        if len(self._groups) > 1:
            raise NonExactSum("sum does not collapse to a single radical")
        ((free, coeff),) = self._groups.items()
        return SignedSqrtRational.from_parts(coeff, free)

    def __eq__(self, other) -> bool:
        if isinstance(other, SignedSqrtRational):
            other = SurdSum([other])
        if not isinstance(other, SurdSum):
            return NotImplemented
        return self._groups == other._groups

    def __float__(self) -> float:
        return float(sum(float(c) * math.sqrt(s) for s, c in self._groups.items()))


# ---------------------------------------------------------------------------
# factorial / binomial tables

_fact_lock = threading.Lock()
_factorials: list[int] = [1]


def factorial(n: int) -> int:
    """Cached n!; the table only grows, under a lock."""
    table = _factorials
    if n < len(table):
        return table[n]
    if n < 0:
        raise ValueError("negative factorial")
    with _fact_lock:
        while len(_factorials) <= n:
            _factorials.append(_factorials[-1] * len(_factorials))
    return _factorials[n]


# ---------------------------------------------------------------------------
# triangle and symbols


def _triangle_twice(ta: int, tb: int, tc: int) -> bool:
    if ta < 0 or tb < 0 or tc < 0:
        return False
    if (ta + tb + tc) % 2:
        return False
    return abs(ta - tb) <= tc <= ta + tb


def triangle(a, b, c) -> int:
    """Δ(a, b, c): 1 if a, b, c close a triangle with integer perimeter, else 0."""
    return int(_triangle_twice(as_twice(a), as_twice(b), as_twice(c)))


def _check_pair(tj: int, tm: int) -> None:
    if tj < 0:
        raise QuantumNumberError(f"negative angular momentum {HalfInt(tj)}")
    if (tj - tm) % 2:
        raise QuantumNumberError(
            f"j={HalfInt(tj)} and m={HalfInt(tm)} differ by a non-integer"
        )


@lru_cache(maxsize=1 << 20)
def three_jm_parts(tj1: int, tj2: int, tj3: int, tm1: int, tm2: int, tm3: int) -> tuple[int, Fraction]:
    """Return ``(n, r)`` with ``(j1 j2 j3; m1 m2 m3) = n * sqrt(r)``.

    ``n`` is a signed integer (the binomial Racah sum including the phase) and
    ``r`` the factorial prefactor.  Arguments are twice-values and are assumed
    to satisfy the (j, m) parity rule.
    """
    if tm1 + tm2 + tm3 != 0:
        return 0, Fraction(0)
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return 0, Fraction(0)
    if not _triangle_twice(tj1, tj2, tj3):
        return 0, Fraction(0)
    a = (tj1 + tj2 - tj3) // 2
    b = (tj1 - tj2 + tj3) // 2
    c = (-tj1 + tj2 + tj3) // 2
    big_j = (tj1 + tj2 + tj3) // 2
    j1_minus_m1 = (tj1 - tm1) // 2
    j2_plus_m2 = (tj2 + tm2) // 2
    t_lo = max(0, j1_minus_m1 - b, j2_plus_m2 - c)
    t_hi = min(a, j1_minus_m1, j2_plus_m2)
    comb = math.comb
    total = 0
    for t in range(t_lo, t_hi + 1):
        term = comb(a, t) * comb(b, j1_minus_m1 - t) * comb(c, j2_plus_m2 - t)
        total += -term if t % 2 else term
    if total == 0:
        return 0, Fraction(0)
    if ((tj1 - tj2 - tm3) // 2) % 2:
        total = -total
    factorial(big_j + 1)
    f = _factorials
    num = (
        f[(tj1 + tm1) // 2] * f[(tj1 - tm1) // 2]
        * f[(tj2 + tm2) // 2] * f[(tj2 - tm2) // 2]
        * f[(tj3 + tm3) // 2] * f[(tj3 - tm3) // 2]
    )
    den = f[big_j + 1] * f[a] * f[b] * f[c]
    return total, Fraction(num, den)


def three_jm(j1, j2, j3, m1, m2, m3) -> SignedSqrtRational:
    """Exact Wigner 3-jm symbol (j1 j2 j3; m1 m2 m3).

    Quantum numbers may be given as ints, Fractions, ``"p/2"`` strings or
    :class:`HalfInt`.  Zero is returned for any selection-rule violation; a
    (j, m) pair of mismatched parity raises :class:`QuantumNumberError`.
    """
    tw = [as_twice(x) for x in (j1, j2, j3, m1, m2, m3)]
    for tj, tm in zip(tw[:3], tw[3:]):
        _check_pair(tj, tm)
    n, r = three_jm_parts(*tw)
    return SignedSqrtRational.from_parts(n, r)


def _delta_sq(ta: int, tb: int, tc: int) -> Fraction:
    a, b, c = (ta + tb - tc) // 2, (ta - tb + tc) // 2, (-ta + tb + tc) // 2
    return Fraction(
        factorial(a) * factorial(b) * factorial(c), factorial((ta + tb + tc) // 2 + 1)
    )


@lru_cache(maxsize=1 << 18)
def six_j_parts(tj1: int, tj2: int, tj3: int, tj4: int, tj5: int, tj6: int) -> tuple[Fraction, Fraction]:
    """Return ``(s, r)`` with ``{j1 j2 j3; j4 j5 j6} = s * sqrt(r)``."""
    triads = ((tj1, tj2, tj3), (tj1, tj5, tj6), (tj4, tj2, tj6), (tj4, tj5, tj3))
    if not all(_triangle_twice(*t) for t in triads):
        return Fraction(0), Fraction(0)
    alphas = [sum(t) // 2 for t in triads]
    betas = [
        (tj1 + tj2 + tj4 + tj5) // 2,
        (tj2 + tj3 + tj5 + tj6) // 2,
        (tj3 + tj1 + tj6 + tj4) // 2,
    ]
    total = Fraction(0)
    for t in range(max(alphas), min(betas) + 1):
        den = 1
        for al in alphas:
            den *= factorial(t - al)
        for be in betas:
            den *= factorial(be - t)
        term = Fraction(factorial(t + 1), den)
        total += -term if t % 2 else term
    if total == 0:
        return Fraction(0), Fraction(0)
    radicand = Fraction(1)
    for t in triads:
        radicand *= _delta_sq(*t)
    return total, radicand


def six_j(j1, j2, j3, j4, j5, j6) -> SignedSqrtRational:
    """Exact Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}."""
    tw = [as_twice(x) for x in (j1, j2, j3, j4, j5, j6)]
    for tj in tw:
        if tj < 0:
            raise QuantumNumberError(f"negative angular momentum {HalfInt(tj)}")
    s, r = six_j_parts(*tw)
    return SignedSqrtRational.from_parts(s, r)


def three_jm_float(tj1: int, tj2: int, tj3: int, tm1: int, tm2: int, tm3: int) -> float:
    """Float value of a 3-jm symbol from twice-values (no parity check)."""
    n, r = three_jm_parts(tj1, tj2, tj3, tm1, tm2, tm3)
    if n == 0:
        return 0.0
    return n * math.sqrt(r.numerator / r.denominator)


def six_j_float(tj1: int, tj2: int, tj3: int, tj4: int, tj5: int, tj6: int) -> float:
    s, r = six_j_parts(tj1, tj2, tj3, tj4, tj5, tj6)
    if s == 0:
        return 0.0
    return s.numerator / s.denominator * math.sqrt(r.numerator / r.denominator)


# ---------------------------------------------------------------------------
# single-point identity checks


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of an identity, evaluated exactly."""

    name: str
    lhs: SignedSqrtRational
    rhs: SignedSqrtRational
    passed: bool
    exact: bool = True


def _to_decimal(value: SignedSqrtRational) -> Decimal:
    if value.sign == 0:
        return Decimal(0)
    sq = value.square
    return value.sign * (Decimal(sq.numerator) / Decimal(sq.denominator)).sqrt()


def _sum_exact(terms) -> tuple[SignedSqrtRational, bool]:
    terms = list(terms)
    acc = SurdSum()
    try:
        for t in terms:
            acc.add(t)
        return acc.single(), True
    except NonExactSum:
        pass
    # fallback: 40-digit decimal sum, flagged as not exact
    with localcontext() as ctx:
        ctx.prec = 40
        total = sum((_to_decimal(t) for t in terms), Decimal(0))
    return SignedSqrtRational.from_rational(Fraction(total)), False


def _finish(name, lhs, rhs, exact) -> IdentityCheck:
    if exact:
        passed = lhs == rhs
    else:
        with localcontext() as ctx:
            ctx.prec = 40
            passed = abs(_to_decimal(lhs) - _to_decimal(rhs)) < Decimal("1e-20")
    return IdentityCheck(name, lhs, rhs, passed, exact)


def _mrange(tj: int):
    return range(-tj, tj + 1, 2)


def identity_orthogonality_mm(j, jp, k, q, l, p) -> IdentityCheck:
    """Σ_{m m'} (j j' k; m m' q)(j j' ℓ; m m' p) = δ_{kℓ} δ_{qp} Δ(j,j',k)/(2k+1)."""
    tj, tjp, tk, tq, tl, tp = (as_twice(x) for x in (j, jp, k, q, l, p))
    _check_pair(tk, tq)
    _check_pair(tl, tp)
    terms = []
    for tm in _mrange(tj):
        for tmp in _mrange(tjp):
            a = three_jm(HalfInt(tj), HalfInt(tjp), HalfInt(tk), HalfInt(tm), HalfInt(tmp), HalfInt(tq))
            b = three_jm(HalfInt(tj), HalfInt(tjp), HalfInt(tl), HalfInt(tm), HalfInt(tmp), HalfInt(tp))
            if a and b:
                terms.append(a * b)
    lhs, exact = _sum_exact(terms)
    rhs = Fraction(0)
    if tk == tl and tq == tp and _triangle_twice(tj, tjp, tk):
        rhs = Fraction(1, tk + 1)  # 1/(2k+1) with tk = 2k
    return _finish("orthogonality_mm", lhs, SignedSqrtRational.from_rational(rhs), exact)


def identity_orthogonality_kq(j, jp, m, mp, big_m, big_mp) -> IdentityCheck:
    """Σ_{k q} (2k+1)(j j' k; m m' q)(j j' k; M M' q) = δ_{mM} δ_{m'M'}."""
    tj, tjp, tm, tmp, tbm, tbmp = (as_twice(x) for x in (j, jp, m, mp, big_m, big_mp))
    for tjj, tmm in ((tj, tm), (tjp, tmp), (tj, tbm), (tjp, tbmp)):
        _check_pair(tjj, tmm)
    terms = []
    for tk in range(abs(tj - tjp), tj + tjp + 1, 2):
        for tq in _mrange(tk):
            a = three_jm(HalfInt(tj), HalfInt(tjp), HalfInt(tk), HalfInt(tm), HalfInt(tmp), HalfInt(tq))
            b = three_jm(HalfInt(tj), HalfInt(tjp), HalfInt(tk), HalfInt(tbm), HalfInt(tbmp), HalfInt(tq))
            if a and b:
                terms.append(a * b * (tk + 1))
    lhs, exact = _sum_exact(terms)
    rhs = int(tm == tbm and tmp == tbmp and abs(tm) <= tj and abs(tmp) <= tjp)
    return _finish("orthogonality_kq", lhs, SignedSqrtRational.from_rational(rhs), exact)


def identity_barycenter(j, k, q) -> IdentityCheck:
    """Σ_m (-1)^{j-m} (j k j; -m q m) = sqrt(2j+1) δ_{k0} δ_{q0} Δ(j,k,j)."""
    tj, tk, tq = (as_twice(x) for x in (j, k, q))
    _check_pair(tk, tq)
    terms = []
    for tm in _mrange(tj):
        v = three_jm(HalfInt(tj), HalfInt(tk), HalfInt(tj), HalfInt(-tm), HalfInt(tq), HalfInt(tm))
        if v:
            terms.append(-v if ((tj - tm) // 2) % 2 else v)
    lhs, exact = _sum_exact(terms)
    if tk == 0 and tq == 0 and tj >= 0:
        rhs = SignedSqrtRational(1, Fraction(tj + 1))
    else:
        rhs = SignedSqrtRational.zero()
    return _finish("barycenter", lhs, rhs, exact)


def identity_contraction(j, k, l, big_k, q, p, big_q) -> IdentityCheck:
    """Σ_{m m' M} (-1)^{j-M} (j k j; -m q M)(j ℓ j; -M p m')(j K j; -m Q m')
    = (-1)^{2j-Q} (k ℓ K; -q -p Q) {k ℓ K; j j j}."""
    tj, tk, tl, tbk, tq, tp, tbq = (as_twice(x) for x in (j, k, l, big_k, q, p, big_q))
    for tjj, tmm in ((tk, tq), (tl, tp), (tbk, tbq)):
        _check_pair(tjj, tmm)
    h = HalfInt
    terms = []
    for tm in _mrange(tj):
        for tbm in _mrange(tj):
            a = three_jm(h(tj), h(tk), h(tj), h(-tm), h(tq), h(tbm))
            if not a:
                continue
            for tmp in _mrange(tj):
                b = three_jm(h(tj), h(tl), h(tj), h(-tbm), h(tp), h(tmp))
                c = three_jm(h(tj), h(tbk), h(tj), h(-tm), h(tbq), h(tmp))
                if b and c:
                    t = a * b * c
                    terms.append(-t if ((tj - tbm) // 2) % 2 else t)
    lhs, exact = _sum_exact(terms)
    rhs = three_jm(h(tk), h(tl), h(tbk), h(-tq), h(-tp), h(tbq)) * six_j(h(tk), h(tl), h(tbk), h(tj), h(tj), h(tj))
    if ((2 * tj - tbq) // 2) % 2:
        rhs = -rhs
    return _finish("contraction", lhs, rhs, exact)
