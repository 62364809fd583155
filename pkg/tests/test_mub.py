from fractions import Fraction

import numpy as np
import pytest

from conftest import perturb_member
from racah_frames.frame import check_rotational_invariance, mub_gram_target, structural_battery
from racah_frames.mub import (
    MubSet,
    build_prime_mubs,
    closed_form_dkq,
    is_prime,
    mub_battery,
    mub_coefficients,
    verify_mubs,
)
from racah_frames.tensor import index_pairs

PRIMES = [2, 3, 5, 7, 11, 13]


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


@pytest.mark.parametrize("d", [1, 4, 6, 9, 15])
def test_non_prime_rejected(d):
    with pytest.raises(ValueError, match="d must be prime"):
        build_prime_mubs(d)


def test_d2_structure():
    m = build_prime_mubs(2)
    assert m.bases.shape == (3, 2, 2)
    assert np.allclose(m.bases[0, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert np.array_equal(m.bases[2], np.eye(2)[::-1])  # α = j + m, rows ordered m = j..-j
    s = m.states()
    cross = np.abs(s[:2].conj() @ s[2:4].T) ** 2
    assert np.allclose(cross, 0.5)
    # half-integer exponent at a = 1 gives the σ_y eigenbasis: phase i
    assert np.isclose(m.bases[1, 0, 0] / m.bases[1, 0, 1], -1j) or np.isclose(m.bases[1, 0, 0] / m.bases[1, 0, 1], 1j)
    assert m.omega_phase == Fraction(1, 2)


@pytest.mark.parametrize("d", PRIMES)
def test_build_verify_and_battery(d):
    m = build_prime_mubs(d)
    assert m.bases.shape == (d + 1, d, d)
    assert verify_mubs(m).passed
    assert mub_battery(m).passed


def test_d3_overlap_table_size():
    rep = verify_mubs(build_prime_mubs(3))
    assert rep["mub_overlaps"].passed


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_dual_route(d):
    m = build_prime_mubs(d)
    coeffs = mub_coefficients(m)
    worst = 0.0
    for c in coeffs:
        a, alpha = c.label
        for i, (k, q) in enumerate(index_pairs(d - 1)):
            worst = max(worst, abs(c.values[i] - closed_form_dkq(d, a, alpha, k, q)))
    assert worst <= 1e-12


def test_closed_form_examples():
    assert closed_form_dkq(5, 1, 2, 0, 0) == pytest.approx(1 / np.sqrt(5))
    assert closed_form_dkq(5, 5, 3, 2, 1) == 0
    c = mub_coefficients(build_prime_mubs(5))
    member = next(x for x in c if x.label == (1, 2))
    assert abs(member[2, 1] - closed_form_dkq(5, 1, 2, 2, 1)) < 1e-12


def test_computational_basis_has_only_q0():
    c = mub_coefficients(build_prime_mubs(5))
    for x in c:
        if x.label[0] == 5:
            assert all(abs(v) < 1e-15 for (k, q), v in x.items() if q != 0)


def test_truncated_set_fails_only_sum_rule():
    m = build_prime_mubs(3)
    truncated = MubSet(m.two_j, m.bases[:-1])
    coeffs = mub_coefficients(truncated)
    rep = structural_battery(coeffs, mub_gram_target(3, truncated.labels), weight=4)
    assert [c.name for c in rep.failed()] == ["sum_rule"]
    assert not verify_mubs(truncated)["identity_decomposition"].passed


def test_dephased_component_shifts_invariant_at_order_eps():
    m = build_prime_mubs(3)
    eps = 1e-3
    bases = m.bases.copy()
    bases[0, 0, 0] *= np.exp(1j * eps)
    coeffs = mub_coefficients(MubSet(2, bases))
    dev = abs(check_rotational_invariance((coeffs[0], coeffs[3]), 1 / 3).residual)
    assert 1e-5 < dev < 1e-2


def test_random_replacement_localized():
    m = build_prime_mubs(5)
    s = m.states().copy()
    rng = np.random.default_rng(0)
    v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    s[7] = v / np.linalg.norm(v)
    rep = verify_mubs(MubSet(4, s.reshape(6, 5, 5)))
    assert not rep.passed
    assert (1, 2) in rep["mub_overlaps"].where


def test_unitary_perturbation_fails_battery():
    m = build_prime_mubs(3)
    bad = MubSet(2, perturb_member(m.states(), 4).reshape(4, 3, 3))
    assert not verify_mubs(bad).passed
    rep = mub_battery(bad)
    assert not rep.passed
    assert (1, 1) in rep["rotational_invariance"].where
