import numpy as np
import pytest

from oracles import racah_3jm
from racah_frames.frame import (
    FrameVector,
    TensorCoefficients,
    check_conjugation,
    check_first_component,
    check_gram,
    check_informational_completeness,
    check_quadratic_system,
    check_rotational_invariance,
    check_sum_rule,
    devectorize,
    expand,
    expand_states,
    flat_index,
    gram,
    kq_from_index,
    mub_gram_target,
    reconstruct,
    sic_gram_target,
    structural_battery,
    vectorize,
)
from racah_frames.mub import build_prime_mubs, mub_coefficients
from racah_frames.sic import wh_orbit


def tetrahedron() -> np.ndarray:
    theta = np.arccos(1 / np.sqrt(3))
    fid = np.array([np.cos(theta / 2), np.exp(1j * np.pi / 4) * np.sin(theta / 2)])
    return wh_orbit(fid)


def random_hermitian(d, rng):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return a + a.conj().T


# ---------------------------------------------------------------------------
# indexing and round trips


@pytest.mark.parametrize("kq,one_based", [((0, 0), 1), ((1, 1), 4), ((2, -2), 5), ((1, -1), 2)])
def test_index_convention(kq, one_based):
    assert flat_index(*kq) + 1 == one_based
    assert kq_from_index(one_based - 1) == kq


def test_index_bijection():
    for i in range(81):
        assert flat_index(*kq_from_index(i)) == i


def test_identity_expansion():
    c = expand(np.eye(2))
    assert c[0, 0] == pytest.approx(np.sqrt(2))
    assert np.allclose(c.values[1:], 0)


def test_spin_half_up_projector():
    c = expand(np.diag([1.0, 0.0]))
    assert c[0, 0] == pytest.approx(1 / np.sqrt(2))
    # c_10 = 3 (-1)^{j-m} (1/2 1 1/2; -1/2 0 1/2) with m = 1/2
    sign, square = racah_3jm(1, 2, 1, -1, 0, 1)
    assert c[1, 0] == pytest.approx(3 * sign * np.sqrt(float(square)))
    assert c[1, 1] == 0 and c[1, -1] == 0


def test_reconstruct_examples():
    c = TensorCoefficients(1, [1 / np.sqrt(2), 0, 0, 0])
    assert np.allclose(reconstruct(c), np.eye(2) / 2)
    assert np.allclose(reconstruct(TensorCoefficients(2, np.zeros(9))), 0)


@pytest.mark.parametrize("two_j", range(0, 9))
def test_round_trips(two_j):
    rng = np.random.default_rng(two_j)
    d = two_j + 1
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    c = expand(a)
    assert np.max(np.abs(reconstruct(c) - a)) < 1e-12
    v = vectorize(c)
    assert np.max(np.abs(devectorize(v).values - c.values)) < 1e-12
    assert np.max(np.abs(expand(reconstruct(c)).values - c.values)) < 1e-12


def test_state_expansion_matches_operator_expansion():
    rng = np.random.default_rng(1)
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi /= np.linalg.norm(psi)
    a = expand_states(psi[None, :], 3)[0]
    b = expand(np.outer(psi, psi.conj()))
    assert np.allclose(a.values, b.values, atol=1e-14)


def test_dimension_errors():
    with pytest.raises(ValueError):
        expand(np.eye(3), two_j=1)
    with pytest.raises(ValueError):
        FrameVector(1, np.zeros(3))
    with pytest.raises(ValueError):
        expand(np.zeros((2, 3)))


def test_frame_vector_one_based_access():
    v = vectorize(expand(np.eye(2) / 2))
    assert v[1] == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(IndexError):
        v[0]


# ---------------------------------------------------------------------------
# gram


def test_tetrahedron_gram():
    vecs = [vectorize(c) for c in expand_states(tetrahedron(), 1)]
    rep = gram(vecs, sic_gram_target(2))
    assert rep.max_deviation < 1e-14
    off = rep.matrix[~np.eye(4, dtype=bool)]
    assert np.allclose(off, 1 / 3)
    assert np.allclose(np.sort(rep.eigen_spectrum), [2 / 3, 2 / 3, 2 / 3, 2])


def test_mub_gram_d2():
    m = build_prime_mubs(2)
    vecs = [vectorize(c) for c in mub_coefficients(m)]
    rep = gram(vecs, mub_gram_target(2, m.labels))
    assert rep.max_deviation < 1e-14


def test_single_vector_gram():
    v = vectorize(expand(np.diag([1.0, 0.0, 0.0])))
    rep = gram([v])
    assert rep.matrix.shape == (1, 1) and rep.matrix[0, 0] == pytest.approx(1)


def test_gram_rejects_empty():
    with pytest.raises(ValueError):
        gram([])


def test_sic_gram_spectrum_property():
    for d in range(2, 7):
        eig = np.linalg.eigvalsh(sic_gram_target(d))
        assert np.allclose(np.sort(eig), sorted([d] + [d / (d + 1)] * (d * d - 1)), atol=1e-8)


# ---------------------------------------------------------------------------
# single checks


def test_first_component():
    assert check_first_component(expand(np.diag([1.0, 0.0]))).passed
    assert check_first_component(expand(np.diag([0, 1.0, 0]))).passed
    assert not check_first_component(expand(np.diag([1.0, -1.0]))).passed  # traceless


def test_conjugation():
    rng = np.random.default_rng(2)
    assert check_conjugation(expand(random_hermitian(3, rng))).passed
    shift = np.diag([1.0, 1.0], k=1)
    assert not check_conjugation(expand(shift)).passed
    real_diag = expand(np.diag([0.2, 0.3, 0.5]))
    assert check_conjugation(real_diag).passed
    assert all(abs(v) < 1e-15 for (k, q), v in real_diag.items() if q != 0)


def test_rotational_invariance_pairs():
    cs = expand_states(tetrahedron(), 1)
    assert check_rotational_invariance((cs[0], cs[0]), 1.0).passed
    assert check_rotational_invariance((cs[0], cs[2]), 1 / 3).passed
    m = build_prime_mubs(3)
    mc = mub_coefficients(m)
    assert check_rotational_invariance((mc[0], mc[1]), 0.0).passed  # same basis
    assert check_rotational_invariance((mc[0], mc[3]), 1 / 3).passed


def test_invariant_normalization_reconciles_with_hermitian_product():
    # [(2j+1) δ + 1] / (2(j+1)) is (d δ + 1)/(d + 1): diagonal 1, off-diagonal 1/(d+1)
    for d in range(2, 6):
        two_j = d - 1
        assert ((two_j + 1) + 1) / (2 * (two_j / 2 + 1)) == pytest.approx(1.0)
        assert 1 / (2 * (two_j / 2 + 1)) == pytest.approx(1 / (d + 1))


def test_quadratic_system():
    for two_j in range(0, 5):
        d = two_j + 1
        for m in range(d):
            p = np.zeros((d, d))
            p[m, m] = 1
            check = check_quadratic_system(expand(p))
            assert check.passed
            assert check.details["K0_residual"] < 1e-12
    assert not check_quadratic_system(expand(np.eye(2) / 2)).passed


def test_quadratic_k0_is_normalization():
    from racah_frames.frame import quadratic_residuals

    rng = np.random.default_rng(4)
    psi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    for scale in (1.0, 1.3):
        c = expand_states((scale * psi / np.linalg.norm(psi))[None, :], 2)[0]
        v = vectorize(c).components
        k0 = quadratic_residuals([c])[0, 0]
        # the K = 0 equation reads c_00 = ||v||^2 / sqrt(2j+1); with
        # c_00 = 1/sqrt(2j+1) that is exactly ||v||^2 = 1
        assert k0 == pytest.approx(c[0, 0] - np.vdot(v, v).real / np.sqrt(3), abs=1e-12)
        assert (abs(k0) < 1e-12) == (scale == 1.0)


def test_sum_rule():
    cs = expand_states(tetrahedron(), 1)
    assert check_sum_rule(cs, weight=2).passed
    assert not check_sum_rule(cs[:3], weight=2).passed


def test_mub_sum_rule_weight_is_d_plus_one():
    # The projectors of d + 1 complete bases sum to (d + 1) I, so the factor
    # multiplying (-1)^(j-m) δ_mm' is d + 1; the factor 2d does not hold.
    mc = mub_coefficients(build_prime_mubs(3))
    assert check_sum_rule(mc, weight=4).passed
    literal = check_sum_rule(mc, weight=2 * 3)
    assert not literal.passed
    assert literal.residual == pytest.approx(2.0)


def test_gram_check_localizes():
    states = tetrahedron()
    states[2] = np.array([1.0, 0.0])
    c = check_gram(expand_states(states, 1), sic_gram_target(2))
    assert not c.passed
    assert 2 in c.where


def test_informational_completeness():
    tet = [vectorize(c) for c in expand_states(tetrahedron(), 1)]
    assert check_informational_completeness(tet).details["rank"] == 4
    assert not check_informational_completeness(tet[:3]).passed
    mub = [vectorize(c) for c in mub_coefficients(build_prime_mubs(2))]
    assert check_informational_completeness(mub).details["rank"] == 4


def test_degenerate_dimension_one():
    c = expand(np.eye(1))
    report = structural_battery([c], np.ones((1, 1)), weight=1.0)
    assert report.passed
