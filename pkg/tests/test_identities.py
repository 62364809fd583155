import pytest

from racah_frames import identities


@pytest.mark.parametrize("max_two_j", [0, 1, 4, 8])
def test_suites_pass(max_two_j):
    for res in identities.exact_identity_suite(max_two_j):
        assert res.passed, (res.name, res.failures[:3])
        assert res.exact


def test_counts_grow_with_range():
    small = {r.name: r.checked for r in identities.exact_identity_suite(2)}
    large = {r.name: r.checked for r in identities.exact_identity_suite(4)}
    assert all(large[k] > small[k] > 0 for k in small)


def test_orthogonality_sign_flip_detected():
    res = identities.orthogonality_mm_suite(3, _flip=(2, 2, 0))
    assert not res.passed
    assert res.failures


def test_contraction_sign_flip_detected_and_located():
    res = identities.contraction_suite(3, _flip=(2, 2, 0, 2, 0, 0))
    assert not res.passed
    assert any(f[0] == 2 for f in res.failures if isinstance(f, tuple))


def test_suite_against_single_point_checks():
    # the batched integer reduction agrees with the surd-arithmetic route
    from racah_frames.wigner import identity_contraction, identity_orthogonality_mm

    for args in [(1, 1, 1, 0, 1, 0), ("3/2", "3/2", 2, 1, 2, 1), (2, 1, 3, 0, 3, 0)]:
        assert identity_orthogonality_mm(*args).passed
    for args in [("1/2", 1, 1, 1, 1, -1, 0), (1, 2, 1, 2, 1, 0, 1), ("3/2", 3, 2, 1, -2, 1, -1)]:
        assert identity_contraction(*args).passed


def test_float_suite_matches_exact_verdicts():
    for res in identities.float_identity_suite(6):
        assert res.passed and not res.exact, res.name
        assert res.residual < 1e-13


def test_float_suite_detects_flip():
    failed = {r.name for r in identities.float_identity_suite(2, _flip=(1, 1, 0)) if not r.passed}
    assert "orthogonality_mm" in failed
