import os

import numpy as np
import pytest

from conftest import perturb_member
from racah_frames.frame import gram, sic_gram_target, vectorize
from racah_frames.sic import (
    SearchConfig,
    SicCandidate,
    overlap_residual,
    search_fiducial,
    shift_clock,
    sic_battery,
    sic_coefficients,
    verify_sic,
    wh_orbit,
)


def tetrahedron_fiducial():
    theta = np.arccos(1 / np.sqrt(3))
    return np.array([np.cos(theta / 2), np.exp(1j * np.pi / 4) * np.sin(theta / 2)])


def test_orbit_matches_operator_powers():
    rng = np.random.default_rng(0)
    for d in (2, 3, 5):
        psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi /= np.linalg.norm(psi)
        x, z = shift_clock(d)
        orbit = wh_orbit(psi)
        assert orbit.shape == (d * d, d)
        for a in range(d):
            for b in range(d):
                ref = np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b) @ psi
                assert np.allclose(orbit[a * d + b], ref)
        assert np.allclose(np.linalg.norm(orbit, axis=1), 1, atol=1e-15)


def test_orbit_rejects_non_unit():
    with pytest.raises(ValueError):
        wh_orbit(np.array([1.0, 1.0]))


def test_basis_vector_fiducial_is_degenerate():
    orbit = wh_orbit(np.array([1.0, 0.0]))
    assert overlap_residual(orbit) > 0.5


def test_tetrahedron():
    cand = SicCandidate(1, wh_orbit(tetrahedron_fiducial()))
    assert overlap_residual(cand.states) < 1e-12
    assert verify_sic(cand).passed
    rep = sic_battery(cand, tol=1e-12)
    assert rep.passed
    vecs = [vectorize(c) for c in sic_coefficients(cand)]
    assert gram(vecs, sic_gram_target(2)).max_deviation < 1e-14


def test_padded_basis_fails_with_location():
    states = np.vstack([np.eye(2), np.eye(2)]).astype(complex)
    rep = verify_sic(SicCandidate(1, states))
    assert not rep.passed
    assert rep["trace_condition"].where is not None


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(d=0)
    with pytest.raises(ValueError):
        SearchConfig(d=3, tolerance=0)
    with pytest.raises(ValueError):
        SearchConfig(d=3, restarts=0)


def test_trivial_dimension():
    cand = search_fiducial(d=1)
    assert cand.converged and cand.residual == 0
    assert cand.states.shape == (1, 1)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_search_converges(d):
    cand = search_fiducial(d=d)
    assert cand.converged
    assert cand.residual < 1e-8
    # the stored residual is recomputed from the states, not cached
    assert cand.residual == overlap_residual(cand.states)
    assert verify_sic(cand).passed
    assert sic_battery(cand).passed
    vecs = [vectorize(c) for c in sic_coefficients(cand)]
    assert gram(vecs, sic_gram_target(d)).max_deviation <= 10 * max(cand.residual, 1e-15)


def test_gauge_fixed_fiducial():
    cand = search_fiducial(d=4)
    fid = cand.fiducial
    assert fid[0].imag == 0 and fid[0].real >= 0
    assert np.allclose(cand.states[0], fid)


@pytest.mark.parametrize("d", [2, 3])
def test_free_mode(d):
    cand = search_fiducial(d=d, covariant=False, restarts=5)
    assert cand.converged
    assert cand.fiducial is None
    assert verify_sic(cand).passed


def test_deterministic_and_thread_independent(monkeypatch):
    monkeypatch.setenv("RACAH_FRAMES_THREADS", "1")
    a = search_fiducial(d=4, seed=7)
    monkeypatch.setenv("RACAH_FRAMES_THREADS", "3")
    b = search_fiducial(d=4, seed=7)
    assert np.array_equal(a.states, b.states)
    assert a.provenance["restart"] == b.provenance["restart"]


def test_non_convergence_is_flagged():
    cand = search_fiducial(d=4, restarts=1, max_iterations=1)
    assert not cand.converged
    assert cand.residual > 1e-8
    assert not verify_sic(cand).passed


def test_perturbed_member_fails_battery():
    cand = search_fiducial(d=3)
    bad = SicCandidate(2, perturb_member(cand.states, 5))
    rep = sic_battery(bad)
    assert not rep.passed
    failed = {c.name for c in rep.failed()}
    assert {"rotational_invariance", "sum_rule"} <= failed
    # a unitary perturbation keeps each member a pure projector
    assert rep["quadratic_system"].passed
    assert 5 in rep["rotational_invariance"].where
    assert not verify_sic(bad).passed
