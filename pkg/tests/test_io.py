import json

import numpy as np
import pytest

from racah_frames.io import (
    FamilyFile,
    Member,
    SchemaError,
    attach_coefficients,
    coefficient_index,
    dumps,
    family_from_mubs,
    family_from_sic,
    mubs_from_family,
    read_family,
    sic_from_family,
    write_json,
)
from racah_frames.mub import build_prime_mubs
from racah_frames.sic import search_fiducial


def test_mub_round_trip_bytes(tmp_path):
    fam = family_from_mubs(build_prime_mubs(5))
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_json(p1, fam)
    write_json(p2, read_family(p1))
    assert p1.read_bytes() == p2.read_bytes()
    back = mubs_from_family(read_family(p1))
    assert np.array_equal(back.bases, build_prime_mubs(5).bases)


def test_sic_round_trip(tmp_path):
    cand = search_fiducial(d=3)
    p = tmp_path / "s.json"
    write_json(p, family_from_sic(cand))
    fam = read_family(p)
    assert fam.kind == "sic" and fam.two_j == 2
    assert fam.labels[4] == (1, 1)
    back = sic_from_family(fam)
    assert np.array_equal(back.states, cand.states)
    assert np.array_equal(back.fiducial, cand.fiducial)
    assert back.residual == cand.residual and back.converged
    assert dumps(fam) == p.read_text()


def test_coefficients_one_based(tmp_path):
    fam = attach_coefficients(family_from_mubs(build_prime_mubs(2)))
    obj = json.loads(dumps(fam))
    entries = obj["members"][0]["coefficients"]
    assert [e["i"] for e in entries] == [1, 2, 3, 4]
    assert entries[0]["value"] == pytest.approx([2**-0.5, 0.0])
    assert coefficient_index(1, 1) == 4
    p = tmp_path / "c.json"
    write_json(p, fam)
    assert np.allclose(read_family(p).members[0].coefficients, fam.members[0].coefficients)


def test_complex_encoding_and_canonical_form():
    fam = FamilyFile("generic", 0, [Member("x", np.array([1 + 0j]))], {"note": "unit"})
    text = dumps(fam)
    assert text.endswith("\n")
    obj = json.loads(text)
    assert obj["members"][0]["state"] == [[1.0, 0.0]]
    assert list(obj) == sorted(obj)


def test_operator_members():
    fam = FamilyFile("generic", 1, [Member("rho", operator=np.eye(2) / 2)])
    back = FamilyFile.from_json(json.loads(dumps(fam)))
    assert np.allclose(back.members[0].operator, np.eye(2) / 2)


def test_half_integer_object_form_accepted():
    obj = json.loads(dumps(FamilyFile("generic", 1, [Member(0, np.array([1, 0j]))])))
    obj["two_j"] = {"two_j": 1}
    assert FamilyFile.from_json(obj).two_j == 1


@pytest.mark.parametrize(
    "mutate",
    [
        lambda o: o.update(schema_version=2),
        lambda o: o.update(kind="povm"),
        lambda o: o.update(two_j=-1),
        lambda o: o.update(two_j=1.5),
        lambda o: o.update(members=[]),
        lambda o: o["members"][0].pop("state"),
        lambda o: o["members"][0].update(state=[[1, 0]]),
        lambda o: o["members"][0].update(state=[1, 0]),
        lambda o: o.pop("kind"),
    ],
)
def test_schema_errors(mutate):
    obj = json.loads(dumps(FamilyFile("generic", 1, [Member(0, np.array([1, 0j]))])))
    mutate(obj)
    with pytest.raises(SchemaError):
        FamilyFile.from_json(obj)


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        read_family(p)


def test_non_finite_rejected():
    with pytest.raises(SchemaError):
        dumps({"x": float("nan")})


def test_atomic_write_leaves_no_temp(tmp_path):
    write_json(tmp_path / "out.json", {"a": 1})
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]
