"""JSON persistence for families of states or operators.

Files are canonical: keys sorted, two-space indent, floats written with
Python's shortest round-trip repr, trailing newline.  Reading a file and
writing it back therefore reproduces it byte for byte.  Complex numbers are
``[re, im]`` pairs; tensor coefficients carry the one-based flat index
``i = k^2 + k + q + 1``.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .frame import TensorCoefficients, expand, expand_states, flat_index
from .mub import MubSet
from .sic import SicCandidate

__all__ = [
    "SCHEMA_VERSION",
    "KINDS",
    "SchemaError",
    "Member",
    "FamilyFile",
    "dumps",
    "write_json",
    "read_family",
    "encode_complex",
    "decode_complex",
    "family_from_mubs",
    "family_from_sic",
    "mubs_from_family",
    "sic_from_family",
    "family_coefficients",
    "attach_coefficients",
    "coefficient_index",
]

SCHEMA_VERSION = 1
KINDS = ("sic", "mub", "generic")


class SchemaError(ValueError):
    """A file that does not follow the family schema."""


def _num(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise SchemaError(f"non-finite number {x}")
    # -0.0 would survive a round trip, but it makes goldens noisy
    return x + 0.0


def encode_complex(arr) -> list:
    """Nested lists with every complex entry replaced by [re, im]."""
    a = np.asarray(arr, dtype=complex)
    if a.ndim == 0:
        z = complex(a)
        return [_num(z.real), _num(z.imag)]
    return [encode_complex(x) for x in a]


def decode_complex(obj, ndim: int) -> np.ndarray:
    try:
        a = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"malformed complex array: {exc}") from None
    if a.ndim != ndim + 1 or a.shape[-1] != 2:
        raise SchemaError(f"expected a rank-{ndim} array of [re, im] pairs, got shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


@dataclass
class Member:
    label: object
    state: np.ndarray | None = None
    operator: np.ndarray | None = None
    coefficients: np.ndarray | None = None  # zero-based flat order internally

    def to_json(self) -> dict:
        out = {"label": _label_out(self.label)}
        if self.state is not None:
            out["state"] = encode_complex(self.state)
        if self.operator is not None:
            out["operator"] = encode_complex(self.operator)
        if self.coefficients is not None:
            out["coefficients"] = [
                {"i": i + 1, "value": encode_complex(c)} for i, c in enumerate(self.coefficients)
            ]
        return out


def _label_out(label):
    if isinstance(label, tuple):
        return [_label_out(x) for x in label]
    if isinstance(label, np.integer):
        return int(label)
    return label


def _label_in(label):
    if isinstance(label, list):
        return tuple(_label_in(x) for x in label)
    return label


@dataclass
class FamilyFile:
    kind: str
    two_j: int
    members: list[Member]
    metadata: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def d(self) -> int:
        return self.two_j + 1

    @property
    def labels(self) -> list:
        return [m.label for m in self.members]

    def to_json(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "two_j": self.two_j,
            "members": [m.to_json() for m in self.members],
            "metadata": _plain(self.metadata),
        }

    @classmethod
    def from_json(cls, obj) -> "FamilyFile":
        if not isinstance(obj, dict):
            raise SchemaError("top level must be an object")
        missing = {"schema_version", "kind", "two_j", "members"} - obj.keys()
        if missing:
            raise SchemaError(f"missing fields: {sorted(missing)}")
        if obj["schema_version"] != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema_version {obj['schema_version']!r}")
        kind = obj["kind"]
        if kind not in KINDS:
            raise SchemaError(f"kind must be one of {KINDS}, got {kind!r}")
        two_j = obj["two_j"]
        if isinstance(two_j, dict) and set(two_j) == {"two_j"}:
            two_j = two_j["two_j"]
        if not isinstance(two_j, int) or isinstance(two_j, bool) or two_j < 0:
            raise SchemaError(f"two_j must be a nonnegative integer, got {two_j!r}")
        d = two_j + 1
        if not isinstance(obj["members"], list) or not obj["members"]:
            raise SchemaError("members must be a nonempty list")
        members = []
        for n, raw in enumerate(obj["members"]):
            if not isinstance(raw, dict) or "label" not in raw:
                raise SchemaError(f"member {n} needs a label")
            m = Member(_label_in(raw["label"]))
            if "state" in raw:
                m.state = decode_complex(raw["state"], 1)
                if m.state.shape != (d,):
                    raise SchemaError(f"member {n}: state has length {len(m.state)}, expected {d}")
            if "operator" in raw:
                m.operator = decode_complex(raw["operator"], 2)
                if m.operator.shape != (d, d):
                    raise SchemaError(f"member {n}: operator has shape {m.operator.shape}, expected {(d, d)}")
            if m.state is None and m.operator is None:
                raise SchemaError(f"member {n} has neither state nor operator")
            if "coefficients" in raw:
                m.coefficients = _coefficients_in(raw["coefficients"], d, n)
            members.append(m)
        metadata = obj.get("metadata", {})
        if not isinstance(metadata, dict):
            raise SchemaError("metadata must be an object")
        return cls(kind, two_j, members, metadata)


def _coefficients_in(raw, d: int, n: int) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != d * d:
        raise SchemaError(f"member {n}: expected {d * d} coefficients")
    out = np.zeros(d * d, dtype=complex)
    seen = set()
    for entry in raw:
        try:
            i = entry["i"]
            value = decode_complex(entry["value"], 0)
        except (KeyError, TypeError):
            raise SchemaError(f"member {n}: coefficient entries need 'i' and 'value'") from None
        if not isinstance(i, int) or not 1 <= i <= d * d or i in seen:
            raise SchemaError(f"member {n}: bad coefficient index {i!r}")
        seen.add(i)
        out[i - 1] = complex(value)
    return out


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_complex(obj)
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, complex):
        return encode_complex(obj)
    return obj


def dumps(obj) -> str:
    if isinstance(obj, FamilyFile):
        obj = obj.to_json()
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    """Write canonical JSON atomically (temporary file, then rename)."""
    text = dumps(obj)
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".json", dir=folder)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_family(path) -> FamilyFile:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    return FamilyFile.from_json(obj)


# ---------------------------------------------------------------------------
# conversions


def family_from_mubs(mubs: MubSet) -> FamilyFile:
    members = [Member(label, state) for label, state in zip(mubs.labels, mubs.states())]
    meta = {"construction": "prime-dimension phase construction", "bases": int(mubs.bases.shape[0])}
    return FamilyFile("mub", mubs.two_j, members, meta)


def mubs_from_family(family: FamilyFile) -> MubSet:
    if any(m.state is None for m in family.members):
        raise SchemaError("a MUB family needs a state for every member")
    d = family.d
    if len(family.members) % d:
        raise SchemaError(f"{len(family.members)} members do not split into bases of {d}")
    bases = np.array([m.state for m in family.members]).reshape(-1, d, d)
    return MubSet(family.two_j, bases)


def family_from_sic(candidate: SicCandidate) -> FamilyFile:
    d = candidate.d
    prov = dict(candidate.provenance)
    fid = prov.pop("fiducial", None)
    covariant = fid is not None and len(candidate.states) == d * d
    if covariant:
        labels = [(a, b) for a in range(d) for b in range(d)]
    else:
        labels = list(range(len(candidate.states)))
    members = [Member(label, state) for label, state in zip(labels, candidate.states)]
    meta = {"provenance": prov, "residual": candidate.residual, "converged": candidate.converged}
    if fid is not None:
        meta["fiducial"] = encode_complex(fid)
    return FamilyFile("sic", candidate.two_j, members, meta)


def sic_from_family(family: FamilyFile) -> SicCandidate:
    if any(m.state is None for m in family.members):
        raise SchemaError("a SIC family needs a state for every member")
    states = np.array([m.state for m in family.members])
    meta = family.metadata
    prov = dict(meta.get("provenance", {}))
    if "fiducial" in meta:
        prov["fiducial"] = decode_complex(meta["fiducial"], 1)
    residual = meta.get("residual", float("nan"))
    return SicCandidate(family.two_j, states, prov, residual, bool(meta.get("converged", False)))


def family_coefficients(family: FamilyFile) -> list[TensorCoefficients]:
    """Coefficients of each member, from the state (projector) or operator."""
    out = []
    for m in family.members:
        if m.state is not None:
            out.append(expand_states(m.state[None, :], family.two_j, [m.label])[0])
        else:
            out.append(expand(m.operator, family.two_j, m.label))
    return out


def attach_coefficients(family: FamilyFile) -> FamilyFile:
    for m, c in zip(family.members, family_coefficients(family)):
        m.coefficients = np.array(c.values)
    return family


def coefficient_index(k: int, q: int) -> int:
    """One-based serialized index of (k, q)."""
    return flat_index(k, q) + 1
