"""Serializable witnesses and their independent verification."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from . import __version__
from .absorber import Absorber, verify_absorber
from .core import (
    InputError,
    Tournament,
    Verdict,
    check_vertices,
    dominates,
    is_transitive,
    verify_cycle_power,
    verify_partition,
    verify_path_power,
)

KINDS = ("path_power", "cycle_power", "partition", "absorber", "backward_pair")


@dataclass
class Certificate:
    kind: str
    k: int
    payload: dict
    provenance: Any = ""
    version: str = __version__

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown certificate kind {self.kind!r}")
        if int(self.k) < 1:
            raise InputError("k must be at least 1")
        _check_shape(self.kind, self.payload)

    def to_json(self) -> str:
        return json.dumps(
            {"kind": self.kind, "k": self.k, "payload": self.payload,
             "provenance": self.provenance, "version": self.version},
            indent=1, default=_jsonable,
        )

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise InputError(f"certificate is not valid JSON: {err}") from err
        if not isinstance(data, dict) or not {"kind", "k", "payload"} <= data.keys():
            raise InputError("certificate needs kind, k and payload fields")
        return cls(data["kind"], int(data["k"]), data["payload"],
                   data.get("provenance", ""), data.get("version", ""))


def _jsonable(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    return str(obj)


def _int_list(value, name: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise InputError(f"payload field {name!r} must be a list of integers")
    return value


_FIELDS = {
    "path_power": ("sequence",),
    "cycle_power": ("cycle",),
    "partition": ("parts",),
    "absorber": ("S", "Q", "r_prime"),
    "backward_pair": ("later", "earlier"),
}


def _check_shape(kind: str, payload) -> None:
    if not isinstance(payload, dict):
        raise InputError("payload must be an object")
    missing = [f for f in _FIELDS[kind] if f not in payload]
    if missing:
        raise InputError(f"{kind} payload lacks {missing}")
    if kind == "path_power":
        _int_list(payload["sequence"], "sequence")
    elif kind == "cycle_power":
        _int_list(payload["cycle"], "cycle")
    elif kind == "partition":
        if not isinstance(payload["parts"], list):
            raise InputError("payload field 'parts' must be a list")
        for p in payload["parts"]:
            _int_list(p, "parts")
    elif kind == "absorber":
        if not isinstance(payload["S"], list):
            raise InputError("payload field 'S' must be a list")
        for s in payload["S"]:
            _int_list(s, "S")
        _int_list(payload["Q"], "Q")
    else:
        _int_list(payload["later"], "later")
        _int_list(payload["earlier"], "earlier")
        if "ordering" in payload:
            _int_list(payload["ordering"], "ordering")


def path_power_certificate(seq, k: int, provenance="") -> Certificate:
    return Certificate("path_power", k, {"sequence": [int(v) for v in seq]}, provenance)


def cycle_power_certificate(cyc, k: int, provenance="") -> Certificate:
    return Certificate("cycle_power", k, {"cycle": [int(v) for v in cyc]}, provenance)


def partition_certificate(parts, k: int, provenance="") -> Certificate:
    return Certificate("partition", k, {"parts": [[int(v) for v in p] for p in parts]}, provenance)


def absorber_certificate(H: Absorber, provenance="") -> Certificate:
    payload = H.to_payload()
    k = payload.pop("k")
    return Certificate("absorber", k, payload, provenance)


def backward_pair_certificate(later, earlier, k: int, ordering=None, provenance="") -> Certificate:
    payload = {"later": [int(v) for v in later], "earlier": [int(v) for v in earlier]}
    if ordering is not None:
        payload["ordering"] = [int(v) for v in ordering]
    return Certificate("backward_pair", k, payload, provenance)


def _verify_backward_pair(T: Tournament, payload: dict, k: int) -> Verdict:
    later, earlier = payload["later"], payload["earlier"]
    check_vertices(T, later + earlier)
    if len(later) < k or len(earlier) < k:
        return Verdict(False, "set smaller than k")
    for name, side in (("later", later), ("earlier", earlier)):
        if is_transitive(T, side) is None:
            return Verdict(False, f"{name} set not transitive")
    if not dominates(T, later, earlier):
        return Verdict(False, "later set does not dominate earlier set")
    if "ordering" in payload:
        perm = payload["ordering"]
        if sorted(perm) != list(range(T.n)):
            return Verdict(False, "ordering is not a permutation")
        pos = {v: i for i, v in enumerate(perm)}
        if min(pos[v] for v in later) <= max(pos[v] for v in earlier):
            return Verdict(False, "later set not after earlier set in the ordering")
    return Verdict(True)


def verify_certificate(T: Tournament, cert: Certificate) -> Verdict:
    """Re-check a certificate against T using only the core verifiers."""
    p, k = cert.payload, cert.k
    if cert.kind == "path_power":
        return verify_path_power(T, p["sequence"], k)
    if cert.kind == "cycle_power":
        return verify_cycle_power(T, p["cycle"], k)
    if cert.kind == "partition":
        return verify_partition(T, p["parts"], k)
    if cert.kind == "absorber":
        H = Absorber.from_payload({**p, "k": k})
        check_vertices(T, H.vertices())
        return verify_absorber(T, H)
    return _verify_backward_pair(T, p, k)


__all__ = [
    "KINDS",
    "Certificate",
    "absorber_certificate",
    "backward_pair_certificate",
    "cycle_power_certificate",
    "partition_certificate",
    "path_power_certificate",
    "verify_certificate",
]
