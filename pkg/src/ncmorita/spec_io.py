"""Example files: JSON documents describing one covering model.

Complex scalars are written as ``[re, im]``; plain numbers are accepted on
input.  A minimal set-action file::

    {"name": "swap", "kind": "set-action", "group": "C2",
     "perms": [[0, 1], [1, 0]],
     "expected": {"free": true, "expect_pass": true}}

Other kinds: ``inner-matrix`` (``n``, ``unitaries``), ``direct-sum``
(``parts``: list of kind blocks sharing the top-level group) and
``explicit`` (``basis``, ``unit``, and either ``maps`` on basis
coordinates or ``unitaries`` acting by conjugation; optional ``base``).
Any kind may carry ``ideal_family``: a list of ideals, each a list of
ambient matrices.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NCMoritaError, ValidationError
from .groups import NAMED_GROUPS, FiniteGroup, group_by_name, verify_group

KINDS = ("set-action", "inner-matrix", "direct-sum", "explicit")


@dataclass
class ExampleSpec:
    name: str
    kind: str
    group: FiniteGroup
    params: dict
    expected: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def encode_complex(a) -> list:
    """Nested lists with every scalar as ``[re, im]``."""
    arr = np.asarray(a, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def decode_complex(obj, ndim: int, where: str, fieldname: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("ragged or non-numeric array", fieldname, where) from None
    if arr.ndim == ndim + 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == ndim:
        return arr.astype(complex)
    raise ValidationError(f"expected a {ndim}-d array of [re, im] pairs, got shape {arr.shape}",
                          fieldname, where)


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ValidationError("missing required field", key, where)
    return doc[key]


def parse_group(obj, where: str) -> FiniteGroup:
    if isinstance(obj, str):
        if obj not in NAMED_GROUPS:
            raise ValidationError(f"unknown group name {obj!r}", "group", where)
        return group_by_name(obj)
    if isinstance(obj, dict):
        table = _require(obj, "table", f"{where}: group")
        try:
            grp = FiniteGroup.from_table(table, name=obj.get("name", "G"), strict=False)
        except NCMoritaError as exc:
            raise ValidationError(str(exc), "group.table", where) from None
        rep = verify_group(grp)
        if not rep.passed:
            raise ValidationError("invalid group table: " + "; ".join(rep.failures),
                                  "group.table", where)
        return grp
    raise ValidationError("group must be a name or {'table': ...}", "group", where)


def _parse_matrices(obj, where, fieldname, count=None, size=None) -> list[np.ndarray]:
    if not isinstance(obj, list):
        raise ValidationError("expected a list of matrices", fieldname, where)
    mats = [decode_complex(m, 2, where, f"{fieldname}[{i}]") for i, m in enumerate(obj)]
    if count is not None and len(mats) != count:
        raise ValidationError(f"expected {count} matrices, got {len(mats)}", fieldname, where)
    for i, m in enumerate(mats):
        if m.shape[0] != m.shape[1] or (size is not None and m.shape[0] != size):
            raise ValidationError(f"matrix has shape {m.shape}", f"{fieldname}[{i}]", where)
    return mats


def _check_unitaries(us, where, fieldname):
    for i, u in enumerate(us):
        err = float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))
        if err > 1e-8:
            raise ValidationError(f"matrix is not unitary (|uu* - I| = {err:.2e})",
                                  f"{fieldname}[{i}]", where)


def parse_params(doc: dict, kind: str, group: FiniteGroup, where: str) -> dict:
    if kind == "set-action":
        perms = _require(doc, "perms", where)
        if (not isinstance(perms, list) or len(perms) != group.order
                or not all(isinstance(p, list) and all(isinstance(v, int) for v in p) for p in perms)):
            raise ValidationError(f"expected {group.order} integer permutations", "perms", where)
        return {"perms": perms}
    if kind == "inner-matrix":
        n = _require(doc, "n", where)
        if not isinstance(n, int) or n < 1:
            raise ValidationError("n must be a positive integer", "n", where)
        us = _parse_matrices(_require(doc, "unitaries", where), where, "unitaries", group.order, n)
        _check_unitaries(us, where, "unitaries")
        return {"n": n, "unitaries": us}
    if kind == "direct-sum":
        parts = _require(doc, "parts", where)
        if not isinstance(parts, list) or not parts:
            raise ValidationError("direct-sum needs a nonempty list of parts", "parts", where)
        out = []
        for i, part in enumerate(parts):
            sub = f"{where}: parts[{i}]"
            pkind = _require(part, "kind", sub)
            if pkind not in KINDS or pkind == "direct-sum":
                raise ValidationError(f"unsupported part kind {pkind!r}", "kind", sub)
            out.append({"kind": pkind, **parse_params(part, pkind, group, sub)})
        return {"parts": out}
    if kind == "explicit":
        basis = _parse_matrices(_require(doc, "basis", where), where, "basis")
        if not basis:
            raise ValidationError("basis is empty", "basis", where)
        n = basis[0].shape[0]
        basis = _parse_matrices(doc["basis"], where, "basis", size=n)
        unit = decode_complex(_require(doc, "unit", where), 2, where, "unit")
        params = {"basis": basis, "unit": unit}
        if "maps" in doc:
            d = len(basis)
            maps = [decode_complex(m, 2, where, f"maps[{i}]") for i, m in enumerate(doc["maps"])]
            if len(maps) != group.order or any(m.shape != (d, d) for m in maps):
                raise ValidationError(f"expected {group.order} maps of shape {(d, d)}", "maps", where)
            params["maps"] = maps
        elif "unitaries" in doc:
            us = _parse_matrices(doc["unitaries"], where, "unitaries", group.order, n)
            _check_unitaries(us, where, "unitaries")
            params["unitaries"] = us
        else:
            raise ValidationError("explicit kind needs 'maps' or 'unitaries'", "maps", where)
        if "base" in doc:
            params["base"] = _parse_matrices(doc["base"], where, "base", size=n)
        return params
    raise ValidationError(f"unknown kind {kind!r}; expected one of {KINDS}", "kind", where)


def parse_example(doc: dict, where: str = "<memory>") -> ExampleSpec:
    if not isinstance(doc, dict):
        raise ValidationError("example must be a JSON object", None, where)
    name = _require(doc, "name", where)
    kind = _require(doc, "kind", where)
    if kind not in KINDS:
        raise ValidationError(f"unknown kind {kind!r}; expected one of {KINDS}", "kind", where)
    group = parse_group(_require(doc, "group", where), where)
    params = parse_params(doc, kind, group, where)
    if "ideal_family" in doc:
        fam = doc["ideal_family"]
        if not isinstance(fam, list) or not fam:
            raise ValidationError("ideal_family must be a nonempty list", "ideal_family", where)
        params["ideal_family"] = [_parse_matrices(ideal, where, f"ideal_family[{i}]")
                                  for i, ideal in enumerate(fam)]
    expected = doc.get("expected", {})
    if not isinstance(expected, dict) or not set(expected) <= {"free", "expect_pass"}:
        raise ValidationError("expected block allows only 'free' and 'expect_pass'", "expected",
                              where)
    return ExampleSpec(str(name), kind, group, params, dict(expected), doc)


def load_example(path) -> ExampleSpec:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError("file not found", None, str(path)) from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"JSON parse error: {exc.msg} (line {exc.lineno})", None,
                              str(path)) from None
    return parse_example(doc, str(path))


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
