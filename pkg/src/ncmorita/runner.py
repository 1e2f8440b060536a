"""Build candidates from example specs, verify them, and aggregate suites."""
from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .action import AlgebraAction, fixed_point_algebra
from .algebra import StarAlgebra
from .crossed import representation_contract
from .errors import ActionRejected, ArgumentError, NCMoritaError, ValidationError
from .groups import FiniteGroup, group_by_name
from .hilbert import DEFAULT_SAMPLES, DEFAULT_SEED, CoveringCandidate, certify_unital_covering
from .linalg import Tolerance, adjoint
from .models import (IdealFamily, SetAction, block_representation, covering_from_set_action,
                     direct_sum, enumerate_set_actions, inner_matrix_model, set_action_from_subgroups,
                     verify_general_covering)
from .morita import MoritaContext, certify_strong_morita
from .spec_io import ExampleSpec, encode_complex, parse_example

TOL_ENV = "NCMORITA_TOL"
CONTRACT_SAMPLES = 20
RESIDUAL_CATEGORIES = (
    "context_identities_residual", "axiom_a_residual", "positive_decomposition_residual",
    "y_element_residual", "module_frame_residual", "base_containment_residual",
)


def default_tolerance() -> Tolerance:
    """Default tolerances, with ``eps_eq`` overridable through ``NCMORITA_TOL``."""
    raw = os.environ.get(TOL_ENV)
    if raw:
        try:
            return Tolerance.from_scale(float(raw))
        except ValueError as exc:
            raise ValidationError(f"bad {TOL_ENV} value {raw!r}: {exc}") from None
    return Tolerance()


def _build_part(kind: str, params: dict, group: FiniteGroup, tol: Tolerance) -> CoveringCandidate:
    if kind == "set-action":
        return covering_from_set_action(SetAction.of(params["perms"]), group, tol)
    if kind == "inner-matrix":
        return inner_matrix_model(params["n"], group, params["unitaries"], tol)
    if kind == "direct-sum":
        return direct_sum([_build_part(p["kind"], p, group, tol) for p in params["parts"]])
    if kind == "explicit":
        alg = StarAlgebra(params["basis"], unit=params["unit"], name="explicit")
        if "maps" in params:
            act = AlgebraAction(group, alg, np.stack(params["maps"]))
        else:
            act = AlgebraAction.from_automorphisms(
                group, alg, [lambda m, u=u: u @ m @ adjoint(u) for u in params["unitaries"]])
        if "base" in params:
            base = StarAlgebra(params["base"], unit=alg.unit, name="explicit base")
        else:
            base = fixed_point_algebra(act, tol)
        return CoveringCandidate(act, base, {"kind": "explicit", "group": group.name})
    raise ArgumentError(f"unknown kind {kind!r}")


def build_candidate(spec: ExampleSpec, tol: Tolerance) -> CoveringCandidate:
    return _build_part(spec.kind, spec.params, spec.group, tol)


def _matches(expected: dict, verdict: bool, metadata: dict) -> bool:
    if not expected:
        return verdict
    ok = True
    if "expect_pass" in expected:
        ok &= bool(expected["expect_pass"]) == verdict
    if "free" in expected:
        ok &= metadata.get("free") is not None and bool(expected["free"]) == metadata["free"]
    return bool(ok)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def run_verification(spec: ExampleSpec, tol: Tolerance | None = None, seed: int = DEFAULT_SEED,
                     samples: int = DEFAULT_SAMPLES, context_samples: int = 200) -> dict:
    """Full pipeline for one example; returns a JSON-ready record."""
    tol = tol or default_tolerance()
    start = time.perf_counter()
    record = {"name": spec.name, "kind": spec.kind, "group": spec.group.name,
              "expected": dict(spec.expected)}
    try:
        cand = build_candidate(spec, tol)
    except ActionRejected as exc:
        record.update(status="rejected", verdict=None, matched=False, message=str(exc),
                      certificate=None, metadata={})
        record["timing"] = {"seconds": time.perf_counter() - start}
        return _jsonable(record)
    except NCMoritaError as exc:
        record.update(status="invalid", verdict=None, matched=False, message=str(exc),
                      certificate=None, metadata={})
        record["timing"] = {"seconds": time.perf_counter() - start}
        return _jsonable(record)
    cert = certify_strong_morita(MoritaContext.from_covering(cand), tol, samples, seed,
                                 context_samples=context_samples)
    unital = certify_unital_covering(cand, tol, samples, seed)
    record.update(
        status="verified",
        verdict="pass" if cert.verdict else "fail",
        matched=_matches(spec.expected, cert.verdict, cand.metadata),
        metadata=cand.metadata,
        dims={"algebra": cand.algebra.dim, "base": cand.base.dim, "crossed": cand.crossed.dim,
              "ambient": cand.algebra.ambient_dim, "group_order": cand.group.order},
        certificate=cert.to_dict(),
        unital_covering=unital.to_dict(),
        crossed_product_contract=representation_contract(cand.crossed, CONTRACT_SAMPLES, seed),
    )
    if "ideal_family" in spec.params:
        fam = IdealFamily(spec.params["ideal_family"])
        record["ideal_family"] = verify_general_covering(cand, fam, tol).to_dict()
    record["timing"] = {"seconds": time.perf_counter() - start}
    return _jsonable(record)


@dataclass
class Report:
    examples: list[dict]
    summary: dict
    seed: int
    tolerance: dict
    version: str = __version__
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"artifact": {"name": "ncmorita", "version": self.version}, "seed": self.seed,
                "tolerance": self.tolerance, "summary": self.summary, "examples": self.examples,
                "meta": self.meta}

    @classmethod
    def from_dict(cls, doc: dict) -> "Report":
        return cls(examples=doc["examples"], summary=doc["summary"], seed=doc["seed"],
                   tolerance=doc["tolerance"], version=doc["artifact"]["version"],
                   meta=doc.get("meta", {}))

    @property
    def all_matched(self) -> bool:
        return all(e["matched"] for e in self.examples)

    def exit_code(self) -> int:
        """0 when every expectation matched, 2 if any example was invalid input, else 1."""
        if any(e["status"] == "invalid" for e in self.examples):
            return 2
        return 0 if self.all_matched else 1


def strip_timing(obj):
    """Copy of a report structure without any ``timing`` entries."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "timing"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def summarize(records: list[dict]) -> dict:
    worst: dict[str, float] = {}
    for rec in records:
        cert = rec.get("certificate") or {}
        for key in RESIDUAL_CATEGORIES:
            val = cert.get(key)
            if val is not None:
                worst[key] = max(worst.get(key, 0.0), float(val))
        for key, val in (rec.get("crossed_product_contract") or {}).items():
            worst[f"rho_{key}"] = max(worst.get(f"rho_{key}", 0.0), float(val))
    return {
        "total": len(records),
        "matched": sum(1 for r in records if r["matched"]),
        "mismatched": sum(1 for r in records if not r["matched"]),
        "passed": sum(1 for r in records if r.get("verdict") == "pass"),
        "failed": sum(1 for r in records if r.get("verdict") == "fail"),
        "errors": sum(1 for r in records if r["status"] != "verified"),
        "worst_residuals": dict(sorted(worst.items())),
    }


def _run_one(args):
    spec, tol, seed = args
    return run_verification(spec, tol, seed)


def run_suite(specs: list[ExampleSpec], tol: Tolerance | None = None, seed: int = DEFAULT_SEED,
              jobs: int = 1) -> Report:
    """Verify every example; records are ordered by example name."""
    if not specs:
        raise ValidationError("no examples")
    tol = tol or default_tolerance()
    specs = sorted(specs, key=lambda s: s.name)
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ValidationError("duplicate example names in suite")
    work = [(s, tol, seed) for s in specs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, work))
    else:
        records = [_run_one(w) for w in work]
    return Report(records, summarize(records), seed, tol.to_dict())


def _set_doc(name, group: FiniteGroup, perms, free: bool) -> dict:
    return {"name": name, "kind": "set-action", "group": group.name,
            "perms": [list(map(int, p)) for p in perms],
            "expected": {"free": free, "expect_pass": free}}


def _inner_doc(name, group: FiniteGroup, us, expect: bool) -> dict:
    return {"name": name, "kind": "inner-matrix", "group": group.name, "n": us[0].shape[0],
            "unitaries": [encode_complex(u) for u in us], "expected": {"expect_pass": expect}}


def builtin_documents() -> list[dict]:
    """The builtin suite, with hand-derived expectations."""
    c1, c2, c3, c4 = (group_by_name(n) for n in ("C1", "C2", "C3", "C4"))
    v4, s3 = group_by_name("V4"), group_by_name("S3")
    docs = [
        _set_doc("trivial-group-two-points", c1, [[0, 1]], True),
        _set_doc("c2-swap", c2, [[0, 1], [1, 0]], True),
        _set_doc("c2-branched", c2, [[0, 1, 2], [1, 0, 2]], False),
        _set_doc("c2-two-fibers", c2, [[0, 1, 2, 3], [1, 0, 3, 2]], True),
        _set_doc("c3-regular", c3, c3.coset_action({0}), True),
        _set_doc("c3-branched", c3, [p + [3] for p in c3.coset_action({0})], False),
        _set_doc("c4-regular", c4, c4.coset_action({0}), True),
        _set_doc("v4-regular", v4, v4.coset_action({0}), True),
        _set_doc("v4-two-quotients", v4,
                 set_action_from_subgroups(v4, [{0, 1}, {0, 2}]).perms, False),
        _set_doc("s3-regular", s3, s3.coset_action({0}), True),
        _set_doc("s3-three-points", s3,
                 set_action_from_subgroups(s3, [s3.subgroups()[1]]).perms, False),
    ]
    z = np.diag([1.0, -1.0])
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    docs.append(_inner_doc("inner-m2-c2", c2, [np.eye(2), z], True))
    docs.append(_inner_doc("inner-m2-v4-pauli", v4, [np.eye(2), x, z, x @ z], True))
    w = np.exp(2j * np.pi / 3)
    docs.append(_inner_doc("inner-m2-c3", c3, [np.diag([1, w ** k]) for k in range(3)], False))
    docs.append(_inner_doc("inner-m3-c2", c2, [np.eye(3), np.diag([1.0, 1.0, -1.0])], True))
    us, full = block_representation(s3, 4)
    docs.append(_inner_doc("inner-m4-s3", s3, us, full))
    swap = {"kind": "set-action", "perms": [[0, 1], [1, 0]]}
    e1, e2 = np.diag([1.0, 1, 0, 0]), np.diag([0.0, 0, 1, 1])
    docs.append({"name": "direct-sum-two-swaps", "kind": "direct-sum", "group": "C2",
                 "parts": [swap, swap],
                 "ideal_family": [[encode_complex(e1)], [encode_complex(e2)]],
                 "expected": {"free": True, "expect_pass": True}})
    docs.append({"name": "explicit-m2-c2", "kind": "explicit", "group": "C2",
                 "basis": [encode_complex(np.eye(2)[:, [i]] @ np.eye(2)[[j], :])
                           for i in range(2) for j in range(2)],
                 "unit": encode_complex(np.eye(2)),
                 "unitaries": [encode_complex(np.eye(2)), encode_complex(z)],
                 "expected": {"expect_pass": True}})
    return docs


def builtin_suite() -> list[ExampleSpec]:
    return [parse_example(d, f"builtin:{d['name']}") for d in builtin_documents()]


def generate_document(kind: str, group_name: str, size: int) -> dict:
    """A generated example with ground truth computed independently of the certifier.

    set-action: as many regular orbits as fit, then the largest faithful
    coset spaces, then fixed points; ``free`` comes from the orbit
    structure.  inner-matrix: a direct sum of irreps; ``expect_pass``
    says whether every irrep occurs.
    """
    group = group_by_name(group_name)
    if kind == "set-action":
        classes = sorted(group.subgroup_classes(), key=len)
        chosen, left = [], size
        for h in classes:
            while group.order // len(h) <= left:
                chosen.append(h)
                left -= group.order // len(h)
        sa = set_action_from_subgroups(group, chosen)
        if not sa.is_faithful(group):
            raise ArgumentError(f"no faithful {group_name}-set of size {size} from this recipe")
        return _set_doc(f"{kind}-{group_name}-{size}", group, sa.perms, sa.is_free(group))
    if kind == "inner-matrix":
        us, full = block_representation(group, size)
        inner_matrix_model(size, group, us)
        return _inner_doc(f"{kind}-{group_name}-{size}", group, us, full)
    raise ArgumentError(f"cannot generate kind {kind!r}")


def generated_set_family(max_points: int = 12, groups=("C2", "C3", "C4", "V4", "S3")):
    """``(group name, label, SetAction)`` for every faithful action up to ``max_points``."""
    for name in groups:
        grp = group_by_name(name)
        for label, sa in enumerate_set_actions(grp, max_points):
            yield grp, label, sa


def specs_from_config(doc: dict, where: str = "<config>") -> list[ExampleSpec]:
    """Suite config: ``{"examples": [...], "generate": [{"kind", "group", "sizes"}]}``."""
    if not isinstance(doc, dict):
        raise ValidationError("suite config must be an object", "", where)
    specs = [parse_example(d, f"{where}: examples[{i}]")
             for i, d in enumerate(doc.get("examples", []))]
    for i, gen in enumerate(doc.get("generate", [])):
        for size in gen.get("sizes", []):
            try:
                gdoc = generate_document(gen["kind"], gen["group"], int(size))
            except (KeyError, NCMoritaError) as exc:
                raise ValidationError(f"cannot generate: {exc}", f"generate[{i}]", where) from None
            specs.append(parse_example(gdoc, f"{where}: generate[{i}]"))
    if doc.get("builtin"):
        specs.extend(builtin_suite())
    return specs
