"""The Morita context ``(A~ x| G, A, A~, A~, phi, psi)`` and its certification."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bimodule
from .algebra import as_array
from .crossed import CrossedElement, CrossedProduct
from .errors import ArgumentError
from .hilbert import (DEFAULT_SAMPLES, DEFAULT_SEED, CoveringCandidate, FrameInfeasible,
                      FrameWitness, certify_unital_covering)
from .linalg import (DEFAULT_TOL, Tolerance, adjoint, matrix_rank, positive_parts, psd_defect,
                     psd_sqrt, subspace_rank)

CONTEXT_SAMPLES = 200
DENSITY_NOTE = ("finite dimension: every subspace is closed, so density of the inner-product "
                "span is checked as exact span equality")


@dataclass(eq=False)
class MoritaContext:
    """Bimodule data for one covering.

    ``phi`` and ``psi`` default to the canonical pairings; they are fields
    so that tests can inject corrupted maps.
    """

    covering: CoveringCandidate
    crossed: CrossedProduct
    phi: Callable = bimodule.phi
    psi: Callable = bimodule.psi

    def __post_init__(self):
        if self.crossed.action is not self.covering.action:
            raise ArgumentError("crossed product and covering use different actions")

    @classmethod
    def from_covering(cls, cand: CoveringCandidate) -> "MoritaContext":
        return cls(cand, cand.crossed)

    def act_left(self, a: CrossedElement, x) -> np.ndarray:
        return bimodule.act_left(a, x)

    def act_right(self, x, a: CrossedElement) -> np.ndarray:
        return bimodule.act_right(x, a)

    def inner_cp(self, x, y, check: bool = True) -> CrossedElement:
        return self.phi(self.crossed, x, adjoint(as_array(y)), check)

    def inner_base(self, x, y, check: bool = True) -> np.ndarray:
        return self.psi(self.crossed, adjoint(as_array(x)), y, check)


def _triples(ctx: MoritaContext, samples: int, seed: int):
    alg = ctx.covering.algebra
    d = alg.dim
    out = []
    if d ** 3 <= 512:
        out += [(alg.basis[i], alg.basis[j], alg.basis[k])
                for i in range(d) for j in range(d) for k in range(d)]
    rng = np.random.default_rng(seed)
    out += [(alg.random(rng), alg.random(rng), alg.random(rng)) for _ in range(samples)]
    return out


def _scale(*ms) -> float:
    return max(1.0, float(np.prod([np.linalg.norm(m) for m in ms])))


@dataclass
class ContextReport:
    left_residual: float
    right_residual: float
    triples: int
    tolerance: float

    @property
    def residual(self) -> float:
        return max(self.left_residual, self.right_residual)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def to_dict(self) -> dict:
        return {"left_residual": self.left_residual, "right_residual": self.right_residual,
                "triples": self.triples, "passed": self.passed}


def verify_morita_context(ctx: MoritaContext, samples: int = CONTEXT_SAMPLES,
                          tol: Tolerance = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> ContextReport:
    """Mixed associativity ``phi(x,y) . z = x psi(y,z)`` and ``x . phi(y,z) = psi(x,y) z``."""
    cp = ctx.crossed
    left = right = 0.0
    triples = _triples(ctx, samples, seed)
    for x, y, z in triples:
        s = _scale(x, y, z)
        lhs = bimodule.act_left(ctx.phi(cp, x, y, False), z, False)
        left = max(left, float(np.linalg.norm(lhs - x @ ctx.psi(cp, y, z, False))) / s)
        lhs = bimodule.act_right(x, ctx.phi(cp, y, z, False), False)
        right = max(right, float(np.linalg.norm(lhs - ctx.psi(cp, x, y, False) @ z)) / s)
    return ContextReport(left, right, len(triples), 10 * tol.eps_eq)


def _positive_spanning_set(basis, tol: Tolerance) -> list[np.ndarray]:
    """Positive elements spanning the same space as ``basis``."""
    out = []
    for b in basis:
        for h in ((b + adjoint(b)) / 2, (b - adjoint(b)) / 2j):
            for p in positive_parts(h, tol):
                if np.linalg.norm(p) > tol.eps_eq:
                    out.append(p)
    return out


@dataclass
class EquivalenceCertificate:
    """Verdict on whether ``A~`` is an ``A~ x| G``-``A`` equivalence bimodule."""

    context_identities_residual: float
    axiom_a_residual: float
    fullness_rank_A: int
    dim_A: int
    fullness_rank_CP: int
    dim_CP: int
    base_containment_residual: float
    frame: FrameWitness | FrameInfeasible
    phi_rank: int
    psd_residuals: dict[str, float]
    positive_decomposition_residual: float
    y_element_residual: float | None
    y_element_rank: int | None
    y_literal_residual: float | None
    involution: dict[str, float]
    module_frame_found: bool
    module_frame_residual: float
    reasons: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return not self.reasons

    @property
    def algebraic_equivalence(self) -> bool:
        """Surjective ``phi`` and ``psi`` with the context identities."""
        return (self.phi_rank == self.dim_CP and self.fullness_rank_A == self.dim_A
                and "context_identities" not in " ".join(self.reasons))

    @property
    def routes_disagree(self) -> bool:
        """Projectivity says equivalence, surjectivity does not (or vice versa)."""
        return self.module_frame_found != self.algebraic_equivalence

    def to_dict(self) -> dict:
        return {
            "verdict": "pass" if self.verdict else "fail",
            "reasons": list(self.reasons),
            "context_identities_residual": self.context_identities_residual,
            "axiom_a_residual": self.axiom_a_residual,
            "fullness_rank_A": self.fullness_rank_A,
            "dim_A": self.dim_A,
            "fullness_rank_CP": self.fullness_rank_CP,
            "dim_CP": self.dim_CP,
            "base_containment_residual": self.base_containment_residual,
            "frame": self.frame.to_dict(),
            "phi_rank": self.phi_rank,
            "psd_residuals": dict(sorted(self.psd_residuals.items())),
            "positive_decomposition_residual": self.positive_decomposition_residual,
            "y_element_residual": self.y_element_residual,
            "y_element_rank": self.y_element_rank,
            "y_literal_residual": self.y_literal_residual,
            "involution": dict(sorted(self.involution.items())),
            "algebraic_equivalence": self.algebraic_equivalence,
            "projectivity_route": self.module_frame_found,
            "module_frame_residual": self.module_frame_residual,
            "routes_disagree": self.routes_disagree,
            "notes": list(self.notes),
        }


def involution_comparison(cp: CrossedProduct, samples: int = 4, seed: int = DEFAULT_SEED) -> dict:
    """Anti-automorphism residuals of the twisted and untwisted involutions."""
    rng = np.random.default_rng(seed)
    out = {"twisted": 0.0, "untwisted": 0.0}
    for _ in range(samples):
        a, b = cp.random(rng), cp.random(rng)
        s = max(1.0, a.norm() * b.norm())
        ab = cp.mul(a, b)
        for key, tw in (("twisted", True), ("untwisted", False)):
            lhs = cp.star(ab, tw)
            rhs = cp.mul(cp.star(b, tw), cp.star(a, tw))
            out[key] = max(out[key], lhs.distance(rhs) / s)
    return out


def certify_strong_morita(ctx: MoritaContext, tol: Tolerance = DEFAULT_TOL,
                          samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                          context_samples: int = CONTEXT_SAMPLES) -> EquivalenceCertificate:
    """Assemble every check behind the equivalence-bimodule conclusion."""
    cand, cp = ctx.covering, ctx.crossed
    alg, base, grp = cand.algebra, cand.base, cand.group
    reasons: list[str] = []
    limit = 10 * tol.eps_eq

    unital = certify_unital_covering(cand, tol, samples, seed)
    for name, rep in (("action", unital.action), ("algebra", unital.algebra),
                      ("fixed_point", unital.fixed_point), ("hilbert", unital.hilbert)):
        if not rep.passed:
            reasons.append(f"{name}: {'; '.join(rep.failures)}")

    context = verify_morita_context(ctx, context_samples, tol, seed)
    if not context.passed:
        reasons.append(f"context_identities: residual {context.residual:.3e}")

    rng = np.random.default_rng(seed + 1)
    xs = list(alg.basis) + [alg.random(rng) for _ in range(samples)]
    axiom_a = 0.0
    psd = {"inner_base": 0.0, "inner_cp": 0.0}
    for i, x in enumerate(xs):
        y, z = xs[(i + 1) % len(xs)], xs[(i + 2) % len(xs)]
        lhs = bimodule.act_left(ctx.inner_cp(x, y, False), z, False)
        rhs = x @ ctx.inner_base(y, z, False)
        axiom_a = max(axiom_a, float(np.linalg.norm(lhs - rhs)) / _scale(x, y, z))
        psd["inner_base"] = max(psd["inner_base"], psd_defect(ctx.inner_base(x, x, False), tol))
        psd["inner_cp"] = max(psd["inner_cp"],
                              psd_defect(cp.rho(ctx.inner_cp(x, x, False)), tol))
    if axiom_a > limit:
        reasons.append(f"axiom_a: residual {axiom_a:.3e}")
    for key, val in psd.items():
        if val > 0:
            reasons.append(f"psd_{key}: defect {val:.3e}")

    base_vals = [ctx.inner_base(bi, bj, False) for bi in alg.basis for bj in alg.basis]
    rank_a = subspace_rank(base_vals, tol)
    containment = max(base.membership_residual(v) for v in base_vals)
    if containment > limit:
        reasons.append(f"fullness_A: values leave the base (residual {containment:.3e})")
    if rank_a != base.dim:
        reasons.append(f"fullness_A: rank {rank_a} < dim {base.dim}")
    cp_vals = [ctx.inner_cp(bi, bj, False).components.reshape(-1) for bi in alg.basis for bj in alg.basis]
    rank_cp = matrix_rank(np.stack(cp_vals), tol)
    if rank_cp != cp.dim:
        reasons.append(f"fullness_CP: rank {rank_cp} < dim {cp.dim}")
    phi_vals = [ctx.phi(cp, bi, bj, False).components.reshape(-1) for bi in alg.basis for bj in alg.basis]
    rank_phi = matrix_rank(np.stack(phi_vals), tol)

    frame = unital.galois_frame
    if isinstance(frame, FrameInfeasible):
        reasons.append(f"frame: infeasible, minimal residual {frame.residual:.3e}")

    # a = (1/|G|) <sqrt a, sqrt a>_A for positive a in A
    pos_res = 0.0
    for p in _positive_spanning_set(base.basis, tol):
        x = psd_sqrt(p, tol)
        pos_res = max(pos_res, base.membership_residual(x))
        recon = ctx.inner_base(x, x, False) / grp.order
        pos_res = max(pos_res, float(np.linalg.norm(recon - p)) / max(1.0, float(np.linalg.norm(p))))
    if pos_res > 10 * limit:
        reasons.append(f"positive_decomposition: residual {pos_res:.3e}")

    y_res = y_lit = None
    y_rank = None
    if isinstance(frame, FrameWitness):
        y_res, y_lit, y_rank = _y_element_check(ctx, frame, tol)
        if y_res > 10 * limit:
            reasons.append(f"y_elements: residual {y_res:.3e}")
        if y_rank != cp.dim:
            reasons.append(f"y_elements: rank {y_rank} < dim {cp.dim}")

    notes = [DENSITY_NOTE]
    invol = involution_comparison(cp, seed=seed)
    if invol["untwisted"] > limit:
        notes.append("untwisted involution a*(g) = a(g^-1)* is not an anti-automorphism here; "
                     "the twisted form g(a(g^-1)*) is used")
    if unital.discrepancy:
        notes.append("module frame exists (f.g. projective) but the Galois frame does not")

    cert = EquivalenceCertificate(
        context_identities_residual=context.residual,
        axiom_a_residual=axiom_a,
        fullness_rank_A=rank_a, dim_A=base.dim,
        fullness_rank_CP=rank_cp, dim_CP=cp.dim,
        base_containment_residual=containment,
        frame=frame, phi_rank=rank_phi,
        psd_residuals=psd,
        positive_decomposition_residual=pos_res,
        y_element_residual=y_res, y_element_rank=y_rank, y_literal_residual=y_lit,
        involution=invol,
        module_frame_found=unital.module_frame.found,
        module_frame_residual=unital.module_frame.residual,
        reasons=reasons, notes=notes,
    )
    if cert.routes_disagree:
        cert.notes.append("projectivity route and surjectivity route disagree")
    return cert


def _y_element_check(ctx: MoritaContext, frame: FrameWitness, tol: Tolerance):
    """Rebuild every ``y(p, g)`` from the frame.

    With ``x x* = p`` and ``sum_j a_j g(b_j*) = [g = e]``,
    ``sum_j <x g(a_j), g^-1(x) b_j>_cp = y(p, g)``.  The variant with
    ``x b_j`` in place of ``g^-1(x) b_j`` is reported separately; it only
    agrees when ``x`` is fixed by ``g``.
    """
    cp = ctx.crossed
    act, grp = cp.action, cp.group
    worst = literal = 0.0
    built = []
    for p in _positive_spanning_set(cp.algebra.basis, tol):
        x = psd_sqrt(p, tol)
        scale = max(1.0, float(np.linalg.norm(p)))
        for g in grp.elements():
            target = cp.y(p, g)
            xg = act.act(grp.inv(g), x)
            total = cp.zero()
            lit = cp.zero()
            for a, b in zip(frame.a_list, frame.b_list):
                left = x @ act.act(g, a)
                total = total + ctx.inner_cp(left, xg @ b, False)
                lit = lit + ctx.inner_cp(left, x @ b, False)
            worst = max(worst, total.distance(target) / scale)
            literal = max(literal, lit.distance(target) / scale)
            built.append(total.components.reshape(-1))
    rank = matrix_rank(np.stack(built), tol)
    return worst, literal, rank
