"""The transfer inner product ``<a, b> = sum_g g(a* b)`` and module frames."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .action import AlgebraAction, fixed_point_algebra, verify_action
from .algebra import AlgebraElement, StarAlgebra, as_array, verify_star_algebra
from .bimodule import inner_cp, phi
from .checks import CheckReport
from .crossed import CrossedProduct
from .errors import ArgumentError, MembershipError, PreconditionError
from .linalg import (DEFAULT_TOL, Tolerance, adjoint, matrix_rank, operator_norm, psd_defect,
                     solve_design)

DEFAULT_SEED = 1729
DEFAULT_SAMPLES = 8


@dataclass(eq=False)
class CoveringCandidate:
    """A triple ``(A, A~, G)``: an action on ``A~`` and the claimed base ``A``.

    ``metadata`` carries generator facts (for set models, ``free``) that the
    certifiers never read; they are the ground truth results are scored
    against.
    """

    action: AlgebraAction
    base: StarAlgebra
    metadata: dict = field(default_factory=dict)

    @property
    def group(self):
        return self.action.group

    @property
    def algebra(self) -> StarAlgebra:
        return self.action.algebra

    @cached_property
    def crossed(self) -> CrossedProduct:
        return CrossedProduct(self.action)

    def validate(self, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
        """``base`` must span exactly the fixed-point algebra of the action."""
        rep = CheckReport("fixed_point_identity")
        fixed = fixed_point_algebra(self.action, tol)
        for b in self.base.basis:
            rep.record("base_in_algebra", self.algebra.membership_residual(b), tol.eps_eq)
            moved = self.action.orbit(b) - b
            scale = max(1.0, float(np.linalg.norm(b)))
            rep.record("base_invariant", float(np.max(np.linalg.norm(moved, axis=(1, 2)))) / scale,
                       tol.eps_eq)
        if fixed.dim != self.base.dim:
            rep.fail("dimension", f"base has dimension {self.base.dim}, fixed points {fixed.dim}")
        for f in fixed.basis:
            rep.record("fixed_in_base", self.base.membership_residual(f), tol.eps_eq)
        rep.residuals["base_dim"] = float(self.base.dim)
        return rep

    def rescaled(self, factor: complex) -> "CoveringCandidate":
        return CoveringCandidate(self.action.rescaled(factor), self.base, dict(self.metadata))


def _in_algebra(cand: CoveringCandidate, x, tol: Tolerance) -> np.ndarray:
    m = as_array(x)
    try:
        cand.algebra.coordinates(m, tol)
    except MembershipError as exc:
        raise ArgumentError(f"argument outside the covering algebra: {exc}") from exc
    return m


def transfer_inner(cand: CoveringCandidate, a, b, tol: Tolerance = DEFAULT_TOL) -> AlgebraElement:
    """``sum_g g(a* b)``, an element of the base algebra."""
    a, b = _in_algebra(cand, a, tol), _in_algebra(cand, b, tol)
    return AlgebraElement(cand.base, cand.action.average(adjoint(a) @ b))


def _inner(cand: CoveringCandidate, a, b) -> np.ndarray:
    return cand.action.average(adjoint(a) @ b)


def hilbert_norm(cand: CoveringCandidate, x, tol: Tolerance = DEFAULT_TOL) -> float:
    """``||<x, x>||^(1/2)``."""
    return float(np.sqrt(operator_norm(transfer_inner(cand, x, x, tol).matrix)))


def _sample_sets(cand: CoveringCandidate, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    alg, base = cand.algebra, cand.base
    xs = list(alg.basis) + [alg.random(rng) for _ in range(samples)]
    ys = list(alg.basis[::-1]) + [alg.random(rng) for _ in range(samples)]
    avals = list(base.basis) + [base.random(rng) for _ in range(samples)]
    return xs, ys, avals


def verify_hilbert_axioms(cand: CoveringCandidate, samples: int = DEFAULT_SAMPLES,
                          tol: Tolerance = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> CheckReport:
    """Positivity, definiteness, symmetry and base-linearity of the inner product.

    Samples are the basis elements followed by ``samples`` pseudo-random
    elements drawn from ``numpy.random.default_rng(seed)``.
    """
    rep = CheckReport("hilbert_axioms")
    xs, ys, avals = _sample_sets(cand, samples, seed)
    for x, y, a in zip(xs, ys, avals):
        nx, ny, na = (float(np.linalg.norm(v)) for v in (x, y, a))
        xx = _inner(cand, x, x)
        rep.record("positivity", psd_defect(xx, tol), 0.0)
        if nx > tol.eps_eq and operator_norm(xx) <= tol.eps_psd * nx ** 2:
            rep.fail("definiteness", "nonzero x with <x, x> = 0")
        xy, yx = _inner(cand, x, y), _inner(cand, y, x)
        rep.record("symmetry", float(np.linalg.norm(xy - adjoint(yx))) / max(1.0, nx * ny),
                   tol.eps_eq * 10)
        lhs = _inner(cand, x, y @ a)
        rep.record("base_linearity", float(np.linalg.norm(lhs - xy @ a)) / max(1.0, nx * ny * na),
                   tol.eps_eq * 10)
    rep.residuals.setdefault("definiteness", 0.0)
    return rep


@dataclass
class FrameWitness:
    """Families with ``sum_j <a_j, b_j>_cp = 1`` in the crossed product."""

    a_list: list[np.ndarray]
    b_list: list[np.ndarray]
    residual: float

    @property
    def size(self) -> int:
        return len(self.a_list)

    def to_dict(self) -> dict:
        return {"found": True, "size": self.size, "residual": self.residual}


@dataclass
class FrameInfeasible:
    """The least-squares minimum of ``||sum_j <a_j, b_j>_cp - 1||`` is too large."""

    residual: float
    phi_rank: int
    cp_dim: int

    def to_dict(self) -> dict:
        return {"found": False, "residual": self.residual, "phi_rank": self.phi_rank,
                "cp_dim": self.cp_dim}


def frame_residual(cand: CoveringCandidate, a_list, b_list) -> float:
    """Frobenius norm of ``sum_j <a_j, b_j>_cp - 1`` over all group components."""
    cp = cand.crossed
    total = cp.zero()
    for a, b in zip(a_list, b_list):
        total = total + inner_cp(cp, a, b, check=False)
    return float(np.linalg.norm(total.components - cp.unit().components))


def phi_image(cand: CoveringCandidate) -> list:
    """``phi(b_i, b_j)`` over all pairs of algebra basis elements."""
    cp = cand.crossed
    return [phi(cp, bi, bj, check=False) for bi in cand.algebra.basis for bj in cand.algebra.basis]


def phi_rank(cand: CoveringCandidate, tol: Tolerance = DEFAULT_TOL) -> int:
    design = np.stack([p.components.reshape(-1) for p in phi_image(cand)])
    return matrix_rank(design, tol)


def find_frame(cand: CoveringCandidate, tol: Tolerance = DEFAULT_TOL):
    """Solve ``1 = sum_j <a_j, b_j>_cp`` by one least-squares solve.

    The unknown is the coefficient matrix ``C`` of ``sum_ij C_ij <e_i, e_j>_cp``
    over the algebra basis ``e``.  On success ``C = U S V*`` is split into
    ``a_k = s_k sum_i U_ik e_i`` and ``b_k = sum_j V_jk e_j``.  Returns a
    :class:`FrameWitness` or a :class:`FrameInfeasible` carrying the minimal
    residual.
    """
    cp = cand.crossed
    basis = cand.algebra.basis
    d = len(basis)
    columns = [inner_cp(cp, bi, bj, check=False).components.reshape(-1) for bi in basis for bj in basis]
    design = np.stack(columns, axis=1)
    target = cp.unit().components.reshape(-1)
    coeffs, residual = solve_design(design, target, tol)
    if residual > tol.eps_solve:
        return FrameInfeasible(residual, matrix_rank(design, tol), cp.dim)
    c = coeffs.reshape(d, d)
    u, s, vh = np.linalg.svd(c)
    keep = s > tol.eps_rank * max(1.0, float(s[0]))
    a_list = [cand.algebra.from_coords(u[:, k] * s[k]) for k in np.flatnonzero(keep)]
    b_list = [cand.algebra.from_coords(vh[k].conj()) for k in np.flatnonzero(keep)]
    return FrameWitness(a_list, b_list, frame_residual(cand, a_list, b_list))


@dataclass
class ModuleFrame:
    """Pairs with ``sum_j x_j <y_j, x> = x`` for every ``x`` in ``A~``.

    When ``self_dual`` the pairs coincide (``x_j = y_j``), i.e. a standard
    module frame.
    """

    found: bool
    residual: float
    x_list: list[np.ndarray]
    y_list: list[np.ndarray]
    self_dual: bool

    @property
    def size(self) -> int:
        return len(self.x_list)

    def to_dict(self) -> dict:
        return {"found": self.found, "residual": self.residual, "size": self.size,
                "self_dual": self.self_dual}


def module_frame_residual(cand: CoveringCandidate, x_list, y_list) -> float:
    worst = 0.0
    for x in cand.algebra.basis:
        recon = sum((xj @ _inner(cand, yj, x) for xj, yj in zip(x_list, y_list)),
                    np.zeros_like(x))
        worst = max(worst, float(np.linalg.norm(recon - x)) / max(1.0, float(np.linalg.norm(x))))
    return worst


def find_module_frame(cand: CoveringCandidate, tol: Tolerance = DEFAULT_TOL) -> ModuleFrame:
    """Dual-basis solve certifying that ``A~`` is finitely generated projective over ``A``."""
    alg = cand.algebra
    basis = alg.basis
    d = len(basis)
    inners = np.array([[_inner(cand, ek, x) for x in basis] for ek in basis])  # [k, x]
    columns = []
    for i in range(d):
        for k in range(d):
            columns.append(np.stack([basis[i] @ inners[k, xi] for xi in range(d)]).reshape(-1))
    design = np.stack(columns, axis=1)
    target = basis.reshape(-1)
    coeffs, residual = solve_design(design, target, tol)
    c = coeffs.reshape(d, d)
    herm = float(np.max(np.abs(c - adjoint(c)))) <= tol.eps_eq * max(1.0, float(np.max(np.abs(c))))
    w, v = np.linalg.eigh((c + adjoint(c)) / 2)
    self_dual = herm and float(w[0]) >= -tol.eps_psd * max(1.0, float(np.max(np.abs(w))))
    if self_dual:
        keep = np.flatnonzero(w > tol.eps_rank * max(1.0, float(w[-1])))
        x_list = [alg.from_coords(v[:, k] * np.sqrt(w[k])) for k in keep]
        y_list = list(x_list)
    else:
        u, s, vh = np.linalg.svd(c)
        keep = np.flatnonzero(s > tol.eps_rank * max(1.0, float(s[0])))
        x_list = [alg.from_coords(u[:, k] * s[k]) for k in keep]
        y_list = [alg.from_coords(vh[k].conj()) for k in keep]
    res = module_frame_residual(cand, x_list, y_list)
    return ModuleFrame(res <= tol.eps_solve and residual <= tol.eps_solve, res, x_list, y_list,
                       self_dual)


@dataclass
class UnitalCoveringCertificate:
    action: CheckReport
    algebra: CheckReport
    fixed_point: CheckReport
    hilbert: CheckReport
    module_frame: ModuleFrame
    galois_frame: FrameWitness | FrameInfeasible

    @property
    def certified(self) -> bool:
        """Action, fixed points, Hilbert axioms and f.g. projectivity all hold."""
        return bool(self.action and self.algebra and self.fixed_point and self.hilbert
                    and self.module_frame.found)

    @property
    def galois_frame_found(self) -> bool:
        return isinstance(self.galois_frame, FrameWitness)

    @property
    def discrepancy(self) -> bool:
        """Projective module but no Galois frame (branched models)."""
        return self.module_frame.found != self.galois_frame_found

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "galois_frame_found": self.galois_frame_found,
            "discrepancy": self.discrepancy,
            "action": self.action.to_dict(),
            "algebra": self.algebra.to_dict(),
            "fixed_point": self.fixed_point.to_dict(),
            "hilbert": self.hilbert.to_dict(),
            "module_frame": self.module_frame.to_dict(),
            "galois_frame": self.galois_frame.to_dict(),
        }


def certify_unital_covering(cand: CoveringCandidate, tol: Tolerance = DEFAULT_TOL,
                            samples: int = DEFAULT_SAMPLES,
                            seed: int = DEFAULT_SEED) -> UnitalCoveringCertificate:
    if cand.algebra.unit is None:
        raise PreconditionError("unital covering certificate needs a unital algebra")
    return UnitalCoveringCertificate(
        action=verify_action(cand.action, tol),
        algebra=verify_star_algebra(cand.algebra, tol),
        fixed_point=cand.validate(tol),
        hilbert=verify_hilbert_axioms(cand, samples, tol, seed),
        module_frame=find_module_frame(cand, tol),
        galois_frame=find_frame(cand, tol),
    )
