"""Generators for covering candidates and the compactification / ideal-family checks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .action import AlgebraAction, restrict_action, rref_basis, verify_action, fixed_point_algebra
from .algebra import StarAlgebra, ideal_report, left_annihilator_dim
from .errors import ActionRejected, ArgumentError, PreconditionError
from .groups import FiniteGroup
from .hilbert import CoveringCandidate, UnitalCoveringCertificate, certify_unital_covering
from .linalg import (DEFAULT_TOL, Span, Tolerance, adjoint, as_matrix, null_space,
                     row_space_basis, subspace_rank, support_projection)
from .morita import EquivalenceCertificate, MoritaContext, certify_strong_morita


@dataclass(frozen=True)
class SetAction:
    """A group acting on ``points`` by ``perms[g]`` (``y -> perms[g][y]``)."""

    points: int
    perms: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, perms) -> "SetAction":
        perms = tuple(tuple(int(v) for v in p) for p in perms)
        return cls(len(perms[0]) if perms else 0, perms)

    def check(self, group: FiniteGroup):
        if len(self.perms) != group.order:
            raise ArgumentError(f"{len(self.perms)} permutations for a group of order {group.order}")
        full = list(range(self.points))
        for g, p in enumerate(self.perms):
            if sorted(p) != full:
                raise ArgumentError(f"permutation for element {g} is not a bijection of the points")
        if list(self.perms[group.identity_index]) != full:
            raise ArgumentError("identity element does not act trivially")
        for g in group.elements():
            for h in group.elements():
                gh = self.perms[group.mul(g, h)]
                if any(self.perms[g][self.perms[h][y]] != gh[y] for y in full):
                    raise ArgumentError(f"perm({g}) o perm({h}) != perm({g}*{h})")

    def orbits(self) -> list[list[int]]:
        seen, out = set(), []
        for y in range(self.points):
            if y not in seen:
                orb = sorted({p[y] for p in self.perms})
                seen.update(orb)
                out.append(orb)
        return out

    def is_free(self, group: FiniteGroup) -> bool:
        return all(self.perms[g][y] != y for g in group.elements() if g != group.identity_index
                   for y in range(self.points))

    def is_faithful(self, group: FiniteGroup) -> bool:
        return all(list(self.perms[g]) != list(range(self.points))
                   for g in group.elements() if g != group.identity_index)


def covering_from_set_action(sa: SetAction, group: FiniteGroup,
                             tol: Tolerance = DEFAULT_TOL) -> CoveringCandidate:
    """Functions on the points, permuted by the group; base = functions constant on orbits."""
    sa.check(group)
    n = sa.points
    if not sa.is_faithful(group):
        raise ActionRejected("set action is not faithful (degenerate algebra action)")
    alg = StarAlgebra.diagonal(n)
    maps = np.zeros((group.order, n, n))
    for g, p in enumerate(sa.perms):
        maps[g, list(p), list(range(n))] = 1
    orbits = sa.orbits()
    base = StarAlgebra([np.diag([1.0 if y in orb else 0.0 for y in range(n)]) for orb in orbits],
                       unit=np.eye(n), name="orbit functions")
    meta = {"kind": "set-action", "free": sa.is_free(group), "orbits": orbits, "points": n,
            "group": group.name}
    return CoveringCandidate(AlgebraAction(group, alg, maps), base, meta)


def inner_matrix_model(n: int, group: FiniteGroup, unitaries,
                       tol: Tolerance = DEFAULT_TOL) -> CoveringCandidate:
    """``M_n`` with ``g`` acting by conjugation with ``unitaries[g]``."""
    us = [as_matrix(u) for u in unitaries]
    if len(us) != group.order:
        raise ArgumentError(f"{len(us)} unitaries for a group of order {group.order}")
    for g, u in enumerate(us):
        if u.shape != (n, n):
            raise ArgumentError(f"unitary {g} has shape {u.shape}, expected {(n, n)}")
        if np.max(np.abs(u @ adjoint(u) - np.eye(n))) > 1e3 * tol.eps_eq:
            raise ArgumentError(f"matrix for element {g} is not unitary")
    alg = StarAlgebra.full_matrix(n)
    act = AlgebraAction.from_automorphisms(group, alg, [lambda m, u=u: u @ m @ adjoint(u)
                                                        for u in us])
    rep = verify_action(act, tol)
    if any(f.startswith(("homomorphism", "identity")) for f in rep.failures):
        raise ArgumentError("g -> Ad(u_g) is not a group homomorphism")
    if not rep.passed:
        raise ActionRejected("inner action rejected: " + "; ".join(rep.failures), rep)
    base = fixed_point_algebra(act, tol)
    base.name = "commutant"
    return CoveringCandidate(act, base, {"kind": "inner-matrix", "n": n, "group": group.name})


def direct_sum(cands: list[CoveringCandidate]) -> CoveringCandidate:
    """Block-diagonal sum of candidates over the same group."""
    if not cands:
        raise ArgumentError("direct sum of nothing")
    group = cands[0].group
    if any(c.group.order != group.order or not np.array_equal(c.group.table, group.table)
           for c in cands):
        raise ArgumentError("direct sum needs a common group")
    sizes = [c.algebra.ambient_dim for c in cands]
    total = sum(sizes)
    offsets = np.cumsum([0] + sizes)

    def embed(m, k):
        out = np.zeros((total, total), dtype=complex)
        out[offsets[k]:offsets[k + 1], offsets[k]:offsets[k + 1]] = m
        return out

    basis, base_basis = [], []
    for k, c in enumerate(cands):
        basis += [embed(b, k) for b in c.algebra.basis]
        base_basis += [embed(b, k) for b in c.base.basis]
    unit = sum(embed(c.algebra.one(), k) for k, c in enumerate(cands))
    base_unit = sum(embed(c.base.one(), k) for k, c in enumerate(cands))
    alg = StarAlgebra(basis, unit=unit, name="direct sum")
    dims = [c.algebra.dim for c in cands]
    d = sum(dims)
    maps = np.zeros((group.order, d, d), dtype=complex)
    start = np.cumsum([0] + dims)
    for k, c in enumerate(cands):
        maps[:, start[k]:start[k + 1], start[k]:start[k + 1]] = c.action.maps
    base = StarAlgebra(base_basis, unit=base_unit, name="direct sum base")
    free = [c.metadata.get("free") for c in cands]
    meta = {"kind": "direct-sum", "parts": len(cands), "group": group.name,
            "free": all(free) if None not in free else None,
            "blocks": [[int(start[k]), int(start[k + 1])] for k in range(len(cands))]}
    return CoveringCandidate(AlgebraAction(group, alg, maps), base, meta)


def regular_set_action(group: FiniteGroup) -> SetAction:
    return SetAction.of(group.coset_action({group.identity_index}))


def set_action_from_subgroups(group: FiniteGroup, subgroups) -> SetAction:
    """Disjoint union of the coset spaces ``G/H`` for the given subgroups."""
    perms = [[] for _ in group.elements()]
    offset = 0
    for h in subgroups:
        part = group.coset_action(h)
        for g in group.elements():
            perms[g] += [offset + v for v in part[g]]
        offset += len(part[0])
    return SetAction.of(perms)


def enumerate_set_actions(group: FiniteGroup, max_points: int = 12):
    """Every faithful action with at most ``max_points`` points, up to isomorphism.

    Yields ``(label, SetAction)``; actions are disjoint unions of coset
    spaces over conjugacy classes of subgroups.
    """
    classes = group.subgroup_classes()
    sizes = [group.order // len(h) for h in classes]

    def multisets(start, budget):
        yield []
        for i in range(start, len(classes)):
            if sizes[i] <= budget:
                for rest in multisets(i, budget - sizes[i]):
                    yield [i] + rest

    for combo in multisets(0, max_points):
        if not combo:
            continue
        sa = set_action_from_subgroups(group, [classes[i] for i in combo])
        if not sa.is_faithful(group):
            continue
        label = "+".join(f"{group.name}/{len(classes[i])}" for i in combo)
        yield label, sa


def two_fiber_model(group_order: int = 2) -> tuple[CoveringCandidate, dict]:
    """Cyclic group acting freely on two fibers over the base points ``p`` and ``q``.

    Returns the candidate and the fiber map ``{"p": [...], "q": [...]}``.
    """
    from .groups import cyclic_group
    grp = cyclic_group(group_order)
    m = group_order
    perms = [[(y + g) % m for y in range(m)] + [m + (y + g) % m for y in range(m)]
             for g in range(m)]
    cand = covering_from_set_action(SetAction.of(perms), grp)
    return cand, {"p": list(range(m)), "q": list(range(m, 2 * m))}


def _basis_from_coords(alg: StarAlgebra, coords, tol: Tolerance) -> list[np.ndarray]:
    if len(coords) == 0:
        return []
    return [alg.from_coords(c) for c in rref_basis(np.asarray(coords), tol)]


def wta_subalgebra(bigcover: CoveringCandidate, ideal_basis, tol: Tolerance = DEFAULT_TOL
                   ) -> list[np.ndarray]:
    """Basis of ``{a in B~ : <b, a> in A for every b in B~}``."""
    ideal_basis = [as_matrix(x) for x in ideal_basis]
    big = bigcover.algebra
    if not ideal_report(ideal_basis, bigcover.base, tol).passed:
        raise PreconditionError("A is not an ideal of the base algebra B")
    span = Span(ideal_basis, tol, shape=(big.ambient_dim, big.ambient_dim))
    comp = span.complement_projector()
    avg = bigcover.action.average
    blocks = []
    for b in big.basis:
        cols = [avg(adjoint(b) @ e).reshape(-1) for e in big.basis]
        blocks.append(comp @ np.stack(cols, axis=1))
    kernel = null_space(np.vstack(blocks), tol)
    return _basis_from_coords(big, kernel.T, tol)


def _subalgebra(basis, name: str, tol: Tolerance) -> StarAlgebra:
    return StarAlgebra.with_support_unit(basis, name=name, tol=tol)


@dataclass
class CompactificationReport:
    essential: bool
    caveats: list[str]
    unital: UnitalCoveringCertificate | None
    wta_dim: int
    induced: EquivalenceCertificate | None
    base_matches: bool
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "essential": self.essential,
            "caveats": list(self.caveats),
            "failures": list(self.failures),
            "unital": None if self.unital is None else self.unital.to_dict(),
            "wta_dim": self.wta_dim,
            "base_matches": self.base_matches,
            "induced": None if self.induced is None else self.induced.to_dict(),
        }


def verify_compactification_covering(b_cover: CoveringCandidate, a_basis,
                                     tol: Tolerance = DEFAULT_TOL, samples: int = 4,
                                     context_samples: int = 50) -> CompactificationReport:
    """Essential ideal, unital covering of ``(B, B~, G)``, and the induced ``A~``.

    At finite dimension an essential ideal is the whole algebra, so a
    passing report always has ``A = B``; a proper ideal is reported as
    non-essential and the remaining checks still run.
    """
    if b_cover.algebra.unit is None or b_cover.base.unit is None:
        raise PreconditionError("compactifying algebras must be unital")
    a_basis = [as_matrix(x) for x in a_basis]
    failures, caveats = [], []
    irep = ideal_report(a_basis, b_cover.base, tol)
    if not irep.passed:
        raise PreconditionError("A is not an ideal of B: " + "; ".join(irep.failures))
    essential = bool(a_basis) and left_annihilator_dim(a_basis, b_cover.base, tol) == 0
    if essential:
        caveats.append("compactification is trivial at finite dimension (A = B)")
    else:
        failures.append("essential: A has a nonzero annihilator in B")
        caveats.append("A is not essential in B; remaining checks run on the ideal as given")

    unital = certify_unital_covering(b_cover, tol, samples)
    if not unital.certified:
        failures.append("unital_covering: (B, B~, G) is not certified")

    wta = wta_subalgebra(b_cover, a_basis, tol)
    induced = None
    base_matches = False
    if wta and a_basis:
        sub = _subalgebra(wta, "A~", tol)
        try:
            act = restrict_action(b_cover.action, sub, tol)
        except ArgumentError as exc:
            failures.append(f"wta: {exc}")
        else:
            base = _subalgebra(a_basis, "A", tol)
            cand = CoveringCandidate(act, base, {"kind": "induced"})
            base_matches = cand.validate(tol).passed
            if not base_matches:
                failures.append("wta: fixed points of A~ differ from A")
            induced = certify_strong_morita(MoritaContext.from_covering(cand), tol, samples,
                                            context_samples=context_samples)
            if not induced.verdict:
                failures.append("induced: equivalence bimodule not certified")
    else:
        failures.append("wta: induced algebra is zero")
    return CompactificationReport(essential, caveats, unital, len(wta), induced, base_matches,
                                  failures)


@dataclass
class IdealFamily:
    ideals: list[list[np.ndarray]]


def corner(cand: CoveringCandidate, ideal_basis, tol: Tolerance = DEFAULT_TOL) -> CoveringCandidate:
    """The corner ``I A~ I`` with the restricted action, as its own candidate."""
    alg = cand.algebra
    prods = [i1 @ x @ i2 for i1 in ideal_basis for x in alg.basis for i2 in ideal_basis]
    rows = row_space_basis(np.stack([alg.raw_coords(p) for p in prods]), tol)
    sub = StarAlgebra(_basis_from_coords(alg, rows, tol), unit=support_projection(ideal_basis, tol),
                      name="corner")
    act = restrict_action(cand.action, sub, tol)
    base = StarAlgebra(ideal_basis, unit=sub.unit, name="ideal")
    return CoveringCandidate(act, base, {"kind": "corner"})


@dataclass
class GeneralCoveringReport:
    density_rank: int
    base_dim: int
    corners: list[CompactificationReport]
    failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"passed": self.passed, "density_rank": self.density_rank,
                "base_dim": self.base_dim, "failures": list(self.failures),
                "corners": [c.to_dict() for c in self.corners],
                "notes": ["each corner serves as its own compactification (already unital)"]}


def verify_general_covering(cand: CoveringCandidate, fam: IdealFamily,
                            tol: Tolerance = DEFAULT_TOL) -> GeneralCoveringReport:
    """Ideal family spanning ``A`` whose corners are all coverings."""
    if not fam.ideals:
        raise ArgumentError("ideal family is empty")
    failures = []
    allv = [as_matrix(x) for ideal in fam.ideals for x in ideal]
    rank = subspace_rank(allv, tol)
    contained = all(cand.base.contains(x, tol) for x in allv)
    if rank != cand.base.dim or not contained:
        failures.append(f"density: union spans rank {rank} of dim {cand.base.dim}")
    corners = []
    for k, ideal in enumerate(fam.ideals):
        ideal = [as_matrix(x) for x in ideal]
        irep = ideal_report(ideal, cand.base, tol)
        if not irep.passed:
            failures.append(f"ideal {k}: " + "; ".join(irep.failures))
            continue
        sub = corner(cand, ideal, tol)
        rep = verify_compactification_covering(sub, ideal, tol)
        corners.append(rep)
        if not rep.passed:
            failures.append(f"corner {k}: " + "; ".join(rep.failures))
    return GeneralCoveringReport(rank, cand.base.dim, corners, failures)


def irreducible_representations(group: FiniteGroup) -> list[list[np.ndarray]]:
    """Unitary irreps of the named groups ``C_n``, ``V4`` and ``S3``.

    Each irrep is a list of matrices indexed by group element.  Used as
    ground truth for inner models: ``M_n x| G`` is Morita equivalent to the
    commutant exactly when every irrep occurs in ``g -> u_g``.
    """
    name, order = group.name, group.order
    if name.startswith("C"):
        w = np.exp(2j * np.pi / order)
        return [[np.array([[w ** (k * g)]]) for g in range(order)] for k in range(order)]
    if name == "V4":
        return [[np.array([[(-1.0) ** (s * (g & 1) + t * (g >> 1 & 1))]]) for g in range(4)]
                for s in (0, 1) for t in (0, 1)]
    if name == "S3":
        perms = [np.eye(3)[:, [int(c) for c in label]] for label in group.labels]
        v = np.array([[1, -1, 0], [1, 1, -2]], dtype=float).T
        v /= np.linalg.norm(v, axis=0)
        standard = [v.T @ p @ v for p in perms]
        sign = [np.array([[np.linalg.det(p)]]) for p in perms]
        trivial = [np.eye(1) for _ in perms]
        return [standard, sign, trivial]
    raise ArgumentError(f"no irreps tabulated for {name}")


def block_representation(group: FiniteGroup, size: int) -> tuple[list[np.ndarray], bool]:
    """Direct sum of irreps (cycling through all of them) filling dimension ``size``.

    Returns the unitaries and whether every irrep occurs.
    """
    irreps = irreducible_representations(group)
    chosen, dim, k = [], 0, 0
    while dim < size:
        cands = [i for i in range(len(irreps)) if irreps[i][0].shape[0] <= size - dim]
        if not cands:
            raise ArgumentError(f"cannot fill dimension {size} with irreps of {group.name}")
        i = next((j for j in range(k, k + len(irreps)) if j % len(irreps) in cands)) % len(irreps)
        chosen.append(i)
        dim += irreps[i][0].shape[0]
        k = i + 1
    us = []
    for g in group.elements():
        u = np.zeros((size, size), dtype=complex)
        off = 0
        for i in chosen:
            m = irreps[i][g]
            u[off:off + m.shape[0], off:off + m.shape[0]] = m
            off += m.shape[0]
        us.append(u)
    return us, set(chosen) == set(range(len(irreps)))
