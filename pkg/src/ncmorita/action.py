"""Finite group actions on star algebras and their fixed-point algebras."""
from __future__ import annotations

from functools import cached_property

import numpy as np

from .algebra import AlgebraElement, StarAlgebra, as_array
from .checks import CheckReport
from .errors import ArgumentError, DimensionError, MembershipError
from .groups import FiniteGroup, verify_group
from .linalg import DEFAULT_TOL, Tolerance, adjoint, null_space, operator_norm


class AlgebraAction:
    """A finite group acting linearly on an algebra's coordinates.

    ``maps[g]`` is the ``dim x dim`` matrix of ``a -> g a`` in the basis of
    ``algebra``.  Inner and outer automorphisms, and permutation actions on
    commutative algebras, are all expressed the same way.
    """

    def __init__(self, group: FiniteGroup, algebra: StarAlgebra, maps):
        maps = np.asarray(maps, dtype=complex)
        d = algebra.dim
        if maps.shape != (group.order, d, d):
            raise DimensionError(
                f"maps have shape {maps.shape}, expected {(group.order, d, d)}")
        maps.setflags(write=False)
        self.group = group
        self.algebra = algebra
        self.maps = maps

    @classmethod
    def from_automorphisms(cls, group: FiniteGroup, algebra: StarAlgebra, funcs) -> "AlgebraAction":
        """Action given by one matrix function per group element."""
        cols = []
        for f in funcs:
            cols.append(np.stack([algebra.coordinates(f(b)) for b in algebra.basis], axis=1))
        return cls(group, algebra, np.stack(cols))

    @cached_property
    def ambient_ops(self) -> np.ndarray:
        """``(|G|, N^2, N^2)`` operators ``vec(m) -> vec(g m)`` (projecting onto the algebra)."""
        design = self.algebra._design
        pinv = self.algebra._pinv
        return design @ self.maps @ pinv

    @cached_property
    def _sum_op(self) -> np.ndarray:
        return self.ambient_ops.sum(axis=0)

    def act(self, g: int, m) -> np.ndarray:
        m = np.asarray(m, dtype=complex)
        return (self.ambient_ops[g] @ m.reshape(-1)).reshape(m.shape)

    def orbit(self, m) -> np.ndarray:
        """All translates ``g m`` stacked along the first axis."""
        m = np.asarray(m, dtype=complex)
        return (self.ambient_ops @ m.reshape(-1)).reshape((self.group.order,) + m.shape)

    def average(self, m) -> np.ndarray:
        """``sum_g g(m)``."""
        m = np.asarray(m, dtype=complex)
        return (self._sum_op @ m.reshape(-1)).reshape(m.shape)

    def with_maps(self, maps) -> "AlgebraAction":
        return AlgebraAction(self.group, self.algebra, maps)

    def rescaled(self, factor: complex) -> "AlgebraAction":
        return AlgebraAction(self.group, self.algebra.rescaled(factor), self.maps)


def apply(act: AlgebraAction, g: int, a) -> AlgebraElement:
    """``g a`` for an element of the acted-on algebra."""
    g = act.group.check_index(g)
    m = as_array(a)
    act.algebra.coordinates(m)
    return AlgebraElement(act.algebra, act.act(g, m))


def _rel(err: float, scale: float) -> float:
    return err / max(1.0, scale)


def verify_action(act: AlgebraAction, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Homomorphism, *-automorphism, unit and non-degeneracy checks."""
    rep = CheckReport("action")
    grp, alg = act.group, act.algebra
    if not verify_group(grp):
        rep.fail("group", "group table invalid")
        return rep
    d = alg.dim
    eye = np.eye(d)
    rep.record("identity", float(np.max(np.abs(act.maps[grp.identity_index] - eye))), tol.eps_eq)
    for g in grp.elements():
        for h in grp.elements():
            err = np.max(np.abs(act.maps[g] @ act.maps[h] - act.maps[grp.mul(g, h)]))
            rep.record("homomorphism", float(err), tol.eps_eq)
    basis = alg.basis
    n = alg.ambient_dim
    norms = np.linalg.norm(basis, axis=(1, 2))
    scale = np.maximum(1.0, np.outer(norms, norms))
    products = np.einsum("ikl,jlm->ijkm", basis, basis).reshape(d * d, n * n)
    for g in grp.elements():
        op = act.ambient_ops[g]
        images = (basis.reshape(d, n * n) @ op.T).reshape(d, n, n)
        stars = (adjoint(basis).reshape(d, n * n) @ op.T).reshape(d, n, n)
        err = np.linalg.norm(stars - adjoint(images), axis=(1, 2)) / np.maximum(1.0, norms)
        rep.record("involutive", float(np.max(err)), tol.eps_eq)
        moved = (products @ op.T).reshape(d, d, n, n)
        expected = np.einsum("ikl,jlm->ijkm", images, images)
        err = np.linalg.norm(moved - expected, axis=(2, 3)) / scale
        rep.record("multiplicative", float(np.max(err)), tol.eps_eq)
        if alg.unit is not None:
            rep.record("unital", _rel(float(np.linalg.norm(act.act(g, alg.unit) - alg.unit)), 1.0),
                       tol.eps_eq)
    gap = np.inf
    for g in grp.elements():
        if g == grp.identity_index:
            continue
        move = operator_norm(act.maps[g] - eye)
        gap = min(gap, move)
        if move <= tol.eps_rank * max(1.0, operator_norm(act.maps[g])):
            rep.fail("nondegenerate", f"element {g} fixes every basis element")
    if np.isfinite(gap):
        rep.residuals["nondegeneracy_gap"] = float(gap)
    return rep


def rref_basis(vectors: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Reduced row echelon form of the row space of ``vectors`` (rows)."""
    m = np.array(vectors, dtype=complex)
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[p, c]) <= 1e-9:
            continue
        m[[r, p]] = m[[p, r]]
        m[r] /= m[r, c]
        for k in range(rows):
            if k != r:
                m[k] -= m[k, c] * m[r]
        r += 1
    m = m[:r]
    m[np.abs(m) < 1e-14] = 0
    return m


def fixed_point_algebra(act: AlgebraAction, tol: Tolerance = DEFAULT_TOL) -> StarAlgebra:
    """The subalgebra of elements fixed by every group element."""
    d = act.algebra.dim
    eye = np.eye(d)
    stacked = np.vstack([act.maps[g] - eye for g in act.group.elements()])
    kernel = null_space(stacked, tol)
    coeffs = rref_basis(kernel.T, tol)
    basis = [act.algebra.from_coords(c) for c in coeffs]
    return StarAlgebra(basis, unit=act.algebra.unit, name="fixed")


def restrict_action(act: AlgebraAction, sub: StarAlgebra, tol: Tolerance = DEFAULT_TOL) -> AlgebraAction:
    """Restriction of ``act`` to an invariant subalgebra ``sub``."""
    maps = []
    for g in act.group.elements():
        try:
            cols = [sub.coordinates(act.act(g, b), tol) for b in sub.basis]
        except MembershipError as exc:
            raise ArgumentError(f"subalgebra is not invariant under element {g}") from exc
        maps.append(np.stack(cols, axis=1))
    return AlgebraAction(act.group, sub, np.stack(maps))
