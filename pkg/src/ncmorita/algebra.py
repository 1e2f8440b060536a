"""Finite-dimensional C*-algebras as *-closed subspaces of ``M_N``."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .checks import CheckReport
from .errors import DimensionError, MembershipError, PreconditionError
from .linalg import (DEFAULT_TOL, Span, Tolerance, adjoint, as_matrix, null_space,
                     random_complex, subspace_rank, support_projection)


class StarAlgebra:
    """A unital *-subalgebra of ``N x N`` matrices given by an explicit basis.

    The unit is stored explicitly and may be a proper projection (ideals
    and corners are algebras in their own right).  Construction only checks
    shapes; :func:`verify_star_algebra` checks the algebraic invariants.
    """

    def __init__(self, basis: Sequence, unit=None, name: str | None = None):
        mats = [as_matrix(b) for b in basis]
        if not mats:
            raise DimensionError("an algebra needs at least one basis element")
        n = mats[0].shape[0]
        for b in mats:
            if b.shape != (n, n):
                raise DimensionError(f"basis element of shape {b.shape}, expected {(n, n)}")
        self.basis = np.stack(mats)
        self.basis.setflags(write=False)
        if unit is not None:
            unit = as_matrix(unit)
            if unit.shape != (n, n):
                raise DimensionError(f"unit has shape {unit.shape}, expected {(n, n)}")
            unit.setflags(write=False)
        self.unit = unit
        self.name = name

    @classmethod
    def with_support_unit(cls, basis, name=None, tol: Tolerance = DEFAULT_TOL) -> "StarAlgebra":
        """Algebra whose unit is the support projection of ``basis``."""
        return cls(basis, unit=support_projection(basis, tol), name=name)

    @classmethod
    def full_matrix(cls, n: int) -> "StarAlgebra":
        basis = [matrix_unit(n, i, j) for i in range(n) for j in range(n)]
        return cls(basis, unit=np.eye(n), name=f"M{n}")

    @classmethod
    def diagonal(cls, n: int) -> "StarAlgebra":
        return cls([matrix_unit(n, i, i) for i in range(n)], unit=np.eye(n), name=f"C^{n}")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def _design(self) -> np.ndarray:
        return self.basis.reshape(self.dim, -1).T

    @cached_property
    def _pinv(self) -> np.ndarray:
        return np.linalg.pinv(self._design)

    @cached_property
    def span(self) -> Span:
        return Span(list(self.basis))

    def _check_shape(self, m: np.ndarray):
        if m.shape != (self.ambient_dim, self.ambient_dim):
            raise DimensionError(f"matrix of shape {m.shape} outside ambient M_{self.ambient_dim}")

    def raw_coords(self, m) -> np.ndarray:
        """Least-squares coordinates of ``m``; no membership check."""
        m = np.asarray(m, dtype=complex)
        return self._pinv @ m.reshape(-1)

    def from_coords(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=complex)
        return np.tensordot(c, self.basis, axes=(0, 0))

    def membership_residual(self, m) -> float:
        m = np.asarray(m, dtype=complex)
        self._check_shape(m)
        err = np.linalg.norm(m - self.from_coords(self.raw_coords(m)))
        return float(err) / max(1.0, float(np.linalg.norm(m)))

    def contains(self, m, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.membership_residual(m) <= tol.eps_eq

    def coordinates(self, m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        m = as_matrix(m)
        res = self.membership_residual(m)
        if res > tol.eps_eq:
            raise MembershipError(f"matrix not in {self.name or 'algebra'} (residual {res:.2e})")
        return self.raw_coords(m)

    def element(self, m, tol: Tolerance = DEFAULT_TOL) -> "AlgebraElement":
        m = as_matrix(m)
        self.coordinates(m, tol)
        return AlgebraElement(self, m)

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return self.from_coords(random_complex(rng, self.dim))

    def one(self) -> np.ndarray:
        if self.unit is None:
            raise PreconditionError(f"{self.name or 'algebra'} has no unit")
        return np.array(self.unit)

    def rescaled(self, factor: complex) -> "StarAlgebra":
        return StarAlgebra(self.basis * factor, unit=self.unit, name=self.name)

    def __repr__(self):
        return f"StarAlgebra({self.name or '?'}, dim={self.dim}, N={self.ambient_dim})"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A matrix tagged with the algebra it is meant to live in."""

    algebra: StarAlgebra
    matrix: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def _wrap(self, m):
        return AlgebraElement(self.algebra, m)

    def __add__(self, other):
        return self._wrap(self.matrix + np.asarray(other))

    def __sub__(self, other):
        return self._wrap(self.matrix - np.asarray(other))

    def __neg__(self):
        return self._wrap(-self.matrix)

    def __mul__(self, scalar):
        return self._wrap(self.matrix * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return self._wrap(self.matrix @ np.asarray(other))

    def adjoint(self) -> "AlgebraElement":
        return self._wrap(adjoint(self.matrix))

    def coordinates(self, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        return self.algebra.coordinates(self.matrix, tol)


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1
    return e


def as_array(x) -> np.ndarray:
    """Matrix of an :class:`AlgebraElement` or array-like."""
    if isinstance(x, AlgebraElement):
        return x.matrix
    return np.asarray(x, dtype=complex)


def coordinates(a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Unique coefficients of ``a`` in its algebra's basis."""
    return a.algebra.coordinates(a.matrix, tol)


def verify_star_algebra(alg: StarAlgebra, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Check linear independence, product/adjoint closure and the unit laws."""
    rep = CheckReport("star_algebra")
    if subspace_rank(list(alg.basis), tol) != alg.dim:
        rep.fail("independence", "basis is linearly dependent")
    for i, b in enumerate(alg.basis):
        rep.record("adjoint_closure", alg.membership_residual(adjoint(b)), tol.eps_eq)
        for c in alg.basis:
            rep.record("product_closure", alg.membership_residual(b @ c), tol.eps_eq)
    if alg.unit is None:
        rep.fail("unit", "no unit supplied")
    else:
        u = alg.unit
        rep.record("unit_membership", alg.membership_residual(u), tol.eps_eq)
        scale = max(1.0, float(np.max(np.abs(alg.basis))))
        worst = max(float(np.max(np.abs(u @ b - b))) for b in alg.basis)
        worst = max(worst, max(float(np.max(np.abs(b @ u - b))) for b in alg.basis))
        rep.record("unit_identity", worst / scale, tol.eps_eq)
    return rep


def _candidate_span(candidate_basis, n: int, tol: Tolerance) -> Span:
    mats = [as_matrix(x) for x in candidate_basis]
    for x in mats:
        if x.shape != (n, n):
            raise DimensionError(f"ideal element of shape {x.shape}, ambient is M_{n}")
    return Span(mats, tol, shape=(n, n))


def is_ideal(candidate_basis, ambient: StarAlgebra, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Is ``span(candidate_basis)`` a two-sided *-ideal of ``ambient``?"""
    return ideal_report(candidate_basis, ambient, tol).passed


def ideal_report(candidate_basis, ambient: StarAlgebra, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    rep = CheckReport("ideal")
    span = _candidate_span(candidate_basis, ambient.ambient_dim, tol)
    for x in candidate_basis:
        x = as_matrix(x)
        rep.record("inside_ambient", ambient.membership_residual(x), tol.eps_eq)
        rep.record("adjoint_closure", span.residual(adjoint(x)), tol.eps_eq)
        for a in ambient.basis:
            rep.record("left_absorption", span.residual(a @ x), tol.eps_eq)
            rep.record("right_absorption", span.residual(x @ a), tol.eps_eq)
    return rep


def left_annihilator_dim(ideal_basis, ambient: StarAlgebra, tol: Tolerance = DEFAULT_TOL) -> int:
    """Dimension of ``{b in ambient : b x = 0 for all x in the ideal}``."""
    mats = [as_matrix(x) for x in ideal_basis]
    if not mats:
        return ambient.dim
    blocks = [np.stack([(b @ x).reshape(-1) for b in ambient.basis], axis=1) for x in mats]
    return null_space(np.vstack(blocks), tol).shape[1]


def is_essential_ideal(ideal_basis, ambient: StarAlgebra, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the ideal has trivial annihilator in ``ambient``."""
    if not is_ideal(ideal_basis, ambient, tol):
        raise PreconditionError("candidate is not an ideal of the ambient algebra")
    return left_annihilator_dim(ideal_basis, ambient, tol) == 0
