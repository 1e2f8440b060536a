"""Tolerance-aware dense complex linear algebra.

Every other module funnels its numerical decisions (equality, positivity,
rank, solvability) through the helpers here so that a single
:class:`Tolerance` controls the whole pipeline.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DimensionError

# Singular values below this are structural zeros regardless of the family's
# scale (products that vanish exactly in exact arithmetic).
ABSOLUTE_RANK_FLOOR = 1e-13


@dataclass(frozen=True)
class Tolerance:
    """Numerical slack used by all checks.

    eps_eq
        entrywise / relative-residual equality slack.
    eps_psd
        eigenvalue floor for positivity.
    eps_rank
        singular-value cutoff, relative to the largest singular value.
    eps_solve
        residual under which a least-squares solve counts as exact.
    """

    eps_eq: float = 1e-10
    eps_psd: float = 1e-9
    eps_rank: float = 1e-9
    eps_solve: float = 1e-8

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not 0 < value < 1:
                raise ValueError(f"tolerance {name}={value!r} must lie in (0, 1)")

    @classmethod
    def from_scale(cls, tol: float) -> "Tolerance":
        """Tolerance whose ``eps_eq`` is ``tol``, keeping the default ratios."""
        return cls(eps_eq=tol, eps_psd=10 * tol, eps_rank=10 * tol, eps_solve=100 * tol)

    def with_(self, **changes) -> "Tolerance":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOL = Tolerance()


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` into a finite 2-d complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def operator_norm(m) -> float:
    """Largest singular value of ``m``."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"operator norm needs a nonempty matrix, got shape {m.shape}")
    return float(np.linalg.norm(m, 2))


def _check_square(m: np.ndarray):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")


def hermitian_defect(m) -> float:
    """``max|m - m*|`` relative to ``max(1, ||m||)``."""
    m = np.asarray(m, dtype=complex)
    _check_square(m)
    if m.size == 0:
        return 0.0
    scale = max(1.0, operator_norm(m))
    return float(np.max(np.abs(m - adjoint(m)))) / scale


def is_positive_semidefinite(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``m`` is Hermitian within ``eps_eq`` with spectrum >= ``-eps_psd``."""
    return psd_defect(m, tol) == 0.0


def psd_defect(m, tol: Tolerance = DEFAULT_TOL) -> float:
    """How far ``m`` is from passing the PSD test; 0.0 means it passes.

    Non-Hermitian input returns the (relative) Hermitian defect, otherwise
    the magnitude of the most negative eigenvalue beyond the floor.
    """
    m = np.asarray(m, dtype=complex)
    _check_square(m)
    if m.size == 0:
        return 0.0
    herm = hermitian_defect(m)
    if herm > tol.eps_eq:
        return herm
    h = (m + adjoint(m)) / 2
    scale = max(1.0, operator_norm(h))
    lowest = float(np.linalg.eigvalsh(h)[0])
    return max(0.0, -lowest / scale - tol.eps_psd)


def psd_sqrt(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a PSD matrix, eigenvalues clipped at zero."""
    m = as_matrix(m)
    _check_square(m)
    h = (m + adjoint(m)) / 2
    w, v = np.linalg.eigh(h)
    w = np.where(w > tol.eps_psd * max(1.0, float(np.max(np.abs(w), initial=0.0))), w, 0.0)
    return (v * np.sqrt(w)) @ adjoint(v)


def positive_parts(h, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Split a Hermitian matrix as ``h = plus - minus`` with both parts PSD."""
    h = as_matrix(h)
    h = (h + adjoint(h)) / 2
    w, v = np.linalg.eigh(h)
    plus = (v * np.clip(w, 0, None)) @ adjoint(v)
    minus = (v * np.clip(-w, 0, None)) @ adjoint(v)
    return plus, minus


def support_projection(elements: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Range projection of ``sum x x*`` over ``elements``.

    For a basis of a two-sided ideal (or a corner) this is the unit of
    the subalgebra it spans.
    """
    elements = [as_matrix(x) for x in elements]
    if not elements:
        raise DimensionError("support projection of an empty family")
    n = elements[0].shape[0]
    h = np.zeros((n, n), dtype=complex)
    for x in elements:
        h += x @ adjoint(x) + adjoint(x) @ x
    w, v = np.linalg.eigh((h + adjoint(h)) / 2)
    top = float(np.max(np.abs(w), initial=0.0))
    keep = w > max(tol.eps_rank * top, ABSOLUTE_RANK_FLOOR)
    return v[:, keep] @ adjoint(v[:, keep])


def flatten_family(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Stack same-shape arrays as rows of a 2-d array."""
    vectors = [np.asarray(v, dtype=complex) for v in vectors]
    if not vectors:
        return np.zeros((0, 0), dtype=complex)
    shape = vectors[0].shape
    for v in vectors[1:]:
        if v.shape != shape:
            raise DimensionError(f"shape mismatch in family: {v.shape} vs {shape}")
    return np.stack([v.reshape(-1) for v in vectors])


def _rank_cutoff(s: np.ndarray, tol: Tolerance) -> float:
    top = float(s[0]) if s.size else 0.0
    return max(tol.eps_rank * top, ABSOLUTE_RANK_FLOOR)


def matrix_rank(mat: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> int:
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > _rank_cutoff(s, tol)))


def subspace_rank(vectors: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> int:
    """Numerical rank of the span of a family of same-shape matrices."""
    return matrix_rank(flatten_family(vectors), tol)


def row_space_basis(mat: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as rows) of the row space of ``mat``."""
    if mat.size == 0:
        return np.zeros((0, mat.shape[1] if mat.ndim == 2 else 0), dtype=complex)
    _, s, vh = np.linalg.svd(mat, full_matrices=False)
    r = int(np.sum(s > _rank_cutoff(s, tol)))
    return vh[:r]


def null_space(mat: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the kernel of ``mat``."""
    mat = np.asarray(mat, dtype=complex)
    rows, cols = mat.shape
    if rows == 0:
        return np.eye(cols, dtype=complex)
    # thin U when tall: the kernel only needs the full right factor
    _, s, vh = np.linalg.svd(mat, full_matrices=rows < cols)
    r = int(np.sum(s > _rank_cutoff(s, tol)))
    return vh[r:].conj().T


def least_squares_solve(columns: Sequence[np.ndarray], target, tol: Tolerance = DEFAULT_TOL
                        ) -> tuple[np.ndarray, float]:
    """Minimize ``||sum c_i columns_i - target||_F``.

    Returns the minimum-norm minimizer and the attained Frobenius residual.
    Whether the residual is small enough (``<= tol.eps_solve``) is the
    caller's decision.
    """
    target = np.asarray(target, dtype=complex)
    columns = [np.asarray(c, dtype=complex) for c in columns]
    for c in columns:
        if c.shape != target.shape:
            raise DimensionError(f"column shape {c.shape} does not match target {target.shape}")
    if not columns:
        return np.zeros(0, dtype=complex), float(np.linalg.norm(target))
    design = np.stack([c.reshape(-1) for c in columns], axis=1)
    return solve_design(design, target.reshape(-1), tol)


def solve_design(design: np.ndarray, rhs: np.ndarray, tol: Tolerance = DEFAULT_TOL
                 ) -> tuple[np.ndarray, float]:
    """Least-squares solve of ``design @ c = rhs`` with a relative SVD cutoff."""
    s = np.linalg.svd(design, compute_uv=False) if design.size else np.zeros(0)
    rcond = _rank_cutoff(s, tol) / s[0] if s.size and s[0] > 0 else None
    coeffs, *_ = np.linalg.lstsq(design, rhs, rcond=rcond)
    residual = float(np.linalg.norm(design @ coeffs - rhs))
    return coeffs, residual


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class Span:
    """Orthonormal model of the span of a family of same-shape matrices."""

    def __init__(self, vectors: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL, shape=None):
        vectors = list(vectors)
        if vectors:
            flat = flatten_family(vectors)
            self.shape = tuple(np.asarray(vectors[0]).shape)
        else:
            if shape is None:
                raise DimensionError("empty span needs an explicit shape")
            self.shape = tuple(shape)
            flat = np.zeros((0, int(np.prod(self.shape))), dtype=complex)
        self.rows = row_space_basis(flat, tol)

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def project(self, m) -> np.ndarray:
        v = np.asarray(m, dtype=complex).reshape(-1)
        if v.size != int(np.prod(self.shape)):
            raise DimensionError(f"cannot project shape {np.shape(m)} onto span of shape {self.shape}")
        if self.dim == 0:
            return np.zeros(self.shape, dtype=complex)
        return ((v @ self.rows.conj().T) @ self.rows).reshape(self.shape)

    def residual(self, m) -> float:
        """``||m - P m|| / max(1, ||m||)`` in Frobenius norm."""
        m = np.asarray(m, dtype=complex)
        out = float(np.linalg.norm(m - self.project(m)))
        return out / max(1.0, float(np.linalg.norm(m)))

    def complement_projector(self) -> np.ndarray:
        """Matrix of ``I - P`` acting on flattened vectors."""
        n = int(np.prod(self.shape))
        return np.eye(n, dtype=complex) - self.rows.T @ self.rows.conj()

    def contains_span(self, other: "Span", tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(self.residual(r.reshape(self.shape)) <= tol.eps_eq for r in other.rows)

    def equals(self, other: "Span", tol: Tolerance = DEFAULT_TOL) -> bool:
        return (self.dim == other.dim and self.contains_span(other, tol)
                and other.contains_span(self, tol))
