"""The crossed product of a finite-dimensional algebra by a finite group.

Elements are maps ``G -> A~`` stored as a ``(|G|, N, N)`` stack of ambient
matrices.  Multiplication is the twisted convolution

    (a b)(g) = sum_h a(h) h(b(h^-1 g)),

and the C*-norm is the operator norm in :func:`regular_representation`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .action import AlgebraAction
from .algebra import as_array
from .errors import ArgumentError, DimensionError, PreconditionError
from .linalg import DEFAULT_TOL, Tolerance, adjoint, null_space, random_complex


class CrossedProduct:
    """Arithmetic environment for ``A~ x| G`` attached to one action."""

    def __init__(self, action: AlgebraAction):
        self.action = action
        self.group = action.group
        self.algebra = action.algebra

    @property
    def dim(self) -> int:
        return self.group.order * self.algebra.dim

    @property
    def shape(self) -> tuple[int, int, int]:
        n = self.algebra.ambient_dim
        return (self.group.order, n, n)

    def element(self, components) -> "CrossedElement":
        comps = np.asarray(components, dtype=complex)
        if comps.shape != self.shape:
            raise DimensionError(f"components of shape {comps.shape}, expected {self.shape}")
        return CrossedElement(self, comps)

    def zero(self) -> "CrossedElement":
        return CrossedElement(self, np.zeros(self.shape, dtype=complex))

    def unit(self) -> "CrossedElement":
        if self.algebra.unit is None:
            raise PreconditionError("crossed product unit needs a unital algebra")
        return self.y(self.algebra.unit, self.group.identity_index)

    def y(self, a, g: int) -> "CrossedElement":
        """The element supported at ``g`` with value ``a``."""
        g = self.group.check_index(g)
        comps = np.zeros(self.shape, dtype=complex)
        comps[g] = as_array(a)
        return CrossedElement(self, comps)

    def random(self, rng: np.random.Generator) -> "CrossedElement":
        coords = random_complex(rng, (self.group.order, self.algebra.dim))
        return self.from_coords(coords)

    def from_coords(self, coords) -> "CrossedElement":
        coords = np.asarray(coords, dtype=complex).reshape(self.group.order, self.algebra.dim)
        return CrossedElement(self, np.einsum("gk,kij->gij", coords, self.algebra.basis))

    def coords(self, a: "CrossedElement") -> np.ndarray:
        return np.stack([self.algebra.raw_coords(c) for c in a.components]).reshape(-1)

    def basis(self) -> list["CrossedElement"]:
        """The elements ``y(b, g)`` over algebra basis ``b`` and group ``g``."""
        return [self.y(b, g) for g in self.group.elements() for b in self.algebra.basis]

    @cached_property
    def _inverse_products(self) -> np.ndarray:
        # index[h, g] = h^-1 g
        grp = self.group
        return np.array([[grp.mul(grp.inv(h), g) for g in grp.elements()] for h in grp.elements()])

    def mul(self, a: "CrossedElement", b: "CrossedElement") -> "CrossedElement":
        self._same(a, b)
        order, n, _ = self.shape
        ops = self.action.ambient_ops
        flat_b = b.components.reshape(order, n * n)
        # moved[h, k] = h(b(k))
        moved = np.einsum("hij,kj->hki", ops, flat_b).reshape(order, order, n, n)
        out = np.zeros(self.shape, dtype=complex)
        idx = self._inverse_products
        for h in range(order):
            out += np.matmul(a.components[h], moved[h, idx[h]])
        return CrossedElement(self, out)

    def star(self, a: "CrossedElement", twisted: bool = True) -> "CrossedElement":
        """Involution ``a*(g) = g(a(g^-1)*)``; ``twisted=False`` drops the ``g(.)``.

        Only the twisted form is an anti-automorphism of :meth:`mul`; the
        untwisted form is kept for comparison reports.
        """
        self._same(a)
        grp = self.group
        out = np.empty(self.shape, dtype=complex)
        for g in grp.elements():
            val = adjoint(a.components[grp.inv(g)])
            out[g] = self.action.act(g, val) if twisted else val
        return CrossedElement(self, out)

    def rho(self, a: "CrossedElement") -> np.ndarray:
        """Regular representation on ``l^2(G) (x) C^N``.

        Block ``(h, k)`` is ``h^-1(a(h k^-1))``.  This is the covariant pair
        ``pi(x) xi(h) = h^-1(x) xi(h)``, ``lambda_g xi(h) = xi(g^-1 h)``.
        """
        self._same(a)
        grp = self.group
        order, n, _ = self.shape
        out = np.zeros((order * n, order * n), dtype=complex)
        for h in grp.elements():
            hinv = grp.inv(h)
            for k in grp.elements():
                comp = a.components[grp.mul(h, grp.inv(k))]
                if np.any(comp):
                    out[h * n:(h + 1) * n, k * n:(k + 1) * n] = self.action.act(hinv, comp)
        return out

    def _same(self, *elems: "CrossedElement"):
        for e in elems:
            if not isinstance(e, CrossedElement):
                raise ArgumentError(f"expected a crossed-product element, got {type(e).__name__}")
            if e.cp is not self and e.cp.action is not self.action:
                raise ArgumentError("crossed-product elements belong to different actions")


@dataclass(frozen=True, eq=False)
class CrossedElement:
    """A map ``g -> a(g)`` from group elements to the algebra."""

    cp: CrossedProduct
    components: np.ndarray

    @property
    def action(self) -> AlgebraAction:
        return self.cp.action

    def __add__(self, other: "CrossedElement") -> "CrossedElement":
        return cp_add(self, other)

    def __sub__(self, other: "CrossedElement") -> "CrossedElement":
        return cp_add(self, cp_scale(other, -1))

    def __neg__(self):
        return cp_scale(self, -1)

    def __mul__(self, scalar) -> "CrossedElement":
        return cp_scale(self, scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "CrossedElement") -> "CrossedElement":
        return self.cp.mul(self, other)

    def star(self, twisted: bool = True) -> "CrossedElement":
        return self.cp.star(self, twisted)

    def norm(self) -> float:
        """C*-norm: operator norm in the regular representation."""
        return float(np.linalg.norm(self.cp.rho(self), 2))

    def distance(self, other: "CrossedElement") -> float:
        """Largest component-wise Frobenius distance."""
        diff = self.components - other.components
        return float(np.max(np.linalg.norm(diff, axis=(1, 2))))


def cp_add(a: CrossedElement, b: CrossedElement) -> CrossedElement:
    a.cp._same(b)
    return CrossedElement(a.cp, a.components + b.components)


def cp_scale(a: CrossedElement, scalar: complex) -> CrossedElement:
    return CrossedElement(a.cp, a.components * scalar)


def cp_mul(a: CrossedElement, b: CrossedElement) -> CrossedElement:
    return a.cp.mul(a, b)


def cp_star(a: CrossedElement, twisted: bool = True) -> CrossedElement:
    return a.cp.star(a, twisted)


def cp_unit(env) -> CrossedElement:
    """Unit of the crossed product (``1`` at the identity, ``0`` elsewhere)."""
    cp = env if isinstance(env, CrossedProduct) else CrossedProduct(env)
    return cp.unit()


def y_element(cp: CrossedProduct, a, g: int) -> CrossedElement:
    cp.algebra.coordinates(as_array(a))
    return cp.y(a, g)


def regular_representation(a: CrossedElement) -> np.ndarray:
    return a.cp.rho(a)


def center_dimension(cp: CrossedProduct, tol: Tolerance = DEFAULT_TOL) -> int:
    """Dimension of the center, by brute force on the regular representation."""
    reps = [cp.rho(b) for b in cp.basis()]
    rows = []
    for r in reps:
        rows.append(np.stack([(x @ r - r @ x).reshape(-1) for x in reps], axis=1))
    return null_space(np.vstack(rows), tol).shape[1]


def representation_contract(cp: CrossedProduct, samples: int = 100, seed: int = 0) -> dict:
    """Worst residuals of the regular representation's contract on random elements.

    ``multiplicative`` and ``star`` are relative to ``||rho(a)|| ||rho(b)||``;
    ``cstar`` is ``| ||rho(a* a)|| - ||rho(a)||^2 | / ||rho(a)||^2``;
    ``isometric_star`` compares ``||rho(a*)||`` with ``||rho(a)||``.
    """
    rng = np.random.default_rng(seed)
    out = {"multiplicative": 0.0, "star": 0.0, "cstar": 0.0, "isometric_star": 0.0}
    for _ in range(samples):
        a, b = cp.random(rng), cp.random(rng)
        ra, rb = cp.rho(a), cp.rho(b)
        na, nb = np.linalg.norm(ra, 2), np.linalg.norm(rb, 2)
        mult = np.linalg.norm(cp.rho(cp.mul(a, b)) - ra @ rb, 2) / max(1.0, na * nb)
        star = np.linalg.norm(cp.rho(cp.star(a)) - adjoint(ra), 2) / max(1.0, na)
        cstar = abs(np.linalg.norm(cp.rho(cp.mul(cp.star(a), a)), 2) - na ** 2) / na ** 2
        iso = abs(np.linalg.norm(cp.rho(cp.star(a)), 2) - na) / na
        for key, val in (("multiplicative", mult), ("star", star), ("cstar", cstar),
                         ("isometric_star", iso)):
            out[key] = max(out[key], float(val))
    return out
