"""Bimodule actions and pairings between ``A~ x| G``, ``A~`` and ``A``.

    a . x   = sum_g a(g) g(x)             (left action of the crossed product)
    x . a   = sum_g g^-1(x a(g))          (right action of the crossed product)
    phi(x, y)(g) = x g(y)
    psi(x, y)    = sum_g g(x y)
    <x, y>_cp    = phi(x, y*)
    <x, y>_A     = psi(x*, y)
"""
from __future__ import annotations

import numpy as np

from .algebra import as_array
from .crossed import CrossedElement, CrossedProduct
from .errors import ArgumentError, MembershipError
from .linalg import DEFAULT_TOL, Tolerance, adjoint


def _member(cp: CrossedProduct, x, check: bool = True, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    m = as_array(x)
    if not check:
        return m
    try:
        cp.algebra.coordinates(m, tol)
    except MembershipError as exc:
        raise ArgumentError(f"bimodule argument outside the algebra: {exc}") from exc
    return m


def act_left(a: CrossedElement, x, check: bool = True) -> np.ndarray:
    cp = a.cp
    x = _member(cp, x, check)
    moved = cp.action.orbit(x)
    return np.einsum("gij,gjk->ik", a.components, moved)


def act_right(x, a: CrossedElement, check: bool = True) -> np.ndarray:
    cp = a.cp
    x = _member(cp, x, check)
    grp = cp.group
    out = np.zeros_like(x)
    for g in grp.elements():
        out += cp.action.act(grp.inv(g), x @ a.components[g])
    return out


def phi(cp: CrossedProduct, x, y, check: bool = True) -> CrossedElement:
    x, y = _member(cp, x, check), _member(cp, y, check)
    return CrossedElement(cp, np.matmul(x, cp.action.orbit(y)))


def psi(cp: CrossedProduct, x, y, check: bool = True) -> np.ndarray:
    x, y = _member(cp, x, check), _member(cp, y, check)
    return cp.action.average(x @ y)


def inner_cp(cp: CrossedProduct, x, y, check: bool = True) -> CrossedElement:
    return phi(cp, x, adjoint(as_array(y)), check)


def inner_base(cp: CrossedProduct, x, y, check: bool = True) -> np.ndarray:
    return psi(cp, adjoint(as_array(x)), y, check)
