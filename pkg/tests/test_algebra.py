import numpy as np
import pytest

from ncmorita.algebra import (AlgebraElement, StarAlgebra, coordinates, is_essential_ideal, is_ideal,
                              matrix_unit, verify_star_algebra)
from ncmorita.errors import MembershipError, PreconditionError
from ncmorita.runner import builtin_suite, build_candidate
from ncmorita.linalg import Span, Tolerance
from conftest import E11, E12, E21, E22, I2

DIAG = StarAlgebra([E11, E22], unit=I2, name="diag")
FULL = StarAlgebra.full_matrix(2)


class TestVerify:
    def test_diagonal_passes(self):
        assert verify_star_algebra(DIAG).passed

    def test_full_matrix_passes(self):
        assert verify_star_algebra(FULL).passed

    def test_nilpotent_line_fails(self):
        rep = verify_star_algebra(StarAlgebra([E12]))
        assert not rep.passed
        assert any("adjoint" in f for f in rep.failures)
        assert any("unit" in f for f in rep.failures)

    def test_dependent_basis_fails(self):
        assert not verify_star_algebra(StarAlgebra([E11, 2 * E11], unit=E11)).passed

    def test_projection_unit(self):
        corner = StarAlgebra.with_support_unit([E11])
        assert np.allclose(corner.unit, E11)
        assert verify_star_algebra(corner).passed


class TestCoordinates:
    def test_unit_and_basis(self):
        assert np.allclose(coordinates(DIAG.element(I2)), [1, 1])
        assert np.allclose(coordinates(DIAG.element(E11)), [1, 0])

    def test_off_diagonal_rejected(self):
        with pytest.raises(MembershipError):
            DIAG.element(E12)

    def test_element_arithmetic_stays_inside(self, rng):
        for alg in (DIAG, FULL):
            a = AlgebraElement(alg, alg.random(rng))
            b = AlgebraElement(alg, alg.random(rng))
            for m in ((a @ b).matrix, a.adjoint().matrix, (a + 2j * b).matrix):
                assert alg.contains(m)


class TestIdeals:
    def test_block_summand(self):
        assert is_ideal([E11], DIAG)

    def test_not_ideal_in_full(self):
        # E21 E11 = E21 leaves span{E11}
        assert not np.allclose(E21 @ E11, 0)
        assert Span([E11]).residual(E21 @ E11) > 0.5
        assert not is_ideal([E11], FULL)

    def test_improper(self):
        assert is_ideal(list(FULL.basis), FULL)

    def test_essential(self):
        assert not is_essential_ideal([E11], DIAG)
        assert is_essential_ideal(list(DIAG.basis), DIAG)
        assert not is_essential_ideal([], DIAG)

    def test_essential_requires_ideal(self):
        with pytest.raises(PreconditionError):
            is_essential_ideal([E11], FULL)


def _diag_summands(alg):
    """Ideals of a commutative diagonal algebra: spans of subsets of minimal projections."""
    units = [b for b in alg.basis]
    out = []
    for mask in range(1, 2 ** len(units)):
        out.append([u for k, u in enumerate(units) if mask >> k & 1])
    return out


@pytest.mark.parametrize("spec", [s for s in builtin_suite() if s.kind == "set-action"],
                         ids=lambda s: s.name)
def test_essential_ideals_are_everything(spec):
    # finite-dimensional collapse: an essential ideal spans the whole algebra
    base = build_candidate(spec, Tolerance()).base
    alg = StarAlgebra([np.diag(np.diag(b)) for b in base.basis], unit=base.unit)
    for ideal in _diag_summands(alg):
        if is_ideal(ideal, alg) and is_essential_ideal(ideal, alg):
            assert Span(ideal).equals(alg.span)


def test_matrix_unit():
    assert np.array_equal(matrix_unit(3, 0, 2), np.eye(3)[:, [0]] @ np.eye(3)[[2], :])
