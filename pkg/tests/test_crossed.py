import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncmorita.crossed import (center_dimension, cp_add, cp_mul, cp_scale, cp_star,
                              cp_unit, regular_representation, representation_contract, y_element)
from ncmorita.errors import ArgumentError
from ncmorita.groups import group_by_name
from ncmorita.linalg import matrix_rank, operator_norm
from ncmorita.models import SetAction, covering_from_set_action, regular_set_action
from conftest import E11, E22, I2


def _permutation_matrices(sa: SetAction):
    n = len(sa.perms[0])
    mats = []
    for p in sa.perms:
        u = np.zeros((n, n))
        u[p, np.arange(n)] = 1
        mats.append(u)
    return mats


def _sigma(a, perms):
    # covariant pair on l^2(Y): f delta_g -> diag(f) U_g
    return sum(a.components[g] @ u for g, u in enumerate(perms))


@pytest.fixture(scope="module")
def cp(swap):
    return swap.crossed


def test_dimension(cp, branched, regular_s3):
    assert cp.dim == 4
    assert branched.crossed.dim == 6
    assert regular_s3.crossed.dim == 36


class TestLinear:
    def test_additive(self, cp, rng):
        a = cp.random(rng)
        assert cp_add(a, cp.zero()).distance(a) == 0
        assert cp_add(a, cp_scale(a, -1)).distance(cp.zero()) == 0

    def test_disjoint_supports(self, cp):
        s = cp_add(cp.y(E11, 0), cp.y(E22, 1))
        assert np.allclose(s.components[0], E11) and np.allclose(s.components[1], E22)


class TestProduct:
    def test_unit_law(self, cp, rng):
        a = cp.random(rng)
        assert cp_mul(cp_unit(cp), a).distance(a) < 1e-14
        assert cp_mul(a, cp_unit(cp)).distance(a) < 1e-14

    def test_delta_g_squared(self, cp):
        d = cp.y(I2, 1)
        assert cp_mul(d, d).distance(cp.y(I2, 0)) < 1e-14

    def test_noncommutativity_witness(self, cp):
        e, d = cp.y(E11, 0), cp.y(I2, 1)
        assert cp_mul(e, d).distance(cp.y(E11, 1)) < 1e-14
        assert cp_mul(d, e).distance(cp.y(E22, 1)) < 1e-14

    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["C2", "C3", "V4", "S3"]))
    @settings(max_examples=20, deadline=None)
    def test_associative(self, seed, name):
        r = np.random.default_rng(seed)
        grp = group_by_name(name)
        cp = covering_from_set_action(regular_set_action(grp), grp).crossed
        a, b, c = cp.random(r), cp.random(r), cp.random(r)
        lhs, rhs = cp_mul(cp_mul(a, b), c), cp_mul(a, cp_mul(b, c))
        assert lhs.distance(rhs) <= 1e-9 * max(1.0, a.norm() * b.norm() * c.norm())

    def test_mismatched_actions(self, cp, branched):
        with pytest.raises(ArgumentError):
            cp_mul(cp.unit(), branched.crossed.unit())


class TestStar:
    def test_unit_self_adjoint(self, cp):
        assert cp_star(cp_unit(cp)).distance(cp_unit(cp)) < 1e-15

    def test_trivial_group_componentwise(self, trivial, rng):
        cp = trivial.crossed
        a = cp.random(rng)
        assert np.allclose(cp_star(a).components[0], a.components[0].conj().T)

    def test_delta_g_e11(self, cp):
        a = cp.y(E11, 1)
        s = cp_star(a)
        assert cp_star(s).distance(a) < 1e-15
        b = cp.y(I2 + 2 * E22, 1)
        assert cp_star(cp_mul(a, b)).distance(cp_mul(cp_star(b), s)) < 1e-14

    def test_untwisted_is_not_anti_multiplicative(self, inner_c2, rng):
        cp = inner_c2.crossed
        worst = 0.0
        for _ in range(5):
            a, b = cp.random(rng), cp.random(rng)
            lhs = cp_star(cp_mul(a, b), twisted=False)
            worst = max(worst, lhs.distance(cp_mul(cp_star(b, twisted=False), cp_star(a, twisted=False))))
        assert worst > 1e-3

    @pytest.mark.parametrize("perms,group", [([[0, 1], [1, 0]], "C2"),
                                             ([[0, 1, 2], [1, 0, 2]], "C2"),
                                             ([[0, 1, 2], [1, 2, 0], [2, 0, 1]], "C3")])
    def test_independent_covariant_representation(self, perms, group, rng):
        sa = SetAction.of(perms)
        cp = covering_from_set_action(sa, group_by_name(group)).crossed
        us = _permutation_matrices(sa)
        for _ in range(10):
            a, b = cp.random(rng), cp.random(rng)
            assert np.allclose(_sigma(cp_mul(a, b), us), _sigma(a, us) @ _sigma(b, us))
            assert np.allclose(_sigma(cp_star(a), us), _sigma(a, us).conj().T)


class TestYElement:
    def test_identity(self, cp):
        assert y_element(cp, I2, 0).distance(cp_unit(cp)) == 0

    def test_linear(self, cp):
        lhs = y_element(cp, E11, 1) + y_element(cp, E22, 1)
        assert lhs.distance(y_element(cp, I2, 1)) < 1e-15

    def test_span_rank(self, cp):
        ys = [y_element(cp, b, g).components.reshape(-1) for b in cp.algebra.basis for g in range(2)]
        assert matrix_rank(np.stack(ys)) == 4


class TestRegularRepresentation:
    def test_unit_is_identity(self, cp):
        assert np.allclose(regular_representation(cp_unit(cp)), np.eye(4))

    def test_contract_swap(self, cp):
        res = representation_contract(cp, samples=100, seed=3)
        assert res["multiplicative"] <= 1e-10
        assert res["star"] <= 1e-10
        assert res["cstar"] <= 1e-8
        assert res["isometric_star"] <= 1e-8

    def test_swap_is_full_matrix_algebra(self, cp):
        images = np.stack([regular_representation(b).reshape(-1) for b in cp.basis()])
        assert matrix_rank(images) == 4
        assert center_dimension(cp) == 1
        # the independent covariant picture maps onto all of M_2
        us = _permutation_matrices(SetAction.of([[0, 1], [1, 0]]))
        assert matrix_rank(np.stack([_sigma(b, us).reshape(-1) for b in cp.basis()])) == 4

    def test_branched_center(self, branched):
        # C(Y) x| C2 with Y = {0,1} + fixed point: M_2 + C[C2], center 1 + 2
        assert center_dimension(branched.crossed) == 3

    def test_norm_is_rho_norm(self, cp, rng):
        a = cp.random(rng)
        assert a.norm() == pytest.approx(operator_norm(regular_representation(a)))


def test_component_shape_checked(cp):
    with pytest.raises(ValueError):
        cp.element(np.zeros((3, 2, 2)))
