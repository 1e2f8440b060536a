import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ncmorita.errors import DimensionError
from ncmorita.linalg import (Span, Tolerance, is_positive_semidefinite, least_squares_solve,
                             null_space, operator_norm, psd_sqrt, subspace_rank, support_projection)
from conftest import E11, E12, E21, E22, I2

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def complex_matrices(rows, cols):
    return st.tuples(arrays(float, (rows, cols), elements=finite),
                     arrays(float, (rows, cols), elements=finite)).map(lambda p: p[0] + 1j * p[1])


def _norm_2x2_oracle(m):
    # largest root of t^2 - tr(M*M) t + |det M|^2 = 0
    h = m.conj().T @ m
    tr, det = np.trace(h).real, abs(np.linalg.det(m)) ** 2
    return np.sqrt((tr + np.sqrt(tr * tr - 4 * det)) / 2)


class TestOperatorNorm:
    def test_zero_and_identity(self):
        assert operator_norm(np.zeros((2, 2))) == 0.0
        for n in (1, 3, 5):
            assert operator_norm(np.eye(n)) == pytest.approx(1.0)

    def test_diag_against_oracle(self):
        m = np.diag([3, -4j])
        assert _norm_2x2_oracle(m) == pytest.approx(4.0)
        assert operator_norm(m) == pytest.approx(4.0, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(DimensionError):
            operator_norm(np.zeros((0, 0)))

    @given(complex_matrices(3, 4), complex_matrices(4, 2))
    @settings(max_examples=60, deadline=None)
    def test_submultiplicative(self, a, b):
        assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) * (1 + 1e-12) + 1e-12

    @given(complex_matrices(3, 3))
    @settings(max_examples=60, deadline=None)
    def test_cstar_identity(self, m):
        n = operator_norm(m)
        assert abs(operator_norm(m.conj().T @ m) - n * n) <= 10 * 1e-10 * max(1.0, n * n)


class TestPSD:
    def test_examples(self):
        assert is_positive_semidefinite(np.eye(3))
        assert not is_positive_semidefinite(np.diag([1.0, -1.0]))
        assert is_positive_semidefinite(np.array([[2.0, 1.0], [1.0, 2.0]]))

    def test_non_hermitian_fails_fast(self):
        assert not is_positive_semidefinite(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_sqrt_squares_back(self, rng):
        x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        p = x @ x.conj().T
        r = psd_sqrt(p)
        assert np.allclose(r @ r, p)
        assert is_positive_semidefinite(r)

    def test_support_projection(self):
        p = support_projection([E11, 3 * E11])
        assert np.allclose(p, E11)


class TestRank:
    def test_examples(self):
        assert subspace_rank([I2, I2]) == 1
        assert subspace_rank([E11, E12, E21, E22]) == 4
        assert subspace_rank([np.diag([1, 1]), np.diag([1, -1]), np.diag([2, 0])]) == 2

    def test_scale_robust(self):
        assert subspace_rank([1e-6 * E11, 1e-6 * E22]) == 2
        assert subspace_rank([1e6 * E11, 1e6 * E11 + 1e-12 * E22]) == 1

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_invariant_under_recombination(self, seed):
        r = np.random.default_rng(seed)
        k = int(r.integers(1, 4))
        vecs = [r.normal(size=(3, 3)) for _ in range(k)] + [np.zeros((3, 3))]
        vecs.append(vecs[0] + 2 * vecs[-2])
        mix = r.normal(size=(len(vecs), len(vecs))) + np.eye(len(vecs)) * 5
        mixed = [sum(mix[i, j] * vecs[j] for j in range(len(vecs))) for i in range(len(vecs))]
        assert subspace_rank(mixed) == subspace_rank(vecs) == k

    def test_null_space(self):
        m = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
        ns = null_space(m)
        assert ns.shape == (3, 2)
        assert np.allclose(m @ ns, 0)


class TestLeastSquares:
    def test_examples(self):
        c, r = least_squares_solve([I2], I2)
        assert np.allclose(c, [1]) and r == pytest.approx(0, abs=1e-12)
        c, r = least_squares_solve([E11], E22)
        assert np.allclose(c, [0]) and r == pytest.approx(np.linalg.norm(E22))
        c, r = least_squares_solve([E11, E22], I2)
        assert np.allclose(c, [1, 1]) and r == pytest.approx(0, abs=1e-12)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_exact_targets_have_zero_residual(self, seed):
        r = np.random.default_rng(seed)
        cols = [r.normal(size=(3, 3)) + 1j * r.normal(size=(3, 3)) for _ in range(4)]
        coef = r.normal(size=4) + 1j * r.normal(size=4)
        target = sum(c * m for c, m in zip(coef, cols))
        _, res = least_squares_solve(cols, target)
        assert res <= Tolerance().eps_solve


class TestTolerance:
    def test_defaults(self):
        t = Tolerance()
        assert (t.eps_eq, t.eps_psd, t.eps_rank, t.eps_solve) == (1e-10, 1e-9, 1e-9, 1e-8)

    @pytest.mark.parametrize("bad", [0.0, -1e-3, 1.0, float("nan")])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            Tolerance(eps_eq=bad)

    def test_from_scale(self):
        t = Tolerance.from_scale(1e-12)
        assert t.eps_eq == 1e-12 and t.eps_solve == pytest.approx(1e-10)


def test_span_membership_and_equality():
    s = Span([E11, E22])
    assert s.residual(I2) == pytest.approx(0, abs=1e-14)
    assert s.residual(E12) > 0.5
    assert s.equals(Span([I2, E11 - E22]))
    assert not s.equals(Span([I2]))
