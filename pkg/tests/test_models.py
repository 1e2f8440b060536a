import numpy as np
import pytest

from ncmorita.errors import ActionRejected, ArgumentError, PreconditionError
from ncmorita.groups import cyclic_group, group_by_name, klein_four, symmetric_group, trivial_group
from ncmorita.hilbert import transfer_inner
from ncmorita.linalg import Span, subspace_rank
from ncmorita.models import (IdealFamily, SetAction, block_representation, corner, covering_from_set_action,
                             direct_sum, enumerate_set_actions, inner_matrix_model,
                             irreducible_representations, two_fiber_model, verify_compactification_covering,
                             verify_general_covering, wta_subalgebra)
from conftest import E11, E22, I2

C2, C3 = cyclic_group(2), cyclic_group(3)


def delta(n, ys):
    return np.diag([1.0 if y in ys else 0.0 for y in range(n)])


class TestSetModels:
    def test_swap(self, swap):
        assert swap.metadata["free"] and swap.base.dim == 1 and swap.algebra.dim == 2

    def test_cyclic_shift(self):
        cand = covering_from_set_action(SetAction.of(C3.coset_action({0})), C3)
        assert cand.metadata["free"] and cand.base.dim == 1

    def test_branched(self, branched):
        assert not branched.metadata["free"]
        assert branched.base.dim == 2
        assert branched.metadata["orbits"] == [[0, 1], [2]]

    def test_non_faithful_rejected(self):
        with pytest.raises(ActionRejected):
            covering_from_set_action(SetAction.of([[0, 1], [0, 1]]), C2)

    def test_not_an_action(self):
        with pytest.raises(ArgumentError):
            covering_from_set_action(SetAction.of([[0, 1, 2], [1, 2, 0]]), C2)

    @pytest.mark.parametrize("name", ["C2", "C3", "C4", "V4", "S3"])
    def test_base_dim_is_orbit_count(self, name):
        grp = group_by_name(name)
        for _, sa in list(enumerate_set_actions(grp, 7))[:20]:
            cand = covering_from_set_action(sa, grp)
            assert cand.base.dim == len(sa.orbits())
            assert cand.validate().passed

    def test_enumeration_counts(self):
        # faithful actions on at most 12 points, one per isomorphism class
        counts = {n: sum(1 for _ in enumerate_set_actions(group_by_name(n), 12))
                  for n in ("C2", "C3", "C4", "V4", "S3")}
        assert counts == {"C2": 36, "C3": 22, "C4": 35, "V4": 341, "S3": 77}

    def test_enumeration_includes_regular_s3(self):
        s3 = symmetric_group(3)
        assert any(sa.points == 6 and sa.is_free(s3) for _, sa in enumerate_set_actions(s3, 6))


class TestInnerModels:
    def test_diag_commutant(self, inner_c2):
        assert inner_c2.base.span.equals(Span([E11, E22]))

    def test_trivial_group(self):
        cand = inner_matrix_model(2, trivial_group(), [I2])
        assert cand.base.dim == 4

    def test_identity_rejected(self):
        with pytest.raises(ActionRejected):
            inner_matrix_model(2, C2, [I2, I2])

    def test_not_unitary(self):
        with pytest.raises(ArgumentError):
            inner_matrix_model(2, C2, [I2, 2 * I2])

    def test_not_homomorphism(self):
        with pytest.raises(ArgumentError):
            inner_matrix_model(2, C3, [I2, np.diag([1, -1]), np.diag([1, -1])])

    @pytest.mark.parametrize("name", ["C2", "C3", "C4", "V4", "S3"])
    def test_irreps(self, name):
        grp = group_by_name(name)
        irreps = irreducible_representations(grp)
        # sum of squared dimensions equals the group order
        assert sum(r[0].shape[0] ** 2 for r in irreps) == grp.order
        for rep in irreps:
            for g in grp.elements():
                for h in grp.elements():
                    assert np.allclose(rep[g] @ rep[h], rep[grp.mul(g, h)])

    def test_block_representation(self):
        us, full = block_representation(C3, 2)
        assert not full and len(us) == 3
        us, full = block_representation(C3, 3)
        assert full


class TestWta:
    def test_two_fiber_oracle(self):
        cand, fibers = two_fiber_model(2)
        n = cand.algebra.ambient_dim
        ideal = [delta(n, fibers["p"])]  # functions on X vanishing at q
        got = wta_subalgebra(cand, ideal)
        # brute force: every function on Y that vanishes on the fiber over q
        expected = [delta(n, [y]) for y in fibers["p"]]
        assert subspace_rank(got) == len(expected) == 2
        assert Span(got).equals(Span(expected))
        # and the defining condition, checked pointwise over all basis pairs
        ideal_span = Span(ideal)
        for b in cand.algebra.basis:
            for a in got:
                assert ideal_span.residual(transfer_inner(cand, b, a).matrix) <= 1e-12
            if np.any(np.diag(b)[fibers["q"]]):
                assert ideal_span.residual(transfer_inner(cand, b, b).matrix) > 0.5

    @pytest.mark.parametrize("name", ["swap", "branched", "inner_c2", "pauli_v4", "regular_s3"])
    def test_whole_algebra(self, name, request):
        cand = request.getfixturevalue(name)
        got = wta_subalgebra(cand, list(cand.base.basis))
        assert Span(got).equals(cand.algebra.span)

    def test_zero(self, swap):
        assert wta_subalgebra(swap, []) == []

    def test_not_ideal(self, inner_c2):
        with pytest.raises(PreconditionError):
            wta_subalgebra(inner_c2, [np.array([[0, 1], [0, 0]])])


class TestCompactification:
    def test_whole_algebra(self, swap):
        rep = verify_compactification_covering(swap, [I2])
        assert rep.passed and rep.essential
        assert any("trivial at finite dimension" in c for c in rep.caveats)

    def test_non_essential_still_runs(self):
        cand, fibers = two_fiber_model(2)
        rep = verify_compactification_covering(cand, [delta(4, fibers["p"])])
        assert not rep.essential and not rep.passed
        assert rep.induced is not None and rep.induced.verdict
        assert rep.wta_dim == 2 and rep.base_matches

    def test_degenerate_upstream(self, swap):
        from ncmorita.hilbert import CoveringCandidate
        bad = CoveringCandidate(swap.action.with_maps(np.stack([np.eye(2), np.eye(2)])), swap.base)
        rep = verify_compactification_covering(bad, [I2])
        assert not rep.passed
        assert any("unital_covering" in f for f in rep.failures)


class TestGeneralCovering:
    def test_single_ideal(self, swap):
        rep = verify_general_covering(swap, IdealFamily([[I2]]))
        assert rep.passed and len(rep.corners) == 1

    def test_two_blocks(self, swap):
        ds = direct_sum([swap, swap])
        e1, e2 = np.diag([1.0, 1, 0, 0]), np.diag([0.0, 0, 1, 1])
        rep = verify_general_covering(ds, IdealFamily([[e1], [e2]]))
        assert rep.passed and len(rep.corners) == 2
        assert all(c.induced.verdict for c in rep.corners)

    def test_not_dense(self, swap):
        ds = direct_sum([swap, swap])
        rep = verify_general_covering(ds, IdealFamily([[np.diag([1.0, 1, 0, 0])]]))
        assert not rep.passed
        assert rep.density_rank == 1 and rep.base_dim == 2
        assert any("density" in f for f in rep.failures)

    def test_empty_family(self, swap):
        with pytest.raises(ArgumentError):
            verify_general_covering(swap, IdealFamily([]))

    def test_corner_unit_is_support_projection(self, swap):
        ds = direct_sum([swap, swap])
        sub = corner(ds, [np.diag([0.0, 0, 1, 1])])
        assert np.allclose(sub.algebra.unit, np.diag([0, 0, 1, 1]))
        assert sub.algebra.dim == 2


def test_direct_sum_requires_common_group(swap):
    other = covering_from_set_action(SetAction.of(C3.coset_action({0})), C3)
    with pytest.raises(ArgumentError):
        direct_sum([swap, other])


def test_v4_two_quotients_not_free():
    v4 = klein_four()
    from ncmorita.models import set_action_from_subgroups
    sa = set_action_from_subgroups(v4, [{0, 1}, {0, 2}])
    assert sa.is_faithful(v4) and not sa.is_free(v4)
