import itertools

import numpy as np
import pytest

from exactspca.errors import InvalidParameters
from exactspca.extension import MonomialBasis, build_row_functional
from exactspca.linalg import symmetrize
from exactspca.oracle import brute_force_spca
from exactspca.spca import (
    SpcaInstance,
    candidate_support_from_point,
    enumerate_candidate_supports,
    solve_spca,
)

from conftest import random_low_rank_psd


def _instance(kmatrix, d, s):
    return SpcaInstance.build(kmatrix, d, s)


class TestCandidateFromPoint:
    def _functionals(self, values):
        class Fixed:
            def __init__(self, v):
                self.v = v

            def __call__(self, _point):
                return self.v

        return [Fixed(v) for v in values]

    def test_sort_and_take(self):
        support = candidate_support_from_point(
            None, self._functionals([5.0, 1.0, 7.0]), 2
        )
        assert support == (0, 2)

    def test_pure_tie_break(self):
        support = candidate_support_from_point(
            None, self._functionals([1.0] * 4), 2
        )
        assert support == (0, 1)

    def test_matches_subset_enumeration(self, rng):
        basis = MonomialBasis(2, 1)
        rows = rng.standard_normal((5, 2))
        functionals = [build_row_functional(basis, row) for row in rows]
        for _ in range(30):
            point = rng.standard_normal(basis.dim)
            s = int(rng.integers(1, 5))
            support = candidate_support_from_point(point, functionals, s)
            values = np.array([f(point) for f in functionals])
            best = max(
                (sum(values[list(sub)]) for sub in itertools.combinations(range(5), s))
            )
            assert sum(values[list(support)]) == pytest.approx(best, abs=1e-12)


class TestCandidateEnumeration:
    def test_rank_one_candidates(self, rng):
        q = np.array([2.0, -1.0, 0.5, 3.0])
        kmatrix = symmetrize(np.outer(q, q))
        inst = _instance(kmatrix, 1, 2)
        result = enumerate_candidate_supports(inst)
        # Two cells (positive and negative side of the single line); the
        # positive side orders by q_j^2, so the top set is a candidate.
        order = np.argsort(-(q**2), kind="stable")
        assert tuple(sorted(order[:2])) in result.supports
        assert len(result.supports) <= 2
        assert result.cells_enumerated == 2

    def test_dominant_coordinate(self):
        q = np.array([2.0, 1.0])
        inst = _instance(symmetrize(np.outer(q, q)), 1, 1)
        result = enumerate_candidate_supports(inst)
        assert (0,) in result.supports

    def test_contains_oracle_support(self, rng):
        for _ in range(10):
            kmatrix = random_low_rank_psd(rng, 6, 2)
            inst = _instance(kmatrix, 1, 2)
            result = enumerate_candidate_supports(inst)
            report = brute_force_spca(kmatrix, 1, 2)
            assert any(sup in result.supports for sup in report.argmax_supports)

    def test_duplicate_rows_recorded(self):
        row = np.array([1.0, 2.0])
        factor = np.vstack([row, row, [0.0, 1.0]])
        kmatrix = symmetrize(factor @ factor.T)
        inst = _instance(kmatrix, 1, 1)
        result = enumerate_candidate_supports(inst)
        assert (0, 1) in result.duplicate_feature_pairs

    def test_full_support_shortcut(self, rng):
        kmatrix = random_low_rank_psd(rng, 4, 2)
        inst = _instance(kmatrix, 2, 4)
        result = enumerate_candidate_supports(inst)
        assert result.supports == ((0, 1, 2, 3),)
        assert result.cells_enumerated == 1


class TestSolveSpca:
    def test_rank_one_single_support(self):
        q = np.array([2.0, 1.0, 0.0])
        solution = solve_spca(_instance(symmetrize(np.outer(q, q)), 1, 1))
        assert solution.support == (0,)
        assert solution.objective == pytest.approx(4.0, abs=1e-10)
        assert np.allclose(solution.x[:, 0], [1.0, 0.0, 0.0], atol=1e-10)

    def test_diagonal(self):
        solution = solve_spca(_instance(np.diag([3.0, 2.0, 1.0]), 2, 2))
        assert solution.support == (0, 1)
        assert solution.objective == pytest.approx(5.0, abs=1e-10)

    def test_matches_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(4, 9))
            r = int(rng.integers(1, 3))
            d = int(rng.integers(1, 3))
            s = min(int(rng.integers(d, 4)), n)
            kmatrix = random_low_rank_psd(rng, n, r)
            solution = solve_spca(_instance(kmatrix, d, s))
            report = brute_force_spca(kmatrix, d, s)
            assert solution.objective == pytest.approx(
                report.objective, rel=1e-8, abs=1e-8
            )
            assert solution.support in report.argmax_supports

    def test_feasibility(self, rng):
        for _ in range(15):
            n, r, d, s = 6, 2, 2, 3
            kmatrix = random_low_rank_psd(rng, n, r)
            solution = solve_spca(_instance(kmatrix, d, s))
            gram = solution.x.T @ solution.x
            assert np.max(np.abs(gram - np.eye(d))) < 1e-8
            outside = [j for j in range(n) if j not in solution.support]
            assert not np.any(solution.x[outside])
            assert len(solution.support) == s
            trace = float(np.trace(solution.x.T @ kmatrix @ solution.x))
            assert solution.objective == pytest.approx(trace, rel=1e-8)

    def test_reduced_and_full_objectives_agree(self, rng):
        # The r x r evaluation and the s x s recovery score the same support
        # identically: the nonzero spectra of both Gram forms coincide.
        kmatrix = random_low_rank_psd(rng, 7, 2)
        inst = _instance(kmatrix, 2, 3)
        solution = solve_spca(inst)
        rows = inst.factor.rows(solution.support)
        from exactspca.linalg import solve_pca

        reduced, _ = solve_pca(symmetrize(rows.T @ rows), inst.num_components_reduced)
        assert solution.objective == pytest.approx(reduced, rel=1e-8)

    def test_scale_equivariance(self, rng):
        kmatrix = random_low_rank_psd(rng, 5, 2)
        base = solve_spca(_instance(kmatrix, 1, 2))
        scaled = solve_spca(_instance(symmetrize(3.5 * kmatrix), 1, 2))
        assert scaled.objective == pytest.approx(3.5 * base.objective, rel=1e-8)
        assert scaled.support == base.support

    def test_monotone_in_s(self, rng):
        kmatrix = random_low_rank_psd(rng, 6, 2)
        values = [
            solve_spca(_instance(kmatrix, 1, s)).objective for s in range(1, 7)
        ]
        assert np.all(np.diff(values) >= -1e-10)

    def test_candidates_bounded_by_cells(self, rng):
        from exactspca.arrangement import expected_generic_cell_count

        kmatrix = random_low_rank_psd(rng, 6, 2)
        solution = solve_spca(_instance(kmatrix, 2, 3))
        diag = solution.diagnostics
        assert 1 <= diag.candidates_evaluated <= diag.cells_enumerated
        assert diag.best_cell_signs is not None
        # The structured arrangement can only have fewer cells than a generic
        # one with the same hyperplane count and dimension.
        bound = expected_generic_cell_count(diag.hyperplanes, diag.extended_dim)
        assert diag.cells_enumerated <= bound

    def test_zero_matrix(self):
        solution = solve_spca(_instance(np.zeros((4, 4)), 2, 3))
        assert solution.objective == 0.0
        assert solution.support == (0, 1, 2)
        assert np.max(np.abs(solution.x.T @ solution.x - np.eye(2))) < 1e-12

    def test_support_padding_on_sparse_optimum(self):
        # The optimal loading uses one feature; the support still has size s.
        kmatrix = np.diag([1.0, 0.0, 0.0])
        solution = solve_spca(_instance(kmatrix, 1, 2))
        assert len(solution.support) == 2
        assert solution.objective == pytest.approx(1.0, abs=1e-12)
        assert solution.diagnostics.nonzero_rows == 1

    def test_s_equals_n_plain_pca(self, rng):
        kmatrix = random_low_rank_psd(rng, 5, 3)
        solution = solve_spca(_instance(kmatrix, 2, 5))
        top2 = np.sort(np.linalg.eigvalsh(kmatrix))[::-1][:2].sum()
        assert solution.objective == pytest.approx(float(top2), rel=1e-9)

    def test_invalid_parameters(self, rng):
        kmatrix = random_low_rank_psd(rng, 4, 2)
        with pytest.raises(InvalidParameters):
            SpcaInstance.build(kmatrix, 2, 1)  # d > s
        with pytest.raises(InvalidParameters):
            SpcaInstance.build(kmatrix, 1, 5)  # s > n
        with pytest.raises(InvalidParameters):
            SpcaInstance.build(kmatrix, 0, 1)  # d < 1

    def test_randomized_mode_is_lower_bound(self, rng):
        kmatrix = random_low_rank_psd(rng, 6, 2)
        inst = _instance(kmatrix, 1, 2)
        exact = solve_spca(inst)
        sampled = solve_spca(inst, cell_mode="randomized", seed=11)
        assert sampled.objective <= exact.objective + 1e-9
