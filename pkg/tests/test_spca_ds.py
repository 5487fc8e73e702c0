import numpy as np
import pytest

from exactspca.errors import InvalidParameters
from exactspca.linalg import symmetrize
from exactspca.oracle import brute_force_spca_ds
from exactspca.spca import SpcaInstance, solve_spca
from exactspca.spca_ds import (
    SpcaDsInstance,
    build_circuit_hyperplanes,
    candidate_supports_from_cell,
    solve_spca_ds,
)

from conftest import random_low_rank_psd


def _instance(kmatrix, d, s):
    return SpcaDsInstance.build(kmatrix, d, s)


class TestCircuitHyperplanes:
    def test_rank_one_collapses_to_one_hyperplane(self):
        q = np.array([2.0, 1.0])
        planes = build_circuit_hyperplanes(_instance(symmetrize(np.outer(q, q)), 1, 1))
        # All circuit functionals are multiples of the single lifted square.
        assert len(planes.hyperplanes) == 1
        assert planes.circuits_enumerated == 3

    def test_zero_matrix_empty(self):
        planes = build_circuit_hyperplanes(_instance(np.zeros((3, 3)), 2, 1))
        assert planes.hyperplanes == ()
        assert planes.extended_dim == 0

    def test_rank_one_two_blocks_dedup(self):
        q = np.array([2.0, 1.0])
        planes = build_circuit_hyperplanes(_instance(symmetrize(np.outer(q, q)), 2, 1))
        # 13 circuits collapse to 7 distinct lines in the 2-dim lifted space:
        # the two axes, the difference line, and four mixed directions.
        assert planes.circuits_enumerated == 13
        assert len(planes.hyperplanes) == 7

    def test_degenerate_circuits_counted(self):
        row = np.array([1.0, 2.0])
        factor = np.vstack([row, row])
        kmatrix = symmetrize(factor @ factor.T)
        planes = build_circuit_hyperplanes(_instance(kmatrix, 2, 1))
        assert planes.degenerate_circuits > 0


class TestCandidateFromCell:
    def test_negative_profits_empty_family(self, rng):
        from exactspca.arrangement import Cell

        kmatrix = random_low_rank_psd(rng, 3, 2)
        inst = _instance(kmatrix, 2, 1)
        planes = build_circuit_hyperplanes(inst)
        # A lifted point where every arc profit is negative: flip the sign of
        # a realizable point.  Arc functionals are nonnegative on lifted
        # points, so the negated point makes every profit nonpositive.
        basis_dim = planes.extended_dim
        y = rng.standard_normal((2, 2))
        from exactspca.extension import MonomialBasis

        point = -MonomialBasis(2, 2).ext(y)
        cell = Cell(signs=(), witness=point, margin=1.0)
        family = candidate_supports_from_cell(inst, cell, planes.arc_coeffs)
        assert family == ((), ())
        assert basis_dim == 6

    def test_assignment_example(self, rng):
        from exactspca.arrangement import Cell

        kmatrix = random_low_rank_psd(rng, 2, 2)
        inst = _instance(kmatrix, 2, 1)
        planes = build_circuit_hyperplanes(inst)
        # Build a synthetic witness whose induced profits are [[9,1],[8,7]]
        # by solving for a lifted point with those arc values.
        target = np.array([9.0, 1.0, 8.0, 7.0])
        point, *_ = np.linalg.lstsq(planes.arc_coeffs, target, rcond=None)
        if np.allclose(planes.arc_coeffs @ point, target, atol=1e-8):
            cell = Cell(signs=(), witness=point, margin=1.0)
            family = candidate_supports_from_cell(inst, cell, planes.arc_coeffs)
            assert family == ((0,), (1,))

    def test_single_component_matches_spca_ordering(self, rng):
        from exactspca.arrangement import Cell
        from exactspca.extension import MonomialBasis
        from exactspca.spca import candidate_support_from_point

        kmatrix = random_low_rank_psd(rng, 5, 2)
        inst = _instance(kmatrix, 1, 2)
        planes = build_circuit_hyperplanes(inst)
        basis = MonomialBasis(2, 1)
        y = rng.standard_normal((2, 1))
        point = basis.ext(y)
        cell = Cell(signs=(), witness=point, margin=1.0)
        family = candidate_supports_from_cell(inst, cell, planes.arc_coeffs)
        values = planes.arc_coeffs @ point

        class Fixed:
            def __init__(self, v):
                self.v = v

            def __call__(self, _):
                return self.v

        top = candidate_support_from_point(None, [Fixed(v) for v in values], 2)
        assert family[0] == top


class TestSolveSpcaDs:
    def test_rank_one_disjoint_singletons(self):
        q = np.array([3.0, 2.0, 1.0])
        solution = solve_spca_ds(_instance(symmetrize(np.outer(q, q)), 2, 1))
        assert solution.supports == ((0,), (1,))
        assert solution.objective == pytest.approx(13.0, abs=1e-10)

    def test_single_component_equals_spca(self, rng):
        for _ in range(8):
            n = int(rng.integers(3, 7))
            r = int(rng.integers(1, 3))
            s = min(int(rng.integers(1, 4)), n)
            kmatrix = random_low_rank_psd(rng, n, r)
            ds = solve_spca_ds(_instance(kmatrix, 1, s))
            plain = solve_spca(SpcaInstance.build(kmatrix, 1, s))
            assert ds.objective == pytest.approx(plain.objective, rel=1e-8)

    def test_matches_oracle_rank_one(self, rng):
        for _ in range(20):
            n = int(rng.integers(3, 7))
            s = int(rng.integers(1, 3))
            kmatrix = random_low_rank_psd(rng, n, 1)
            solution = solve_spca_ds(_instance(kmatrix, 2, s))
            report = brute_force_spca_ds(kmatrix, 2, s)
            assert solution.objective == pytest.approx(
                report.objective, rel=1e-8, abs=1e-8
            )

    def test_matches_oracle_rank_two(self, rng):
        for _ in range(3):
            s = int(rng.integers(1, 3))
            kmatrix = random_low_rank_psd(rng, 4, 2)
            solution = solve_spca_ds(_instance(kmatrix, 2, s))
            report = brute_force_spca_ds(kmatrix, 2, s)
            assert solution.objective == pytest.approx(
                report.objective, rel=1e-8, abs=1e-8
            )

    def test_chart_mode_agrees_with_torus_mode(self, rng):
        for n in (2, 3):
            kmatrix = random_low_rank_psd(rng, n, 2)
            inst = _instance(kmatrix, 2, 1)
            chart = solve_spca_ds(inst, cell_mode="chart")
            torus = solve_spca_ds(inst, cell_mode="exact")
            assert chart.objective == pytest.approx(torus.objective, rel=1e-9)

    def test_feasibility(self, rng):
        for _ in range(4):
            kmatrix = random_low_rank_psd(rng, 4, 2)
            s = int(rng.integers(1, 3))
            solution = solve_spca_ds(_instance(kmatrix, 2, s))
            flat = [j for sup in solution.supports for j in sup]
            assert len(flat) == len(set(flat))
            for i, support in enumerate(solution.supports):
                assert 1 <= len(support) <= s
                assert abs(np.linalg.norm(solution.x[:, i]) - 1.0) < 1e-8
                outside = [j for j in range(4) if j not in support]
                assert not np.any(solution.x[outside, i])
            factor = SpcaDsInstance.build(kmatrix, 2, s).factor
            recomputed = sum(
                float(np.linalg.norm(factor.factor.T @ solution.x[:, i]) ** 2)
                for i in range(2)
            )
            assert solution.objective == pytest.approx(recomputed, rel=1e-8)

    def test_same_cell_resolves_consistently(self, rng):
        # Re-solving the circulation at other interior points of the same
        # sign region gives circulations of equal value at those points.
        from exactspca.circulation import CirculationInstance, solve_max_profit

        kmatrix = random_low_rank_psd(rng, 4, 2)
        inst = _instance(kmatrix, 2, 1)
        planes = build_circuit_hyperplanes(inst)
        normals = np.array([h.normal for h in planes.hyperplanes])
        from exactspca.extension import MonomialBasis

        basis = MonomialBasis(2, 2)
        y0 = rng.standard_normal((2, 2))
        y0 /= np.linalg.norm(y0, axis=0, keepdims=True)
        base_point = basis.ext(y0)
        base_signs = np.sign(normals @ base_point)
        profits0 = (planes.arc_coeffs @ base_point).reshape(2, 4)
        circ0 = CirculationInstance(2, 4, 1, profits0)
        family = solve_max_profit(circ0)
        base_family_value = family.profit(circ0)
        checked = 0
        for _ in range(200):
            if checked >= 5:
                break
            y = y0 + 0.05 * rng.standard_normal((2, 2))
            y /= np.linalg.norm(y, axis=0, keepdims=True)
            point = basis.ext(y)
            if not np.array_equal(np.sign(normals @ point), base_signs):
                continue
            checked += 1
            profits = (planes.arc_coeffs @ point).reshape(2, 4)
            circ = CirculationInstance(2, 4, 1, profits)
            best = solve_max_profit(circ).profit(circ)
            # The base family stays optimal anywhere in the region.
            value_of_base = sum(
                profits[i, j] for i, sup in enumerate(
                    (tuple(np.nonzero(family.a0[i])[0]) for i in range(2))
                ) for j in sup
            )
            assert value_of_base == pytest.approx(best, rel=1e-9, abs=1e-9)

    def test_objective_monotone_in_s(self, rng):
        kmatrix = random_low_rank_psd(rng, 4, 2)
        values = [
            solve_spca_ds(_instance(kmatrix, 2, s)).objective for s in (1, 2)
        ]
        assert np.all(np.diff(values) >= -1e-10)

    def test_objective_monotone_in_d(self, rng):
        kmatrix = random_low_rank_psd(rng, 4, 2)
        one = solve_spca_ds(_instance(kmatrix, 1, 2)).objective
        two = solve_spca_ds(_instance(kmatrix, 2, 2)).objective
        assert two >= one - 1e-10

    def test_zero_matrix_completion(self):
        solution = solve_spca_ds(_instance(np.zeros((3, 3)), 2, 1))
        assert solution.supports == ((0,), (1,))
        assert solution.objective == 0.0
        assert solution.diagnostics.completions_in_best == 2

    def test_completion_steals_when_pool_empty(self):
        # Two features, two components, s = 2 at rank one: the circulation
        # may park both features on one component; completion must split.
        q = np.array([2.0, 1.0])
        solution = solve_spca_ds(_instance(symmetrize(np.outer(q, q)), 2, 2))
        assert solution.supports == ((0,), (1,)) or solution.supports == ((1,), (0,))
        assert solution.objective == pytest.approx(5.0, rel=1e-10)

    def test_invalid_parameters(self, rng):
        kmatrix = random_low_rank_psd(rng, 3, 1)
        with pytest.raises(InvalidParameters):
            SpcaDsInstance.build(kmatrix, 4, 1)  # d > n
        with pytest.raises(InvalidParameters):
            SpcaDsInstance.build(kmatrix, 0, 1)
        with pytest.raises(InvalidParameters):
            SpcaDsInstance.build(kmatrix, 1, 0)

    def test_diagnostics_counts(self, rng):
        kmatrix = random_low_rank_psd(rng, 4, 2)
        solution = solve_spca_ds(_instance(kmatrix, 2, 1))
        diag = solution.diagnostics
        assert diag.circuits_enumerated == 78
        assert diag.cells_enumerated >= 1
        assert diag.circulation_solves == diag.cells_enumerated
        assert 1 <= diag.candidates_evaluated <= diag.cells_enumerated
