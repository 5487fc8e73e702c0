"""Exact sparse PCA for covariance matrices of low rank.

The solver factors K = R @ R.T, lifts the per-feature quadratics
``norm(R_j @ Y)**2`` to linear functionals on the monomial space, and
enumerates the cells of the central arrangement cut by all pairwise
difference hyperplanes.  Inside a cell the ordering of the functionals is
fixed, so its top-s features form the one candidate support the cell can
contribute; the best candidate under a small PCA evaluation is globally
optimal.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .arrangement import Hyperplane, dedup_hyperplanes, enumerate_cells, sample_cells
from .errors import InvalidParameters
from .extension import MonomialBasis, build_row_functional
from .linalg import DEFAULT_RANK_TOL, PsdFactor, as_symmetric, pivoted_cholesky, solve_pca, symmetrize


@dataclass(frozen=True)
class SpcaInstance:
    """A sparse PCA problem: PSD matrix K, d components, support size s."""

    kmatrix: np.ndarray
    d: int
    s: int
    factor: PsdFactor

    @classmethod
    def build(cls, kmatrix, d: int, s: int,
              tol_rank: float = DEFAULT_RANK_TOL) -> "SpcaInstance":
        kmatrix = as_symmetric(kmatrix)
        n = kmatrix.shape[0]
        if d < 1:
            raise InvalidParameters(f"need d >= 1, got d={d}")
        if d > s:
            raise InvalidParameters(
                f"an orthonormal X with at most s nonzero rows needs s >= d, "
                f"got d={d}, s={s}"
            )
        if s > n:
            raise InvalidParameters(f"need s <= n, got s={s}, n={n}")
        return cls(kmatrix=kmatrix, d=d, s=s, factor=pivoted_cholesky(kmatrix, tol_rank))

    @property
    def n(self) -> int:
        return self.kmatrix.shape[0]

    @property
    def rank(self) -> int:
        return self.factor.rank

    @property
    def num_components_reduced(self) -> int:
        """min(d, rank): the column count after the dimensionality reduction."""
        return min(self.d, self.factor.rank)


def candidate_support_from_point(point, functionals, s: int) -> tuple[int, ...]:
    """The s indices with the largest functional values at ``point``.

    Ties go to the smaller index, so the result is deterministic even on
    degenerate inputs.
    """
    values = np.array([f(point) for f in functionals])
    order = np.argsort(-values, kind="stable")
    return tuple(sorted(int(j) for j in order[:s]))


@dataclass(frozen=True)
class CandidateSupports:
    """Deduplicated candidate supports plus enumeration bookkeeping."""

    supports: tuple[tuple[int, ...], ...]
    cells_enumerated: int
    hyperplane_count: int
    extended_dim: int
    duplicate_feature_pairs: tuple[tuple[int, int], ...]
    cell_signs: dict = field(hash=False, default_factory=dict)  # support -> signs


def enumerate_candidate_supports(
    instance: SpcaInstance,
    cell_mode: str = "exact",
    num_samples: int = 20_000,
    seed: int | None = None,
) -> CandidateSupports:
    """Candidate supports, one per arrangement cell, deduplicated.

    The candidate family is guaranteed to contain an optimal support; many
    cells collapse onto the same top-s set, hence the deduplication.
    """
    n, s = instance.n, instance.s
    r = instance.rank
    if r == 0 or s == n:
        # No hyperplanes cut the space: a single trivial cell.
        support = tuple(range(s))
        return CandidateSupports(
            supports=(support,),
            cells_enumerated=1,
            hyperplane_count=0,
            extended_dim=0,
            duplicate_feature_pairs=(),
            cell_signs={support: ()},
        )
    basis = MonomialBasis(r, instance.num_components_reduced)
    coeffs = np.vstack(
        [build_row_functional(basis, instance.factor.row(j), tag=f"row:{j}").coeffs
         for j in range(n)]
    )
    normals = []
    duplicates = []
    for j in range(n):
        for jp in range(j + 1, n):
            delta = coeffs[j] - coeffs[jp]
            if not np.any(delta):
                duplicates.append((j, jp))
                continue
            normals.append(Hyperplane(normal=delta))
    hyperplanes = dedup_hyperplanes(normals, basis.dim)
    if cell_mode == "exact":
        cells = enumerate_cells(hyperplanes, basis.dim)
    elif cell_mode == "randomized":
        cells = sample_cells(hyperplanes, basis.dim, num_samples=num_samples, seed=seed)
    else:
        raise InvalidParameters(f"unknown cell mode {cell_mode!r}")
    witness_matrix = np.vstack([c.witness for c in cells])
    values = witness_matrix @ coeffs.T  # (cells, n)
    order = np.argsort(-values, axis=1, kind="stable")
    tops = np.sort(order[:, :s], axis=1)
    supports: list[tuple[int, ...]] = []
    cell_signs: dict = {}
    for row, cell in zip(tops, cells):
        support = tuple(int(j) for j in row)
        if support not in cell_signs:
            cell_signs[support] = cell.signs
            supports.append(support)
    supports.sort()
    return CandidateSupports(
        supports=tuple(supports),
        cells_enumerated=len(cells),
        hyperplane_count=len(hyperplanes),
        extended_dim=basis.dim,
        duplicate_feature_pairs=tuple(duplicates),
        cell_signs=cell_signs,
    )


@dataclass(frozen=True)
class SpcaDiagnostics:
    rank: int
    extended_dim: int
    hyperplanes: int
    cells_enumerated: int
    candidates_evaluated: int
    best_cell_signs: tuple[int, ...] | None
    nonzero_rows: int
    duplicate_feature_pairs: tuple[tuple[int, int], ...]
    stage_ms: dict


@dataclass(frozen=True)
class SpcaSolution:
    """Optimal support (0-based, size s), loading matrix and objective."""

    support: tuple[int, ...]
    x: np.ndarray  # (n, d), orthonormal columns, rows outside support zero
    objective: float
    diagnostics: SpcaDiagnostics


def solve_spca(
    instance: SpcaInstance,
    cell_mode: str = "exact",
    num_samples: int = 20_000,
    seed: int | None = None,
) -> SpcaSolution:
    """Globally optimal sparse PCA solution for the given instance."""
    n, d, s = instance.n, instance.d, instance.s
    stage_ms: dict = {}
    if instance.rank == 0:
        # K is numerically zero: every feasible X attains the optimum 0.
        support = tuple(range(s))
        x = np.zeros((n, d))
        for col, j in enumerate(support[:d]):
            x[j, col] = 1.0
        diagnostics = SpcaDiagnostics(
            rank=0, extended_dim=0, hyperplanes=0, cells_enumerated=1,
            candidates_evaluated=1, best_cell_signs=(), nonzero_rows=d,
            duplicate_feature_pairs=(), stage_ms=stage_ms,
        )
        return SpcaSolution(support=support, x=x, objective=0.0, diagnostics=diagnostics)

    tick = time.perf_counter()
    candidates = enumerate_candidate_supports(
        instance, cell_mode=cell_mode, num_samples=num_samples, seed=seed
    )
    stage_ms["candidates"] = (time.perf_counter() - tick) * 1000.0

    tick = time.perf_counter()
    reduced = instance.num_components_reduced
    factor = instance.factor
    best_support = None
    best_value = -np.inf
    for support in candidates.supports:  # sorted, so ties keep the lex-smallest
        rows = factor.rows(support)
        value, _ = solve_pca(symmetrize(rows.T @ rows), reduced)
        if value > best_value:
            best_value = value
            best_support = support
    stage_ms["evaluation"] = (time.perf_counter() - tick) * 1000.0

    tick = time.perf_counter()
    rows = factor.rows(best_support)
    objective, x_rows = solve_pca(symmetrize(rows @ rows.T), d)
    x = np.zeros((n, d))
    x[list(best_support), :] = x_rows
    stage_ms["recovery"] = (time.perf_counter() - tick) * 1000.0

    diagnostics = SpcaDiagnostics(
        rank=instance.rank,
        extended_dim=candidates.extended_dim,
        hyperplanes=candidates.hyperplane_count,
        cells_enumerated=candidates.cells_enumerated,
        candidates_evaluated=len(candidates.supports),
        best_cell_signs=candidates.cell_signs.get(best_support),
        nonzero_rows=int(np.count_nonzero(np.any(x != 0.0, axis=1))),
        duplicate_feature_pairs=candidates.duplicate_feature_pairs,
        stage_ms=stage_ms,
    )
    return SpcaSolution(
        support=best_support, x=x, objective=float(objective), diagnostics=diagnostics
    )
