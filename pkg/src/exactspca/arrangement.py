"""Full-dimensional cells of central hyperplane arrangements.

A cell is a maximal open region on which every hyperplane functional keeps a
fixed sign; it is reported as that sign vector plus a strictly interior
witness point.  Enumeration is by incremental insertion: each new hyperplane
either splits an existing cell or leaves it whole, decided exactly.

Two fast certificates avoid most linear programs: a witness whose margin ball
straddles the new hyperplane proves a split outright, and the distance from
the origin to the convex hull of the (signed, unit) normals decides
feasibility of a candidate sign vector (the hull point doubles as a witness
direction).  Ambiguous cases fall back to a maximize-minimum-margin LP over
the unit box.  Central symmetry halves the work: only cells with a positive
sign on the first hyperplane are enumerated, the rest are mirrored.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.optimize
import scipy.sparse

from .errors import Degenerate, InvalidParameters

MIN_MARGIN = 1e-9
_HULL_INFEASIBLE_TOL = 1e-10
_HULL_FEASIBLE_TOL = 1e-6
_SPLIT_SLACK = 1e-12


@dataclass(frozen=True)
class Hyperplane:
    """The central hyperplane {z : normal . z = 0}; normal must be nonzero."""

    normal: np.ndarray


@dataclass(frozen=True)
class Cell:
    """Sign vector of a full-dimensional cell plus a strict interior witness.

    ``margin`` is the smallest |unit_normal . witness| over the arrangement's
    hyperplanes, so the open ball of that radius around the witness stays
    inside the cell's cone.
    """

    signs: tuple[int, ...]
    witness: np.ndarray
    margin: float


def _unit_normals(hyperplanes, dim: int) -> np.ndarray:
    if dim < 1:
        raise InvalidParameters(f"need dim >= 1, got {dim}")
    rows = []
    for h in hyperplanes:
        normal = np.asarray(getattr(h, "normal", h), dtype=float)
        if normal.shape != (dim,):
            raise InvalidParameters(
                f"normal shape {normal.shape} does not match dim {dim}"
            )
        norm = float(np.linalg.norm(normal))
        if norm == 0.0 or not np.isfinite(norm):
            raise Degenerate("zero or non-finite hyperplane normal")
        rows.append(normal / norm)
    return np.array(rows).reshape(len(rows), dim)


def dedup_hyperplanes(hyperplanes, dim: int, tol: float = 1e-9) -> list[Hyperplane]:
    """Drop hyperplanes whose normals are proportional to an earlier one."""
    unit = _unit_normals(hyperplanes, dim)
    kept: list[int] = []
    for idx in range(unit.shape[0]):
        duplicate = False
        for prev in kept:
            if abs(float(unit[idx] @ unit[prev])) >= 1.0 - tol:
                duplicate = True
                break
        if not duplicate:
            kept.append(idx)
    return [Hyperplane(normal=unit[idx].copy()) for idx in kept]


def expected_generic_cell_count(p: int, q: int) -> int:
    """Cells of p central hyperplanes in general position in dimension q."""
    return 2 * sum(comb(p - 1, k) for k in range(q))


def _margin_lp(rows: np.ndarray, min_margin: float):
    """Maximize the minimum slack of rows . z over the unit box.

    Returns (z, margin) with margin > min_margin, or None when the open cone
    is empty (or too thin to carry a witness).
    """
    m, q = rows.shape
    c = np.zeros(q + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-rows, np.ones((m, 1))])
    b_ub = np.zeros(m)
    bounds = [(-1.0, 1.0)] * q + [(None, None)]
    res = scipy.optimize.linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        return None
    margin = float(res.x[-1])
    if margin <= min_margin:
        return None
    z = res.x[:q].copy()
    return z, float(np.min(rows @ z))


def _cone_interior_point(rows: np.ndarray, min_margin: float):
    """Strict interior point of {z : rows . z > 0}, or None if empty.

    By Gordan's theorem the cone has empty interior exactly when the origin
    lies in the convex hull of the rows; the nearest hull point, found by
    NNLS, otherwise points into the cone with maximum ball margin.  The
    in-between band and any failed verification defer to the LP.
    """
    m, q = rows.shape
    system = np.vstack([rows.T, np.ones((1, m))])
    target = np.zeros(q + 1)
    target[-1] = 1.0
    try:
        lam, _ = scipy.optimize.nnls(system, target, maxiter=50 * m)
    except RuntimeError:
        return _margin_lp(rows, min_margin)
    # The rnorm scipy reports can be stale; recompute the residual.
    residual = float(np.linalg.norm(system @ lam - target))
    if residual < _HULL_INFEASIBLE_TOL:
        return None
    if residual > _HULL_FEASIBLE_TOL:
        z = rows.T @ lam
        norm = float(np.linalg.norm(z))
        if norm > 0.0:
            z = z / norm
            margin = float(np.min(rows @ z))
            if margin > min_margin:
                return z, margin
    return _margin_lp(rows, min_margin)


def witness_for_signs(hyperplanes, signs, dim: int | None = None,
                      min_margin: float = MIN_MARGIN):
    """Point z with sign(normal_h . z) == signs[h] for all h, or None.

    The witness maximizes the minimum margin over the unit box; a best margin
    at or below ``min_margin`` counts as infeasible.
    """
    hyperplanes = list(hyperplanes)
    if dim is None:
        if not hyperplanes:
            raise InvalidParameters("dim is required when no hyperplanes are given")
        dim = np.asarray(getattr(hyperplanes[0], "normal", hyperplanes[0])).shape[0]
    unit = _unit_normals(hyperplanes, dim)
    signs = np.asarray(signs, dtype=int)
    if signs.shape != (unit.shape[0],) or not np.all(np.abs(signs) == 1):
        raise InvalidParameters("signs must be a +-1 vector, one per hyperplane")
    if unit.shape[0] == 0:
        return np.zeros(dim)
    got = _margin_lp(unit * signs[:, None], min_margin)
    return None if got is None else got[0]


def enumerate_cells(hyperplanes, dim: int, min_margin: float = MIN_MARGIN) -> list[Cell]:
    """All full-dimensional cells of a central arrangement.

    Cells are returned sorted by sign vector (hyperplanes in input order), so
    identical inputs give identical outputs regardless of internal order.
    """
    unit = _unit_normals(hyperplanes, dim)
    p = unit.shape[0]
    if p == 0:
        return [Cell(signs=(), witness=np.zeros(dim), margin=np.inf)]

    # Half enumeration: fix sign +1 on the first hyperplane, mirror at the end.
    witnesses: list[np.ndarray] = [unit[0].copy()]
    margins: list[float] = [1.0]
    signs: list[list[int]] = [[1]]
    for h in range(1, p):
        normal = unit[h]
        prefix = unit[: h + 1]
        stacked = np.vstack(witnesses)
        values = stacked @ normal
        new_wit: list[np.ndarray] = []
        new_marg: list[float] = []
        new_signs: list[list[int]] = []

        def push(sign_vec, witness, margin=None):
            if margin is None:
                margin = float(np.min(np.abs(prefix @ witness)))
            if margin <= 0.0:
                refreshed = _cone_interior_point(
                    prefix * np.asarray(sign_vec, dtype=float)[:, None], min_margin
                )
                if refreshed is None:
                    return
                witness, margin = refreshed
            new_signs.append(sign_vec)
            new_wit.append(witness)
            new_marg.append(margin)

        for idx in range(len(witnesses)):
            value = float(values[idx])
            margin = margins[idx]
            witness = witnesses[idx]
            base = signs[idx]
            if abs(value) + _SPLIT_SLACK < margin:
                # The margin ball straddles the new hyperplane: certain split.
                tau_plus = (margin - value) / 2.0
                tau_minus = (margin + value) / 2.0
                push(base + [1], witness + tau_plus * normal)
                push(base + [-1], witness - tau_minus * normal)
                continue
            if abs(value) <= _SPLIT_SLACK:
                # Witness sits on the new hyperplane; decide both sides afresh.
                candidates = (1, -1)
            else:
                side = 1 if value > 0.0 else -1
                push(base + [side], witness, min(margin, abs(value)))
                candidates = (-side,)
            for cand in candidates:
                rows = prefix * np.asarray(base + [cand], dtype=float)[:, None]
                got = _cone_interior_point(rows, min_margin)
                if got is not None:
                    push(base + [cand], got[0], got[1])
        witnesses, margins, signs = new_wit, new_marg, new_signs

    cells = [
        Cell(signs=tuple(sv), witness=w.copy(), margin=m)
        for sv, w, m in zip(signs, witnesses, margins)
    ]
    cells += [
        Cell(
            signs=tuple(-s for s in c.signs),
            witness=-c.witness,
            margin=c.margin,
        )
        for c in cells
    ]
    cells.sort(key=lambda c: c.signs)
    return cells


def _normalize_affine(rows, dim: int) -> np.ndarray:
    """Stack (a, b) rows of affine functionals a.t + b, scaled to unit a."""
    out = []
    for row in rows:
        row = np.asarray(row, dtype=float)
        if row.shape != (dim + 1,):
            raise InvalidParameters(
                f"affine row shape {row.shape} does not match dim {dim}"
            )
        norm = float(np.linalg.norm(row[:dim]))
        if norm == 0.0 or not np.isfinite(norm):
            raise Degenerate("affine row with zero or non-finite normal part")
        out.append(row / norm)
    return np.array(out).reshape(len(out), dim + 1)


def _tighten_box(lo, hi, rows, sweeps: int = 3):
    """Shrink [lo, hi] using the halfspaces a.t + b >= 0; None when empty.

    Jacobi-style interval propagation, vectorized over rows: each sweep
    recomputes every variable bound implied by every constraint given the
    current box, then clips.  The result always still contains the feasible
    set, so it is safe to use as a pruning certificate.
    """
    lo = lo.copy()
    hi = hi.copy()
    rows = np.atleast_2d(rows)
    a = rows[:, :-1]
    b = rows[:, -1]
    pos = a > 0.0
    nonzero = a != 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(sweeps):
            contrib_hi = np.where(pos, a * hi, a * lo)
            rest = contrib_hi.sum(axis=1, keepdims=True) - contrib_hi
            bound = np.where(nonzero, (-b[:, None] - rest) / np.where(nonzero, a, 1.0), np.nan)
            new_lo = np.where(pos, bound, -np.inf)
            new_hi = np.where(~pos & nonzero, bound, np.inf)
            lo = np.maximum(lo, new_lo.max(axis=0, initial=-np.inf))
            hi = np.minimum(hi, new_hi.min(axis=0, initial=np.inf))
            if np.any(lo > hi + 1e-12):
                return None
    return lo, hi


def _affine_interior_point(rows, min_margin: float):
    """Strict interior point of {t : a.t + b > 0 for all rows}, or None.

    Homogenizing with a positive scale coordinate reduces the question to a
    central cone, decided by `_cone_interior_point`.
    """
    dim = rows.shape[1] - 1
    tau = np.zeros(dim + 1)
    tau[-1] = 1.0
    system = np.vstack([rows, tau])
    system = system / np.linalg.norm(system, axis=1, keepdims=True)
    got = _cone_interior_point(system, min_margin)
    if got is None:
        return None
    z = got[0]
    t = z[:dim] / z[dim]
    margin = float(np.min(rows[:, :dim] @ t + rows[:, dim]))
    if margin <= min_margin:
        return None
    return t, margin


_MERGED_LP_CHUNK = 2000

UNDECIDED = object()  # sentinel: merged solve failed for this item


def _merged_margin_lp(base_rows, plane_rows, sign_matrix, sides,
                      box_lo, box_hi, min_margin):
    """Solve many independent max-margin problems in one LP.

    Item j maximizes m over {t in the box : sigma_i (a_i . t + b_i) >= m}
    with rows [base_rows; plane_rows * sign_matrix[j]; sides[j] * new_row]
    (the new row is the last entry of ``plane_rows``).  Because the items
    share no variables, one merged solve returns every item's exact optimum.

    Returns a list with (witness, margin) per feasible item, None per
    infeasible item, and the `UNDECIDED` sentinel when the merged solve
    failed (the caller must then decide those items individually).
    """
    count, h = sign_matrix.shape
    dim = base_rows.shape[1] - 1
    results: list = [UNDECIDED] * count
    for start in range(0, count, _MERGED_LP_CHUNK):
        chunk = slice(start, min(start + _MERGED_LP_CHUNK, count))
        signs_full = np.hstack([
            np.ones((chunk.stop - chunk.start, base_rows.shape[0])),
            sign_matrix[chunk],
            sides[chunk, None],
        ])
        rows_all = np.vstack([base_rows, plane_rows])  # (R + h + 1, dim + 1)
        c_items = chunk.stop - chunk.start
        m_rows = rows_all.shape[0]
        # Signed constraint rows per item: -sigma a . t + m <= sigma b.
        signed = signs_full[:, :, None] * rows_all[None, :, :]
        num_vars = c_items * (dim + 1)
        num_cons = c_items * m_rows
        data = np.concatenate(
            [-signed[:, :, :dim].reshape(-1), np.ones(num_cons)]
        )
        rix = np.concatenate(
            [np.repeat(np.arange(num_cons), dim), np.arange(num_cons)]
        )
        var_base = (np.arange(c_items) * (dim + 1))[:, None, None]
        t_cols = var_base + np.arange(dim)[None, None, :]
        t_cols = np.broadcast_to(t_cols, (c_items, m_rows, dim)).reshape(-1)
        m_cols = np.repeat(np.arange(c_items) * (dim + 1) + dim, m_rows)
        cix = np.concatenate([t_cols, m_cols])
        a_ub = scipy.sparse.coo_matrix(
            (data, (rix, cix)), shape=(num_cons, num_vars)
        ).tocsc()
        b_ub = signed[:, :, dim].reshape(-1)
        cost = np.zeros(num_vars)
        cost[dim :: dim + 1] = -1.0
        bounds = []
        for _ in range(c_items):
            bounds.extend((float(box_lo[k]), float(box_hi[k])) for k in range(dim))
            bounds.append((None, 1.0))
        res = scipy.optimize.linprog(
            cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs"
        )
        if not res.success:
            continue  # leaves UNDECIDED; caller falls back item by item
        x = res.x
        for local in range(c_items):
            offset = local * (dim + 1)
            margin = float(x[offset + dim])
            if margin > min_margin:
                results[start + local] = (x[offset : offset + dim].copy(), margin)
            else:
                results[start + local] = None
    return results


def enumerate_affine_cells(planes, region, dim: int,
                           min_margin: float = MIN_MARGIN,
                           keep_cell=None) -> list[Cell]:
    """Cells cut by affine hyperplanes inside a bounded convex region.

    ``planes`` are (a, b) rows for the cutting hyperplanes {t : a.t + b = 0};
    ``region`` are (a, b) rows for halfspaces {t : a.t + b >= 0} whose
    intersection is bounded with nonempty interior.  Cells are the maximal
    open subsets of the region interior with fixed plane signs; each carries
    a strict interior witness.  Per-cell bounding boxes decide most
    cell-plane incidences by interval arithmetic alone.

    ``keep_cell(lo, hi) -> bool``, when given, may discard a cell (and hence
    its refinements) from its bounding box alone; callers use it to drop
    cells that provably cannot matter to them.
    """
    plane_rows = _normalize_affine(planes, dim)
    region_rows = _normalize_affine(region, dim)
    p = plane_rows.shape[0]
    got = _affine_interior_point(region_rows, min_margin)
    if got is None:
        raise InvalidParameters("region has empty or too-thin interior")
    seed_witness, seed_margin = got
    # A generous starting box shrunk by interval propagation on the region.
    radius = 10.0 * (1.0 + float(np.linalg.norm(seed_witness)))
    box = (np.full(dim, -radius) + seed_witness, np.full(dim, radius) + seed_witness)
    tightened = _tighten_box(box[0], box[1], region_rows, sweeps=6)
    if tightened is not None:
        box = tightened
    if p == 0:
        return [Cell(signs=(), witness=seed_witness, margin=seed_margin)]

    witnesses = [seed_witness]
    margins = [seed_margin]
    signs: list[tuple[int, ...]] = [()]
    boxes_lo = [box[0]]
    boxes_hi = [box[1]]

    for h in range(p):
        a = plane_rows[h, :dim]
        b = plane_rows[h, dim]
        lo_mat = np.vstack(boxes_lo)
        hi_mat = np.vstack(boxes_hi)
        span_lo = np.where(a > 0.0, a * lo_mat, a * hi_mat).sum(axis=1) + b
        span_hi = np.where(a > 0.0, a * hi_mat, a * lo_mat).sum(axis=1) + b
        values = np.vstack(witnesses) @ a + b
        new_wit, new_marg, new_signs, new_lo, new_hi = [], [], [], [], []
        pending: list[tuple[int, int]] = []  # (cell index, candidate side)

        def cell_rows(sign_vec):
            accepted = plane_rows[: len(sign_vec)] * np.asarray(
                sign_vec, dtype=float
            )[:, None]
            return np.vstack([region_rows, accepted])

        def keep(sign_vec, witness, margin, lo, hi):
            new_signs.append(sign_vec)
            new_wit.append(witness)
            new_marg.append(margin)
            new_lo.append(lo)
            new_hi.append(hi)

        def push(sign_vec, witness, lo, hi, margin=None):
            # Fresh or re-cut cell: recompute the margin and tighten the box
            # from the full constraint set (a failed tightening falls back to
            # the parent box, which is always a valid superset).
            rows = cell_rows(sign_vec)
            if margin is None:
                margin = float(np.min(rows[:, :dim] @ witness + rows[:, dim]))
            if margin <= 0.0:
                refreshed = _affine_interior_point(rows, min_margin)
                if refreshed is None:
                    return
                witness, margin = refreshed
            tightened = _tighten_box(lo, hi, rows)
            if tightened is not None:
                lo, hi = tightened
            if keep_cell is not None and not keep_cell(lo, hi):
                return
            keep(sign_vec, witness, margin, lo, hi)

        for idx in range(len(witnesses)):
            base = signs[idx]
            witness = witnesses[idx]
            margin = margins[idx]
            lo = boxes_lo[idx]
            hi = boxes_hi[idx]
            value = float(values[idx])
            if span_lo[idx] > 0.0:
                keep(base + (1,), witness, min(margin, value), lo, hi)
                continue
            if span_hi[idx] < 0.0:
                keep(base + (-1,), witness, min(margin, -value), lo, hi)
                continue
            if abs(value) + _SPLIT_SLACK < margin:
                tau_plus = (margin - value) / 2.0
                tau_minus = (margin + value) / 2.0
                push(base + (1,), witness + tau_plus * a, lo, hi)
                push(base + (-1,), witness - tau_minus * a, lo, hi)
                continue
            if abs(value) <= _SPLIT_SLACK:
                pending.append((idx, 1))
                pending.append((idx, -1))
            else:
                side = 1 if value > 0.0 else -1
                push(base + (side,), witness, lo, hi, min(margin, abs(value)))
                pending.append((idx, -side))

        if pending:
            sign_matrix = np.array([signs[idx] for idx, _ in pending], dtype=float)
            sign_matrix = sign_matrix.reshape(len(pending), h)
            sides = np.array([side for _, side in pending], dtype=float)
            verdicts = _merged_margin_lp(
                region_rows, plane_rows[: h + 1], sign_matrix, sides,
                box[0], box[1], min_margin,
            )
            for (idx, side), verdict in zip(pending, verdicts):
                if verdict is None:
                    continue
                base = signs[idx]
                rows = np.vstack([cell_rows(base), side * plane_rows[h][None, :]])
                if verdict is UNDECIDED:
                    refreshed = _affine_interior_point(rows, min_margin)
                    if refreshed is None:
                        continue
                    t, margin = refreshed
                else:
                    t, _ = verdict
                    margin = float(np.min(rows[:, :dim] @ t + rows[:, dim]))
                    if margin <= min_margin:
                        refreshed = _affine_interior_point(rows, min_margin)
                        if refreshed is None:
                            continue
                        t, margin = refreshed
                push(base + (side,), t, boxes_lo[idx], boxes_hi[idx], margin)

        witnesses, margins, signs = new_wit, new_marg, new_signs
        boxes_lo, boxes_hi = new_lo, new_hi

    cells = [
        Cell(signs=tuple(sv), witness=w.copy(), margin=m)
        for sv, w, m in zip(signs, witnesses, margins)
    ]
    cells.sort(key=lambda c: c.signs)
    return cells


def sample_cells(hyperplanes, dim: int, num_samples: int = 20_000,
                 seed: int | None = None) -> list[Cell]:
    """Randomized approximation of `enumerate_cells` for benchmarking only.

    Sign vectors are collected from random sphere points, so thin cells can
    be missed; never use this mode where exactness matters.
    """
    unit = _unit_normals(hyperplanes, dim)
    p = unit.shape[0]
    if p == 0:
        return [Cell(signs=(), witness=np.zeros(dim), margin=np.inf)]
    rng = np.random.default_rng(seed)
    points = rng.standard_normal((num_samples, dim))
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    values = points @ unit.T
    keep = np.min(np.abs(values), axis=1) > 0.0
    points = points[keep]
    values = values[keep]
    sign_matrix = np.where(values > 0.0, 1, -1).astype(np.int8)
    cells: dict[tuple[int, ...], Cell] = {}
    for row, point, vals in zip(sign_matrix, points, values):
        key = tuple(int(x) for x in row)
        margin = float(np.min(np.abs(vals)))
        known = cells.get(key)
        if known is None or margin > known.margin:
            cells[key] = Cell(signs=key, witness=point.copy(), margin=margin)
    return [cells[key] for key in sorted(cells)]
