"""Brute-force reference solvers used to certify the exact pipelines.

These stay deliberately naive: plain enumeration of supports, assignments and
arc selections, with a hard cap so misuse fails loudly instead of hanging.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .circulation import CirculationInstance
from .errors import InvalidParameters, TooLarge
from .linalg import as_symmetric, solve_pca

DEFAULT_ENUMERATION_CAP = 1_000_000
_MATCH_TOL = 1e-10


@dataclass(frozen=True)
class OracleReport:
    """Best objective, every maximizer found, and how many cases were tried."""

    objective: float
    argmax_supports: tuple
    instances_enumerated: int


def _collect(best_entries, objective):
    keep = [s for v, s in best_entries if v >= objective - _MATCH_TOL * (1.0 + abs(objective))]
    return tuple(keep)


def brute_force_spca(kmatrix, d: int, s: int,
                     cap: int = DEFAULT_ENUMERATION_CAP) -> OracleReport:
    """Maximize the top-d eigenvalue sum of K[S, S] over all size-s supports."""
    kmatrix = as_symmetric(kmatrix)
    n = kmatrix.shape[0]
    if not 1 <= d <= s <= n:
        raise InvalidParameters(f"need 1 <= d <= s <= n, got d={d}, s={s}, n={n}")
    total = comb(n, s)
    if total > cap:
        raise TooLarge(f"{total} supports exceed the cap {cap}")
    entries = []
    best = -np.inf
    for support in itertools.combinations(range(n), s):
        sub = kmatrix[np.ix_(support, support)]
        value, _ = solve_pca(sub, d)
        entries.append((value, support))
        best = max(best, value)
    return OracleReport(
        objective=float(best),
        argmax_supports=_collect(entries, best),
        instances_enumerated=total,
    )


def brute_force_spca_ds(kmatrix, d: int, s: int,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> OracleReport:
    """Maximize the sum of per-component top eigenvalues over disjoint families.

    Every feature is assigned to one of {none, component 1..d}; families with
    an empty or oversized component are skipped (feasible loadings need unit
    norm, hence nonempty supports of size at most s).
    """
    kmatrix = as_symmetric(kmatrix)
    n = kmatrix.shape[0]
    if not 1 <= d <= n:
        raise InvalidParameters(f"need 1 <= d <= n, got d={d}, n={n}")
    if s < 1:
        raise InvalidParameters(f"need s >= 1, got s={s}")
    total = (d + 1) ** n
    if total > cap:
        raise TooLarge(f"{total} assignments exceed the cap {cap}")
    entries = []
    best = -np.inf
    for assignment in itertools.product(range(d + 1), repeat=n):
        supports = [[] for _ in range(d)]
        for j, cls in enumerate(assignment):
            if cls > 0:
                supports[cls - 1].append(j)
        if any(not t or len(t) > s for t in supports):
            continue
        value = 0.0
        for t in supports:
            sub = kmatrix[np.ix_(t, t)]
            top, _ = solve_pca(sub, 1)
            value += top
        family = tuple(tuple(t) for t in supports)
        entries.append((value, family))
        best = max(best, value)
    return OracleReport(
        objective=float(best),
        argmax_supports=_collect(entries, best),
        instances_enumerated=total,
    )


def brute_force_max_profit(instance: CirculationInstance,
                           cap: int = DEFAULT_ENUMERATION_CAP) -> OracleReport:
    """Maximize total profit over all assignments of features to components.

    Each feature goes to one of {unassigned, component 1..d} with at most s
    features per component; this enumerates exactly the feasible circulations
    of the digraph.
    """
    d, n, s = instance.d, instance.n, instance.s
    total = (d + 1) ** n
    if total > cap:
        raise TooLarge(f"{total} assignments exceed the cap {cap}")
    entries = []
    best = -np.inf
    for assignment in itertools.product(range(d + 1), repeat=n):
        counts = [0] * d
        value = 0.0
        feasible = True
        for j, cls in enumerate(assignment):
            if cls == 0:
                continue
            counts[cls - 1] += 1
            if counts[cls - 1] > s:
                feasible = False
                break
            value += float(instance.profits[cls - 1, j])
        if not feasible:
            continue
        family = tuple(
            tuple(j for j, cls in enumerate(assignment) if cls == i + 1)
            for i in range(d)
        )
        entries.append((value, family))
        best = max(best, value)
    return OracleReport(
        objective=float(best),
        argmax_supports=_collect(entries, best),
        instances_enumerated=total,
    )
