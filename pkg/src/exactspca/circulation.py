"""Max-profit integer circulations on the three-layer digraph D.

D has a hub vertex t, component vertices u_0..u_{d-1} and feature vertices
w_0..w_{n-1}.  Arcs run t -> u_i (capacity s, profit 0), u_i -> w_j
(capacity 1, profit p[i, j]) and w_j -> t (capacity 1, profit 0).  Feasible
integer circulations therefore pick pairwise-disjoint feature sets, one per
component, each of size at most s.

The solver is cycle canceling: while the residual graph contains a directed
circuit of positive profit, push one unit around the best-mean such circuit
(located with Karp's minimum-mean-cycle recurrence on negated profits).  The
optimality condition "no residual circuit has positive profit" doubles as the
certificate check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleFlow, InvalidCircuit, InvalidParameters

MEAN_PROFIT_TOL = 1e-12


@dataclass(frozen=True)
class CirculationInstance:
    """Problem data: dimensions, the per-component capacity s, arc profits."""

    d: int
    n: int
    s: int
    profits: np.ndarray  # (d, n); profits[i, j] on arc u_i -> w_j

    def __post_init__(self):
        if self.d < 1 or self.n < 1 or self.s < 1:
            raise InvalidParameters(
                f"need d, n, s >= 1, got ({self.d}, {self.n}, {self.s})"
            )
        profits = np.asarray(self.profits, dtype=float)
        if profits.shape != (self.d, self.n):
            raise InvalidParameters(
                f"profits shape {profits.shape} does not match ({self.d}, {self.n})"
            )
        if not np.all(np.isfinite(profits)):
            raise InvalidParameters("profits must be finite")
        object.__setattr__(self, "profits", profits)

    @property
    def num_vertices(self) -> int:
        return 1 + self.d + self.n  # t, then u's, then w's


@dataclass(frozen=True)
class Circulation:
    """Integer arc flows: a0 on u->w arcs, au on t->u arcs, aw on w->t arcs."""

    a0: np.ndarray  # (d, n)
    au: np.ndarray  # (d,)
    aw: np.ndarray  # (n,)

    def profit(self, instance: CirculationInstance) -> float:
        return float(np.sum(instance.profits * self.a0))


def zero_circulation(instance: CirculationInstance) -> Circulation:
    return Circulation(
        a0=np.zeros((instance.d, instance.n), dtype=int),
        au=np.zeros(instance.d, dtype=int),
        aw=np.zeros(instance.n, dtype=int),
    )


def check_circulation(instance: CirculationInstance, f: Circulation) -> None:
    """Raise `InfeasibleFlow` unless f is integer, within capacity, conserved."""
    a0 = np.asarray(f.a0)
    au = np.asarray(f.au)
    aw = np.asarray(f.aw)
    if a0.shape != (instance.d, instance.n) or au.shape != (instance.d,) or aw.shape != (instance.n,):
        raise InfeasibleFlow("flow arrays have wrong shapes")
    for arr in (a0, au, aw):
        if not np.issubdtype(arr.dtype, np.integer):
            raise InfeasibleFlow("flows must be integer arrays")
    if np.any(a0 < 0) or np.any(a0 > 1):
        raise InfeasibleFlow("u->w flow outside [0, 1]")
    if np.any(au < 0) or np.any(au > instance.s):
        raise InfeasibleFlow(f"t->u flow outside [0, {instance.s}]")
    if np.any(aw < 0) or np.any(aw > 1):
        raise InfeasibleFlow("w->t flow outside [0, 1]")
    if np.any(a0.sum(axis=1) != au):
        raise InfeasibleFlow("conservation violated at a component vertex")
    if np.any(a0.sum(axis=0) != aw):
        raise InfeasibleFlow("conservation violated at a feature vertex")
    if int(au.sum()) != int(aw.sum()):
        raise InfeasibleFlow("conservation violated at the hub vertex")


# Residual arcs are tuples (tail, head, cost, capacity, key) with
# cost = -profit and key = ("a0"|"au"|"aw", indices..., direction).
def _residual_arcs(instance: CirculationInstance, f: Circulation):
    d, n, s = instance.d, instance.n, instance.s
    profits = instance.profits
    arcs = []
    for i in range(d):
        if f.au[i] < s:
            arcs.append((0, 1 + i, 0.0, s - int(f.au[i]), ("au", i, 1)))
        if f.au[i] > 0:
            arcs.append((1 + i, 0, 0.0, int(f.au[i]), ("au", i, -1)))
    for i in range(d):
        for j in range(n):
            p = float(profits[i, j])
            if f.a0[i, j] < 1:
                arcs.append((1 + i, 1 + d + j, -p, 1, ("a0", i, j, 1)))
            else:
                arcs.append((1 + d + j, 1 + i, p, 1, ("a0", i, j, -1)))
    for j in range(n):
        if f.aw[j] < 1:
            arcs.append((1 + d + j, 0, 0.0, 1, ("aw", j, 1)))
        else:
            arcs.append((0, 1 + d + j, 0.0, 1, ("aw", j, -1)))
    return arcs


def _karp_tables(num_v: int, arcs):
    """Multi-source Karp recurrence; returns (min cycle mean, argmin vertex, D, P)."""
    inf = math.inf
    dist = [[inf] * num_v for _ in range(num_v + 1)]
    parent = [[-1] * num_v for _ in range(num_v + 1)]
    dist[0] = [0.0] * num_v
    for k in range(1, num_v + 1):
        dk = dist[k]
        dk1 = dist[k - 1]
        pk = parent[k]
        for ai, (tail, head, cost, _cap, _key) in enumerate(arcs):
            du = dk1[tail]
            if du == inf:
                continue
            cand = du + cost
            if cand < dk[head]:
                dk[head] = cand
                pk[head] = ai
    best_mu = None
    best_v = -1
    dn = dist[num_v]
    for vtx in range(num_v):
        if dn[vtx] == inf:
            continue
        worst = None
        for k in range(num_v):
            if dist[k][vtx] == inf:
                continue
            mean = (dn[vtx] - dist[k][vtx]) / (num_v - k)
            if worst is None or mean > worst:
                worst = mean
        if worst is None:
            continue
        if best_mu is None or worst < best_mu:
            best_mu = worst
            best_v = vtx
    return best_mu, best_v, dist, parent


def _cycles_in_walk(vertices, arc_indices):
    """Arc-index slices of the cycles formed at repeated vertices of a walk."""
    seen = {}
    cycles = []
    for pos, vtx in enumerate(vertices):
        if vtx in seen:
            cycles.append(arc_indices[seen[vtx] : pos])
        seen[vtx] = pos
    return cycles


def _cycle_profit(arcs, cycle):
    return -sum(arcs[ai][2] for ai in cycle)


def _positive_cycle_karp(num_v, arcs, tol):
    mu, best_v, dist, parent = _karp_tables(num_v, arcs)
    if mu is None or -mu <= tol:
        return None
    vertices = [best_v]
    arc_indices = []
    vtx = best_v
    for k in range(num_v, 0, -1):
        ai = parent[k][vtx]
        if ai < 0:
            return "retry"  # table walk broke down; caller falls back
        arc_indices.append(ai)
        vtx = arcs[ai][0]
        vertices.append(vtx)
    vertices.reverse()
    arc_indices.reverse()
    best = None
    for cycle in _cycles_in_walk(vertices, arc_indices):
        prof = _cycle_profit(arcs, cycle)
        if prof > tol and (best is None or prof > best[0]):
            best = (prof, cycle)
    return best[1] if best else "retry"


def _positive_cycle_bellman_ford(num_v, arcs, tol):
    dist = [0.0] * num_v
    pred = [-1] * num_v
    marked = -1
    for _ in range(num_v):
        marked = -1
        for ai, (tail, head, cost, _cap, _key) in enumerate(arcs):
            if dist[tail] + cost < dist[head] - 1e-15:
                dist[head] = dist[tail] + cost
                pred[head] = ai
                marked = head
        if marked < 0:
            return None
    # Walk predecessors until the path closes on itself.
    vtx = marked
    for _ in range(num_v):
        if pred[vtx] < 0:
            return None
        vtx = arcs[pred[vtx]][0]
    arc_indices = []
    cur = vtx
    for _ in range(num_v + 1):
        ai = pred[cur]
        if ai < 0:
            return None
        arc_indices.append(ai)
        cur = arcs[ai][0]
        if cur == vtx:
            break
    else:
        return None
    arc_indices.reverse()
    prof = _cycle_profit(arcs, arc_indices)
    if prof > tol:
        return arc_indices
    return None


def _positive_cycle_exhaustive(num_v, arcs, tol):
    """Last-resort search over all simple directed cycles of the residual graph."""
    out_arcs = [[] for _ in range(num_v)]
    for ai, (tail, _head, _cost, _cap, _key) in enumerate(arcs):
        out_arcs[tail].append(ai)
    best = None

    def extend(start, vtx, path, on_path, profit):
        nonlocal best
        for ai in out_arcs[vtx]:
            head = arcs[ai][1]
            gain = -arcs[ai][2]
            if head == start:
                total = profit + gain
                if total > tol and (best is None or total > best[0]):
                    best = (total, path + [ai])
            elif head > start and head not in on_path:
                on_path.add(head)
                extend(start, head, path + [ai], on_path, profit + gain)
                on_path.discard(head)

    for start in range(num_v):
        extend(start, start, [], set(), 0.0)
    return best[1] if best else None


def _find_positive_profit_cycle(num_v, arcs, tol):
    got = _positive_cycle_karp(num_v, arcs, tol)
    if got is None:
        return None
    if got != "retry":
        return got
    got = _positive_cycle_bellman_ford(num_v, arcs, tol)
    if got is not None:
        return got
    return _positive_cycle_exhaustive(num_v, arcs, tol)


def _apply_cycle(f: Circulation, arcs, cycle) -> Circulation:
    theta = min(arcs[ai][3] for ai in cycle)
    a0 = f.a0.copy()
    au = f.au.copy()
    aw = f.aw.copy()
    for ai in cycle:
        key = arcs[ai][4]
        if key[0] == "a0":
            _, i, j, direction = key
            a0[i, j] += direction * theta
        elif key[0] == "au":
            _, i, direction = key
            au[i] += direction * theta
        else:
            _, j, direction = key
            aw[j] += direction * theta
    return Circulation(a0=a0, au=au, aw=aw)


def _greedy_circulation(instance: CirculationInstance) -> Circulation:
    """Feasible warm start: scan arcs by decreasing profit, assign when free."""
    f = zero_circulation(instance)
    order = sorted(
        ((float(instance.profits[i, j]), i, j)
         for i in range(instance.d) for j in range(instance.n)),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    for p, i, j in order:
        if p <= 0.0:
            break
        if f.aw[j] == 0 and f.au[i] < instance.s:
            f.a0[i, j] = 1
            f.au[i] += 1
            f.aw[j] = 1
    return f


@dataclass(frozen=True)
class ResidualCircuit:
    """A directed circuit of a residual graph, kept as arc keys plus profit."""

    vertices: tuple[int, ...]  # 0 is t, 1..d are u's, d+1..d+n are w's
    arc_keys: tuple[tuple, ...]
    profit: float


def _certificate_from_cycle(arcs, cycle) -> ResidualCircuit:
    vertices = [arcs[ai][0] for ai in cycle]
    rotate = vertices.index(min(vertices))
    cycle = cycle[rotate:] + cycle[:rotate]
    vertices = vertices[rotate:] + vertices[:rotate]
    return ResidualCircuit(
        vertices=tuple(vertices),
        arc_keys=tuple(arcs[ai][4] for ai in cycle),
        profit=_cycle_profit(arcs, cycle),
    )


def is_optimal(
    instance: CirculationInstance,
    f: Circulation,
    tol: float = MEAN_PROFIT_TOL,
) -> tuple[bool, ResidualCircuit | None]:
    """Certify optimality: no residual directed circuit has positive profit.

    Returns (True, None) for an optimal circulation, otherwise (False,
    certificate) where the certificate is a positive-profit residual circuit.
    """
    check_circulation(instance, f)
    arcs = _residual_arcs(instance, f)
    cycle = _find_positive_profit_cycle(instance.num_vertices, arcs, tol)
    if cycle is None:
        return True, None
    return False, _certificate_from_cycle(arcs, cycle)


def solve_max_profit(
    instance: CirculationInstance,
    tol: float = MEAN_PROFIT_TOL,
) -> Circulation:
    """Maximum-profit integer circulation by residual cycle canceling."""
    f = _greedy_circulation(instance)
    # Each cancellation strictly increases profit over a finite state space,
    # so the loop terminates; the cap is a defensive guard.
    for _ in range(10_000):
        arcs = _residual_arcs(instance, f)
        cycle = _find_positive_profit_cycle(instance.num_vertices, arcs, tol)
        if cycle is None:
            break
        f = _apply_cycle(f, arcs, cycle)
    else:
        raise RuntimeError("cycle canceling failed to terminate")
    optimal, _ = is_optimal(instance, f, tol)
    if not optimal:
        raise RuntimeError("cycle canceling stopped at a non-optimal circulation")
    return f


def supports_from_circulation(
    instance: CirculationInstance, f: Circulation
) -> tuple[tuple[int, ...], ...]:
    """Per-component feature sets {j : flow on u_i -> w_j is 1}."""
    check_circulation(instance, f)
    return tuple(
        tuple(int(j) for j in np.nonzero(f.a0[i])[0]) for i in range(instance.d)
    )


@dataclass(frozen=True)
class UndirectedCircuit:
    """An undirected circuit of D with its signed incidence over u->w arcs.

    ``u_sequence`` and ``w_sequence`` list the vertices in traversal order.
    Circuits through the hub are traversed starting and ending at t; the
    alternating kind cycles through u's and w's only.  ``chi_items`` maps
    each traversed u->w arc to +1 (forward) or -1 (backward).
    """

    u_sequence: tuple[int, ...]
    w_sequence: tuple[int, ...]
    through_t: bool
    chi_items: tuple[tuple[tuple[int, int], int], ...]

    @property
    def chi(self) -> dict[tuple[int, int], int]:
        return dict(self.chi_items)

    @property
    def kind(self) -> str:
        return "through_t" if self.through_t else "alternating"

    def canonical_key(self):
        flipped = tuple((arc, -sign) for arc, sign in self.chi_items)
        return min(self.chi_items, flipped)


def _interleaved_tokens(u_seq, w_seq, through_t):
    ku, kw = len(u_seq), len(w_seq)
    tokens = []
    if through_t and kw == ku + 1:
        for m in range(ku):
            tokens.append(("w", w_seq[m]))
            tokens.append(("u", u_seq[m]))
        tokens.append(("w", w_seq[ku]))
    elif ku == kw or (through_t and ku == kw + 1):
        for m in range(kw):
            tokens.append(("u", u_seq[m]))
            tokens.append(("w", w_seq[m]))
        if ku == kw + 1:
            tokens.append(("u", u_seq[ku - 1]))
    else:
        raise InvalidCircuit(
            f"sequence lengths ({ku}, {kw}) do not form a circuit"
        )
    if through_t:
        tokens = [("t", -1)] + tokens
    return tokens


def _make_circuit(u_seq, w_seq, through_t) -> UndirectedCircuit:
    u_seq = tuple(u_seq)
    w_seq = tuple(w_seq)
    if len(set(u_seq)) != len(u_seq) or len(set(w_seq)) != len(w_seq):
        raise InvalidCircuit("vertex sequences must be distinct")
    if not through_t and (len(u_seq) != len(w_seq) or len(u_seq) < 2):
        raise InvalidCircuit("alternating circuits need k >= 2 of each kind")
    if through_t and abs(len(u_seq) - len(w_seq)) > 1:
        raise InvalidCircuit("through-t circuits need |#u - #w| <= 1")
    if not u_seq or not w_seq:
        raise InvalidCircuit("a circuit visits at least one u and one w")
    tokens = _interleaved_tokens(u_seq, w_seq, through_t)
    chi: dict[tuple[int, int], int] = {}
    size = len(tokens)
    for a in range(size):
        x = tokens[a]
        y = tokens[(a + 1) % size]
        if x[0] == "u" and y[0] == "w":
            arc = (x[1], y[1])
            sign = 1
        elif x[0] == "w" and y[0] == "u":
            arc = (y[1], x[1])
            sign = -1
        else:
            continue  # edges at t carry no profit
        if arc in chi:
            raise InvalidCircuit(f"arc {arc} traversed twice")
        chi[arc] = sign
    return UndirectedCircuit(
        u_sequence=u_seq,
        w_sequence=w_seq,
        through_t=through_t,
        chi_items=tuple(sorted(chi.items())),
    )


def enumerate_undirected_circuits(d: int, n: int) -> list[UndirectedCircuit]:
    """All undirected circuits of D, one representative per traversal reversal.

    Four families exhaust the circuits of the three-layer graph: circuits
    through t with equally many u's and w's, circuits through t entering and
    leaving via u's (one extra u), circuits through t entering and leaving
    via w's (one extra w), and alternating u-w circuits avoiding t.
    """
    if d < 1 or n < 1:
        raise InvalidParameters(f"need d, n >= 1, got ({d}, {n})")
    circuits: list[UndirectedCircuit] = []
    seen = set()

    def add(u_seq, w_seq, through_t):
        circuit = _make_circuit(u_seq, w_seq, through_t)
        key = circuit.canonical_key()
        if key in seen:
            return
        seen.add(key)
        circuits.append(circuit)

    # Through t, balanced: t-u-w-...-u-w-t.  One u-first traversal each.
    for k in range(1, min(d, n) + 1):
        for u_seq in itertools.permutations(range(d), k):
            for w_seq in itertools.permutations(range(n), k):
                add(u_seq, w_seq, True)
    # Through t via two t-u edges: t-u-w-...-w-u-t; reversal stays u-first.
    for k in range(2, d + 1):
        if k - 1 > n:
            break
        for u_seq in itertools.permutations(range(d), k):
            for w_seq in itertools.permutations(range(n), k - 1):
                if (u_seq, w_seq) > (u_seq[::-1], w_seq[::-1]):
                    continue
                add(u_seq, w_seq, True)
    # Through t via two w-t edges: t-w-u-...-u-w-t.
    for k in range(1, d + 1):
        if k + 1 > n:
            break
        for u_seq in itertools.permutations(range(d), k):
            for w_seq in itertools.permutations(range(n), k + 1):
                if (w_seq, u_seq) > (w_seq[::-1], u_seq[::-1]):
                    continue
                add(u_seq, w_seq, True)
    # Alternating u-w cycles: rotation fixed by starting at the smallest u,
    # reflection resolved lexicographically.
    for k in range(2, min(d, n) + 1):
        for u_set in itertools.combinations(range(d), k):
            u0 = u_set[0]
            for u_rest in itertools.permutations(u_set[1:]):
                u_seq = (u0,) + u_rest
                for w_seq in itertools.permutations(range(n), k):
                    u_ref = (u0,) + tuple(reversed(u_rest))
                    w_ref = tuple(reversed(w_seq))
                    if (u_seq, w_seq) > (u_ref, w_ref):
                        continue
                    add(u_seq, w_seq, False)
    return circuits


def circuit_profit(circuit: UndirectedCircuit, profits) -> float:
    """Signed profit of a circuit: only u->w arcs contribute."""
    profits = np.asarray(profits, dtype=float)
    total = 0.0
    for (i, j), sign in circuit.chi_items:
        total += sign * float(profits[i, j])
    return total
