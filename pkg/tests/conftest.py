import itertools

import numpy as np
import pytest

from exactspca.linalg import symmetrize


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_low_rank_psd(rng, n, r):
    """PSD matrix of rank at most r, exactly symmetric as stored."""
    factor = rng.standard_normal((n, r))
    return symmetrize(factor @ factor.T)


def minor_rank(matrix, tol=1e-8):
    """Rank via brute-force minor determinants (oracle for tiny matrices)."""
    matrix = np.asarray(matrix, dtype=float)
    n = min(matrix.shape)
    scale = max(float(np.max(np.abs(matrix))), 1.0)
    rank = 0
    for k in range(1, n + 1):
        found = False
        for rows in itertools.combinations(range(matrix.shape[0]), k):
            for cols in itertools.combinations(range(matrix.shape[1]), k):
                sub = matrix[np.ix_(rows, cols)]
                if abs(np.linalg.det(sub)) > tol * scale**k:
                    found = True
                    break
            if found:
                break
        if found:
            rank = k
        else:
            break
    return rank


def undirected_circuit_chis_bruteforce(d, n):
    """All simple cycles of the underlying undirected graph of D, as
    canonical signed incidence vectors over the u->w arcs.

    Vertex ids: 0 is the hub t, 1..d are components, d+1..d+n are features.
    Cycles are found by DFS with the smallest vertex first and the direction
    fixed by comparing the second and last vertices, the standard dedup for
    undirected cycle enumeration.
    """
    num_v = 1 + d + n
    adjacency = [[] for _ in range(num_v)]
    for i in range(d):
        adjacency[0].append(1 + i)
        adjacency[1 + i].append(0)
    for j in range(n):
        adjacency[0].append(1 + d + j)
        adjacency[1 + d + j].append(0)
    for i in range(d):
        for j in range(n):
            adjacency[1 + i].append(1 + d + j)
            adjacency[1 + d + j].append(1 + i)

    cycles = []

    def extend(start, path, on_path):
        for nxt in adjacency[path[-1]]:
            if nxt == start and len(path) >= 3:
                if path[1] < path[-1]:
                    cycles.append(path[:])
            elif nxt > start and nxt not in on_path:
                on_path.add(nxt)
                path.append(nxt)
                extend(start, path, on_path)
                path.pop()
                on_path.discard(nxt)

    for start in range(num_v):
        extend(start, [start], {start})

    keys = set()
    for cycle in cycles:
        chi = {}
        for a in range(len(cycle)):
            x = cycle[a]
            y = cycle[(a + 1) % len(cycle)]
            if 1 <= x <= d and y > d:
                chi[(x - 1, y - d - 1)] = chi.get((x - 1, y - d - 1), 0) + 1
            elif 1 <= y <= d and x > d:
                chi[(y - 1, x - d - 1)] = chi.get((y - 1, x - d - 1), 0) - 1
        items = tuple(sorted(chi.items()))
        flipped = tuple((arc, -sign) for arc, sign in items)
        keys.add(min(items, flipped))
    return keys


def directed_simple_cycles(num_v, arcs):
    """All simple directed cycles as lists of arc indices (tiny graphs)."""
    out_arcs = [[] for _ in range(num_v)]
    for ai, (tail, head) in enumerate(arcs):
        out_arcs[tail].append(ai)
    found = []

    def extend(start, vertex, path, on_path):
        for ai in out_arcs[vertex]:
            head = arcs[ai][1]
            if head == start:
                found.append(path + [ai])
            elif head > start and head not in on_path:
                on_path.add(head)
                extend(start, head, path + [ai], on_path)
                on_path.discard(head)

    for start in range(num_v):
        extend(start, start, [], set())
    return found
