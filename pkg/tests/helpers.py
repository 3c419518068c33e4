"""Shared oracles and generators for the test suite.

The determinant oracle is deliberately independent of the package: it builds
the negated intersection matrix and runs fraction-free Bareiss elimination,
so agreement with the tip-recursion route is a real cross-check.
"""

from __future__ import annotations

import random

from qhp import WeightedForest


def minus_q_matrix(forest: WeightedForest) -> list[list[int]]:
    """The matrix of -Q in vertex order: -weight on the diagonal, -1 per edge."""
    order = forest.vertices
    idx = {v: i for i, v in enumerate(order)}
    n = len(order)
    mat = [[0] * n for _ in range(n)]
    for v in order:
        mat[idx[v]][idx[v]] = -forest.weight(v)
    for u, v in forest.edge_list():
        mat[idx[u]][idx[v]] = -1
        mat[idx[v]][idx[u]] = -1
    return mat


def bareiss_det(mat: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free Gaussian elimination."""
    n = len(mat)
    if n == 0:
        return 1
    m = [row[:] for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def oracle_discriminant(forest: WeightedForest) -> int:
    return bareiss_det(minus_q_matrix(forest))


def random_tree(
    rng: random.Random, size: int, weights: tuple[int, int] = (-5, 1)
) -> WeightedForest:
    """A uniform random attachment tree with weights drawn from the range."""
    lo, hi = weights
    w = {f"v{i}": rng.randint(lo, hi) for i in range(size)}
    edges = [(f"v{i}", f"v{rng.randrange(i)}") for i in range(1, size)]
    return WeightedForest(w, edges)


def forest_equal(a: WeightedForest, b: WeightedForest) -> bool:
    """Same labeled vertices, weights and edges."""
    return a.weights == b.weights and sorted(a.edge_list()) == sorted(b.edge_list())


# ---------------------------------------------------------------------------
# flow-equivalence oracle


def oracle_flow_equivalent(
    ea: tuple[int, ...], eb: tuple[int, ...], clamp: int = 12, cap: int = 200_000
) -> bool:
    """Breadth-first search over inner moves on unoriented entry lists.

    Independent of the package's search: states are entry tuples, a move
    shifts one unit across an interior zero, chains compare up to reversal.
    """

    def canon(t: tuple[int, ...]) -> tuple[int, ...]:
        return min(t, t[::-1])

    def neighbors(t: tuple[int, ...]):
        for i in range(1, len(t) - 1):
            if t[i] != 0:
                continue
            for d in (1, -1):
                s = list(t)
                s[i - 1] += d
                s[i + 1] -= d
                yield tuple(s)

    if len(ea) != len(eb):
        return False
    start, target = canon(tuple(ea)), canon(tuple(eb))
    if start == target:
        return True
    seen = {start}
    frontier = [start]
    while frontier and len(seen) < cap:
        fresh = []
        for s in frontier:
            for t in neighbors(s):
                if any(abs(e) > clamp for e in t):
                    continue
                c = canon(t)
                if c == target:
                    return True
                if c not in seen:
                    seen.add(c)
                    fresh.append(c)
        frontier = fresh
    return False


def random_inner_scramble(
    rng: random.Random, forest: WeightedForest, steps: int
):
    """A random walk of inner moves; returns the scrambled forest."""
    from qhp import FlowMove, flow

    cur = forest
    for _ in range(steps):
        zeros = [
            v
            for v in cur.vertices
            if cur.weight(v) == 0 and cur.degree(v) == 2
        ]
        if not zeros:
            break
        at = rng.choice(zeros)
        center = rng.choice(sorted(cur.neighbors(at)))
        cur = flow(cur, [FlowMove(at, center)]).forest
    return cur
