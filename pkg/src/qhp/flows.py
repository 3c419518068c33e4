"""Elementary transforms on 0-weight vertices and boundary normal forms.

Weights move along 0-vertices: an inner move at a 0-vertex z with neighbors
X and Y, centered at the intersection with Y, is a blow-up there followed by
contraction of z; it leaves z at weight 0, drops Y by one, and raises X by
one.  In entry notation (entry = -weight) that is the unit shift

    [..., x, 0, y, ...]  ->  [..., x-1, 0, y+1, ...]   (center on y's vertex).

An outer move at a 0-tip z with neighbor N either centers on the N-incidence
(N drops by one / entry +1) or on a generic point of z (N rises / entry -1).
Inner moves preserve the discriminant, the entry sum, and the shape; outer
moves preserve the discriminant only.

Normal forms, per linear segment (the pieces left after deleting every
branching vertex), written in entries:

* standard:  [0], [0,0,0], or [0]*2k + [a1..an] with k in {0,1} and ai >= 2
             (this includes [0,0] and zero-free admissible chains), or the
             whole component is the single vertex [1];
* balanced:  segment entries lie in {0, 2, 3, ...}, or the component is [1];
* strongly balanced: standard, and every [0] / [0,0,0] segment touches a
  vertex of weight 0 outside itself.

`to_standard_form` uses inner moves only and reports the move witness; a
chain and its reversal normalize to the lexicographically smaller entry
list of the two sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError, NormalizationError
from .graphs import (
    Chain,
    WeightedForest,
    branching_data,
    canonical_certificate,
    discriminant,
)


def entry(forest: WeightedForest, v: str) -> int:
    return -forest.weight(v)


# ---------------------------------------------------------------------------
# atomic moves


@dataclass(frozen=True)
class FlowMove:
    at: str
    center: str | None = None  # neighbor id; None = generic center (outer)


def elementary_transform(
    forest: WeightedForest, at: str, center: str | None = None
) -> WeightedForest:
    """One elementary transform at a non-branching 0-vertex."""
    if at not in forest:
        raise DomainError("no such vertex", vertex=at)
    if forest.weight(at) != 0:
        raise DomainError("moves happen at 0-vertices", vertex=at, weight=forest.weight(at))
    nbrs = sorted(forest.neighbors(at))
    if len(nbrs) > 2:
        raise DomainError("moves happen at non-branching vertices", vertex=at)
    if len(nbrs) == 2:
        if center not in nbrs:
            raise DomainError("an inner move needs a neighbor as center", vertex=at)
        far = nbrs[0] if center == nbrs[1] else nbrs[1]
        return forest.with_weight(center, forest.weight(center) - 1).with_weight(
            far, forest.weight(far) + 1
        )
    if len(nbrs) == 1:
        (n,) = nbrs
        if center is None:
            return forest.with_weight(n, forest.weight(n) + 1)
        if center != n:
            raise DomainError("outer center must be the unique neighbor", vertex=at)
        return forest.with_weight(n, forest.weight(n) - 1)
    raise DomainError("an isolated 0-vertex admits no effective move", vertex=at)


@dataclass(frozen=True)
class FlowResult:
    forest: WeightedForest
    support: frozenset[str]


def flow(forest: WeightedForest, moves: Iterable[FlowMove]) -> FlowResult:
    """Fold of elementary transforms, recording every touched vertex."""
    cur = forest
    support: set[str] = set()
    for m in moves:
        support.add(m.at)
        support.update(cur.neighbors(m.at))
        cur = elementary_transform(cur, m.at, m.center)
    return FlowResult(cur, frozenset(support))


# ---------------------------------------------------------------------------
# segment decomposition and the normal-form predicates


def _segments(forest: WeightedForest) -> list[tuple[tuple[str, ...], bool]]:
    """(vertices in path order, touches a forest tip) per linear segment."""
    bd = branching_data(forest)
    out = []
    for vs in bd.segment_vertices:
        touches_tip = any(forest.degree(v) <= 1 for v in vs)
        out.append((vs, touches_tip))
    return out


def _std_segment(entries: Sequence[int]) -> bool:
    """One orientation of the standard segment patterns."""
    k = 0
    while k < len(entries) and entries[k] == 0:
        k += 1
    if k == len(entries):
        return k in (1, 2, 3)
    if k in (0, 2):
        return all(e >= 2 for e in entries[k:])
    return False


def _component_is_one(forest: WeightedForest, comp: tuple[str, ...]) -> bool:
    return len(comp) == 1 and entry(forest, comp[0]) == 1


def is_balanced(forest: WeightedForest) -> bool:
    ones = {c[0] for c in forest.components() if _component_is_one(forest, c)}
    for vs, _ in _segments(forest):
        if set(vs) & ones:
            continue
        if any(0 != entry(forest, v) < 2 for v in vs):
            return False
    return True


def is_standard(forest: WeightedForest) -> bool:
    ones = {c[0] for c in forest.components() if _component_is_one(forest, c)}
    for vs, _ in _segments(forest):
        if set(vs) & ones:
            continue
        es = [entry(forest, v) for v in vs]
        if not (_std_segment(es) or _std_segment(es[::-1])):
            return False
    return True


def is_strongly_balanced(forest: WeightedForest) -> bool:
    """Standard, with every [0] / [0,0,0] segment pinned by an outside 0."""
    if not is_standard(forest):
        return False
    for vs, _ in _segments(forest):
        es = [entry(forest, v) for v in vs]
        if es != [0] and es != [0, 0, 0]:
            continue
        outside = {
            u
            for v in vs
            for u in forest.neighbors(v)
            if u not in vs
        }
        if not any(forest.weight(u) == 0 for u in outside):
            return False
    return True


# ---------------------------------------------------------------------------
# normalization (inner moves only)


def _sweep(entries: list[int], order: Sequence[str], stop: int) -> tuple[list[int], list[FlowMove]]:
    """Collect zeros into a prefix of `order` by inner moves.

    Work positions are zeros at index 1..stop-1 whose left entry is nonzero;
    each gets zeroed out by pumping the left entry into the right neighbor
    (positions up to len(order)-1 may absorb — for twigs the last slot is the
    branching vertex).  Zeros this sweep cannot reach (e.g. at the far tip)
    are left in place for the caller's final-shape validation to reject.
    """
    es = list(entries)
    moves: list[FlowMove] = []
    while True:
        p = next(
            (i for i in range(1, stop) if es[i] == 0 and es[i - 1] != 0),
            None,
        )
        if p is None:
            break
        u = es[p - 1]
        center = order[p + 1] if u > 0 else order[p - 1]
        moves.extend(FlowMove(order[p], center) for _ in range(abs(u)))
        es[p - 1] = 0
        es[p + 1] += u
    return es, moves


def _validate_chain(es: Sequence[int]) -> bool:
    k = 0
    while k < len(es) and es[k] == 0:
        k += 1
    if any(e == 0 for e in es[k:]):
        return False
    if k == len(es):
        return k <= 3
    if k == 0:
        return all(e >= 2 for e in es) or list(es) == [1]
    if k == 2:
        return all(e >= 2 for e in es[k:])
    return False


@dataclass(frozen=True)
class StandardForm:
    forest: WeightedForest
    moves: tuple[FlowMove, ...]
    chain: Chain | None
    reversed_chain: Chain | None


def _normalize_chain_component(
    forest: WeightedForest, comp: tuple[str, ...]
) -> tuple[list[FlowMove], list[str]]:
    """Best sweep of a path component; returns (moves, order used)."""
    order = forest.path_order(comp)
    best: tuple[tuple[int, ...], list[FlowMove], list[str]] | None = None
    for orient in (order, order[::-1]):
        es = [entry(forest, v) for v in orient]
        fes, fmoves = _sweep(es, orient, len(orient) - 1)
        if not _validate_chain(fes):
            continue
        key = tuple(fes)
        if best is None or key < best[0]:
            best = (key, fmoves, orient)
    if best is None:
        raise NormalizationError(
            "component admits no standard form under inner moves",
            component=list(comp),
        )
    return best[1], best[2]


def _normalize_tree_component(
    forest: WeightedForest, comp: tuple[str, ...]
) -> list[FlowMove]:
    """Sweep twig zeros tipward; interior segments must already be standard."""
    moves: list[FlowMove] = []
    cur = forest
    tree = forest.subgraph(comp)
    branch = {v for v in comp if tree.degree(v) >= 3}
    for vs, touches_tip in _segments(tree):
        if not touches_tip:
            es = [entry(cur, v) for v in vs]
            if not (_std_segment(es) or _std_segment(es[::-1])):
                raise NormalizationError(
                    "interior segment is not standard and cannot be swept to a tip",
                    segment=list(vs),
                )
            continue
        # orient tip-first; extend with the adjoining branching vertex so the
        # last twig position has an absorber
        order = list(vs)
        if tree.degree(order[-1]) <= 1 and tree.degree(order[0]) > 1:
            order.reverse()
        ext = list(order)
        tail_branch = [u for u in tree.neighbors(order[-1]) if u in branch]
        ext.extend(tail_branch)
        es = [entry(cur, v) for v in ext]
        fes, fmoves = _sweep(es, ext, len(order))
        if not _validate_chain(fes[: len(order)]):
            raise NormalizationError(
                "twig admits no standard form under inner moves", segment=list(vs)
            )
        moves.extend(fmoves)
        cur = flow(cur, fmoves).forest
    return moves


def to_standard_form(forest: WeightedForest) -> StandardForm:
    """Inner-move normalization with witness; canonical for chains.

    For a connected chain, the output entries are the lexicographically
    smaller of the two orientation sweeps, and `reversed_chain` carries the
    other standard representative of the same class.  Raises
    NormalizationError when no standard form is reachable by inner moves
    (stray single zeros, several zero pairs in one component, interior
    segments with scattered zeros).
    """
    all_moves: list[FlowMove] = []
    cur = forest
    chain: Chain | None = None
    rev: Chain | None = None
    comps = forest.components()
    for comp in comps:
        tree = forest.subgraph(comp)
        if _component_is_one(forest, comp):
            continue
        if tree.is_chain_shape():
            moves, order = _normalize_chain_component(forest, comp)
            all_moves.extend(moves)
            cur = flow(cur, moves).forest
            if len(comps) == 1:
                es = [entry(cur, v) for v in order]
                chain = Chain(es)
                k = sum(1 for e in es if e == 0)
                tail = [e for e in es if e != 0]
                rev = Chain([0] * k + tail[::-1])
        else:
            moves = _normalize_tree_component(cur, comp)
            all_moves.extend(moves)
            cur = flow(cur, moves).forest
    if not is_standard(cur):
        raise NormalizationError("normalization left a nonstandard segment")
    return StandardForm(cur, tuple(all_moves), chain, rev)


# ---------------------------------------------------------------------------
# reversion


@dataclass(frozen=True)
class Reversion:
    chain: Chain
    moves: tuple[FlowMove, ...]


def reversion(chain: Chain) -> Reversion:
    """Carry [0,0,a1..an] to [a1..an,0,0] by an explicit inner-move walk.

    The zero pair slides right past each nonzero entry; move ids refer to the
    vertices t0..t(n-1) of chain.to_forest().  Requires the [0,0]-prefix
    shape with a nonempty zero-free tail.
    """
    es = list(chain.entries)
    n = len(es)
    if n < 3 or es[0] != 0 or es[1] != 0 or any(e == 0 for e in es[2:]):
        raise DomainError(
            "reversion needs [0,0,a1..an] with nonzero tail", entries=es
        )
    order = [f"t{i}" for i in range(n)]
    moves: list[FlowMove] = []
    for i in range(n - 2):
        # pair occupies (i, i+1); pull entry at i+2 across it
        a = es[i + 2]
        center = order[i] if a > 0 else order[i + 2]
        moves.extend(FlowMove(order[i + 1], center) for _ in range(abs(a)))
        es[i], es[i + 1], es[i + 2] = a, 0, 0
    return Reversion(Chain(es), tuple(moves))


# ---------------------------------------------------------------------------
# flow equivalence


def _inner_moves_on_entries(state: tuple[int, ...]) -> list[tuple[int, ...]]:
    out = []
    for i in range(1, len(state) - 1):
        if state[i] != 0:
            continue
        le, ri = list(state), list(state)
        le[i - 1] += 1
        le[i + 1] -= 1
        ri[i - 1] -= 1
        ri[i + 1] += 1
        out.append(tuple(le))
        out.append(tuple(ri))
    return out


def _chain_canon(t: tuple[int, ...]) -> tuple[int, ...]:
    return min(t, t[::-1])


def _bfs_equivalent(
    a: tuple[int, ...], b: tuple[int, ...], clamp: int, cap: int
) -> bool:
    """Bounded search over inner moves, treating chains as unoriented."""
    target = _chain_canon(b)
    start = _chain_canon(a)
    if start == target:
        return True
    seen = {start}
    frontier = [start]
    while frontier and len(seen) < cap:
        nxt = []
        for s in frontier:
            for t in _inner_moves_on_entries(s):
                if any(abs(e) > clamp for e in t):
                    continue
                c = _chain_canon(t)
                if c == target:
                    return True
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return False


def flow_equivalent(a: WeightedForest, b: WeightedForest) -> bool:
    """Same inner-flow class: equal canonical standard forms when both
    normalize; otherwise graph isomorphism or, for single chains, a bounded
    exact search (conservative False if the search space is truncated)."""
    try:
        sa = to_standard_form(a)
    except NormalizationError:
        sa = None
    try:
        sb = to_standard_form(b)
    except NormalizationError:
        sb = None
    if sa is not None and sb is not None:
        return canonical_certificate(sa.forest) == canonical_certificate(sb.forest)
    if canonical_certificate(a) == canonical_certificate(b):
        return True
    if (sa is None) != (sb is None):
        return False
    if (
        a.is_chain_shape()
        and b.is_chain_shape()
        and a.is_connected()
        and b.is_connected()
        and len(a) == len(b)
    ):
        ea = tuple(entry(a, v) for v in a.path_order())
        eb = tuple(entry(b, v) for v in b.path_order())
        if sum(ea) != sum(eb) or discriminant(a) != discriminant(b):
            return False
        clamp = max(14, *(abs(e) for e in ea + eb)) + 4
        return _bfs_equivalent(ea, eb, clamp, cap=500_000)
    return False
