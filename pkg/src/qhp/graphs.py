"""Weighted forests of rational curves and their exact discriminant calculus.

A configuration of rational curves with simple normal crossings is recorded by
its weighted dual graph: one vertex per curve, weighted by the
self-intersection number, one edge per intersection point.  Everything here is
exact integer / Fraction arithmetic; no floats anywhere.

Conventions
-----------
* Forests only: simple graphs with no cycles.  Components are trees.
* A *chain* is written by its entries a_i = -(weight of the i-th vertex); so
  the path of three (-2)-curves is the chain [2, 2, 2].  Chains are the only
  place where signs flip; forests always carry raw weights.
* The discriminant d(T) is det(-Q(T)) where Q is the intersection matrix.
  d(empty) = 1, and d is multiplicative over connected components.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DomainError


# ---------------------------------------------------------------------------
# chains


@dataclass(frozen=True)
class Chain:
    """A linear configuration, stored by entries a_i = -T_i^2."""

    entries: tuple[int, ...]

    def __init__(self, entries: Iterable[int]):
        object.__setattr__(self, "entries", tuple(int(a) for a in entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def reversed(self) -> "Chain":
        """The transposed chain T^t (read from the other tip)."""
        return Chain(self.entries[::-1])

    @property
    def is_admissible(self) -> bool:
        """All entries >= 2; the empty chain counts as admissible."""
        return all(a >= 2 for a in self.entries)

    def weights(self) -> tuple[int, ...]:
        return tuple(-a for a in self.entries)

    def to_forest(self, prefix: str = "t") -> "WeightedForest":
        ids = [f"{prefix}{i}" for i in range(len(self.entries))]
        return WeightedForest(
            {v: -a for v, a in zip(ids, self.entries)},
            [(ids[i], ids[i + 1]) for i in range(len(ids) - 1)],
        )


def chain_discriminant(chain: Chain | Sequence[int]) -> int:
    """d of a chain via the two-term recursion.

    d([a_1..a_n]) = a_1 * d([a_2..a_n]) - d([a_3..a_n]), d([]) = 1, and the
    empty tail of a one-entry chain contributes d = 1 as well.
    """
    entries = tuple(chain.entries if isinstance(chain, Chain) else chain)
    d_prev, d_cur = 0, 1  # d of the (k+2)-suffix, d of the (k+1)-suffix
    for a in reversed(entries):
        d_prev, d_cur = d_cur, a * d_cur - d_prev
    return d_cur


def inductance(chain: Chain | Sequence[int]) -> Fraction:
    """e(T) = d(T - T_1) / d(T) for a nonempty admissible chain.

    Always lies strictly between 0 and 1 for admissible chains.
    """
    c = chain if isinstance(chain, Chain) else Chain(chain)
    if len(c) == 0:
        raise DomainError("inductance of the empty chain is undefined")
    if not c.is_admissible:
        raise DomainError("inductance requires an admissible chain", entries=c.entries)
    return Fraction(chain_discriminant(c.entries[1:]), chain_discriminant(c))


def co_inductance(chain: Chain | Sequence[int]) -> Fraction:
    """e~(T) = e(T^t), the inductance read from the far tip."""
    c = chain if isinstance(chain, Chain) else Chain(chain)
    return inductance(c.reversed())


# ---------------------------------------------------------------------------
# forests


class WeightedForest:
    """An immutable simple acyclic graph with integer vertex weights.

    Vertex ids are opaque nonempty strings.  Equality and hashing ignore
    nothing: two forests are equal iff they have the same weighted vertices
    and the same edge set.
    """

    __slots__ = ("_weights", "_adj", "_edges", "_hash")

    def __init__(
        self,
        weights: Mapping[str, int],
        edges: Iterable[tuple[str, str] | frozenset] = (),
    ):
        w = {}
        for v, wt in weights.items():
            if not isinstance(v, str) or not v:
                raise DomainError("vertex ids must be nonempty strings", vertex=v)
            w[v] = int(wt)
        adj: dict[str, set[str]] = {v: set() for v in w}
        edge_set: set[frozenset] = set()
        for e in edges:
            u, v = tuple(e)
            if u not in w or v not in w:
                raise DomainError("edge endpoint is not a vertex", edge=(u, v))
            if u == v:
                raise DomainError("loops are not allowed", vertex=u)
            key = frozenset((u, v))
            if key in edge_set:
                raise DomainError("parallel edges are not allowed", edge=(u, v))
            edge_set.add(key)
            adj[u].add(v)
            adj[v].add(u)
        if len(edge_set) >= len(w) and w:
            raise DomainError("graph has a cycle")
        self._weights = w
        self._adj = {v: frozenset(n) for v, n in adj.items()}
        self._edges = frozenset(edge_set)
        self._hash = None
        # |E| < |V| rules out cycles only together with acyclicity per
        # component; verify by counting within each component.
        for comp in self.components():
            ne = sum(1 for e in edge_set if set(e) <= set(comp))
            if ne != len(comp) - 1:
                raise DomainError("graph has a cycle")

    # -- basic accessors ----------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(sorted(self._weights))

    def __len__(self) -> int:
        return len(self._weights)

    def __contains__(self, v: str) -> bool:
        return v in self._weights

    def weight(self, v: str) -> int:
        try:
            return self._weights[v]
        except KeyError:
            raise DomainError("no such vertex", vertex=v) from None

    @property
    def weights(self) -> dict[str, int]:
        return dict(self._weights)

    def neighbors(self, v: str) -> frozenset:
        try:
            return self._adj[v]
        except KeyError:
            raise DomainError("no such vertex", vertex=v) from None

    def degree(self, v: str) -> int:
        return len(self.neighbors(v))

    @property
    def edges(self) -> frozenset:
        return self._edges

    def edge_list(self) -> list[tuple[str, str]]:
        return sorted(tuple(sorted(e)) for e in self._edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedForest):
            return NotImplemented
        return self._weights == other._weights and self._edges == other._edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._weights.items()), self._edges))
        return self._hash

    def __repr__(self) -> str:
        ws = ", ".join(f"{v}:{w}" for v, w in sorted(self._weights.items()))
        return f"WeightedForest({{{ws}}}, {self.edge_list()})"

    # -- structure ----------------------------------------------------------

    def components(self) -> list[tuple[str, ...]]:
        """Connected components, each as a sorted vertex tuple."""
        seen: set[str] = set()
        out = []
        for start in sorted(self._weights):
            if start in seen:
                continue
            stack, comp = [start], []
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.append(v)
                for u in self._adj[v]:
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            out.append(tuple(sorted(comp)))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def is_tree(self) -> bool:
        return len(self) > 0 and self.is_connected()

    def subgraph(self, keep: Iterable[str]) -> "WeightedForest":
        keep = set(keep)
        missing = keep - set(self._weights)
        if missing:
            raise DomainError("unknown vertices", vertices=sorted(missing))
        return WeightedForest(
            {v: self._weights[v] for v in keep},
            [e for e in self._edges if set(e) <= keep],
        )

    def without(self, drop: Iterable[str]) -> "WeightedForest":
        drop = set(drop)
        return self.subgraph(set(self._weights) - drop)

    def with_weight(self, v: str, w: int) -> "WeightedForest":
        if v not in self._weights:
            raise DomainError("no such vertex", vertex=v)
        nw = dict(self._weights)
        nw[v] = int(w)
        return WeightedForest(nw, self._edges)

    def relabel(self, mapping: Mapping[str, str]) -> "WeightedForest":
        return WeightedForest(
            {mapping.get(v, v): w for v, w in self._weights.items()},
            [tuple(mapping.get(x, x) for x in e) for e in self._edges],
        )

    # -- chain interop ------------------------------------------------------

    def is_chain_shape(self) -> bool:
        """True iff every component is a path (no branching vertices)."""
        return all(self.degree(v) <= 2 for v in self._weights)

    def path_order(self, comp: Sequence[str] | None = None) -> list[str]:
        """Vertices of a path component in linear order, smaller tip first."""
        vs = list(comp) if comp is not None else list(self._weights)
        sub = self.subgraph(vs)
        if len(vs) == 1:
            return list(vs)
        tips = sorted(v for v in vs if sub.degree(v) <= 1)
        if len(tips) != 2 or any(sub.degree(v) > 2 for v in vs):
            raise DomainError("component is not a path", vertices=sorted(vs))
        order = [tips[0]]
        prev = None
        while len(order) < len(vs):
            nxt = [u for u in sub.neighbors(order[-1]) if u != prev]
            prev = order[-1]
            order.append(nxt[0])
        return order

    def as_chain(self, comp: Sequence[str] | None = None) -> Chain:
        order = self.path_order(comp)
        return Chain(-self._weights[v] for v in order)


# ---------------------------------------------------------------------------
# discriminants


def discriminant(forest: WeightedForest) -> int:
    """d(T) = det(-Q(T)), exactly, via tip elimination on each tree.

    For a tree with a tip t of weight w attached to u,
        d(T) = (-w) * d(T - t) - d(T - t - u),
    and d is multiplicative over components.  d(empty) = 1.
    """
    memo: dict[frozenset, int] = {}

    def d_of(vertices: frozenset) -> int:
        if not vertices:
            return 1
        key = vertices
        if key in memo:
            return memo[key]
        # split off one component
        start = next(iter(vertices))
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in forest.neighbors(v):
                if u in vertices and u not in comp:
                    comp.add(u)
                    stack.append(u)
        if len(comp) < len(vertices):
            rest = vertices - comp
            val = d_of(frozenset(comp)) * d_of(frozenset(rest))
        elif len(comp) == 1:
            val = -forest.weight(start)
        else:
            # choose a deterministic tip of the component
            tip = min(
                v
                for v in comp
                if sum(1 for u in forest.neighbors(v) if u in comp) <= 1
            )
            (u,) = [x for x in forest.neighbors(tip) if x in comp]
            rest = vertices - {tip}
            val = (-forest.weight(tip)) * d_of(frozenset(rest)) - d_of(
                frozenset(rest - {u})
            )
        memo[key] = val
        return val

    return d_of(frozenset(forest.vertices))


def edge_expansion(forest: WeightedForest, edge: tuple[str, str]) -> tuple[int, int]:
    """Both sides of d(T) = d(T_u) d(T_v) - d(T_u - u) d(T_v - v).

    T is the component containing the given edge; removing the edge leaves
    the halves T_u (containing u) and T_v.  Returns (lhs, rhs); they are
    always equal, and tests pin that.
    """
    u, v = edge
    if frozenset((u, v)) not in forest.edges:
        raise DomainError("no such edge", edge=(u, v))
    comp = next(c for c in forest.components() if u in c)
    tree = forest.subgraph(comp)
    # halves of the component after cutting the edge
    half_u = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        for y in tree.neighbors(x):
            if y not in half_u and frozenset((x, y)) != frozenset((u, v)):
                half_u.add(y)
                stack.append(y)
    half_v = set(comp) - half_u
    t_u, t_v = tree.subgraph(half_u), tree.subgraph(half_v)
    lhs = discriminant(tree)
    rhs = discriminant(t_u) * discriminant(t_v) - discriminant(
        t_u.without({u})
    ) * discriminant(t_v.without({v}))
    return lhs, rhs


def is_negative_definite(forest: WeightedForest) -> bool:
    """Exact Sylvester test: every prefix-induced subforest has d > 0.

    The leading principal submatrices of -Q in any fixed vertex order are the
    -Q of induced subforests, so positivity of their determinants is the
    positive-definiteness of -Q.  The empty forest passes vacuously.
    """
    order = forest.vertices
    for k in range(1, len(order) + 1):
        if discriminant(forest.subgraph(order[:k])) <= 0:
            return False
    return True


# ---------------------------------------------------------------------------
# branching data


@dataclass(frozen=True)
class BranchingData:
    """Per-vertex branching numbers plus derived decorations.

    * beta: degree of each vertex in the forest.
    * tips: vertices with beta <= 1.
    * maximal_twigs: for every component that has a branching vertex, the
      chains growing out of tips up to (not including) the nearest branching
      vertex, oriented tip first.
    * segments: connected components left after deleting every branching
      vertex, each as a Chain in path order (orientation: smaller tip id
      first; callers that care about direction should use segment_vertices).
    """

    beta: dict[str, int]
    tips: tuple[str, ...]
    maximal_twigs: tuple[Chain, ...]
    twig_vertices: tuple[tuple[str, ...], ...]
    segments: tuple[Chain, ...]
    segment_vertices: tuple[tuple[str, ...], ...]


def branching_data(forest: WeightedForest) -> BranchingData:
    beta = {v: forest.degree(v) for v in forest.vertices}
    tips = tuple(v for v in forest.vertices if beta[v] <= 1)
    branch = {v for v, b in beta.items() if b >= 3}

    twigs: list[Chain] = []
    twig_vs: list[tuple[str, ...]] = []
    for comp in forest.components():
        if not branch & set(comp):
            continue
        for t in comp:
            if beta[t] > 1 or t in branch:
                continue
            run = [t]
            prev = None
            cur = t
            while True:
                nxt = [u for u in forest.neighbors(cur) if u != prev]
                if not nxt or nxt[0] in branch:
                    break
                prev, cur = cur, nxt[0]
                run.append(cur)
            twigs.append(Chain(-forest.weight(v) for v in run))
            twig_vs.append(tuple(run))

    segs: list[Chain] = []
    seg_vs: list[tuple[str, ...]] = []
    residue = forest.without(branch)
    for comp in residue.components():
        order = residue.path_order(comp)
        segs.append(Chain(-forest.weight(v) for v in order))
        seg_vs.append(tuple(order))

    return BranchingData(
        beta=beta,
        tips=tips,
        maximal_twigs=tuple(twigs),
        twig_vertices=tuple(twig_vs),
        segments=tuple(segs),
        segment_vertices=tuple(seg_vs),
    )


def gcd_many(values: Iterable[int]) -> int:
    return reduce(gcd, values, 0)


def tip_coprimality(chain: Chain | Sequence[int]) -> int:
    """gcd(d(A), d(A - A_1)); equals 1 for admissible chains."""
    c = chain if isinstance(chain, Chain) else Chain(chain)
    return gcd(chain_discriminant(c), chain_discriminant(c.entries[1:]))


# ---------------------------------------------------------------------------
# canonical certificates (weighted AHU encoding)


def canonical_certificate(forest: WeightedForest, label=None) -> tuple:
    """Order-independent certificate of a weighted forest.

    Two forests get equal certificates iff they are isomorphic as weighted
    graphs.  `label(v)` may add extra per-vertex data (default: the weight).
    Rooted AHU encoding, minimized over the 1-2 centroids per component.
    """
    lab = label or (lambda v: forest.weight(v))

    def encode(root: str, parent: str | None) -> tuple:
        kids = sorted(
            encode(u, root) for u in forest.neighbors(root) if u != parent
        )
        return (lab(root), tuple(kids))

    def centroids(comp: tuple[str, ...]) -> list[str]:
        vs = set(comp)
        if len(vs) == 1:
            return list(vs)
        deg = {v: sum(1 for u in forest.neighbors(v) if u in vs) for v in vs}
        layer = [v for v in vs if deg[v] <= 1]
        remaining = len(vs)
        while remaining > 2:
            nxt = []
            for v in layer:
                vs.discard(v)
                remaining -= 1
                for u in forest.neighbors(v):
                    if u in vs:
                        deg[u] -= 1
                        if deg[u] == 1:
                            nxt.append(u)
            layer = nxt
        return sorted(vs)

    comps = []
    for comp in forest.components():
        comps.append(min(encode(c, None) for c in centroids(comp)))
    return tuple(sorted(comps))


def isomorphic(a: WeightedForest, b: WeightedForest) -> bool:
    return canonical_certificate(a) == canonical_certificate(b)
