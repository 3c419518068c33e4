"""Degenerate fibers of P1-fibrations: multiplicities, blow-up programs.

A fiber is a tree of rational curves with positive integer multiplicities
satisfying the kernel law at every vertex v:

    weight(v) * mult(v) + sum(mult(u) for u adjacent to v) == 0,

equivalently Q . mult = 0, so d(red F) = 0 for every degenerate fiber.  The
smooth fiber is the single 0-vertex with multiplicity one, and every
degenerate fiber arises from it by a finite sequence of blow-ups:

* Sprout(v):        blow up a generic point of v.  v drops by 1; the new
                    (-1)-vertex has mult(v).
* Subdivide(u, v):  blow up the intersection point.  Both drop by 1; the new
                    (-1)-vertex sits between them with mult(u) + mult(v).
                    When the second target is an attached section id, the
                    center is the section-fiber intersection: the new vertex
                    inherits that attach record (and the ambient section
                    loses 1 off its self-intersection, tracked by replay()).

Each vertex carries a role: "D" (boundary), "E" (collapses to a singular
point), or "S0" (lives in the smooth open part).  `attach` records horizontal
section incidences as (vertex, section-id) pairs; a 2-section meeting a fiber
twice contributes two records.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable, Iterator, Mapping

from .errors import DomainError, StructureError
from .graphs import Chain, WeightedForest, canonical_certificate, gcd_many

ROLE_D = "D"
ROLE_E = "E"
ROLE_S0 = "S0"
_ROLES = (ROLE_D, ROLE_E, ROLE_S0)


# ---------------------------------------------------------------------------
# steps and programs


@dataclass(frozen=True)
class Sprout:
    target: str


@dataclass(frozen=True)
class Subdivide:
    a: str
    b: str


Step = Sprout | Subdivide


@dataclass(frozen=True)
class BlowupProgram:
    steps: tuple[Step, ...]

    def __init__(self, steps: Iterable[Step]):
        object.__setattr__(self, "steps", tuple(steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.steps)


# ---------------------------------------------------------------------------
# the fiber type


def _primitive_kernel(forest: WeightedForest) -> dict[str, int] | None:
    """The primitive positive integer kernel vector of Q, if 1-dimensional."""
    vs = list(forest.vertices)
    n = len(vs)
    idx = {v: i for i, v in enumerate(vs)}
    rows: list[list[Fraction]] = []
    for v in vs:
        row = [Fraction(0)] * n
        row[idx[v]] = Fraction(forest.weight(v))
        for u in forest.neighbors(v):
            row[idx[u]] += 1
        rows.append(row)
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        return None
    sol = [Fraction(0)] * n
    sol[free[0]] = Fraction(1)
    for i, c in enumerate(pivots):
        sol[c] = -rows[i][free[0]]
    scale = lcm(*(x.denominator for x in sol)) if n else 1
    ints = [int(x * scale) for x in sol]
    g = gcd_many(ints)
    if g:
        ints = [x // g for x in ints]
    if all(x < 0 for x in ints):
        ints = [-x for x in ints]
    if any(x <= 0 for x in ints):
        return None
    return {v: ints[idx[v]] for v in vs}


class FiberTree:
    """Immutable fiber: weighted tree + multiplicities + roles + attaches."""

    __slots__ = ("forest", "mult", "role", "attach")

    def __init__(
        self,
        forest: WeightedForest,
        mult: Mapping[str, int],
        role: Mapping[str, str] | None = None,
        attach: Iterable[tuple[str, str]] = (),
    ):
        if not forest.is_tree():
            raise StructureError("a fiber must be a nonempty tree")
        vs = set(forest.vertices)
        mu = {v: int(m) for v, m in mult.items()}
        if set(mu) != vs:
            raise StructureError("multiplicity keys must match the vertex set")
        if any(m <= 0 for m in mu.values()):
            raise StructureError("multiplicities must be positive")
        if gcd_many(mu.values()) != 1:
            raise StructureError("multiplicity vector must be primitive")
        for v in vs:
            s = forest.weight(v) * mu[v] + sum(mu[u] for u in forest.neighbors(v))
            if s != 0:
                raise StructureError("kernel law fails", vertex=v, residual=s)
        if len(vs) == 1:
            (v0,) = vs
            if forest.weight(v0) != 0:
                raise StructureError("a one-vertex fiber must be the 0-curve")
        elif any(forest.weight(v) >= 0 for v in vs):
            raise StructureError("a vertex of weight >= 0 must be the whole fiber")
        rl = {v: ROLE_S0 for v in vs} if role is None else {v: role[v] for v in vs}
        if set(rl) != vs or any(r not in _ROLES for r in rl.values()):
            raise StructureError("roles must map every vertex into {D, E, S0}")
        att = tuple(sorted((str(v), str(s)) for v, s in attach))
        for v, s in att:
            if v not in vs:
                raise DomainError("attach record on unknown vertex", vertex=v)
            if s in vs:
                raise DomainError("section id collides with a vertex id", section=s)
            if rl[v] == ROLE_E:
                raise StructureError("E-vertices cannot meet horizontal sections", vertex=v)
        self.forest = forest
        self.mult = mu
        self.role = rl
        self.attach = att

    # -- accessors -----------------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.forest.vertices

    def weight(self, v: str) -> int:
        return self.forest.weight(v)

    def vertices_with_role(self, r: str) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if self.role[v] == r)

    def attached_sections(self) -> tuple[str, ...]:
        return tuple(sorted({s for _, s in self.attach}))

    def attach_count(self, v: str) -> int:
        return sum(1 for x, _ in self.attach if x == v)

    def minus_one_vertices(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if self.weight(v) == -1)

    def is_smooth(self) -> bool:
        return len(self.forest) == 1

    def certificate(self) -> tuple:
        att = Counter(self.attach)

        def lab(v):
            secs = tuple(sorted(s for (x, s), k in att.items() if x == v for _ in range(k)))
            return (self.weight(v), self.mult[v], self.role[v], secs)

        return canonical_certificate(self.forest, label=lab)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiberTree):
            return NotImplemented
        return (
            self.forest == other.forest
            and self.mult == other.mult
            and self.role == other.role
            and self.attach == other.attach
        )

    def __hash__(self) -> int:
        return hash((self.forest, frozenset(self.mult.items()), self.attach))

    def __repr__(self) -> str:
        parts = ", ".join(
            f"{v}({self.weight(v)},mu{self.mult[v]},{self.role[v]})" for v in self.vertices
        )
        return f"FiberTree[{parts}; attach={list(self.attach)}]"

    def with_roles(self, role: Mapping[str, str]) -> "FiberTree":
        new = dict(self.role)
        new.update(role)
        return FiberTree(self.forest, self.mult, new, self.attach)


def new_fiber(attach: Iterable[str | tuple[str, str]] = (), vertex: str = "v0") -> FiberTree:
    """The smooth fiber [0]; `attach` lists section ids meeting it."""
    records = []
    for a in attach:
        records.append((vertex, a) if isinstance(a, str) else (vertex, a[1]))
    return FiberTree(WeightedForest({vertex: 0}), {vertex: 1}, None, records)


# ---------------------------------------------------------------------------
# blow-ups and blow-downs


def _fresh_id(fiber: FiberTree) -> str:
    taken = set(fiber.vertices) | {s for _, s in fiber.attach}
    k = len(fiber.vertices)
    while f"x{k}" in taken:
        k += 1
    return f"x{k}"


def _apply(fiber: FiberTree, step: Step) -> tuple[FiberTree, str, str | None]:
    """Returns (new fiber, created vertex id, touched section or None)."""
    new_id = _fresh_id(fiber)
    w = fiber.forest.weights
    mu = dict(fiber.mult)
    role = dict(fiber.role)
    attach = list(fiber.attach)
    edges = set(fiber.forest.edges)

    if isinstance(step, Sprout):
        v = step.target
        if v not in w:
            raise DomainError("sprout target is not a fiber vertex", vertex=v)
        w[v] -= 1
        w[new_id] = -1
        mu[new_id] = mu[v]
        role[new_id] = ROLE_S0
        edges.add(frozenset((v, new_id)))
        return (
            FiberTree(WeightedForest(w, edges), mu, role, attach),
            new_id,
            None,
        )

    a, b = step.a, step.b
    if frozenset((a, b)) in edges:
        w[a] -= 1
        w[b] -= 1
        w[new_id] = -1
        mu[new_id] = mu[a] + mu[b]
        role[new_id] = ROLE_S0
        edges.discard(frozenset((a, b)))
        edges.add(frozenset((a, new_id)))
        edges.add(frozenset((b, new_id)))
        return (
            FiberTree(WeightedForest(w, edges), mu, role, attach),
            new_id,
            None,
        )

    # attach subdivision: one of (a, b) is a fiber vertex, the other a section
    for v, s in ((a, b), (b, a)):
        if v in w and (v, s) in attach:
            attach.remove((v, s))
            attach.append((new_id, s))
            w[v] -= 1
            w[new_id] = -1
            mu[new_id] = mu[v]
            role[new_id] = ROLE_S0
            edges.add(frozenset((v, new_id)))
            return (
                FiberTree(WeightedForest(w, edges), mu, role, attach),
                new_id,
                s,
            )
    raise DomainError("subdivide target is neither an edge nor an attach record", target=(a, b))


def apply_step(fiber: FiberTree, step: Step) -> FiberTree:
    return _apply(fiber, step)[0]


@dataclass(frozen=True)
class ReplayResult:
    fiber: FiberTree
    created: tuple[str, ...]
    section_touches: dict[str, int] = field(default_factory=dict)

    def unique_new_minus_one(self) -> str | None:
        hits = [v for v in self.created if self.fiber.weight(v) == -1]
        return hits[0] if len(hits) == 1 else None


def replay(fiber: FiberTree, program: BlowupProgram) -> ReplayResult:
    """Run a program, tracking created vertices and section weight hits."""
    created: list[str] = []
    touches: Counter = Counter()
    cur = fiber
    for step in program:
        cur, new_id, sec = _apply(cur, step)
        created.append(new_id)
        if sec is not None:
            touches[sec] += 1
    return ReplayResult(cur, tuple(created), dict(touches))


def is_connected_program(fiber: FiberTree, program: BlowupProgram) -> bool:
    """Whether the program is a connected modification over one center.

    Every step after the first must target a vertex created earlier, and the
    created vertices must contain exactly one (-1)-vertex at the end (the
    unique (-1)-curve of the modification).
    """
    if not len(program):
        return True
    created: set[str] = set()
    cur = fiber
    for i, step in enumerate(program):
        targets = {step.target} if isinstance(step, Sprout) else {step.a, step.b}
        if i > 0 and not (targets & created):
            return False
        cur, new_id, _ = _apply(cur, step)
        created.add(new_id)
    return sum(1 for v in created if cur.weight(v) == -1) == 1


def blow_down(fiber: FiberTree, v: str) -> FiberTree:
    """Contract a (-1)-vertex meeting at most two other fiber components."""
    if v not in fiber.forest:
        raise DomainError("no such vertex", vertex=v)
    if fiber.weight(v) != -1:
        raise DomainError("only (-1)-vertices contract", vertex=v, weight=fiber.weight(v))
    nbrs = sorted(fiber.forest.neighbors(v))
    if len(nbrs) > 2:
        raise DomainError("contraction center meets three fiber components", vertex=v)
    if len(nbrs) == 0:
        raise DomainError("cannot contract the whole fiber", vertex=v)
    has_attach = fiber.attach_count(v) > 0
    if has_attach and len(nbrs) == 2:
        raise DomainError("contraction would drag a section onto a node", vertex=v)
    w = fiber.forest.weights
    del w[v]
    for u in nbrs:
        w[u] += 1
    edges = {e for e in fiber.forest.edges if v not in e}
    if len(nbrs) == 2:
        edges.add(frozenset(nbrs))
    mu = {x: m for x, m in fiber.mult.items() if x != v}
    role = {x: r for x, r in fiber.role.items() if x != v}
    attach = [(x, s) for x, s in fiber.attach if x != v]
    if has_attach:
        attach += [(nbrs[0], s) for x, s in fiber.attach if x == v]
    return FiberTree(WeightedForest(w, edges), mu, role, attach)


# ---------------------------------------------------------------------------
# validation (structure of degenerate fibers)


@dataclass(frozen=True)
class FiberReport:
    kernel_law: bool
    is_tree: bool
    minus_one: tuple[str, ...]
    unique_c: str | None
    clause_i: bool | None
    clause_ii: bool | None
    clause_iii: bool | None

    @property
    def ok(self) -> bool:
        clauses = (self.clause_i, self.clause_ii, self.clause_iii)
        return self.kernel_law and self.is_tree and all(c is not False for c in clauses)


def _is_minus_two_fork(forest: WeightedForest) -> bool:
    """A (-2)-fork of type (2,2,n): all weights -2, twig lengths {1,1,n-1}."""
    if not forest.is_tree() or any(forest.weight(v) != -2 for v in forest.vertices):
        return False
    centers = [v for v in forest.vertices if forest.degree(v) == 3]
    if len(centers) != 1 or any(forest.degree(v) > 3 for v in forest.vertices):
        return False
    rest = forest.without(centers)
    lengths = sorted(len(c) for c in rest.components())
    return len(lengths) == 3 and lengths[0] == 1 and lengths[1] == 1


def validate_fiber(fiber: FiberTree) -> FiberReport:
    """Check the kernel law and the degenerate-fiber shape clauses.

    Clauses (i)-(iii) apply when the fiber has a unique (-1)-vertex C:
    (i)   mult(C) > 1 and exactly two multiplicity-one vertices, both tips;
    (ii)  if mult(C) = 2: the fiber is [2,1,2], or C is a tip and the rest is
          the chain [2,2,2] or a (-2)-fork of type (2,2,n);
    (iii) if the fiber is not a chain, any component of (fiber - C) without
          multiplicity-one vertices is a chain.
    They are None (vacuous) for the smooth fiber or multiple (-1)-vertices.
    """
    forest = fiber.forest
    kernel = _primitive_kernel(forest) == fiber.mult
    tree = forest.is_tree()
    minus_one = fiber.minus_one_vertices()
    if fiber.is_smooth() or len(minus_one) != 1:
        return FiberReport(kernel, tree, minus_one, None, None, None, None)
    (c,) = minus_one
    ones = [v for v in fiber.vertices if fiber.mult[v] == 1]
    clause_i = (
        fiber.mult[c] > 1
        and len(ones) == 2
        and all(forest.degree(v) <= 1 for v in ones)
    )
    clause_ii: bool | None = None
    if fiber.mult[c] == 2:
        shape = [-forest.weight(v) for v in forest.path_order()] if forest.is_chain_shape() else None
        is_212 = shape in ([2, 1, 2],)
        rest = forest.without({c})
        c_tip = forest.degree(c) <= 1
        rest_222 = (
            rest.is_chain_shape()
            and rest.is_connected()
            and sorted(-rest.weight(v) for v in rest.vertices) == [2, 2, 2]
        )
        clause_ii = bool(is_212 or (c_tip and (rest_222 or _is_minus_two_fork(rest))))
    clause_iii: bool | None = None
    if not forest.is_chain_shape():
        rest = forest.without({c})
        clause_iii = True
        for comp in rest.components():
            if any(fiber.mult[v] == 1 for v in comp):
                continue
            if any(rest.degree(v) > 2 for v in comp):
                clause_iii = False
    return FiberReport(kernel, tree, minus_one, c, clause_i, clause_ii, clause_iii)


# ---------------------------------------------------------------------------
# columnar fibers


@dataclass(frozen=True)
class ColumnarSplit:
    """Adjoint chains of a columnar fiber, each ordered from C outward."""

    a: Chain
    b: Chain
    c: str
    a_vertices: tuple[str, ...]
    b_vertices: tuple[str, ...]
    a_section: str
    b_section: str
    mu_c: int


def columnar_split(fiber: FiberTree) -> ColumnarSplit:
    """Split a columnar fiber into its adjoint chains A and B.

    Requires: the fiber is a chain with a unique, unattached, interior
    (-1)-vertex C; every other vertex has role D; the sections attach exactly
    at the two end tips (one record each).  A is the side whose attachment
    sorts first by (section id, tip id).
    """
    forest = fiber.forest
    if not forest.is_chain_shape() or not forest.is_connected():
        raise DomainError("columnar fibers are chains")
    minus_one = fiber.minus_one_vertices()
    if len(minus_one) != 1:
        raise DomainError("columnar fibers have a unique (-1)-vertex", found=minus_one)
    (c,) = minus_one
    if fiber.attach_count(c):
        raise DomainError("the (-1)-vertex of a columnar fiber is unattached")
    if any(fiber.role[v] != ROLE_D for v in fiber.vertices if v != c):
        raise DomainError("all non-C vertices of a columnar fiber lie in the boundary")
    order = forest.path_order()
    if len(order) < 3 or c in (order[0], order[-1]):
        raise DomainError("the (-1)-vertex of a columnar fiber is interior")
    tips = (order[0], order[-1])
    if len(fiber.attach) != 2 or sorted(v for v, _ in fiber.attach) != sorted(tips):
        raise DomainError(
            "columnar fibers attach to sections exactly at their two tips",
            attach=list(fiber.attach),
        )
    sec = {v: s for v, s in fiber.attach}
    ci = order.index(c)
    left, right = order[:ci][::-1], order[ci + 1 :]  # both C-adjacent first
    sides = sorted(
        (left, right), key=lambda side: (sec[side[-1]], side[-1])
    )
    a_vs, b_vs = sides
    mk = lambda vs: Chain(-forest.weight(v) for v in vs)
    return ColumnarSplit(
        a=mk(a_vs),
        b=mk(b_vs),
        c=c,
        a_vertices=tuple(a_vs),
        b_vertices=tuple(b_vs),
        a_section=sec[a_vs[-1]],
        b_section=sec[b_vs[-1]],
        mu_c=fiber.mult[c],
    )


def mu_s(fiber: FiberTree) -> int:
    """gcd of multiplicities over the vertices outside the boundary.

    Counts both S0- and E-roles (the open part of the singular surface is the
    image of everything off the boundary); requires at least one S0-vertex.
    """
    if not fiber.vertices_with_role(ROLE_S0):
        raise DomainError("fiber has no S0-vertex")
    vals = [fiber.mult[v] for v in fiber.vertices if fiber.role[v] != ROLE_D]
    return gcd_many(vals)


# ---------------------------------------------------------------------------
# contraction traces


@dataclass(frozen=True)
class TraceStep:
    vertex: str
    kind: str  # "sprouting" | "subdivisional"


@dataclass(frozen=True)
class ContractionTrace:
    steps: tuple[TraceStep, ...]
    result: FiberTree

    @property
    def eta_nontrivial(self) -> bool:
        """Some contraction was sprouting for the marked image."""
        return any(s.kind == "sprouting" for s in self.steps)


def contraction_trace(
    fiber: FiberTree,
    marked: Iterable[str] | None = None,
    choose: Callable[[list[tuple[str, int]]], tuple[str, int]] | None = None,
) -> ContractionTrace:
    """Greedily contract marked (-1)-vertices while the marked image stays snc.

    The marked set defaults to the whole fiber (attach records always count:
    the horizontal boundary is part of the image divisor).  A contraction is
    *subdivisional* when its center lies on two components of the marked
    image (marked neighbors plus attached sections), *sprouting* when on at
    most one.  Subdivisional contractions are preferred; within the preferred
    class the lowest candidate vertex id goes first, and `choose` may override
    that pick for order-insensitivity tests.
    """
    img_marked = set(fiber.vertices) if marked is None else set(marked)
    # Roles play no part in the trace mechanics, and attach records migrating
    # onto contracted-locus vertices must not trip model-level constraints in
    # intermediate images; trace a role-free copy (`result` has no roles).
    work = fiber.with_roles({v: ROLE_S0 for v in fiber.vertices})
    steps: list[TraceStep] = []
    while True:
        cands: list[tuple[str, int]] = []
        for v in work.vertices:
            if v not in img_marked or work.weight(v) != -1:
                continue
            deg = work.forest.degree(v)
            att = work.attach_count(v)
            if deg > 2 or deg == 0 or (att and deg == 2):
                continue
            mdeg = sum(1 for u in work.forest.neighbors(v) if u in img_marked) + att
            if mdeg > 2:
                continue
            cands.append((v, mdeg))
        if not cands:
            return ContractionTrace(tuple(steps), work)
        # A sprouting step is taken only when no subdivisional contraction is
        # available: a label-swap of two tips must not flip the verdict, so the
        # preference class (not the raw candidate pool) is what `choose` and
        # the id tie-break order.
        pref = [vc for vc in cands if vc[1] == 2] or cands
        v, mdeg = choose(pref) if choose else min(pref)
        steps.append(TraceStep(v, "subdivisional" if mdeg == 2 else "sprouting"))
        work = blow_down(work, v)
        img_marked.discard(v)


# ---------------------------------------------------------------------------
# enumeration


def fiber_steps(fiber: FiberTree) -> list[Step]:
    """All one-blow-up extensions of a fiber, deterministically ordered."""
    out: list[Step] = [Sprout(v) for v in fiber.vertices]
    out += [Subdivide(*sorted(e)) for e in sorted(map(sorted, fiber.forest.edges))]
    out += [Subdivide(v, s) for v, s in sorted(set(fiber.attach))]
    return out


def enumerate_fibers(
    max_depth: int,
    template: FiberTree | None = None,
) -> Iterator[tuple[int, FiberTree]]:
    """All distinct fibers reachable from the template in <= max_depth steps.

    Deduplicates by certificate (weights, multiplicities, attach pattern up to
    isomorphism), breadth first, deterministic order.  Yields (depth, fiber);
    depth 0 is the template itself.
    """
    start = template if template is not None else new_fiber()
    seen = {start.certificate()}
    layer = [start]
    yield 0, start
    for depth in range(1, max_depth + 1):
        nxt: list[FiberTree] = []
        for f in layer:
            for step in fiber_steps(f):
                g = apply_step(f, step)
                cert = g.certificate()
                if cert in seen:
                    continue
                seen.add(cert)
                nxt.append(g)
                yield depth, g
        layer = nxt
