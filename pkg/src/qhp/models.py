"""Completed ruling models: boundary assembly, acyclicity criterion, homology.

A model is the combinatorial shadow of a relatively minimal completion of a
ruled open surface: the horizontal sections with their self-intersections,
every degenerate fiber as a role-marked :class:`~qhp.fibers.FiberTree`, and
(for base ``C1``) the fiber contained in the boundary.  From this data we
assemble the boundary divisor ``D`` and the exceptional locus ``E``, evaluate
the four-clause acyclicity criterion, replay the structural determinant test,
and compute the first homology of the open part.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Iterable, Iterator

from .errors import DomainError, InconsistencyError, StructureError
from .fibers import ROLE_D, ROLE_E, ROLE_S0, FiberTree, columnar_split
from .graphs import WeightedForest, discriminant, is_negative_definite

RULING_CSTAR = "cstar"
RULING_AFFINE = "affine"
BASE_P1 = "P1"
BASE_C1 = "C1"


def vertex_tag(index: int | None, v: str) -> str:
    """Namespaced boundary id of fiber vertex `v` (index None = boundary fiber)."""
    return f"Finf:{v}" if index is None else f"F{index}:{v}"


def role_part(fiber: FiberTree, role: str) -> WeightedForest:
    return fiber.forest.subgraph(fiber.vertices_with_role(role))


def sigma_of_fiber(fiber: FiberTree) -> int:
    """Number of connected pieces of the fiber lying outside the boundary
    and off the contracted locus (the S0-marked part)."""
    return len(role_part(fiber, ROLE_S0).components())


# ---------------------------------------------------------------------------
# the model


@dataclass(frozen=True)
class RulingModel:
    """A ruled completion: sections, degenerate fibers, optional boundary fiber.

    `sections` maps section ids to self-intersections (ordered pairs); `f0`
    designates the distinguished non-columnar fiber; `f_inf` is the fiber
    contained in the boundary when the base curve is affine.  `blowup_count`,
    when given, is cross-checked against the per-fiber step totals.
    """

    ruling: str
    base: str
    twisted: bool
    sections: tuple[tuple[str, int], ...]
    fibers: tuple[FiberTree, ...]
    f0: int = 0
    f_inf: FiberTree | None = None
    blowup_count: int | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "sections", tuple((str(n), int(w)) for n, w in self.sections)
        )
        object.__setattr__(self, "fibers", tuple(self.fibers))
        self._validate()

    # -- derived quantities ---------------------------------------------------

    @property
    def h(self) -> int:
        return len(self.sections)

    @property
    def nu(self) -> int:
        return 0 if self.f_inf is None else 1

    @property
    def section_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.sections)

    def section_weight(self, name: str) -> int:
        for n, w in self.sections:
            if n == name:
                return w
        raise DomainError("unknown section", section=name)

    @property
    def F0(self) -> FiberTree:
        return self.fibers[self.f0]

    @property
    def columnar_fibers(self) -> tuple[FiberTree, ...]:
        if self.ruling != RULING_CSTAR:
            return ()
        return tuple(F for i, F in enumerate(self.fibers) if i != self.f0)

    @property
    def n(self) -> int:
        """Number of columnar fibers."""
        return len(self.columnar_fibers)

    @property
    def steps_total(self) -> int:
        total = sum(len(F.vertices) - 1 for F in self.fibers)
        if self.f_inf is not None:
            total += len(self.f_inf.vertices) - 1
        return total

    @property
    def b2_total(self) -> int:
        # Start surface (Hirzebruch / blown-up plane) contributes 2; each
        # blow-up adds one component.
        return 2 + self.steps_total

    def indexed_fibers(self) -> Iterator[tuple[int | None, FiberTree]]:
        """All fibers with their namespace index, boundary fiber last."""
        yield from enumerate(self.fibers)
        if self.f_inf is not None:
            yield None, self.f_inf

    # -- validation -------------------------------------------------------------

    def _validate(self) -> None:
        if self.ruling not in (RULING_CSTAR, RULING_AFFINE):
            raise StructureError("unknown ruling kind", ruling=self.ruling)
        if self.base not in (BASE_P1, BASE_C1):
            raise StructureError("unknown base curve", base=self.base)
        names = self.section_names
        if len(set(names)) != len(names) or not names:
            raise StructureError("section ids must be nonempty and distinct")
        for n in names:
            if not n or ":" in n:
                raise StructureError("section ids must not contain ':'", section=n)

        if self.ruling == RULING_AFFINE:
            if self.h != 1 or self.twisted:
                raise StructureError("an affine ruling has a single untwisted section")
            if self.base != BASE_C1 or self.f_inf is None:
                raise StructureError("an affine ruling has a boundary fiber over C1")
        else:
            if self.twisted != (self.h == 1):
                raise StructureError("a 2-section means twisted; two sections untwisted")
            if self.h not in (1, 2):
                raise StructureError("a ruling has one or two horizontal components")
            if self.twisted and self.base != BASE_C1:
                raise StructureError("a twisted ruling has base C1")
        if (self.base == BASE_C1) != (self.f_inf is not None):
            raise StructureError("base C1 requires exactly one fiber inside the boundary")

        if not self.fibers:
            raise StructureError("a model lists at least one degenerate fiber")
        if not 0 <= self.f0 < len(self.fibers):
            raise StructureError("f0 must index a listed fiber", f0=self.f0)

        for i, F in self.indexed_fibers():
            self._validate_fiber(i, F)

        if self.ruling == RULING_CSTAR:
            for i, F in enumerate(self.fibers):
                if i == self.f0:
                    continue
                try:
                    columnar_split(F)
                except DomainError as exc:
                    raise StructureError(
                        "every fiber besides the distinguished one must be columnar",
                        index=i,
                        reason=str(exc),
                    ) from exc
        else:
            for i, F in enumerate(self.fibers):
                minus = F.minus_one_vertices()
                s0 = F.vertices_with_role(ROLE_S0)
                if len(minus) != 1 or tuple(minus) != tuple(s0):
                    raise StructureError(
                        "affine fibers carry a unique (-1)-curve off the boundary",
                        index=i,
                    )

        if self.blowup_count is not None and self.blowup_count != self.steps_total:
            raise InconsistencyError(
                "declared blow-up count does not match the fiber data",
                declared=self.blowup_count,
                derived=self.steps_total,
            )

    def _validate_fiber(self, index: int | None, F: FiberTree) -> None:
        where = vertex_tag(index, "*")
        if index is not None and F.is_smooth():
            raise StructureError("degenerate fibers have at least two components")
        extra = set(F.attached_sections()) - set(self.section_names)
        if extra:
            raise StructureError(
                "fiber attaches to an undeclared section", at=where, sections=sorted(extra)
            )
        if len(set(F.attach)) != len(F.attach):
            raise StructureError(
                "a section crosses one fiber component at most once", at=where
            )
        expected = 2 if (self.ruling == RULING_CSTAR and self.twisted) else 1
        for s in self.section_names:
            total = sum(F.mult[v] for v, sec in F.attach if sec == s)
            if total != expected:
                raise StructureError(
                    "section-fiber intersection number is wrong",
                    at=where,
                    section=s,
                    total=total,
                    expected=expected,
                )
        for v in F.vertices:
            if F.weight(v) == -1 and F.forest.degree(v) > 2:
                raise StructureError(
                    "a (-1)-component of a fiber meets at most two others", at=where
                )
            if F.role[v] == ROLE_E and F.weight(v) > -2:
                raise StructureError(
                    "contracted components must have weight at most -2", at=where
                )
        e_part = role_part(F, ROLE_E)
        if len(e_part) and not is_negative_definite(e_part):
            raise StructureError(
                "the contracted part of a fiber must be negative definite", at=where
            )
        if index is None:
            self._validate_boundary_fiber(F)
        elif not F.vertices_with_role(ROLE_S0):
            raise StructureError("a degenerate fiber has a component off the boundary")

    def _validate_boundary_fiber(self, F: FiberTree) -> None:
        if any(F.role[v] != ROLE_D for v in F.vertices):
            raise StructureError("the boundary fiber lies entirely in the boundary")
        if self.ruling == RULING_CSTAR and self.twisted:
            if not F.forest.is_chain_shape() or [
                -F.weight(v) for v in F.forest.path_order()
            ] != [2, 1, 2]:
                raise StructureError("a twisted boundary fiber is the chain [2,1,2]")
            mid = F.forest.path_order()[1]
            if [v for v, _ in F.attach] != [mid]:
                raise StructureError(
                    "the 2-section meets the boundary fiber in its middle component"
                )
        else:
            if not F.is_smooth():
                raise StructureError("an untwisted boundary fiber is smooth")


# ---------------------------------------------------------------------------
# boundary assembly


@dataclass(frozen=True)
class _BoundaryParts:
    d_weights: dict[str, int]
    d_edges: tuple[tuple[str, str], ...]
    e_weights: dict[str, int]
    e_edges: tuple[tuple[str, str], ...]
    cross_edges: tuple[tuple[str, str], ...]


def _boundary_parts(m: RulingModel) -> _BoundaryParts:
    dw: dict[str, int] = {n: w for n, w in m.sections}
    ew: dict[str, int] = {}
    de: list[tuple[str, str]] = []
    ee: list[tuple[str, str]] = []
    cross: list[tuple[str, str]] = []
    for i, F in m.indexed_fibers():
        for v in F.vertices:
            tag = vertex_tag(i, v)
            if F.role[v] == ROLE_D:
                dw[tag] = F.weight(v)
            elif F.role[v] == ROLE_E:
                ew[tag] = F.weight(v)
        for u, v in F.forest.edge_list():
            ru, rv = F.role[u], F.role[v]
            tu, tv = vertex_tag(i, u), vertex_tag(i, v)
            if ru == ROLE_D and rv == ROLE_D:
                de.append((tu, tv))
            elif ru == ROLE_E and rv == ROLE_E:
                ee.append((tu, tv))
            elif {ru, rv} == {ROLE_D, ROLE_E}:
                cross.append((tu, tv))
        for v, s in F.attach:
            if F.role[v] == ROLE_D:
                de.append((vertex_tag(i, v), s))
    return _BoundaryParts(dw, tuple(de), ew, tuple(ee), tuple(cross))


def _graph_shape(vertices: Iterable[str], edges: Iterable[tuple[str, str]]):
    """(connected, acyclic) for a raw edge list, tolerating multi-edges."""
    parent = {v: v for v in vertices}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    acyclic = True
    seen: set[frozenset] = set()
    for u, v in edges:
        key = frozenset((u, v))
        if key in seen:
            acyclic = False
            continue
        seen.add(key)
        ru, rv = find(u), find(v)
        if ru == rv:
            acyclic = False
        else:
            parent[ru] = rv
    roots = {find(v) for v in parent}
    return len(roots) <= 1, acyclic


def _forest_of(weights: dict[str, int], edges: Iterable[tuple[str, str]]) -> WeightedForest:
    return WeightedForest(weights, {frozenset(e) for e in edges})


def assemble_boundary(m: RulingModel) -> tuple[WeightedForest, WeightedForest, int]:
    """Boundary divisor D, exceptional locus E, and total second Betti number."""
    parts = _boundary_parts(m)
    if parts.cross_edges:
        raise StructureError(
            "exceptional locus meets the boundary", edges=list(parts.cross_edges)
        )
    connected, acyclic = _graph_shape(parts.d_weights, parts.d_edges)
    if not acyclic:
        raise StructureError("boundary contains a cycle")
    if not connected:
        raise StructureError("boundary is disconnected")
    D = _forest_of(parts.d_weights, parts.d_edges)
    E = _forest_of(parts.e_weights, parts.e_edges)
    return D, E, m.b2_total


# ---------------------------------------------------------------------------
# fiber-component counting


@dataclass(frozen=True)
class SigmaSummary:
    sigma: int
    h: int
    nu: int
    b2_surface: int
    b2_boundary: int
    consistent: bool

    @property
    def expected(self) -> int:
        return self.h + self.nu - 2


def sigma_and_fujita(m: RulingModel) -> SigmaSummary:
    """Sum of (sigma - 1) over fibers off the boundary, with the Betti-number
    identity `sigma_total = h + nu + b2(surface) - b2(boundary) - 2` replayed
    as an independent consistency route."""
    sigma_total = sum(sigma_of_fiber(F) - 1 for F in m.fibers)
    b2_boundary = len(m.sections)
    for _, F in m.indexed_fibers():
        b2_boundary += sum(1 for v in F.vertices if F.role[v] != ROLE_S0)
    rhs = m.h + m.nu + m.b2_total - b2_boundary - 2
    return SigmaSummary(
        sigma=sigma_total,
        h=m.h,
        nu=m.nu,
        b2_surface=m.b2_total,
        b2_boundary=b2_boundary,
        consistent=sigma_total == rhs,
    )


# ---------------------------------------------------------------------------
# the acyclicity criterion


@dataclass(frozen=True)
class CriterionVerdict:
    boundary_connected: bool
    boundary_is_tree: bool
    sigma_matches: bool
    discriminant_nonzero: bool
    d_boundary: int | None
    d_exceptional: int
    sigma: int
    sigma_expected: int

    @property
    def passed(self) -> bool:
        return (
            self.boundary_connected
            and self.boundary_is_tree
            and self.sigma_matches
            and self.discriminant_nonzero
        )

    def clauses(self) -> tuple[tuple[str, bool], ...]:
        return (
            ("boundary-connected", self.boundary_connected),
            ("boundary-is-tree", self.boundary_is_tree),
            ("sigma-count", self.sigma_matches),
            ("boundary-determinant-nonzero", self.discriminant_nonzero),
        )


def qhp_criterion(m: RulingModel) -> CriterionVerdict:
    """Evaluate the four acceptance clauses; never raises on a failing model."""
    parts = _boundary_parts(m)
    connected, acyclic = _graph_shape(parts.d_weights, parts.d_edges)
    summary = sigma_and_fujita(m)
    d_boundary = None
    if acyclic:
        d_boundary = discriminant(_forest_of(parts.d_weights, parts.d_edges))
    d_exceptional = discriminant(_forest_of(parts.e_weights, parts.e_edges))
    return CriterionVerdict(
        boundary_connected=connected and not parts.cross_edges,
        boundary_is_tree=acyclic,
        sigma_matches=summary.sigma == summary.expected,
        discriminant_nonzero=d_boundary is not None and d_boundary != 0,
        d_boundary=d_boundary,
        d_exceptional=d_exceptional,
        sigma=summary.sigma,
        sigma_expected=summary.expected,
    )


# ---------------------------------------------------------------------------
# relative minimality


def p_minimality_violations(m: RulingModel) -> tuple[str, ...]:
    """Vertical boundary (-1)-components that fail to branch in the boundary."""
    bad = []
    for i, F in m.indexed_fibers():
        for v in F.vertices:
            if F.role[v] != ROLE_D or F.weight(v) != -1:
                continue
            beta = F.attach_count(v) + sum(
                1 for u in F.forest.neighbors(v) if F.role[u] == ROLE_D
            )
            if beta < 3:
                bad.append(vertex_tag(i, v))
    return tuple(bad)


# ---------------------------------------------------------------------------
# structural determinant test


@dataclass(frozen=True)
class StructuralVerdict:
    case: tuple[int, int]
    conditions: tuple[tuple[str, bool], ...]
    structural: bool
    direct: bool
    separator: str | None = None
    d_near: int | None = None
    d_far: int | None = None

    @property
    def agree(self) -> bool:
        return self.structural == self.direct


def _injective_assignment(options: list[list[int]]) -> bool:
    def rec(k: int, used: frozenset) -> bool:
        if k == len(options):
            return True
        return any(o not in used and rec(k + 1, used | {o}) for o in options[k])

    return rec(0, frozenset())


def _s0_components_meet_boundary(m: RulingModel) -> bool:
    F = m.F0
    comps = role_part(F, ROLE_S0).components()
    if len(comps) != 2:
        raise StructureError(
            "the distinguished fiber of an untwisted C1-base model has two open pieces",
            found=len(comps),
        )
    for comp in comps:
        meets = any(
            F.attach_count(v)
            or any(F.role[u] == ROLE_D for u in F.forest.neighbors(v))
            for v in comp
        )
        if not meets:
            return False
    return True


def _separator_test(m: RulingModel) -> tuple[str, int, int]:
    """Find the unique boundary component separating the two sections and the
    contracted locus inside (boundary + distinguished fiber); return it with
    the determinants of the section-side pieces of the severed boundary."""
    parts = _boundary_parts(m)
    weights = dict(parts.d_weights)
    adj: dict[str, set[str]] = {v: set() for v in weights}
    edges: set[frozenset] = {frozenset(e) for e in parts.d_edges}
    F = m.F0
    for v in F.vertices:
        tag = vertex_tag(m.f0, v)
        weights.setdefault(tag, F.weight(v))
        adj.setdefault(tag, set())
    for u, v in F.forest.edge_list():
        edges.add(frozenset((vertex_tag(m.f0, u), vertex_tag(m.f0, v))))
    for v, s in F.attach:
        edges.add(frozenset((vertex_tag(m.f0, v), s)))
    for e in edges:
        u, v = tuple(e)
        adj[u].add(v)
        adj[v].add(u)

    def comps_without(b: str) -> list[set[str]]:
        left = set(weights) - {b}
        out = []
        while left:
            seed = left.pop()
            comp = {seed}
            queue = [seed]
            while queue:
                x = queue.pop()
                for y in adj[x] - comp - {b}:
                    comp.add(y)
                    queue.append(y)
            left -= comp
            out.append(comp)
        return out

    s1, s2 = m.section_names
    targets = [{s1}, {s2}]
    e_tags = {vertex_tag(m.f0, v) for v in F.vertices_with_role(ROLE_E)}
    if e_tags:
        targets.append(e_tags)

    valid = []
    for b in sorted(parts.d_weights):
        comps = comps_without(b)
        options = [
            [j for j, comp in enumerate(comps) if t <= comp | {b}] for t in targets
        ]
        if all(options) and _injective_assignment(options):
            valid.append(b)
    if not valid:
        raise StructureError("no boundary component separates the sections and the "
                             "contracted locus")
    if len(valid) > 1:
        raise StructureError("separating boundary component is not unique",
                             candidates=valid)
    b = valid[0]

    D = _forest_of(parts.d_weights, parts.d_edges).without([b])
    near = far = None
    for comp in D.components():
        piece = discriminant(D.subgraph(comp))
        if s1 in comp:
            near = piece
        if s2 in comp:
            far = piece
    if near is None or far is None:
        raise StructureError("severed boundary must leave both sections", separator=b)
    return b, near, far


def dD_structural(m: RulingModel) -> StructuralVerdict:
    """The case-by-case replacement for `d(D) != 0`, evaluated alongside the
    direct determinant; the two routes must agree for any valid model."""
    crit = qhp_criterion(m)
    if not (crit.boundary_connected and crit.boundary_is_tree and crit.sigma_matches):
        raise DomainError("the structural test needs clauses (i)-(iii) to hold")
    bad = p_minimality_violations(m)
    if bad:
        raise StructureError("the boundary must be relatively minimal", vertices=bad)
    case = (m.h, m.nu)
    conditions: list[tuple[str, bool]] = [("base-rational-small", m.nu <= 1)]
    separator = d_near = d_far = None
    if case == (2, 1):
        conditions.append(
            ("open-fiber-pieces-meet-boundary", _s0_components_meet_boundary(m))
        )
    elif case == (2, 0):
        separator, d_near, d_far = _separator_test(m)
        conditions.append(("severed-near-branch-determinant-nonzero", d_near != 0))
        if (d_near != 0) != (d_far != 0):
            raise InconsistencyError(
                "section-side pieces of the severed boundary must degenerate together",
                d_near=d_near,
                d_far=d_far,
            )
    structural = all(ok for _, ok in conditions)
    direct = bool(crit.d_boundary)
    return StructuralVerdict(
        case=case,
        conditions=tuple(conditions),
        structural=structural,
        direct=direct,
        separator=separator,
        d_near=d_near,
        d_far=d_far,
    )


# ---------------------------------------------------------------------------
# first homology


@dataclass(frozen=True)
class HomologyData:
    order: int
    d_boundary: int
    d_exceptional: int
    decomposition: tuple[int, ...] | None = None


def h1(m: RulingModel, verdict: CriterionVerdict | None = None) -> HomologyData:
    """|H1| from the determinant ratio; exactness is mandatory.

    For affine models the cyclic decomposition over the fibers is computed as
    well and its order compared against the square-root route.
    """
    crit = verdict if verdict is not None else qhp_criterion(m)
    if not crit.passed:
        raise DomainError("homology order needs a model passing the criterion")
    assert crit.d_boundary is not None
    q, r = divmod(abs(crit.d_boundary), crit.d_exceptional)
    if r:
        raise InconsistencyError(
            "boundary determinant is not divisible by the exceptional determinant",
            d_boundary=crit.d_boundary,
            d_exceptional=crit.d_exceptional,
        )
    order = isqrt(q)
    if order * order != q:
        raise InconsistencyError("determinant ratio is not a perfect square", ratio=q)

    decomposition = None
    if m.ruling == RULING_AFFINE:
        factors = []
        for i, F in enumerate(m.fibers):
            (c,) = F.vertices_with_role(ROLE_S0)
            d_exc = discriminant(role_part(F, ROLE_E))
            q2, r2 = divmod(F.mult[c], d_exc)
            if r2:
                raise InconsistencyError(
                    "fiber multiplicity is not divisible by its exceptional part",
                    index=i,
                )
            factors.append(q2)
        total = 1
        for f in factors:
            total *= f
        if total != order:
            raise InconsistencyError(
                "cyclic decomposition does not match the determinant order",
                decomposition=factors,
                order=order,
            )
        decomposition = tuple(sorted(f for f in factors if f > 1))
    return HomologyData(order, crit.d_boundary, crit.d_exceptional, decomposition)
