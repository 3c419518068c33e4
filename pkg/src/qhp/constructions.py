"""Builders assembling complete ruled-surface models from blow-up programs.

Four recipes, one per ruling kind:

* an affine-ruled surface — one section, a smooth fiber at infinity, and
  degenerate fibers each grown from a blow-up at a section point;
* a twisted two-to-one section — both boundary templates are [2,1,2] fibers
  tangent to the section, columns grow between them;
* an untwisted pair of sections over an affine base — the special fiber grows
  out of a column with the first center restricted to the kept part;
* an untwisted pair of sections over a projective base — the special fiber
  starts with a sprouting blow-up on the distinguished column curve.

Each builder checks the allowed centers, derives section weights from the
recorded touches, splits fibers into boundary / exceptional / open parts,
assembles a `RulingModel` and re-verifies the homology-plane criterion.
The `raw_*` variants skip the center rules (and the final verification) so
that the vanishing-determinant boundary cases can be studied directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import DomainError, InconsistencyError
from .fibers import (
    ROLE_D,
    ROLE_E,
    ROLE_S0,
    BlowupProgram,
    ColumnarSplit,
    FiberTree,
    Sprout,
    Step,
    Subdivide,
    columnar_split,
    is_connected_program,
    new_fiber,
    replay,
)
from .graphs import WeightedForest, discriminant
from .models import (
    BASE_C1,
    BASE_P1,
    RULING_AFFINE,
    RULING_CSTAR,
    RulingModel,
    p_minimality_violations,
    role_part,
)
from .report import ClassificationReport, classify

ProgramLike = BlowupProgram | Iterable[Step]


def _program(p: ProgramLike) -> BlowupProgram:
    return p if isinstance(p, BlowupProgram) else BlowupProgram(p)


@dataclass(frozen=True)
class Built:
    model: RulingModel
    report: ClassificationReport


# ---------------------------------------------------------------------------
# shared pieces


def _column(sections: tuple[str, str], program: BlowupProgram) -> tuple[FiberTree, ColumnarSplit]:
    """Grow a column fiber out of [0] crossed by the two section records.

    The program must be nonempty, purely subdivisional, and its first step
    must sit at the crossing with `sections[0]`; the second record may not be
    touched.  The result must split into adjoint chains around a unique
    interior (-1)-vertex, which is left as the only open component.
    """
    s1, s2 = sections
    if not len(program):
        raise DomainError("a column program is nonempty")
    if any(isinstance(st, Sprout) for st in program):
        raise DomainError("column programs are subdivisional")
    start = new_fiber([s1, s2])
    head = replay(start, BlowupProgram(program.steps[:1]))
    if head.section_touches != {s1: 1}:
        raise DomainError(
            "the first blow-up of a column sits at the first-section crossing",
            step=program.steps[0],
        )
    res = replay(start, program)
    total = sum(res.section_touches.values())
    extra = res.section_touches.get(s2, 0) if s2 != s1 else 0
    if extra or total != 1:
        raise DomainError(
            "a column touches the sections exactly once, at its first step",
            touches=res.section_touches,
        )
    minus = res.fiber.minus_one_vertices()
    if len(minus) != 1:
        raise DomainError("a column carries a unique (-1)-vertex", found=minus)
    c = minus[0]
    roles = {v: (ROLE_S0 if v == c else ROLE_D) for v in res.fiber.vertices}
    fiber = res.fiber.with_roles(roles)
    return fiber, columnar_split(fiber)


def _role_split(fiber: FiberTree, open_vertices: Iterable[str]) -> FiberTree:
    """Mark `open_vertices` as S0 and split the rest by section contact:
    components holding an attach record stay in the boundary, the others are
    contracted."""
    keep = set(open_vertices)
    rest = fiber.forest.without(keep)
    roles = {v: ROLE_S0 for v in keep}
    for comp in rest.components():
        has_attach = any(fiber.attach_count(v) for v in comp)
        r = ROLE_D if has_attach else ROLE_E
        roles.update({v: r for v in comp})
    return fiber.with_roles(roles)


def _has_exceptional(fibers: Iterable[FiberTree]) -> bool:
    return any(f.vertices_with_role(ROLE_E) for f in fibers)


def _verified(model: RulingModel) -> Built:
    bad = p_minimality_violations(model)
    if bad:
        raise DomainError(
            "the assembled boundary is not relatively minimal", vertices=bad
        )
    rep = classify(model)
    if not rep.passed:
        raise InconsistencyError(
            "the assembled model fails the homology-plane criterion",
            clauses=rep.criterion.clauses(),
        )
    return Built(model, rep)


def _boundary_template(section: str) -> FiberTree:
    """The [2,1,2] fiber tangent to a two-to-one section at its middle."""
    forest = WeightedForest(
        {"a": -2, "c": -1, "b": -2}, [("a", "c"), ("c", "b")]
    )
    return FiberTree(forest, {"a": 1, "c": 2, "b": 1}, None, [("c", section)])


# ---------------------------------------------------------------------------
# affine-ruled surfaces


def construct_affine(
    programs: Iterable[ProgramLike],
    *,
    section: str = "S",
    section_weight: int = -1,
) -> Built:
    """An affine-ruled surface with one degenerate fiber per program.

    Every program starts with a blow-up at the section crossing and must end
    with a unique (-1)-vertex.  The component of the rest meeting the section
    stays in the boundary; any other component is contracted and must be a
    chain.  `section_weight` is the weight before the fibers are grown.
    """
    progs = [_program(p) for p in programs]
    if not progs:
        raise DomainError(
            "a singular affine-ruled surface needs at least one degenerate fiber"
        )
    fibers: list[FiberTree] = []
    touches = 0
    d_product = 1
    for i, prog in enumerate(progs):
        if not len(prog):
            raise DomainError("fiber programs are nonempty", fiber=i)
        start = new_fiber([section])
        head = replay(start, BlowupProgram(prog.steps[:1]))
        if head.section_touches != {section: 1}:
            raise DomainError(
                "the first blow-up of a fiber sits at the section crossing",
                fiber=i,
                step=prog.steps[0],
            )
        res = replay(start, prog)
        minus = res.fiber.minus_one_vertices()
        if len(minus) != 1:
            raise DomainError(
                "each degenerate fiber carries a unique (-1)-vertex",
                fiber=i,
                found=minus,
            )
        c = minus[0]
        if res.fiber.attach_count(c):
            raise DomainError(
                "the section meets the fiber away from its (-1)-vertex", fiber=i
            )
        fib = _role_split(res.fiber, {c})
        exc = role_part(fib, ROLE_E)
        if any(not exc.subgraph(comp).is_chain_shape() for comp in exc.components()):
            raise DomainError(
                "contracted parts of affine fibers are chains", fiber=i
            )
        d_product *= discriminant(role_part(fib, ROLE_D))
        touches += sum(res.section_touches.values())
        fibers.append(fib)
    if not _has_exceptional(fibers):
        raise DomainError(
            "every contracted part is empty, so the surface is smooth"
        )
    f_inf = new_fiber([section]).with_roles({"v0": ROLE_D})
    model = RulingModel(
        RULING_AFFINE,
        BASE_C1,
        False,
        ((section, section_weight - touches),),
        tuple(fibers),
        f0=0,
        f_inf=f_inf,
    )
    built = _verified(model)
    if built.report.d_boundary != -d_product:
        raise InconsistencyError(
            "boundary determinant disagrees with the per-fiber product",
            determinant=built.report.d_boundary,
            product=-d_product,
        )
    return built


# ---------------------------------------------------------------------------
# twisted surfaces


def construct_twisted(
    columns: Iterable[ProgramLike] = (),
    special: ProgramLike = (),
    *,
    section: str = "H",
) -> Built:
    """A surface ruled with a two-to-one section of starting weight 4.

    Both boundary fibers are [2,1,2] templates tangent to the section (each
    costs the section two touches).  Columns grow from a doubly-crossed [0].
    The special fiber grows out of its template by a connected program; an
    empty program leaves the template itself.
    """
    cols = [_program(c) for c in columns]
    spec = _program(special)
    template = _boundary_template(section)
    touches = 4
    if not len(spec):
        f0 = _role_split(template, {"c"})
    else:
        if not is_connected_program(template, spec):
            raise DomainError(
                "the special-fiber program must be a connected modification"
            )
        res = replay(template, spec)
        c = res.unique_new_minus_one()
        assert c is not None
        f0 = _role_split(res.fiber, {c})
        touches += sum(res.section_touches.values())
    col_fibers = [_column((section, section), cp)[0] for cp in cols]
    touches += len(cols)
    if not _has_exceptional([f0, *col_fibers]):
        raise DomainError(
            "every contracted part is empty, so the surface is smooth"
        )
    f_inf = _boundary_template(section).with_roles(
        {v: ROLE_D for v in ("a", "b", "c")}
    )
    model = RulingModel(
        RULING_CSTAR,
        BASE_C1,
        True,
        ((section, 4 - touches),),
        (f0, *col_fibers),
        f0=0,
        f_inf=f_inf,
    )
    return _verified(model)


# ---------------------------------------------------------------------------
# untwisted surfaces, affine base


def _c1_template(
    sections: tuple[str, str], first: BlowupProgram
) -> tuple[FiberTree, str, int]:
    """Template fiber for the special column and its distinguished vertex."""
    if not len(first):
        return new_fiber(list(sections)), "v0", 0
    fiber, split = _column(sections, first)
    return fiber, split.c, 1


def _check_c1_center(template: FiberTree, c_tilde: str, spec: BlowupProgram, s2: str) -> None:
    """The first center must avoid the open column curve except through the
    first section or a neighbor; otherwise some open component of the special
    fiber loses boundary contact."""
    first = spec.steps[0]
    bad = False
    if isinstance(first, Sprout):
        bad = first.target == c_tilde
    else:
        pair = {first.a, first.b}
        bad = pair == {c_tilde, s2} and (c_tilde, s2) in template.attach
    if bad:
        raise DomainError(
            "first center sits on the open column curve off the kept locus,"
            " so an open component of the special fiber would lose boundary"
            " contact",
            step=first,
        )


def raw_untwisted_c1(
    columns: Iterable[ProgramLike],
    special: ProgramLike,
    *,
    sections: tuple[str, str] = ("D1", "D2"),
    check_center: bool = True,
) -> RulingModel:
    """Assemble the untwisted affine-base model without the final criterion
    verification; `check_center=False` also drops the first-center rule, which
    is how the vanishing-determinant boundaries arise."""
    cols = [_program(c) for c in columns]
    if not cols:
        raise DomainError(
            "the special column is required; use an empty first program for a"
            " plain fiber"
        )
    spec = _program(special)
    if not len(spec):
        raise DomainError("the special-fiber program is nonempty")
    s1, s2 = sections
    template, c_tilde, t1 = _c1_template(sections, cols[0])
    if check_center:
        _check_c1_center(template, c_tilde, spec, s2)
    if not is_connected_program(template, spec):
        raise DomainError(
            "the special-fiber program must be a connected modification"
        )
    res = replay(template, spec)
    c = res.unique_new_minus_one()
    assert c is not None
    if c_tilde in res.fiber.forest.neighbors(c):
        raise DomainError(
            "the two open curves of the special fiber must stay disjoint",
            pair=(c, c_tilde),
        )
    f0 = _role_split(res.fiber, {c, c_tilde})
    t1 += res.section_touches.get(s1, 0)
    t2 = res.section_touches.get(s2, 0)
    col_fibers = []
    for i, cp in enumerate(cols[1:], 1):
        if not len(cp):
            raise DomainError("column programs after the first are nonempty", fiber=i)
        col_fibers.append(_column(sections, cp)[0])
        t1 += 1
    if not _has_exceptional([f0, *col_fibers]):
        raise DomainError(
            "every contracted part is empty, so the surface is smooth"
        )
    f_inf = new_fiber(list(sections)).with_roles({"v0": ROLE_D})
    return RulingModel(
        RULING_CSTAR,
        BASE_C1,
        False,
        ((s1, 1 - t1), (s2, -1 - t2)),
        (f0, *col_fibers),
        f0=0,
        f_inf=f_inf,
    )


def construct_untwisted_c1(
    columns: Iterable[ProgramLike],
    special: ProgramLike,
    *,
    sections: tuple[str, str] = ("D1", "D2"),
) -> Built:
    """An untwisted surface over an affine base.

    Two sections of starting weights 1 and -1, a doubly-crossed [0] at
    infinity, columns over `columns[1:]`, and a special fiber grown out of the
    column over `columns[0]` (which may be empty).  The first center of
    `special` must respect the kept locus.
    """
    return _verified(raw_untwisted_c1(columns, special, sections=sections))


# ---------------------------------------------------------------------------
# untwisted surfaces, projective base


def _p1_precheck(
    degree: int,
    splits: list[ColumnarSplit | None],
    sections: tuple[str, str],
    touched: int,
) -> None:
    """At least one of the two section-sided halves of the kept divisor must
    have a nonzero determinant before the special fiber grows."""
    s1, s2 = sections
    sides = {s1: [], s2: []}
    for i, sp in enumerate(splits):
        if sp is None:
            continue
        for chain, vs, sec in (
            (sp.a, sp.a_vertices, sp.a_section),
            (sp.b, sp.b_vertices, sp.b_section),
        ):
            sides[sec].append([(f"{i}.{v}", w) for v, w in zip(vs, chain.weights())])
    ok = False
    for sec, base in ((s1, degree - touched), (s2, -degree)):
        weights = {sec: base}
        edges = []
        for arm in sides[sec]:
            # arms are ordered from the open curve outward; the section sits
            # at the outer tip
            names = [n for n, _ in arm]
            weights.update(dict(arm))
            edges.extend(zip(names, names[1:]))
            edges.append((names[-1], sec))
        if discriminant(WeightedForest(weights, edges)) != 0:
            ok = True
    if not ok:
        raise DomainError(
            "both halves of the kept divisor are degenerate, so no special"
            " fiber can repair the boundary determinant"
        )


def raw_untwisted_p1(
    degree: int,
    columns: Iterable[ProgramLike],
    special: ProgramLike,
    *,
    sections: tuple[str, str] = ("D1", "D2"),
    check_center: bool = True,
    precheck: bool = True,
) -> RulingModel:
    """Assemble the untwisted projective-base model without the final
    criterion verification."""
    if degree <= 0:
        raise DomainError("the section pair needs a positive degree", degree=degree)
    cols = [_program(c) for c in columns]
    if not cols:
        raise DomainError(
            "the special column is required; use an empty first program for a"
            " plain fiber"
        )
    spec = _program(special)
    if not len(spec):
        raise DomainError("the special-fiber program is nonempty")
    s1, s2 = sections
    splits: list[ColumnarSplit | None] = []
    col_fibers = []
    t1 = 0
    if len(cols[0]):
        template, sp0 = _column(sections, cols[0])
        b, t1 = sp0.c, 1
        splits.append(sp0)
    else:
        template, b = new_fiber(list(sections)), "v0"
        splits.append(None)
    for i, cp in enumerate(cols[1:], 1):
        if not len(cp):
            raise DomainError("column programs after the first are nonempty", fiber=i)
        fib, sp = _column(sections, cp)
        col_fibers.append(fib)
        splits.append(sp)
        t1 += 1
    if precheck:
        _p1_precheck(degree, splits, sections, t1)
    if check_center:
        first = spec.steps[0]
        sprouting = isinstance(first, Sprout) and first.target == b
        off_section = (
            isinstance(first, Subdivide)
            and {first.a, first.b} == {b, s2}
            and (b, s2) in template.attach
        )
        if not (sprouting or off_section):
            raise DomainError(
                "the special fiber starts with a sprouting blow-up centered on"
                " the distinguished column curve",
                step=first,
            )
    if not is_connected_program(template, spec):
        raise DomainError(
            "the special-fiber program must be a connected modification"
        )
    res = replay(template, spec)
    c = res.unique_new_minus_one()
    assert c is not None
    f0 = _role_split(res.fiber, {c})
    t1 += res.section_touches.get(s1, 0)
    t2 = res.section_touches.get(s2, 0)
    if not _has_exceptional([f0, *col_fibers]):
        raise DomainError(
            "every contracted part is empty, so the surface is smooth"
        )
    return RulingModel(
        RULING_CSTAR,
        BASE_P1,
        False,
        ((s1, degree - t1), (s2, -degree - t2)),
        (f0, *col_fibers),
        f0=0,
        f_inf=None,
    )


def construct_untwisted_p1(
    degree: int,
    columns: Iterable[ProgramLike],
    special: ProgramLike,
    *,
    sections: tuple[str, str] = ("D1", "D2"),
) -> Built:
    """An untwisted surface over a projective base: disjoint sections of
    weights `degree` and `-degree`, no fiber at infinity, and a special fiber
    started by a sprouting blow-up on the distinguished column curve."""
    return _verified(
        raw_untwisted_p1(degree, columns, special, sections=sections)
    )


def construct(kind: str, **params) -> Built:
    """Dispatch by ruling kind: affine, twisted, untwisted-c1, untwisted-p1."""
    builders = {
        "affine": construct_affine,
        "twisted": construct_twisted,
        "untwisted-c1": construct_untwisted_c1,
        "untwisted-p1": construct_untwisted_p1,
    }
    if kind not in builders:
        raise DomainError("unknown construction kind", kind=kind)
    return builders[kind](**params)


# ---------------------------------------------------------------------------
# fixtures


def minimal_twisted() -> Built:
    """No columns, untouched template: the smallest twisted surface (two
    order-two singular points, kappa pair (-1/2, -1/2))."""
    return construct_twisted()


def minimal_affine() -> Built:
    """One [2,1,2] fiber: a contractible surface with one A1 point."""
    return construct_affine([[Subdivide("v0", "S"), Subdivide("x1", "v0")]])


def moduli_family(size: int) -> Built:
    """The affine family with fixed boundary and homology Z2^size.

    Two fibers with contracted parts [2,2] and [2], then `size` fork fibers
    whose open curve has multiplicity two and whose boundary chain is
    [2,2,2]; the boundary determinant is -6*4^size.
    """
    if size < 0:
        raise DomainError("size must be nonnegative", size=size)
    two_one_two = [Subdivide("v0", "S"), Subdivide("x1", "v0")]
    deep = two_one_two + [Subdivide("x1", "x2")]
    fork = two_one_two + [Sprout("x2")]
    return construct_affine([deep, two_one_two] + [list(fork)] * size)


def vanishing_pair_model(degree: int = 1, depth: int = 2) -> RulingModel:
    """A section pair of weights (degree, -degree) joined by a [0] fiber, with
    one fiber grown over a point off the boundary: the boundary determinant
    vanishes no matter how the fiber grows."""
    if depth < 2:
        raise DomainError("need at least two blow-ups to leave a contracted part")
    steps: list[Step] = [Sprout("v0")]
    for k in range(1, depth):
        steps.append(Sprout(f"x{k}"))
    res = replay(new_fiber(["D1", "D2"]), BlowupProgram(steps))
    chain = ["v0", *res.created]
    roles = {v: ROLE_E for v in chain}
    roles[chain[0]] = ROLE_S0
    roles[chain[-1]] = ROLE_S0
    f0 = res.fiber.with_roles(roles)
    f_inf = new_fiber(["D1", "D2"]).with_roles({"v0": ROLE_D})
    return RulingModel(
        RULING_CSTAR,
        BASE_C1,
        False,
        (("D1", degree), ("D2", -degree)),
        (f0,),
        f0=0,
        f_inf=f_inf,
    )


def vanishing_column_model() -> RulingModel:
    """Two [2,1,2] columns over a weight-(-1) section pair, with the special
    fiber grown out of a column's open curve: both half-boundaries are
    degenerate and the boundary determinant vanishes."""
    col = [Subdivide("v0", "D1"), Subdivide("x1", "v0")]
    return raw_untwisted_c1(
        [col, col],
        [Sprout("x2"), Sprout("x3")],
        check_center=False,
    )


# ---------------------------------------------------------------------------
# randomized generators (seeded)


def random_column_program(
    rng: random.Random, sections: tuple[str, str], extra: int
) -> BlowupProgram:
    """A random column: the forced crossing blow-up, the forced first
    subdivision, then `extra` subdivisions next to the open curve."""
    steps: list[Step] = [Subdivide("v0", sections[0])]
    cur = replay(new_fiber(list(sections)), BlowupProgram(steps)).fiber
    c = "x1"
    for _ in range(extra + 1):
        nbrs = sorted(cur.forest.neighbors(c))
        u = rng.choice(nbrs)
        steps.append(Subdivide(c, u))
        cur, c, _ = _apply_step(cur, steps[-1])
    return BlowupProgram(steps)


def _apply_step(fiber: FiberTree, step: Step) -> tuple[FiberTree, str, str | None]:
    from .fibers import _apply

    return _apply(fiber, step)


def random_connected_program(
    rng: random.Random,
    template: FiberTree,
    depth: int,
    first_choices: list[Step],
    avoid: frozenset[str] = frozenset(),
) -> BlowupProgram:
    """A random connected modification: a first step from `first_choices`,
    then `depth - 1` blow-ups, each centered on the newest curve.  Vertices
    in `avoid` never gain new neighbors."""
    assert depth >= 1 and first_choices
    steps = [rng.choice(first_choices)]
    cur, last, _ = _apply_step(template, steps[0])
    for _ in range(depth - 1):
        options: list[Step] = [Sprout(last)]
        options.extend(
            Subdivide(last, u)
            for u in sorted(cur.forest.neighbors(last))
            if u not in avoid
        )
        options.extend(Subdivide(v, s) for v, s in cur.attach if v == last)
        step = rng.choice(options)
        steps.append(step)
        cur, last, _ = _apply_step(cur, step)
    return BlowupProgram(steps)


def _template_first_choices(template: FiberTree, *, forbid: set[str] = frozenset()) -> list[Step]:
    """Every legal first center on a template fiber, minus sprouts at and
    attach moves off the vertices in `forbid`."""
    out: list[Step] = []
    for v in template.vertices:
        if v not in forbid:
            out.append(Sprout(v))
    for e in sorted(tuple(sorted(e)) for e in template.forest.edges):
        out.append(Subdivide(*e))
    for v, s in template.attach:
        out.append(Subdivide(v, s))
    return out


def random_twisted(
    rng: random.Random, *, max_columns: int = 2, depth: int = 3, tries: int = 64
) -> Built:
    template = _boundary_template("H")
    for _ in range(tries):
        cols = [
            random_column_program(rng, ("H", "H"), rng.randrange(3))
            for _ in range(rng.randrange(max_columns + 1))
        ]
        if rng.random() < 0.25:
            spec: BlowupProgram | tuple = ()
        else:
            spec = random_connected_program(
                rng, template, rng.randrange(1, depth + 1),
                _template_first_choices(template),
            )
        try:
            return construct_twisted(cols, spec)
        except DomainError:
            continue
    raise DomainError("no twisted surface found", tries=tries)


def random_untwisted_c1(
    rng: random.Random, *, max_columns: int = 2, depth: int = 3, tries: int = 64
) -> Built:
    sections = ("D1", "D2")
    for _ in range(tries):
        first: BlowupProgram | tuple
        if rng.random() < 0.4:
            first = ()
            template, c_tilde = new_fiber(list(sections)), "v0"
        else:
            first = random_column_program(rng, sections, rng.randrange(3))
            template, split = _column(sections, first)
            c_tilde = split.c
        choices = [
            st
            for st in _template_first_choices(template, forbid={c_tilde})
            if not (
                isinstance(st, Subdivide)
                and {st.a, st.b} == {c_tilde, sections[1]}
            )
        ]
        spec = random_connected_program(
            rng, template, rng.randrange(1, depth + 1), choices,
            avoid=frozenset({c_tilde}),
        )
        cols = [
            random_column_program(rng, sections, rng.randrange(3))
            for _ in range(rng.randrange(max_columns + 1))
        ]
        try:
            return construct_untwisted_c1([first, *cols], spec)
        except DomainError:
            continue
    raise DomainError("no affine-base two-section surface found", tries=tries)


def random_untwisted_p1(
    rng: random.Random, *, max_columns: int = 2, depth: int = 3, tries: int = 64
) -> Built:
    sections = ("D1", "D2")
    for _ in range(tries):
        degree = rng.randrange(1, 4)
        first: BlowupProgram | tuple
        if rng.random() < 0.4:
            first = ()
            template, b = new_fiber(list(sections)), "v0"
        else:
            first = random_column_program(rng, sections, rng.randrange(3))
            template, split = _column(sections, first)
            b = split.c
        starts: list[Step] = [Sprout(b)]
        if (b, sections[1]) in template.attach:
            starts.append(Subdivide(b, sections[1]))
        spec = random_connected_program(
            rng, template, rng.randrange(1, depth + 1), starts
        )
        cols = [
            random_column_program(rng, sections, rng.randrange(3))
            for _ in range(rng.randrange(max_columns + 1))
        ]
        try:
            return construct_untwisted_p1(degree, [first, *cols], spec)
        except DomainError:
            continue
    raise DomainError("no nondegenerate projective-base surface found", tries=tries)


def random_affine(
    rng: random.Random, *, max_fibers: int = 3, depth: int = 4, tries: int = 64
) -> Built:
    for _ in range(tries):
        programs = []
        for _ in range(rng.randrange(1, max_fibers + 1)):
            steps: list[Step] = [Subdivide("v0", "S")]
            cur, last, _ = _apply_step(new_fiber(["S"]), steps[0])
            for _ in range(rng.randrange(1, depth)):
                options: list[Step] = [Sprout(last)]
                options.extend(
                    Subdivide(last, u) for u in sorted(cur.forest.neighbors(last))
                )
                step = rng.choice(options)
                steps.append(step)
                cur, last, _ = _apply_step(cur, step)
            programs.append(BlowupProgram(steps))
        try:
            return construct_affine(programs)
        except DomainError:
            continue
    raise DomainError("no singular affine-ruled surface found", tries=tries)


_RANDOM = {
    "affine": random_affine,
    "twisted": random_twisted,
    "untwisted-c1": random_untwisted_c1,
    "untwisted-p1": random_untwisted_p1,
}


def random_built(kind: str, rng: random.Random, **knobs) -> Built:
    if kind not in _RANDOM:
        raise DomainError("unknown construction kind", kind=kind)
    return _RANDOM[kind](rng, **knobs)


def enumerate_column_programs(
    sections: tuple[str, str], max_extra: int
) -> Iterator[BlowupProgram]:
    """All column programs with up to `max_extra` subdivisions beyond the
    forced two, depth-first in side order."""

    def walk(steps: list[Step], fiber: FiberTree, c: str, budget: int) -> Iterator[BlowupProgram]:
        yield BlowupProgram(steps)
        if budget == 0:
            return
        for u in sorted(fiber.forest.neighbors(c)):
            nxt = Subdivide(c, u)
            new_fib, new_c, _ = _apply_step(fiber, nxt)
            yield from walk(steps + [nxt], new_fib, new_c, budget - 1)

    base = [Subdivide("v0", sections[0])]
    fib = replay(new_fiber(list(sections)), BlowupProgram(base)).fiber
    first = Subdivide("x1", "v0")
    fib2, c2, _ = _apply_step(fib, first)
    yield from walk(base + [first], fib2, c2, max_extra)


def enumerate_connected_programs(
    template: FiberTree,
    max_steps: int,
    first_choices: Iterable[Step] | None = None,
) -> Iterator[BlowupProgram]:
    """All connected modification programs of 1..max_steps steps over the
    template, depth-first in sorted step order; only stages with a unique new
    (-1)-vertex are yielded (the stages a valid special fiber can stop at)."""
    firsts = (
        list(first_choices)
        if first_choices is not None
        else _template_first_choices(template)
    )

    def walk(
        cur: FiberTree, created: frozenset[str], steps: list[Step], budget: int
    ) -> Iterator[BlowupProgram]:
        if steps:
            minus = [v for v in created if cur.forest.weight(v) == -1]
            if len(minus) == 1:
                yield BlowupProgram(steps)
        if budget == 0:
            return
        options: list[Step]
        if not steps:
            options = list(firsts)
        else:
            options = [Sprout(v) for v in sorted(created)]
            for e in sorted(tuple(sorted(e)) for e in cur.forest.edge_list()):
                if e[0] in created or e[1] in created:
                    options.append(Subdivide(*e))
            options.extend(
                Subdivide(v, s) for v, s in cur.attach if v in created
            )
        for st in options:
            nf, new, _ = _apply_step(cur, st)
            yield from walk(nf, created | {new}, steps + [st], budget - 1)

    yield from walk(template, frozenset(), [], max_steps)


def _column_menu(
    sections: tuple[str, str], budget: int
) -> list[BlowupProgram | tuple]:
    """Empty program plus every column program of total length <= budget."""
    out: list[BlowupProgram | tuple] = [()]
    if budget >= 2:
        out.extend(enumerate_column_programs(sections, budget - 2))
    return out


def _program_combos(
    menu: list[BlowupProgram], budget: int, start: int = 0
) -> Iterator[tuple[BlowupProgram, ...]]:
    """Multisets (nondecreasing menu order) with total length <= budget."""
    yield ()
    for i in range(start, len(menu)):
        cost = len(menu[i])
        if cost > budget:
            continue
        for rest in _program_combos(menu, budget - cost, i):
            yield (menu[i], *rest)


def enumerate_models(kind: str, depth: int) -> Iterator[Built]:
    """Exhaustively build every valid surface of the kind whose programs use
    at most `depth` blow-ups in total; rejected programs are skipped.  For a
    projective base the section-pair degree additionally ranges over 1..3."""

    def emit(thunk) -> Iterator[Built]:
        try:
            yield thunk()
        except DomainError:
            return

    if kind == "affine":
        start = new_fiber(["S"])
        menu = list(
            enumerate_connected_programs(start, depth, [Subdivide("v0", "S")])
        )
        for progs in _program_combos(menu, depth):
            if progs:
                yield from emit(lambda ps=progs: construct_affine(ps))
        return

    if kind == "twisted":
        template = _boundary_template("H")
        col_menu = list(enumerate_column_programs(("H", "H"), depth - 2)) if depth >= 2 else []
        for cols in _program_combos(col_menu, depth):
            left = depth - sum(len(c) for c in cols)
            specs: list[BlowupProgram | tuple] = [()]
            if left >= 1:
                specs.extend(enumerate_connected_programs(template, left))
            for spec in specs:
                yield from emit(
                    lambda c=cols, s=spec: construct_twisted(list(c), s)
                )
        return

    if kind in ("untwisted-c1", "untwisted-p1"):
        sections = ("D1", "D2")
        degrees = (1, 2, 3) if kind == "untwisted-p1" else (None,)
        col_menu = list(enumerate_column_programs(sections, depth - 2)) if depth >= 2 else []
        for first in _column_menu(sections, depth - 1):
            template, c_tilde, _ = _c1_template(sections, _program(first))
            after_first = depth - len(first)
            if kind == "untwisted-c1":
                starts = [
                    st
                    for st in _template_first_choices(template, forbid={c_tilde})
                    if not (
                        isinstance(st, Subdivide)
                        and {st.a, st.b} == {c_tilde, sections[1]}
                    )
                ]
            else:
                starts = [Sprout(c_tilde)]
                if (c_tilde, sections[1]) in template.attach:
                    starts.append(Subdivide(c_tilde, sections[1]))
            for extras in _program_combos(col_menu, after_first - 1):
                left = after_first - sum(len(c) for c in extras)
                for spec in enumerate_connected_programs(template, left, starts):
                    for deg in degrees:
                        yield from emit(
                            lambda f=first, e=extras, s=spec, d=deg: (
                                construct_untwisted_c1([f, *e], s)
                                if d is None
                                else construct_untwisted_p1(d, [f, *e], s)
                            )
                        )
        return

    raise DomainError("unknown construction kind", kind=kind)
