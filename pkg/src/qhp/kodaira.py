"""Case analysis of the distinguished fiber and the Kodaira-dimension pair.

The distinguished fiber falls into one of nine shapes (tags ``A.i``..``A.v``,
``B.i``..``B.iii``, ``C``) keyed on the section count, the boundary fiber, and
whether flattening the fiber ever needs a sprouting contraction.  Each tag
pins an exact rational pair (kappa, kappa0) whose signs give the Kodaira
dimensions of the surface and of its smooth locus.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InconsistencyError, StructureError
from .fibers import ROLE_D, ROLE_E, ROLE_S0, FiberTree, columnar_split, contraction_trace
from .models import (
    RULING_CSTAR,
    RulingModel,
    p_minimality_violations,
    qhp_criterion,
    role_part,
)

TAG_A1, TAG_A2, TAG_A3, TAG_A4, TAG_A5 = "A.i", "A.ii", "A.iii", "A.iv", "A.v"
TAG_B1, TAG_B2, TAG_B3 = "B.i", "B.ii", "B.iii"
TAG_C = "C"

KOD_NEG = float("-inf")


def kod_of(x: Fraction) -> float | int:
    """Kodaira dimension from the sign of the fiber-degree coefficient."""
    if x < 0:
        return KOD_NEG
    return 0 if x == 0 else 1


@dataclass(frozen=True)
class F0Case:
    """Shape tag of the distinguished fiber plus the data the formulas use.

    `open_components` lists the S0-vertices (for tag B.iii the one avoiding
    the contracted locus comes first); `mu`/`mu_tilde` are their
    multiplicities in that order; `section_component` is the fiber component
    crossed by the 2-section (single-section models only).
    """

    tag: str
    eta_nontrivial: bool
    open_components: tuple[str, ...]
    mu: int
    mu_tilde: int | None = None
    section_component: str | None = None


def _open_singletons(F: FiberTree) -> tuple[str, ...]:
    comps = role_part(F, ROLE_S0).components()
    big = [c for c in comps if len(c) != 1]
    if big:
        raise StructureError(
            "each open piece of a fiber must be a single component", pieces=big
        )
    return tuple(c[0] for c in comps)


def _is_two_one_two(F: FiberTree) -> bool:
    if len(F.vertices) != 3 or not F.forest.is_chain_shape():
        return False
    return [F.weight(v) for v in F.forest.path_order()] == [-2, -1, -2]


def _classify_single_section(F: FiberTree, eta: bool, s0: tuple[str, ...]) -> F0Case:
    if len(s0) != 1:
        raise StructureError(
            "a 2-section model keeps one open piece in the distinguished fiber",
            found=len(s0),
        )
    (c,) = s0
    attach_vertices = sorted({v for v, _ in F.attach})
    if len(attach_vertices) != 1:
        raise StructureError(
            "the 2-section must cross a unique fiber component",
            found=attach_vertices,
        )
    b = attach_vertices[0]
    mu = F.mult[c]
    if F.weight(c) != -1:
        raise StructureError(
            "the open component of a 2-section fiber must be a (-1)-curve", vertex=c
        )
    common = dict(open_components=s0, mu=mu, section_component=b)
    if eta:
        return F0Case(TAG_A5, True, **common)
    if _is_two_one_two(F):
        return F0Case(TAG_A1, False, **common)
    if F.forest.degree(b) == 1:
        return F0Case(TAG_A4, False, **common)
    if b in F.forest.neighbors(c):
        return F0Case(TAG_A2, False, **common)
    if F.forest.is_chain_shape():
        return F0Case(TAG_A3, False, **common)
    raise StructureError(
        "distinguished fiber outside the classified 2-section shapes"
    )


def _classify_two_sections_c1(F: FiberTree, eta: bool, s0: tuple[str, ...]) -> F0Case:
    if len(s0) != 2:
        raise StructureError(
            "a two-section model over C1 splits the distinguished fiber in two",
            found=len(s0),
        )
    if eta:
        off = [
            c
            for c in s0
            if all(F.role[u] != ROLE_E for u in F.forest.neighbors(c))
        ]
        if len(off) != 1:
            raise InconsistencyError(
                "exactly one open component should avoid the contracted locus",
                found=off,
            )
        c = off[0]
        other = s0[0] if s0[1] == c else s0[1]
        return F0Case(TAG_B3, True, (c, other), F.mult[c], F.mult[other])
    c, ct = s0
    both_minus_one = F.weight(c) == -1 and F.weight(ct) == -1
    tag = TAG_B1 if both_minus_one else TAG_B2
    return F0Case(tag, False, s0, F.mult[c], F.mult[ct])


def _classify_two_sections_p1(F: FiberTree, eta: bool, s0: tuple[str, ...]) -> F0Case:
    if len(s0) != 1:
        raise StructureError(
            "a two-section model over P1 keeps one open piece", found=len(s0)
        )
    (c,) = s0
    if F.weight(c) != -1:
        raise StructureError(
            "the open component must be a (-1)-curve", vertex=c
        )
    comps = F.forest.without([c]).components()
    e_set = set(F.vertices_with_role(ROLE_E))
    d_set = set(F.vertices_with_role(ROLE_D))
    contracted = [cc for cc in comps if set(cc) <= e_set]
    bridge = [cc for cc in comps if set(cc) <= d_set]
    if len(comps) != 2 or len(contracted) != 1 or len(bridge) != 1:
        raise StructureError(
            "the fiber must split into a contracted branch and a boundary bridge",
            components=len(comps),
        )
    if {v for v, _ in F.attach} - set(bridge[0]):
        raise StructureError("both sections must meet the boundary bridge")
    if not eta:
        raise InconsistencyError(
            "a boundary bridge meeting both sections forces a sprouting contraction"
        )
    return F0Case(TAG_C, True, s0, F.mult[c])


def classify_F0(m: RulingModel) -> F0Case:
    """Tag the distinguished fiber; errors when it fits no classified shape."""
    if m.ruling != RULING_CSTAR:
        raise DomainError("fiber case analysis applies to two-point-deleted rulings")
    bad = p_minimality_violations(m)
    if bad:
        raise StructureError("the boundary must be relatively minimal", vertices=bad)
    F = m.F0
    eta = contraction_trace(F).eta_nontrivial
    s0 = _open_singletons(F)
    case = (m.h, m.nu)
    if case == (1, 1):
        return _classify_single_section(F, eta, s0)
    if case == (2, 1):
        return _classify_two_sections_c1(F, eta, s0)
    if case == (2, 0):
        return _classify_two_sections_p1(F, eta, s0)
    raise StructureError("unrecognized section/boundary-fiber signature", case=case)


# ---------------------------------------------------------------------------
# the (kappa, kappa0) table


@dataclass(frozen=True)
class KodairaData:
    lam: Fraction
    kappa: Fraction
    kappa0: Fraction
    kod_smooth_locus: float | int
    kod_surface: float | int
    case: F0Case


def column_multiplicities(m: RulingModel) -> tuple[int, ...]:
    return tuple(columnar_split(F).mu_c for F in m.columnar_fibers)


def kodaira(m: RulingModel, case: F0Case | None = None) -> KodairaData:
    crit = qhp_criterion(m)
    if not crit.passed:
        raise DomainError("Kodaira pair needs a model passing the criterion")
    if case is None:
        case = classify_F0(m)
    lam = Fraction(m.n + m.nu - 1)
    for mu_i in column_multiplicities(m):
        lam -= Fraction(1, mu_i)
    half = Fraction(1, 2)
    tag = case.tag
    if tag == TAG_A1:
        kappa = kappa0 = lam - half
    elif tag == TAG_A2:
        kappa, kappa0 = lam - half, lam - Fraction(1, 2 * case.mu)
    elif tag == TAG_A3:
        kappa, kappa0 = lam - half, lam
    elif tag == TAG_A4:
        kappa, kappa0 = lam - half, lam - Fraction(1, case.mu)
    elif tag == TAG_A5:
        kappa = kappa0 = lam
    elif tag == TAG_B1:
        assert case.mu_tilde is not None
        kappa, kappa0 = lam - 1, lam - Fraction(1, min(case.mu, case.mu_tilde))
    elif tag == TAG_B2:
        assert case.mu_tilde is not None
        kappa = kappa0 = lam - Fraction(1, min(case.mu, case.mu_tilde))
    elif tag == TAG_B3:
        kappa = kappa0 = lam - Fraction(1, case.mu)
    elif tag == TAG_C:
        kappa = kappa0 = lam
    else:  # pragma: no cover - tags are produced above only
        raise StructureError("unknown fiber tag", tag=tag)
    return KodairaData(lam, kappa, kappa0, kod_of(kappa0), kod_of(kappa), case)


# ---------------------------------------------------------------------------
# when the smooth locus sits at Kodaira dimension zero


def k0_zero_cases(m: RulingModel, case: F0Case | None = None) -> str | None:
    """Roman tag of the matched zero-dimension pattern, or None.

    Must agree with `kodaira(m).kappa0 == 0`; the agreement is a tested
    invariant, not assumed here.
    """
    if case is None:
        case = classify_F0(m)
    mus = column_multiplicities(m)
    F = m.F0
    n = m.n
    if n == 0 and case.tag in (TAG_A3, TAG_A5):
        return "(i)"
    if (
        n == 1
        and case.tag in (TAG_A1, TAG_A4)
        and case.mu == 2
        and mus == (2,)
        and not F.vertices_with_role(ROLE_D)
    ):
        return "(ii)"
    untwisted_c1 = m.h == 2 and m.nu == 1
    if untwisted_c1 and n == 1 and mus == (2,) and case.mu_tilde is not None:
        if min(case.mu, case.mu_tilde) == 2:
            d_part = role_part(F, ROLE_D)
            if any(
                len(comp) == 1 and d_part.weight(comp[0]) == -2
                for comp in d_part.components()
            ):
                return "(iii)"
    if untwisted_c1 and n == 2 and mus == (2, 2):
        if any(F.attach_count(c) for c in case.open_components):
            return "(iv)"
    if m.h == 2 and m.nu == 0 and n == 2 and mus == (2, 2):
        return "(v)"
    return None
