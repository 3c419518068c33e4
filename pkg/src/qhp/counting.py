"""How many two-point-deleted rulings a surface carries, how many
contractible curves it contains, and what its singularities look like.

The ruling count keys on the Kodaira dimension of the smooth locus and, at
dimension zero, on the shape of the snc-minimal boundary; three exceptional
boundary graphs (two six-vertex double forks and one seven-vertex shape with
a middle 0-vertex) get counts 1, 2 and 3, everything else gets 2.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, InconsistencyError, StructureError
from .graphs import Chain, WeightedForest, discriminant
from .kodaira import TAG_A1, TAG_A4, kodaira
from .models import (
    RULING_AFFINE,
    RulingModel,
    assemble_boundary,
    qhp_criterion,
)


def snc_minimalize(forest: WeightedForest) -> WeightedForest:
    """Contract non-branching (-1)-vertices, bumping neighbors, to exhaustion."""
    cur = forest
    while len(cur) > 1:
        cands = sorted(
            v for v in cur.vertices if cur.weight(v) == -1 and cur.degree(v) <= 2
        )
        if not cands:
            break
        v = cands[0]
        nbrs = sorted(cur.neighbors(v))
        weights = cur.weights
        del weights[v]
        for u in nbrs:
            weights[u] += 1
        edges = {e for e in cur.edges if v not in e}
        if len(nbrs) == 2:
            edges.add(frozenset(nbrs))
        cur = WeightedForest(weights, edges)
    return cur


# ---------------------------------------------------------------------------
# boundary patterns at Kodaira dimension zero


def _double_fork(D: WeightedForest) -> tuple[str, str] | None:
    """Two adjacent degree-3 vertices, each with two (-2)-tips; 6 vertices."""
    if len(D) != 6:
        return None
    centers = sorted(v for v in D.vertices if D.degree(v) == 3)
    if len(centers) != 2:
        return None
    b, c = centers
    if c not in D.neighbors(b):
        return None
    for x, other in ((b, c), (c, b)):
        tips = [u for u in D.neighbors(x) if u != other]
        if len(tips) != 2:
            return None
        if any(D.degree(u) != 1 or D.weight(u) != -2 for u in tips):
            return None
    return b, c


def _spaced_double_fork(D: WeightedForest) -> tuple[str, str, str] | None:
    """Degree-3 pair joined through a single 0-vertex, four (-2)-tips; 7 vertices."""
    if len(D) != 7:
        return None
    centers = sorted(v for v in D.vertices if D.degree(v) == 3)
    if len(centers) != 2:
        return None
    b, d = centers
    if d in D.neighbors(b):
        return None
    mids = set(D.neighbors(b)) & set(D.neighbors(d))
    if len(mids) != 1:
        return None
    mid = next(iter(mids))
    if D.weight(mid) != 0 or D.degree(mid) != 2:
        return None
    for x in (b, d):
        tips = [u for u in D.neighbors(x) if u != mid]
        if len(tips) != 2:
            return None
        if any(D.degree(u) != 1 or D.weight(u) != -2 for u in tips):
            return None
    return b, mid, d


def match_boundary_pattern(D: WeightedForest) -> tuple[str, tuple[int, ...]] | None:
    """Pattern tag and the free center weights, or None."""
    df = _double_fork(D)
    if df is not None:
        lo, hi = sorted(D.weight(x) for x in df)
        if lo == hi == -1:
            return "(ii)", ()
        if hi == -1 and lo <= -2:
            return "(i)", (lo,)
        return None
    sdf = _spaced_double_fork(D)
    if sdf is not None:
        b, _, d = sdf
        return "(iii)", tuple(sorted((D.weight(b), D.weight(d))))
    return None


# ---------------------------------------------------------------------------
# ruling counts


@dataclass(frozen=True)
class RulingCount:
    count: int
    rulings: tuple[str, ...]
    pattern: str | None = None
    pattern_weights: tuple[int, ...] = ()
    fork_k: int | None = None


def count_cstar_rulings(report, d_standard: WeightedForest, flags: dict) -> RulingCount:
    """Number of two-point-deleted rulings of the smooth locus.

    `flags` must carry kod_S0 and the logarithmic / exceptional /
    affine_ruled booleans; they are cross-checked against the report.
    """
    if "kod_S0" not in flags:
        raise DomainError("flags must carry kod_S0")
    kod = flags["kod_S0"]
    reported = getattr(report, "kod_S0", kod)
    if reported != kod:
        raise InconsistencyError(
            "flags disagree with the report on kod_S0", flag=kod, report=reported
        )
    if flags.get("affine_ruled"):
        raise DomainError(
            "ruling counts assume the surface is not affine-ruled"
        )
    if flags.get("exceptional"):
        if kod != 0:
            raise InconsistencyError(
                "exceptional surfaces sit at dimension zero", kod_S0=kod
            )
        return RulingCount(0, ())
    if not flags.get("logarithmic", True):
        return RulingCount(1, ("unspecified",))
    if kod == 2:
        return RulingCount(0, ())
    if kod == 1:
        return RulingCount(1, ("unspecified",))
    if kod == float("-inf"):
        sings = tuple(getattr(report, "singularities", ()))
        forks = [s for s in sings if s.kind == "fork"]
        if len(forks) != 1 or len(sings) != 1:
            raise InconsistencyError(
                "a non-affine-ruled surface at negative dimension has a single"
                " fork singularity",
                found=[s.kind for s in sings],
            )
        t = forks[0].fork_type
        assert t is not None
        if t[0] == 2 and t[1] == 2:
            k = t[2]
            if k == 2:
                return RulingCount(
                    4, ("non-extendable", "twisted", "twisted", "twisted"), fork_k=2
                )
            return RulingCount(2, ("non-extendable", "twisted"), fork_k=k)
        return RulingCount(1, ("non-extendable",))
    # dimension zero, logarithmic, not exceptional
    matched = match_boundary_pattern(d_standard)
    if matched is None:
        return RulingCount(2, ("twisted", "untwisted"), "(iv)")
    name, weights = matched
    if name == "(i)":
        return RulingCount(1, ("twisted",), "(i)", weights)
    if name == "(ii)":
        return RulingCount(2, ("twisted", "twisted"), "(ii)")
    return RulingCount(3, ("twisted", "twisted", "untwisted-C1"), "(iii)", weights)


def count_contractible(report) -> int | None:
    """Contractible-curve count; None outside the certified dimension-zero
    and exceptional scopes."""
    if getattr(report, "exceptional", False):
        return 0
    rc = getattr(report, "rulings", None)
    if getattr(report, "kod_S0", None) == 0 and rc is not None and rc.pattern:
        return 1 if rc.pattern == "(i)" else 2
    return None


# ---------------------------------------------------------------------------
# singularity types


@dataclass(frozen=True)
class SingularityData:
    kind: str  # "cyclic" | "fork" | "general"
    vertices: tuple[str, ...]
    order: int
    chain: Chain | None = None
    fork_type: tuple[int, int, int] | None = None
    dynkin: int | None = None


def _component_singularity(E: WeightedForest, comp: tuple[str, ...]) -> SingularityData:
    sub = E.subgraph(comp)
    if sub.is_chain_shape():
        return SingularityData(
            "cyclic", comp, order=discriminant(sub), chain=sub.as_chain()
        )
    branch = [v for v in comp if sub.degree(v) >= 3]
    if len(branch) == 1 and sub.degree(branch[0]) == 3:
        twigs = sub.without(branch)
        twig_comps = twigs.components()
        if all(twigs.subgraph(tc).is_chain_shape() for tc in twig_comps):
            dets = tuple(sorted(discriminant(twigs.subgraph(tc)) for tc in twig_comps))
            dynkin = len(comp) if all(sub.weight(v) == -2 for v in comp) else None
            return SingularityData(
                "fork", comp, order=discriminant(sub), fork_type=dets, dynkin=dynkin
            )
    # anything beyond one degree-3 branch point is a non-quotient singularity
    return SingularityData("general", comp, order=discriminant(sub))


def singularities(m: RulingModel) -> tuple[SingularityData, ...]:
    """Per-singular-point resolution data, with the shape constraints that a
    passing model must obey (multiple points force a twisted A1-pair; a
    noncyclic point forces the tip-contact twisted shape) validated whenever
    the surface cannot be affine-ruled."""
    crit = qhp_criterion(m)
    if not crit.passed:
        raise DomainError("singularity report needs a model passing the criterion")
    _, E, _ = assemble_boundary(m)
    out = tuple(_component_singularity(E, comp) for comp in E.components())
    noncyclic = [s for s in out if s.kind != "cyclic"]
    if m.ruling == RULING_AFFINE:
        if noncyclic:
            raise StructureError(
                "affine-ruled surfaces have cyclic singularities only",
                vertices=noncyclic[0].vertices,
            )
        return out
    kd = kodaira(m)
    if kd.kappa0 < 0:
        # the surface may be affine-ruled (all-cyclic) or a noncyclic quotient
        if noncyclic and len(out) != 1:
            raise InconsistencyError(
                "a noncyclic singularity at negative dimension must be the only one",
                found=[s.kind for s in out],
            )
        return out
    if len(out) >= 2:
        pair_ok = (
            m.twisted
            and kd.case.tag == TAG_A1
            and len(out) == 2
            and all(
                s.kind == "cyclic" and s.order == 2 and len(s.vertices) == 1
                for s in out
            )
        )
        if not pair_ok:
            raise InconsistencyError(
                "multiple singular points must form a twisted A1-pair",
                found=[(s.kind, s.order) for s in out],
            )
    if noncyclic and not (m.twisted and kd.case.tag == TAG_A4):
        raise InconsistencyError(
            "a noncyclic singularity forces the tip-contact twisted shape",
            tag=kd.case.tag,
        )
    return out


def affine_ruling_unique(d_standard: WeightedForest) -> bool | None:
    """True iff the reduced boundary is not a chain; None for the plane-like
    single (-1)-vertex boundary."""
    if len(d_standard) == 1 and discriminant(d_standard) == 1:
        return None
    return not d_standard.is_chain_shape()
