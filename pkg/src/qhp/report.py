"""One-stop classification of a ruled completion model.

`classify` bundles the homology-plane criterion, |H1| data, the Kodaira
dimension pair, singularity types and — where the counting theorems apply —
the number of two-point-deleted rulings and of contractible curves.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .counting import (
    RulingCount,
    SingularityData,
    affine_ruling_unique,
    count_contractible,
    count_cstar_rulings,
    singularities,
    snc_minimalize,
)
from .graphs import WeightedForest
from .kodaira import KOD_NEG, k0_zero_cases, kodaira
from .models import (
    RULING_AFFINE,
    CriterionVerdict,
    RulingModel,
    SigmaSummary,
    assemble_boundary,
    h1,
    qhp_criterion,
    sigma_and_fujita,
)


@dataclass(frozen=True)
class ClassificationReport:
    ruling: str
    twisted: bool
    criterion: CriterionVerdict
    sigma: SigmaSummary
    d_boundary: int | None
    d_exceptional: int
    h1_order: int | None = None
    h1_decomposition: tuple[int, ...] | None = None
    lam: Fraction | None = None
    kappa: Fraction | None = None
    kappa0: Fraction | None = None
    kod_S0: float | int | None = None
    kod_S: float | int | None = None
    case_tag: str | None = None
    eta_nontrivial: bool | None = None
    k0_zero: str | None = None
    singularities: tuple[SingularityData, ...] = ()
    logarithmic: bool = True
    exceptional: bool = False
    affine_ruled: bool = False
    rulings: RulingCount | None = None
    contractible: int | None = None
    affine_unique: bool | None = None

    @property
    def passed(self) -> bool:
        return self.criterion.passed


def boundary_shape(m: RulingModel) -> WeightedForest:
    """The boundary with non-branching (-1)-vertices contracted away."""
    D, _, _ = assemble_boundary(m)
    return snc_minimalize(D)


def classify(m: RulingModel, *, exceptional: bool = False) -> ClassificationReport:
    crit = qhp_criterion(m)
    base = ClassificationReport(
        ruling=m.ruling,
        twisted=m.twisted,
        criterion=crit,
        sigma=sigma_and_fujita(m),
        d_boundary=crit.d_boundary,
        d_exceptional=crit.d_exceptional,
        exceptional=exceptional,
    )
    if not crit.passed:
        return base

    hom = h1(m, crit)
    sings = singularities(m)
    logarithmic = all(s.kind != "general" for s in sings)
    base = replace(
        base,
        h1_order=hom.order,
        h1_decomposition=hom.decomposition,
        singularities=sings,
        logarithmic=logarithmic,
    )

    if m.ruling == RULING_AFFINE:
        return replace(
            base,
            kod_S0=KOD_NEG,
            kod_S=KOD_NEG,
            affine_ruled=True,
            affine_unique=affine_ruling_unique(boundary_shape(m)),
        )

    kd = kodaira(m)
    base = replace(
        base,
        lam=kd.lam,
        kappa=kd.kappa,
        kappa0=kd.kappa0,
        kod_S0=kd.kod_smooth_locus,
        kod_S=kd.kod_surface,
        case_tag=kd.case.tag,
        eta_nontrivial=kd.case.eta_nontrivial,
        k0_zero=k0_zero_cases(m, case=kd.case),
    )
    # a negative smooth locus with cyclic singularities only means the surface
    # also carries an affine ruling; the counting theorems exclude that case
    if kd.kod_smooth_locus == KOD_NEG and all(s.kind == "cyclic" for s in sings):
        return replace(base, affine_ruled=True)

    flags = {
        "kod_S0": kd.kod_smooth_locus,
        "logarithmic": logarithmic,
        "exceptional": exceptional,
        "affine_ruled": False,
    }
    rc = count_cstar_rulings(base, boundary_shape(m), flags)
    out = replace(base, rulings=rc)
    return replace(out, contractible=count_contractible(out))
