"""Ruling models: validation, boundary assembly, criterion, homology."""

from __future__ import annotations

import pytest

from qhp import (
    BASE_C1,
    BASE_P1,
    DomainError,
    FiberTree,
    InconsistencyError,
    ROLE_D,
    ROLE_E,
    ROLE_S0,
    RULING_AFFINE,
    RULING_CSTAR,
    RulingModel,
    StructureError,
    WeightedForest,
    assemble_boundary,
    dD_structural,
    discriminant,
    h1,
    minimal_affine,
    minimal_twisted,
    moduli_family,
    p_minimality_violations,
    qhp_criterion,
    role_part,
    sigma_and_fujita,
    sigma_of_fiber,
    vertex_tag,
)
from qhp.models import CriterionVerdict


def chain_fiber(roles, attach) -> FiberTree:
    return FiberTree(
        WeightedForest({"a": -2, "c": -1, "b": -2}, [("a", "c"), ("c", "b")]),
        {"a": 1, "c": 2, "b": 1},
        roles,
        attach,
    )


def smooth_boundary_fiber(*sections: str) -> FiberTree:
    return FiberTree(
        WeightedForest({"w": 0}, []),
        {"w": 1},
        {"w": ROLE_D},
        [("w", s) for s in sections],
    )


def twisted_model() -> RulingModel:
    f0 = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    return RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, finf)


# ---------------------------------------------------------------------------
# basic accessors


def test_model_accessors():
    m = twisted_model()
    assert m.h == 1 and m.nu == 1 and m.n == 0
    assert m.section_names == ("H",)
    assert m.section_weight("H") == 0
    assert m.F0 is m.fibers[0]
    assert m.steps_total == 4  # two blow-ups per [2,1,2] fiber
    assert m.b2_total == 6
    with pytest.raises(DomainError):
        m.section_weight("nope")
    assert vertex_tag(0, "c") == "F0:c"
    assert vertex_tag(None, "c") == "Finf:c"


def test_sigma_of_fiber_counts_connected_open_pieces():
    one = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
    assert sigma_of_fiber(one) == 1
    two = chain_fiber({"a": ROLE_S0, "c": ROLE_D, "b": ROLE_S0}, [("a", "S")])
    assert sigma_of_fiber(two) == 2
    # adjacent S0 vertices glue into a single piece
    glued = chain_fiber({"a": ROLE_S0, "c": ROLE_S0, "b": ROLE_D}, [("a", "S")])
    assert sigma_of_fiber(glued) == 1
    assert len(role_part(glued, ROLE_D)) == 1


# ---------------------------------------------------------------------------
# validation rejections


def test_rejects_unknown_ruling_and_base():
    f = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
    with pytest.raises(StructureError):
        RulingModel("rational", BASE_C1, True, (("H", 0),), (f,))
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, "elliptic", True, (("H", 0),), (f,))


def test_rejects_bad_section_tables():
    f = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (), (f,))
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0), ("H", 1)), (f,))
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H:0", 0),), (f,))


def test_rejects_signature_mismatches():
    f0 = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    # twisted flag must match the section count
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, False, (("H", 0),), (f0,), 0, finf)
    # twisted ruling needs an affine base
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_P1, True, (("H", 0),), (f0,))
    # base C1 and boundary fiber come together
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, None)
    # affine rulings have one untwisted section over C1
    with pytest.raises(StructureError):
        RulingModel(RULING_AFFINE, BASE_C1, True, (("S", -1),), (f0,), 0, finf)
    with pytest.raises(StructureError):
        RulingModel(RULING_AFFINE, BASE_P1, False, (("S", -1),), (f0,))


def test_rejects_empty_or_misindexed_fibers():
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (), 0, finf)
    f0 = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 3, finf)


def test_rejects_fiber_level_inconsistencies():
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    # undeclared section
    bad = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "T")])
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (bad,), 0, finf)
    # wrong section-fiber intersection total (expected 2 for twisted)
    offmid = chain_fiber({"a": ROLE_S0, "c": ROLE_S0, "b": ROLE_E}, [("a", "H")])
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (offmid,), 0, finf)
    # smooth fiber listed as degenerate
    lone = FiberTree(
        WeightedForest({"v": 0}, []), {"v": 1}, {"v": ROLE_S0}, [("v", "H"), ("v", "H")]
    )
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (lone,), 0, finf)
    # no component off the boundary
    solid = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (solid,), 0, finf)


def test_rejects_duplicate_attach_records():
    dup = chain_fiber(
        {"a": ROLE_S0, "c": ROLE_S0, "b": ROLE_E}, [("a", "H"), ("a", "H")]
    )
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (dup,), 0, finf)


def test_rejects_shallow_contracted_component():
    f = FiberTree(
        WeightedForest({"v0": -1, "x1": -1}, [("v0", "x1")]),
        {"v0": 1, "x1": 1},
        {"v0": ROLE_E, "x1": ROLE_S0},
        [("x1", "S1"), ("x1", "S2")],
    )
    with pytest.raises(StructureError):
        RulingModel(
            RULING_CSTAR, BASE_P1, False, (("S1", -1), ("S2", -1)), (f,)
        )


def test_rejects_noncolumnar_side_fiber():
    f0 = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
    side = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0, side), 0, finf)


def test_rejects_affine_fiber_with_wrong_open_part():
    f = chain_fiber({"a": ROLE_S0, "c": ROLE_S0, "b": ROLE_E}, [("a", "S")])
    finf = smooth_boundary_fiber("S")
    with pytest.raises(StructureError):
        RulingModel(RULING_AFFINE, BASE_C1, False, (("S", -1),), (f,), 0, finf)


def test_rejects_bad_boundary_fiber():
    f0 = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
    # twisted boundary fiber must be [2,1,2] met in the middle
    tip = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("a", "H"), ("c", "H")])
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, tip)
    # boundary fiber entirely inside the boundary
    leaky = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_S0}, [("c", "H")])
    with pytest.raises(StructureError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, leaky)


def test_blowup_count_cross_check():
    f0 = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    ok = RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, finf, 4)
    assert ok.b2_total == 6
    with pytest.raises(InconsistencyError):
        RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, finf, 7)


# ---------------------------------------------------------------------------
# boundary assembly and the criterion


def test_assemble_boundary_minimal_twisted():
    D, E, b2 = assemble_boundary(twisted_model())
    assert b2 == 6
    assert set(D.weights) == {"H", "Finf:a", "Finf:c", "Finf:b"}
    assert ("Finf:c", "H") in [tuple(sorted(e)) for e in D.edge_list()]
    assert set(E.weights) == {"F0:a", "F0:b"}
    assert E.edge_list() == []
    assert discriminant(D) == -4 and discriminant(E) == 4


def test_criterion_passes_on_minimal_twisted():
    c = qhp_criterion(twisted_model())
    assert c.passed
    assert dict(c.clauses()) == {
        "boundary-connected": True,
        "boundary-is-tree": True,
        "sigma-count": True,
        "boundary-determinant-nonzero": True,
    }
    assert c.d_boundary == -4 and c.d_exceptional == 4
    assert c.sigma == c.sigma_expected == 0


def test_sigma_clause_rejects_extra_open_piece():
    # gluing the middle component into the boundary splits the open part of
    # the fiber into two pieces: sigma jumps and clause (iii) fails
    f0 = chain_fiber({"a": ROLE_S0, "c": ROLE_D, "b": ROLE_S0}, [("c", "H")])
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    m = RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, finf)
    c = qhp_criterion(m)
    assert not c.sigma_matches
    assert c.sigma == 1 and c.sigma_expected == 0
    assert not c.passed
    # the Betti-number bookkeeping still balances: the model is honest about
    # its component count, it just has one open piece too many
    s = sigma_and_fujita(m)
    assert s.consistent and s.sigma == 1


def test_fujita_identity_on_fixtures():
    for built in (minimal_twisted(), minimal_affine(), moduli_family(2)):
        s = sigma_and_fujita(built.model)
        assert s.consistent
        assert s.sigma == s.expected


def test_cycle_and_disconnection_are_detected():
    # one fiber routes both sections into the boundary twice: D has a cycle
    F0 = FiberTree(
        WeightedForest(
            {"x3": -1, "a": -3, "c": -1, "b": -2},
            [("x3", "a"), ("a", "c"), ("c", "b")],
        ),
        {"x3": 1, "a": 1, "c": 2, "b": 1},
        {"x3": ROLE_S0, "a": ROLE_D, "c": ROLE_D, "b": ROLE_D},
        [("x3", "S1"), ("b", "S2")],
    )
    loop = RulingModel(
        RULING_CSTAR,
        BASE_C1,
        False,
        (("S1", -1), ("S2", -1)),
        (FiberTree(
            F0.forest, F0.mult,
            {"x3": ROLE_S0, "a": ROLE_D, "c": ROLE_D, "b": ROLE_D},
            [("a", "S1"), ("b", "S2")],
        ),),
        0,
        smooth_boundary_fiber("S1", "S2"),
    )
    c = qhp_criterion(loop)
    assert not c.boundary_is_tree
    assert c.d_boundary is None
    assert not c.passed
    with pytest.raises(StructureError):
        assemble_boundary(loop)
    # dropping one attach from the chain instead leaves D disconnected
    split = RulingModel(
        RULING_CSTAR,
        BASE_P1,
        False,
        (("S1", -1), ("S2", -1)),
        (F0,),
    )
    c2 = qhp_criterion(split)
    assert not c2.boundary_connected
    with pytest.raises(StructureError):
        assemble_boundary(split)


# ---------------------------------------------------------------------------
# relative minimality


def test_p_minimality_flags_nonbranching_vertical_minus_one():
    assert p_minimality_violations(twisted_model()) == ()
    f0 = chain_fiber({"a": ROLE_S0, "c": ROLE_D, "b": ROLE_S0}, [("c", "H")])
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    m = RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, finf)
    # F0:c sits in D at weight -1 with a single boundary contact
    assert p_minimality_violations(m) == ("F0:c",)


# ---------------------------------------------------------------------------
# structural determinant test


def test_structural_route_agrees_on_passing_fixtures():
    for built in (minimal_twisted(), minimal_affine(), moduli_family(1)):
        v = dD_structural(built.model)
        assert v.agree
        assert v.structural and v.direct


def test_structural_route_on_degenerate_section_pair():
    # a Hirzebruch-style boundary with opposite section weights: d(D) = 0 and
    # the open fiber piece missing the boundary is the structural witness
    def pair_model(n: int) -> RulingModel:
        F0 = FiberTree(
            WeightedForest(
                {"C1": -1, "x1": -2, "x2": -1}, [("C1", "x1"), ("x1", "x2")]
            ),
            {"C1": 1, "x1": 1, "x2": 1},
            {"C1": ROLE_S0, "x1": ROLE_E, "x2": ROLE_S0},
            [("C1", "D0"), ("C1", "Dinf")],
        )
        return RulingModel(
            RULING_CSTAR,
            BASE_C1,
            False,
            (("D0", n), ("Dinf", -n)),
            (F0,),
            0,
            smooth_boundary_fiber("D0", "Dinf"),
        )

    for n in (0, 1, 2, 5):
        m = pair_model(n)
        c = qhp_criterion(m)
        assert (c.boundary_connected, c.boundary_is_tree, c.sigma_matches) == (
            True,
            True,
            True,
        )
        assert c.d_boundary == 0 and not c.passed
        v = dD_structural(m)
        assert v.agree and not v.structural
        assert dict(v.conditions)["open-fiber-pieces-meet-boundary"] is False


def test_structural_route_on_degenerate_two_column_boundary():
    F0 = FiberTree(
        WeightedForest(
            {"a": -2, "b": -2, "c": -3, "u": -1, "v": -2},
            [("a", "c"), ("b", "c"), ("c", "u"), ("u", "v")],
        ),
        {"a": 1, "b": 1, "c": 2, "u": 4, "v": 2},
        {"a": ROLE_D, "b": ROLE_D, "c": ROLE_D, "u": ROLE_S0, "v": ROLE_E},
        [("a", "D0"), ("b", "Dinf")],
    )
    F1 = chain_fiber(
        {"a": ROLE_D, "c": ROLE_S0, "b": ROLE_D}, [("a", "D0"), ("b", "Dinf")]
    )
    m = RulingModel(
        RULING_CSTAR, BASE_P1, False, (("D0", -1), ("Dinf", -1)), (F0, F1), 0, None, 6
    )
    c = qhp_criterion(m)
    assert c.d_boundary == 0 and c.d_exceptional == 2
    v = dD_structural(m)
    assert v.separator == "F0:c"
    assert v.d_near == 0 and v.d_far == 0
    assert v.agree and not v.structural


def test_structural_route_guards():
    # clauses (i)-(iii) must already hold
    f0 = chain_fiber({"a": ROLE_S0, "c": ROLE_D, "b": ROLE_S0}, [("c", "H")])
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    bad_sigma = RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, finf)
    with pytest.raises(DomainError):
        dD_structural(bad_sigma)


# ---------------------------------------------------------------------------
# homology


def test_h1_on_fixtures():
    m = minimal_affine().model
    data = h1(m)
    assert data.order == 1 and data.decomposition == ()
    fam = moduli_family(3).model
    data3 = h1(fam)
    assert data3.order == 8
    assert data3.decomposition == (2, 2, 2)


def test_h1_requires_passing_criterion():
    f0 = chain_fiber({"a": ROLE_S0, "c": ROLE_D, "b": ROLE_S0}, [("c", "H")])
    finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
    m = RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, finf)
    with pytest.raises(DomainError):
        h1(m)


def test_h1_exactness_guards():
    m = twisted_model()

    def verdict(d_boundary: int, d_exceptional: int) -> CriterionVerdict:
        return CriterionVerdict(
            boundary_connected=True,
            boundary_is_tree=True,
            sigma_matches=True,
            discriminant_nonzero=True,
            d_boundary=d_boundary,
            d_exceptional=d_exceptional,
            sigma=0,
            sigma_expected=0,
        )

    with pytest.raises(InconsistencyError):
        h1(m, verdict(-5, 2))  # ratio is not an integer
    with pytest.raises(InconsistencyError):
        h1(m, verdict(-8, 1))  # ratio is not a perfect square
