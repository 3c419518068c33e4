"""Blow-up calculus on fiber trees: steps, validation, columns, traces."""

from __future__ import annotations

import random

import pytest

from qhp import (
    BlowupProgram,
    DomainError,
    FiberTree,
    ROLE_D,
    ROLE_E,
    ROLE_S0,
    Sprout,
    StructureError,
    Subdivide,
    WeightedForest,
    apply_step,
    blow_down,
    columnar_split,
    contraction_trace,
    discriminant,
    enumerate_fibers,
    is_connected_program,
    mu_s,
    new_fiber,
    replay,
    validate_fiber,
)


def chain_fiber_212(section: str | None = None) -> FiberTree:
    forest = WeightedForest({"a": -2, "c": -1, "b": -2}, [("a", "c"), ("c", "b")])
    attach = [("c", section)] if section else []
    return FiberTree(forest, {"a": 1, "c": 2, "b": 1}, None, attach)


# ---------------------------------------------------------------------------
# construction and validation of the type itself


def test_new_fiber_is_the_zero_curve():
    f = new_fiber(["S"])
    assert f.vertices == ("v0",)
    assert f.weight("v0") == 0
    assert f.mult == {"v0": 1}
    assert f.role == {"v0": ROLE_S0}
    assert f.attach == (("v0", "S"),)
    assert f.is_smooth()


def test_fiber_rejects_nonpositive_multiplicity():
    with pytest.raises(StructureError):
        FiberTree(WeightedForest({"v": 0}), {"v": 0})


def test_fiber_rejects_imprimitive_multiplicities():
    forest = WeightedForest({"a": -1, "b": -1}, [("a", "b")])
    with pytest.raises(StructureError):
        FiberTree(forest, {"a": 2, "b": 2})


def test_fiber_rejects_kernel_violation():
    forest = WeightedForest({"a": -2, "b": -2}, [("a", "b")])
    with pytest.raises(StructureError):
        FiberTree(forest, {"a": 1, "b": 1})


def test_fiber_rejects_nonnegative_weight_in_big_fiber():
    forest = WeightedForest({"a": 0, "b": -1}, [("a", "b")])
    with pytest.raises(StructureError):
        FiberTree(forest, {"a": 1, "b": 1})


def test_fiber_rejects_attach_on_contracted_vertex():
    forest = WeightedForest({"a": -2, "c": -1, "b": -2}, [("a", "c"), ("c", "b")])
    with pytest.raises(StructureError):
        FiberTree(
            forest,
            {"a": 1, "c": 2, "b": 1},
            {"a": ROLE_E, "c": ROLE_S0, "b": ROLE_D},
            [("a", "S")],
        )


def test_fiber_rejects_section_id_colliding_with_vertex():
    with pytest.raises(DomainError):
        FiberTree(WeightedForest({"v0": 0}), {"v0": 1}, None, [("v0", "v0")])


# ---------------------------------------------------------------------------
# step semantics


def test_sprout_semantics():
    f = apply_step(new_fiber(), Sprout("v0"))
    assert f.weight("v0") == -1 and f.weight("x1") == -1
    assert f.mult == {"v0": 1, "x1": 1}
    assert f.forest.edge_list() == [("v0", "x1")]


def test_subdivide_edge_semantics():
    f0 = apply_step(new_fiber(), Sprout("v0"))
    f = apply_step(f0, Subdivide("v0", "x1"))
    # new vertex sits between the pair, multiplicity adds up
    assert f.weight("x2") == -1
    assert f.weight("v0") == f.weight("x1") == -2
    assert f.mult["x2"] == f.mult["v0"] + f.mult["x1"] == 2
    assert sorted(f.forest.edge_list()) == [("v0", "x2"), ("x1", "x2")]


def test_subdivide_attach_moves_the_record():
    f = apply_step(new_fiber(["S"]), Subdivide("v0", "S"))
    assert f.attach == (("x1", "S"),)
    assert f.weight("v0") == -1 and f.weight("x1") == -1
    assert f.mult["x1"] == 1


def test_subdivide_rejects_non_incident_pair():
    with pytest.raises(DomainError):
        apply_step(new_fiber(["S"]), Subdivide("v0", "T"))


def test_replay_tracks_touches_and_created():
    res = replay(
        new_fiber(["S"]),
        BlowupProgram([Subdivide("v0", "S"), Subdivide("x1", "v0")]),
    )
    assert res.created == ("x1", "x2")
    assert res.section_touches == {"S": 1}
    assert res.unique_new_minus_one() == "x2"


def test_is_connected_program():
    f = new_fiber(["S"])
    good = BlowupProgram([Subdivide("v0", "S"), Subdivide("x1", "v0")])
    assert is_connected_program(f, good)
    # second step touches no created vertex
    stray = BlowupProgram([Subdivide("v0", "S"), Sprout("v0")])
    assert not is_connected_program(f, stray)
    # ends with two new (-1)-vertices
    double = BlowupProgram([Sprout("v0"), Sprout("x1"), Subdivide("v0", "x1")])
    assert not is_connected_program(new_fiber(), double)


# ---------------------------------------------------------------------------
# blow-downs


def test_blow_down_inverts_subdivision():
    f0 = apply_step(new_fiber(), Sprout("v0"))
    f1 = apply_step(f0, Subdivide("v0", "x1"))
    assert blow_down(f1, "x2") == f0


def test_blow_down_inverts_sprout():
    f0 = new_fiber(["S"])
    f1 = apply_step(f0, Sprout("v0"))
    assert blow_down(f1, "x1") == f0


def test_blow_down_moves_attach_record_to_neighbor():
    f1 = apply_step(new_fiber(["S"]), Subdivide("v0", "S"))
    back = blow_down(f1, "x1")
    assert back.attach == (("v0", "S"),)
    assert back.weight("v0") == 0


def test_blow_down_guards():
    f = chain_fiber_212()
    with pytest.raises(DomainError):
        blow_down(f, "a")  # weight -2
    with pytest.raises(DomainError):
        blow_down(f, "zz")
    with pytest.raises(DomainError):
        blow_down(new_fiber(), "v0")  # whole fiber
    # interior vertex carrying a section record cannot contract
    with pytest.raises(DomainError):
        blow_down(chain_fiber_212("S"), "c")


def test_branching_minus_one_fiber_is_unconstructible():
    # the kernel law itself rules out a (-1)-vertex meeting three fiber
    # components, which is why blow_down's degree guard never fires on
    # organically built fibers
    with pytest.raises(StructureError):
        FiberTree(
            WeightedForest(
                {"m": -1, "p": -2, "q": -2, "r": -2},
                [("m", "p"), ("m", "q"), ("m", "r")],
            ),
            {"m": 6, "p": 3, "q": 2, "r": 1},
        )


# ---------------------------------------------------------------------------
# fiber validation clauses


def test_validate_smooth_fiber_is_vacuous():
    rep = validate_fiber(new_fiber())
    assert rep.kernel_law and rep.is_tree
    assert rep.unique_c is None
    assert rep.clause_i is rep.clause_ii is rep.clause_iii is None
    assert rep.ok


def test_validate_two_minus_ones_is_vacuous():
    f = apply_step(new_fiber(), Sprout("v0"))
    rep = validate_fiber(f)
    assert rep.minus_one == ("v0", "x1")
    assert rep.unique_c is None
    assert rep.ok


def test_validate_212_chain():
    rep = validate_fiber(chain_fiber_212())
    assert rep.unique_c == "c"
    assert rep.clause_i is True  # mult 2, two multiplicity-one tips
    assert rep.clause_ii is True  # the [2,1,2] shape itself
    assert rep.clause_iii is None  # chains skip the branch clause
    assert rep.ok


def test_validate_tip_on_222_star():
    # C hangs off the middle of a [2,2,2] chain; multiplicities (1,2,1;2)
    f = FiberTree(
        WeightedForest(
            {"t1": -2, "m": -2, "t2": -2, "c": -1},
            [("m", "t1"), ("m", "t2"), ("m", "c")],
        ),
        {"t1": 1, "m": 2, "t2": 1, "c": 2},
    )
    rep = validate_fiber(f)
    assert rep.unique_c == "c"
    assert rep.clause_i is True
    assert rep.clause_ii is True  # C is a tip, the rest is the chain [2,2,2]
    assert rep.clause_iii is True
    assert rep.ok


def test_validate_clauses_vacuous_without_unique_minus_one():
    # two (-1)-vertices: the shape clauses do not apply and stay None
    res = replay(new_fiber(), BlowupProgram([Sprout("v0"), Sprout("x1")]))
    assert {res.fiber.weight(v) for v in res.fiber.vertices} == {-1, -2}
    rep = validate_fiber(res.fiber)
    assert rep.unique_c is None
    assert rep.clause_i is rep.clause_ii is rep.clause_iii is None
    assert rep.ok  # kernel + tree alone decide


# ---------------------------------------------------------------------------
# exhaustive small-depth sweep


def test_enumerated_fibers_satisfy_fiber_laws():
    seen = set()
    count = 0
    for depth, f in enumerate_fibers(4, new_fiber(["S"])):
        count += 1
        cert = f.certificate()
        assert cert not in seen
        seen.add(cert)
        rep = validate_fiber(f)
        assert rep.kernel_law, f
        assert rep.is_tree, f
        assert discriminant(f.forest) == 0, f
        if rep.unique_c is not None:
            # the degenerate-fiber shape clauses hold for every reachable
            # fiber with a single (-1)-vertex
            assert rep.ok, f
    assert count > 50  # the sweep is not trivially empty


# ---------------------------------------------------------------------------
# columns


def make_column(entries_programs: list) -> FiberTree:
    from qhp.constructions import _column

    return _column(("A", "B"), BlowupProgram(entries_programs))[0]


def test_columnar_split_basic():
    col = make_column([Subdivide("v0", "A"), Subdivide("x1", "v0")])
    sp = columnar_split(col)
    assert sp.mu_c == 2
    assert sp.a.entries == (2,) and sp.b.entries == (2,)
    assert {sp.a_section, sp.b_section} == {"A", "B"}
    assert col.role[sp.c] == ROLE_S0
    assert all(col.role[v] == ROLE_D for v in col.vertices if v != sp.c)


def test_columnar_split_rejects_non_chain():
    with pytest.raises(DomainError):
        columnar_split(chain_fiber_212())  # no section tips


def test_mu_s_gcd_over_off_boundary_part():
    col = make_column([Subdivide("v0", "A"), Subdivide("x1", "v0")])
    assert mu_s(col) == 2  # only the open (-1)-curve counts
    f = chain_fiber_212().with_roles({"a": ROLE_E, "b": ROLE_E})
    assert mu_s(f) == 1  # gcd(1, 2, 1)
    with pytest.raises(DomainError):
        mu_s(chain_fiber_212().with_roles({"a": ROLE_D, "b": ROLE_D, "c": ROLE_D}))


# ---------------------------------------------------------------------------
# contraction traces


def test_trace_pure_subdivisional():
    # column shape: both tips carry a section, so every contraction center
    # lies on two components of the marked image
    col = FiberTree(
        WeightedForest({"a": -2, "b": -2, "c": -1}, [("a", "c"), ("b", "c")]),
        {"a": 1, "b": 1, "c": 2},
        attach=[("a", "A"), ("b", "B")],
    )
    tr = contraction_trace(col)
    assert [s.kind for s in tr.steps] == ["subdivisional", "subdivisional"]
    assert not tr.eta_nontrivial
    assert tr.result.is_smooth()
    # both section records survive onto the final vertex
    assert sorted(s for _, s in tr.result.attach) == ["A", "B"]


def test_trace_detects_sprouting():
    # a (-1)-vertex meeting a single marked component contracts sproutingly
    f = apply_step(new_fiber(), Sprout("v0"))
    tr = contraction_trace(f)
    assert tr.steps[0].kind == "sprouting"
    assert tr.eta_nontrivial
    assert tr.result.is_smooth()


def test_trace_attach_records_count_as_marked_components():
    # same shape as above but a section sits on v0: contracting v0 is now
    # subdivisional and the greedy trace finds an eta-trivial route
    f = apply_step(new_fiber(["S"]), Sprout("v0"))
    tr = contraction_trace(f)
    assert [(s.vertex, s.kind) for s in tr.steps] == [("v0", "subdivisional")]
    assert not tr.eta_nontrivial


def test_trace_respects_marked_subset():
    # an unmarked vertex never contracts
    f = apply_step(new_fiber(["S"]), Subdivide("v0", "S"))
    tr = contraction_trace(f, marked=["v0"])
    assert all(s.vertex != "x1" for s in tr.steps)


def test_trace_is_choice_insensitive_on_212():
    f = chain_fiber_212("S")
    lo = contraction_trace(f)
    hi = contraction_trace(f, choose=lambda cands: max(cands))
    assert lo.eta_nontrivial == hi.eta_nontrivial
    assert len(lo.steps) == len(hi.steps)


def test_trace_verdict_stable_under_order_for_unique_minus_one_fibers():
    # for fibers with a single (-1)-vertex the sprouting/no-sprouting verdict
    # must not depend on the contraction order
    rng = random.Random(20240817)
    for _, f in enumerate_fibers(4, new_fiber(["S"])):
        if len(f.minus_one_vertices()) != 1:
            continue
        base = contraction_trace(f).eta_nontrivial
        assert contraction_trace(f, choose=max).eta_nontrivial == base, f
        assert contraction_trace(f, choose=rng.choice).eta_nontrivial == base, f
