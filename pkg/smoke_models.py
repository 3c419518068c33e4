import sys

sys.path.insert(0, "src")
from qhp.fibers import ROLE_D, ROLE_E, ROLE_S0, FiberTree
from qhp.graphs import WeightedForest
from qhp.models import (
    BASE_C1,
    BASE_P1,
    RULING_AFFINE,
    RULING_CSTAR,
    RulingModel,
    assemble_boundary,
    dD_structural,
    h1,
    qhp_criterion,
    sigma_and_fujita,
)


def chain_fiber(roles, attach):
    return FiberTree(
        WeightedForest({"a": -2, "c": -1, "b": -2}, [("a", "c"), ("c", "b")]),
        {"a": 1, "c": 2, "b": 1},
        roles,
        attach,
    )


# --- fixture 1: minimal twisted -------------------------------------------
f0 = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
m1 = RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, finf)
D, E, b2 = assemble_boundary(m1)
print("m1 D:", D.weights, D.edge_list())
print("m1 E:", E.weights)
c1 = qhp_criterion(m1)
print("m1 criterion:", c1.clauses(), "dD:", c1.d_boundary, "dE:", c1.d_exceptional)
assert c1.passed and c1.d_boundary == -4 and c1.d_exceptional == 4
s1 = sigma_and_fujita(m1)
print("m1 sigma:", s1)
assert s1.consistent and s1.sigma == 0 and s1.b2_surface == 6 and s1.b2_boundary == 6
v1 = dD_structural(m1)
print("m1 structural:", v1)
assert v1.agree and v1.structural
h = h1(m1)
print("m1 h1:", h)
assert h.order == 1

# --- fixture 2: Hirzebruch-style degenerate boundary -----------------------
def hirzebruch(n):
    F0 = FiberTree(
        WeightedForest({"C1": -1, "x1": -2, "x2": -1}, [("C1", "x1"), ("x1", "x2")]),
        {"C1": 1, "x1": 1, "x2": 1},
        {"C1": ROLE_S0, "x1": ROLE_E, "x2": ROLE_S0},
        [("C1", "D0"), ("C1", "Dinf")],
    )
    fi = FiberTree(
        WeightedForest({"v0": 0}, []),
        {"v0": 1},
        {"v0": ROLE_D},
        [("v0", "D0"), ("v0", "Dinf")],
    )
    return RulingModel(
        RULING_CSTAR, BASE_C1, False, (("D0", n), ("Dinf", -n)), (F0,), 0, fi
    )


for n in (0, 1, 2, 5):
    m2 = hirzebruch(n)
    c2 = qhp_criterion(m2)
    assert (
        c2.boundary_connected
        and c2.boundary_is_tree
        and c2.sigma_matches
        and c2.d_boundary == 0
    ), (n, c2)
    v2 = dD_structural(m2)
    assert v2.agree and not v2.structural, (n, v2)
print("m2 (all n): criterion (T,T,T,F), structural agrees: False")

# --- fixture 3: two-column model with degenerate boundary ------------------
F0 = FiberTree(
    WeightedForest(
        {"a": -2, "b": -2, "c": -3, "u": -1, "v": -2},
        [("a", "c"), ("b", "c"), ("c", "u"), ("u", "v")],
    ),
    {"a": 1, "b": 1, "c": 2, "u": 4, "v": 2},
    {"a": ROLE_D, "b": ROLE_D, "c": ROLE_D, "u": ROLE_S0, "v": ROLE_E},
    [("a", "D0"), ("b", "Dinf")],
)
F1 = chain_fiber({"a": ROLE_D, "c": ROLE_S0, "b": ROLE_D}, [("a", "D0"), ("b", "Dinf")])
m3 = RulingModel(
    RULING_CSTAR, BASE_P1, False, (("D0", -1), ("Dinf", -1)), (F0, F1), 0, None, 6
)
c3 = qhp_criterion(m3)
print("m3 criterion:", c3.clauses(), "dD:", c3.d_boundary, "dE:", c3.d_exceptional)
assert (
    c3.boundary_connected
    and c3.boundary_is_tree
    and c3.sigma_matches
    and c3.d_boundary == 0
    and c3.d_exceptional == 2
)
v3 = dD_structural(m3)
print("m3 structural:", v3)
assert v3.separator == "F0:c" and v3.d_near == 0 and v3.d_far == 0
assert v3.agree and not v3.structural

# --- fixture 4: minimal affine model ---------------------------------------
af = FiberTree(
    WeightedForest({"d": -2, "C": -1, "e": -2}, [("d", "C"), ("C", "e")]),
    {"d": 1, "C": 2, "e": 1},
    {"d": ROLE_D, "C": ROLE_S0, "e": ROLE_E},
    [("d", "S")],
)
fi = FiberTree(
    WeightedForest({"v0": 0}, []), {"v0": 1}, {"v0": ROLE_D}, [("v0", "S")]
)
m4 = RulingModel(RULING_AFFINE, BASE_C1, False, (("S", -1),), (af,), 0, fi)
c4 = qhp_criterion(m4)
print("m4 criterion:", c4.clauses(), "dD:", c4.d_boundary, "dE:", c4.d_exceptional)
assert c4.passed and c4.d_boundary == -2 and c4.d_exceptional == 2
h4 = h1(m4, c4)
print("m4 h1:", h4)
assert h4.order == 1 and h4.decomposition == ()

print("models smoke OK")
