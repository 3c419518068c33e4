import random
import sys

sys.path.insert(0, "src")

from qhp.constructions import (
    construct_affine,
    construct_twisted,
    construct_untwisted_c1,
    construct_untwisted_p1,
    enumerate_column_programs,
    minimal_affine,
    minimal_twisted,
    moduli_family,
    random_built,
    vanishing_column_model,
    vanishing_pair_model,
)
from qhp.fibers import Sprout, Subdivide
from qhp.models import dD_structural, qhp_criterion
from qhp.report import classify

# --- minimal twisted --------------------------------------------------------
bt = minimal_twisted()
print("twisted F0:", bt.model.F0.forest.weights, bt.model.F0.role)
print("twisted sections:", bt.model.sections)
print("twisted report:", bt.report.case_tag, bt.report.kappa, bt.report.kappa0,
      bt.report.kod_S0, bt.report.d_boundary, bt.report.d_exceptional,
      bt.report.h1_order, bt.report.affine_ruled, bt.report.rulings)
assert bt.model.sections == (("H", 0),)
assert bt.report.passed and bt.report.d_boundary == -4 and bt.report.d_exceptional == 4
assert bt.report.h1_order == 1

# --- minimal affine ---------------------------------------------------------
ba = minimal_affine()
print("affine F0:", ba.model.F0.forest.weights, ba.model.F0.role)
print("affine report:", ba.report.d_boundary, ba.report.h1_order,
      ba.report.h1_decomposition, ba.report.affine_unique,
      [ (s.kind, s.order) for s in ba.report.singularities ])
assert ba.report.passed and ba.report.d_boundary == -2
assert ba.report.h1_order == 1 and ba.report.h1_decomposition == ()

# --- moduli family ----------------------------------------------------------
for N in (0, 1, 2, 3):
    bm = moduli_family(N)
    print(f"moduli N={N}:", bm.report.d_boundary, bm.report.h1_order,
          bm.report.h1_decomposition)
    assert bm.report.d_boundary == -6 * 4 ** N, bm.report.d_boundary
    assert bm.report.h1_order == 2 ** N
    assert bm.report.h1_decomposition == (2,) * N

# --- vanishing fixtures -----------------------------------------------------
for name, m in (("pair", vanishing_pair_model()), ("column", vanishing_column_model())):
    crit = qhp_criterion(m)
    v = dD_structural(m)
    print(f"vanishing {name}:", crit.clauses(), crit.d_boundary, v)
    assert not crit.passed and crit.d_boundary == 0
    assert v.agree and v.structural == 0

# --- explicit builders ------------------------------------------------------
two12 = [Subdivide("v0", "D1"), Subdivide("x1", "v0")]
bc1 = construct_untwisted_c1([two12], [Subdivide("x1", "D1")])
print("c1:", bc1.model.sections, bc1.report.case_tag, bc1.report.kappa,
      bc1.report.kappa0, bc1.report.h1_order)
assert bc1.report.passed

bp1 = construct_untwisted_p1(1, [two12], [Sprout("x2"), Subdivide("x3", "x2")])
print("p1:", bp1.model.sections, bp1.report.case_tag, bp1.report.kappa,
      bp1.report.kappa0, bp1.report.h1_order)
assert bp1.report.passed

tw = construct_twisted(
    [[Subdivide("v0", "H"), Subdivide("x1", "v0")]], []
)
print("twisted+col:", tw.model.sections, tw.report.case_tag, tw.report.h1_order)
assert tw.report.passed and tw.model.sections == (("H", -1),)

# --- random sweep -----------------------------------------------------------
for kind in ("affine", "twisted", "untwisted-c1", "untwisted-p1"):
    for seed in range(12):
        rng = random.Random(f"{kind}-{seed}")
        b = random_built(kind, rng)
        assert b.report.passed, (kind, seed)
    print("random ok:", kind)

# --- column enumeration -----------------------------------------------------
progs = list(enumerate_column_programs(("D1", "D2"), 2))
print("enumerated columns:", len(progs), [len(p) for p in progs])
assert len(progs) == 7 and sorted(len(p) for p in progs) == [2, 3, 3, 4, 4, 4, 4]

print("constructions smoke OK")
