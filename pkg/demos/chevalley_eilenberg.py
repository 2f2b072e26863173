"""Count Lie algebras among small structure-constant tables.

Every antisymmetric table on three generators with entries in {-1, 0, 1} is
turned into a degree 1 vector field Q on R^3[1]; the table is a Lie algebra
exactly when [Q,Q] = 0.
"""
import itertools

from gradedgeom.derivations import is_cohomological
from gradedgeom.render import render_plain
from gradedgeom.structures import LieStructure, lie_to_Q

so3 = LieStructure.from_brackets(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}, names=("e1", "e2", "e3"))
Q = lie_to_Q(so3)
for coord, comp in Q.components.items():
    print(f"Q({coord}) = {render_plain(comp)}")

pairs = [(0, 1), (0, 2), (1, 2)]
lie = 0
for values in itertools.product((-1, 0, 1), repeat=9):
    consts = {}
    for n, v in enumerate(values):
        if v:
            i, j = pairs[n // 3]
            consts[(i, j, n % 3)] = v
            consts[(j, i, n % 3)] = -v
    lie += bool(is_cohomological(lie_to_Q(LieStructure(3, consts))))
print(f"{lie} of {3 ** 9} tables satisfy Jacobi")
