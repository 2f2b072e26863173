"""Build the Poisson sigma model action for the Lie-Poisson structure of so(3)*.

The bivector is turned into a degree 2 function S on T*[1]R^3, {S,S} = 0 is
checked, and S together with the kinetic term is lifted to superfields on a
two-dimensional source.
"""
from gradedgeom.aksz import SourceSpec, families, total_action
from gradedgeom.core import declare_chart
from gradedgeom.render import render_latex, render_plain
from gradedgeom.structures import Bivector, poisson_to_S, verify_poisson

base = declare_chart([("x1", 0), ("x2", 0), ("x3", 0)])
x1, x2, x3 = base.gens()
pi = Bivector(base, {("x1", "x2"): x3, ("x2", "x3"): x1, ("x3", "x1"): x2})

omega, S = poisson_to_S(pi)
print("S =", render_plain(S))
print("{S,S} = 0:", bool(verify_poisson(pi)))

terms, report = total_action(omega, S, SourceSpec(2))
print(f"formalism {report.formalism}, ghost degree per term {report.ghost_total}, audit {report.audit_ok}")
for fam in families(terms):
    print(f"  family {fam.kind}: coefficient {fam.coefficient}")
print(render_latex(terms))
print(f"{len(terms)} component terms, first three:")
for t in terms[:3]:
    print("  ", t.text())
