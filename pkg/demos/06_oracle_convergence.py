"""Formula vs brute force: the explicit evaluators against the truncated
finite-graph Dirichlet solver across refinement levels.

The truncation imposes boundary data only on the level-m vertices of the
Cantor boundary, so the oracle drifts from the exact solution by a
geometrically shrinking amount; the discrepancy decreasing with m is the
cross-validation of every closed-form coefficient in the package.
"""

from fractions import Fraction

from gasketbvp import geometry as G
from gasketbvp import halfdomain as HD
from gasketbvp import oracle as O

F = Fraction

f = HD.HalfBoundaryData(
    3, q1=F(1), atoms={"": F(1, 2)},
    cylinders={"00": F(0), "03": F(1, 3), "30": F(-1), "33": F(2)}, q0=F(0),
)

sk2 = O.domain_restricted_graph(G.HalfDomain(3), 2)
targets = [sk2.graph.point(i) for i in range(sk2.graph.n_vertices())]
exact = {p: float(HD.evaluate(f, p)) for p in targets}

print("half domain of SG_3, cylinder-constant data at depth 2")
print("level   vertices   max |formula - oracle| at V_2")
for m in range(3, 8):
    sk = O.domain_restricted_graph(G.HalfDomain(3), m)
    vals = O.solve(sk.problem(lambda p: float(HD.boundary_value_at(f, p))),
                   mode="float")
    idx = sk.graph.index()
    s = sk.graph.scale
    worst = max(
        abs(exact[p] - vals[idx[(int(p[0] * s), int(p[1] * s))]]) for p in targets
    )
    print(f"  {m}     {sk.graph.n_vertices():8d}   {worst:.3e}")
print("(equivalently: gasketbvp compare --domain half-sg3 --data f.json --levels 3:7)")
