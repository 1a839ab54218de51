"""Lower domains of SG: the (eta_1, eta_2) recursion, transfer matrices,
the boundary measure pair and dyadic exactness against the oracle.
"""

from fractions import Fraction

from gasketbvp import geometry as G
from gasketbvp import lowerdomain as LD
from gasketbvp import oracle as O

F = Fraction

print("one-digit maps: T0 fixes (2,1); T1(2,1) = (35/12, 5/12)")
print(f"  T0(2,1) = {LD.t0(F(2), F(1))}")
print(f"  T1(2,1) = {LD.t1(F(2), F(1))}")

for lv in (F(0), F(1, 2), F(5, 8), F(1, 3)):
    lam = LD.BinaryLambda(lv)
    ep = LD.eta_pair(lam)
    tag = "exact" if ep.exact else f"depth {ep.depth}, bound {float(ep.err):.1e}"
    print(f"lambda={lv}: eta = ({float(ep.eta1):.10f}, {float(ep.eta2):.10f})  [{tag}]")

print("\nclosed forms cross-check the iteration:")
lam34 = LD.BinaryLambda(F(3, 4))
c1, c2 = LD.closed_form_ones(lam34, 2)
ep = LD.eta_pair(lam34)
print(f"  all-ones prefix lambda=3/4: closed ({c1:.10f}, {c2:.10f}) "
      f"vs iterative ({float(ep.eta1):.10f}, {float(ep.eta2):.10f})")

print("\ntransfer matrices and measures at lambda=1/2:")
lam12 = LD.BinaryLambda(F(1, 2))
print(f"  M_1 = {LD.transfer_matrix(lam12, '1')}")
for w in ("1", "2"):
    m1, m2 = LD.lower_measures(lam12, w)
    print(f"  mu_1(X_{w}) = {m1}, mu_2(X_{w}) = {m2}")

print("\ntelescoping derivative sums (Gauss-Green, exact for dyadic lambda):")
for m in (1, 3, 5):
    tot, base, _ = LD.gauss_green_telescope(lam12, F(2), F(-1), m)
    print(f"  m={m}: sum over words = {tot} == level-0 pair {base}")

print("\ndyadic lambda=3/8: the evaluator equals the finite-graph oracle exactly:")
lam = LD.BinaryLambda(F(3, 8))
cyl = {}
pool = [""]
for k in range(1, lam.dyadic_depth + 1):
    pool = [w + G.WORD_CHARS[d] for w in pool for d in LD.word_alphabet(lam, k)]
for i, w in enumerate(pool):
    cyl[w] = F(i + 1, 3)
f = LD.LowerBoundaryData(lam, q1=F(1), q2=F(-2), cylinders=cyl)
sk = O.domain_restricted_graph(G.LowerDomain(cut_y=lam.cut_height()), 4)


def bv(p):
    if p == G.Q1:
        return f.q1
    if p == G.CORNERS[2]:
        return f.q2
    return LD.boundary_value_at_lower(lam, f, p)


vals = O.solve(sk.problem(bv), mode="rational")
mismatches = sum(
    LD.evaluate_lower(lam, f, sk.graph.point(i)) != vals[i]
    for i in range(sk.graph.n_vertices())
)
print(f"  {sk.graph.n_vertices()} common vertices, {mismatches} mismatches")
