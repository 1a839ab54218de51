"""Dirichlet-to-Neumann correspondence on the half domain of SG.

Forward: the weighted derivative sums sum_k (3/5)^(k+1) d_n u(p_k)
converge to (9/4) int f dmu - (3/4) f(q0) - (3/2) f(q1).  Backward: any
summable derivative sequence is realized by a unique boundary function,
recovered in closed form, and the round trip is exact.
"""

from fractions import Fraction

from gasketbvp import halfdomain as HD

F = Fraction

f = HD.HalfBoundaryData(
    2, q1=F(1), atoms={"": F(2), "0": F(-1), "00": F(1, 2)}, default=F(0), q0=F(0)
)
res = HD.dirichlet_to_neumann_sg(f, 25)
print("forward map: partial sums of the weighted derivative series")
for k in (0, 1, 2, 5, 10, 25):
    print(f"  S_{k:<2d} = {float(res.partial_sums[k]):+.12f}")
print(f"  limit (9/4) int f - (3/4) f(q0) - (3/2) f(q1) = {float(res.limit):+.12f}")
print(f"  residual at K=25: {float(abs(res.partial_sums[-1] - res.limit)):.2e}")

print()
etas = [F(1, 2), F(-1), F(2, 3)]
print(f"backward map for eta = {etas} (eta_-1 first):")
g = HD.neumann_inverse_sg(etas)
print(f"  f(q1) = {g.q1}, f(q0) = {g.q0}")
for k in range(5):
    print(f"  f(p_{k}) = {g.atom('0' * k, 1)}")
nd, terms = HD.forward_derivatives_sg(g, 5)
print(f"  round trip: d_n u(q1) = {nd}, normalized derivative terms = "
      f"{[str(t) for t in terms]}")
