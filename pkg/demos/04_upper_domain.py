"""Upper domains of SG_3: the alpha/eta fixed point, the cylinder measure,
the two-case extension step, Haar expansion and the energy estimate.
"""

import math
from fractions import Fraction

from gasketbvp import geometry as G
from gasketbvp import upperdomain as UP

F = Fraction

lam = UP.TriadicLambda(1)
ea = UP.eta_alpha(lam, tol=1e-12)
print(f"lambda=1: alpha = {ea.alpha:.12f} (bracket width {ea.err:.1e}, depth {ea.depth})")
print(f"          closed form (75-sqrt(2353))/60 = {(75 - math.sqrt(2353)) / 60:.12f}")
print(f"          eta = {ea.eta:.12f}")

lam_mixed = UP.TriadicLambda.parse("digits:(1,1)(2,1)(3,2)periodic:(1,2)")
print(f"\ndigit program lambda = {lam_mixed.value}: "
      f"pairs {[lam_mixed.pair(k) for k in range(1, 5)]}")
print(f"alpha = {UP.eta_alpha(lam_mixed).alpha:.10f}")

print("\ncylinder measure at lambda=1 (iota=2 levels):")
w = UP.measure_weights(lam)
print(f"  weights mu_1 = mu_2 = {w[1]:.6f}, mu_3 = {w[3]:.6f}")
for word in ("1", "3", "31", "33"):
    print(f"  mu(X_{word}) = {UP.cylinder_mass(lam, word):.6f}")

print("\nextension step for f = 1 on X_1, 0 elsewhere, u(q0) = 1:")
f = UP.UpperBoundaryData(lam, q0=1.0, cylinders={"1": 1.0}, default=0.0)
for d, v in sorted(UP.extend_step_upper(lam, f).items()):
    print(f"  u(p_{d}) = {v:.8f}")

print("\nHaar expansion (depth 2) and reconstruction:")
b, coeffs = UP.haar_expand(lam, f, 2)
print(f"  mean b = {b:.6f}")
for (word, j), c in sorted(coeffs.items()):
    if abs(c) > 1e-12:
        print(f"  c_{word or '()'}^({j}) = {c:+.6f}")
for word in ("1", "2", "3"):
    print(f"  reconstructed value on X_{word}: {UP.haar_reconstruct(lam, b, coeffs, word):+.6f}")

print("\nenergy estimate (coefficient sum vs exact energy):")
est = UP.energy_estimate_upper(lam, 1.0, f, 3)
print(f"  weighted sum S = {est.weighted_sum:.6f}")
print(f"  exact energy    = {est.energy:.6f}")
print(f"  orthogonal sum  = {est.orthogonal_energy:.6f}")
print(f"  empirical bracket [{est.bracket[0]:.4f}, {est.bracket[1]:.4f}], "
      f"h_0 band [{est.band[0]:.4f}, {est.band[1]:.4f})")

print("\nGauss-Green exhaustion of E(h_0) converges to eta:")
for n in (4, 8, 12):
    egg, rem = UP.gauss_green_h0_energy(lam, n)
    print(f"  n={n:2d}: E_O = {egg:.10f} + certified remainder {rem:.2e}")
