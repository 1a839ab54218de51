"""The half domain of SG_3: boundary measure, extension step, evaluation
and the boundary energy form, all in exact rational arithmetic.

The boundary is {q1} plus a Cantor set X on the symmetry line; the
harmonic solution is recovered from the value at q1 and the atom values
f(p_w) by one explicit linear step per cylinder level.
"""

from fractions import Fraction

from gasketbvp import geometry as G
from gasketbvp import halfdomain as HD

F = Fraction

st = HD.structure(3)
print(f"digit weights mu_0={st.weights[0]}, mu_3={st.weights[3]}, atom base {st.atom_base[0]}")
print(f"atom masses: p_() -> {HD.atom_mass(3, '')}, p_0 -> {HD.atom_mass(3, '0')}, "
      f"p_33 -> {HD.atom_mass(3, '33')}")
print(f"mass not seen below depth 4: {HD.residual_mass(3, 4)} (= (5/7)^4)")

print()
print("Harmonic measure data of h_a (1 at q1, 0 on X):")
f = HD.HalfBoundaryData(3, q1=F(1), default=F(0), q0=F(0))
x, y, z = HD.extend_step_sg3(f)
print(f"  u(x) = {x}, u(y) = {y}, u(z) = {z}")
print(f"  normal derivative at q1: {HD.normal_derivative_q1(f)}")
print(f"  energy E(u) = {HD.domain_energy(f)}")

print()
print("Deep evaluation is one dilation per cylinder level:")
cp = HD.crucial_points(3)
for word in ((), (0,), (0, 3), (3, 3, 0)):
    pt = G.apply_word(G.gasket(3), word, cp["x"])
    print(f"  u(F_{G.word_to_str(word) or '()'} x) = {HD.evaluate(f, pt)}")

print()
print("Boundary energy form Q(f) vs the true energy for cylinder data:")
g = HD.HalfBoundaryData(
    3, q1=F(1), atoms={"": F(1, 2)},
    cylinders={"00": F(0), "03": F(1, 3), "30": F(-1), "33": F(2)}, q0=F(0),
)
q = HD.energy_form_Q(g, 3)
e = HD.domain_energy(g)
print(f"  Q(f) = {q}, E(u) = {e}, ratio = {float(e / q):.4f}, "
      f"upper bound 225/28 = {float(F(225, 28)):.4f}")

print()
print("Gauss-Green pairing E_Om(h_a, u) converges to 3f(q1) - 3 int f:")
target = HD.normal_derivative_q1(g)
for m in (1, 2, 4, 6):
    e = HD.gauss_green_pairing(f, g, m)
    print(f"  m={m}: {float(e):+.8f} (target {float(target):+.8f}, "
          f"bound {float(F(30, 7) * F(5, 7) ** (m - 1) * g.sup()):.2e})")
