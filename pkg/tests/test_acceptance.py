"""Acceptance suite: every criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion.  Group 3 builds large oracle graphs and dominates the runtime.
"""

import itertools
import math
import random
from fractions import Fraction

import pytest

from gasketbvp import geometry as G
from gasketbvp import halfdomain as HD
from gasketbvp import harmonic as H
from gasketbvp import lowerdomain as LD
from gasketbvp import oracle as O
from gasketbvp import upperdomain as UP

F = Fraction


def ok(msg):
    print(f"PASS: {msg}")


def lam_mixed_program():
    return UP.TriadicLambda.parse("digits:(1,1)(2,1)(3,2)periodic:(1,2)")


def random_half_cylinder(rng, depth):
    cyl = {}

    def fill(word, k):
        if k == 0:
            cyl[word] = F(rng.randrange(-6, 7), rng.randrange(1, 4))
            return
        for ch in "03":
            fill(word + ch, k - 1)

    fill("", depth)
    atoms = {}
    for d in range(depth):
        for w in ("".join(t) for t in itertools.product("03", repeat=d)):
            atoms[(w, 1)] = F(rng.randrange(-6, 7), rng.randrange(1, 4))
    return HD.HalfBoundaryData(3, q1=F(rng.randrange(-6, 7)), atoms=atoms,
                               cylinders=cyl, q0=F(0))


# -------------------------------------------------------------------- 1


def test_1_exact_constants_rational_mode():
    f = HD.HalfBoundaryData(3, q1=F(1), default=F(0), q0=F(0))
    assert HD.extend_step_sg3(f) == (F(4, 15), F(1, 3), F(1, 15))
    ok("1a extension step on (1 at q1, 0 on X) = (4/15, 1/3, 1/15) exactly")

    assert HD.normal_derivative_q1(f) == 3
    ok("1b normal derivative at q1 = 3 exactly")

    ext = H.harmonic_extend_cell(3, (F(1), F(0), F(0)))
    expected = {}
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            k = 3 - i - j
            pt = tuple(2 * G.CORNERS_INT[i][t] + G.CORNERS_INT[j][t] for t in range(2))
            w = [F(0)] * 3
            w[i], w[j], w[k] = F(8, 15), F(4, 15), F(3, 15)
            expected[pt] = w[0]
    centre = tuple(sum(G.CORNERS_INT[c][t] for c in range(3)) for t in range(2))
    expected[centre] = F(1, 3)
    for c in range(3):
        expected[tuple(3 * x for x in G.CORNERS_INT[c])] = F(1) if c == 0 else F(0)
    assert ext == expected
    ok("1c level-3 cell extension reproduces every 8-4-3/15 coefficient exactly")

    assert HD.atom_mass(3, "") == F(2, 7)
    for d in range(7):
        assert HD.residual_mass(3, d) == F(5, 7) ** d
    ok("1d atom mass 2/7 and residual mass (5/7)^d exact")


# -------------------------------------------------------------------- 2


def test_2_fixed_points_and_limits():
    ea = UP.eta_alpha(UP.TriadicLambda(1), tol=1e-12)
    exact = (75 - math.sqrt(2353)) / 60
    assert abs(ea.alpha - exact) <= 1e-9 and ea.depth <= 60
    ok(f"2a upper lambda=1: |alpha - (75-sqrt(2353))/60| = {abs(ea.alpha - exact):.2e} <= 1e-9 in {ea.depth} iterations")

    ep = LD.eta_pair(LD.BinaryLambda(0))
    assert abs(float(ep.eta1) - 2) <= 1e-12 and abs(float(ep.eta2) - 1) <= 1e-12
    fx = LD.t0(2.0, 1.0)
    assert abs(fx[0] - 2) <= 1e-14 and abs(fx[1] - 1) <= 1e-14
    ok("2b lower lambda=0: eta=(2,1) to 1e-12 and T0 fixes (2,1) to 1e-14")

    lam12 = LD.BinaryLambda(F(1, 2))
    it = LD.composite_eta(lam12, 1, (2.0, 1.0))
    assert abs(it[0] - 35 / 12) <= 1e-12 and abs(it[1] - 5 / 12) <= 1e-12
    c1, c2 = LD.closed_form_ones(lam12, 1)
    assert abs(c1 - 35 / 12) <= 1e-12 and abs(c2 - 5 / 12) <= 1e-12
    ok("2c lower lambda=1/2: iterative and closed-form eta = (35/12, 5/12) to 1e-12")

    rng = random.Random(101)
    count = 0
    while count < 20:
        lam = LD.BinaryLambda(F(rng.randrange(1, 3 ** 13), 3 ** 13) * F(7, 8))
        if lam.dyadic:
            continue
        a = LD.composite_eta(lam, 60, (2.0, 1.0))
        b = LD.composite_eta(lam, 60, (3.0, 1.0))
        assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) <= 1e-10
        count += 1
    ok("2d seeds (2,1) and (3,1) agree to 1e-10 at depth 60 for 20 random lambda")


# -------------------------------------------------------------------- 3


def test_3a_half_domain_oracle_convergence():
    rng = random.Random(7)
    f = random_half_cylinder(rng, 2)
    sk3 = O.domain_restricted_graph(G.HalfDomain(3), 3)
    bids = set(sk3.boundary_ids.tolist())
    targets = [sk3.graph.point(i) for i in range(sk3.graph.n_vertices())
               if i not in bids]
    exact = {p: float(HD.evaluate(f, p)) for p in targets}
    maxes = []
    for m in range(4, 9):
        sk = O.domain_restricted_graph(G.HalfDomain(3), m)
        vals = O.solve(sk.problem(lambda p: float(HD.boundary_value_at(f, p))),
                       mode="float")
        idx = sk.graph.index()
        s = sk.graph.scale
        diffs = []
        for p in targets:
            vid = idx[(int(p[0] * s), int(p[1] * s))]
            diffs.append(abs(exact[p] - vals[vid]))
        maxes.append(max(diffs))
    assert all(a > b for a, b in zip(maxes, maxes[1:]))
    assert maxes[-1] <= 1e-3
    ok(f"3a half-domain oracle discrepancy decreases over m=4..8: {['%.2e' % v for v in maxes]}, final <= 1e-3")


def test_3b_lower_dyadic_exact_oracle_equality():
    rng = random.Random(9)
    for lv in (F(1, 2), F(1, 4), F(3, 8)):
        lam = LD.BinaryLambda(lv)
        d = lam.dyadic_depth
        cyl = {}
        pool = [""]
        for k in range(1, d + 1):
            pool = [w + G.WORD_CHARS[dd] for w in pool for dd in LD.word_alphabet(lam, k)]
        for w in pool:
            cyl[w] = F(rng.randrange(-8, 9), rng.randrange(1, 5))
        f = LD.LowerBoundaryData(lam, q1=F(2), q2=F(-1, 3), cylinders=cyl)
        m = max(d, 2) + 1
        sk = O.domain_restricted_graph(G.LowerDomain(cut_y=lam.cut_height()), m)

        def bv(p):
            if p == G.Q1:
                return f.q1
            if p == G.CORNERS[2]:
                return f.q2
            return LD.boundary_value_at_lower(lam, f, p)

        vals = O.solve(sk.problem(bv), mode="rational")
        for i in range(sk.graph.n_vertices()):
            assert LD.evaluate_lower(lam, f, sk.graph.point(i)) == vals[i]
    ok("3b lower domain, dyadic lambda in {1/2, 1/4, 3/8}: evaluator equals the oracle exactly (rational mode)")


def test_3c_upper_lambda1_oracle_convergence():
    lam1 = UP.TriadicLambda(1)
    f = UP.UpperBoundaryData(
        lam1, q0=0.4, cylinders={"1": 1.0, "2": -0.5, "3": 0.25}, default=0.0
    )
    step = UP.extend_step_upper(lam1, f)
    crucial = UP._crucial_points(G.gasket(3))
    errs = []
    for m in (5, 6, 7):
        sk = O.domain_restricted_graph(G.UpperDomain(cut_y=F(0)), m)

        def bval(p):
            if p == G.Q0:
                return f.q0
            return UP.boundary_value_at_upper(lam1, f, p)

        vals = O.solve(sk.problem(bval), mode="float")
        errs.append(max(
            abs(step[d] - vals[sk.graph.vertex_id(crucial[d])]) for d in step
        ))
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 2e-3
    ok(f"3c upper lambda=1 extension vs oracle: {['%.2e' % v for v in errs]} decreasing, final <= 2e-3")


# -------------------------------------------------------------------- 4


def test_4a_gauss_green_bound_half():
    rng = random.Random(41)
    ha = HD.HalfBoundaryData(3, q1=F(1), default=F(0), q0=F(0))
    for _ in range(10):
        f = random_half_cylinder(rng, 2)
        target = HD.normal_derivative_q1(f)
        sup = f.sup()
        for m in range(1, 9):
            e = HD.gauss_green_pairing(ha, f, m)
            assert abs(e - target) <= F(30, 7) * F(5, 7) ** (m - 1) * sup
    ok("4a |E_Om(h_a, u) - (3f(q1) - 3 int f)| <= (30/7)(5/7)^(m-1)||f|| for m <= 8, 10 random f")


def test_4b_upper_derivative_identity():
    for lam in (UP.TriadicLambda(1), UP.TriadicLambda(F(2, 3)), lam_mixed_program()):
        eta = UP.eta_of(lam)
        h0 = UP.UpperBoundaryData(lam, q0=1.0, default=0.0)
        pool = [""]
        words = []
        for _ in range(3):
            nxt = []
            for w in pool:
                cur = lam
                for ch in w:
                    cur = cur.shift()
                for d in UP.level_alphabet(cur):
                    nxt.append(w + G.WORD_CHARS[d])
            words += nxt
            pool = nxt
        params = G.gasket(3)
        for w in words:
            digits = []
            cur = lam
            for ch in w:
                digits += [0] * (cur.m1 - 1) + [G.WORD_CHARS.index(ch)]
                cur = cur.shift()
            pt = G.apply_word(params, tuple(digits), G.Q0)
            h0val = UP.evaluate_upper(lam, h0, pt)
            m_n = lam.pair(len(w))[0]
            lhs = float(UP.RATIO) ** m_n * UP.eta_of(cur) * h0val
            rhs = UP.cylinder_mass(lam, w) * eta
            assert abs(lhs - rhs) <= 1e-8 * abs(rhs)
    ok("4b d_n h_0(F_w q0) = mu(X_w) eta(lambda) to 1e-8 relative, |w| <= 3, three lambdas")


def test_4c_lower_telescoping():
    for lv in (F(1, 2), F(1, 4), F(3, 8)):
        lam = LD.BinaryLambda(lv)
        for m in range(1, 7):
            tot, base, _ = LD.gauss_green_telescope(lam, F(2), F(-1), m)
            assert tot == base
    for lv in (F(1, 3), F(2, 5)):
        lam = LD.BinaryLambda(lv)
        for m in range(1, 7):
            tot, base, _ = LD.gauss_green_telescope(lam, 1.0, 0.5, m)
            assert abs(tot - base) <= 1e-10
    ok("4c lower-domain telescoping sums exact (dyadic) and <= 1e-10 (float), m <= 6")


def test_4d_all_measures_sum_to_one():
    # half domain (atomic): atoms up to depth d plus residual
    for d in range(1, 7):
        total = sum(
            HD.atom_mass(3, "".join(w))
            for k in range(d)
            for w in itertools.product("03", repeat=k)
        )
        assert total + HD.residual_mass(3, d) == 1
    # upper domain
    for lam in (UP.TriadicLambda(1), lam_mixed_program()):
        for depth in range(1, 7):
            total = 0.0

            def walk(cur, word, k):
                nonlocal total
                if k == 0:
                    total += UP.cylinder_mass(lam, word)
                    return
                for dd in UP.level_alphabet(cur):
                    walk(cur.shift(), word + G.WORD_CHARS[dd], k - 1)

            walk(lam, "", depth)
            assert abs(total - 1) <= 1e-12
    # lower domain, both measures
    for lv in (F(1, 2), F(3, 8), F(1, 3)):
        lam = LD.BinaryLambda(lv)
        for m in range(1, 7):
            pool = [""]
            for k in range(1, m + 1):
                pool = [w + G.WORD_CHARS[dd] for w in pool for dd in LD.word_alphabet(lam, k)]
            s1 = sum(float(LD.lower_measures(lam, w)[0]) for w in pool)
            s2 = sum(float(LD.lower_measures(lam, w)[1]) for w in pool)
            assert abs(s1 - 1) <= 1e-12 and abs(s2 - 1) <= 1e-12
    ok("4d all four boundary measures have level sums 1 within 1e-12, depths <= 6")


# -------------------------------------------------------------------- 5


def test_5a_half_energy_sandwich():
    rng = random.Random(51)
    ratios = []
    for _ in range(50):
        f = random_half_cylinder(rng, rng.randrange(1, 4))
        q = HD.energy_form_Q(f, 4)
        e = HD.domain_energy(f)
        if q == 0:
            assert e == 0
            continue
        assert e <= F(225, 28) * q
        ratios.append(float(e / q))
    assert min(ratios) > 0
    ok(f"5a E(u) <= (225/28) Q(f) exactly for 50 random f; empirical lower ratio {min(ratios):.4f} > 0")


def test_5b_upper_eta_band_and_h0_energy():
    for k in range(1, 21):
        lam = UP.TriadicLambda(F(k, 21))
        eta = UP.eta_of(lam)
        lo, hi = UP.h0_band(lam)
        assert lo <= eta < hi
        egg, _ = UP.gauss_green_h0_energy(lam, 14)
        assert abs(egg - eta) / eta <= 1e-6
    ok("5b eta(lambda) in [1.116924, 2) x (15/7)^m1 on a 20-point grid; Gauss-Green E(h_0) = eta to 1e-6")


def test_5c_haar_orthogonality():
    for lam in (UP.TriadicLambda(1), lam_mixed_program()):
        funcs = [("h0", None)]
        pool = [""]
        words = [""]
        for _ in range(2):
            nxt = []
            for w in pool:
                cur = lam
                for ch in w:
                    cur = cur.shift()
                for d in UP.level_alphabet(cur):
                    nxt.append(w + G.WORD_CHARS[d])
            words += nxt
            pool = nxt
        for w in words:
            cur = lam
            for ch in w:
                cur = cur.shift()
            for j in (1,) if cur.iota1 == 1 else (1, 2):
                funcs.append((w, j))
        datas = {}
        for key in funcs:
            if key == ("h0", None):
                datas[key] = (1.0, UP.constant_upper(lam, 0.0))
            else:
                datas[key] = (0.0, UP.haar_data(lam, key[0], key[1]))
        selfe = {k: UP.domain_energy_upper(lam, a, d) for k, (a, d) in datas.items()}
        worst = 0.0
        for k1, k2 in itertools.combinations(funcs, 2):
            a1, d1 = datas[k1]
            a2, d2 = datas[k2]
            cross = UP.domain_energy_upper(lam, a1, d1, a2, d2)
            worst = max(worst, abs(cross) / math.sqrt(selfe[k1] * selfe[k2]))
        assert worst <= 1e-8
    ok("5c Haar/h_0 energy orthogonality <= 1e-8 normalized for all pairs |w| <= 2, two lambdas")


# -------------------------------------------------------------------- 6


def test_6_dirichlet_to_neumann():
    rng = random.Random(61)
    for _ in range(10):
        atoms = {
            ("0" * k, 1): F(rng.randrange(-5, 6), rng.randrange(1, 4))
            for k in range(rng.randrange(1, 9))
        }
        f = HD.HalfBoundaryData(2, q1=F(rng.randrange(-3, 4)), atoms=atoms,
                                default=F(0), q0=F(0))
        res = HD.dirichlet_to_neumann_sg(f, 40)
        assert abs(res.partial_sums[-1] - res.limit) <= F(1, 10 ** 10)
    ok("6a partial derivative sums reach (9/4) int f - (3/4) f(q0) - (3/2) f(q1) within 1e-10 at K=40")

    rng = random.Random(62)
    for _ in range(6):
        etas = [F(rng.randrange(-4, 5), rng.randrange(1, 4))
                for _ in range(rng.randrange(1, 6))]
        f = HD.neumann_inverse_sg(etas)
        nd_q1, terms = HD.forward_derivatives_sg(f, len(etas) + 3)
        assert nd_q1 == etas[0]
        for k, t in enumerate(terms):
            assert t == (etas[k + 1] if k + 1 < len(etas) else 0)
    ok("6b neumann_inverse followed by the forward map is the identity on finitely-supported data (exact)")
