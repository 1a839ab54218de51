import random
from fractions import Fraction

import numpy as np
import pytest

from gasketbvp import geometry as G
from gasketbvp import harmonic as H
from gasketbvp.errors import CapabilityError, ContractViolation

F = Fraction


def pt(l, *corners):
    """Integer point at scale l given as a sum of corner coordinates."""
    return tuple(sum(G.CORNERS_INT[c][t] for c in corners) for t in range(2))


def test_extension_sg3_coefficients():
    ext = H.harmonic_extend_cell(3, (F(1), F(0), F(0)))
    l = 3
    assert ext[pt(l, 0, 0, 1)] == F(8, 15)   # F_0 q_1, third point towards q1
    assert ext[pt(l, 0, 0, 2)] == F(8, 15)
    assert ext[pt(l, 1, 1, 0)] == F(4, 15)   # F_1 q_0
    assert ext[pt(l, 2, 2, 0)] == F(4, 15)
    assert ext[pt(l, 1, 1, 2)] == F(3, 15)   # F_1 q_2
    assert ext[pt(l, 2, 2, 1)] == F(3, 15)
    assert ext[pt(l, 0, 1, 2)] == F(1, 3)    # centre
    assert len(ext) == 10


def test_extension_constant():
    for l in (2, 3):
        ext = H.harmonic_extend_cell(l, (F(5), F(5), F(5)))
        assert set(ext.values()) == {F(5)}


def test_extension_sg2():
    ext = H.harmonic_extend_cell(2, (F(1), F(0), F(0)))
    assert ext[pt(2, 0, 1)] == F(2, 5)
    assert ext[pt(2, 0, 2)] == F(2, 5)
    assert ext[pt(2, 1, 2)] == F(1, 5)


def test_extension_unsupported_level():
    with pytest.raises(CapabilityError):
        H.harmonic_extend_cell(4, (1, 0, 0))


def test_extension_matches_gamma1_solve():
    # the closed forms agree with the exact energy-minimising solve
    for l in (2, 3):
        p = G.gasket(l)
        vals = G._gamma1_harmonic_values(p, (F(1), F(0), F(0)))
        assert vals == H.harmonic_extend_cell(l, (F(1), F(0), F(0)))


def graph_fn(graph, fn):
    return H.GraphFunction(graph, [fn(graph.point(i)) for i in range(graph.n_vertices())])


def test_graph_energy_examples():
    g0 = G.build_graph(G.gasket(3), 0)
    ha = {G.Q0: F(0), G.Q1: F(1), G.Q2: F(-1)}
    f0 = graph_fn(g0, lambda p: ha[p])
    assert H.graph_energy(f0) == 6
    # harmonic extension preserves the energy at the next level
    g1 = G.build_graph(G.gasket(3), 1)
    f1 = graph_fn(g1, lambda p: H.harmonic_value_in_cell(3, (F(0), F(1), F(-1)), p))
    assert H.graph_energy(f1) == 6
    const = H.GraphFunction(g1, [F(3)] * g1.n_vertices())
    assert H.graph_energy(const) == 0


def test_graph_energy_level_mismatch():
    g0 = G.build_graph(G.gasket(3), 0)
    g1 = G.build_graph(G.gasket(3), 1)
    with pytest.raises(H.LevelMismatchError):
        H.graph_energy(
            H.GraphFunction(g0, [1, 2, 3]),
            H.GraphFunction(g1, [0] * g1.n_vertices()),
        )


def test_energy_monotone_under_restriction():
    # for g on V_{m+1}: E_m(g|V_m) <= E_{m+1}(g), equality iff g extends
    # its restriction harmonically
    rng = random.Random(3)
    for l in (2, 3):
        p = G.gasket(l)
        g0 = G.build_graph(p, 0)
        g1 = G.build_graph(p, 1)
        corner_vals = (F(rng.randrange(-5, 6)), F(rng.randrange(-5, 6)), F(1))
        harm = graph_fn(
            g1, lambda q: H.harmonic_value_in_cell(l, corner_vals, q)
        )
        f0 = graph_fn(g0, lambda q: H.harmonic_value_in_cell(l, corner_vals, q))
        assert H.graph_energy(harm) == H.graph_energy(f0)
        bumped = list(harm.values)
        for i in range(g1.n_vertices()):
            if tuple(map(int, g1.verts[i])) not in [
                (x * l, y * l) for x, y in G.CORNERS_INT
            ]:
                bumped[i] += F(1, 2)
                break
        assert H.graph_energy(H.GraphFunction(g1, bumped)) > H.graph_energy(f0)


def test_maximum_principle():
    rng = random.Random(5)
    for l in (2, 3):
        for _ in range(10):
            vals = tuple(F(rng.randrange(-10, 11), rng.randrange(1, 5)) for _ in range(3))
            ext = H.cell_extension(l, vals)
            assert min(vals) <= min(ext.values())
            assert max(ext.values()) <= max(vals)


def test_normal_derivative_examples():
    # antisymmetric SG_3 data (0,1,-1) at q1: (15/7) * (2 - 1/3 - 4/15) = 3
    nd = H.harmonic_normal_derivative(3, (F(0), F(1), F(-1)), 1)
    assert nd == 3
    nd2 = H.harmonic_normal_derivative(2, (F(1), F(0), F(0)), 0)
    assert nd2 == 2
    assert H.harmonic_normal_derivative(3, (F(4), F(4), F(4)), 0) == 0
    # localized to a depth-2 cell the value scales by r^-2
    nd_deep = H.harmonic_normal_derivative(3, (F(0), F(1), F(-1)), 1, depth=2)
    assert nd_deep == 3 * F(15, 7) ** 2


def test_normal_derivative_equals_level0_laplacian():
    # for harmonic h the one-subdivision formula reduces to 2h(q_i)-h(q_j)-h(q_k)
    rng = random.Random(9)
    for l in (2, 3):
        for _ in range(5):
            vals = tuple(F(rng.randrange(-9, 10)) for _ in range(3))
            for c in range(3):
                nd = H.harmonic_normal_derivative(l, vals, c)
                o = [j for j in range(3) if j != c]
                assert nd == 2 * vals[c] - vals[o[0]] - vals[o[1]]


def test_normal_derivatives_sum_to_zero():
    rng = random.Random(13)
    for l in (2, 3):
        vals = tuple(F(rng.randrange(-9, 10)) for _ in range(3))
        total = sum(H.harmonic_normal_derivative(l, vals, c) for c in range(3))
        assert total == 0


def test_normal_derivative_rejects_non_harmonic():
    ext = H.cell_extension(3, (F(1), F(0), F(0)))
    bad = dict(ext)
    key = next(iter(k for k in bad if bad[k] not in (F(1), F(0))))
    bad[key] += F(1, 7)
    with pytest.raises(ContractViolation):
        H.normal_derivative(3, bad, 0)
    # float mode tolerates rounding-size residuals only
    fl = {k: float(v) for k, v in ext.items()}
    H.normal_derivative(3, fl, 0)
    fl[key] += 1e-5
    with pytest.raises(ContractViolation):
        H.normal_derivative(3, fl, 0)


def test_verify_matching():
    g = G.build_graph(G.gasket(2), 1)
    const = H.GraphFunction(g, [F(2)] * g.n_vertices())
    harm = graph_fn(g, lambda p: H.harmonic_value_in_cell(2, (F(3), F(0), F(1)), p))
    mid = g.vertex_id(((G.Q0[0] + G.Q1[0]) / 2, (G.Q0[1] + G.Q1[1]) / 2))
    assert H.verify_matching(const, mid) == 0
    assert H.verify_matching(harm, mid) == 0
    indicator = [F(0)] * g.n_vertices()
    indicator[mid] = F(1)
    assert H.verify_matching(H.GraphFunction(g, indicator), mid) == 4
    with pytest.raises(ContractViolation):
        corner = g.vertex_id(G.Q1)
        H.verify_matching(const, corner)
