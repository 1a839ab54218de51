"""Single-cell harmonic extension, graph energies and normal derivatives.

Closed-form extension rules exist for SG (the 2/5-1/5 rule) and SG_3
(the 8-4-3 / 15 rule with mean value at the centre); higher levels are
served internally by an exact level-1 Dirichlet solve but are not part
of the public extension API.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import geometry
from .errors import CapabilityError, ContractViolation, LevelMismatchError
from .geometry import CORNERS_INT, gasket

MATCHING_RTOL = 1e-10


def _is_exact(*vals):
    return all(isinstance(v, (Fraction, int)) for v in vals)


def _corner_point_int(level, corner):
    x, y = CORNERS_INT[corner]
    return (x * level, y * level)


def _extension_basis(level):
    """Weights of the energy-minimising extension: maps each level-1 point
    (integer coords at scale l) to the coefficient triple on (v0, v1, v2)."""
    params = gasket(level)
    if level in (2, 3):
        basis = {}
        for c in range(3):
            basis[_corner_point_int(level, c)] = tuple(
                Fraction(1) if j == c else Fraction(0) for j in range(3)
            )
        if level == 2:
            # midpoint of (q_i, q_j): (2 v_i + 2 v_j + v_k) / 5
            for i in range(3):
                for j in range(i + 1, 3):
                    k = 3 - i - j
                    pt = tuple(CORNERS_INT[i][t] + CORNERS_INT[j][t] for t in range(2))
                    w = [Fraction(0)] * 3
                    w[i] = w[j] = Fraction(2, 5)
                    w[k] = Fraction(1, 5)
                    basis[pt] = tuple(w)
        else:
            # third-point towards q_j from q_i: (8 v_i + 4 v_j + 3 v_k) / 15
            for i in range(3):
                for j in range(3):
                    if i == j:
                        continue
                    k = 3 - i - j
                    pt = tuple(2 * CORNERS_INT[i][t] + CORNERS_INT[j][t] for t in range(2))
                    w = [Fraction(0)] * 3
                    w[i] = Fraction(8, 15)
                    w[j] = Fraction(4, 15)
                    w[k] = Fraction(3, 15)
                    basis[pt] = tuple(w)
            centre = tuple(sum(CORNERS_INT[c][t] for c in range(3)) for t in range(2))
            basis[centre] = (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))
        return basis
    basis = {}
    for c in range(3):
        unit = tuple(Fraction(1) if j == c else Fraction(0) for j in range(3))
        vals = geometry._gamma1_harmonic_values(params, unit)
        for pt, v in vals.items():
            basis.setdefault(pt, [None, None, None])[c] = v
    return {pt: tuple(w) for pt, w in basis.items()}


_BASIS_CACHE = {}


def extension_basis(level):
    if level not in _BASIS_CACHE:
        _BASIS_CACHE[level] = _extension_basis(level)
    return _BASIS_CACHE[level]


def cell_extension(level, values):
    """Extension of cell-corner values (v0, v1, v2) to the cell's V_1 points,
    keyed by integer coordinates at scale l. Internal: accepts any level."""
    basis = extension_basis(level)
    v0, v1, v2 = values
    return {pt: w[0] * v0 + w[1] * v1 + w[2] * v2 for pt, w in basis.items()}


def harmonic_extend_cell(level, values):
    """Energy-minimising extension of (v0, v1, v2) at a cell's corners.

    Only the closed-form levels l in {2, 3} are supported here; the
    result maps every V_1 point of the cell (corners included, keyed by
    integer coordinates at scale l) to its value.
    """
    if level not in (2, 3):
        raise CapabilityError(f"closed-form extension registered for l in {{2,3}}, got {level}")
    return cell_extension(level, values)


def _cell_graph_structure(level):
    """Adjacency of Gamma_1 inside one cell, on integer scale-l points."""
    g = geometry.build_graph(gasket(level), 1)
    pts = [tuple(map(int, v)) for v in g.verts]
    nbrs = {p: [] for p in pts}
    for i, j in g.edges:
        nbrs[pts[i]].append(pts[j])
        nbrs[pts[j]].append(pts[i])
    corners = {_corner_point_int(level, c) for c in range(3)}
    return nbrs, corners


_CELL_GRAPH_CACHE = {}


def _cell_graph(level):
    if level not in _CELL_GRAPH_CACHE:
        _CELL_GRAPH_CACHE[level] = _cell_graph_structure(level)
    return _CELL_GRAPH_CACHE[level]


def check_cell_harmonic(level, v1_values):
    """Verify the matching (mean value) equations at the interior V_1 points
    of a cell; exact in rational mode, MATCHING_RTOL-tolerant in float mode."""
    nbrs, corners = _cell_graph(level)
    exact = _is_exact(*v1_values.values())
    scale = max((abs(v) for v in v1_values.values()), default=1)
    tol = 0 if exact else MATCHING_RTOL * max(1.0, float(scale))
    for pt, nb in nbrs.items():
        if pt in corners:
            continue
        res = len(nb) * v1_values[pt] - sum(v1_values[q] for q in nb)
        if abs(res) > tol:
            raise ContractViolation(
                f"values are not harmonic in the cell: residual {res} at {pt}"
            )


def normal_derivative(level, v1_values, corner, depth=0, check=True):
    """Normal derivative at a cell corner from one subdivision of the cell.

    v1_values maps the cell's V_1 integer points (scale l) to values of a
    function harmonic inside the cell; for harmonic input the single
    subdivision already equals the limit.  `depth` is the cell's own level
    in the gasket, contributing the r^(-depth) renormalisation.
    """
    if check:
        check_cell_harmonic(level, v1_values)
    r = gasket(level).renorm_factor
    if not _is_exact(*v1_values.values()):
        r = float(r)
    qi = _corner_point_int(level, corner)
    others = [j for j in range(3) if j != corner]
    t = gasket(level).int_translations[corner]
    n1 = (CORNERS_INT[others[0]][0] + int(t[0]), CORNERS_INT[others[0]][1] + int(t[1]))
    n2 = (CORNERS_INT[others[1]][0] + int(t[0]), CORNERS_INT[others[1]][1] + int(t[1]))
    base = 2 * v1_values[qi] - v1_values[n1] - v1_values[n2]
    return base / r ** (depth + 1)


def harmonic_normal_derivative(level, corner_values, corner, depth=0):
    """Normal derivative of the harmonic function with given cell-corner
    values; extension is done internally so no harmonicity check is needed."""
    ext = cell_extension(level, corner_values)
    return normal_derivative(level, ext, corner, depth, check=False)


def harmonic_value_in_cell(level, corner_values, p):
    """Value at an exact point p (a vertex of some V_m) of the harmonic
    function on the unit cell with the given corner values."""
    params = gasket(level)
    vals = tuple(corner_values)
    point = (Fraction(p[0]), Fraction(p[1]))
    for _ in range(geometry.MAX_GRAPH_LEVEL + 2):
        for c in range(3):
            if point == geometry.CORNERS[c]:
                return vals[c]
        cells = geometry.cells_containing(params, point)
        if not cells:
            raise ContractViolation(f"{p} is outside the cell")
        i = cells[0]
        ext = cell_extension(level, vals)
        s = params.level
        tr = params.int_translations[i]
        vals = tuple(
            ext[(CORNERS_INT[c][0] + int(tr[0]), CORNERS_INT[c][1] + int(tr[1]))]
            for c in range(3)
        )
        point = params.unapply_map(i, point)
    raise ContractViolation(f"{p} is not a vertex address within the descent cap")


# ---------------------------------------------------------------------------
# graph functions


@dataclass
class GraphFunction:
    """A total assignment of values to the vertices of a level-m graph."""

    graph: geometry.Graph
    values: object  # sequence indexed by vertex id

    def __post_init__(self):
        if len(self.values) != self.graph.n_vertices():
            raise LevelMismatchError("values do not cover the graph's vertex set")

    def __getitem__(self, i):
        return self.values[i]


def graph_energy(f, g=None):
    """Discrete resistance form r^(-m) * sum over edges of df * dg."""
    if g is None:
        g = f
    if g.graph is not f.graph and (
        g.graph.m != f.graph.m or g.graph.params.level != f.graph.params.level
    ):
        raise LevelMismatchError("graph energy requires functions on the same level")
    graph = f.graph
    fv, gv = f.values, g.values
    exact = _is_exact(fv[0], gv[0])
    if isinstance(fv, np.ndarray) and fv.dtype != object and isinstance(gv, np.ndarray):
        d1 = fv[graph.edges[:, 0]] - fv[graph.edges[:, 1]]
        d2 = gv[graph.edges[:, 0]] - gv[graph.edges[:, 1]]
        total = float(np.dot(d1, d2))
    else:
        total = sum(
            (fv[i] - fv[j]) * (gv[i] - gv[j]) for i, j in graph.edges
        )
    r = graph.params.renorm_factor
    if not exact:
        r = float(r)
    return total / r ** graph.m


def verify_matching(f, vertex):
    """Mean-value residual sum_{y ~ x} (f(x) - f(y)); zero iff graph-harmonic."""
    graph = f.graph
    if isinstance(vertex, geometry.VertexAddress):
        vertex = graph.vertex_id(geometry.resolve(graph.params, vertex))
    p = graph.point(vertex)
    if p in geometry.CORNERS:
        raise ContractViolation("matching condition is not defined at V_0 corners")
    nbrs = graph.neighbors(vertex)
    return len(nbrs) * f[vertex] - sum(f[int(j)] for j in nbrs)


def triangle_energy(a, b=None):
    """Sum over the three corner pairs of a cell of df * dg (no renorm)."""
    if b is None:
        b = a
    return (
        (a[0] - a[1]) * (b[0] - b[1])
        + (a[0] - a[2]) * (b[0] - b[2])
        + (a[1] - a[2]) * (b[1] - b[2])
    )
