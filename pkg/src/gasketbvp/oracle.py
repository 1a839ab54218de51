"""Brute-force Dirichlet solver on approximating graphs.

Given boundary vertices and values, solves the mean-value equations
deg(x) u(x) = sum of neighbour values as a sparse linear system.  This is
the independent ground truth for every closed-form extension algorithm in
the package: conjugate gradient with Jacobi preconditioning in float mode,
exact Fraction elimination in rational mode.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
import scipy.sparse.linalg as spla

from . import geometry
from ._exact import solve_dense
from .errors import SolvabilityError

CG_TOL = 1e-12
CG_MAXITER_PER_UNKNOWN = 20


@dataclass
class DirichletProblem:
    """Boundary set B with values g on a level-m graph; solvable iff every
    connected component of the graph touches B."""

    graph: geometry.Graph
    boundary_ids: np.ndarray
    boundary_values: object  # sequence aligned with boundary_ids

    def __post_init__(self):
        self.boundary_ids = np.asarray(self.boundary_ids, dtype=np.int64)
        if len(self.boundary_ids) == 0:
            raise SolvabilityError("boundary set must be nonempty")
        if len(self.boundary_ids) != len(self.boundary_values):
            raise SolvabilityError("boundary values must align with boundary ids")


def _adjacency(graph):
    n = graph.n_vertices()
    e = graph.edges
    data = np.ones(2 * len(e))
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def _check_solvable(graph, bmask):
    adj = _adjacency(graph)
    ncomp, labels = csgraph.connected_components(adj, directed=False)
    touched = np.zeros(ncomp, dtype=bool)
    touched[labels[bmask]] = True
    if not touched.all():
        raise SolvabilityError("an interior component does not touch the boundary")
    return adj


def solve(problem, mode="auto"):
    """Solve the graph Dirichlet problem; returns values for all vertices.

    mode: "rational" for exact Fraction elimination, "float" for a sparse
    direct factorization, "cg" for Jacobi-preconditioned conjugate
    gradient, "auto" picks rational when the boundary values are
    Fractions/ints.  (CG converges but its iteration count grows with the
    resistance scaling r^-m, so the direct solve is the float default;
    see the decisions ledger.)
    """
    graph = problem.graph
    n = graph.n_vertices()
    bmask = np.zeros(n, dtype=bool)
    bmask[problem.boundary_ids] = True
    adj = _check_solvable(graph, bmask)
    if mode == "auto":
        exact = all(isinstance(v, (Fraction, int)) for v in problem.boundary_values)
        mode = "rational" if exact else "float"
    if mode == "rational":
        return _solve_rational(graph, bmask, problem)
    return _solve_float(graph, adj, bmask, problem, use_cg=(mode == "cg"))


def _solve_float(graph, adj, bmask, problem, use_cg=False):
    n = graph.n_vertices()
    g = np.zeros(n)
    g[problem.boundary_ids] = np.asarray(
        [float(v) for v in problem.boundary_values]
    )
    interior = np.flatnonzero(~bmask)
    if len(interior) == 0:
        return g
    deg = np.asarray(adj.sum(axis=1)).ravel()
    a_ii = sp.diags(deg[interior]) - adj[interior][:, interior]
    b = adj[interior][:, bmask] @ g[bmask]
    if use_cg:
        a_ii = a_ii.tocsr()
        m_inv = sp.diags(1.0 / a_ii.diagonal())
        maxiter = CG_MAXITER_PER_UNKNOWN * len(interior)
        x, info = spla.cg(a_ii, b, rtol=CG_TOL, atol=0.0, M=m_inv, maxiter=maxiter)
        if info != 0:
            raise SolvabilityError(f"CG did not converge (info={info})")
    else:
        x = spla.splu(a_ii.tocsc()).solve(b)
    out = g.copy()
    out[interior] = x
    return out


def _solve_rational(graph, bmask, problem):
    # sparse exact elimination with min-degree pivoting; gasket graphs have
    # tiny treewidth so fill-in stays negligible
    n = graph.n_vertices()
    values = [None] * n
    for i, v in zip(problem.boundary_ids, problem.boundary_values):
        values[int(i)] = Fraction(v)
    rows = {}
    rhs = {}
    for i in range(n):
        if bmask[i]:
            continue
        nbrs = graph.neighbors(i)
        row = {i: Fraction(len(nbrs))}
        b = Fraction(0)
        for j in nbrs:
            j = int(j)
            if bmask[j]:
                b += values[j]
            else:
                row[j] = row.get(j, Fraction(0)) - 1
        rows[i] = row
        rhs[i] = b
    if len(rows) > 5000:
        raise SolvabilityError("rational mode capped at 5000 unknowns")
    order = []
    heap = [(len(row) - 1, i) for i, row in rows.items()]
    heapq.heapify(heap)
    while heap:
        deg, i = heapq.heappop(heap)
        if i not in rows:
            continue
        if deg != len(rows[i]) - 1:
            heapq.heappush(heap, (len(rows[i]) - 1, i))
            continue
        row = rows.pop(i)
        b = rhs.pop(i)
        piv = row.pop(i)
        order.append((i, row, b, piv))
        for j in list(row):
            rj = rows[j]
            f = rj.pop(i, None)
            if f is None:
                continue
            f /= piv
            for k, v in row.items():
                rj[k] = rj.get(k, Fraction(0)) - f * v
            rhs[j] -= f * b
            heapq.heappush(heap, (len(rj) - 1, j))
    for i, row, b, piv in reversed(order):
        s = b
        for k, v in row.items():
            s -= v * values[k]
        if piv == 0:
            raise SolvabilityError("singular system in exact elimination")
        values[i] = s / piv
    return values


def matching_residuals(graph, values, bmask):
    """Max mean-value residual over interior vertices (diagnostic)."""
    worst = 0
    for i in range(graph.n_vertices()):
        if bmask[i]:
            continue
        nbrs = graph.neighbors(i)
        res = len(nbrs) * values[i] - sum(values[int(j)] for j in nbrs)
        worst = max(worst, abs(res))
    return worst


# ---------------------------------------------------------------------------
# domain-restricted problems


@dataclass
class DomainSkeleton:
    """Vertex set of the level-m cells contained in a domain closure, with
    the classified boundary subset (the discrete counterpart of O_m/A_m)."""

    domain: object
    graph: geometry.Graph
    boundary_ids: np.ndarray
    boundary_kinds: tuple  # CANTOR / CORNER per boundary id

    def problem(self, boundary_value_fn):
        vals = [boundary_value_fn(self.graph.point(int(i))) for i in self.boundary_ids]
        return DirichletProblem(self.graph, self.boundary_ids, vals)


def domain_restricted_graph(domain, m):
    """Assemble the truncated Dirichlet skeleton of a domain at level m."""
    if m < 1:
        raise geometry.ResolutionError("domain restriction needs m >= 1")
    graph = geometry.domain_graph(domain, m)
    s = graph.scale
    xs, ys = graph.verts[:, 0], graph.verts[:, 1]
    if isinstance(domain, geometry.HalfDomain):
        cantor = xs == s
        corner = (xs == 0) & (ys == 0)
    else:
        num, den = domain.cut_y.numerator, domain.cut_y.denominator
        cantor = ys * den == num * s
        if isinstance(domain, geometry.UpperDomain):
            corner = (xs == s) & (ys == 2 * s)
            cantor &= ~corner
        else:
            corner = ((xs == 0) | (xs == 2 * s)) & (ys == 0)
            cantor &= ~corner
    bids = np.flatnonzero(cantor | corner)
    kinds = tuple(
        geometry.CORNER if corner[i] else geometry.CANTOR for i in bids
    )
    return DomainSkeleton(domain, graph, bids, kinds)


def solve_full_gasket(params, m, corner_values, mode="auto"):
    """Oracle with B = V_0 on the full gasket; cross-checks the extension."""
    graph = geometry.build_graph(params, m)
    s = graph.scale
    ids = [
        graph.vertex_id((Fraction(x), Fraction(y)))
        for (x, y) in geometry.CORNERS_INT
    ]
    problem = DirichletProblem(graph, np.array(ids), list(corner_values))
    return graph, solve(problem, mode=mode)


# ---------------------------------------------------------------------------
# CSV interface (matches the geometry export format)


def write_values_csv(graph, values, path):
    with open(path, "w") as fh:
        fh.write("vertex_id,value\n")
        for i in range(graph.n_vertices()):
            fh.write(f"{i},{values[i]}\n")


def read_values_csv(path):
    out = {}
    with open(path) as fh:
        header = fh.readline()
        assert header.strip() == "vertex_id,value"
        for line in fh:
            vid, val = line.strip().split(",")
            try:
                out[int(vid)] = Fraction(val)
            except ValueError:
                out[int(vid)] = float(val)
    return out
