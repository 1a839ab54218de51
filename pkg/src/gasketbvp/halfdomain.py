"""Dirichlet machinery for the left half domain of SG_l.

The half domain is cut by the vertical symmetry line; its boundary is the
bottom-left corner q1 together with the Cantor set X on the line.  The
purely atomic boundary measure, the normal derivative at q1, the explicit
extension step, the recursive evaluator, the boundary energy form Q and
the SG Dirichlet-to-Neumann correspondence all live here.

Atoms are addressed by words over the half-domain digit alphabet (the
cells meeting the line in a Cantor piece: {0} for SG, {0,3} for SG_3,
{0,6} for SG_4, ...) plus a height index j for l >= 4 where each cylinder
carries several atoms.
"""

from __future__ import annotations

import warnings
from collections import namedtuple
from fractions import Fraction

from . import geometry, harmonic
from ._exact import solve_dense
from .errors import AddressError, ContractViolation, ResolutionError
from .geometry import CORNERS_INT, Q0, Q1, gasket

F = Fraction

Integral = namedtuple("Integral", ["value", "tail_bound"])

_MAX_RECURSION = 64


# ---------------------------------------------------------------------------
# per-level structure


class HalfStructure:
    """Digit alphabet, measure weights and atom layout of one half domain."""

    def __init__(self, level):
        params = gasket(level)
        self.level = level
        self.params = params
        self.alphabet = params.half_alphabet          # map indices, top to bottom
        self.atom_count = len(params.atom_cells)      # floor(l/2)
        self.r = params.renorm_factor
        ha = geometry._gamma1_harmonic_values(params, (F(0), F(1), F(-1)))
        self.ha_gamma1 = ha
        # digit weights mu_i = r^{-1} h_a(F_i q_1)
        self.weights = {}
        for i in self.alphabet:
            pt = self._map_point(i, 1)
            self.weights[i] = ha[pt] / self.r
        # atom base masses -(1/3) * right normal derivative of h_a at p_{j,<>}
        self.atom_points = []
        self.atom_base = []
        for j, cell in enumerate(params.atom_cells):
            vals = tuple(ha[self._map_point(cell, c)] for c in range(3))
            nd = harmonic.harmonic_normal_derivative(level, vals, 2, depth=1)
            self.atom_base.append(-nd / 3)
            self.atom_points.append(geometry.apply_word(params, (cell,), geometry.CORNERS[2]))
        total_weight = sum(self.weights.values())
        self.mass_consistent = sum(self.atom_base) == 1 - total_weight
        if not self.mass_consistent:
            warnings.warn(
                f"half-domain measure for l={level} does not sum to 1 exactly",
                stacklevel=2,
            )
        # embedding of each depth-0 atom into deeper cylinders: the digit
        # chain to follow (ends at q0 -> infinite 0-tail, or is finite when
        # the atom sits isolated between cylinders)
        self.atom_embed = []
        for p in self.atom_points:
            chain, terminal_q0 = self._embed_chain(p)
            self.atom_embed.append((chain, terminal_q0))
        # q0-corner of each cylinder cell: f(F_i q_0) for the data shift
        self.cylinder_top = {}
        for i in self.alphabet:
            top = geometry.apply_word(params, (i,), Q0)
            if top == Q0:
                self.cylinder_top[i] = None  # the copy inherits f(q0)
            else:
                self.cylinder_top[i] = self.atom_points.index(top)
        self.digit_chars = {i: geometry.WORD_CHARS[i] for i in self.alphabet}

    def _map_point(self, cell, corner):
        tr = self.params.int_translations[cell]
        return (CORNERS_INT[corner][0] + int(tr[0]), CORNERS_INT[corner][1] + int(tr[1]))

    def _embed_chain(self, p):
        chain = []
        for _ in range(_MAX_RECURSION):
            cells = [
                i for i in geometry.cells_containing(self.params, p) if i in self.alphabet
            ]
            if not cells:
                return "".join(geometry.WORD_CHARS[i] for i in chain), False
            i = cells[0]
            chain.append(i)
            p = self.params.unapply_map(i, p)
            if p == Q0:
                return "".join(geometry.WORD_CHARS[i] for i in chain), True
        raise ResolutionError("atom embedding chain did not terminate")

    def word_digits(self, word):
        digits = geometry.word_from_str(word)
        for d in digits:
            if d not in self.alphabet:
                raise AddressError(f"digit {d} not in half-domain alphabet of l={self.level}")
        return digits

    def word_weight(self, word):
        w = F(1)
        for d in self.word_digits(word):
            w *= self.weights[d]
        return w

    def covers(self, cyl, word, j):
        """Does cylinder F_cyl X contain the atom p_{j, word}?"""
        if len(cyl) <= len(word):
            return word.startswith(cyl)
        if not cyl.startswith(word):
            return False
        rest = cyl[len(word):]
        chain, terminal = self.atom_embed[j - 1]
        if rest.startswith(chain):
            tail = rest[len(chain):]
            zero = geometry.WORD_CHARS[self.alphabet[0]]
            return terminal and all(ch == zero for ch in tail)
        return chain.startswith(rest)


_STRUCTURES = {}


def structure(level):
    if level not in _STRUCTURES:
        _STRUCTURES[level] = HalfStructure(level)
    return _STRUCTURES[level]


def antisymmetric_values(level):
    """Values of the antisymmetric harmonic function h_a (V_0 data (0,1,-1))
    at the V_1 points of the closed half domain, keyed by exact points."""
    st = structure(level)
    out = {}
    half = geometry.HalfDomain(level)
    for pt, v in st.ha_gamma1.items():
        p = (F(pt[0], level), F(pt[1], level))
        if geometry.classify_boundary(half, p) != geometry.OUTSIDE:
            out[p] = v
    return out


def crucial_points(level):
    """Named V_1 points of the half domain (x, y, z and the first atom p)."""
    params = gasket(level)
    if level == 3:
        return {
            "x": geometry.apply_word(params, (1,), geometry.CORNERS[2]),
            "y": geometry.apply_word(params, (1,), Q0),
            "z": geometry.apply_word(params, (0,), Q1),
            "p": geometry.apply_word(params, (3,), Q0),
        }
    if level == 2:
        return {
            "z": geometry.apply_word(params, (0,), Q1),
            "p": geometry.apply_word(params, (1,), geometry.CORNERS[2]),
        }
    raise ResolutionError("named crucial points are defined for l in {2,3}")


def atom_point(level, word, j=1):
    st = structure(level)
    return geometry.apply_word(st.params, st.word_digits(word), st.atom_points[j - 1])


def atom_mass(level, word, j=1):
    """mu({p_{j,w}}): the base atom mass scaled by the digit weights."""
    st = structure(level)
    return st.atom_base[j - 1] * st.word_weight(word)


def residual_mass(level, depth):
    """Exact measure of all atoms with |w| >= depth ((5/7)^d for SG_3)."""
    st = structure(level)
    return sum(st.weights.values()) ** depth


# ---------------------------------------------------------------------------
# boundary data


class HalfBoundaryData:
    """Boundary data for the half domain: value at q1 plus values at the
    countable atom set {p_{j,w}} of X.

    Structured mode combines explicit `atoms` {(word, j): v}, piecewise
    constants `cylinders` {word: v} (constant on F_w X), an optional
    `geometric_tail` (A, B, rho, start) for SG meaning f(p_k) = A + B rho^k
    for k >= start, and a `default` fallback.  Alternatively a total
    callback `fn(word, j)` may be given (exclusively).
    """

    def __init__(self, level=3, q1=0, atoms=None, cylinders=None, default=None,
                 q0=None, fn=None, sup_bound=None, geometric_tail=None):
        self.level = level
        self.st = structure(level)
        self.q1 = q1
        self.q0 = q0
        self.fn = fn
        self.default = default
        self.sup_bound = sup_bound
        self.geometric_tail = geometric_tail
        self.atoms = {}
        for key, v in (atoms or {}).items():
            if isinstance(key, tuple):
                word, j = key
            else:
                word, j = key, 1
            self.st.word_digits(word)
            if not (1 <= j <= self.st.atom_count):
                raise AddressError(f"atom index {j} out of range")
            self.atoms[(word, j)] = v
        self.cylinders = dict(cylinders or {})
        for w in self.cylinders:
            self.st.word_digits(w)
        if fn is not None and (self.atoms or self.cylinders or default is not None):
            raise ContractViolation("callback data must not be mixed with structured data")
        if geometric_tail is not None and level != 2:
            raise ContractViolation("geometric tails are specific to the SG half domain")

    # -- resolution ---------------------------------------------------------

    def atom(self, word, j=1):
        key = (word, j)
        if key in self.atoms:
            return self.atoms[key]
        if self.geometric_tail is not None:
            a, b, rho, start = self.geometric_tail
            k = len(word)
            if k >= start:
                return a + b * rho ** k
        if self.fn is not None:
            return self.fn(word, j)
        best = None
        for cyl in self.cylinders:
            if self.st.covers(cyl, word, j) and (best is None or len(cyl) > len(best)):
                best = cyl
        if best is not None:
            return self.cylinders[best]
        if self.default is not None:
            return self.default
        raise ContractViolation(f"boundary data is not total: atom ({word!r}, {j})")

    def subtree(self, word):
        """('const', v) if f is constant on the cylinder F_word X, or
        ('geom', A, B, rho) for an SG affine-geometric tail, else None."""
        if self.fn is not None:
            return None
        # only atoms of the sub-copy's own measure break constancy; a shorter
        # atom embedded through this cylinder is the copy's accumulation
        # corner and carries no mass
        for (w, j) in self.atoms:
            if w.startswith(word):
                return None
        for cyl in self.cylinders:
            if len(cyl) > len(word) and cyl.startswith(word):
                return None
        if self.geometric_tail is not None:
            a, b, rho, start = self.geometric_tail
            s = len(word)
            if b != 0:
                if s >= start:
                    return ("geom", a, b * rho ** s, rho)
                return None
            if s < start:
                return None  # explicit atoms may still differ below
        best = None
        for cyl in self.cylinders:
            if word.startswith(cyl) and (best is None or len(cyl) > len(best)):
                best = cyl
        if best is not None:
            return ("const", self.cylinders[best])
        if self.geometric_tail is not None and self.geometric_tail[1] == 0:
            return ("const", self.geometric_tail[0])
        if self.default is not None:
            return ("const", self.default)
        raise ContractViolation("boundary data is not total")

    def sup(self):
        if self.sup_bound is not None:
            return self.sup_bound
        if self.fn is not None:
            raise ContractViolation("callback data needs an explicit sup_bound")
        vals = [abs(v) for v in self.atoms.values()]
        vals += [abs(v) for v in self.cylinders.values()]
        if self.default is not None:
            vals.append(abs(self.default))
        if self.geometric_tail is not None:
            a, b, rho, _ = self.geometric_tail
            vals.append(abs(a) + abs(b))
        return max(vals) if vals else 0

    def shifted(self, digit, new_q1):
        """Data of the sub-problem on the copy F_digit(half domain)."""
        st = self.st
        ch = geometry.WORD_CHARS[digit]
        top = st.cylinder_top[digit]
        new_q0 = self.q0 if top is None else self.atom("", top + 1)
        if self.fn is not None:
            fn = self.fn
            return HalfBoundaryData(
                self.level, q1=new_q1, q0=new_q0,
                fn=lambda w, j, _c=ch: fn(_c + w, j),
                sup_bound=self.sup_bound,
            )
        atoms = {
            (w[1:], j): v for (w, j), v in self.atoms.items() if w.startswith(ch)
        }
        cylinders = {
            c[1:]: v for c, v in self.cylinders.items() if c.startswith(ch) and c
        }
        default = self.cylinders.get("", self.default)
        tail = None
        if self.geometric_tail is not None:
            a, b, rho, start = self.geometric_tail
            tail = (a, b * rho, rho, max(start - 1, 0))
        return HalfBoundaryData(
            self.level, q1=new_q1, q0=new_q0, atoms=atoms, cylinders=cylinders,
            default=default, sup_bound=self.sup_bound, geometric_tail=tail,
        )


def constant_data(level, c):
    return HalfBoundaryData(level, q1=c, q0=c, default=c)


# ---------------------------------------------------------------------------
# integration against the boundary measure


DEFAULT_DEPTH = 24


def integrate(f, scale_word="", max_depth=DEFAULT_DEPTH):
    """Integral of f o F_tau against the atomic boundary measure.

    Exact (zero tail bound) whenever the data resolves to piecewise
    constants; otherwise the truncated atom sum with the geometric tail
    bound (sum of weights)^depth * sup|f|.
    """
    st = f.st
    sup = None

    def rec(word, depth):
        nonlocal sup
        sub = f.subtree(word)
        if sub is not None and sub[0] == "const":
            return sub[1], 0
        if sub is not None and sub[0] == "geom":
            _, a, b, rho = sub
            mu = st.weights[st.alphabet[0]]
            base = st.atom_base[0]
            return a + b * base / (1 - rho * mu), 0
        if depth == 0:
            if sup is None:
                sup = f.sup()
            return 0, sup
        total = 0
        bound = 0
        for j in range(1, st.atom_count + 1):
            total += st.atom_base[j - 1] * f.atom(word, j)
        for i in st.alphabet:
            v, tb = rec(word + geometry.WORD_CHARS[i], depth - 1)
            total += st.weights[i] * v
            bound += st.weights[i] * tb
        return total, bound

    st.word_digits(scale_word)
    value, bound = rec(scale_word, max_depth)
    return Integral(value, bound)


def normal_derivative_q1(f):
    """Normal derivative of the solution at q1: 3 f(q1) - 3 * integral."""
    return 3 * f.q1 - 3 * integrate(f).value


# ---------------------------------------------------------------------------
# extension step


def extend_step_sg3(f):
    """Values (u(x), u(y), u(z)) at the three crucial V_1 vertices of the
    SG_3 half domain in terms of the boundary data."""
    if f.level != 3:
        raise ResolutionError("extend_step_sg3 needs SG_3 data")
    i0 = integrate(f, "0").value
    i3 = integrate(f, "3").value
    q1 = f.q1
    p = f.atom("", 1)
    x = F(4, 15) * q1 + F(1, 15) * p + F(1, 30) * i0 + F(19, 30) * i3
    y = F(1, 3) * q1 + F(1, 3) * p + F(1, 6) * i0 + F(1, 6) * i3
    z = F(1, 15) * q1 + F(4, 15) * p + F(19, 30) * i0 + F(1, 30) * i3
    return (x, y, z)


def extend_step_sg(f):
    """u(F_0 q_1) for the SG half domain."""
    if f.level != 2:
        raise ResolutionError("extend_step_sg needs SG data")
    i0 = integrate(f, "0").value
    return F(1, 5) * f.q1 + F(1, 5) * f.atom("", 1) + F(3, 5) * i0


def _contained_cells_level1(level):
    params = gasket(level)
    out = []
    for i in range(params.map_count):
        tr = params.int_translations[i]
        xs = [CORNERS_INT[c][0] + int(tr[0]) for c in range(3)]
        if max(xs) <= level:
            out.append(i)
    return out


def _ipt(p, scale):
    x, y = F(p[0]) * scale, F(p[1]) * scale
    assert x.denominator == 1 and y.denominator == 1
    return (int(x), int(y))


def _ipt_or_none(p, scale):
    x, y = F(p[0]) * scale, F(p[1]) * scale
    if x.denominator != 1 or y.denominator != 1:
        return None
    return (int(x), int(y))


def extend_step(f):
    """Values of the solution at all of V_1 in the open half domain, keyed
    by integer points at scale l.  Closed forms for l in {2,3}; otherwise
    the level-1 matching system is assembled and solved exactly."""
    level = f.level
    if level == 3:
        x, y, z = extend_step_sg3(f)
        cp = crucial_points(3)
        return {
            _ipt(cp["x"], 3): x,
            _ipt(cp["y"], 3): y,
            _ipt(cp["z"], 3): z,
        }
    if level == 2:
        z = extend_step_sg(f)
        return {_ipt(crucial_points(2)["z"], 2): z}
    return _extend_step_system(f)


def _extend_step_system(f):
    st = f.st
    level = f.level
    params = st.params
    cells = _contained_cells_level1(level)
    pts = set()
    cell_corners = {}
    for i in cells:
        tr = params.int_translations[i]
        cs = tuple(
            (CORNERS_INT[c][0] + int(tr[0]), CORNERS_INT[c][1] + int(tr[1]))
            for c in range(3)
        )
        cell_corners[i] = cs
        pts.update(cs)
    boundary = {(0, 0): f.q1}
    for j, p in enumerate(st.atom_points):
        boundary[_ipt(p, level)] = f.atom("", j + 1)
    crucial = {}
    for i in st.alphabet:
        tr = params.int_translations[i]
        crucial[(CORNERS_INT[1][0] + int(tr[0]), CORNERS_INT[1][1] + int(tr[1]))] = i
    unknowns = sorted(p for p in pts if p not in boundary)
    pos = {p: k for k, p in enumerate(unknowns)}
    rows = [[F(0)] * len(unknowns) for _ in unknowns]
    rhs = [F(0)] * len(unknowns)
    for i in cells:
        cs = cell_corners[i]
        for a in range(3):
            for b in range(a + 1, 3):
                for x, y in ((cs[a], cs[b]), (cs[b], cs[a])):
                    if x in pos:
                        rows[pos[x]][pos[x]] += 1
                        if y in pos:
                            rows[pos[x]][pos[y]] -= 1
                        else:
                            rhs[pos[x]] += boundary[y]
    for p, i in crucial.items():
        k = pos[p]
        rows[k][k] += 3
        rhs[k] += 3 * integrate(f, geometry.WORD_CHARS[i]).value
    sol = solve_dense(rows, rhs)
    return {p: sol[pos[p]] for p in unknowns}


# ---------------------------------------------------------------------------
# recursive evaluation


def _atom_word_of_point(st, p):
    """Word and index of the atom at an exact point on the cut line."""
    word = []
    for _ in range(_MAX_RECURSION):
        for j, ap in enumerate(st.atom_points):
            if p == ap:
                return "".join(geometry.WORD_CHARS[d] for d in word), j + 1
        if p == Q0:
            return None, None  # accumulation corner
        cells = [
            i for i in geometry.cells_containing(st.params, p) if i in st.alphabet
        ]
        if not cells:
            raise AddressError(f"{p} is not a vertex on the Cantor boundary")
        word.append(cells[0])
        p = st.params.unapply_map(cells[0], p)
    raise AddressError("cut-line point does not resolve to an atom")


def boundary_value_at(f, p):
    """Value of the boundary data at an exact point of {q1} union X."""
    if p == Q1:
        return f.q1
    word, j = _atom_word_of_point(f.st, p)
    if word is None:
        if f.q0 is None:
            raise ContractViolation("data has no value at the accumulation corner q0")
        return f.q0
    return f.atom(word, j)


def evaluate(f, v):
    """Value at a vertex of the unique harmonic solution with data f.

    v is a VertexAddress or an exact point in the closed half domain.
    """
    st = f.st
    params = st.params
    if isinstance(v, geometry.VertexAddress):
        p = geometry.resolve(params, v)
    else:
        p = (F(v[0]), F(v[1]))
    half = geometry.HalfDomain(f.level)
    if geometry.classify_boundary(half, p) == geometry.OUTSIDE:
        raise ResolutionError(f"{p} is outside the closed half domain")
    contained = _contained_cells_level1(f.level)
    for _ in range(_MAX_RECURSION):
        if p == Q1:
            return f.q1
        if p[0] == 1:
            return boundary_value_at(f, p)
        values = dict(extend_step(f))
        ip = _ipt_or_none(p, f.level)
        if ip is not None and ip in values:
            return values[ip]
        values[(0, 0)] = f.q1
        for j, ap in enumerate(st.atom_points):
            values[_ipt(ap, f.level)] = f.atom("", j + 1)
        routed = False
        for i in contained:
            local = params.unapply_map(i, p)
            if geometry.cells_containing(params, local):
                tr = params.int_translations[i]
                corner_vals = tuple(
                    values[(CORNERS_INT[c][0] + int(tr[0]), CORNERS_INT[c][1] + int(tr[1]))]
                    for c in range(3)
                )
                return harmonic.harmonic_value_in_cell(f.level, corner_vals, local)
        for i in st.alphabet:
            local = params.unapply_map(i, p)
            if geometry.cells_containing(params, local):
                tr = params.int_translations[i]
                q1_local = values[(CORNERS_INT[1][0] + int(tr[0]), CORNERS_INT[1][1] + int(tr[1]))]
                f = f.shifted(i, q1_local)
                p = local
                routed = True
                break
        if not routed:
            raise AddressError(f"{p} could not be routed inside the half domain")
    raise AddressError("vertex is deeper than the recursion cap")


# ---------------------------------------------------------------------------
# boundary energy form and domain energy


def energy_form_Q(f, depth):
    """Partial sum of the boundary energy form Q(f), including squared
    increments from levels |w| < depth to their children."""
    st = f.st
    total = 0
    for j in range(1, st.atom_count + 1):
        total += (f.q1 - f.atom("", j)) ** 2
    rinv = 1 / st.r

    def rec(word, k):
        nonlocal total
        if k >= depth:
            return
        scale = rinv ** len(word)
        for i in st.alphabet:
            child = word + geometry.WORD_CHARS[i]
            for j in range(1, st.atom_count + 1):
                for j2 in range(1, st.atom_count + 1):
                    total += scale * (f.atom(word, j) - f.atom(child, j2)) ** 2
            rec(child, k + 1)

    rec("", 0)
    return total


def _stage_cells(f):
    """Corner-value triples of the level-1 cells of O_1 for the data f."""
    st = f.st
    values = dict(extend_step(f))
    values[(0, 0)] = f.q1
    for j, ap in enumerate(st.atom_points):
        values[_ipt(ap, f.level)] = f.atom("", j + 1)
    out = []
    for i in _contained_cells_level1(f.level):
        tr = st.params.int_translations[i]
        out.append(tuple(
            values[(CORNERS_INT[c][0] + int(tr[0]), CORNERS_INT[c][1] + int(tr[1]))]
            for c in range(3)
        ))
    return out, values


def _crucial_value(st, values, digit):
    tr = st.params.int_translations[digit]
    return values[(CORNERS_INT[1][0] + int(tr[0]), CORNERS_INT[1][1] + int(tr[1]))]


def gauss_green_pairing(f, g, m):
    """E_{O_m}(u_f, u_g): the resistance pairing over the first m stages of
    the cylinder exhaustion of the half domain."""
    st = f.st
    rinv = 1 / st.r

    def rec(fd, gd, k):
        if k >= m:
            return 0
        fc, fvals = _stage_cells(fd)
        gc, gvals = _stage_cells(gd)
        total = rinv * sum(
            harmonic.triangle_energy(a, b) for a, b in zip(fc, gc)
        )
        for i in st.alphabet:
            total += rinv * rec(
                fd.shifted(i, _crucial_value(st, fvals, i)),
                gd.shifted(i, _crucial_value(st, gvals, i)),
                k + 1,
            )
        return total

    return rec(f, g, 0)


def domain_energy(f, g=None):
    """Exact E_Omega(u_f, u_g) for piecewise-constant boundary data, summed
    over cylinder pieces with the constant-data remainder in closed form
    (the solution with data (a at q1, c on X) has energy 3 (a-c)^2)."""
    if g is None:
        g = f
    st = f.st
    rinv = 1 / st.r

    def rec(fd, gd):
        sf = fd.subtree("")
        sg = gd.subtree("")
        if sf is not None and sf[0] == "const" and sg is not None and sg[0] == "const":
            return 3 * (fd.q1 - sf[1]) * (gd.q1 - sg[1])
        if sf is not None and sf[0] == "const":
            return (fd.q1 - sf[1]) * (3 * gd.q1 - 3 * integrate(gd).value)
        if sg is not None and sg[0] == "const":
            return (gd.q1 - sg[1]) * (3 * fd.q1 - 3 * integrate(fd).value)
        fc, fvals = _stage_cells(fd)
        gc, gvals = _stage_cells(gd)
        total = rinv * sum(
            harmonic.triangle_energy(a, b) for a, b in zip(fc, gc)
        )
        for i in st.alphabet:
            total += rinv * rec(
                fd.shifted(i, _crucial_value(st, fvals, i)),
                gd.shifted(i, _crucial_value(st, gvals, i)),
            )
        return total

    return rec(f, g)


# ---------------------------------------------------------------------------
# Dirichlet-to-Neumann correspondence on the SG half domain


DtnResult = namedtuple("DtnResult", ["terms", "partial_sums", "limit", "derivatives"])


def _check_q0_limit(f):
    """The stored q0 value must be the limit of the atom values f(p_k)."""
    if f.geometric_tail is not None:
        a, b, rho, _ = f.geometric_tail
        limit = a if abs(rho) < 1 or b == 0 else None
    else:
        depth = max((len(w) for (w, _) in f.atoms), default=0) + 1
        sub = f.subtree("0" * depth)
        limit = sub[1] if sub is not None and sub[0] == "const" else None
    if limit is None or limit != f.q0:
        raise ContractViolation(
            f"f(q0) = {f.q0} does not match the atom-value limit {limit}"
        )


def dirichlet_to_neumann_sg(f, kmax):
    """Weighted sums of outward normal derivatives at the SG atoms p_k.

    Returns the terms (3/5)^{k+1} d_n u(p_k), their partial sums, the
    closed-form limit (9/4) int f dmu - (3/4) f(q0) - (3/2) f(q1), and the
    raw derivatives.
    """
    if f.level != 2:
        raise ResolutionError("the Dirichlet-to-Neumann map is for the SG half domain")
    if f.q0 is None:
        raise ContractViolation("f must carry its value at the accumulation corner q0")
    if f.fn is not None:
        raise ContractViolation("callback data: continuity at q0 cannot be certified")
    _check_q0_limit(f)
    ints = [integrate(f, "0" * k).value for k in range(kmax + 2)]
    a = [f.q1]
    data = f
    for _ in range(kmax + 1):
        a.append(extend_step_sg(data))
        data = data.shifted(0, a[-1])
    terms = []
    sums = []
    run = 0
    for k in range(kmax + 1):
        t = F(3, 2) * (a[k + 1] - a[k]) + F(9, 4) * (ints[k] - ints[k + 1])
        terms.append(t)
        run = run + t
        sums.append(run)
    limit = F(9, 4) * ints[0] - F(3, 4) * f.q0 - F(3, 2) * f.q1
    derivs = [t * F(5, 3) ** (k + 1) for k, t in enumerate(terms)]
    return DtnResult(terms, sums, limit, derivs)


def neumann_inverse_sg(etas):
    """Boundary data realizing prescribed derivative data on the SG half
    domain: etas = [eta_{-1}, eta_0, ..., eta_N] gives the unique f with
    f(q1) = 0, d_n u(q1) = eta_{-1} and d_n u(p_k) = (5/3)^{k+1} eta_k
    (eta_k = 0 beyond the list)."""
    etas = [F(e) for e in etas]
    if not etas:
        raise ContractViolation("need at least eta_{-1}")
    em1, tail = etas[0], etas[1:]
    n = len(tail)
    indexed = list(enumerate([em1] + tail, start=-1))
    a_val = -em1 - F(4, 3) * sum(tail)
    b_val = F(4, 3) * sum((F(5, 3) ** i) * e for i, e in indexed)
    atoms = {}
    for k in range(n):
        geom_part = sum((F(3, 5) ** (k - i)) * e for i, e in indexed if i <= k)
        atoms[("0" * k, 1)] = (
            -em1 - F(4, 3) * sum(tail[: k + 1]) + F(4, 3) * geom_part
            + F(1, 3) * tail[k]
        )
    return HalfBoundaryData(
        2, q1=F(0), q0=a_val, atoms=atoms,
        geometric_tail=(a_val, b_val, F(3, 5), n),
    )


def forward_derivatives_sg(f, kmax):
    """eta_{-1} and the normalized derivatives (3/5)^{k+1} d_n u(p_k): the
    forward direction of the Dirichlet-to-Neumann correspondence."""
    nd_q1 = normal_derivative_q1(f)
    res = dirichlet_to_neumann_sg(f, kmax)
    return nd_q1, res.terms
