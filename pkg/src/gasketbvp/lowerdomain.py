"""Lower domains of SG cut by a horizontal line at height 1 - lambda.

lambda in [0,1) is encoded by its binary digits e_k (no infinite run of
1's, so dyadic rationals terminate and the recursion bottoms out on whole
gasket cells).  The crucial coefficients are eta_1 = d_n h_1(q1) and
eta_2 = -d_n h_1(q2); they obey the one-digit recursions T_0/T_1 and feed
the 2x2 transfer matrices M_w, the boundary measure pair (mu_1, mu_2),
the normal derivative formulas and the extension step.  For dyadic
lambda every quantity is an exact rational.
"""

from __future__ import annotations

from collections import namedtuple
from fractions import Fraction

from . import geometry, harmonic
from .errors import AccuracyError, AddressError, ContractViolation, ResolutionError
from .geometry import CORNERS_INT, Q0, Q1, gasket

F = Fraction

RATIO = F(5, 3)  # r^-1 of SG
_MAX_RECURSION = 64

EtaPair = namedtuple("EtaPair", ["eta1", "eta2", "depth", "err", "exact"])


class BinaryLambda:
    """Binary expansion of lambda in [0,1) with shift S and dyadic depth."""

    def __init__(self, value):
        value = F(value)
        if not (0 <= value < 1):
            raise ResolutionError("lambda must lie in [0, 1)")
        self.value = value

    @classmethod
    def parse(cls, text):
        """Accepts "5/8" style fractions or bit programs "bits:101" /
        "bits:101periodic:10" (prefix bits, then a repeating block)."""
        text = text.strip()
        if text.startswith("bits:"):
            body = text[len("bits:"):]
            periodic = ""
            if "periodic:" in body:
                body, periodic = body.split("periodic:")
            if not all(c in "01" for c in body + periodic):
                raise ResolutionError("bit program must be over {0,1}")
            val = F(int(body, 2) if body else 0, 2 ** len(body))
            if periodic:
                if all(c == "1" for c in periodic):
                    raise ResolutionError("infinite runs of 1 are forbidden")
                block = F(int(periodic, 2), 2 ** len(periodic))
                val += F(1, 2 ** len(body)) * block / (1 - F(1, 2 ** len(periodic)))
            return cls(val)
        return cls(F(text))

    def digit(self, k):
        """e_k(lambda), 1-indexed."""
        return (self.value.numerator * 2 ** k // self.value.denominator) % 2

    @property
    def dyadic(self):
        n, d = self.value.numerator, self.value.denominator
        return d & (d - 1) == 0

    @property
    def dyadic_depth(self):
        """d(lambda): least d with lambda * 2^d integral (dyadic only)."""
        if not self.dyadic:
            raise ResolutionError("d(lambda) is defined for dyadic lambda")
        return self.value.denominator.bit_length() - 1

    def shift(self):
        """S lambda = fractional part of 2 lambda."""
        v = 2 * self.value
        return BinaryLambda(v - self.digit(1))

    def cut_height(self):
        """Global y coordinate of the cut line."""
        return 2 - 2 * self.value

    def __repr__(self):
        return f"BinaryLambda({self.value})"


# ---------------------------------------------------------------------------
# the (eta_1, eta_2) recursion


def t0(x, y):
    s = F(5, 6) if isinstance(x, F) and isinstance(y, F) else 5 / 6
    a = s * (3 + 2 * x + 2 * y) / (2 + x + y)
    b = 3 * s * (x - y) / (3 + 2 * x - 2 * y)
    return (a + b, a - b)


def t1(x, y):
    if x == 0:
        raise ContractViolation("T_1 needs eta_1 > 0")
    if isinstance(x, F) and isinstance(y, F):
        return (F(5, 3) * (x - y * y / (2 * x)), F(5, 6) * y * y / x)
    return (5 / 3 * (x - y * y / (2 * x)), 5 / 6 * y * y / x)


def apply_t(e, x, y):
    return t0(x, y) if e == 0 else t1(x, y)


def composite_eta(lam, depth, seed=(2, 1)):
    """T_{e_1} o ... o T_{e_depth}(seed), innermost map applied first."""
    x, y = seed
    for k in range(depth, 0, -1):
        x, y = apply_t(lam.digit(k), x, y)
    return (x, y)


def error_bound(lam, depth, seed=(2, 1)):
    """Certified bound 8 (3/5)^(m-2j) (1/(c1-c2)+1) with the least j such
    that 1 - lambda > 2^-j."""
    c1, c2 = seed
    if not c1 > c2 > 0:
        raise ContractViolation("seed must satisfy c1 > c2 > 0")
    gap = 1 - lam.value
    j = 1
    while F(1, 2 ** j) >= gap:
        j += 1
        if j > 64:
            raise AccuracyError("lambda is too close to 1 for a certified bound")
    expo = depth - 2 * j
    return 8.0 * float(F(3, 5)) ** expo * (1.0 / float(c1 - c2) + 1.0)


EXACT_DYADIC_CAP = 48


def eta_pair(lam, depth=None, seed=(2, 1), tol=1e-12, max_depth=400):
    """(eta_1, eta_2)(lambda) by composing the one-digit maps.

    Dyadic lambda short-circuits at d(lambda) with exact rational output
    (desk-scale depths only; the exact numerators grow fast); otherwise
    the depth is chosen from the certified error bound.
    """
    if lam.dyadic and lam.dyadic_depth <= EXACT_DYADIC_CAP:
        d = lam.dyadic_depth
        x, y = composite_eta(lam, d, (F(seed[0]), F(seed[1])))
        pair = EtaPair(x, y, d, F(0), True)
    else:
        if depth is None:
            depth = 1
            while depth <= max_depth and error_bound(lam, depth, seed) > tol:
                depth += 1
            if depth > max_depth:
                raise AccuracyError(
                    f"certified depth for tol {tol:g} exceeds {max_depth}"
                )
        x, y = composite_eta(lam, depth, (float(seed[0]), float(seed[1])))
        pair = EtaPair(x, y, depth, error_bound(lam, depth, seed), False)
    _check_eta_invariants(pair)
    return pair


def _check_eta_invariants(pair):
    tol = 0 if pair.exact else max(1e-9, 2 * pair.err)
    if not (pair.eta1 >= 2 - tol and -tol <= pair.eta2 <= 1 + tol
            and pair.eta1 + pair.eta2 >= 3 - tol):
        raise ContractViolation(f"eta invariants violated: {pair}")


_ETA_CACHE = {}


def etas(lam, tol=1e-13):
    key = lam.value
    hit = _ETA_CACHE.get(key)
    if hit is None or (not hit.exact and hit.err > tol):
        hit = eta_pair(lam, tol=tol)
        _ETA_CACHE[key] = hit
    return hit


# ---------------------------------------------------------------------------
# closed forms (all-zero and all-one digit prefixes)


def closed_form_zero_prefix(lam, m):
    """(eta1+eta2, eta1-eta2)(lambda) from (eta1, eta2)(S^m lambda) when
    e_1 = ... = e_m = 0."""
    for k in range(1, m + 1):
        if lam.digit(k) != 0:
            raise ResolutionError("closed form needs an all-zero digit prefix")
    cur = lam
    for _ in range(m):
        cur = cur.shift()
    em = etas(cur)
    s_m = em.eta1 + em.eta2
    d_m = em.eta1 - em.eta2
    p15 = 15 ** m
    s = 3 + 14 * (s_m - 3) / (3 * (p15 - 1) * (s_m - 3) + 14 * p15)
    frac35 = F(3, 5) ** m if em.exact else float(F(3, 5)) ** m
    d = d_m / ((1 - frac35) * d_m + frac35)
    return s, d


def closed_form_zero_matrix(lam, m):
    """M_{0^m}: symmetric with rows summing to 1; the antisymmetric
    eigenvalue in closed form."""
    cur = lam
    for k in range(1, m + 1):
        if lam.digit(k) != 0:
            raise ResolutionError("closed form needs an all-zero digit prefix")
    for _ in range(m):
        cur = cur.shift()
    em = etas(cur)
    s_m = em.eta1 + em.eta2
    p15, p5 = 15 ** m, 5 ** m
    amb = 14 * p5 * s_m / ((9 * p15 + 5) * s_m + 15 * (p15 - 1))
    a = (1 + amb) / 2
    b = (1 - amb) / 2
    return ((a, b), (b, a))


def closed_form_ones(lam, m):
    """(eta_1, eta_2)(lambda) via the Chebyshev-like variable x when
    e_1 = ... = e_m = 1: eta1(S^m)/eta2(S^m) = (x + 1/x)/2."""
    for k in range(1, m + 1):
        if lam.digit(k) != 1:
            raise ResolutionError("closed form needs an all-one digit prefix")
    cur = lam
    for _ in range(m):
        cur = cur.shift()
    em = etas(cur)
    rho = float(em.eta1) / float(em.eta2)
    x = rho - (rho * rho - 1) ** 0.5  # in (0,1)
    p = float(F(5, 3)) ** m
    two_m = 2 ** m
    xm, xmi = x ** two_m, x ** (-two_m)
    eta2 = p * (x - 1 / x) / (xm - xmi) * float(em.eta2)
    eta1 = p * (x - 1 / x) / (x + 1 / x) * (xm + xmi) / (xm - xmi) * float(em.eta1)
    return eta1, eta2


def closed_form_ones_matrix(lam, m, word):
    """M_w for an all-one prefix via powers of x; w over {1,2}^m."""
    for k in range(1, m + 1):
        if lam.digit(k) != 1:
            raise ResolutionError("closed form needs an all-one digit prefix")
    if len(word) != m or any(ch not in "12" for ch in word):
        raise AddressError("word must be over {1,2} with length m")
    cur = lam
    for _ in range(m):
        cur = cur.shift()
    em = etas(cur)
    rho = float(em.eta1) / float(em.eta2)
    x = rho - (rho * rho - 1) ** 0.5
    j = sum((int(ch) - 1) * 2 ** (m - k) for k, ch in enumerate(word, start=1))
    two_m = 2 ** m
    a = ((x ** j, -(x ** (two_m - j))), (-(x ** (j + 1)), x ** (two_m - j - 1)))
    det = 1 - x ** (2 * two_m)
    binv = ((1 / det, x ** two_m / det), (x ** two_m / det, 1 / det))
    return _matmul(a, binv)


def _matmul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2))
        for i in range(2)
    )


# ---------------------------------------------------------------------------
# transfer matrices and boundary measures


def single_matrix(lam, digit):
    """One-digit derivative transfer matrix M_i, in terms of eta(S lambda)."""
    em = etas(lam.shift())
    e1, e2 = em.eta1, em.eta2
    if digit == 0:
        if lam.digit(1) != 0:
            raise AddressError("digit 0 requires e_1(lambda) = 0")
        s = e1 + e2
        den = 6 + 4 * s
        return (((3 + 3 * s) / den, (3 + s) / den), ((3 + s) / den, (3 + 3 * s) / den))
    if lam.digit(1) != 1:
        raise AddressError("digits 1,2 require e_1(lambda) = 1")
    h = e2 / (2 * e1)
    if digit == 1:
        return ((1, 0), (-h, h))
    if digit == 2:
        return ((h, -h), (0, 1))
    raise AddressError(f"invalid lower-domain digit {digit}")


def word_alphabet(lam, k):
    """Admissible digits at position k of a word: {0} or {1,2}."""
    return (0,) if lam.digit(k) == 0 else (1, 2)


def transfer_matrix(lam, word):
    """M_w = M_{w_m}^{S^(m-1) lambda} ... M_{w_1}^lambda: the deepest-shift
    matrix sits leftmost, so each appended digit multiplies on the left."""
    m = ((1, 0), (0, 1))
    cur = lam
    for k, ch in enumerate(word, start=1):
        d = int(ch)
        if d not in word_alphabet(lam, k):
            raise AddressError(f"digit {d} at position {k} conflicts with lambda")
        m = _matmul(single_matrix(cur, d), m)
        cur = cur.shift()
    return m


def lower_measures(lam, word):
    """(mu_1(X_w), mu_2(X_w)) via the transfer matrix pairing."""
    em = etas(lam)
    mw = transfer_matrix(lam, word)
    den = em.eta1 - em.eta2
    col1 = (em.eta1, -em.eta2)
    col2 = (-em.eta2, em.eta1)
    m1 = (mw[0][0] * col1[0] + mw[0][1] * col1[1]
          + mw[1][0] * col1[0] + mw[1][1] * col1[1]) / den
    m2 = (mw[0][0] * col2[0] + mw[0][1] * col2[1]
          + mw[1][0] * col2[0] + mw[1][1] * col2[1]) / den
    return m1, m2


# ---------------------------------------------------------------------------
# boundary data


class LowerBoundaryData:
    """Values at q1, q2 plus data on the cut-line boundary set X.

    cylinders maps words over the per-position alphabets ({0} at positions
    where e_k = 0, {1,2} where e_k = 1) to constant values on X_w; for
    dyadic lambda the depth-d(lambda) cylinders are single points (the
    finite boundary atoms).  A callback fn(word) may be used instead."""

    def __init__(self, lam, q1=0, q2=0, cylinders=None, default=None, fn=None,
                 sup_bound=None):
        self.lam = lam
        self.q1 = q1
        self.q2 = q2
        self.cylinders = dict(cylinders or {})
        self.default = default
        self.fn = fn
        self.sup_bound = sup_bound
        if fn is not None and (self.cylinders or default is not None):
            raise ContractViolation("callback data must not be mixed with structured data")
        for w in self.cylinders:
            for k, ch in enumerate(w, start=1):
                if int(ch) not in word_alphabet(lam, k):
                    raise AddressError(f"cylinder word {w!r} conflicts with lambda")

    def subtree(self, word):
        if self.fn is not None:
            return None
        for cyl in self.cylinders:
            if len(cyl) > len(word) and cyl.startswith(word):
                return None
        best = None
        for cyl in self.cylinders:
            if word.startswith(cyl) and (best is None or len(cyl) > len(best)):
                best = cyl
        if best is not None:
            return self.cylinders[best]
        if self.default is not None:
            return self.default
        raise ContractViolation("boundary data is not total")

    def sup(self):
        if self.sup_bound is not None:
            return self.sup_bound
        if self.fn is not None:
            raise ContractViolation("callback data needs an explicit sup_bound")
        vals = [abs(v) for v in self.cylinders.values()]
        if self.default is not None:
            vals.append(abs(self.default))
        return max(vals) if vals else 0

    def shifted(self, digit, new_q1, new_q2):
        ch = geometry.WORD_CHARS[digit]
        if self.fn is not None:
            fn = self.fn
            return LowerBoundaryData(
                self.lam.shift(), q1=new_q1, q2=new_q2,
                fn=lambda w, _c=ch: fn(_c + w), sup_bound=self.sup_bound,
            )
        cylinders = {
            c[1:]: v for c, v in self.cylinders.items() if c.startswith(ch) and c
        }
        default = self.cylinders.get("", self.default)
        return LowerBoundaryData(
            self.lam.shift(), q1=new_q1, q2=new_q2, cylinders=cylinders,
            default=default, sup_bound=self.sup_bound,
        )


def constant_lower(lam, c):
    return LowerBoundaryData(lam, q1=c, q2=c, default=c)


DEFAULT_DEPTH = 24

Integral = namedtuple("Integral", ["value", "tail_bound"])


def integrate_lower(f, measure=1, max_depth=DEFAULT_DEPTH):
    """Integral of f over X against mu_1 or mu_2 of f's own lambda."""
    lam = f.lam

    def rec(data, word, depth):
        sub = data.subtree("")
        if sub is not None:
            mass = lower_measures(lam, word)[measure - 1]
            return sub * mass, 0
        if depth == 0:
            mass = lower_measures(lam, word)[measure - 1]
            return 0, abs(mass) * float(f.sup())
        k = len(word) + 1
        total, bound = 0, 0
        for d in word_alphabet(lam, k):
            v, tb = rec(data.shifted(d, None, None), word + geometry.WORD_CHARS[d], depth - 1)
            total += v
            bound += tb
        return total, bound

    v, tb = rec(f, "", max_depth)
    return Integral(v, tb)


def normal_derivatives_lower(lam, f):
    """(d_n u(q1), d_n u(q2)) from the boundary data via the measure pair."""
    em = etas(lam)
    i1 = integrate_lower(f, 1).value
    i2 = integrate_lower(f, 2).value
    d1 = em.eta1 * f.q1 - em.eta2 * f.q2 - (em.eta1 - em.eta2) * i1
    d2 = em.eta1 * f.q2 - em.eta2 * f.q1 - (em.eta1 - em.eta2) * i2
    return d1, d2


# ---------------------------------------------------------------------------
# extension step and evaluation


def _mean_over_copy(f, digit, measure):
    """Normalised mean of f o F_digit against the shifted measure."""
    shifted = f.shifted(digit, None, None)
    return integrate_lower(shifted, measure).value


def extend_step_lower(lam, f):
    """Values of the solution on V_1 inside the lower domain, keyed by
    exact global points (closed forms for both first-digit cases)."""
    params = gasket(2)
    e1 = lam.digit(1)
    em = etas(lam.shift())
    x, y = em.eta1, em.eta2
    p_f0q1 = geometry.apply_word(params, (0,), Q1)
    p_f0q2 = geometry.apply_word(params, (0,), geometry.CORNERS[2])
    p_f1q2 = geometry.apply_word(params, (1,), geometry.CORNERS[2])
    if e1 == 0:
        i10 = _mean_over_copy(f, 0, 1)
        i20 = _mean_over_copy(f, 0, 2)
        den = 4 * x * x + 14 * x - 2 * y - 4 * y * y + 12
        c_same = 9 + 5 * x + y
        c_opp = 3 + x + 5 * y
        c_m1 = (7 + 4 * x) * (x - y)
        c_m2 = (1 + 4 * y) * (x - y)
        u01 = (c_same * f.q1 + c_opp * f.q2 + c_m1 * i10 + c_m2 * i20) / den
        u02 = (c_same * f.q2 + c_opp * f.q1 + c_m1 * i20 + c_m2 * i10) / den
        u12 = (u01 + u02 + f.q1 + f.q2) / 4
        return {p_f0q1: u01, p_f0q2: u02, p_f1q2: u12}
    i12 = _mean_over_copy(f, 1, 2)
    i21 = _mean_over_copy(f, 2, 1)
    u12 = y / (2 * x) * (f.q1 + f.q2) + (x - y) / (2 * x) * (i12 + i21)
    return {p_f1q2: u12}


def boundary_value_at_lower(lam, f, p, max_depth=DEFAULT_DEPTH):
    """Data value at an exact point of the cut-line boundary set."""
    params = gasket(2)
    vals = []

    def rec(lam, data, p, depth):
        sub = data.subtree("")
        if sub is not None:
            vals.append(sub)
            return
        if depth == 0:
            raise ContractViolation("cut-line value did not resolve within the depth cap")
        e1 = lam.digit(1)
        cells = (0,) if e1 == 0 else (1, 2)
        hits = 0
        for i in cells:
            local = params.unapply_map(i, p)
            if geometry.cells_containing(params, local):
                rec(lam.shift(), data.shifted(i, None, None), local, depth - 1)
                hits += 1
        if hits == 0:
            raise AddressError(f"{p} is not on the lower-domain boundary")

    rec(lam, f, p, max_depth)
    return sum(vals) / len(vals)


def evaluate_lower(lam, f, v):
    """Value of the harmonic solution at a vertex of the closed domain."""
    params = gasket(2)
    if isinstance(v, geometry.VertexAddress):
        p = geometry.resolve(params, v)
    else:
        p = (F(v[0]), F(v[1]))
    cut = lam.cut_height()
    if p[1] > cut:
        raise ResolutionError(f"{p} lies above the cut line")
    corners = geometry.CORNERS
    for _ in range(_MAX_RECURSION):
        if p == Q1:
            return f.q1
        if p == corners[2]:
            return f.q2
        if lam.value == 0:
            # whole-gasket cell: boundary is V_0, X reduces to {q0}
            c0 = f.subtree("")
            if c0 is None:
                c0 = boundary_value_at_lower(lam, f, Q0)
            return harmonic.harmonic_value_in_cell(
                2, (c0, f.q1, f.q2), p
            )
        if p[1] == cut:
            return boundary_value_at_lower(lam, f, p)
        step = extend_step_lower(lam, f)
        if p in step:
            return step[p]
        e1 = lam.digit(1)
        values = dict(step)
        values[Q1] = f.q1
        values[corners[2]] = f.q2
        p_f0q1 = geometry.apply_word(params, (0,), Q1)
        p_f0q2 = geometry.apply_word(params, (0,), corners[2])
        p_f1q2 = geometry.apply_word(params, (1,), corners[2])
        routed = False
        if e1 == 0:
            for i, cvals in ((1, (values[p_f0q1], f.q1, values[p_f1q2])),
                             (2, (values[p_f0q2], values[p_f1q2], f.q2))):
                local = params.unapply_map(i, p)
                if geometry.cells_containing(params, local):
                    return harmonic.harmonic_value_in_cell(2, cvals, local)
            local = params.unapply_map(0, p)
            if geometry.cells_containing(params, local):
                f = f.shifted(0, values[p_f0q1], values[p_f0q2])
                lam = lam.shift()
                cut = lam.cut_height()
                p = local
                routed = True
        else:
            for i, (nq1, nq2) in ((1, (f.q1, values[p_f1q2])),
                                  (2, (values[p_f1q2], f.q2))):
                local = params.unapply_map(i, p)
                if geometry.cells_containing(params, local):
                    f = f.shifted(i, nq1, nq2)
                    lam = lam.shift()
                    cut = lam.cut_height()
                    p = local
                    routed = True
                    break
        if not routed:
            raise AddressError(f"{p} could not be routed inside the lower domain")
    raise AddressError("vertex is deeper than the recursion cap")


def gauss_green_telescope(lam, hq1, hq2, m):
    """Sum over W~_m of the derivative pairs of h = hq1 h_1 + hq2 h_2; the
    localized Gauss-Green identity makes it equal the level-0 pair sum
    for every m."""
    em = etas(lam)
    base = (em.eta1 * hq1 - em.eta2 * hq2, em.eta1 * hq2 - em.eta2 * hq1)

    def words(k):
        if k == 0:
            yield ""
            return
        for w in words(k - 1):
            for d in word_alphabet(lam, k):
                yield w + geometry.WORD_CHARS[d]

    total = 0
    per_word = []
    for w in words(m):
        mw = transfer_matrix(lam, w)
        d1 = mw[0][0] * base[0] + mw[0][1] * base[1]
        d2 = mw[1][0] * base[0] + mw[1][1] * base[1]
        per_word.append((w, d1 + d2))
        total += d1 + d2
    return total, base[0] + base[1], per_word
