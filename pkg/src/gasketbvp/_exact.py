"""Small dense exact linear algebra over fractions.Fraction.

Only used for desk-scale systems (cell extension rules, rational-mode
Dirichlet solves); everything larger goes through scipy in float mode.
"""

from fractions import Fraction

from .errors import SolvabilityError

EXACT_UNKNOWN_CAP = 5000


def solve_dense(rows, rhs):
    """Solve A x = b exactly by Gaussian elimination with Fraction entries.

    rows: list of lists (each row of A), rhs: list. Both are copied.
    Raises SolvabilityError on a singular system.
    """
    n = len(rows)
    if n > EXACT_UNKNOWN_CAP:
        raise SolvabilityError(f"exact solve capped at {EXACT_UNKNOWN_CAP} unknowns, got {n}")
    a = [[Fraction(x) for x in row] for row in rows]
    b = [Fraction(x) for x in rhs]
    perm = list(range(n))
    for col in range(n):
        piv = next((r for r in range(col, n) if a[perm[r]][col] != 0), None)
        if piv is None:
            raise SolvabilityError("singular system in exact elimination")
        perm[col], perm[piv] = perm[piv], perm[col]
        prow = a[perm[col]]
        pinv = Fraction(1) / prow[col]
        for r in range(col + 1, n):
            row = a[perm[r]]
            f = row[col]
            if f == 0:
                continue
            f *= pinv
            for c in range(col, n):
                row[c] -= f * prow[c]
            b[perm[r]] -= f * b[perm[col]]
    x = [Fraction(0)] * n
    for col in range(n - 1, -1, -1):
        row = a[perm[col]]
        s = b[perm[col]]
        for c in range(col + 1, n):
            s -= row[c] * x[c]
        x[col] = s / row[col]
    return x
