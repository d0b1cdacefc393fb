"""
Phase-one simplex over Fractions with Bland's rule.

The tableau is kept in dictionary form: for each basic variable
``x_B[i] + sum_j A[i][j] * x_N[j] = b[i]``. Structural variables are labelled
0..n-1 and the artificial variables n..n+m-1.
"""

import logging
from collections.abc import Sequence
from fractions import Fraction

logger = logging.getLogger(__name__)

MAX_PIVOTS = 200_000


class SimplexTableau:
    """Dense dictionary tableau for finding x >= 0 with Ax = b."""

    def __init__(self, a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]):
        self.m = len(a)
        self.n = len(a[0]) if a else 0
        rows = [list(map(Fraction, row)) for row in a]
        rhs = list(map(Fraction, b))
        for i in range(self.m):
            if rhs[i] < 0:
                rows[i] = [-x for x in rows[i]]
                rhs[i] = -rhs[i]
        self.A = rows
        self.b = rhs
        self.nb_vars = list(range(self.n))
        self.b_vars = list(range(self.n, self.n + self.m))
        # phase one maximizes the total of the row activities
        self.c = [sum((self.A[i][j] for i in range(self.m)), Fraction(0)) for j in range(self.n)]
        self.pivots = 0

    def pivot(self, i: int, j: int) -> None:
        piv = self.A[i][j]
        delta = self.c[j] / piv
        for col in range(self.n):
            self.c[col] -= delta * self.A[i][col]
        self.c[j] = -delta
        row = self.A[i]
        for col in range(self.n):
            row[col] = 1 / piv if col == j else row[col] / piv
        self.b[i] /= piv
        for k in range(self.m):
            if k == i:
                continue
            f = self.A[k][j]
            if not f:
                continue
            other = self.A[k]
            for col in range(self.n):
                other[col] = -f / piv if col == j else other[col] - f * row[col]
            self.b[k] -= f * self.b[i]
        self.nb_vars[j], self.b_vars[i] = self.b_vars[i], self.nb_vars[j]
        self.pivots += 1

    def bland_primal_step(self) -> str:
        candidates = [(self.nb_vars[j], j) for j in range(self.n) if self.c[j] > 0]
        if not candidates:
            return "optimal"
        _, j = min(candidates)
        ratios = [(self.b[i] / self.A[i][j], self.b_vars[i], i) for i in range(self.m) if self.A[i][j] > 0]
        if not ratios:
            return "unbounded"
        _, _, i = min(ratios)
        self.pivot(i, j)
        return "go_on"

    def bland_primal(self) -> str:
        while self.pivots < MAX_PIVOTS:
            status = self.bland_primal_step()
            if status != "go_on":
                return status
        raise RuntimeError(f"simplex did not finish within {MAX_PIVOTS} pivots")

    def solution(self) -> list[Fraction]:
        """Values of the structural variables at the current basis."""
        x = [Fraction(0)] * self.n
        for i, var in enumerate(self.b_vars):
            if var < self.n:
                x[var] = self.b[i]
        return x

    def artificial_total(self) -> Fraction:
        return sum((self.b[i] for i, var in enumerate(self.b_vars) if var >= self.n), Fraction(0))


def find_nonnegative_solution(
    a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
) -> list[Fraction] | None:
    """Some x >= 0 with Ax = b, or None if there is none."""
    if not a:
        return []
    tableau = SimplexTableau(a, b)
    tableau.bland_primal()
    logger.debug(f"phase one: {tableau.m}x{tableau.n} tableau, {tableau.pivots} pivots")
    if tableau.artificial_total() != 0:
        return None
    return tableau.solution()
