"""
Exact rational linear systems.

Rows are sparse maps from unknown index to ``Fraction``. Row reduction runs on
sympy's ``DomainMatrix`` over QQ.
"""

import logging
from collections.abc import Mapping
from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

Row = dict[int, Fraction]


def _to_fraction(value: object) -> Fraction:
    return Fraction(int(value.p), int(value.q))  # type: ignore[attr-defined]


class LinearSystem:
    """A growing set of equations sum_k c_k x_k = rhs over the rationals."""

    def __init__(self, size: int):
        self.size = size
        self.rows: list[tuple[Row, Fraction]] = []
        self._reduced: list[tuple[int, Row, Fraction]] | None = None
        self._consistent = True

    def add(self, coefficients: Mapping[int, Fraction | int], rhs: Fraction | int = 0) -> None:
        row = {k: Fraction(v) for k, v in coefficients.items() if v}
        if any(not 0 <= k < self.size for k in row):
            raise ValueError(f"unknown index out of range 0..{self.size - 1}")
        self.rows.append((row, Fraction(rhs)))
        self._reduced = None

    def _reduce(self) -> list[tuple[int, Row, Fraction]]:
        if self._reduced is not None:
            return self._reduced
        if not self.rows:
            self._reduced, self._consistent = [], True
            return self._reduced
        width = self.size + 1
        dense = []
        for row, rhs in self.rows:
            line = [QQ(0)] * width
            for k, v in row.items():
                line[k] = QQ(v.numerator, v.denominator)
            line[self.size] = QQ(rhs.numerator, rhs.denominator)
            dense.append(line)
        reduced, pivots = DomainMatrix(dense, (len(dense), width), QQ).rref()
        matrix = reduced.to_Matrix()
        out = []
        self._consistent = True
        for r, col in enumerate(pivots):
            if col == self.size:
                self._consistent = False
                continue
            coeffs = {k: _to_fraction(matrix[r, k]) for k in range(self.size) if matrix[r, k] != 0}
            out.append((col, coeffs, _to_fraction(matrix[r, self.size])))
        logger.debug(f"reduced {len(self.rows)} rows over {self.size} unknowns: rank {len(out)}")
        self._reduced = out
        return out

    @property
    def rank(self) -> int:
        return len(self._reduce())

    def is_consistent(self) -> bool:
        self._reduce()
        return self._consistent

    def implied_value(self, functional: Mapping[int, Fraction | int]) -> Fraction | None:
        """The value every solution gives to ``functional``, or None if it varies."""
        rest = {k: Fraction(v) for k, v in functional.items() if v}
        value = Fraction(0)
        for col, coeffs, rhs in self._reduce():
            factor = rest.get(col)
            if not factor:
                continue
            value += factor * rhs
            for k, v in coeffs.items():
                rest[k] = rest.get(k, Fraction(0)) - factor * v
        if any(rest.values()):
            return None
        return value
