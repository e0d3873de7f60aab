"""Independent oracles shared by the test modules.

Everything here deliberately avoids the code paths under test: surjectivity
is decided by enumerating lattice points or maximal minors rather than
Smith forms, determinants come from Bareiss elimination, and step functions
are compared on explicit rational grids.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd

import numpy as np

from cstarlab.intlinalg import IntMatrix, det_bareiss


def surjective_box_search(m: IntMatrix, bound: int) -> bool:
    """Is every unit vector of Z^rows an integer combination of m's columns,
    with coefficients in [-bound, bound]?  (Sound for 'yes'; a 'no' only
    rules out the search box.)"""
    if m.rows == 0:
        return True
    targets = {tuple(1 if i == j else 0 for i in range(m.rows)) for j in range(m.rows)}
    found = set()
    cols = m.cols
    for coeffs in product(range(-bound, bound + 1), repeat=cols):
        image = tuple(sum(m.entry(i, j) * coeffs[j] for j in range(cols))
                      for i in range(m.rows))
        if image in targets:
            found.add(image)
            if found == targets:
                return True
    return False


def surjective_minors_gcd(m: IntMatrix) -> bool:
    """Surjectivity over Z via the classical maximal-minor criterion:
    an r x c matrix is onto Z^r iff the gcd of its r x r minors is 1."""
    if m.rows == 0:
        return True
    if m.cols < m.rows:
        return False
    g = 0
    for cols in combinations(range(m.cols), m.rows):
        sub = IntMatrix.from_rows(
            [[m.entry(i, j) for j in cols] for i in range(m.rows)], cols=m.rows)
        g = gcd(g, abs(det_bareiss(sub)))
        if g == 1:
            return True
    return False


def random_unimodular(rng: np.random.Generator, n: int, steps: int = 12) -> IntMatrix:
    """Product of random elementary row operations: unimodular by construction."""
    a = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.integers(n), rng.integers(n)
        if i == j:
            continue
        k = int(rng.integers(-3, 4))
        a[i] = [x + k * y for x, y in zip(a[i], a[j])]
    if rng.random() < 0.5 and n >= 2:
        a[0], a[1] = a[1], a[0]
    return IntMatrix.from_rows(a, cols=n)


def fraction_grid(k: int) -> list[Fraction]:
    """The rational grid {0, 1/k, ..., 1} used to compare step functions."""
    return [Fraction(i, k) for i in range(k + 1)]
