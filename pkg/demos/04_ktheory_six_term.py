#!/usr/bin/env python3
"""Integer homological algebra and the six-term solver at work.

Smith normal form turns integer matrices into kernel/cokernel data; the
six-term solver then fills in the two K-groups of an algebra trapped
between an ideal and a quotient whose K-theory and connecting maps are
known.  The two classical computations are the shift algebra (via the
index map) and the dimension-drop intervals (via the exponential map).
"""

from cstarlab.intlinalg import IntMatrix, Z, ZERO_GROUP, cokernel, kernel_rank, smith_normal_form
from cstarlab.ktheory import (
    SixTermProblem,
    k_dimension_drop,
    k_toeplitz,
    solve_six_term,
    toeplitz_index_of_shift,
)

# --- Smith normal form basics ------------------------------------------------

m = IntMatrix.from_rows([[2, 0], [0, 3]])
snf = smith_normal_form(m)
print("diag(2,3) has Smith form", snf.d, "with U m V = D:", snf.u @ m @ snf.v == snf.d)

row = IntMatrix.from_rows([[3, -2]])
print("[3,-2]: cokernel", cokernel(row), "| kernel rank", kernel_rank(row))
print("[2,-4]: cokernel", cokernel(IntMatrix.from_rows([[2, -4]])))

# --- the shift algebra --------------------------------------------------------

print("\nshift algebra: boundary of the symbol class =", toeplitz_index_of_shift())
k0, k1 = k_toeplitz()
print(f"K0 = {k0}, K1 = {k1}")

# the same data fed to the solver by hand
problem = SixTermProblem.for_algebra(
    k0_ideal=Z, k1_ideal=ZERO_GROUP,           # compact operators
    k0_quotient=Z, k1_quotient=Z,              # continuous functions on the circle
    exp_map=IntMatrix(0, 1, ()),
    index_map=IntMatrix.from_rows([[toeplitz_index_of_shift()]]))
print("solver output:", {k: str(v) for k, v in solve_six_term(problem).items()})

# --- dimension-drop intervals --------------------------------------------------

print("\ndimension-drop intervals (exponential map [q, -p]):")
for p, q in [(2, 3), (1, 1), (3, 5), (2, 4), (6, 9)]:
    g0, g1 = k_dimension_drop(p, q)
    print(f"  (p, q) = ({p}, {q}): K0 = {g0}, K1 = {g1}")
print("coprime sizes give (Z, 0): exactly the K-data the one-point-trace")
print("classifiable algebra carries; non-coprime sizes leave Z/gcd torsion in K1")
