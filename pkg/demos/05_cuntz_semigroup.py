#!/usr/bin/env python3
"""Semigroup arithmetic for the concrete one-dimensional models.

Positive elements of the interval algebra sort into extended-natural-valued
lower-semicontinuous step functions; pullback algebras add integer boundary
conditions; and the one-point-trace model is the two-sheet monoid of
compact and soft classes.
"""

from fractions import Fraction

from cstarlab.cuntz import (
    EXT_INF,
    CuJiangSu,
    ExtNat,
    LscStep,
    dim_function,
    dimension_drop_boundary_maps,
    dimension_drop_unit,
    k1_trivial,
    lsc_add,
    lsc_leq,
    lsc_sup_chain,
    nccw_check,
)

# --- step functions on the interval ------------------------------------------

half = LscStep.indicator(0, Fraction(1, 2))
full = LscStep.indicator(0, 1)
print("f = 1 on (0,1/2), g = 1 on (0,1)")
print("  f <= g:", lsc_leq(half, full), "| g <= f:", lsc_leq(full, half))
s = lsc_add(half, full)
print("  (f+g)(1/4) =", s.value_at(Fraction(1, 4)),
      " (f+g)(1/2) =", s.value_at(Fraction(1, 2)),
      " (f+g)(3/4) =", s.value_at(Fraction(3, 4)))

chain = [LscStep.indicator(0, 1 - Fraction(1, k)) for k in range(2, 12)]
print("supremum of the chain 1_(0, 1-1/k):",
      "support length", dim_function(lsc_sup_chain(chain)))

print("dimension function of f under Lebesgue measure:", dim_function(half))
print("an infinity plateau absorbs:",
      lsc_add(half, LscStep.indicator(0, 1, EXT_INF)).value_at(Fraction(1, 4)))

# --- pullback boundary conditions ---------------------------------------------

print("\nboundary checks for the (p, q) pullbacks")
for p, q in [(2, 3), (3, 4), (2, 4)]:
    m0, m1 = dimension_drop_boundary_maps(p, q)
    unit = dimension_drop_unit(p, q)
    print(f"  (p, q) = ({p}, {q}): unit valid {nccw_check(unit)}, "
          f"K1 trivial {k1_trivial(m0, m1)} (difference matrix {m0 - m1})")

bad = dimension_drop_unit(2, 3)
bad = type(bad)((LscStep.constant(6),), (ExtNat(1), ExtNat(1)), bad.m0, bad.m1)
print("  a wrong rank vector is caught:", nccw_check(bad))

# --- the two-sheet monoid -------------------------------------------------------

print("\ncompact vs soft classes in the one-point-trace model")
one, soft_one = CuJiangSu.compact(1), CuJiangSu.soft(1)
print("  soft(1) <= [1]:", soft_one <= one, "| [1] <= soft(1):", one <= soft_one)
print("  [0] below everything:", CuJiangSu.compact(0) <= soft_one)
print("  [1] + soft(1/2) =", CuJiangSu.compact(1) + CuJiangSu.soft(Fraction(1, 2)))
