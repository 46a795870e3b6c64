"""Frobenius twists, normalization coordinates, and the period map.

Run as `python3 demos/frobenius_periods.py`.  The carrier of local points
moves; the exact Fraction bookkeeping shows precisely how far.
"""

from fractions import Fraction

from arithmeticoid import (
    NumberField,
    distance,
    global_frobenius,
    normalization_coordinate,
    period_map,
    places_over,
    roots_of_unity,
    stabilizer_check,
    standard_arithmeticoid,
)

Q = NumberField(None)
y0 = standard_arithmeticoid(Q)
v5 = places_over(Q, 5)[0]

print("= Frobenius rescales the stored exponent exactly =")
for m in range(-3, 4):
    e = global_frobenius(y0, m).component(v5).e
    print(f"  m = {m:+d}: e = {str(e):>7s}   (|5| at the twisted point = 5^-e)")

print()
print("= normalization coordinates put the rulers back =")
alpha = normalization_coordinate(global_frobenius(y0, 1))
for p in (2, 3, 5, 7):
    v = places_over(Q, p)[0]
    print(f"  alpha at {v} after one twist: {alpha.at(v)}")
print("  each coordinate is exactly 1/p, so the twisted absolute value"
      " normalizes back to the standard one")

print()
print("= the period map separates the twist =")
print(f"  period_map(y0) == period_map(phi y0): "
      f"{period_map(y0) == period_map(global_frobenius(y0, 1))}")
print(f"  distance(y0, phi y0) = {distance(y0, global_frobenius(y0, 1)):.6f}")

print()
print("= only roots of unity stabilize the standard carrier =")
K = NumberField(3)
yK = standard_arithmeticoid(K)
found = [str(K.element(a, b))
         for a in range(-2, 3) for b in range(-2, 3)
         if (a, b) != (0, 0) and stabilizer_check(K.element(a, b), yK)]
print(f"  scan over Q(sqrt(-3)) integral coordinates |a|,|b| <= 2: {found}")
print(f"  roots of unity of the field: {[str(u) for u in roots_of_unity(K)]}")
