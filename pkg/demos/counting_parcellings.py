"""
Counting ways to pair up the points where a curve meets the conic.

A degree-d polynomial meets the conic {Q = 0} in 2d points. Pairing them
up gives (2d - 1)!! choices when the points are distinct. Fewer choices are
left once points collide.
"""

from quadmultipole import count_parcellings, enumerate_parcellings, kappa

for d in range(1, 7):
    print(f"d = {d}: {kappa(d)} pairings of {2 * d} distinct points")

# One double point among otherwise simple points.
for d in (2, 3, 4):
    mu = [2] + [1] * (2 * d - 2)
    n = count_parcellings(mu)
    print(f"d = {d}, one double point: {n} = ({kappa(d)} + {kappa(d - 1)}) / 2")

# The pairings themselves, for a double point and two simple points.
for parc in enumerate_parcellings([2, 1, 1]):
    print(parc.encode())

# Heavier collisions.
print("two triple points:", count_parcellings([3, 3]))
print("a point of multiplicity 4 and two simple ones:", count_parcellings([4, 1, 1]))
