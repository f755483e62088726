"""
Projecting conic divisors from a point.

Lines through a fixed center off the conic meet it in two points. Sending a
divisor on the conic to the lines through its points gives a 2^d to 1 map,
with smaller fibers over repeated and tangent lines.
"""

import numpy as np

from quadmultipole import PencilCenter, PencilDivisor, ProjPoint, SPHERE, is_ramified
from quadmultipole.moduli import (gamma_fiber, parabola_value, tangent_nullity,
                                  tangent_pencil_points, viete_coordinates)

rng = np.random.default_rng(3)
center = PencilCenter.of(np.array([0.3, -0.2, 1.5]), SPHERE)
s = [ProjPoint.of(rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(3)]
t0, t1 = tangent_pencil_points(center, SPHERE)

cases = {
    "two generic lines": PencilDivisor(((s[0], 1), (s[1], 1))),
    "one doubled line": PencilDivisor(((s[0], 2),)),
    "tangent + generic": PencilDivisor(((t0, 1), (s[1], 1))),
    "both tangents": PencilDivisor(((t0, 1), (t1, 1))),
    "three generic lines": PencilDivisor(tuple((p, 1) for p in s)),
}
for name, target in cases.items():
    print(f"{name:20s} fiber size {len(gamma_fiber(target, center, SPHERE))}")

# Doubled lines sit on a parabola in the Viete chart.
print("parabola value:", abs(parabola_value(viete_coordinates(cases["one doubled line"]))))

# Lines that share a point on the conic: ramified, and the tangent cone
# equation gains a solution.
x = SPHERE.param([1.0, 0.5j])
lines = [np.cross(x, [1, 0, 0]), np.cross(x, [0, 1, 0]), [0.2, 0.1, 1.0]]
print("ramified:", bool(is_ramified(lines, SPHERE)), "nullity:", tangent_nullity(lines, SPHERE))
