"""
Multipole vectors of a few polynomials on the unit sphere.

Run with ``python demos/multipoles_on_the_sphere.py``.
"""

import numpy as np

from quadmultipole import SPHERE, decompose, enumerate_decompositions, parse_poly, quadform_new

np.set_printoptions(precision=4, suppress=True)

# A zonal quadrupole. Its two multipole vectors both point along the z axis
# and the constant term carries the mean value.
p = parse_poly("x^2 + y^2 - 2*z^2")
dec = decompose(p, SPHERE)
for m in dec.multipoles:
    print(f"degree {m.degree}: lambda = {m.lam.real:+.4f}")
    for v in m.vectors:
        print("   ", v.real)

# Round trip: re-expanding the multipoles gives p back on the surface.
print("residual on the sphere:", dec.residual(p))

# A random cubic, decomposed with the real policy twice with different
# probes. On the sphere the real decomposition is unique.
rng = np.random.default_rng(7)
cubic = parse_poly("0.3*x^3 - 1.2*x*y*z + 0.7*y^2*z + 0.1*z^3 + 2*x - y + 0.5")
a = decompose(cubic, SPHERE, rng=1)
b = decompose(cubic, SPHERE, rng=2)
print("same leading vectors:", np.allclose(a.multipoles[3].vectors, b.multipoles[3].vectors))

# Over the complex numbers there are many factorizations. For a generic
# harmonic of degree 3 there are 15 of them, one per pairing of the six
# points where it meets the conic {Q = 0}.
h = parse_poly("x*y*z").homogeneous()
print("complex leading multipoles of xyz:", len(enumerate_decompositions(h, SPHERE)))

# The same machinery works on other quadrics, here a hyperboloid of one sheet.
hyp = quadform_new("x^2 + y^2 - z^2")
dec = decompose(cubic, hyp)
print("residual on the hyperboloid:", dec.residual(cubic))
