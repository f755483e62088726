"""
Maxwell directions and harmonic (Fourier) components on quadrics.

Differentiating Q^(-1/2) along d directions gives a harmonic numerator of
degree d. Going backwards, the leading multipole vectors of a harmonic
recover those directions.
"""

import numpy as np

from quadmultipole import (SPHERE, fourier_components, harmonic_decompose, maxwell_apply,
                           maxwell_from_harmonic, parse_poly, quadform_new)
from quadmultipole.quadrature import inner_product

np.set_printoptions(precision=4, suppress=True)

N = maxwell_apply(SPHERE, [[0, 0, 1], [0, 0, 1]])
print("two z-derivatives:", N)

dirs, lam = maxwell_from_harmonic(parse_poly("x*y").homogeneous(), SPHERE)
print("directions of xy:", [d.real for d in dirs], "scale", lam)

# An ellipsoid and a polynomial with several harmonic components.
Q = quadform_new(np.diag([1.0, 2.0, 4.0]))
p = parse_poly("x^4 + y*z^2 + x*y + 3")
comps = fourier_components(p, Q)
for k, f in enumerate(comps.components):
    print(f"k = {k}: |f_k|^2 = {abs(inner_product(f, f, Q)):.6f}")
print("Parseval residual:", comps.relative_residual)

# The homogeneous version splits into Q-harmonic pieces times powers of Q.
dec = harmonic_decompose(parse_poly("z^4").homogeneous(), SPHERE)
for i, f in enumerate(dec.components):
    print(f"Q^{i} *", f)
