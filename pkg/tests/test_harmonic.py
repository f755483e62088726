import numpy as np
import pytest

from quadmultipole import (HPoly, Poly, SPHERE, dirichlet_solve, harmonic_decompose,
                           harmonic_split, laplacian_q, n_monomials, parse_poly, quadform_new)
from quadmultipole.harmonic import dirichlet_residuals

from oracles import coeffs_of, sym_laplacian, to_sympy_float, X, Y, Z


def rand_h(d, rng):
    return HPoly(d, rng.normal(size=n_monomials(d)) + 1j * rng.normal(size=n_monomials(d)))


def rand_q(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return quadform_new(A + A.T)


def test_z4_components():
    dec = harmonic_decompose(parse_poly("z^4").homogeneous(), SPHERE)
    assert [f.degree for f in dec.components] == [4, 2, 0]
    # z^4 = Y4 + Q f2 + Q^2 f0 with f0 = <z^4> over the sphere = 1/5
    assert abs(dec.components[2].coeffs[0] - 0.2) < 1e-12
    assert dec.resum().allclose(parse_poly("z^4").homogeneous(), 1e-12)


def test_split_of_q_times_harmonic():
    h = parse_poly("x*y").homogeneous()
    p = SPHERE.hpoly * h
    top, rest = harmonic_split(p, SPHERE)
    assert top.norm() < 1e-12
    assert rest.allclose(h, 1e-12)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_components_harmonic_symbolic(d, rng):
    Q = rand_q(rng)
    dec = harmonic_decompose(rand_h(d, rng), Q)
    for f in dec.components:
        if f.degree >= 2:
            lap = coeffs_of(sym_laplacian(to_sympy_float(f), Q.Binv), f.degree - 2)
            assert np.abs(lap).max() < 1e-8 * max(1.0, f.norm())


def test_dirichlet_example():
    # constant Laplacian 6 on the sphere with boundary value 1: P = Q
    P = dirichlet_solve(Poly.constant(6.0), Poly.constant(1.0), SPHERE)
    assert P.allclose(Poly.from_hpoly(SPHERE.hpoly), 1e-12)


def test_dirichlet_orders_agree(rng):
    for Q in [SPHERE, quadform_new(np.diag([1.0, 2.0, -1.0])), rand_q(rng)]:
        M = Poly([rand_h(k, rng) for k in range(4)])
        N = Poly([rand_h(k, rng) for k in range(5)])
        a = dirichlet_solve(M, N, Q, "top_down")
        b = dirichlet_solve(M, N, Q, "bottom_up")
        assert (a - b).norm() <= 1e-8 * max(1.0, a.norm())
        lap, surf, scale = dirichlet_residuals(a, M, N, Q, rng=rng)
        assert lap <= 1e-9 * max(1.0, M.norm())
        assert surf <= 1e-8 * scale


def test_dirichlet_bad_order():
    with pytest.raises(ValueError):
        dirichlet_solve(Poly.constant(1.0), Poly.constant(1.0), SPHERE, order="sideways")
