import numpy as np
import pytest
from scipy import integrate

from quadmultipole import (HPoly, Poly, RankDeficiency, SPHERE, SphereQuadrature, decompose,
                           fourier_components, harmonic_basis, inner_product, n_monomials,
                           parse_poly, quadform_new)
from quadmultipole.quadrature import (fourier_from_samples, mc_inner_product,
                                      multipole_norm_bound_check, sphere_monomial_integral)

from oracles import sphere_integral_numeric

P = parse_poly


def rand_poly(deg, rng):
    return Poly([HPoly(k, rng.normal(size=n_monomials(k))) for k in range(deg + 1)])


def rand_q(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return quadform_new(A + A.T)


@pytest.mark.parametrize("abc", [(0, 0, 0), (2, 0, 0), (2, 2, 0), (4, 0, 2), (1, 0, 0), (2, 2, 2)])
def test_monomial_integrals(abc):
    a, b, c = abc
    want = sphere_integral_numeric(lambda x, y, z: x**a * y**b * z**c).real
    assert abs(sphere_monomial_integral(a, b, c) - want) < 1e-9


def test_quadrature_exact_to_order():
    quad = SphereQuadrature.of(6)
    pts = quad.points
    vals = pts[:, 0] ** 4 * pts[:, 1] ** 2
    assert abs(quad.integrate(vals) - sphere_monomial_integral(4, 2, 0)) < 1e-13


def test_inner_product_examples():
    assert abs(inner_product(P("x"), P("y"), SPHERE)) < 1e-14
    assert abs(inner_product(P("z"), P("z"), SPHERE) - 4 * np.pi / 3) < 1e-13
    assert abs(inner_product(P("x^2+y^2-2*z^2"), P("x^2+y^2+z^2"), SPHERE)) < 1e-13


def test_inner_product_ellipsoid_against_scipy():
    # on x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 the chart pulls back to the unit sphere
    Q = quadform_new(np.diag([1.0, 1 / 4.0, 1 / 9.0]))
    f, g = P("x*z + y"), P("z^2 + 1")
    want = sphere_integral_numeric(lambda x, y, z: (x * 3 * z + 2 * y) * (9 * z * z + 1)).real
    assert abs(inner_product(f, g, Q) - want) < 1e-9


def test_basis(rng):
    for Q in (SPHERE, quadform_new(np.diag([1.0, 2.0, 3.0])), rand_q(rng)):
        for k in range(6):
            hb = harmonic_basis(k, Q)
            assert len(hb.basis) == 2 * k + 1
            assert np.abs(hb.gram() - np.eye(2 * k + 1)).max() < 1e-9


def test_basis_rank_guard():
    with pytest.raises(RankDeficiency):
        harmonic_basis(3, SPHERE, order=1)


def test_z2_components():
    r = fourier_components(P("z^2"), SPHERE)
    assert abs(r.components[0].coeffs[0] - 1 / 3) < 1e-13
    top = r.components[2]
    np.testing.assert_allclose(top.coeffs, HPoly(2, [-1 / 3, 0, 0, -1 / 3, 0, 2 / 3]).coeffs, atol=1e-13)


def test_parseval(rng):
    for Q in (SPHERE, quadform_new(np.diag([1.0, 2.0, 3.0])), rand_q(rng)):
        for deg in range(7):
            r = fourier_components(rand_poly(deg, rng), Q)
            assert r.relative_residual <= 1e-10


def test_multiplication_by_q_isometry(rng):
    Q = quadform_new(np.diag([1.0, 2.0, 0.5]))
    f, g = HPoly(2, rng.normal(size=6)), HPoly(3, rng.normal(size=10))
    a = inner_product(Q.hpoly * f, Q.hpoly * g, Q)
    assert abs(a - inner_product(f, g, Q)) < 1e-12


def test_from_samples():
    rng = np.random.default_rng(3)
    phi = np.arccos(rng.uniform(-1, 1, size=800))
    theta = rng.uniform(0, 2 * np.pi, size=800)
    x, y, z = np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)
    r = fourier_from_samples(theta, phi, x * y + z, SPHERE, kmax=3)
    assert abs(r.components[1].coeffs[2] - 1) < 1e-10
    assert np.abs(r.components[3].coeffs).max() < 1e-10


def test_monte_carlo_agrees(rng):
    v, se = mc_inner_product(P("x"), P("x"), SPHERE, n=200_000, rng=0)
    exact = np.exp(-1) * 4 * np.pi / 3
    assert abs(v - exact) < 5 * se
    Q = quadform_new(np.diag([1.0, 1.0, -1.0]))
    v, se = mc_inner_product(P("1"), P("1"), Q, n=200_000, rng=0)
    exact = integrate.quad(lambda w: 2 * np.pi * np.sqrt(1 + w * w) * np.sqrt(1 + w * w / (1 + w * w))
                           * np.exp(-(1 + 2 * w * w)), -np.inf, np.inf)[0]
    assert abs(v - exact) < 5 * se


def test_norm_bound_ratio():
    f = P("x*y")
    dec = decompose(f, SPHERE)
    out = multipole_norm_bound_check([f.homogeneous()], [dec.multipoles[2]], SPHERE)
    assert abs(out[0]["ratio"] - 1) < 1e-12
