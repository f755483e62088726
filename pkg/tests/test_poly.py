import numpy as np
import pytest
import sympy as sp

from quadmultipole import (HPoly, Poly, ParityError, PolynomialSyntaxError, NotDivisible,
                           divide_by_form, format_poly, homogenize_on_surface, n_monomials,
                           dim_up_to, parity_split, parse_poly, SPHERE)
from quadmultipole.poly import monomial_exponents

from oracles import X, Y, Z, coeffs_of, exponents, to_sympy_float


def rand_h(d, rng, cplx=True):
    c = rng.normal(size=n_monomials(d))
    if cplx:
        c = c + 1j * rng.normal(size=n_monomials(d))
    return HPoly(d, c)


@pytest.mark.parametrize("d", range(9))
def test_monomial_counts(d):
    assert n_monomials(d) == (d + 1) * (d + 2) // 2
    assert [tuple(int(a) for a in e) for e in monomial_exponents(d)] == exponents(d)
    assert dim_up_to(d) == sum(n_monomials(k) for k in range(d + 1))


def test_multiplication_matches_sympy(rng):
    for a, b in [(1, 2), (2, 3), (0, 4), (3, 3)]:
        p, q = rand_h(a, rng), rand_h(b, rng)
        want = coeffs_of(to_sympy_float(p) * to_sympy_float(q), a + b)
        np.testing.assert_allclose((p * q).coeffs, want, atol=1e-12)


def test_evaluation_matches_sympy(rng):
    p = rand_h(4, rng)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    want = complex(to_sympy_float(p).subs({X: v[0], Y: v[1], Z: v[2]}))
    assert abs(p(v) - want) < 1e-10


def test_parse_and_format_roundtrip():
    p = parse_poly("x^2 - 3*x*y + (2+1i)*z^2 - 4")
    assert p.part(2).coeff(2, 0, 0) == 1
    assert p.part(2).coeff(1, 1, 0) == -3
    assert p.part(2).coeff(0, 0, 2) == 2 + 1j
    assert p.part(0).coeffs[0] == -4
    assert parse_poly(format_poly(p)).allclose(p, 1e-14)


def test_parse_implicit_multiplication():
    assert parse_poly("2z^2").allclose(parse_poly("2*z^2"))
    assert parse_poly("(2i) x y").allclose(parse_poly("(2i)*x*y"))


@pytest.mark.parametrize("bad", ["x^", "x + * y", "(x", "w^2", "x^-1", ""])
def test_parse_errors(bad):
    with pytest.raises(PolynomialSyntaxError):
        parse_poly(bad)


def test_immutable():
    p = HPoly.linear([1, 2, 3])
    with pytest.raises(AttributeError):
        p.degree = 3
    with pytest.raises(ValueError):
        p.coeffs[0] = 5


def test_parity_split_and_homogenize():
    p = parse_poly("x^3 + y + 2 + z^2")
    even, odd = parity_split(p)
    assert even.occupied() == [0, 2]
    assert odd.occupied() == [1, 3]
    with pytest.raises(ParityError):
        homogenize_on_surface(p, SPHERE)
    H = homogenize_on_surface(even, SPHERE)
    want = coeffs_of(Z**2 + 2 * (X**2 + Y**2 + Z**2), 2)
    np.testing.assert_allclose(H.coeffs, want)


def test_divide_by_form(rng):
    q = SPHERE.hpoly
    s = rand_h(3, rng)
    np.testing.assert_allclose(divide_by_form(q * s, q).coeffs, s.coeffs, atol=1e-12)
    with pytest.raises(NotDivisible):
        divide_by_form(q * s + HPoly.monomial(5, 0, 0), q)


def test_derivatives_match_sympy(rng):
    p = rand_h(3, rng)
    e = to_sympy_float(p)
    for var, s in zip(range(3), (X, Y, Z)):
        np.testing.assert_allclose(p.derivative(var).coeffs, coeffs_of(sp.diff(e, s), 2), atol=1e-12)
