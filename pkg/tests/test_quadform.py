import numpy as np
import pytest
import sympy as sp

from quadmultipole import (Degenerate, HPoly, SPHERE, conic_param, laplacian_q,
                           product_rule_constant, quadform_new, reduce_to_squares, sample_surface)

from oracles import X, Y, Z, coeffs_of, sym_laplacian, to_sympy_float


def random_forms(rng, n=5):
    out = [SPHERE, quadform_new(np.diag([1.0, 1.0, -1.0])), quadform_new(np.diag([1.0, 2.0, 3.0]))]
    while len(out) < n:
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        out.append(quadform_new(A + A.T))
    return out


def test_degenerate_rejected():
    with pytest.raises(Degenerate):
        quadform_new(np.diag([1.0, 1.0, 0.0]))
    with pytest.raises(Degenerate):
        quadform_new("x^2")


def test_from_string_and_matrix_agree():
    assert quadform_new("x^2 + 2*x*y + 3*z^2") == quadform_new([[1, 1, 0], [1, 0, 0], [0, 0, 3]])


def test_reduction_rebuilds_b(rng):
    for Q in random_forms(rng, 8):
        red = reduce_to_squares(Q)
        np.testing.assert_allclose(red.A @ red.A.T, Q.B, atol=1e-10)


def test_conic_param_on_conic(rng):
    for Q in random_forms(rng, 8):
        alpha = conic_param(Q)
        for _ in range(5):
            u = rng.normal(size=2) + 1j * rng.normal(size=2)
            v = alpha(u)
            assert abs(Q(v)) < 1e-10 * np.vdot(v, v).real


def test_laplacian_matches_symbolic(rng):
    for Q in random_forms(rng, 4):
        p = HPoly(4, rng.normal(size=15) + 1j * rng.normal(size=15))
        want = coeffs_of(sym_laplacian(to_sympy_float(p), Q.Binv), 2)
        np.testing.assert_allclose(laplacian_q(Q, p).coeffs, want, atol=1e-9)


def test_sample_surface(rng):
    for Q in random_forms(rng, 6):
        pts = sample_surface(Q, 20, rng)
        np.testing.assert_allclose([Q(v) for v in pts], 1.0, atol=1e-12)


@pytest.mark.parametrize("m", range(5))
def test_product_rule_constant(m):
    T = sp.Add(*[sp.Symbol(f"a{i}") * X**(m - i) * Y**i for i in range(m + 1)])
    Q = X**2 + Y**2 + Z**2
    lap = lambda e: sp.diff(e, X, 2) + sp.diff(e, Y, 2) + sp.diff(e, Z, 2)
    assert sp.expand(lap(Q * T) - Q * lap(T) - product_rule_constant(m) * T) == 0


def test_signature():
    assert SPHERE.signature() == (3, 0)
    assert quadform_new(np.diag([1.0, -1.0, -1.0])).signature() == (1, 2)
    assert SPHERE.is_definite
