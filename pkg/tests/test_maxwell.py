import numpy as np
import pytest

from quadmultipole import (HPoly, NotHarmonic, SPHERE, harmonic_split, laplacian_q,
                           maxwell_apply, maxwell_from_harmonic, maxwell_sum, n_monomials,
                           parse_poly, quadform_new)
from quadmultipole.maxwell import maxwell_resum

import sympy as sp
from oracles import X, Y, Z, coeffs_of


def symbolic_maxwell(B, dirs):
    """Numerator of the iterated derivative of Q^(-1/2), by sympy."""
    v = sp.Matrix([X, Y, Z])
    Q = (v.T * sp.Matrix(B) * v)[0, 0]
    f = Q ** sp.Rational(-1, 2)
    for u in dirs:
        f = sum(sp.nsimplify(u[i]) * sp.diff(f, s) for i, s in enumerate((X, Y, Z)))
    d = len(dirs)
    return sp.expand(sp.simplify(f * Q ** sp.Rational(2 * d + 1, 2)))


def test_zonal():
    N = maxwell_apply(SPHERE, [[0, 0, 1], [0, 0, 1]])
    target = parse_poly("x^2+y^2-2*z^2").homogeneous()
    lam = np.vdot(target.coeffs, N.coeffs) / np.vdot(target.coeffs, target.coeffs)
    assert np.linalg.norm(N.coeffs - lam * target.coeffs) <= 1e-10 * N.norm()


@pytest.mark.parametrize("dirs", [[[1, 0, 0]], [[0, 0, 1], [0, 0, 1]], [[1, 2, 0], [0, 1, -1], [1, 0, 1]]])
def test_recursion_matches_sympy(dirs):
    B = [[2, 0, 1], [0, 1, 0], [1, 0, 3]]
    Q = quadform_new(B)
    got = maxwell_apply(Q, dirs)
    want = coeffs_of(symbolic_maxwell(B, dirs), len(dirs))
    np.testing.assert_allclose(got.coeffs, want, atol=1e-10)


def test_output_is_harmonic(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    Q = quadform_new(A + A.T)
    N = maxwell_apply(Q, rng.normal(size=(4, 3)))
    assert laplacian_q(Q, N).norm() < 1e-9 * N.norm()


def test_from_harmonic_examples():
    dirs, lam = maxwell_from_harmonic(parse_poly("x^2+y^2-2*z^2").homogeneous(), SPHERE)
    for u in dirs:
        assert abs(abs(u[2]) - 1) < 1e-12
    assert abs(abs(lam) - 1) < 1e-10
    dirs, lam = maxwell_from_harmonic(parse_poly("x").homogeneous(), SPHERE)
    assert abs(lam + 1) < 1e-12


def test_from_harmonic_random(rng):
    forms = [SPHERE, quadform_new(np.diag([1.0, 2.0, 3.0])), quadform_new(np.diag([1.0, 1.0, -1.0]))]
    for Q in forms:
        for d in range(1, 5):
            h, _ = harmonic_split(HPoly(d, rng.normal(size=n_monomials(d))), Q)
            dirs, lam = maxwell_from_harmonic(h, Q, rng=0)
            fit = lam * maxwell_apply(Q, dirs)
            assert np.linalg.norm(fit.coeffs - h.coeffs) <= 1e-7 * h.norm()


def test_not_harmonic():
    with pytest.raises(NotHarmonic):
        maxwell_from_harmonic(parse_poly("z^2").homogeneous(), SPHERE)


def test_sum_resums(rng):
    p = HPoly(4, rng.normal(size=15))
    terms = maxwell_sum(p, SPHERE, rng=0)
    assert maxwell_resum(terms, SPHERE, 4).allclose(p, 1e-10)
    assert sorted(k for k, _, _ in terms) == [0, 1, 2]
