import numpy as np
import pytest

from quadmultipole import (Degenerate, DivisibleInput, ExplosionGuard, GenParcelling, HPoly,
                           Multipole, OffSurface, Poly, SPHERE, decompose,
                           enumerate_decompositions, evaluate_decomposition, harmonic_split,
                           leading_multipole, n_monomials, parse_poly, quadform_new)
from quadmultipole.sylvester import divisor_of, multipole_distance


def rand_poly(deg, rng, cplx=False):
    parts = []
    for k in range(deg + 1):
        c = rng.normal(size=n_monomials(k))
        if cplx:
            c = c + 1j * rng.normal(size=n_monomials(k))
        parts.append(HPoly(k, c))
    return Poly(parts)


def test_xy_sphere():
    dec = decompose(parse_poly("x*y"), SPHERE)
    top = dec.multipoles[2]
    assert abs(top.lam - 1) < 1e-12
    # sorted lexicographically, so e_y comes first
    np.testing.assert_allclose(top.vectors, [[0, 1, 0], [1, 0, 0]], atol=1e-12)
    assert len(enumerate_decompositions(parse_poly("x*y").homogeneous(), SPHERE)) == 3


def test_z2_tangent_parcelling():
    z2 = parse_poly("z^2").homogeneous()
    div = divisor_of(z2, SPHERE)
    assert div.multiplicities == [2, 2]
    m, r = leading_multipole(z2, SPHERE, GenParcelling.from_pairs([(0, 0), (1, 1)], 2), div, rng=0)
    # lines x +- i y, unit normalised: product is (x^2 + y^2)/2 so lam = -2
    assert abs(m.lam + 2) < 1e-10
    assert r.degree == 0 and abs(r.coeffs[0] - 1) < 1e-10
    assert len(enumerate_decompositions(z2, SPHERE)) == 2


def test_zonal_quadrupole():
    dec = decompose(parse_poly("x^2+y^2-2*z^2"), SPHERE)
    top = dec.multipoles[2]
    np.testing.assert_allclose(np.abs(np.real(top.vectors)), [[0, 0, 1], [0, 0, 1]], atol=1e-12)
    assert abs(abs(top.lam) - 3) < 1e-10
    assert abs(evaluate_decomposition(dec, [0, 0, 1]) + 2) < 1e-12
    with pytest.raises(OffSurface):
        evaluate_decomposition(dec, [0, 0, 2])


@pytest.mark.parametrize("policy", ["canonical_real", "canonical_complex"])
def test_roundtrip_several_surfaces(policy, rng):
    forms = [SPHERE, quadform_new(np.diag([1.0, 1.0, -1.0])), quadform_new(np.diag([1.0, 2.0, 3.0]) + 0.3)]
    for Q in forms:
        for deg in range(1, 6):
            p = rand_poly(deg, rng)
            assert decompose(p, Q, policy, rng=0).residual(p, rng=1) < 1e-8


def test_complex_input_complex_q(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    Q = quadform_new(A + A.T)
    p = rand_poly(4, rng, cplx=True)
    dec = decompose(p, Q, "canonical_complex", rng=0)
    assert dec.residual(p, rng=1) < 1e-8


def test_real_policy_gives_real_vectors(rng):
    p = rand_poly(5, rng)
    for m in decompose(p, SPHERE).multipoles:
        assert m.is_real()


def test_equivariance(rng):
    # x -> x M with M = A O A^-1 preserves Q; the unique real decomposition
    # of p(x M) must be the transform of the decomposition of p
    from quadmultipole.poly import substitute_linear
    Q = quadform_new(np.diag([1.0, 2.0, 3.0]) + 0.2)
    A = Q.reduction.A.real
    O, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    M = A @ O @ np.linalg.inv(A)
    np.testing.assert_allclose(M @ Q.B @ M.T, Q.B, atol=1e-12)
    p = HPoly(4, rng.normal(size=15))
    before = decompose(p, Q)
    after = decompose(substitute_linear(p, M), Q)
    for a, b in zip(before.multipoles, after.multipoles):
        assert substitute_linear(a.expand(), M).allclose(b.expand(), 1e-9)


def test_counts_generic(rng):
    for d, want in [(2, 3), (3, 15)]:
        h, _ = harmonic_split(HPoly(d, rng.normal(size=n_monomials(d)) + 1j * rng.normal(size=n_monomials(d))), SPHERE)
        assert len(enumerate_decompositions(h, SPHERE, rng=0)) == want


def test_errors():
    with pytest.raises(DivisibleInput):
        divisor_of(SPHERE.hpoly, SPHERE)
    with pytest.raises(ExplosionGuard):
        enumerate_decompositions(HPoly(6, np.arange(28) + 1.0), SPHERE, cap=10)
    with pytest.raises(Degenerate):
        decompose(parse_poly("x*y"), quadform_new(-np.eye(3)))


def test_multipole_json_roundtrip(rng):
    dec = decompose(rand_poly(3, rng), SPHERE)
    for m in dec.multipoles:
        back = Multipole.from_json(m.to_json())
        assert multipole_distance(m, back) < 1e-14


def test_distance_ignores_order_and_phase():
    a = Multipole.from_lines(2.0, [[1, 0, 0], [0, 1, 1j]])
    b = Multipole.from_lines(2.0, [[0, 1j, -1], [-1j, 0, 0]])
    assert multipole_distance(a, b) < 1e-12


def test_remainder_independent_of_probe(rng):
    h = HPoly(3, rng.normal(size=10))
    div = divisor_of(h, SPHERE)
    parc = GenParcelling.from_pairs([(0, 1), (2, 3), (4, 5)], 6)
    m1, r1 = leading_multipole(h, SPHERE, parc, div, rng=1)
    m2, r2 = leading_multipole(h, SPHERE, parc, div, rng=99)
    assert multipole_distance(m1, m2) < 1e-9
    assert r1.allclose(r2, 1e-9)
    # the remainder is exactly what Q absorbs
    assert (h - m1.expand()).allclose(SPHERE.hpoly * r1, 1e-9)
