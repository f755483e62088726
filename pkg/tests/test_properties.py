import numpy as np
from hypothesis import given, settings, strategies as st

from quadmultipole import (HPoly, Multipole, Poly, SPHERE, count_parcellings, format_poly,
                           harmonic_decompose, n_monomials, parse_poly, quadform_new)
from quadmultipole.sylvester import multipole_distance

from oracles import multigraph_count

small = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def hpolys(draw, max_degree=4, cplx=True):
    d = draw(st.integers(0, max_degree))
    n = n_monomials(d)
    re = draw(st.lists(small, min_size=n, max_size=n))
    im = draw(st.lists(small, min_size=n, max_size=n)) if cplx else [0.0] * n
    return HPoly(d, np.array(re) + 1j * np.array(im))


@st.composite
def quadforms(draw):
    diag = draw(st.lists(st.floats(0.5, 3), min_size=3, max_size=3))
    off = draw(st.lists(st.floats(-0.2, 0.2), min_size=3, max_size=3))
    B = np.diag(diag)
    B[0, 1] = B[1, 0] = off[0]
    B[0, 2] = B[2, 0] = off[1]
    B[1, 2] = B[2, 1] = off[2]
    return quadform_new(B)


@given(hpolys(), hpolys(), hpolys())
@settings(max_examples=40, deadline=None)
def test_product_commutative_associative(a, b, c):
    assert (a * b).allclose(b * a, 1e-9)
    assert ((a * b) * c).allclose(a * (b * c), 1e-8 * max(1.0, (a * b * c).norm()))


@given(hpolys(cplx=False))
@settings(max_examples=40, deadline=None)
def test_parse_format_identity(p):
    q = Poly.from_hpoly(p)
    assert parse_poly(format_poly(q)).allclose(q, 1e-12)


@given(st.lists(st.integers(1, 3), min_size=1, max_size=5).filter(lambda m: sum(m) % 2 == 0))
@settings(max_examples=40, deadline=None)
def test_parcelling_count_bruteforce(mu):
    assert count_parcellings(mu) == multigraph_count(mu)


@given(hpolys(max_degree=6), quadforms())
@settings(max_examples=25, deadline=None)
def test_harmonic_resum(p, Q):
    dec = harmonic_decompose(p, Q)
    assert dec.resum().allclose(p, 1e-9 * max(1.0, p.norm()))
    assert max(dec.laplacian_residuals(), default=0.0) <= 1e-8 * max(1.0, p.norm())


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4), small)
@settings(max_examples=40, deadline=None)
def test_canonical_idempotent(vecs, lam):
    vecs = np.array(vecs)
    if np.any(np.linalg.norm(vecs, axis=1) < 1e-3) or abs(lam) < 1e-3:
        return
    m = Multipole.from_lines(lam, vecs, mode="real")
    again = m.canonical("real")
    assert multipole_distance(m, again) < 1e-12
    np.testing.assert_allclose(m.vectors, again.vectors, atol=1e-14)
    assert m.expand().allclose(Multipole(len(vecs), lam, vecs).expand(), 1e-9 * abs(lam) * np.prod(np.linalg.norm(vecs, axis=1)) + 1e-12)
