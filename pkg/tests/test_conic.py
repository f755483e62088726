import numpy as np
import pytest

from quadmultipole import (BinaryForm, CoincidentPoints, HPoly, ProjPoint, SPHERE, ZeroForm,
                           line_through, proj_roots, quadform_new, restrict_to_conic, tangent_line)
from quadmultipole.conic import chordal


def form_from_roots(roots):
    """Binary form with the given (u0:u1) roots, built by direct expansion."""
    c = np.array([1.0 + 0j])
    for u0, u1 in roots:
        c = np.convolve(c, [u1, -u0])
    return BinaryForm(len(roots), c)


def matched(found, want, tol):
    pts = [p for p, m in found.points for _ in range(m)]
    used = set()
    for w in want:
        w = ProjPoint.of(*w)
        j = min((k for k in range(len(pts)) if k not in used), key=lambda k: chordal(pts[k], w))
        if chordal(pts[j], w) > tol:
            return False
        used.add(j)
    return len(used) == len(pts)


def test_simple_roots(rng):
    for d in range(1, 13):
        roots = [tuple(rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(d)]
        div = proj_roots(form_from_roots(roots))
        assert div.degree == d
        assert matched(div, roots, 1e-8)


def test_root_at_infinity():
    div = proj_roots(form_from_roots([(0, 1), (1, 2)]))
    assert div.degree == 2
    assert any(abs(p.u0) < 1e-12 for p in div.locations)


@pytest.mark.parametrize("mult", [2, 3, 4])
def test_multiple_roots(mult, rng):
    r = tuple(rng.normal(size=2) + 1j * rng.normal(size=2))
    s = tuple(rng.normal(size=2) + 1j * rng.normal(size=2))
    div = proj_roots(form_from_roots([r] * mult + [s]))
    assert sorted(div.multiplicities) == [1, mult]


def test_zero_form():
    with pytest.raises(ZeroForm):
        proj_roots(BinaryForm(2, [0, 0, 0]))
    assert restrict_to_conic(SPHERE.hpoly, SPHERE.param).is_zero()


def test_restriction_vanishes_on_line_points(rng):
    Q = quadform_new(np.diag([1.0, 2.0, 3.0]))
    p = HPoly(3, rng.normal(size=10))
    b = restrict_to_conic(p, Q.param)
    assert b.degree == 6
    for pt in proj_roots(b).locations:
        v = Q.param(pt.vector)
        assert abs(p(v)) < 1e-8 * np.linalg.norm(v) ** 3 * p.norm()


def test_lines(rng):
    a = ProjPoint.of(1.0, 0.3 + 0.2j)
    b = ProjPoint.of(0.5j, 1.0)
    ell = line_through(a, b, SPHERE.param)
    for pt in (a, b):
        assert abs(ell @ SPHERE.param(pt.vector)) < 1e-12
    with pytest.raises(CoincidentPoints):
        line_through(a, a, SPHERE.param)
    t = tangent_line(a, SPHERE, SPHERE.param)
    # tangent line meets the conic in a double point
    div = proj_roots(restrict_to_conic(HPoly.linear(t), SPHERE.param))
    assert div.multiplicities == [2]
