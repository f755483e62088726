"""
Q-harmonic decomposition and the polynomial Dirichlet problem on ``{Q = 1}``.

Every form of degree ``d`` splits uniquely as ``h + Q r`` with ``Delta_Q h = 0``.
Iterating the split on the remainder gives

    p = f_d + Q f_{d-2} + Q^2 f_{d-4} + ...

with each ``f_k`` Q-harmonic of degree ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import SolveFailure
from .poly import HPoly, Poly, homogenize_on_surface, parity_split
from .quadform import (
    laplacian_matrix,
    laplacian_q,
    q_multiplication_matrix,
    quadform_new,
    sample_surface,
)

__all__ = [
    "HarmonicDecomposition",
    "harmonic_split",
    "harmonic_decompose",
    "laplacian_poly",
    "dirichlet_solve",
    "dirichlet_residuals",
    "COND_LIMIT",
]

COND_LIMIT = 1e12


def _split_factor(Q, d):
    """Cached LU factorization of ``r -> Delta_Q(Q r)`` on ``V(d - 2)``."""
    def build():
        K = laplacian_matrix(Q, d) @ q_multiplication_matrix(Q, d - 2)
        cond = np.linalg.cond(K)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise SolveFailure(
                f"split system for degree {d} is ill-conditioned "
                f"(cond {cond:.3e})", witness={"degree": d, "cond": float(cond)})
        return sla.lu_factor(K)
    return Q._cached(("split_lu", d), build)


def _solve_split(Q, d, rhs):
    return sla.lu_solve(_split_factor(Q, d), rhs)


def harmonic_split(p, Q):
    """
    Split ``p = h + Q r`` with ``h`` Q-harmonic.

    Parameters
    ----------
    p : HPoly
        Form of degree ``d``.
    Q : QuadForm

    Returns
    -------
    h : HPoly
        Degree ``d``, annihilated by ``Delta_Q``.
    r : HPoly
        Degree ``d - 2``. For ``d < 2`` this is the zero constant.

    Raises
    ------
    SolveFailure
        If the split system is numerically singular.
    """
    Q = quadform_new(Q)
    d = p.degree
    if d < 2:
        return p, HPoly(0)
    rhs = laplacian_matrix(Q, d) @ p.coeffs
    r = HPoly(d - 2, _solve_split(Q, d, rhs))
    h = HPoly(d, p.coeffs - q_multiplication_matrix(Q, d - 2) @ r.coeffs)
    return h, r


@dataclass(frozen=True)
class HarmonicDecomposition:
    """
    Components ``f_k`` of a form of degree ``degree``.

    ``components[i]`` has degree ``degree - 2 i`` and multiplies ``Q^i``.
    """

    degree: int
    components: tuple
    Q: object

    def levels(self):
        """Pairs ``(k, f_k)`` from the top degree down."""
        return [(c.degree, c) for c in self.components]

    def component(self, k):
        for c in self.components:
            if c.degree == k:
                return c
        raise KeyError(k)

    def resum(self):
        """Rebuild ``sum_i Q^i f_{d - 2i}`` as an HPoly of degree ``degree``."""
        q = self.Q.hpoly
        out = HPoly(self.degree)
        for i, f in enumerate(self.components):
            out = out + (q ** i) * f
        return out

    def laplacian_residuals(self):
        return [laplacian_q(self.Q, f).norm() for f in self.components]


def harmonic_decompose(p, Q):
    """
    Decompose ``p`` into Q-harmonic pieces by repeated splitting.

    Examples
    --------
    >>> from quadmultipole import parse_poly, SPHERE
    >>> dec = harmonic_decompose(parse_poly("z^4").homogeneous(), SPHERE)
    >>> [f.degree for f in dec.components]
    [4, 2, 0]
    """
    Q = quadform_new(Q)
    comps = []
    rest = p
    while True:
        h, r = harmonic_split(rest, Q)
        comps.append(h)
        if rest.degree < 2:
            break
        rest = r
    return HarmonicDecomposition(p.degree, tuple(comps), Q)


def laplacian_poly(Q, P):
    """Apply ``Delta_Q`` part by part to an inhomogeneous polynomial."""
    parts = {k - 2: laplacian_q(Q, h) for k, h in enumerate(P.parts) if k >= 2}
    return Poly.from_parts(parts)


def _particular_top_down(Q, k, m):
    """Minimum-norm ``T`` of degree ``k`` with ``Delta_Q T = m``."""
    L = laplacian_matrix(Q, k)
    t, *_ = np.linalg.lstsq(L, m.coeffs, rcond=None)
    return t


def _particular_bottom_up(Q, k, m):
    """``T = Q S`` of degree ``k`` with ``Delta_Q(Q S) = m``."""
    s = _solve_split(Q, k, m.coeffs)
    return q_multiplication_matrix(Q, k - 2) @ s


def dirichlet_solve(M, N, Q, order="top_down"):
    """
    Solve ``Delta_Q P = M`` with ``P = N`` on the surface ``{Q = 1}``.

    The particular solution ``T`` is built degree by degree; ``order``
    selects the minimum-norm graded solve (``"top_down"``) or the solve
    inside ``Q V(k - 2)`` (``"bottom_up"``). The two differ by a harmonic
    term that the boundary correction removes, so both give the same ``P``.

    Parameters
    ----------
    M, N : Poly or HPoly
    Q : QuadForm
    order : {"top_down", "bottom_up"}

    Returns
    -------
    Poly

    Raises
    ------
    SolveFailure
        If a graded solve leaves a residual above ``1e-9 ||M_k||``.
    """
    Q = quadform_new(Q)
    M = M if isinstance(M, Poly) else Poly.from_hpoly(M)
    N = N if isinstance(N, Poly) else Poly.from_hpoly(N)
    if order not in ("top_down", "bottom_up"):
        raise ValueError(f"unknown order {order!r}")
    degrees = range(M.degree, -1, -1) if order == "top_down" else range(M.degree + 1)
    T = {}
    for j in degrees:
        m = M.part(j)
        if not np.any(m.coeffs):
            continue
        k = j + 2
        if order == "top_down":
            t = _particular_top_down(Q, k, m)
        else:
            t = _particular_bottom_up(Q, k, m)
        resid = np.linalg.norm(laplacian_matrix(Q, k) @ t - m.coeffs)
        if resid > 1e-9 * max(1.0, m.norm()):
            raise SolveFailure(f"graded solve at degree {k} left residual {resid:.3e}",
                               witness={"degree": k, "residual": float(resid)})
        T[k] = HPoly(k, t)
    T = Poly.from_parts(T)

    R = {}
    for piece in parity_split(N - T):
        if not piece.occupied():
            continue
        H = homogenize_on_surface(piece, Q)
        for f in harmonic_decompose(H, Q).components:
            R[f.degree] = R.get(f.degree, HPoly(f.degree)) + f
    return T + Poly.from_parts(R)


def dirichlet_residuals(P, M, N, Q, n=50, rng=None):
    """
    Diagnostics for a Dirichlet solution.

    Returns
    -------
    lap : float
        ``||Delta_Q P - M||`` in coefficient norm.
    surf : float
        ``max |P - N|`` over ``n`` random points of ``{Q = 1}``.
    scale : float
        ``max(1, max |P|, max |N|)`` over the same points.
    """
    Q = quadform_new(Q)
    M = M if isinstance(M, Poly) else Poly.from_hpoly(M)
    N = N if isinstance(N, Poly) else Poly.from_hpoly(N)
    lap = (laplacian_poly(Q, P) - M).norm()
    pts = sample_surface(Q, n, rng)
    pv, nv = P(pts), N(pts)
    surf = float(np.max(np.abs(pv - nv)))
    scale = float(max(1.0, np.max(np.abs(pv)), np.max(np.abs(nv))))
    return lap, surf, scale

