"""
Inner products on the totally real surface of ``Q`` and harmonic Fourier
analysis.

With ``B = A A^T`` the substitution ``x = s A^-1`` turns ``Q`` into the sum of
squares, so real unit vectors ``s`` give points of ``{Q = 1}``. Functions
are pulled back to the unit sphere and integrated there against the area
measure. Because ``Q = 1`` at every node, multiplication by ``Q`` is an
isometry of this inner product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Degenerate, RankDeficiency
from .harmonic import harmonic_split
from .poly import HPoly, Poly, format_poly, monomial_exponents
from .quadform import quadform_new

__all__ = [
    "SphereQuadrature",
    "HarmonicBasis",
    "FourierResult",
    "sphere_monomial_integral",
    "surface_nodes",
    "inner_product",
    "norm",
    "harmonic_basis",
    "fourier_components",
    "fourier_from_samples",
    "mc_inner_product",
    "multipole_norm_bound_check",
]


@dataclass(frozen=True)
class SphereQuadrature:
    """
    Product rule on the unit sphere.

    Gauss-Legendre with ``order`` nodes in ``cos(phi)`` times the trapezoid
    rule with ``2 order`` nodes in ``theta``; exact for polynomials of total
    degree ``<= 2 order - 1``.
    """

    order: int
    theta: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, order):
        order = int(order)
        if order < 1:
            raise ValueError("order must be positive")
        t, wt = np.polynomial.legendre.leggauss(order)
        m = 2 * order
        th = 2 * np.pi * np.arange(m) / m
        T, TH = np.meshgrid(t, th, indexing="ij")
        W = np.outer(wt, np.full(m, 2 * np.pi / m))
        return cls(order, TH.ravel(), np.arccos(T).ravel(), W.ravel())

    @property
    def points(self):
        """Nodes as an ``(n, 3)`` array of unit vectors."""
        s = np.sin(self.phi)
        return np.stack([s * np.cos(self.theta), s * np.sin(self.theta), np.cos(self.phi)], axis=1)

    def integrate(self, values):
        return complex(np.sum(self.weights * values))

    def __len__(self):
        return self.weights.size


def _dfact(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def sphere_monomial_integral(a, b, c):
    """Exact integral of ``x^a y^b z^c`` over the unit sphere."""
    if a % 2 or b % 2 or c % 2:
        return 0.0
    return 4 * np.pi * _dfact(a - 1) * _dfact(b - 1) * _dfact(c - 1) / _dfact(a + b + c + 1)


def surface_nodes(Q, quad):
    """Quadrature nodes mapped onto the totally real part of ``{Q = 1}``."""
    Q = quadform_new(Q)
    return quad.points @ Q.reduction.Ainv


def _values(f, Q, quad):
    if isinstance(f, (HPoly, Poly)):
        return np.asarray(f(surface_nodes(Q, quad)), dtype=np.complex128)
    if callable(f):
        return np.asarray(f(surface_nodes(Q, quad)), dtype=np.complex128)
    v = np.asarray(f, dtype=np.complex128)
    if v.shape != (len(quad),):
        raise ValueError(f"expected {len(quad)} samples, got shape {v.shape}")
    return v


def _default_order(*fs):
    degs = [f.degree for f in fs if isinstance(f, (HPoly, Poly))]
    return (max(degs) if degs else 4) + 2


def inner_product(f, g, Q, order=None, real=False):
    """
    Hermitian inner product ``int f conj(g)`` over the totally real surface.

    Parameters
    ----------
    f, g : HPoly, Poly, callable or array of node values
    Q : QuadForm
    order : int, optional
        Quadrature order; defaults to the larger degree plus 2.
    real : bool
        Return the real part only.

    Examples
    --------
    >>> from quadmultipole import SPHERE, parse_poly
    >>> z = parse_poly("z")
    >>> round(inner_product(z, z, SPHERE).real / np.pi, 12)
    1.333333333333
    """
    quad = SphereQuadrature.of(order or _default_order(f, g))
    val = quad.integrate(_values(f, Q, quad) * np.conj(_values(g, Q, quad)))
    return val.real if real else val


def norm(f, Q, order=None):
    return float(np.sqrt(max(inner_product(f, f, Q, order).real, 0.0)))


@dataclass(frozen=True)
class HarmonicBasis:
    """Orthonormal basis of the Q-harmonic forms of one degree."""

    degree: int
    basis: tuple
    Q: object

    def gram(self, order=None):
        n = len(self.basis)
        G = np.empty((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                G[i, j] = inner_product(self.basis[i], self.basis[j], self.Q, order)
        return G

    def __len__(self):
        return len(self.basis)


def harmonic_basis(k, Q, order=None, tol=1e-9):
    """
    Orthonormal basis of degree-``k`` Q-harmonics.

    Monomials are projected onto the harmonic part and orthonormalized by
    Gram-Schmidt (two passes) in the surface inner product.

    Raises
    ------
    RankDeficiency
        If fewer than ``2k + 1`` independent harmonics are found.
    """
    Q = quadform_new(Q)
    order = order or k + 2
    quad = SphereQuadrature.of(order)
    X = surface_nodes(Q, quad)
    w = quad.weights

    def ip(a, b):
        return np.sum(w * a * np.conj(b))

    basis, vals = [], []
    for e in monomial_exponents(k):
        h, _ = harmonic_split(HPoly.monomial(*e), Q)
        v = h(X)
        nrm0 = np.sqrt(abs(ip(v, v)))
        if nrm0 == 0:
            continue
        for _ in range(2):
            for b, bv in zip(basis, vals):
                c = ip(v, bv)
                h = h - b * c
                v = v - c * bv
        nrm = np.sqrt(abs(ip(v, v)))
        if nrm <= tol * nrm0:
            continue
        basis.append(h / nrm)
        vals.append(v / nrm)
    if len(basis) != 2 * k + 1:
        raise RankDeficiency(f"found {len(basis)} harmonics of degree {k}, expected {2 * k + 1}",
                             witness={"degree": k, "found": len(basis)})
    return HarmonicBasis(k, tuple(basis), Q)


@dataclass(frozen=True)
class FourierResult:
    """Harmonic components ``f_k`` with the Parseval balance."""

    components: tuple
    norm2: float
    parseval_residual: float

    @property
    def relative_residual(self):
        return self.parseval_residual / self.norm2 if self.norm2 > 0 else 0.0

    def to_json(self):
        return {
            "components": [{"degree": f.degree, "poly": format_poly(f),
                            "norm": float(np.linalg.norm(f.coeffs))} for f in self.components],
            "norm2": self.norm2,
            "parseval_residual": self.parseval_residual,
        }


def _clean(h, scale, tol=1e-13):
    """Drop round-off coefficients (relative to ``scale``)."""
    c = h.coeffs.copy()
    c.real[np.abs(c.real) < tol * scale] = 0.0
    c.imag[np.abs(c.imag) < tol * scale] = 0.0
    return HPoly(h.degree, c)


def fourier_components(f, Q, kmax=None, order=None):
    """
    Harmonic Fourier components ``f_0 .. f_kmax`` of ``f`` on the surface.

    ``f`` may be a polynomial, a callable on ``(n, 3)`` surface points, or
    an array of values at the nodes of ``SphereQuadrature.of(order)``.
    The residual ``||f||^2 - sum ||f_k||^2`` is zero for polynomials of
    degree ``<= kmax`` up to quadrature error.
    """
    Q = quadform_new(Q)
    if order is None:
        order = _default_order(f)
    if kmax is None:
        kmax = f.degree if isinstance(f, (HPoly, Poly)) else order - 2
    quad = SphereQuadrature.of(order)
    fv = _values(f, Q, quad)
    norm2 = float(np.sum(quad.weights * np.abs(fv) ** 2))
    comps, total = [], 0.0
    for k in range(kmax + 1):
        hb = harmonic_basis(k, Q, order)
        X = surface_nodes(Q, quad)
        fk = HPoly(k)
        for b in hb.basis:
            c = np.sum(quad.weights * fv * np.conj(b(X)))
            fk = fk + b * c
            total += abs(c) ** 2
        comps.append(_clean(fk, max(1.0, np.sqrt(norm2))))
    return FourierResult(tuple(comps), norm2, norm2 - total)


def fourier_from_samples(theta, phi, values, Q, kmax):
    """
    Least-squares harmonic fit to scattered samples on the sphere chart.

    The Parseval balance is estimated with the sample mean of ``|f|^2``
    times the sphere area, so it is meaningful only for roughly uniform
    samples.
    """
    Q = quadform_new(Q)
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    values = np.asarray(values, dtype=np.complex128)
    s = np.sin(phi)
    S = np.stack([s * np.cos(theta), s * np.sin(theta), np.cos(phi)], axis=1)
    X = S @ Q.reduction.Ainv
    bases = [harmonic_basis(k, Q) for k in range(kmax + 1)]
    cols = [b(X) for hb in bases for b in hb.basis]
    D = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(D, values, rcond=None)
    comps, i = [], 0
    for hb in bases:
        fk = HPoly(hb.degree)
        for b in hb.basis:
            fk = fk + b * coef[i]
            i += 1
        comps.append(fk)
    norm2 = float(4 * np.pi * np.mean(np.abs(values) ** 2))
    return FourierResult(tuple(comps), norm2, norm2 - float(np.sum(np.abs(coef) ** 2)))


# ==========================
# Weighted Monte Carlo
# ==========================

def _real_chart(Q):
    B = np.asarray(Q.B)
    if not Q.is_real:
        raise ValueError("Monte Carlo weight needs a real form")
    e, V = np.linalg.eigh(B.real)
    order = np.argsort(-e)           # positive signs first
    e, V = e[order], V[:, order]
    npos = int(np.sum(e > 0))
    if npos == 0:
        raise Degenerate("real surface is empty for a negative definite form",
                         witness={"signature": [0, 3]})
    M = (V / np.sqrt(np.abs(e))).T   # x = z M
    return npos, M, e


def _surface_samples(npos, n, rng, sigma):
    """Points ``z`` of the standard surface, two tangent vectors and the proposal density."""
    if npos == 3:
        th = rng.uniform(0, 2 * np.pi, n)
        t = rng.uniform(-1, 1, n)
        s = np.sqrt(1 - t * t)
        z = np.stack([s * np.cos(th), s * np.sin(th), t], 1)
        da = np.stack([-s * np.sin(th), s * np.cos(th), 0 * t], 1)
        safe = np.where(s > 0, s, 1.0)
        db = np.stack([-t / safe * np.cos(th), -t / safe * np.sin(th), np.ones(n)], 1)
        pdf = np.full(n, 1 / (4 * np.pi))
    elif npos == 2:
        th = rng.uniform(0, 2 * np.pi, n)
        w = rng.normal(0, sigma, n)
        c = np.sqrt(1 + w * w)
        z = np.stack([c * np.cos(th), c * np.sin(th), w], 1)
        da = np.stack([-c * np.sin(th), c * np.cos(th), 0 * w], 1)
        db = np.stack([w / c * np.cos(th), w / c * np.sin(th), np.ones(n)], 1)
        pdf = np.exp(-w * w / (2 * sigma ** 2)) / (sigma * np.sqrt(2 * np.pi)) / (2 * np.pi)
    else:
        v = rng.normal(0, sigma, n)
        w = rng.normal(0, sigma, n)
        sg = rng.choice([-1.0, 1.0], n)
        c = np.sqrt(1 + v * v + w * w)
        z = np.stack([sg * c, v, w], 1)
        da = np.stack([sg * v / c, np.ones(n), 0 * v], 1)
        db = np.stack([sg * w / c, 0 * v, np.ones(n)], 1)
        pdf = 0.5 * np.exp(-(v * v + w * w) / (2 * sigma ** 2)) / (2 * np.pi * sigma ** 2)
    return z, da, db, pdf


def mc_inner_product(f, g, Q, n=10**6, rng=None, batch=200_000):
    """
    Monte Carlo ``int f conj(g) exp(-|x|^2) dsigma`` over the real surface
    ``{Q = 1}`` (area measure), for real ``Q`` of any signature with
    nonempty real locus.

    Returns
    -------
    value : complex
    stderr : float
    """
    Q = quadform_new(Q)
    rng = np.random.default_rng(rng)
    npos, M, e = _real_chart(Q)
    sigma = 1.5 * np.sqrt(np.max(np.abs(e)) / 2)
    total, total2, done = 0j, 0.0, 0
    while done < n:
        m = min(batch, n - done)
        z, da, db, pdf = _surface_samples(npos, m, rng, sigma)
        x = z @ M
        jac = np.linalg.norm(np.cross(da @ M, db @ M), axis=1)
        vals = f(x) * np.conj(g(x)) * np.exp(-np.sum(x * x, axis=1)) * jac / pdf
        total += vals.sum()
        total2 += float(np.sum(np.abs(vals) ** 2))
        done += m
    mean = total / n
    var = max(total2 / n - abs(mean) ** 2, 0.0)
    return complex(mean), float(np.sqrt(var / n))


def multipole_norm_bound_check(components, multipoles, Q, order=None):
    """
    Compare each multipole's product norm with its harmonic component.

    Returns
    -------
    list of dict
        ``degree``, ``rho`` (surface norm of the expanded product),
        ``component_norm`` and ``ratio = rho / component_norm`` (``None``
        when the component vanishes).
    """
    Q = quadform_new(Q)
    out = []
    for f, w in zip(components, multipoles):
        prod = w.expand()
        o = order or f.degree + 2
        rho = norm(prod, Q, o) if not w.is_zero() else 0.0
        fn = norm(f, Q, o)
        out.append({"degree": int(f.degree), "rho": rho, "component_norm": fn,
                    "ratio": rho / fn if fn > 0 else None})
    return out
