"""
Quadratic form bookkeeping.

A form is stored through its symmetric matrix ``B`` with ``Q(v) = v B v^T``
for row vectors ``v = (x, y, z)``. The module provides the reduction
``A A^T = B``, the operator ``Delta_Q = sum_jk (B^-1)_jk d_j d_k`` and a
rational parametrization of the conic ``{Q = 0}``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import Degenerate
from .poly import (HPoly, derivative_matrix, multiplication_matrix,
                   n_monomials, parse_poly)

__all__ = [
    "QuadForm",
    "Reduction",
    "ConicParam",
    "quadform_new",
    "reduce_to_squares",
    "laplacian_q",
    "laplacian_matrix",
    "conic_param",
    "SPHERE",
    "q_multiplication_matrix",
    "binary_compose_residual",
    "product_rule_constant",
    "kernel_intersection_rank",
    "sample_surface",
]

DET_TOL = 1e-12
_CACHE_LOCK = threading.RLock()

# sphere parametrization: rows are alpha_0, alpha_1, alpha_2 as coefficients
# of (u0^2, u0 u1, u1^2)
_SPHERE_ALPHA = np.array([[1j, 0, -1j],
                          [0, 2j, 0],
                          [1, 0, 1]], dtype=np.complex128)


class QuadForm:
    """
    Nondegenerate ternary quadratic form.

    Parameters
    ----------
    B : array_like
        Symmetric complex 3x3 matrix. Only the upper triangle is read; the
        stored matrix is exactly symmetric.

    Attributes
    ----------
    B : numpy.ndarray
    field_mode : {'real', 'complex'}
    """

    __slots__ = ("B", "field_mode", "_key", "_cache")

    def __init__(self, B):
        B = np.array(B, dtype=np.complex128)
        if B.shape != (3, 3):
            raise ValueError("B must be 3x3")
        iu = np.triu_indices(3)
        S = np.zeros((3, 3), dtype=np.complex128)
        S[iu] = B[iu]
        S = S + np.triu(S, 1).T
        nrm = np.linalg.norm(S, 2)
        det = np.linalg.det(S)
        if nrm == 0 or abs(det) <= DET_TOL * nrm ** 3:
            raise Degenerate(f"|det B| = {abs(det):.3e}: form is reducible over C",
                             witness={"det": [det.real, det.imag]})
        S.flags.writeable = False
        object.__setattr__(self, "B", S)
        object.__setattr__(self, "field_mode",
                           "real" if np.all(S.imag == 0) else "complex")
        object.__setattr__(self, "_key", S.tobytes())
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("QuadForm is immutable")

    def __eq__(self, other):
        return isinstance(other, QuadForm) and other._key == self._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"QuadForm({self.hpoly})"

    def _cached(self, name, build):
        try:
            return self._cache[name]
        except KeyError:
            pass
        with _CACHE_LOCK:
            if name not in self._cache:
                self._cache[name] = build()
            return self._cache[name]

    @property
    def Binv(self):
        return self._cached("Binv", lambda: np.linalg.inv(self.B))

    @property
    def hpoly(self):
        """The form as a degree-2 :class:`HPoly`."""
        def build():
            B = self.B
            return HPoly(2, [B[0, 0], 2 * B[0, 1], 2 * B[0, 2],
                             B[1, 1], 2 * B[1, 2], B[2, 2]])
        return self._cached("hpoly", build)

    @property
    def reduction(self):
        return self._cached("reduction", lambda: reduce_to_squares(self))

    @property
    def param(self):
        return self._cached("param", lambda: conic_param(self))

    @property
    def is_real(self):
        return self.field_mode == "real"

    def signature(self):
        """``(n_plus, n_minus)`` for a real form."""
        if not self.is_real:
            raise ValueError("signature is defined for real forms only")
        ev = np.linalg.eigvalsh(self.B.real)
        return int(np.sum(ev > 0)), int(np.sum(ev < 0))

    @property
    def is_definite(self):
        if not self.is_real:
            return False
        p, m = self.signature()
        return p == 3 or m == 3

    def __call__(self, v):
        v = np.asarray(v, dtype=np.complex128)
        if v.ndim == 1:
            return complex(v @ self.B @ v)
        return np.einsum("ni,ij,nj->n", v, self.B, v)

    def polar(self, v):
        """Coefficients of the polar line ``v B`` of the point ``v``."""
        return np.asarray(v, dtype=np.complex128) @ self.B

    def to_json(self):
        """The six upper-triangle entries as ``[re, im]`` pairs."""
        iu = np.triu_indices(3)
        return [[float(c.real), float(c.imag)] for c in self.B[iu]]

    @classmethod
    def from_json(cls, entries):
        entries = [complex(*e) if isinstance(e, (list, tuple)) else complex(e)
                   for e in entries]
        if len(entries) != 6:
            raise ValueError("expected six upper-triangle entries")
        B = np.zeros((3, 3), dtype=np.complex128)
        B[np.triu_indices(3)] = entries
        return cls(B)


def quadform_new(spec):
    """
    Build a validated :class:`QuadForm`.

    ``spec`` may be a 3x3 matrix, a degree-2 :class:`HPoly`, a homogeneous
    :class:`~quadmultipole.poly.Poly`, or a polynomial string.
    """
    if isinstance(spec, QuadForm):
        return spec
    if isinstance(spec, str):
        spec = parse_poly(spec)
    if hasattr(spec, "homogeneous") and not isinstance(spec, HPoly):
        spec = spec.homogeneous()
    if isinstance(spec, HPoly):
        if spec.degree != 2:
            raise ValueError("a quadratic form must have degree 2")
        c = spec.coeffs
        B = np.array([[c[0], c[1] / 2, c[2] / 2],
                      [c[1] / 2, c[3], c[4] / 2],
                      [c[2] / 2, c[4] / 2, c[5]]])
        return QuadForm(B)
    return QuadForm(spec)


SPHERE = QuadForm(np.eye(3))


@dataclass(frozen=True)
class Reduction:
    """Invertible ``A`` with ``A A^T = B``; new coordinates are ``x' = x A``."""

    A: np.ndarray
    Ainv: np.ndarray
    residual: float


def reduce_to_squares(Q):
    """
    Factor ``B = A A^T`` by symmetric elimination.

    Pivots are chosen by largest diagonal modulus (first index on ties);
    when every diagonal entry is small against the off-diagonal part, an
    elementary congruence ``e_i +/- e_j`` creates a usable pivot. Square roots
    use the principal branch, so the sphere gives ``A = I`` and
    ``diag(1, 1, -1)`` gives ``diag(1, 1, i)``.
    """
    C = np.array(Q.B, dtype=np.complex128)
    G = np.eye(3, dtype=np.complex128)
    for k in range(3):
        sub = C[k:, k:]
        diag = np.abs(np.diag(sub))
        off = np.abs(sub - np.diag(np.diag(sub)))
        p = k + int(np.argmax(diag))
        if off.size and diag.max() < 0.5 * off.max():
            i, j = np.unravel_index(int(np.argmax(off)), off.shape)
            i, j = i + k, j + k
            best = None
            for s in (1.0, -1.0):
                E = np.eye(3, dtype=np.complex128)
                E[i, j] = s
                Cn = E @ C @ E.T
                if best is None or abs(Cn[i, i]) > abs(best[1][i, i]):
                    best = (E, Cn)
            E, C = best
            G = E @ G
            p = i
        if p != k:
            P = np.eye(3, dtype=np.complex128)
            P[[k, p]] = P[[p, k]]
            C = P @ C @ P.T
            G = P @ G
        for r in range(k + 1, 3):
            f = C[r, k] / C[k, k]
            if f == 0:
                continue
            E = np.eye(3, dtype=np.complex128)
            E[r, k] = -f
            C = E @ C @ E.T
            G = E @ G
    D = np.sqrt(np.diag(C))
    A = np.linalg.solve(G, np.diag(D))
    Ainv = np.diag(1 / D) @ G
    resid = float(np.linalg.norm(A @ A.T - Q.B) / np.linalg.norm(Q.B))
    A.flags.writeable = False
    Ainv.flags.writeable = False
    return Reduction(A=A, Ainv=Ainv, residual=resid)


@lru_cache(maxsize=None)
def _second_derivatives(d):
    """The six matrices ``d_j d_k`` (j <= k) from degree d to d - 2."""
    out = {}
    for j in range(3):
        for k in range(j, 3):
            out[j, k] = derivative_matrix(d - 1, j) @ derivative_matrix(d, k)
    return out


def laplacian_matrix(Q, d):
    """Matrix of ``Delta_Q`` from degree ``d`` to degree ``d - 2``."""
    def build():
        if d < 2:
            return np.zeros((n_monomials(max(d - 2, 0)), n_monomials(d)),
                            dtype=np.complex128)
        Bi = Q.Binv
        D2 = _second_derivatives(d)
        M = np.zeros((n_monomials(d - 2), n_monomials(d)), dtype=np.complex128)
        for (j, k), mat in D2.items():
            w = Bi[j, k] if j == k else 2 * Bi[j, k]
            if w != 0:
                M += w * mat
        M.flags.writeable = False
        return M
    return Q._cached(("lap", d), build)


def laplacian_q(Q, p):
    """
    Apply ``Delta_Q = [d] B^-1 [d]^T`` to a homogeneous polynomial.

    For ``deg p < 2`` the zero polynomial of degree ``max(deg p - 2, 0)`` is
    returned.
    """
    if p.degree < 2:
        return HPoly(max(p.degree - 2, 0))
    return HPoly(p.degree - 2, laplacian_matrix(Q, p.degree) @ p.coeffs)


def q_multiplication_matrix(Q, d):
    """Matrix of ``r -> Q r`` from degree ``d`` to degree ``d + 2`` (cached)."""
    def build():
        M = multiplication_matrix(Q.hpoly, d)
        M.flags.writeable = False
        return M
    return Q._cached(("mulq", d), build)


class ConicParam:
    """
    Rational parametrization ``u -> (alpha_0(u), alpha_1(u), alpha_2(u))`` of
    the conic ``{Q = 0}`` by binary quadratic forms.

    ``coeffs[m]`` holds the coefficients of ``alpha_m`` on
    ``(u0^2, u0 u1, u1^2)``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=np.complex128)
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("ConicParam is immutable")

    def __call__(self, u):
        """Map parameters (shape ``(2,)`` or ``(n, 2)``) to conic points."""
        u = np.asarray(u, dtype=np.complex128)
        single = u.ndim == 1
        u = u.reshape(-1, 2)
        mon = np.stack([u[:, 0] ** 2, u[:, 0] * u[:, 1], u[:, 1] ** 2], axis=1)
        pts = mon @ self.coeffs.T
        return pts[0] if single else pts

    def forms(self):
        """The three binary quadratics as coefficient arrays."""
        return [self.coeffs[m] for m in range(3)]

    def scale(self):
        return float(np.linalg.norm(self.coeffs))


def conic_param(Q):
    """
    Parametrize ``{Q = 0}``.

    The sphere uses ``(i(u0^2 - u1^2), 2i u0 u1, u0^2 + u1^2)``; a general form
    pushes it through ``A^-1``, i.e. ``(x, y, z) = alpha_sphere(u) A^-1``.
    """
    if np.array_equal(Q.B, np.eye(3)):
        return ConicParam(_SPHERE_ALPHA)
    Ainv = Q.reduction.Ainv
    return ConicParam(Ainv.T @ _SPHERE_ALPHA)


def binary_compose_residual(Q, param):
    """Coefficient norm of ``Q(alpha(u))`` as a binary quartic."""
    a = param.coeffs
    out = np.zeros(5, dtype=np.complex128)
    for j in range(3):
        for k in range(3):
            out += Q.B[j, k] * np.convolve(a[j], a[k])
    return float(np.linalg.norm(out))


def product_rule_constant(m):
    """The constant ``c`` in ``Delta(Q T) = Q Delta T + c T`` on the sphere."""
    return 4 * m + 6


def kernel_intersection_rank(Q, d):
    """
    Singular values of ``R -> Delta_Q(Q R)`` on degree ``d - 2``.

    Full numerical rank means no nonzero multiple of ``Q`` is Q-harmonic.
    """
    M = laplacian_matrix(Q, d) @ q_multiplication_matrix(Q, d - 2)
    return np.linalg.svd(M, compute_uv=False)


def sample_surface(Q, n, rng=None, real=None):
    """
    Random points on the surface ``{Q = 1}``.

    A random direction ``v`` with ``|Q(v)|`` bounded away from zero is scaled
    by the principal square root of ``1 / Q(v)``. Directions are real when
    ``real`` is true (default for real forms), complex Gaussian otherwise.
    """
    rng = np.random.default_rng(rng)
    if real is None:
        real = Q.is_real
    out = []
    while len(out) < n:
        v = rng.normal(size=3)
        if not real:
            v = v + 1j * rng.normal(size=3)
        q = Q(v)
        if abs(q) < 1e-3 * np.vdot(v, v).real * np.linalg.norm(Q.B, 2):
            continue
        out.append(v / np.sqrt(q))
    return np.array(out, dtype=np.complex128).reshape(n, 3)
