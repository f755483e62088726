"""
Binary forms on the conic ``{Q = 0}`` and their roots in ``CP^1``.

A form ``p`` of degree ``d`` pulled back along the conic parametrization
becomes a binary form of degree ``2d``; its roots, with multiplicity, are the
intersection divisor of ``{p = 0}`` with the conic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CoincidentPoints, NoConvergence, ZeroForm
from .poly import monomial_exponents

__all__ = [
    "BinaryForm",
    "ProjPoint",
    "ConicDivisor",
    "restrict_to_conic",
    "proj_roots",
    "chordal",
    "line_through",
    "tangent_line",
    "normalize_vector",
    "CLUSTER_TOL",
    "ZERO_FORM_TOL",
]

CLUSTER_TOL = 1e-7
ZERO_FORM_TOL = 1e-12
# loosest radius at which nearby clusters may merge, and the relative size
# below which local Taylor coefficients count as vanishing
MERGE_RADIUS = 1e-3
TAYLOR_TOL = 1e-9
_GOLDEN = np.pi * (3.0 - np.sqrt(5.0))
_EPS = np.finfo(float).eps


def normalize_vector(v, tie=1e-6):
    """
    Scale a complex vector to unit norm with a fixed phase.

    The largest-modulus coordinate is made real positive; coordinates whose
    modulus is within a relative ``tie`` of the maximum count as tied and the
    first one wins.
    """
    v = np.asarray(v, dtype=np.complex128)
    n = np.linalg.norm(v)
    if n == 0:
        raise ZeroDivisionError("cannot normalize the zero vector")
    v = v / n
    mod = np.abs(v)
    i = int(np.argmax(mod >= (1.0 - tie) * mod.max()))
    return v * (abs(v[i]) / v[i])


@dataclass(frozen=True)
class ProjPoint:
    """
    Point ``[u0 : u1]`` of ``CP^1`` in normalized coordinates.

    Use :meth:`of` to build one from arbitrary homogeneous coordinates.
    """

    u0: complex
    u1: complex

    @classmethod
    def of(cls, u0, u1=None):
        if u1 is None:
            u0, u1 = u0
        v = np.array([u0, u1], dtype=np.complex128)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("[0:0] is not a projective point")
        v = v / n
        i = 0 if abs(v[0]) >= abs(v[1]) - 1e-12 else 1
        v = v * (abs(v[i]) / v[i])
        v[i] = abs(v[i])
        return cls(complex(v[0]), complex(v[1]))

    @property
    def vector(self):
        return np.array([self.u0, self.u1], dtype=np.complex128)

    def ratio(self):
        """``u1 / u0`` (``inf`` at ``[0:1]``)."""
        return self.u1 / self.u0 if self.u0 != 0 else complex("inf")

    def to_json(self):
        return [self.u0.real, self.u0.imag, self.u1.real, self.u1.imag]

    @classmethod
    def from_json(cls, u):
        return cls.of(complex(u[0], u[1]), complex(u[2], u[3]))


def chordal(p, q):
    """Chordal distance between two points of ``CP^1``."""
    a = p.vector if isinstance(p, ProjPoint) else np.asarray(p, dtype=np.complex128)
    b = q.vector if isinstance(q, ProjPoint) else np.asarray(q, dtype=np.complex128)
    return float(abs(a[0] * b[1] - a[1] * b[0]) / (np.linalg.norm(a) * np.linalg.norm(b)))


@dataclass(frozen=True)
class BinaryForm:
    """
    Binary form ``sum_j coeffs[j] u0^(d-j) u1^j``.

    ``scale`` is the size of the data the form was computed from; a form whose
    coefficients fall below ``ZERO_FORM_TOL * scale`` is treated as zero.
    """

    degree: int
    coeffs: np.ndarray
    scale: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if c.size != self.degree + 1:
            raise ValueError("coefficient count does not match degree")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "scale", float(max(self.scale, np.linalg.norm(c))))

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def is_zero(self, tol=ZERO_FORM_TOL):
        return self.norm() <= tol * self.scale

    def __call__(self, u):
        u = np.asarray(u, dtype=np.complex128)
        j = np.arange(self.degree + 1)
        return complex(np.sum(self.coeffs * u[0] ** (self.degree - j) * u[1] ** j))


@dataclass(frozen=True)
class ConicDivisor:
    """Distinct points of ``CP^1`` with positive multiplicities."""

    points: tuple

    @property
    def degree(self):
        return sum(m for _, m in self.points)

    @property
    def multiplicities(self):
        return [m for _, m in self.points]

    @property
    def locations(self):
        return [p for p, _ in self.points]

    def __len__(self):
        return len(self.points)

    def to_json(self):
        return [{"u": p.to_json(), "mult": int(m)} for p, m in self.points]

    @classmethod
    def from_json(cls, items):
        return cls(tuple((ProjPoint.from_json(it["u"]), int(it["mult"])) for it in items))


# ==========================
# Restriction
# ==========================

def _binary_powers(a, n):
    """Coefficient arrays of ``a^e`` for ``e = 0..n`` (``a`` a binary quadratic)."""
    out = [np.ones(1, dtype=a.dtype)]
    for _ in range(n):
        out.append(np.convolve(out[-1], a))
    return out


def restrict_to_conic(p, alpha):
    """
    Pull a form back along the conic parametrization.

    Parameters
    ----------
    p : HPoly
    alpha : ConicParam

    Returns
    -------
    BinaryForm
        Degree ``2 deg p``; the zero form (in the ``is_zero`` sense) when the
        conic's form divides ``p``.
    """
    d = p.degree
    a = alpha.coeffs
    pw = [_binary_powers(a[m], d) for m in range(3)]
    apw = [_binary_powers(np.abs(a[m]), d) for m in range(3)]
    out = np.zeros(2 * d + 1, dtype=np.complex128)
    bound = np.zeros(2 * d + 1)
    for c, (i, j, k) in zip(p.coeffs, monomial_exponents(d)):
        if c == 0:
            continue
        out += c * np.convolve(np.convolve(pw[0][i], pw[1][j]), pw[2][k])
        bound += abs(c) * np.convolve(np.convolve(apw[0][i], apw[1][j]), apw[2][k])
    return BinaryForm(2 * d, out, scale=float(np.linalg.norm(bound)))


# ==========================
# Root finding
# ==========================

def _horner_with_derivative(a, z):
    """Values of a polynomial (highest first) and its derivative at ``z``."""
    p = np.full_like(z, a[0])
    dp = np.zeros_like(z)
    for c in a[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _aberth(a, max_iter):
    """Simultaneous Aberth-Ehrlich iteration; returns roots or ``None``."""
    n = len(a) - 1
    a = a / a[0]
    r = abs(a[-1]) ** (1.0 / n) if a[-1] != 0 else 1.0
    r = r if np.isfinite(r) and r > 0 else 1.0
    z = r * np.exp(1j * (2 * np.pi * np.arange(n) / n + _GOLDEN))
    absa = np.abs(a)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        p, dp = _horner_with_derivative(a, z)
        bound = np.polyval(absa, np.abs(z))
        done = np.abs(p) <= 8 * _EPS * bound
        if done.all():
            return z
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = (1.0 / diff).sum(axis=1) - 1.0
        with np.errstate(all="ignore"):
            ratio = p / dp
            w = ratio / (1.0 - ratio * s)
        w = np.where(done | ~np.isfinite(w), 0.0, w)
        z = z - w
    return None


def _newton_polish(c, root, steps=3):
    """Newton steps on the better affine chart of the binary form ``c``."""
    u0, u1 = root
    if abs(u0) <= abs(u1):
        coef, t = c, u0 / u1  # chart u1 = 1, polynomial in t = u0/u1
    else:
        coef, t = c[::-1], u1 / u0
    val, der = _horner_with_derivative(coef, np.array([t], dtype=np.complex128))
    for _ in range(steps):
        if der[0] == 0 or val[0] == 0:
            break
        t_new = t - val[0] / der[0]
        v_new, d_new = _horner_with_derivative(coef, np.array([t_new], dtype=np.complex128))
        if not abs(v_new[0]) < abs(val[0]):
            break
        t, val, der = t_new, v_new, d_new
    return (t, 1.0) if abs(u0) <= abs(u1) else (1.0, t)


def _unit_pairs(pairs):
    arr = np.array(pairs, dtype=np.complex128).reshape(-1, 2)
    return arr / np.linalg.norm(arr, axis=1, keepdims=True)


def _chordal_matrix(U):
    det = U[:, None, 0] * U[None, :, 1] - U[:, None, 1] * U[None, :, 0]
    return np.abs(det)


def _single_linkage(D, radius, labels):
    """Union clusters (given by ``labels``) whose members lie within ``radius``."""
    parent = list(range(labels.max() + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    ii, jj = np.nonzero(np.triu(D <= radius, 1))
    for i, j in zip(ii, jj):
        a, b = find(labels[i]), find(labels[j])
        if a != b:
            parent[max(a, b)] = min(a, b)
    return np.array([find(x) for x in labels])


def _centroid(U):
    """Average of unit pairs in the affine chart of the first one."""
    if abs(U[0, 0]) >= abs(U[0, 1]):
        w = np.mean(U[:, 1] / U[:, 0])
        v = np.array([1.0, w])
    else:
        t = np.mean(U[:, 0] / U[:, 1])
        v = np.array([t, 1.0])
    return v / np.linalg.norm(v)


@lru_cache(maxsize=None)
def _binom_row(n):
    from math import comb
    return np.array([comb(n, k) for k in range(n + 1)], dtype=float)


def _local_coeffs(c, point):
    """
    Coefficients of the binary form after a unitary change of variables
    sending ``point`` to ``[1:0]``.

    The order of vanishing at ``point`` is the number of leading zeros.
    """
    d = len(c) - 1
    a, b = point
    # (u0, u1) = v0 (a, b) + v1 (-conj(b), conj(a))
    lin0 = np.array([a, -np.conj(b)])
    lin1 = np.array([b, np.conj(a)])
    p0 = _binary_powers(lin0, d)
    p1 = _binary_powers(lin1, d)
    out = np.zeros(d + 1, dtype=np.complex128)
    for j, cj in enumerate(c):
        if cj != 0:
            out += cj * np.convolve(p0[d - j], p1[j])
    return out


def _refine_multiple(c, point, m, steps=8):
    """
    Sharpen the location of a presumed ``m``-fold root.

    Newton's method runs on the ``(m-1)``-th derivative in the affine chart
    where ``point`` has modulus at most one; there the root is simple.
    """
    u0, u1 = point
    small0 = abs(u0) <= abs(u1)
    coef = np.asarray(c, dtype=np.complex128)
    coef, t = (coef, u0 / u1) if small0 else (coef[::-1], u1 / u0)
    q = np.polyder(coef, m - 1) if m > 1 else coef
    if len(q) < 2:
        return np.asarray(point)
    t = np.array([t], dtype=np.complex128)
    for _ in range(steps):
        val, der = _horner_with_derivative(q, t)
        if der[0] == 0:
            break
        step = val / der
        if not np.isfinite(step[0]) or abs(step[0]) > 0.1:
            break
        t = t - step
        if abs(step[0]) <= 4 * _EPS:
            break
    v = np.array([t[0], 1.0]) if small0 else np.array([1.0, t[0]])
    return v / np.linalg.norm(v)


def _has_multiplicity(c, point, m, spread, tol=TAYLOR_TOL):
    """
    Whether ``c`` vanishes to order ``m`` at ``point``.

    Besides small low-order local coefficients, the observed ``spread`` of
    the cluster must be explainable by rounding: an ``m``-fold root under a
    relative perturbation ``eta`` scatters by about ``(eta / |a_m|)^(1/m)``.
    """
    loc = _local_coeffs(c, point)
    norm = np.linalg.norm(c)
    if not np.all(np.abs(loc[:m]) <= tol * norm):
        return False
    am = abs(loc[m]) if m < len(loc) else 0.0
    if am == 0:
        return False
    eta = 1e-14 * len(c) * norm
    return bool(spread <= 100 * (eta / am) ** (1.0 / m))


def _agglomerate(c, U, D, groups):
    """
    Greedily merge nearby clusters, closest pair first, while the merged
    cluster passes the multiplicity test.
    """
    groups = list(groups)
    while len(groups) > 1:
        n = len(groups)
        cand = []
        for a in range(n):
            for b in range(a + 1, n):
                dist = D[np.ix_(groups[a], groups[b])].min()
                if dist <= MERGE_RADIUS:
                    cand.append((dist, a, b))
        merged = False
        for _, a, b in sorted(cand):
            members = np.concatenate([groups[a], groups[b]])
            center = _refine_multiple(c, _centroid(U[members]), len(members))
            spread = _chordal_matrix(np.vstack([center, U[members]]))[0].max()
            if _has_multiplicity(c, center, len(members), spread):
                groups[a] = np.sort(members)
                del groups[b]
                merged = True
                break
        if not merged:
            break
    return groups


def _raw_roots(c, max_iter):
    """All ``len(c) - 1`` projective roots of ``c`` as pairs ``(u0, u1)``."""
    d = len(c) - 1
    norm = np.linalg.norm(c)
    small = np.abs(c) <= 1e-14 * norm
    lead = int(np.argmin(small)) if not small.all() else d + 1
    trail = int(np.argmin(small[::-1]))
    roots = [(1.0, 0.0)] * lead + [(0.0, 1.0)] * trail
    core = c[lead:d + 1 - trail]
    if len(core) > 1:
        z = _aberth(core, max_iter)
        if z is None:
            z = np.roots(core)
            if len(z) != len(core) - 1 or not np.all(np.isfinite(z)):
                raise NoConvergence("root iteration did not converge",
                                    witness={"max_iter": max_iter})
        roots += [(complex(t), 1.0) for t in z]
    return roots


def proj_roots(b, cluster_tol=CLUSTER_TOL, max_iter=200):
    """
    Roots of a binary form in ``CP^1`` with multiplicities.

    Roots closer than ``cluster_tol`` (chordal) are merged. Clusters that sit
    within ``MERGE_RADIUS`` of each other are also merged when the form
    vanishes to the combined order at their centroid, which recovers the
    multiplicity of numerically scattered multiple roots.

    Parameters
    ----------
    b : BinaryForm
    cluster_tol : float
    max_iter : int

    Returns
    -------
    ConicDivisor

    Raises
    ------
    ZeroForm
        If ``b`` is the zero form.
    NoConvergence
        If neither the iteration nor the companion-matrix fallback succeeds.
    """
    if b.is_zero():
        raise ZeroForm("binary form vanishes identically",
                       witness={"norm": b.norm(), "scale": b.scale})
    c = b.coeffs / b.norm()
    roots = _raw_roots(c, max_iter)
    roots = [_newton_polish(c, r) for r in roots]
    U = _unit_pairs(roots)
    if len(U) == 0:
        return ConicDivisor(())
    D = _chordal_matrix(U)
    labels = _single_linkage(D, cluster_tol, np.arange(len(U)))
    groups = [np.nonzero(labels == g)[0] for g in np.unique(labels)]
    groups = _agglomerate(c, U, D, groups)
    pts = []
    for members in groups:
        if len(members) == 1:
            center = U[members[0]]
        else:
            center = _refine_multiple(c, _centroid(U[members]), len(members))
        pts.append((ProjPoint.of(center), len(members)))
    pts.sort(key=lambda pm: (round(pm[0].u0.real, 9), round(pm[0].u0.imag, 9),
                             round(pm[0].u1.real, 9), round(pm[0].u1.imag, 9)))
    return ConicDivisor(tuple(pts))


# ==========================
# Lines through divisor points
# ==========================

def line_through(p1, p2, alpha, tol=CLUSTER_TOL):
    """
    The line through the conic points ``alpha(p1)`` and ``alpha(p2)``.

    Returns the normalized coefficient vector ``(a, b, c)`` of
    ``a x + b y + c z``.

    Raises
    ------
    CoincidentPoints
        If the parameters are within ``tol`` (use :func:`tangent_line`).
    """
    dist = chordal(p1, p2)
    if dist <= tol:
        raise CoincidentPoints("points coincide; use the tangent line",
                               witness={"distance": dist})
    return normalize_vector(np.cross(alpha(p1.vector), alpha(p2.vector)))


def tangent_line(p, Q, alpha):
    """Tangent line to the conic at ``alpha(p)``: the polar ``alpha(p) B``."""
    return normalize_vector(alpha(p.vector) @ Q.B)
