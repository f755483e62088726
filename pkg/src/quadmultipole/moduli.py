"""
Ramification and moduli diagnostics for products of linear forms.

A family of ``d`` lines cuts the conic ``{Q = 0}`` in a divisor of degree
``2d``. The family is ramified when that divisor has a multiple point. Lines
through a fixed center ``p`` form a pencil, and sending a conic point to the
line joining it with ``p`` is a two-to-one map whose symmetric powers give
the covering studied here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .conic import CLUSTER_TOL, ConicDivisor, ProjPoint, chordal, proj_roots, restrict_to_conic
from .errors import Degenerate, DivisibleInput, ExplosionGuard, RankIndeterminate
from .poly import HPoly, n_monomials
from .quadform import q_multiplication_matrix, quadform_new

__all__ = [
    "Ramification",
    "product_of_lines",
    "line_divisor",
    "is_ramified",
    "tangent_nullity",
    "PencilCenter",
    "PencilDivisor",
    "gamma_project",
    "gamma_fiber",
    "pencil_line",
    "line_conic_points",
    "tangent_pencil_points",
    "viete_coordinates",
    "parabola_value",
    "dim_defect",
    "multiplication_corank",
    "RANK_TOL",
    "MAX_FIBER_WEIGHT",
]

RANK_TOL = 1e-8
MAX_FIBER_WEIGHT = 12
CENTER_TOL = 1e-8


def product_of_lines(forms):
    out = HPoly.constant(1.0)
    for v in forms:
        out = out * HPoly.linear(v)
    return out


def line_divisor(forms, Q, cluster_tol=CLUSTER_TOL):
    """Divisor cut on the conic by the product of the given linear forms."""
    Q = quadform_new(Q)
    forms = [np.asarray(v, dtype=np.complex128) / np.linalg.norm(v) for v in forms]
    b = restrict_to_conic(product_of_lines(forms), Q.param)
    if b.is_zero():
        raise DivisibleInput("product of lines is divisible by the quadratic form",
                             witness={"norm": b.norm()})
    return proj_roots(b, cluster_tol)


@dataclass(frozen=True)
class Ramification:
    ramified: bool
    witness: ProjPoint | None
    divisor: ConicDivisor

    def __bool__(self):
        return self.ramified

    def to_json(self):
        return {
            "ramified": self.ramified,
            "witness": None if self.witness is None else self.witness.to_json(),
            "divisor": self.divisor.to_json(),
        }


def is_ramified(forms, Q, cluster_tol=CLUSTER_TOL):
    """
    Whether the lines meet the conic in a divisor with a multiple point.

    Returns
    -------
    Ramification
        Truthy when ramified; ``witness`` is the first multiple point.

    Examples
    --------
    >>> from quadmultipole import SPHERE
    >>> bool(is_ramified([[1, 0, 0], [0, 1, 0]], SPHERE))
    False
    >>> bool(is_ramified([[0, 0, 1], [0, 0, 1]], SPHERE))
    True
    """
    div = line_divisor(forms, Q, cluster_tol)
    for p, m in div.points:
        if m >= 2:
            return Ramification(True, p, div)
    return Ramification(False, None, div)


def _numerical_rank(s, tol=RANK_TOL):
    """Rank with a guard against singular values straddling the threshold."""
    if s.size == 0 or s[0] == 0:
        return 0
    thr = tol * s[0]
    r = int(np.sum(s > thr))
    lo = s[r] if r < s.size else 0.0
    hi = s[r - 1] if r > 0 else np.inf
    if hi < 10 * thr or (lo > thr / 10):
        raise RankIndeterminate("singular values too close to the rank threshold",
                                witness={"above": float(hi / s[0]), "below": float(lo / s[0]),
                                         "threshold": tol})
    return r


def tangent_nullity(forms, Q, rng=None, tries=3):
    """
    Dimension of non-obvious solutions of the tangent-cone equation.

    Counts ``M_1..M_d`` (linear forms) with
    ``sum_j M_j prod_{i != j} L_i = 0`` on the conic, minus the ``d - 1``
    solutions ``M_j = a_j L_j`` with ``sum a_j = 0``. The equations are
    sampled at ``2d + 5`` conic points.

    Raises
    ------
    RankIndeterminate
        When every sample set leaves the rank ambiguous.
    """
    Q = quadform_new(Q)
    forms = np.array([np.asarray(v, dtype=np.complex128) / np.linalg.norm(v) for v in forms])
    d = len(forms)
    if restrict_to_conic(product_of_lines(forms), Q.param).is_zero():
        raise DivisibleInput("product of lines is divisible by the quadratic form")
    rng = np.random.default_rng(0 if rng is None else rng)
    err = None
    for _ in range(tries):
        u = rng.normal(size=(2 * d + 5, 2)) + 1j * rng.normal(size=(2 * d + 5, 2))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        X = Q.param(u)
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        vals = X @ forms.T                        # L_i at each sample
        rows = []
        for t in range(len(X)):
            row = []
            for j in range(d):
                others = np.prod(np.delete(vals[t], j))
                row.extend(X[t] * others)
            rows.append(row)
        s = np.linalg.svd(np.array(rows), compute_uv=False)
        try:
            rank = _numerical_rank(s)
        except RankIndeterminate as exc:
            err = exc
            continue
        return 3 * d - rank - (d - 1)
    raise err


# ==========================
# Pencils and the covering
# ==========================

@dataclass(frozen=True)
class PencilCenter:
    """Base point of a pencil of lines; must lie off the conic."""

    point: np.ndarray
    basis: np.ndarray

    @classmethod
    def of(cls, p, Q):
        Q = quadform_new(Q)
        p = np.asarray(p, dtype=np.complex128)
        p = p / np.linalg.norm(p)
        scale = np.linalg.norm(Q.B, 2)
        if abs(Q(p)) <= CENTER_TOL * scale:
            raise Degenerate("pencil center lies on the conic",
                             witness={"Q(p)": [float(Q(p).real), float(Q(p).imag)]})
        # lines l with l . p = 0, i.e. the null space of p^T
        _, _, vh = np.linalg.svd(p.reshape(1, 3))
        basis = vh[1:].conj()
        return cls(p, basis)

    def line(self, s):
        """Line coefficients for pencil coordinate ``s = [s0 : s1]``."""
        s = s.vector if isinstance(s, ProjPoint) else np.asarray(s, dtype=np.complex128)
        return s @ self.basis

    def coordinate(self, line):
        """Pencil coordinate of a line through the center."""
        c, *_ = np.linalg.lstsq(self.basis.T, np.asarray(line, dtype=np.complex128), rcond=None)
        return ProjPoint.of(c)


@dataclass(frozen=True)
class PencilDivisor:
    """Lines of a pencil, as points of ``CP^1`` with multiplicities."""

    points: tuple

    @property
    def degree(self):
        return sum(m for _, m in self.points)

    @classmethod
    def collect(cls, pts, tol=CLUSTER_TOL):
        groups = []
        for p, m in pts:
            for g in groups:
                if chordal(g[0], p) <= tol:
                    g[1] += m
                    break
            else:
                groups.append([p, m])
        return cls(tuple((p, m) for p, m in sorted(groups, key=lambda g: _pt_key(g[0]))))

    def to_json(self):
        return [{"s": p.to_json(), "mult": int(m)} for p, m in self.points]


def _pt_key(p):
    return (round(p.u0.real, 8), round(p.u0.imag, 8), round(p.u1.real, 8), round(p.u1.imag, 8))


def pencil_line(q, center, Q):
    """Line through the conic point with parameter ``q`` and the center."""
    Q = quadform_new(Q)
    x = Q.param(q.vector if isinstance(q, ProjPoint) else q)
    return np.cross(x, center.point)


def gamma_project(div, center, Q, tol=CLUSTER_TOL):
    """Send each divisor point to the line joining it with the center."""
    pts = [(center.coordinate(pencil_line(p, center, Q)), m) for p, m in div.points]
    return PencilDivisor.collect(pts, tol)


def line_conic_points(line, Q, cluster_tol=CLUSTER_TOL):
    """
    Conic parameters of the intersection of a line with the conic.

    Returns one point (with multiplicity 2) for a tangent line, else two.
    """
    Q = quadform_new(Q)
    b = restrict_to_conic(HPoly.linear(line), Q.param)
    return proj_roots(b, cluster_tol)


def tangent_pencil_points(center, Q, cluster_tol=CLUSTER_TOL):
    """
    Pencil coordinates of the two lines through the center tangent to the
    conic (the branch points of the two-to-one map).
    """
    Q = quadform_new(Q)
    touch = line_conic_points(Q.B @ center.point, Q, cluster_tol)
    return [center.coordinate(Q.polar(Q.param(p.vector))) for p in touch.locations]


def gamma_fiber(target, center, Q, cluster_tol=CLUSTER_TOL):
    """
    All conic divisors that project onto ``target``.

    A line of multiplicity ``m`` meeting the conic in ``q, q*`` contributes
    ``m + 1`` ways to share ``m`` points between them; a tangent line
    contributes one.

    Raises
    ------
    ExplosionGuard
        If the total multiplicity exceeds ``MAX_FIBER_WEIGHT``.
    """
    Q = quadform_new(Q)
    if target.degree > MAX_FIBER_WEIGHT:
        raise ExplosionGuard(f"target degree {target.degree} exceeds {MAX_FIBER_WEIGHT}",
                             witness={"degree": target.degree, "limit": MAX_FIBER_WEIGHT})
    options = []
    for s, m in target.points:
        meet = line_conic_points(center.line(s), Q, cluster_tol)
        locs = meet.locations
        if len(locs) == 1:
            options.append([((locs[0], m),)])
        else:
            a, b = locs
            options.append([tuple((p, k) for p, k in ((a, j), (b, m - j)) if k)
                            for j in range(m + 1)])
    seen = {}
    for combo in itertools.product(*options):
        pts = [pm for part in combo for pm in part]
        merged = []
        for p, k in pts:
            for g in merged:
                if chordal(g[0], p) <= cluster_tol:
                    g[1] += k
                    break
            else:
                merged.append([p, k])
        merged.sort(key=lambda g: _pt_key(g[0]))
        key = tuple((_pt_key(p), k) for p, k in merged)
        seen.setdefault(key, ConicDivisor(tuple((p, k) for p, k in merged)))
    return [seen[k] for k in sorted(seen)]


def viete_coordinates(target):
    """
    Coefficients of ``prod (s1_i S - s0_i T)`` for a degree-2 pencil divisor.

    Returned as ``(x, y, z)`` = (coefficient of ``S T``, of ``S^2``, of
    ``T^2``), scaled to unit norm. Double lines are exactly the points of
    the parabola ``x^2 - 4 y z = 0``.
    """
    roots = [p for p, m in target.points for _ in range(m)]
    if len(roots) != 2:
        raise ValueError("Viete chart is defined for degree 2 targets")
    poly = np.array([1.0 + 0j])
    for p in roots:
        poly = np.convolve(poly, [p.u1, -p.u0])
    y, x, z = poly
    v = np.array([x, y, z])
    return v / np.linalg.norm(v)


def parabola_value(v):
    x, y, z = v
    return complex(x * x - 4 * y * z)


# ==========================
# Dimension counts
# ==========================

def dim_defect(l, partition):
    """
    Dimension defect for products of factors of the given degrees on a
    surface of degree ``l``.

    Examples
    --------
    >>> dim_defect(3, [3, 3])
    Fraction(1, 1)
    >>> dim_defect(2, [4, 3])
    Fraction(0, 1)
    """
    parts = [int(x) for x in partition]
    if l < 1 or not parts or any(x <= 0 for x in parts):
        raise ValueError("need l >= 1 and a partition of positive integers")
    s = len(parts)
    if all(x >= l for x in parts):
        return Fraction((s - 1) * (l * l - 3 * l + 2), 2)
    d = sum(parts)
    out = Fraction(l * (2 * d - l + 3), 2)
    for x in parts:
        if x >= l:
            out -= Fraction(l * (2 * x - l + 3), 2)
        else:
            out -= Fraction(x * (x + 3), 2)
    return out + (s - 1)


def multiplication_corank(Q, d, tol=RANK_TOL):
    """Codimension of ``Q V(d-2)`` inside ``V(d)`` (numerical)."""
    Q = quadform_new(Q)
    if d < 2:
        return n_monomials(d)
    s = np.linalg.svd(q_multiplication_matrix(Q, d - 2), compute_uv=False)
    return n_monomials(d) - _numerical_rank(s, tol)
