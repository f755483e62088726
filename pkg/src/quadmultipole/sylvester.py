"""
Multipole decompositions of polynomials on the surface ``{Q = 1}``.

A form ``p`` of degree ``d`` whose intersection divisor with the conic
``{Q = 0}`` is split into parcels yields lines ``L_1..L_d`` (one per parcel)
and a unique scalar ``lam`` with

    p = lam * L_1 ... L_d + Q * r.

Recursing on ``r`` writes any polynomial, restricted to ``{Q = 1}``, as a sum
of products of linear forms of every degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .conic import (
    CLUSTER_TOL,
    ProjPoint,
    chordal,
    line_through,
    normalize_vector,
    proj_roots,
    restrict_to_conic,
    tangent_line,
)
from .errors import (
    Degenerate,
    DivisibleInput,
    NotConjugateClosed,
    ExplosionGuard,
    OffSurface,
    ProbeDegenerate,
)
from .parcelling import canonical_parcelling, count_parcellings, enumerate_parcellings
from .poly import HPoly, Poly, divide_by_form, homogenize_on_surface, parity_split
from .quadform import quadform_new, sample_surface

__all__ = [
    "Multipole",
    "Decomposition",
    "leading_multipole",
    "decompose",
    "enumerate_decompositions",
    "evaluate_decomposition",
    "multipole_distance",
    "divisor_of",
]

REAL_TOL = 1e-9
ZERO_CHAIN_TOL = 1e-11


SNAP_TOL = 1e-14


def _snap(v):
    """Zero out round-off sized parts and normalize the sign of zeros."""
    v = np.array(v, dtype=np.complex128)
    re_, im_ = v.real.copy(), v.imag.copy()
    re_[np.abs(re_) < SNAP_TOL] = 0.0
    im_[np.abs(im_) < SNAP_TOL] = 0.0
    return (re_ + 0.0) + 1j * (im_ + 0.0)


def _sort_key(v):
    return tuple(x for c in v for x in (round(c.real, 9), round(c.imag, 9)))


@dataclass(frozen=True)
class Multipole:
    """
    A scalar times an unordered family of linear forms.

    Attributes
    ----------
    degree : int
        Number of linear forms ``k``.
    lam : complex
    vectors : numpy.ndarray
        Shape ``(k, 3)``; row ``j`` holds the coefficients of ``L_j``. Empty
        (shape ``(0, 3)``) for the zero multipole and for ``k = 0``.
    """

    degree: int
    lam: complex
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.complex128).reshape(-1, 3)
        v.flags.writeable = False
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "lam", complex(self.lam))

    @classmethod
    def zero(cls, degree):
        return cls(degree, 0.0, np.zeros((0, 3)))

    @classmethod
    def constant(cls, value):
        return cls(0, value, np.zeros((0, 3)))

    @classmethod
    def from_lines(cls, lam, lines, mode="complex"):
        lines = np.asarray(lines, dtype=np.complex128).reshape(-1, 3)
        return cls(len(lines), lam, lines).canonical(mode)

    @classmethod
    def from_linear(cls, h, mode="complex"):
        """The degree-1 multipole of a linear form."""
        if not np.any(h.coeffs):
            return cls.zero(1)
        return cls.from_lines(1.0, [h.coeffs], mode)

    def is_zero(self):
        return self.lam == 0 and (self.degree == 0 or len(self.vectors) == 0)

    def canonical(self, mode="complex"):
        """
        Canonical representative.

        ``complex``: each vector has unit norm with its largest-modulus entry
        real positive. ``real``: vectors are real with first nonzero entry
        positive, and a negative scalar is absorbed by negating the last
        vector so that ``lam >= 0``. Vectors are then sorted.
        """
        if self.lam == 0 or (self.degree > 0 and len(self.vectors) == 0):
            return Multipole.zero(self.degree)
        lam = self.lam
        vecs = []
        for v in self.vectors:
            u = normalize_vector(v)
            # v = s u with s = <u, v> since |u| = 1
            lam *= np.vdot(u, v)
            vecs.append(u)
        if mode == "real":
            out = []
            for u in vecs:
                r = u.real
                nz = np.nonzero(np.abs(r) > 1e-12)[0]
                if len(nz) and r[nz[0]] < 0:
                    r = -r
                    lam = -lam
                out.append(r.astype(np.complex128))
            lam = complex(lam.real, 0.0)
            vecs = sorted((_snap(u) for u in out), key=_sort_key)
            if lam.real < 0 and vecs:
                vecs[-1] = _snap(-vecs[-1])
                lam = -lam
        else:
            vecs = sorted((_snap(u) for u in vecs), key=_sort_key)
        lam = complex(_snap([lam])[0])
        return Multipole(self.degree, lam, np.array(vecs).reshape(-1, 3))

    def is_real(self, tol=REAL_TOL):
        return abs(self.lam.imag) <= tol * max(1.0, abs(self.lam)) and bool(
            np.all(np.abs(self.vectors.imag) <= tol))

    def expand(self):
        """The product ``lam * L_1 ... L_k`` as an HPoly of degree ``k``."""
        if self.is_zero():
            return HPoly(self.degree)
        out = HPoly.constant(self.lam)
        for v in self.vectors:
            out = out * HPoly.linear(v)
        return out

    def __call__(self, v):
        v = np.asarray(v, dtype=np.complex128)
        if self.is_zero():
            return np.zeros(v.shape[:-1], dtype=np.complex128) if v.ndim > 1 else 0j
        vals = v @ self.vectors.T
        return self.lam * np.prod(vals, axis=-1)

    def to_json(self):
        return {
            "degree": int(self.degree),
            "lambda": [float(self.lam.real), float(self.lam.imag)],
            "vectors": [[[float(c.real), float(c.imag)] for c in v] for v in self.vectors],
        }

    @classmethod
    def from_json(cls, d):
        vecs = [[complex(a, b) for a, b in v] for v in d["vectors"]]
        return cls(d["degree"], complex(*d["lambda"]), np.array(vecs).reshape(-1, 3))


def _proj_distances(U, V):
    """Phase-invariant distances between rows of ``U`` and ``V`` (unit rows)."""
    # norm of the part of v orthogonal to u; avoids the sqrt(1 - c^2) floor
    G = np.conj(U) @ V.T
    D = V[None, :, :] - G[:, :, None] * U[:, None, :]
    return np.linalg.norm(D, axis=2)


def _distance(a, pa, b, pb, stop=None):
    if a.degree != b.degree:
        return np.inf
    scale = max(pa.norm(), pb.norm())
    prod = float((pa - pb).norm() / scale) if scale > 0 else 0.0
    if a.is_zero() or b.is_zero() or a.degree == 0:
        return prod
    if stop is not None and prod > stop:
        return prod
    U = a.vectors / np.linalg.norm(a.vectors, axis=1, keepdims=True)
    V = b.vectors / np.linalg.norm(b.vectors, axis=1, keepdims=True)
    C = _proj_distances(U, V)
    rows, cols = linear_sum_assignment(C)
    return float(max(C[rows, cols].max(), prod))


def multipole_distance(a, b):
    """
    Distance used for de-duplication.

    The larger of the best-matching maximum vector distance (Hungarian
    assignment) and the relative distance of the expanded products.
    """
    return _distance(a, a.expand(), b, b.expand())


@dataclass(frozen=True)
class Decomposition:
    """
    Multipoles ``w_0..w_d`` with ``p = sum_k expand(w_k)`` on ``{Q = 1}``.

    ``meta`` records the policy and whether the canonical choice was unique.
    """

    surface: object
    multipoles: tuple
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def degree(self):
        return len(self.multipoles) - 1

    def expand(self):
        return Poly.from_parts({w.degree: w.expand() for w in self.multipoles})

    def residual(self, p, n=200, rng=None):
        """Max relative deviation from ``p`` over ``n`` random surface points."""
        p = p if isinstance(p, Poly) else Poly.from_hpoly(p)
        pts = sample_surface(self.surface, n, rng)
        got = self.expand()(pts)
        want = p(pts)
        return float(np.max(np.abs(got - want)) / max(1.0, np.max(np.abs(want))))

    def to_json(self, residual=None):
        out = {
            "surface": self.surface.to_json(),
            "multipoles": [w.to_json() for w in self.multipoles],
        }
        if residual is not None:
            out["residual"] = residual
        out.update({k: v for k, v in self.meta.items()})
        return out


def divisor_of(p, Q, cluster_tol=CLUSTER_TOL):
    """
    Intersection divisor of ``{p = 0}`` with the conic of ``Q``.

    Raises
    ------
    DivisibleInput
        If ``Q`` divides ``p``.
    """
    b = restrict_to_conic(p, Q.param)
    if b.is_zero():
        raise DivisibleInput("polynomial is divisible by the quadratic form",
                             witness={"norm": b.norm(), "scale": b.scale})
    return proj_roots(b, cluster_tol)


def _parcel_lines(div, parc, Q, cluster_tol):
    alpha = Q.param
    pts = div.locations
    lines = []
    for i, j in parc.pairs:
        if i == j:
            lines.append(tangent_line(pts[i], Q, alpha))
        else:
            lines.append(line_through(pts[i], pts[j], alpha, cluster_tol))
    return np.array(lines).reshape(-1, 3)


def _probe(div, alpha, rng, cluster_tol, tries=5):
    """A conic point well away from the divisor."""
    best, best_dist = None, -1.0
    for _ in range(tries):
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        pt = ProjPoint.of(u)
        dist = min((chordal(pt, q) for q in div.locations), default=1.0)
        if dist > best_dist:
            best, best_dist = pt, dist
    if best_dist <= 10 * cluster_tol:
        raise ProbeDegenerate("no probe point away from the divisor",
                              witness={"distance": best_dist})
    return alpha(best.vector)


def leading_multipole(p, Q, parc, div=None, rng=None, cluster_tol=CLUSTER_TOL, mode="complex",
                      lam_from="probe"):
    """
    Leading multipole of ``p`` for a given parcelling of its divisor.

    Parameters
    ----------
    p : HPoly
        Degree ``d``, not divisible by ``Q``.
    Q : QuadForm
    parc : GenParcelling
        Parcelling of ``div``.
    div : ConicDivisor, optional
        Computed from ``p`` when omitted.
    rng : numpy.random.Generator or int, optional
        Source of probe points.
    mode : {"complex", "real"}
        Canonical form of the returned multipole.
    lam_from : {"probe", "restriction"}
        ``probe`` evaluates ``p / prod L`` at one conic point away from the
        divisor. ``restriction`` fits the scalar by least squares between the
        two binary forms on the conic, which is free of randomness.

    Returns
    -------
    m : Multipole
    r : HPoly
        Degree ``d - 2`` quotient with ``p = expand(m) + Q r``.

    Raises
    ------
    DivisibleInput, ProbeDegenerate, NotDivisible
    """
    Q = quadform_new(Q)
    rng = np.random.default_rng(rng)
    if div is None:
        div = divisor_of(p, Q, cluster_tol)
    lines = _parcel_lines(div, parc, Q, cluster_tol)
    prod = HPoly.constant(1.0)
    for v in lines:
        prod = prod * HPoly.linear(v)
    if lam_from == "restriction":
        bp = restrict_to_conic(p, Q.param).coeffs
        bl = restrict_to_conic(prod, Q.param).coeffs
        lam = np.vdot(bl, bp) / np.vdot(bl, bl)
    else:
        q = _probe(div, Q.param, rng, cluster_tol)
        lam = p(q) / prod(q)
    diff = p - prod * lam
    r = divide_by_form(diff, Q.hpoly) if p.degree >= 2 else HPoly(0)
    if mode == "real":
        r = r.real()
    return Multipole(p.degree, lam, lines).canonical(mode), r


def _chain(H, Q, mode, parc_mode, rng, cluster_tol):
    """Peel multipoles off a homogeneous H, degree by degree."""
    out = {}
    unique = True
    top = max(H.norm(), 1e-300)
    cur = H
    while cur.degree >= 2:
        d = cur.degree
        if cur.norm() <= ZERO_CHAIN_TOL * top:
            out[d] = Multipole.zero(d)
            cur = HPoly(d - 2)
            continue
        b = restrict_to_conic(cur, Q.param)
        if b.norm() <= ZERO_CHAIN_TOL * max(b.scale, top):
            out[d] = Multipole.zero(d)
            cur = divide_by_form(cur, Q.hpoly)
            if mode == "real":
                cur = cur.real()
            continue
        div = proj_roots(b, cluster_tol)
        try:
            parc = canonical_parcelling(div, parc_mode, Q.param, cluster_tol)
        except NotConjugateClosed:
            if parc_mode != "real_equivariant":
                raise
            # no equivariant choice found numerically; the rest of the chain
            # is carried out over the complex numbers
            parc_mode, mode = "generic", "complex"
            parc = canonical_parcelling(div, parc_mode)
            unique = False
        unique = unique and parc.unique
        out[d], cur = leading_multipole(cur, Q, parc, div, rng, cluster_tol, mode,
                                        lam_from="restriction")
    if cur.degree == 1:
        small = cur.norm() <= ZERO_CHAIN_TOL * top
        out[1] = Multipole.zero(1) if small else Multipole.from_linear(cur, mode)
    else:
        c = cur.coeffs[0]
        if mode == "real":
            c = c.real
        out[0] = Multipole.constant(c) if abs(c) > ZERO_CHAIN_TOL * top else Multipole.zero(0)
    return out, unique


def decompose(p, Q, policy="canonical_real", rng=None, cluster_tol=CLUSTER_TOL):
    """
    Write ``p`` on ``{Q = 1}`` as a sum of multipoles of degrees ``0..d``.

    Parameters
    ----------
    p : Poly or HPoly
    Q : QuadForm
    policy : {"canonical_real", "canonical_complex"}
        ``canonical_real`` needs real ``p`` and ``Q`` and uses
        conjugation-equivariant parcellings, so every multipole is real with
        ``lam >= 0``. For indefinite ``Q`` the choice may not be unique,
        which is recorded in ``meta["unique"]``.
    rng : optional
        Seed or generator for probe points.

    Returns
    -------
    Decomposition
    """
    Q = quadform_new(Q)
    p = p if isinstance(p, Poly) else Poly.from_hpoly(p)
    rng = np.random.default_rng(rng)
    if policy in ("real", "canonical_real"):
        if not (p.is_real and Q.is_real):
            raise ValueError("real policy needs real polynomial and form")
        if Q.signature() == (0, 3):
            raise Degenerate("real surface Q = 1 is empty for a negative definite form",
                             witness={"signature": [0, 3]})
        mode = "real"
        parc_mode = "real_definite" if Q.is_definite else "real_equivariant"
        p = p.real()
    elif policy in ("complex", "canonical_complex"):
        mode, parc_mode = "complex", "generic"
    else:
        raise ValueError(f"unknown policy {policy!r}")
    d = p.degree
    ws = {k: Multipole.zero(k) for k in range(d + 1)}
    unique = True
    for part in parity_split(p):
        occ = part.occupied()
        if not occ:
            continue
        H = homogenize_on_surface(part, Q)
        got, u = _chain(H, Q, mode, parc_mode, rng, cluster_tol)
        ws.update(got)
        unique = unique and u
    meta = {"policy": "canonical_real" if mode == "real" else "canonical_complex",
            "unique": bool(unique)}
    return Decomposition(Q, tuple(ws[k] for k in range(d + 1)), meta)


def enumerate_decompositions(p, Q, cap=10_000, rng=None, cluster_tol=CLUSTER_TOL,
                             dedupe_tol=1e-6, with_parcellings=False):
    """
    All leading multipoles of ``p``, one per generalized parcelling, with
    duplicates removed.

    Raises
    ------
    ExplosionGuard
        If the number of parcellings exceeds ``cap``.
    """
    Q = quadform_new(Q)
    rng = np.random.default_rng(rng)
    div = divisor_of(p, Q, cluster_tol)
    mu = div.multiplicities
    n = count_parcellings(mu)
    if n > cap:
        raise ExplosionGuard(f"{n} parcellings exceed cap {cap}",
                             witness={"count": n, "cap": cap})
    found, coeffs = [], []
    for parc in enumerate_parcellings(mu):
        m, _ = leading_multipole(p, Q, parc, div, rng, cluster_tol)
        pm = m.expand()
        # cheap vectorized screen on the products, full distance on survivors
        near = []
        if coeffs:
            E = np.array(coeffs)
            scale = np.maximum(np.linalg.norm(E, axis=1), pm.norm())
            rel = np.linalg.norm(E - pm.coeffs, axis=1) / np.where(scale > 0, scale, 1.0)
            near = np.nonzero(rel <= dedupe_tol)[0]
        if all(_distance(m, pm, found[i][0], found[i][1]) > dedupe_tol for i in near):
            found.append((m, pm, parc))
            coeffs.append(pm.coeffs)
    found = [(m, parc) for m, _, parc in found]
    found.sort(key=lambda mp: [_sort_key(v) for v in mp[0].vectors])
    return found if with_parcellings else [m for m, _ in found]


def evaluate_decomposition(dec, v, scale=1.0, tol=1e-8):
    """
    Evaluate ``sum_k scale^k expand(w_k)(v)`` at a point of ``{Q = 1}``.

    Raises
    ------
    OffSurface
        If ``|Q(v) - 1| > tol``.
    """
    v = np.asarray(v, dtype=np.complex128)
    qv = dec.surface(v)
    if abs(qv - 1) > tol:
        raise OffSurface("point is not on the surface", witness={"Q(v)": [qv.real, qv.imag]})
    total = 0j
    for w in dec.multipoles:
        total += scale ** w.degree * w(v)
    return complex(total)
