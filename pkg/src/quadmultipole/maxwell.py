"""
Maxwell-type representations of Q-harmonic forms.

Directional derivatives of ``Q^(-1/2)`` have the shape

    grad_{u_1} ... grad_{u_d} Q^(-1/2) = N_d * Q^(-(2d+1)/2)

with ``N_d`` a Q-harmonic form of degree ``d``. Only the numerators are ever
computed, so no branch of the square root is chosen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivisibleInput, Mismatch, NotConjugateClosed, NotHarmonic
from .harmonic import harmonic_decompose
from .parcelling import enumerate_parcellings
from .poly import HPoly
from .quadform import laplacian_q, quadform_new
from .sylvester import decompose, divisor_of, leading_multipole

__all__ = [
    "MaxwellState",
    "maxwell_steps",
    "maxwell_apply",
    "maxwell_from_harmonic",
    "maxwell_sum",
    "directional",
    "maxwell_resum",
    "FIT_TOL",
]

FIT_TOL = 1e-7
HARMONIC_TOL = 1e-8


@dataclass(frozen=True)
class MaxwellState:
    """Numerator ``N_j`` standing for ``N_j * Q^(-(2j+1)/2)``."""

    numerator: HPoly
    step: int


def directional(p, u):
    """Derivative of ``p`` along the (complex) vector ``u``."""
    u = np.asarray(u, dtype=np.complex128)
    out = HPoly(max(p.degree - 1, 0))
    for i, g in enumerate(p.gradient()):
        if u[i] != 0:
            out = out + g * u[i]
    return out


def maxwell_steps(Q, dirs):
    """All intermediate states ``N_0 .. N_d``."""
    Q = quadform_new(Q)
    q = Q.hpoly
    N = HPoly.constant(1.0)
    states = [MaxwellState(N, 0)]
    for j, u in enumerate(dirs):
        dq = directional(q, u)
        tail = N * dq * (-(2 * j + 1) / 2)
        N = tail if N.degree == 0 else q * directional(N, u) + tail
        states.append(MaxwellState(N, j + 1))
    return states


def maxwell_apply(Q, dirs):
    """
    Numerator of ``grad_{u_1} ... grad_{u_d} Q^(-1/2)``.

    Parameters
    ----------
    Q : QuadForm
    dirs : sequence of 3-vectors

    Returns
    -------
    HPoly
        ``N_d`` of degree ``d = len(dirs)``; Q-harmonic.

    Examples
    --------
    >>> from quadmultipole import SPHERE
    >>> print(maxwell_apply(SPHERE, [[0, 0, 1]]))
    -z
    """
    return maxwell_steps(Q, list(dirs))[-1].numerator


def _fit(N, p):
    nn = np.vdot(N.coeffs, N.coeffs)
    if nn == 0:
        return 0j, 1.0
    lam = np.vdot(N.coeffs, p.coeffs) / nn
    dist = np.linalg.norm(lam * N.coeffs - p.coeffs) / max(p.norm(), 1e-300)
    return complex(lam), float(dist)


def maxwell_from_harmonic(p, Q, rng=None, return_parcelling=False):
    """
    Directions ``u_j`` and scalar ``lam`` with ``p = lam * maxwell_apply(Q, u)``.

    The directions come from the leading multipole of ``p``: a linear form
    ``w . x`` corresponds to the direction ``u = B^-1 w``. The canonical
    parcelling is tried first (the real one for real input), then every
    other parcelling of the divisor.

    Returns
    -------
    dirs : list of numpy.ndarray
    lam : complex
    parcelling : GenParcelling or None
        Only when ``return_parcelling`` is set; ``None`` means the canonical
        choice worked.

    Raises
    ------
    NotHarmonic
        If ``Delta_Q p`` is not numerically zero.
    Mismatch
        If no parcelling gives Maxwell directions within ``FIT_TOL``.
    """
    Q = quadform_new(Q)
    scale = max(p.norm(), 1e-300)
    lap = laplacian_q(Q, p).norm() if p.degree >= 2 else 0.0
    lap_scale = max(1.0, np.linalg.norm(Q.Binv, 2))
    if lap > HARMONIC_TOL * scale * lap_scale:
        raise NotHarmonic("polynomial is not Q-harmonic",
                          witness={"laplacian_norm": float(lap), "norm": float(p.norm())})
    d = p.degree

    def attempt(vectors):
        dirs = [Q.Binv @ w for w in vectors]
        lam, dist = _fit(maxwell_apply(Q, dirs), p)
        return dirs, lam, dist

    def done(dirs, lam, parc):
        return (dirs, lam, parc) if return_parcelling else (dirs, lam)

    if d == 0:
        return done([], complex(p.coeffs[0]), None)
    if d == 1:
        dirs, lam, dist = attempt([p.coeffs])
        return done(dirs, lam, None)

    best = np.inf
    policies = ["canonical_complex"]
    if p.is_real and Q.is_real and Q.signature() != (0, 3):
        policies.insert(0, "canonical_real")
    for policy in policies:
        try:
            dec = decompose(p, Q, policy=policy, rng=rng)
        except (NotConjugateClosed, DivisibleInput):
            continue
        dirs, lam, dist = attempt(dec.multipoles[d].vectors)
        best = min(best, dist)
        if dist <= FIT_TOL:
            return done(dirs, lam, None)
    try:
        div = divisor_of(p, Q)
    except DivisibleInput:
        raise NotHarmonic("polynomial is divisible by the quadratic form") from None
    for parc in enumerate_parcellings(div.multiplicities):
        m, _ = leading_multipole(p, Q, parc, div, rng)
        dirs, lam, dist = attempt(m.vectors)
        best = min(best, dist)
        if dist <= FIT_TOL:
            return done(dirs, lam, parc)
    raise Mismatch("no parcelling yields Maxwell directions", distance=best)


def maxwell_sum(p, Q, rng=None, tol=1e-12):
    """
    Maxwell-type expansion ``p = sum_k Q^k lam_k N^(k)``.

    Returns
    -------
    list of (k, dirs, lam)
        ``k`` is the power of ``Q``; ``len(dirs) = deg p - 2k``. Zero
        harmonic components are skipped.
    """
    Q = quadform_new(Q)
    dec = harmonic_decompose(p, Q)
    out = []
    scale = max(p.norm(), 1e-300)
    for k, f in enumerate(dec.components):
        if f.norm() <= tol * scale:
            continue
        dirs, lam = maxwell_from_harmonic(f, Q, rng)
        out.append((k, dirs, lam))
    return out


def maxwell_resum(terms, Q, degree):
    """Rebuild ``sum_k Q^k lam_k N^(k)`` as an HPoly of the given degree."""
    Q = quadform_new(Q)
    out = HPoly(degree)
    for k, dirs, lam in terms:
        out = out + (Q.hpoly ** k) * maxwell_apply(Q, dirs) * lam
    return out
