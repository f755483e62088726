"""
Generalized parcellings of a multiplicity function.

A parcelling of ``mu`` on points ``0..n-1`` is a multiset of unordered pairs
``(i, j)`` with ``i <= j`` in which point ``i`` occurs ``mu[i]`` times in
total. A pair ``(i, i)`` is a weight-2 parcel at a single point (the tangent
line case). Equivalently, it is a multigraph with loops whose degree
sequence is ``mu``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ExplosionGuard, NotConjugateClosed

__all__ = [
    "GenParcelling",
    "kappa",
    "count_parcellings",
    "enumerate_parcellings",
    "canonical_parcelling",
    "conjugation_map",
    "equivariant_parcellings",
    "MAX_ENUM_WEIGHT",
]

MAX_ENUM_WEIGHT = 24


def kappa(d):
    """
    Number of perfect matchings of ``2d`` objects, ``(2d - 1)!!``.

    Exact for every ``d`` (Python integers); ``kappa(0) == 1``.

    >>> [kappa(d) for d in range(6)]
    [1, 1, 3, 15, 105, 945]
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    out = 1
    for k in range(1, 2 * d, 2):
        out *= k
    return out


@dataclass(frozen=True)
class GenParcelling:
    """
    A generalized parcelling stored as sorted index pairs.

    Attributes
    ----------
    pairs : tuple of (int, int)
        Sorted pairs ``(i, j)`` with ``i <= j``.
    n_points : int
    unique : bool
        ``False`` when a canonical choice was made among several
        conjugation-equivariant parcellings (metadata only).
    """

    pairs: tuple
    n_points: int
    unique: bool = field(default=True, compare=False)

    @classmethod
    def from_pairs(cls, pairs, n_points, unique=True):
        norm = tuple(sorted((min(i, j), max(i, j)) for i, j in pairs))
        return cls(norm, int(n_points), unique)

    def weights(self):
        """Weight vectors ``mu_nu``, one per parcel."""
        out = []
        for i, j in self.pairs:
            w = [0] * self.n_points
            w[i] += 1
            w[j] += 1
            out.append(w)
        return out

    def multiplicities(self):
        mu = [0] * self.n_points
        for i, j in self.pairs:
            mu[i] += 1
            mu[j] += 1
        return mu

    def is_valid_for(self, mu):
        ws = self.weights()
        return (all(sum(w) == 2 and all(x in (0, 1, 2) for x in w) for w in ws)
                and self.multiplicities() == list(mu))

    def encode(self):
        return ";".join(f"{i}-{j}" for i, j in self.pairs)

    def to_json(self):
        return [list(p) for p in self.pairs]

    def __len__(self):
        return len(self.pairs)


def _check_mu(mu):
    mu = tuple(int(m) for m in mu)
    if any(m <= 0 for m in mu):
        raise ValueError("multiplicities must be positive")
    if sum(mu) % 2:
        raise ValueError("total multiplicity must be even")
    return mu


@lru_cache(maxsize=4096)
def _count(rem, jmin):
    # rem: remaining multiplicities; pairs are generated in sorted order, so
    # the next pair starts at the first point with remaining weight
    try:
        i = next(k for k, r in enumerate(rem) if r)
    except StopIteration:
        return 1
    total = 0
    for j in range(max(i, jmin), len(rem)):
        if j == i and rem[i] < 2:
            continue
        if rem[j] == 0:
            continue
        nxt = list(rem)
        nxt[i] -= 1
        nxt[j] -= 1
        # pairs still starting at i must not go below j
        total += _count(tuple(nxt), j if nxt[i] else 0)
    return total


def count_parcellings(mu):
    """
    Number of generalized parcellings of ``mu`` (memoized recursion).

    >>> count_parcellings([1, 1, 1, 1]), count_parcellings([2, 1, 1])
    (3, 2)
    """
    return _count(_check_mu(mu), 0)


def enumerate_parcellings(mu):
    """
    All generalized parcellings of ``mu``, without duplicates.

    Output is sorted lexicographically by the sorted pair encoding.

    Raises
    ------
    ExplosionGuard
        If ``sum(mu) > MAX_ENUM_WEIGHT``.
    """
    mu = _check_mu(mu)
    if sum(mu) > MAX_ENUM_WEIGHT:
        raise ExplosionGuard(f"total multiplicity {sum(mu)} exceeds {MAX_ENUM_WEIGHT}",
                             witness={"weight": sum(mu), "limit": MAX_ENUM_WEIGHT})
    n = len(mu)
    out = []
    rem = list(mu)
    stack = []

    def rec(jmin):
        try:
            i = next(k for k, r in enumerate(rem) if r)
        except StopIteration:
            out.append(GenParcelling(tuple(stack), n))
            return
        for j in range(max(i, jmin), n):
            if rem[j] == 0 or (j == i and rem[i] < 2):
                continue
            rem[i] -= 1
            rem[j] -= 1
            stack.append((i, j))
            rec(j if rem[i] else 0)
            stack.pop()
            rem[i] += 1
            rem[j] += 1

    rec(0)
    return out


# ==========================
# Canonical choices
# ==========================

def conjugation_map(div, alpha, tol=1e-7):
    """
    Index permutation induced by complex conjugation of conic points.

    ``sigma[i] = j`` when ``conj(alpha(p_i))`` is projectively equal to
    ``alpha(p_j)``; ``None`` when no partner exists within ``tol``.
    Meaningful for real forms only.
    """
    X = np.array([alpha(p.vector) for p in div.locations])
    X = X / np.linalg.norm(X, axis=1, keepdims=True)
    sigma = []
    for i in range(len(X)):
        d = np.linalg.norm(np.cross(X, np.conj(X[i])), axis=1)
        j = int(np.argmin(d))
        sigma.append(j if d[j] <= tol * 10 else None)
    return sigma


def _generic_key(p):
    if abs(p.u0) < 1e-14:
        return (1, 0.0, 0.0)
    t = p.u1 / p.u0
    return (0, round(cmath.phase(t), 9), round(abs(t), 9))


def canonical_parcelling(div, mode="generic", alpha=None, tol=1e-7):
    """
    Deterministic choice of one parcelling of a divisor.

    Parameters
    ----------
    div : ConicDivisor
    mode : {"generic", "real_definite", "real_equivariant"}
        ``generic`` first assigns ``floor(mu/2)`` weight-2 parcels at each
        point, then pairs the remaining simple points consecutively in the
        order of ``(arg, modulus)`` of ``u1/u0``. ``real_definite`` pairs each
        point with its complex conjugate (a real point of even multiplicity
        pairs with itself). ``real_equivariant`` additionally pairs odd real
        points among themselves and marks the result as non-unique.
    alpha : ConicParam
        Required by the real modes.
    tol : float

    Raises
    ------
    NotConjugateClosed
        In the real modes when conjugation pairing fails.
    """
    mu = div.multiplicities
    n = len(mu)
    if mode == "generic":
        pairs = []
        odd = []
        for i, m in enumerate(mu):
            pairs += [(i, i)] * (m // 2)
            if m % 2:
                odd.append(i)
        odd.sort(key=lambda i: _generic_key(div.locations[i]))
        pairs += [(odd[k], odd[k + 1]) for k in range(0, len(odd), 2)]
        return GenParcelling.from_pairs(pairs, n)
    if mode not in ("real_definite", "real_equivariant"):
        raise ValueError(f"unknown mode {mode!r}")
    if alpha is None:
        raise ValueError("real modes need the conic parametrization")
    sigma = conjugation_map(div, alpha, tol)
    pairs = []
    real_odd = []
    for i, j in enumerate(sigma):
        if j is None or sigma[j] != i or mu[i] != mu[j]:
            raise NotConjugateClosed("divisor is not closed under conjugation",
                                     witness={"index": i, "point": div.locations[i].to_json()})
        if j > i:
            pairs += [(i, j)] * mu[i]
        elif j == i:
            pairs += [(i, i)] * (mu[i] // 2)
            if mu[i] % 2:
                real_odd.append(i)
    if real_odd and mode == "real_definite":
        raise NotConjugateClosed("real point of odd multiplicity has no partner",
                                 witness={"index": real_odd[0]})
    unique = not real_odd
    if real_odd:
        real_odd.sort(key=lambda i: _generic_key(div.locations[i]))
        pairs += [(real_odd[k], real_odd[k + 1]) for k in range(0, len(real_odd), 2)]
    return GenParcelling.from_pairs(pairs, n, unique=unique)


def equivariant_parcellings(div, alpha, tol=1e-7):
    """
    Enumerated parcellings that are invariant under conjugation.

    A parcelling counts as equivariant when the conjugation permutation maps
    its multiset of pairs onto itself.
    """
    sigma = conjugation_map(div, alpha, tol)
    if any(s is None for s in sigma):
        raise NotConjugateClosed("divisor is not closed under conjugation")
    out = []
    for parc in enumerate_parcellings(div.multiplicities):
        image = sorted((min(sigma[i], sigma[j]), max(sigma[i], sigma[j]))
                       for i, j in parc.pairs)
        if tuple(image) == parc.pairs:
            out.append(parc)
    return out
