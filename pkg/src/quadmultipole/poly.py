"""
Dense trivariate polynomial arithmetic over complex scalars.

Homogeneous polynomials of degree ``d`` are stored as dense coefficient
vectors of length ``(d+1)(d+2)/2`` in graded-lexicographic order with
``x > y > z``; for ``d = 2`` the slots are ``x^2, xy, xz, y^2, yz, z^2``.
"""

from __future__ import annotations

import re
from functools import lru_cache

import numpy as np

from .errors import NotDivisible, ParityError, PolynomialSyntaxError

__all__ = [
    "HPoly",
    "Poly",
    "n_monomials",
    "dim_up_to",
    "monomial_exponents",
    "monomial_index",
    "parse_poly",
    "format_poly",
    "hpoly_mul",
    "hpoly_eval",
    "parity_split",
    "homogenize_on_surface",
    "divide_by_form",
    "multiplication_matrix",
    "derivative_matrix",
    "substitute_linear",
    "DIV_TOL",
]

DIV_TOL = 1e-9


# ==========
# Monomials
# ==========

def n_monomials(d):
    """Number of monomials of degree exactly ``d`` in three variables."""
    if d < 0:
        return 0
    return (d + 1) * (d + 2) // 2


def dim_up_to(d):
    """
    Dimension of the space of polynomials of degree at most ``d``.

    >>> [dim_up_to(d) for d in range(4)]
    [1, 4, 10, 20]
    """
    return (d + 1) * (d + 2) * (d + 3) // 6 if d >= 0 else 0


def monomial_index(i, j, k):
    d = i + j + k
    return (d - i) * (d - i + 1) // 2 + (d - i - j)


@lru_cache(maxsize=None)
def monomial_exponents(d):
    """Exponent table of shape ``(n_monomials(d), 3)`` in graded-lex order."""
    rows = [(i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1)]
    out = np.array(rows, dtype=np.int64).reshape(-1, 3)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def _product_index(da, db):
    ea = monomial_exponents(da)
    eb = monomial_exponents(db)
    s = ea[:, None, :] + eb[None, :, :]
    d = da + db
    i, j = s[..., 0], s[..., 1]
    idx = (d - i) * (d - i + 1) // 2 + (d - i - j)
    idx.flags.writeable = False
    return idx


def _as_coeffs(c, d):
    arr = np.array(c, dtype=np.complex128).reshape(-1)
    if arr.size != n_monomials(d):
        raise ValueError(
            f"degree {d} needs {n_monomials(d)} coefficients, got {arr.size}")
    arr.flags.writeable = False
    return arr


# ======
# HPoly
# ======

class HPoly:
    """
    Homogeneous polynomial in ``x, y, z`` with complex coefficients.

    Parameters
    ----------
    degree : int
        Total degree.
    coeffs : array_like
        Dense coefficients in graded-lex order. Defaults to the zero
        polynomial of the given degree.

    Notes
    -----
    Instances are immutable; the coefficient array is read-only.
    """

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree, coeffs=None):
        degree = int(degree)
        if degree < 0:
            raise ValueError("degree must be non-negative")
        if coeffs is None:
            coeffs = np.zeros(n_monomials(degree), dtype=np.complex128)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", _as_coeffs(coeffs, degree))

    def __setattr__(self, name, value):
        raise AttributeError("HPoly is immutable")

    # constructors

    @classmethod
    def zero(cls, degree):
        return cls(degree)

    @classmethod
    def constant(cls, value):
        return cls(0, [value])

    @classmethod
    def monomial(cls, i, j, k, coeff=1.0):
        d = i + j + k
        c = np.zeros(n_monomials(d), dtype=np.complex128)
        c[monomial_index(i, j, k)] = coeff
        return cls(d, c)

    @classmethod
    def linear(cls, vec):
        """The linear form ``a x + b y + c z`` for ``vec = (a, b, c)``."""
        return cls(1, np.asarray(vec, dtype=np.complex128))

    @classmethod
    def from_function(cls, degree, func):
        """Build from a callable ``(i, j, k) -> coefficient``."""
        exps = monomial_exponents(degree)
        return cls(degree, [func(*e) for e in exps])

    # basic properties

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def is_zero(self, tol=0.0):
        return self.norm() <= tol

    @property
    def is_real(self):
        return bool(np.all(self.coeffs.imag == 0))

    def conj(self):
        return HPoly(self.degree, np.conj(self.coeffs))

    def real(self):
        return HPoly(self.degree, self.coeffs.real)

    def coeff(self, i, j, k):
        return complex(self.coeffs[monomial_index(i, j, k)])

    # arithmetic

    def _check_same_degree(self, other):
        if other.degree != self.degree:
            raise ValueError(
                f"degree mismatch: {self.degree} vs {other.degree}; "
                "use Poly for mixed degrees")

    def __add__(self, other):
        if isinstance(other, HPoly):
            self._check_same_degree(other)
            return HPoly(self.degree, self.coeffs + other.coeffs)
        return Poly.from_hpoly(self) + other

    __radd__ = __add__

    def __neg__(self):
        return HPoly(self.degree, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, HPoly):
            return hpoly_mul(self, other)
        if isinstance(other, Poly):
            return Poly.from_hpoly(self) * other
        return HPoly(self.degree, self.coeffs * complex(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, scalar):
        return HPoly(self.degree, self.coeffs / complex(scalar))

    def __pow__(self, n):
        n = int(n)
        out = HPoly.constant(1.0)
        base = self
        while n:
            if n & 1:
                out = hpoly_mul(out, base)
            n >>= 1
            if n:
                base = hpoly_mul(base, base)
        return out

    def __call__(self, v):
        return hpoly_eval(self, v)

    def __eq__(self, other):
        return (isinstance(other, HPoly) and other.degree == self.degree
                and np.array_equal(other.coeffs, self.coeffs))

    def __hash__(self):
        return hash((self.degree, self.coeffs.tobytes()))

    def allclose(self, other, tol=1e-10):
        """Relative coefficient comparison."""
        if other.degree != self.degree:
            return False
        scale = max(1.0, self.norm(), other.norm())
        return float(np.linalg.norm(self.coeffs - other.coeffs)) <= tol * scale

    def derivative(self, var):
        if self.degree == 0:
            return HPoly(0)
        return HPoly(self.degree - 1, derivative_matrix(self.degree, var) @ self.coeffs)

    def gradient(self):
        return [self.derivative(m) for m in range(3)]

    def __repr__(self):
        return f"HPoly({self.degree}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def hpoly_mul(a, b):
    """Exact product of two homogeneous polynomials (monomial convolution)."""
    idx = _product_index(a.degree, b.degree)
    prod = np.multiply.outer(a.coeffs, b.coeffs).ravel()
    n = n_monomials(a.degree + b.degree)
    flat = idx.ravel()
    re = np.bincount(flat, weights=prod.real, minlength=n)
    im = np.bincount(flat, weights=prod.imag, minlength=n)
    return HPoly(a.degree + b.degree, re + 1j * im)


def _monomial_values(d, pts):
    """Matrix of monomial values, shape ``(npts, n_monomials(d))``."""
    pts = np.asarray(pts, dtype=np.complex128)
    exps = monomial_exponents(d)
    pw = np.ones((3, d + 1, pts.shape[0]), dtype=np.complex128)
    for e in range(1, d + 1):
        pw[:, e, :] = pw[:, e - 1, :] * pts.T
    return (pw[0, exps[:, 0], :] * pw[1, exps[:, 1], :] * pw[2, exps[:, 2], :]).T


def hpoly_eval(p, v):
    """
    Evaluate a homogeneous polynomial.

    Parameters
    ----------
    p : HPoly
    v : array_like
        A single 3-vector or an array of shape ``(n, 3)``.

    Returns
    -------
    complex or numpy.ndarray
    """
    v = np.asarray(v, dtype=np.complex128)
    single = v.ndim == 1
    pts = v.reshape(-1, 3)
    vals = _monomial_values(p.degree, pts) @ p.coeffs
    return complex(vals[0]) if single else vals


@lru_cache(maxsize=None)
def derivative_matrix(d, var):
    """Matrix of ``d/d(var)`` from degree ``d`` to degree ``d - 1``."""
    exps = monomial_exponents(d)
    out = np.zeros((n_monomials(d - 1), n_monomials(d)))
    for col, e in enumerate(exps):
        if e[var] == 0:
            continue
        f = list(e)
        f[var] -= 1
        out[monomial_index(*f), col] = e[var]
    out.flags.writeable = False
    return out


def multiplication_matrix(q, d):
    """Matrix of ``r -> q * r`` from degree ``d`` into degree ``d + deg q``."""
    idx = _product_index(q.degree, d)
    n = n_monomials(q.degree + d)
    out = np.zeros((n, n_monomials(d)), dtype=np.complex128)
    cols = np.broadcast_to(np.arange(n_monomials(d)), idx.shape)
    vals = np.broadcast_to(q.coeffs[:, None], idx.shape)
    np.add.at(out, (idx.ravel(), cols.ravel()), vals.ravel())
    return out


def substitute_linear(p, M):
    """
    Compose with a linear change of variables: returns ``x -> p(x @ M)``.

    ``x`` is a row vector, so the new variable ``m`` is the linear form whose
    coefficients are column ``m`` of ``M``.
    """
    M = np.asarray(M, dtype=np.complex128)
    forms = [HPoly.linear(M[:, m]) for m in range(3)]
    powers = []
    for f in forms:
        row = [HPoly.constant(1.0)]
        for _ in range(p.degree):
            row.append(hpoly_mul(row[-1], f))
        powers.append(row)
    out = np.zeros(n_monomials(p.degree), dtype=np.complex128)
    for c, (i, j, k) in zip(p.coeffs, monomial_exponents(p.degree)):
        if c == 0:
            continue
        term = hpoly_mul(hpoly_mul(powers[0][i], powers[1][j]), powers[2][k])
        out += c * term.coeffs
    return HPoly(p.degree, out)


# =====
# Poly
# =====

class Poly:
    """
    Inhomogeneous polynomial stored as one homogeneous part per degree.

    ``parts[k]`` is the degree-``k`` component (possibly zero). Trailing
    zero parts are trimmed, so ``degree`` is the highest occupied degree.
    """

    __slots__ = ("parts",)

    def __init__(self, parts):
        parts = list(parts)
        for k, p in enumerate(parts):
            if p.degree != k:
                raise ValueError(f"part {k} has degree {p.degree}")
        while len(parts) > 1 and not np.any(parts[-1].coeffs):
            parts.pop()
        if not parts:
            parts = [HPoly(0)]
        object.__setattr__(self, "parts", tuple(parts))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def from_hpoly(cls, h):
        return cls([HPoly(k) for k in range(h.degree)] + [h])

    @classmethod
    def from_parts(cls, mapping):
        """Build from a ``{degree: HPoly}`` mapping (parts are summed)."""
        if not mapping:
            return cls([HPoly(0)])
        top = max(mapping)
        parts = [HPoly(k) for k in range(top + 1)]
        for k, h in mapping.items():
            parts[k] = parts[k] + h
        return cls(parts)

    @classmethod
    def constant(cls, value):
        return cls([HPoly.constant(value)])

    @property
    def degree(self):
        return len(self.parts) - 1

    def part(self, k):
        return self.parts[k] if 0 <= k < len(self.parts) else HPoly(max(k, 0))

    def occupied(self):
        return [k for k, p in enumerate(self.parts) if np.any(p.coeffs)]

    def is_homogeneous(self):
        return len(self.occupied()) <= 1

    def homogeneous(self):
        """Return the single occupied part as an HPoly."""
        occ = self.occupied()
        if len(occ) > 1:
            raise ValueError("polynomial is not homogeneous")
        return self.parts[occ[0]] if occ else HPoly(self.degree)

    def norm(self):
        return float(np.sqrt(sum(p.norm() ** 2 for p in self.parts)))

    @property
    def is_real(self):
        return all(p.is_real for p in self.parts)

    def real(self):
        return Poly([p.real() for p in self.parts])

    def _lift(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, HPoly):
            return Poly.from_hpoly(other)
        return Poly.constant(other)

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.parts), len(other.parts))
        return Poly([self.part(k) + other.part(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-p for p in self.parts])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, (Poly, HPoly)):
            return Poly([p * other for p in self.parts])
        other = self._lift(other)
        acc = {}
        for a in self.parts:
            if not np.any(a.coeffs):
                continue
            for b in other.parts:
                if not np.any(b.coeffs):
                    continue
                k = a.degree + b.degree
                acc[k] = acc[k] + hpoly_mul(a, b) if k in acc else hpoly_mul(a, b)
        return Poly.from_parts(acc)

    __rmul__ = __mul__

    def __call__(self, v):
        v = np.asarray(v, dtype=np.complex128)
        total = 0
        for p in self.parts:
            total = total + hpoly_eval(p, v)
        return total

    def __eq__(self, other):
        return isinstance(other, Poly) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def allclose(self, other, tol=1e-10):
        other = self._lift(other)
        n = max(len(self.parts), len(other.parts))
        diff = np.sqrt(sum(np.linalg.norm(self.part(k).coeffs - other.part(k).coeffs) ** 2
                           for k in range(n)))
        return diff <= tol * max(1.0, self.norm(), other.norm())

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def parity_split(p):
    """Split ``p`` into its even-degree and odd-degree parts."""
    p = p if isinstance(p, Poly) else Poly.from_hpoly(p)
    even = Poly([h if k % 2 == 0 else HPoly(k) for k, h in enumerate(p.parts)])
    odd = Poly([h if k % 2 == 1 else HPoly(k) for k, h in enumerate(p.parts)])
    return even, odd


def homogenize_on_surface(p, Q):
    """
    Homogenize a parity-pure polynomial on the surface ``{Q = 1}``.

    Each part of degree ``k`` is multiplied by ``Q^((m - k)/2)`` where ``m`` is
    the top occupied degree, so the result agrees with ``p`` wherever
    ``Q = 1``.

    Parameters
    ----------
    p : Poly or HPoly
    Q : QuadForm or HPoly
        The quadratic form (an :class:`HPoly` of degree 2 is accepted).

    Raises
    ------
    ParityError
        If ``p`` has parts of both parities.
    """
    p = p if isinstance(p, Poly) else Poly.from_hpoly(p)
    q = Q if isinstance(Q, HPoly) else Q.hpoly
    occ = p.occupied()
    if not occ:
        return HPoly(p.degree)
    if len({k % 2 for k in occ}) > 1:
        raise ParityError("polynomial mixes even and odd degrees", witness=occ)
    m = max(occ)
    out = p.parts[m]
    qpow = HPoly.constant(1.0)
    for k in range(m - 2, -1, -2):
        qpow = hpoly_mul(qpow, q)
        if k in occ:
            out = out + hpoly_mul(qpow, p.parts[k])
    return out


def divide_by_form(p, q, tol=None):
    """
    Divide ``p`` by the form ``q`` with a certified residual.

    Solves ``(multiplication by q) r = p`` in least squares and checks that
    ``||q r - p|| <= tol * max(1, ||p||)``; ``tol`` defaults to the module
    value ``DIV_TOL`` read at call time.

    Raises
    ------
    NotDivisible
        When the residual certificate fails.
    """
    if tol is None:
        tol = DIV_TOL
    if q.degree > p.degree:
        raise ValueError("divisor degree exceeds dividend degree")
    if not np.any(q.coeffs):
        raise ZeroDivisionError("division by the zero form")
    dr = p.degree - q.degree
    M = multiplication_matrix(q, dr)
    r, *_ = np.linalg.lstsq(M, p.coeffs, rcond=None)
    resid = float(np.linalg.norm(M @ r - p.coeffs))
    if resid > tol * max(1.0, p.norm()):
        raise NotDivisible(f"residual {resid:.3e} exceeds tolerance", resid)
    return HPoly(dr, r)


# ==========================
# Parsing and formatting
# ==========================

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_NUM_RE = re.compile(_NUM)
_VAR_INDEX = {"x": 0, "y": 1, "z": 2}


class _Parser:

    def __init__(self, text):
        self.text = text
        self.raw = text.encode("utf-8")
        self.pos = 0

    def _offset(self):
        return len(self.text[: self.pos].encode("utf-8"))

    def error(self, msg):
        raise PolynomialSyntaxError(msg, self._offset())

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, ch):
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def number(self):
        self.skip()
        m = _NUM_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return float(m.group())

    def integer(self):
        self.skip()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            self.error("expected an integer exponent")
        self.pos = m.end()
        return int(m.group())

    def complex_literal(self):
        # '(' already consumed: accepts (a), (bi), (a+bi), (a-i), (i)
        value = 0j
        first = True
        while True:
            if self.eat(")"):
                if first:
                    self.error("empty complex literal")
                return value
            sign = 1.0
            ch = self.peek()
            if ch in ("+", "-"):
                sign = -1.0 if ch == "-" else 1.0
                self.pos += 1
            elif not first:
                self.error("expected '+', '-' or ')' in complex literal")
            ch = self.peek()
            if ch == "i":
                self.pos += 1
                value += sign * 1j
            elif ch and (ch.isdigit() or ch == "."):
                num = self.number()
                if self.eat("i"):
                    value += sign * num * 1j
                else:
                    value += sign * num
            else:
                self.error("malformed complex literal")
            first = False

    def factor(self, exps):
        """Parse one factor; returns a scalar multiplier, updates ``exps``."""
        ch = self.peek()
        if ch in _VAR_INDEX:
            self.pos += 1
            power = 1
            if self.eat("^"):
                power = self.integer()
            exps[_VAR_INDEX[ch]] += power
            return 1.0
        if ch == "(":
            self.pos += 1
            return self.complex_literal()
        if ch and (ch.isdigit() or ch == "."):
            return self.number()
        if ch == "":
            self.error("unexpected end of input")
        self.error(f"unexpected character {ch!r}")

    def term(self):
        exps = [0, 0, 0]
        coeff = complex(self.factor(exps))
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                coeff *= self.factor(exps)
            elif ch in _VAR_INDEX or ch == "(":
                coeff *= self.factor(exps)
            elif ch and (ch.isdigit() or ch == "."):
                self.error("a number must not follow a variable without '*'")
            else:
                return coeff, tuple(exps)

    def parse(self):
        terms = []
        sign = 1.0
        if self.peek() in "+-":
            sign = -1.0 if self.text[self.pos] == "-" else 1.0
            self.pos += 1
        while True:
            c, e = self.term()
            terms.append((sign * c, e))
            ch = self.peek()
            if ch == "":
                return terms
            if ch not in "+-":
                self.error(f"unexpected character {ch!r}")
            sign = -1.0 if ch == "-" else 1.0
            self.pos += 1


def parse_poly(text):
    """
    Parse a polynomial expression in ``x, y, z``.

    The grammar accepts terms joined by ``+``/``-``; each term is an optional
    coefficient (decimal real or a ``(a+bi)`` complex literal) followed by a
    product of ``x``, ``y``, ``z`` with optional ``^k``. ``*`` between
    factors may be omitted. Whitespace is ignored.

    >>> parse_poly("x^2+y^2-2*z^2").homogeneous().coeffs.real
    array([ 1.,  0.,  0.,  1.,  0., -2.])
    """
    if not text.strip():
        raise PolynomialSyntaxError("empty polynomial expression", 0)
    terms = _Parser(text).parse()
    acc = {}
    for c, (i, j, k) in terms:
        d = i + j + k
        if d not in acc:
            acc[d] = np.zeros(n_monomials(d), dtype=np.complex128)
        acc[d][monomial_index(i, j, k)] += c
    return Poly.from_parts({d: HPoly(d, c) for d, c in acc.items()})


def _fmt_real(x):
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _fmt_coeff(c):
    """Return (sign, body) with body empty for a unit coefficient."""
    if c.imag == 0:
        sign = "-" if c.real < 0 else "+"
        mag = abs(c.real)
        return sign, ("" if mag == 1 else _fmt_real(mag))
    if c.real == 0:
        sign = "-" if c.imag < 0 else "+"
        mag = abs(c.imag)
        return sign, "(" + ("" if mag == 1 else _fmt_real(mag)) + "i)"
    im = c.imag
    body = _fmt_real(c.real) + ("-" if im < 0 else "+") + \
        ("" if abs(im) == 1 else _fmt_real(abs(im))) + "i"
    return "+", "(" + body + ")"


def _fmt_monomial(i, j, k):
    out = []
    for name, e in zip("xyz", (i, j, k)):
        if e == 1:
            out.append(name)
        elif e > 1:
            out.append(f"{name}^{e}")
    return "*".join(out)


def format_poly(p):
    """Format in canonical grammar, highest degree first, graded-lex order."""
    parts = [p] if isinstance(p, HPoly) else list(p.parts)
    chunks = []
    for h in sorted(parts, key=lambda h: -h.degree):
        for c, e in zip(h.coeffs, monomial_exponents(h.degree)):
            if c == 0:
                continue
            sign, body = _fmt_coeff(complex(c))
            mono = _fmt_monomial(*e)
            if mono and body:
                term = f"{body}*{mono}"
            elif mono:
                term = mono
            else:
                term = body or "1"
            chunks.append((sign, term))
    if not chunks:
        return "0"
    out = ("-" if chunks[0][0] == "-" else "") + chunks[0][1]
    for sign, term in chunks[1:]:
        out += sign + term
    return out
