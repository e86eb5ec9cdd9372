"""Exact univariate polynomial algebra over the rationals.

Scalars are :class:`fractions.Fraction`. Polynomials are dense, with
coefficients stored in ascending order of degree. Root counting uses Sturm
chains evaluated exactly, and the resultant/discriminant are computed from a
fraction-free determinant of the Sylvester matrix, so none of the
certificates here ever approximate a root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction]

INF = math.inf


def as_fraction(value) -> Fraction:
    """Coerce ``value`` to a Fraction, parsing ``"p/q"`` strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(value: Number) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is one."""
    value = as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text or any(c in text for c in ".eE"):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


class Polynomial:
    """Dense univariate polynomial, coefficients in ascending degree.

    Coefficients are normally Fractions. Approximate coefficients (mpmath
    ``mpf``) are tolerated by the ring operations so the high-precision path
    can reuse them, but the certificates require exact input.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = []
        for c in coeffs:
            if isinstance(c, (int, str)) and not isinstance(c, bool):
                c = as_fraction(c)
            cs.append(c)
        while cs and cs[-1] == 0:
            cs.pop()
        self._coeffs = tuple(cs)

    # construction helpers
    @classmethod
    def constant(cls, c: Number) -> "Polynomial":
        return cls([c])

    @classmethod
    def monomial(cls, degree: int, c: Number = 1) -> "Polynomial":
        return cls([0] * degree + [c])

    @classmethod
    def from_roots(cls, roots: Iterable[Number]) -> "Polynomial":
        p = cls([1])
        for r in roots:
            if isinstance(r, (str, int)):
                r = as_fraction(r)
            p = p * cls([-r, 1])
        return p

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self._coeffs) - 1

    @property
    def leading(self):
        return self._coeffs[-1] if self._coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self._coeffs)

    def __len__(self):
        return len(self._coeffs)

    def __getitem__(self, i):
        return self._coeffs[i] if 0 <= i < len(self._coeffs) else 0

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self._coeffs == Polynomial([other])._coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return f"Polynomial({[format_rational(c) if not _is_approx(c) else str(c) for c in self._coeffs]})"

    def __str__(self):
        if self.is_zero():
            return "0"
        out = ""
        for i in range(self.degree, -1, -1):
            c = self._coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            cs = format_rational(mag) if not _is_approx(mag) else str(mag)
            mono = "" if i == 0 else "t" if i == 1 else f"t^{i}"
            term = cs if i == 0 else mono if mag == 1 else f"{cs}*{mono}"
            out += (f" {sign} " if out else ("-" if sign == "-" else "")) + term
        return out

    # ring operations
    def __neg__(self):
        return Polynomial(-c for c in self._coeffs)

    def __add__(self, other):
        a, other = _promote(self, _coerce(other))
        n = max(len(a), len(other))
        return Polynomial(a[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __sub__(self, other):
        a, other = _promote(self, _coerce(other))
        n = max(len(a), len(other))
        return Polynomial(a[i] - other[i] for i in range(n))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        left, other = _promote(self, _coerce(other))
        if left.is_zero() or other.is_zero():
            return Polynomial()
        out = [0] * (len(left) + len(other) - 1)
        for i, a in enumerate(left._coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other._coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        return divmod_poly(self, _coerce(other))

    def __floordiv__(self, other):
        return divmod_poly(self, _coerce(other))[0]

    def __mod__(self, other):
        return divmod_poly(self, _coerce(other))[1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self._coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self._coeffs) if i > 0)

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lc = self.leading
        return Polynomial(c / lc for c in self._coeffs)

    def shift(self, k: int) -> "Polynomial":
        """Multiply by ``t**k``."""
        if self.is_zero():
            return self
        return Polynomial([0] * k + list(self._coeffs))

    def divides(self, other: "Polynomial") -> bool:
        return divmod_poly(other, self)[1].is_zero()

    def integer_primitive(self) -> list[int]:
        """Integer coefficients of a positive rational multiple of ``self``."""
        if not self.is_exact:
            raise TypeError("integer_primitive needs exact coefficients")
        if self.is_zero():
            return []
        den = reduce(math.lcm, (Fraction(c).denominator for c in self._coeffs), 1)
        ints = [int(Fraction(c) * den) for c in self._coeffs]
        g = reduce(math.gcd, ints, 0)
        return [c // g for c in ints]


def _is_approx(c) -> bool:
    return not isinstance(c, (int, Fraction))


def _coerce(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    return Polynomial([x])


def _promote(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    # Fraction does not combine with mpf on the left, so mixed operands go approximate
    if a.is_exact and b.is_exact:
        return a, b
    import mpmath

    def up(p):
        return Polynomial(mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction)
                          else mpmath.mpf(c) if isinstance(c, int) else c for c in p.coeffs)
    return up(a), up(b)


def divmod_poly(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Long division ``a = q*b + r`` with ``deg r < deg b``."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    a, b = _promote(a, b)
    rem = list(a.coeffs)
    db = b.degree
    lc = b.leading
    if len(rem) - 1 < db:
        return Polynomial(), a
    quo = [Fraction(0)] * (len(rem) - db)
    bc = b.coeffs
    for k in range(len(rem) - 1 - db, -1, -1):
        c = rem[k + db] / lc
        quo[k] = c
        if c != 0:
            for j in range(db + 1):
                rem[k + j] -= c * bc[j]
    return Polynomial(quo), Polynomial(rem[:db])


def gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class Interval:
    """Real interval, closed at each finite endpoint.

    Infinite endpoints are ``-math.inf`` / ``math.inf``.
    """

    lower: Union[Fraction, float] = -INF
    upper: Union[Fraction, float] = INF

    def __post_init__(self):
        lo, hi = self.lower, self.upper
        if not _is_inf(lo):
            object.__setattr__(self, "lower", as_fraction(lo))
        if not _is_inf(hi):
            object.__setattr__(self, "upper", as_fraction(hi))
        if lo == INF or hi == -INF:
            raise ValueError("lower bound cannot be +inf and upper cannot be -inf")
        if not self.lower < self.upper:
            raise ValueError(f"empty interval [{lo}, {hi}]")

    @classmethod
    def parse(cls, lower: str, upper: str) -> "Interval":
        return cls(_parse_bound(lower), _parse_bound(upper))

    @property
    def is_finite(self) -> bool:
        return not (_is_inf(self.lower) or _is_inf(self.upper))

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper

    def midpoint(self) -> Fraction:
        if not self.is_finite:
            raise ValueError("unbounded interval has no midpoint")
        return (self.lower + self.upper) / 2

    def to_strings(self) -> list[str]:
        return [_format_bound(self.lower), _format_bound(self.upper)]

    def __str__(self):
        lo, hi = self.to_strings()
        left = "(" if _is_inf(self.lower) else "["
        right = ")" if _is_inf(self.upper) else "]"
        return f"{left}{lo}, {hi}{right}"


def _is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


def _parse_bound(text) -> Union[Fraction, float]:
    if isinstance(text, (int, Fraction)):
        return as_fraction(text)
    t = str(text).strip().lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return INF
    if t in ("-inf", "-infinity"):
        return -INF
    return parse_rational(t)


def _format_bound(x) -> str:
    if _is_inf(x):
        return "inf" if x > 0 else "-inf"
    return format_rational(x)


# ---------------------------------------------------------------------------
# Sturm chains and root counting


def _int_rem(a: list[int], b: list[int]) -> list[int]:
    """Remainder of ``a`` by ``b`` up to a positive rational factor, primitive."""
    ra = Polynomial(a) % Polynomial(b)
    return ra.integer_primitive()


def sturm_chain(p: Polynomial) -> list[list[int]]:
    """Canonical Sturm chain ``p, p', -rem(...)...`` as integer coefficient lists.

    Each element is rescaled by a positive rational, which leaves every sign
    variation count unchanged while keeping the integers small.
    """
    if p.is_zero():
        raise ValueError("Sturm chain of the zero polynomial")
    chain = [p.integer_primitive()]
    d = p.derivative()
    if d.is_zero():
        return chain
    chain.append(d.integer_primitive())
    while True:
        r = _int_rem(chain[-2], chain[-1])
        if not r:
            return chain
        chain.append([-c for c in r])


def _sign_at(coeffs: list[int], x) -> int:
    """Sign of an integer polynomial at a rational or infinite point."""
    if _is_inf(x):
        lc = coeffs[-1]
        s = 1 if lc > 0 else -1
        if x < 0 and (len(coeffs) - 1) % 2 == 1:
            s = -s
        return s
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    # homogenized Horner: den**deg * p(num/den); den > 0 preserves the sign
    acc = coeffs[-1]
    dpow = 1
    for c in reversed(coeffs[:-1]):
        dpow *= den
        acc = acc * num + c * dpow
    return (acc > 0) - (acc < 0)


def _variations(chain: list[list[int]], x) -> int:
    signs = [s for s in (_sign_at(c, x) for c in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_half_open(chain, a, b) -> int:
    """Distinct roots in ``(a, b]``."""
    return _variations(chain, a) - _variations(chain, b)


def count_real_roots(p: Polynomial, interval: Interval = Interval(), *, multiplicity: bool = False) -> int:
    """Number of real roots of ``p`` in the closed interval.

    Distinct roots are counted unless ``multiplicity`` is set, in which case
    each root counts as often as its multiplicity (obtained by recursing on
    ``gcd(p, p')``, whose roots are exactly the multiple roots of ``p``).
    """
    if p.is_zero():
        raise ValueError("cannot count roots of the zero polynomial")
    if p.degree == 0:
        return 0
    # a multiple root at an endpoint zeroes the whole chain, so count on the squarefree part
    g = gcd(p, p.derivative())
    sf = p // g if g.degree > 0 else p
    chain = sturm_chain(sf)
    lo, hi = interval.lower, interval.upper
    n = _count_half_open(chain, lo, hi)
    if not _is_inf(lo) and sf(lo) == 0:
        n += 1
    if multiplicity:
        if g.degree > 0:
            n += count_real_roots(g, interval, multiplicity=True)
    return n


def cauchy_bound(p: Polynomial) -> Fraction:
    """Every complex root of ``p`` has modulus strictly below this bound."""
    lc = abs(p.leading)
    return 1 + max((abs(Fraction(c)) / lc for c in p.coeffs[:-1]), default=Fraction(0))


def isolate_real_roots(p: Polynomial, interval: Interval = Interval()) -> list[tuple[Fraction, Fraction]]:
    """Disjoint isolating intervals for the distinct real roots in ``interval``.

    Returns ascending pairs ``(a, b)``; ``a == b`` marks an exact rational
    root, otherwise the single root lies strictly inside ``(a, b)`` with
    ``p(a)`` and ``p(b)`` of opposite, nonzero signs.
    """
    if p.is_zero():
        raise ValueError("cannot isolate roots of the zero polynomial")
    if p.degree == 0:
        return []
    g = gcd(p, p.derivative())
    if g.degree > 0:
        p = p // g
    chain = sturm_chain(p)
    bound = cauchy_bound(p)
    lo = interval.lower if not _is_inf(interval.lower) else -bound
    hi = interval.upper if not _is_inf(interval.upper) else bound
    lo, hi = max(lo, -bound), min(hi, bound)
    out: list[tuple[Fraction, Fraction]] = []
    if lo > hi:
        return out
    if p(lo) == 0:
        out.append((lo, lo))
    stack = [(lo, hi, _count_half_open(chain, lo, hi))]
    found = []
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            found.append((a, b))
            continue
        m = (a + b) / 2
        stack.append((a, m, _count_half_open(chain, a, m)))
        stack.append((m, b, _count_half_open(chain, m, b)))
    for a, b in found:
        out.append(_tighten(p, a, b))
    out.sort()
    return out


def _tighten(p: Polynomial, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    # one simple root in (a, b]; shrink until both endpoints are nonzero with
    # a sign change, or the root is hit exactly
    if p(b) == 0:
        return (b, b)
    sb = p(b) > 0
    fa = p(a)
    if fa != 0 and (fa > 0) != sb:
        return (a, b)
    while True:
        m = (a + b) / 2
        fm = p(m)
        if fm == 0:
            return (m, m)
        if (fm > 0) != sb:
            return (m, b)
        b = m


# ---------------------------------------------------------------------------
# determinants, resultant, discriminant


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def leading_principal_minors(matrix: Sequence[Sequence[Number]]) -> list[Fraction]:
    """All leading principal minors of a rational matrix, exactly.

    Without pivoting, the Bareiss pivots are precisely the leading principal
    minors of the (integer-scaled) matrix; elimination stops at the first
    zero minor and the remaining entries are reported by direct evaluation.
    """
    n = len(matrix)
    fm = [[as_fraction(x) for x in row] for row in matrix]
    den = reduce(math.lcm, (x.denominator for row in fm for x in row), 1)
    m = [[int(x * den) for x in row] for row in fm]
    minors: list[Fraction] = []
    prev = 1
    for k in range(n):
        pivot = m[k][k]
        minors.append(Fraction(pivot, den ** (k + 1)))
        if pivot == 0:
            for j in range(k + 1, n):
                sub = [[int(x * den) for x in row[: j + 1]] for row in fm[: j + 1]]
                minors.append(Fraction(bareiss_determinant(sub), den ** (j + 1)))
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return minors


def sylvester_matrix(f: Sequence[Number], g: Sequence[Number]) -> list[list]:
    """Sylvester matrix from ascending coefficient lists (rows use descending order)."""
    n, m = len(f) - 1, len(g) - 1
    size = n + m
    fd, gd = list(reversed(f)), list(reversed(g))
    rows = []
    for i in range(m):
        rows.append([0] * i + fd + [0] * (size - n - 1 - i))
    for i in range(n):
        rows.append([0] * i + gd + [0] * (size - m - 1 - i))
    return rows


def resultant(f: Polynomial, g: Polynomial) -> Fraction:
    """Resultant ``lc(f)**deg(g) * prod g(roots of f)``; zero iff a common root exists."""
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of a zero polynomial")
    if f.degree == 0:
        return Fraction(f.leading) ** g.degree
    if g.degree == 0:
        return Fraction(g.leading) ** f.degree
    fi, gi = f.integer_primitive(), g.integer_primitive()
    # f = cf * fi, g = cg * gi
    cf = Fraction(f.leading) / fi[-1]
    cg = Fraction(g.leading) / gi[-1]
    det = bareiss_determinant(sylvester_matrix(fi, gi))
    return det * cf ** g.degree * cg ** f.degree


def discriminant(p: Polynomial) -> Fraction:
    """Discriminant; zero iff ``p`` has a repeated (complex) root."""
    if p.degree < 1:
        raise ValueError("discriminant needs degree >= 1")
    n = p.degree
    if n == 1:
        return Fraction(1)
    res = resultant(p, p.derivative())
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * res / Fraction(p.leading)


class SingularSystemError(ArithmeticError):
    """The linear system has no unique solution."""


def bareiss_solve(matrix: Sequence[Sequence[Number]], rhs: Sequence[Number]) -> list[Fraction]:
    """Solve a square rational system exactly with fraction-free elimination.

    Rows are scaled to integers first (which leaves the solution unchanged);
    back substitution is then carried out in Fractions.
    """
    n = len(matrix)
    rows = []
    for row, b in zip(matrix, rhs):
        fr = [as_fraction(x) for x in row] + [as_fraction(b)]
        den = reduce(math.lcm, (x.denominator for x in fr), 1)
        rows.append([int(x * den) for x in fr])
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if rows[r][k] != 0), None)
        if piv is None:
            raise SingularSystemError("matrix is singular")
        rows[k], rows[piv] = rows[piv], rows[k]
        pivot = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                rows[i][j] = (rows[i][j] * pivot - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = pivot
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(rows[i][n])
        for j in range(i + 1, n):
            acc -= rows[i][j] * x[j]
        x[i] = acc / rows[i][i]
    return x
