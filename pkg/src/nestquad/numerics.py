"""Nodes, weights and measured exactness of quadrature formulas.

Nodes are the roots of a certified node polynomial. They are isolated with
exact Sturm counts and refined with bracketed Newton steps in mpmath. Roots
that are rational are detected and kept as Fractions, so formulas whose
nodes are all rational carry exact weights.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import mpmath

from .moments import MomentSequence
from .ratpoly import INF, Interval, Polynomial, isolate_real_roots

Real = Union[Fraction, mpmath.mpf]

DEFAULT_PRECISION = 50
# rational roots with denominators up to this bound are recognised exactly
_RATIONAL_DENOMINATOR_LIMIT = 10**12


class CertificateViolation(ArithmeticError):
    """A node polynomial did not have the root structure it was certified for."""


def to_mpf(x) -> mpmath.mpf:
    """Convert at the current working precision."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


@dataclass(frozen=True)
class QuadratureFormula:
    """Nodes (ascending) and weights, plus the exact polynomial they came from.

    Entries are Fractions when known exactly and mpmath numbers otherwise.
    ``precision`` is the number of decimal digits the numbers are good to.
    """

    nodes: tuple
    weights: tuple
    node_polynomial: Polynomial
    precision: int = DEFAULT_PRECISION
    verified_degree: int | None = None

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.nodes + self.weights)

    def __len__(self):
        return len(self.nodes)

    def integrate_monomial(self, j: int, dps: int | None = None):
        """``sum_k w_k t_k**j``, with ``0**0 = 1``."""
        if self.is_exact:
            return sum((w * x**j for x, w in zip(self.nodes, self.weights)), Fraction(0))
        with mpmath.workdps(dps or 2 * self.precision + 10):
            return mpmath.fsum(to_mpf(w) * to_mpf(x) ** j for x, w in zip(self.nodes, self.weights))


@dataclass(frozen=True)
class NestedRule:
    """A sequence of formulas whose node sets are nested.

    ``first_level[k]`` is the (1-based) index of the formula in which the
    k-th node of the last formula first appears.
    """

    formulas: tuple
    first_level: tuple = field(default=())

    def __len__(self):
        return len(self.formulas)

    def __getitem__(self, i):
        return self.formulas[i]

    @property
    def top(self) -> QuadratureFormula:
        return self.formulas[-1]

    def levels_of(self, level: int) -> tuple:
        """First-level tags for the nodes of formula ``level`` (1-based)."""
        top_nodes = self.top.nodes
        tags = []
        for x in self.formulas[level - 1].nodes:
            k = _index_of(top_nodes, x)
            tags.append(self.first_level[k])
        return tuple(tags)


def _index_of(nodes: Sequence, x) -> int:
    k = bisect.bisect_left([to_mpf(n) for n in nodes], to_mpf(x))
    cands = [i for i in (k - 1, k, k + 1) if 0 <= i < len(nodes)]
    return min(cands, key=lambda i: abs(to_mpf(nodes[i]) - to_mpf(x)))


# ---------------------------------------------------------------------------
# roots


def _eval(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _refine(P: Polynomial, a: Fraction, b: Fraction, dps: int) -> mpmath.mpf:
    """Bracketed Newton iteration on ``[a, b]`` where ``P`` changes sign."""
    guard = 20 + P.degree
    with mpmath.workdps(dps + guard):
        cs = [to_mpf(c) for c in P.coeffs]
        ds = [i * c for i, c in enumerate(cs)][1:]
        lo, hi = to_mpf(a), to_mpf(b)
        flo = _eval(cs, lo)
        neg_lo = flo < 0
        x = (lo + hi) / 2
        eps = mpmath.mpf(10) ** (-(dps + 3))
        for _ in range(20 * (dps + guard)):
            fx = _eval(cs, x)
            if fx == 0:
                return +x
            if (fx < 0) == neg_lo:
                lo = x
            else:
                hi = x
            if hi - lo <= eps * max(abs(lo), abs(hi)):
                break
            dfx = _eval(ds, x)
            step_ok = False
            if dfx != 0:
                xn = x - fx / dfx
                if lo < xn < hi:
                    if abs(xn - x) <= eps * abs(xn) / 10:
                        x = xn
                        break
                    x = xn
                    step_ok = True
            if not step_ok:
                x = (lo + hi) / 2
        return +x


def _as_rational(P: Polynomial, x: mpmath.mpf) -> Fraction | None:
    cand = exact_value(x).limit_denominator(_RATIONAL_DENOMINATOR_LIMIT)
    return cand if P(cand) == 0 else None


def real_roots(P: Polynomial, domain: Interval = Interval(), precision: int = DEFAULT_PRECISION) -> list:
    """All roots of a certified node polynomial, ascending.

    ``P`` must have ``deg P`` simple real roots in the closed ``domain``.
    Rational roots come back as Fractions; the rest as mpmath numbers
    accurate to ``precision`` significant digits.
    """
    if P.degree < 1:
        return []
    if not P.is_exact:
        return _approx_real_roots(P, domain, precision)
    boxes = isolate_real_roots(P, domain)
    if len(boxes) != P.degree:
        raise CertificateViolation(
            f"expected {P.degree} simple roots in {domain}, isolated {len(boxes)}")
    out = []
    for a, b in boxes:
        if a == b:
            out.append(a)
            continue
        x = _refine(P, a, b, precision)
        exact = _as_rational(P, x)
        if exact is not None:
            out.append(exact)
        else:
            with mpmath.workdps(precision):
                out.append(+x)
    return out


def _approx_real_roots(P: Polynomial, domain: Interval, precision: int) -> list:
    with mpmath.workdps(precision + 20):
        desc = [to_mpf(c) for c in reversed(P.coeffs)]
        roots = mpmath.polyroots(desc, maxsteps=400 + 40 * P.degree, extraprec=2 * precision)
        tol = mpmath.mpf(10) ** (-(precision // 3))
        out = []
        for r in roots:
            r = mpmath.mpc(r)
            if abs(r.imag) > tol * (1 + abs(r.real)):
                raise CertificateViolation(f"complex root {r}")
            out.append(r.real)
    out.sort()
    with mpmath.workdps(precision):
        return [+x for x in out]


# ---------------------------------------------------------------------------
# weights


def bjorck_pereyra(nodes: Sequence, rhs: Sequence) -> list:
    """Solve ``sum_i w_i x_i**k = b_k`` (k = 0..K-1) for ``w``.

    Progressive elimination specialised to the transposed Vandermonde
    structure, O(K**2) operations. Works in whatever arithmetic the inputs
    use (Fractions stay exact). Duplicate nodes raise ZeroDivisionError.
    """
    x = list(nodes)
    b = list(rhs)
    n = len(x) - 1
    for k in range(n):
        for i in range(n, k, -1):
            b[i] = b[i] - x[k] * b[i - 1]
    for k in range(n - 1, -1, -1):
        for i in range(k + 1, n + 1):
            b[i] = b[i] / (x[i] - x[i - k - 1])
        for i in range(k, n):
            b[i] = b[i] - b[i + 1]
    return b


def solve_weights(nodes: Sequence, moments: MomentSequence, precision: int = DEFAULT_PRECISION) -> list:
    """Unique weights making the formula exact for degree ``K-1``.

    Solved exactly when every node is rational and the moments are exact,
    otherwise at twice ``precision`` digits and returned at that working
    precision.
    """
    K = len(nodes)
    if K == 0:
        return []
    if moments.max_index < K - 1:
        raise ValueError(f"{K} nodes need moments up to index {K - 1}")
    if len(set(exact_value(x) for x in nodes)) != K:
        raise ValueError("nodes must be distinct")
    mu = moments.values[:K]
    if moments.is_exact and all(isinstance(x, Fraction) for x in nodes):
        return bjorck_pereyra(list(nodes), list(mu))
    with mpmath.workdps(2 * precision + 10):
        return bjorck_pereyra([to_mpf(x) for x in nodes], [to_mpf(m) for m in mu])


def exact_value(x) -> Fraction:
    """The binary rational an mpf holds (Fractions pass through)."""
    if isinstance(x, Fraction):
        return x
    if not isinstance(x, mpmath.mpf):
        raise TypeError(f"expected Fraction or mpf, got {type(x).__name__}")
    sign, man, exp, _ = x._mpf_
    if not man and exp:
        raise ValueError(f"non-finite value {x}")
    value = Fraction(man) * Fraction(2) ** exp
    return -value if sign else value


# ---------------------------------------------------------------------------
# exactness


def degree_of_exactness(formula: QuadratureFormula, moments: MomentSequence, max_check: int | None = None) -> int:
    """Largest ``d <= max_check`` with all monomials up to ``t**d`` reproduced.

    Exact formulas against exact moments are compared exactly. Otherwise the
    tolerance is ``10**-(precision-10) * max(1, |mu_j|)``, with ``precision``
    the smaller of the formula's and the moments' digits. Returns -1 when
    even ``mu_0`` is missed (e.g. the empty formula).
    """
    if max_check is None:
        max_check = moments.max_index
    if moments.max_index < max_check:
        raise ValueError(f"max_check {max_check} exceeds available moments ({moments.max_index})")
    if formula.is_exact and moments.is_exact:
        for j in range(max_check + 1):
            if formula.integrate_monomial(j) != moments[j]:
                return j - 1
        return max_check
    digits = formula.precision if moments.is_exact else min(formula.precision, moments.precision)
    dps = 2 * formula.precision + 10
    with mpmath.workdps(dps):
        tol = mpmath.mpf(10) ** (-(digits - 10))
        xs = [to_mpf(x) for x in formula.nodes]
        ws = [to_mpf(w) for w in formula.weights]
        powers = [mpmath.mpf(1)] * len(xs)
        for j in range(max_check + 1):
            q = mpmath.fsum(w * pw for w, pw in zip(ws, powers))
            mu = to_mpf(moments[j])
            if abs(q - mu) > tol * max(1, abs(mu)):
                return j - 1
            powers = [pw * x for pw, x in zip(powers, xs)]
    return max_check


def moment_residuals(formula: QuadratureFormula, moments: MomentSequence, upto: int) -> list:
    """Relative errors ``|q(t**j) - mu_j| / max(1, |mu_j|)`` for ``j = 0..upto``."""
    dps = 2 * formula.precision + 10
    with mpmath.workdps(dps):
        out = []
        for j in range(upto + 1):
            q = to_mpf(formula.integrate_monomial(j, dps))
            mu = to_mpf(moments[j])
            out.append(abs(q - mu) / max(1, abs(mu)))
    return out


# ---------------------------------------------------------------------------
# assembly


def build_formula(F: Polynomial, moments: MomentSequence, domain: Interval | None = None,
                  precision: int = DEFAULT_PRECISION) -> QuadratureFormula:
    """Formula supported on the roots of a certified ``F``."""
    domain = domain or moments.domain
    nodes = real_roots(F, domain, 2 * precision + 10)
    return _assemble(F, nodes, moments, precision)


def _assemble(F, nodes, moments, precision) -> QuadratureFormula:
    weights = solve_weights(nodes, moments, precision)
    formula = QuadratureFormula(tuple(nodes), tuple(weights), F, precision)
    deg = degree_of_exactness(formula, moments, moments.max_index)
    return QuadratureFormula(formula.nodes, formula.weights, F, precision, deg)


def new_factor(F: Polynomial, prev: Polynomial, digits: int | None = None) -> Polynomial | None:
    """``F / prev`` when ``prev`` divides ``F``, else None.

    Exact polynomials must divide exactly. Approximate ones are divided at
    ``digits`` and the remainder may be up to ``10**-(digits-10)`` relative to
    the largest coefficient of ``F``.
    """
    if F.is_exact and prev.is_exact:
        factor, rem = divmod(F, prev)
        return factor if rem.is_zero() else None
    digits = digits or DEFAULT_PRECISION
    with mpmath.workdps(digits + 10):
        factor, rem = divmod(F, prev)
        scale = max(abs(to_mpf(c)) for c in F.coeffs)
        tol = mpmath.mpf(10) ** (-(digits - 10)) * max(1, scale)
        if any(abs(to_mpf(c)) > tol for c in rem.coeffs):
            return None
    return factor


def build_nested_rule(polynomials: Sequence[Polynomial], moments: MomentSequence,
                      domain: Interval | None = None, precision: int = DEFAULT_PRECISION) -> NestedRule:
    """Formulas for a chain of node polynomials, each dividing the next.

    Roots are computed once per new factor, so every node keeps the index of
    the level where it was introduced.
    """
    domain = domain or moments.domain
    tagged: list[tuple] = []
    formulas = []
    prev = Polynomial([1])
    for level, F in enumerate(polynomials, start=1):
        factor = new_factor(F, prev, moments.precision)
        if factor is None:
            raise CertificateViolation(f"level {level - 1} polynomial does not divide level {level}")
        for r in real_roots(factor, domain, 2 * precision + 10):
            tagged.append((r, level))
        tagged.sort(key=lambda item: exact_value(item[0]))
        formulas.append(_assemble(F, [r for r, _ in tagged], moments, precision))
        prev = F
    return NestedRule(tuple(formulas), tuple(lvl for _, lvl in tagged))
