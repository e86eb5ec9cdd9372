"""Patterson-style extension of quadrature formulas from moments.

Given the node polynomial ``F`` of an n-node formula and a target number of
new nodes ``p``, look for a monic ``G`` of degree ``p`` with

    integral F(t) G(t) t**i rho(t) dt = 0,    i = 0 .. p-1.

Writing ``nu_m`` for the modified moments ``integral F(t) t**m rho(t) dt``
this is the p x p Hankel system ``sum_j g_j nu_{i+j} = -nu_{i+p}``. When the
roots of ``G`` are real, simple, inside the domain and disjoint from those of
``F``, the formula on the roots of ``F*G`` integrates every polynomial of
degree up to ``n + 2p - 1`` exactly.

Exact moment sequences are handled entirely in rational arithmetic, and the
outcome is then a certificate rather than a numerical guess. Approximate
moment sequences go through the same steps in mpmath at the sequence's
precision.
"""

from __future__ import annotations

import contextlib
import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import mpmath

from .moments import MomentSequence
from .ratpoly import (
    Interval,
    Polynomial,
    SingularSystemError,
    bareiss_solve,
    count_real_roots,
    discriminant,
    resultant,
)

logger = logging.getLogger(__name__)


class FailureReason(str, enum.Enum):
    NO_SOLUTION = "NoSolution"
    COMPLEX_OR_OUTSIDE = "ComplexOrOutsideRoots"
    REPEATED_ROOTS = "RepeatedRoots"
    SHARED_ROOTS = "SharedRoots"
    INSUFFICIENT_MOMENTS = "InsufficientMoments"

    def __str__(self):
        return self.value


class InsufficientMomentsError(ValueError):
    """The moment sequence is too short for the requested extension."""


@dataclass(frozen=True)
class Certificate:
    """What was checked about a candidate ``G``.

    In exact mode ``resultant`` and ``discriminant`` are the exact rationals.
    In approximate mode they are replaced by the smallest distance between a
    root of ``G`` and a root of ``F`` and between two roots of ``G``.
    """

    root_count: int
    resultant: object = None
    discriminant: object = None
    exact: bool = True


@dataclass(frozen=True)
class ExtensionOutcome:
    p: int
    polynomial: Polynomial | None = None
    reason: FailureReason | None = None
    certificate: Certificate | None = None

    @property
    def success(self) -> bool:
        return self.reason is None

    def __bool__(self):
        return self.success

    def __str__(self):
        if self.success:
            return f"p={self.p}: G = {self.polynomial}"
        return f"p={self.p}: {self.reason}"


class ChainStep(NamedTuple):
    polynomial: Polynomial
    outcome: ExtensionOutcome


class ExtensionSchedule:
    """Which ``p`` to use at each step of a chain.

    Either an explicit list, or the Patterson rule ``p = n + 1`` repeated for
    a number of iterations.
    """

    def __init__(self, ps: Iterable[int] | None = None, *, iterations: int | None = None):
        if ps is None and iterations is None:
            raise ValueError("give an explicit list of p values or a number of iterations")
        if ps is not None:
            ps = tuple(int(p) for p in ps)
            if not ps:
                raise ValueError("schedule is empty")
            if any(p < 1 for p in ps):
                raise ValueError(f"every p must be >= 1, got {list(ps)}")
        elif iterations < 1:
            raise ValueError("iterations must be >= 1")
        self.explicit = ps
        self.iterations = iterations if ps is None else len(ps)

    @classmethod
    def patterson(cls, iterations: int) -> "ExtensionSchedule":
        return cls(iterations=iterations)

    def p_for(self, step: int, n: int) -> int:
        if self.explicit is not None:
            return self.explicit[step]
        return n + 1

    def __len__(self):
        return self.iterations

    def moments_needed(self, start_degree: int) -> int:
        """Highest moment index the whole chain uses if every step succeeds."""
        n, need = start_degree, 0
        for i in range(len(self)):
            p = self.p_for(i, n)
            need = max(need, required_moments(n, p))
            n += p
        return need

    def __repr__(self):
        if self.explicit is not None:
            return f"ExtensionSchedule({list(self.explicit)})"
        return f"ExtensionSchedule(iterations={self.iterations})"


def working_precision(moments: MomentSequence):
    """Context in which approximate-mode arithmetic keeps the sequence's digits."""
    if moments.is_exact:
        return contextlib.nullcontext()
    return mpmath.workdps(moments.precision)


def required_moments(n: int, p: int) -> int:
    """Highest moment index used when extending an n-node formula by p nodes."""
    return n + 2 * p


def modified_moments(F: Polynomial, moments: MomentSequence, count: int) -> list:
    """``nu_m = sum_k f_k mu_{k+m}`` for ``m = 0 .. count-1``."""
    need = max(F.degree, 0) + count - 1
    if moments.max_index < need:
        raise InsufficientMomentsError(
            f"need moments up to index {need}, sequence stops at {moments.max_index}")
    mu = moments.values
    if moments.is_exact:
        coeffs = F.coeffs
        return [sum((c * mu[k + m] for k, c in enumerate(coeffs)), Fraction(0)) for m in range(count)]
    with mpmath.workdps(moments.precision):
        coeffs = [_mpf(c) for c in F.coeffs]
        return [mpmath.fsum(c * mu[k + m] for k, c in enumerate(coeffs)) for m in range(count)]


def hankel_system(F: Polynomial, p: int, moments: MomentSequence) -> tuple[list[list], list]:
    """Matrix ``[nu_{i+j}]`` and right-hand side ``-nu_{i+p}`` of the monic system."""
    nu = modified_moments(F, moments, 2 * p)
    matrix = [[nu[i + j] for j in range(p)] for i in range(p)]
    with working_precision(moments):
        rhs = [-nu[i + p] for i in range(p)]
    return matrix, rhs


def extend(F: Polynomial, p: int, moments: MomentSequence, domain: Interval | None = None) -> ExtensionOutcome:
    """Try to add ``p`` nodes to the formula whose nodes are the roots of ``F``.

    Returns a successful outcome carrying the monic ``G``, or the first failed
    check in the order NoSolution, ComplexOrOutsideRoots, SharedRoots,
    RepeatedRoots. Raises InsufficientMomentsError when fewer than
    ``deg F + 2p + 1`` moments are available.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if F.is_zero():
        raise ValueError("F must be a nonzero polynomial")
    domain = domain or moments.domain
    need = required_moments(F.degree, p)
    if moments.max_index < need:
        raise InsufficientMomentsError(
            f"extending degree {F.degree} by p={p} needs moments up to index {need}, "
            f"sequence stops at {moments.max_index}")
    matrix, rhs = hankel_system(F, p, moments)
    if moments.is_exact:
        try:
            g = bareiss_solve(matrix, rhs)
        except SingularSystemError:
            return ExtensionOutcome(p, reason=FailureReason.NO_SOLUTION)
        G = Polynomial(g + [Fraction(1)])
        return certify(F, G, domain, p=p)
    try:
        g = _solve_approx(matrix, rhs, moments.precision)
    except SingularSystemError:
        return ExtensionOutcome(p, reason=FailureReason.NO_SOLUTION)
    with mpmath.workdps(moments.precision):
        G = Polynomial(g + [mpmath.mpf(1)])
    return certify_approx(F, G, domain, moments.precision, p=p)


def certify(F: Polynomial, G: Polynomial, domain: Interval, p: int | None = None) -> ExtensionOutcome:
    """Check the three existence conditions on ``G`` exactly.

    Root count (with multiplicity) in the closed domain must equal ``deg G``,
    ``resultant(F, G)`` must be nonzero and ``discriminant(G)`` must be
    nonzero. The first violated condition names the failure.
    """
    p = G.degree if p is None else p
    if G.degree != p or G.degree < 1:
        return ExtensionOutcome(p, reason=FailureReason.NO_SOLUTION)
    count = count_real_roots(G, domain, multiplicity=True)
    if count != p:
        cert = Certificate(count)
        return ExtensionOutcome(p, G, FailureReason.COMPLEX_OR_OUTSIDE, cert)
    res = resultant(F, G)
    if res == 0:
        return ExtensionOutcome(p, G, FailureReason.SHARED_ROOTS, Certificate(count, res))
    disc = discriminant(G)
    cert = Certificate(count, res, disc)
    if disc == 0:
        return ExtensionOutcome(p, G, FailureReason.REPEATED_ROOTS, cert)
    return ExtensionOutcome(p, G, None, cert)


def _mpf(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpf(c)


def _solve_approx(matrix: Sequence[Sequence], rhs: Sequence, dps: int) -> list:
    """Gaussian elimination with partial pivoting; tiny pivots count as singular."""
    with mpmath.workdps(dps):
        n = len(matrix)
        a = [[_mpf(x) for x in row] + [_mpf(b)] for row, b in zip(matrix, rhs)]
        scale = max((abs(x) for row in a for x in row[:n]), default=mpmath.mpf(0))
        if scale == 0:
            raise SingularSystemError("zero matrix")
        tol = scale * mpmath.mpf(10) ** (-(dps * 3) // 4)
        for k in range(n):
            piv = max(range(k, n), key=lambda r: abs(a[r][k]))
            if abs(a[piv][k]) <= tol:
                raise SingularSystemError("matrix is numerically singular")
            a[k], a[piv] = a[piv], a[k]
            for i in range(k + 1, n):
                f = a[i][k] / a[k][k]
                if f:
                    for j in range(k, n + 1):
                        a[i][j] -= f * a[k][j]
        x = [mpmath.mpf(0)] * n
        for i in range(n - 1, -1, -1):
            acc = a[i][n] - mpmath.fsum(a[i][j] * x[j] for j in range(i + 1, n))
            x[i] = acc / a[i][i]
        return x


def _approx_roots(P: Polynomial, dps: int) -> list:
    if P.degree < 1:
        return []
    with mpmath.workdps(dps):
        desc = [_mpf(c) for c in reversed(P.coeffs)]
        if P.degree == 1:
            return [-desc[1] / desc[0]]
        for extra in (dps, 2 * dps, 4 * dps):
            try:
                return list(mpmath.polyroots(desc, maxsteps=200 + 20 * P.degree, extraprec=extra))
            except mpmath.libmp.libhyper.NoConvergence:
                continue
        raise ArithmeticError(f"root finder did not converge for degree {P.degree}")


def certify_approx(F: Polynomial, G: Polynomial, domain: Interval, dps: int,
                   p: int | None = None) -> ExtensionOutcome:
    """Floating-point counterpart of :func:`certify` at ``dps`` digits.

    Roots closer than ``10**(-dps/3)`` (relative) are treated as coincident;
    imaginary parts below that threshold are treated as zero.
    """
    p = G.degree if p is None else p
    if G.degree != p or G.degree < 1:
        return ExtensionOutcome(p, reason=FailureReason.NO_SOLUTION)
    with mpmath.workdps(dps):
        tol = mpmath.mpf(10) ** (-(dps // 3))
        groots = _approx_roots(G, dps)
        real = []
        for r in groots:
            r = mpmath.mpc(r)
            if abs(r.imag) <= tol * (1 + abs(r.real)):
                x = r.real
                lo_ok = domain.lower == -mpmath.inf or x >= _mpf(domain.lower) - tol * (1 + abs(x))
                hi_ok = domain.upper == mpmath.inf or x <= _mpf(domain.upper) + tol * (1 + abs(x))
                if lo_ok and hi_ok:
                    real.append(x)
        if len(real) != p:
            return ExtensionOutcome(p, G, FailureReason.COMPLEX_OR_OUTSIDE, Certificate(len(real), exact=False))
        froots = [mpmath.mpc(r) for r in _approx_roots(F, dps)]
        sep_fg = min((abs(x - y) / (1 + abs(x)) for x in real for y in froots), default=mpmath.inf)
        if sep_fg <= tol:
            return ExtensionOutcome(p, G, FailureReason.SHARED_ROOTS, Certificate(p, sep_fg, exact=False))
        real.sort()
        sep_gg = min((abs(b - a) / (1 + abs(a)) for a, b in zip(real, real[1:])), default=mpmath.inf)
        cert = Certificate(p, sep_fg, sep_gg, exact=False)
        if sep_gg <= tol:
            return ExtensionOutcome(p, G, FailureReason.REPEATED_ROOTS, cert)
        return ExtensionOutcome(p, G, None, cert)


def auto_extend(F: Polynomial, moments: MomentSequence, domain: Interval | None,
                p_candidates: Sequence[int]) -> tuple[int, ExtensionOutcome]:
    """Return the first candidate ``p`` whose extension succeeds.

    Candidates that would need more moments than available are skipped with
    an InsufficientMoments outcome. If nothing succeeds the last failure is
    returned.
    """
    if not p_candidates:
        raise ValueError("p_candidates must not be empty")
    last = None
    for p in p_candidates:
        try:
            out = extend(F, p, moments, domain)
        except InsufficientMomentsError:
            out = ExtensionOutcome(p, reason=FailureReason.INSUFFICIENT_MOMENTS)
        if out.success:
            return p, out
        logger.debug("extension with p=%d failed: %s", p, out.reason)
        last = out
    return last.p, last


def generate_chain(start: Polynomial, schedule: ExtensionSchedule | Sequence[int], moments: MomentSequence,
                   domain: Interval | None = None) -> list[ChainStep]:
    """Repeatedly extend ``start``, multiplying in each new ``G``.

    Stops at the first failure; the returned list then ends with a step
    whose polynomial is the last successful one and whose outcome holds the
    failure.
    """
    if not isinstance(schedule, ExtensionSchedule):
        schedule = ExtensionSchedule(schedule)
    F = start
    steps: list[ChainStep] = []
    for i in range(len(schedule)):
        p = schedule.p_for(i, F.degree)
        out = extend(F, p, moments, domain)
        if not out.success:
            steps.append(ChainStep(F, out))
            break
        with working_precision(moments):
            F = F * out.polynomial
        steps.append(ChainStep(F, out))
    return steps


def orthogonality_residuals(F: Polynomial, G: Polynomial, moments: MomentSequence) -> list:
    """``integral F G t**i rho`` for ``i = 0 .. deg G - 1``, computed from raw moments."""
    with working_precision(moments):
        FG = F * G
        out = []
        for i in range(G.degree):
            coeffs = FG.shift(i).coeffs
            out.append(sum((c * moments[k] for k, c in enumerate(coeffs)), Fraction(0)))
    return out
