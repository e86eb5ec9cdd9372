"""Input checking shared by the estimator and the command line."""

from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Sequence

import mpmath

from .extension import ExtensionSchedule
from .moments import DEFAULT_MAX_INDEX, DistributionSpec, MomentError, MomentSequence, moments_from_strings
from .ratpoly import Interval, Polynomial, as_fraction, format_rational


def check_interval(domain) -> Interval | None:
    if domain is None or isinstance(domain, Interval):
        return domain
    if isinstance(domain, str):
        parts = domain.replace(",", " ").split()
    else:
        parts = list(domain)
    if len(parts) != 2:
        raise ValueError(f"an interval needs two bounds, got {domain!r}")
    return Interval.parse(str(parts[0]), str(parts[1]))


def check_precision(precision) -> int:
    if isinstance(precision, bool) or not isinstance(precision, numbers.Integral) or precision < 11:
        raise ValueError(f"precision must be an integer number of digits >= 11, got {precision!r}")
    return int(precision)


def check_schedule(schedule, iterations: int | None = None) -> ExtensionSchedule:
    """``None`` selects the ``p = n + 1`` rule for ``iterations`` steps."""
    if isinstance(schedule, ExtensionSchedule):
        return schedule
    if schedule is None:
        return ExtensionSchedule.patterson(iterations if iterations is not None else 4)
    if isinstance(schedule, str):
        schedule = [s for s in schedule.split(",") if s.strip()]
    try:
        ps = [int(p) for p in schedule]
    except (TypeError, ValueError):
        raise ValueError(f"schedule must be a list of integers, got {schedule!r}") from None
    return ExtensionSchedule(ps)


def check_polynomial(poly) -> Polynomial:
    """Accept a Polynomial or an ascending list of exact coefficients."""
    if isinstance(poly, Polynomial):
        p = poly
    else:
        p = Polynomial(as_fraction(c) for c in poly)
    if p.is_zero():
        raise ValueError("node polynomial must be nonzero")
    return p


def check_moments(X, domain: Interval | None = None, max_index: int = DEFAULT_MAX_INDEX) -> MomentSequence:
    """Normalize the many accepted moment inputs to a MomentSequence.

    ``X`` may be a MomentSequence, a DistributionSpec or its string form
    (``"beta:1/2,1/2"``), or a sequence of moments starting with ``mu_0``
    (which then needs ``domain``).
    """
    if isinstance(X, MomentSequence):
        seq = X
    elif isinstance(X, (DistributionSpec, str)):
        seq = MomentSequence.from_distribution(X, max_index)
    elif isinstance(X, Sequence) or hasattr(X, "__iter__"):
        values = list(X)
        if domain is None:
            raise ValueError("a raw moment list needs an explicit domain")
        strs = []
        digits = None
        for v in values:
            if isinstance(v, str):
                strs.append(v)
            elif isinstance(v, (numbers.Integral, Fraction)):
                strs.append(format_rational(Fraction(v)))
            elif isinstance(v, float):
                strs.append(repr(v))
                digits = max(digits or 0, 17)
            elif isinstance(v, mpmath.mpf):
                strs.append(mpmath.nstr(v, mpmath.mp.dps + 5, strip_zeros=False))
            else:
                raise TypeError(f"unsupported moment value {v!r}")
        seq = moments_from_strings(strs, domain, digits)
    else:
        raise TypeError(f"cannot interpret {type(X).__name__} as moments")
    if domain is not None and domain != seq.domain:
        seq = MomentSequence(domain, seq.values, seq.precision, seq.source)
    return seq


__all__ = [
    "MomentError",
    "check_interval",
    "check_moments",
    "check_polynomial",
    "check_precision",
    "check_schedule",
]
