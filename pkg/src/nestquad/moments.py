"""Moment sequences: the only representation of the weight function.

Built-in families have exact rational moments. User data comes from a JSON
moments file whose entries are either ``"p/q"`` strings (exact) or decimal
strings (approximate, at a declared number of digits).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import mpmath

from .ratpoly import INF, Interval, as_fraction, format_rational, leading_principal_minors, parse_rational

DEFAULT_MAX_INDEX = 100

FAMILIES = ("uniform", "beta", "gaussian")


class MomentError(ValueError):
    """Invalid distribution parameters or malformed moment data."""


@dataclass(frozen=True)
class DistributionSpec:
    """A built-in family with rational parameters.

    ``uniform(a, b)`` on [a, b], ``beta(alpha, beta)`` on [0, 1] and the
    standard ``gaussian`` on the real line.
    """

    family: str
    params: tuple[Fraction, ...] = ()

    def __post_init__(self):
        fam = self.family.lower()
        if fam in ("gauss", "normal"):
            fam = "gaussian"
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", tuple(as_fraction(p) for p in self.params))
        if fam == "uniform":
            if len(self.params) != 2 or not self.params[0] < self.params[1]:
                raise MomentError("uniform needs two parameters a < b")
        elif fam == "beta":
            if len(self.params) != 2 or min(self.params) <= 0:
                raise MomentError("beta needs two positive parameters")
        elif fam == "gaussian":
            if self.params:
                raise MomentError("gaussian takes no parameters (standard normal)")
        else:
            raise MomentError(f"unknown family {self.family!r}; expected one of {FAMILIES}")

    @classmethod
    def parse(cls, text: str) -> "DistributionSpec":
        """Parse ``family[:p1,p2]``, e.g. ``beta:1/2,1/2`` or ``gauss``."""
        name, _, rest = text.strip().partition(":")
        try:
            params = tuple(parse_rational(p) for p in rest.split(",")) if rest else ()
        except (ValueError, ZeroDivisionError) as exc:
            raise MomentError(f"bad parameters in {text!r}: {exc}") from None
        return cls(name, params)

    @property
    def domain(self) -> Interval:
        if self.family == "uniform":
            return Interval(*self.params)
        if self.family == "beta":
            return Interval(0, 1)
        return Interval(-INF, INF)

    def __str__(self):
        if not self.params:
            return self.family
        return f"{self.family}:" + ",".join(format_rational(p) for p in self.params)


def moment(spec: DistributionSpec, k: int) -> Fraction:
    """Exact k-th raw moment of a built-in family."""
    if k < 0:
        raise MomentError("moment index must be non-negative")
    if spec.family == "uniform":
        a, b = spec.params
        return (b ** (k + 1) - a ** (k + 1)) / ((k + 1) * (b - a))
    if spec.family == "beta":
        al, be = spec.params
        out = Fraction(1)
        for i in range(k):
            out *= (al + i) / (al + be + i)
        return out
    # standard normal
    if k % 2:
        return Fraction(0)
    return Fraction(math.prod(range(k - 1, 0, -2)))


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``mu_0 .. mu_max_index`` of a distribution on ``domain``.

    Exact sequences hold Fractions; approximate ones hold mpmath numbers
    carrying ``precision`` decimal digits.
    """

    domain: Interval
    values: tuple
    precision: int | None = None
    source: str = field(default="custom", compare=False)

    def __post_init__(self):
        if not self.values:
            raise MomentError("a moment sequence needs at least one entry")
        if self.values[0] != 1:
            raise MomentError(f"mu_0 must be 1 for a probability density, got {self.values[0]}")
        if not self.is_exact and self.precision is None:
            raise MomentError("approximate moments need a precision")

    @classmethod
    def from_distribution(cls, spec: DistributionSpec | str, max_index: int = DEFAULT_MAX_INDEX) -> "MomentSequence":
        if isinstance(spec, str):
            spec = DistributionSpec.parse(spec)
        if max_index < 0:
            raise MomentError("max_index must be non-negative")
        values = tuple(moment(spec, k) for k in range(max_index + 1))
        return cls(spec.domain, values, source=str(spec))

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values)

    @property
    def kind(self) -> str:
        return "exact" if self.is_exact else "approximate"

    @property
    def max_index(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    def to_approximate(self, digits: int) -> "MomentSequence":
        """Round every moment to ``digits`` decimal digits."""
        with mpmath.workdps(digits):
            vals = tuple(_to_mpf(v) for v in self.values)
        # mu_0 stays exactly one after rounding
        return MomentSequence(self.domain, vals, precision=digits, source=self.source)

    def truncate(self, max_index: int) -> "MomentSequence":
        return MomentSequence(self.domain, self.values[: max_index + 1], self.precision, self.source)

    def hankel_minors(self) -> list:
        """Leading principal minors of ``[mu_{i+j}]`` for ``2m <= max_index``."""
        m = self.max_index // 2
        mat = [[self.values[i + j] for j in range(m + 1)] for i in range(m + 1)]
        if self.is_exact:
            return leading_principal_minors(mat)
        with mpmath.workdps(self.precision):
            return [mpmath.det(mpmath.matrix([row[: k + 1] for row in mat[: k + 1]])) for k in range(m + 1)]

    def is_positive_definite(self) -> bool:
        """Necessary condition for moments of a density with infinite support points."""
        if self.is_exact:
            return all(d > 0 for d in self.hankel_minors())
        m = self.max_index // 2
        with mpmath.workdps(self.precision):
            mat = mpmath.matrix([[self.values[i + j] for j in range(m + 1)] for i in range(m + 1)])
            try:
                mpmath.cholesky(mat)
            except ValueError:
                return False
        return True

    def to_dict(self) -> dict:
        doc = {"domain": self.domain.to_strings()}
        if not self.is_exact:
            doc["precision"] = self.precision
            doc["moments"] = [format_rational(v) if isinstance(v, (int, Fraction))
                              else mpmath.nstr(v, self.precision, strip_zeros=False) for v in self.values]
        else:
            doc["moments"] = [format_rational(v) for v in self.values]
        return doc


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _significant_digits(text: str) -> int:
    mant = text.lower().split("e")[0].lstrip("+-").replace(".", "").lstrip("0")
    return len(mant)


def moments_from_strings(entries: Sequence[str], domain: Interval, precision: int | None = None,
                         check_hankel: bool = True) -> MomentSequence:
    """Build a sequence from ``"p/q"`` or decimal strings, index 0 first."""
    if not entries:
        raise MomentError("moments list is empty")
    strs = [str(e).strip() for e in entries]
    exact = []
    for s in strs:
        try:
            exact.append(parse_rational(s))
        except (ValueError, ZeroDivisionError):
            exact = None
            break
    if exact is not None:
        seq = MomentSequence(domain, tuple(exact))
    else:
        if precision is None:
            precision = max(16, max(_significant_digits(s) for s in strs if "/" not in s))
        with mpmath.workdps(precision):
            vals = []
            for s in strs:
                try:
                    vals.append(_to_mpf(parse_rational(s)) if "/" in s else mpmath.mpf(s))
                except (ValueError, ZeroDivisionError):
                    raise MomentError(f"malformed moment entry {s!r}") from None
        if vals[0] != 1:
            raise MomentError(f"mu_0 must be 1 for a probability density, got {strs[0]}")
        seq = MomentSequence(domain, tuple(vals), precision=precision)
    if check_hankel and not seq.is_positive_definite():
        raise MomentError("moment Hankel matrix is not positive definite; not a valid density")
    return seq


def load_moments(path: Union[str, os.PathLike], domain: Interval | None = None) -> MomentSequence:
    """Read a moments file (JSON with ``domain``, optional ``precision``, ``moments``)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MomentError(f"malformed moments file {path}: {exc}") from None
    if not isinstance(doc, dict) or "moments" not in doc:
        raise MomentError(f"{path}: expected an object with a 'moments' list")
    entries = doc["moments"]
    if not isinstance(entries, list):
        raise MomentError(f"{path}: 'moments' must be a list")
    if domain is None:
        dom = doc.get("domain")
        if not (isinstance(dom, list) and len(dom) == 2):
            raise MomentError(f"{path}: 'domain' must be [lower, upper] (or pass an interval)")
        try:
            domain = Interval.parse(str(dom[0]), str(dom[1]))
        except (ValueError, ZeroDivisionError) as exc:
            raise MomentError(f"{path}: bad domain: {exc}") from None
    precision = doc.get("precision")
    if precision is not None and (not isinstance(precision, int) or precision < 1):
        raise MomentError(f"{path}: precision must be a positive integer")
    seq = moments_from_strings(entries, domain, precision)
    return MomentSequence(seq.domain, seq.values, seq.precision, source=os.fspath(path))


def dump_moments(seq: MomentSequence) -> str:
    return json.dumps(seq.to_dict(), indent=2) + "\n"
