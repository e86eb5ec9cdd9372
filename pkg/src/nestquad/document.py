"""JSON rule documents: writing, reading and re-verifying nested rules.

Numbers are stored as strings so that no precision is lost: node polynomial
coefficients as ``"p/q"``, nodes and weights as decimal strings with
``precision`` significant digits.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .estimator import NestedQuadrature
from .extension import ExtensionOutcome, certify, certify_approx
from .moments import DEFAULT_MAX_INDEX, DistributionSpec, MomentError, MomentSequence, moments_from_strings
from .numerics import (NestedRule, QuadratureFormula, degree_of_exactness, moment_residuals, new_factor,
                       real_roots, to_mpf)
from .ratpoly import Interval, Polynomial, format_rational, parse_rational

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """The document is malformed or incomplete."""


def format_real(x, digits: int) -> str:
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(to_mpf(x), digits)


def _format_coeff(c) -> str:
    if isinstance(c, (int, Fraction)):
        return format_rational(c)
    # enough digits to round-trip the mpf's own binary precision
    digits = int(c._mpf_[3] * 0.30103) + 2 if c._mpf_[3] else 1
    with mpmath.workdps(digits + 5):
        return mpmath.nstr(c, digits, strip_zeros=False)


def _parse_coeff(text: str):
    if any(ch in text for ch in ".eE"):
        digits = sum(ch.isdigit() for ch in text)
        with mpmath.workdps(digits + 5):
            return mpmath.mpf(text)
    return parse_rational(text)


@dataclass
class LevelRecord:
    level: int
    node_polynomial: Polynomial
    nodes: list[str]
    first_level: list[int]
    weights: list[str]
    guaranteed_degree: int
    verified_degree: int
    p: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "p": self.p,
            "node_polynomial": [_format_coeff(c) for c in self.node_polynomial.coeffs],
            "nodes": self.nodes,
            "first_level": self.first_level,
            "weights": self.weights,
            "guaranteed_degree": self.guaranteed_degree,
            "verified_degree": self.verified_degree,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LevelRecord":
        try:
            poly = Polynomial(_parse_coeff(str(c)) for c in d["node_polynomial"])
            rec = cls(
                level=int(d["level"]),
                node_polynomial=poly,
                nodes=[str(x) for x in d["nodes"]],
                first_level=[int(x) for x in d["first_level"]],
                weights=[str(x) for x in d["weights"]],
                guaranteed_degree=int(d["guaranteed_degree"]),
                verified_degree=int(d["verified_degree"]),
                p=None if d.get("p") is None else int(d["p"]),
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"malformed level record: {exc!r}") from None
        if not (len(rec.nodes) == len(rec.weights) == len(rec.first_level) == poly.degree):
            raise DocumentError(f"level {rec.level}: node, weight and polynomial sizes disagree")
        return rec


@dataclass
class RuleDocument:
    description: str
    domain: Interval
    distribution: str
    precision: int
    levels: list[LevelRecord]
    moments: Optional[list[str]] = None
    failure: Optional[dict] = None
    schedule: object = None
    max_index: Optional[int] = None
    version: int = FORMAT_VERSION
    extra: dict = field(default_factory=dict)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_rule(cls, rule: NestedRule, *, domain: Interval, precision: int, added, guaranteed,
                  distribution: str = "custom", moments: MomentSequence | None = None,
                  failure: ExtensionOutcome | None = None, failed_step: int | None = None,
                  schedule=None, description: str = "") -> "RuleDocument":
        levels = []
        for i, formula in enumerate(rule.formulas, start=1):
            levels.append(LevelRecord(
                level=i,
                p=added[i - 1],
                node_polynomial=formula.node_polynomial,
                nodes=[format_real(x, precision) for x in formula.nodes],
                first_level=list(rule.levels_of(i)),
                weights=[format_real(w, precision) for w in formula.weights],
                guaranteed_degree=guaranteed[i - 1],
                verified_degree=formula.verified_degree,
            ))
        fail = None
        if failure is not None:
            fail = {"step": failed_step, "p": failure.p, "reason": str(failure.reason)}
        embedded = None
        if distribution == "custom" and moments is not None:
            embedded = moments.to_dict()["moments"]
        return cls(
            description=description or f"nested rule for {distribution} on {domain}",
            domain=domain,
            distribution=distribution,
            precision=precision,
            levels=levels,
            moments=embedded,
            failure=fail,
            schedule=schedule,
            max_index=moments.max_index if moments is not None else None,
        )

    @classmethod
    def from_estimator(cls, est: NestedQuadrature, distribution: str = "custom",
                       description: str = "") -> "RuleDocument":
        sched = est.schedule_
        return cls.from_rule(
            est.rule_,
            domain=est.domain_,
            precision=est.precision,
            added=est.added_,
            guaranteed=est.guaranteed_degrees_,
            distribution=distribution,
            moments=est.moments_,
            failure=est.failure_,
            failed_step=len(est.chain_),
            schedule=list(sched.explicit) if sched.explicit is not None else "n+1",
            description=description,
        )

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "version": self.version,
            "description": self.description,
            "domain": self.domain.to_strings(),
            "distribution": self.distribution,
            "precision": self.precision,
            "schedule": self.schedule,
            "max_index": self.max_index,
            "levels": [lv.to_dict() for lv in self.levels],
            "failure": self.failure,
        }
        if self.moments is not None:
            d["moments"] = self.moments
        d.update(self.extra)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RuleDocument":
        if not isinstance(d, dict):
            raise DocumentError("document must be a JSON object")
        known = {"version", "description", "domain", "distribution", "precision", "schedule",
                 "levels", "failure", "moments", "max_index"}
        try:
            dom = d["domain"]
            domain = Interval.parse(str(dom[0]), str(dom[1]))
            levels = [LevelRecord.from_dict(x) for x in d["levels"]]
            precision = int(d["precision"])
            distribution = str(d["distribution"])
        except DocumentError:
            raise
        except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
            raise DocumentError(f"malformed rule document: {exc!r}") from None
        if not levels:
            raise DocumentError("document has no levels")
        return cls(
            description=str(d.get("description", "")),
            domain=domain,
            distribution=distribution,
            precision=precision,
            levels=levels,
            moments=d.get("moments"),
            failure=d.get("failure"),
            schedule=d.get("schedule"),
            max_index=None if d.get("max_index") is None else int(d["max_index"]),
            version=int(d.get("version", FORMAT_VERSION)),
            extra={k: v for k, v in d.items() if k not in known},
        )

    @classmethod
    def loads(cls, text: str) -> "RuleDocument":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"not valid JSON: {exc}") from None
        return cls.from_dict(d)

    def to_csv(self, level: int = -1) -> str:
        """Node table of one level: node, first_level, weight."""
        rec = self.levels[level]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "first_level", "weight"])
        for row in zip(rec.nodes, rec.first_level, rec.weights):
            w.writerow(row)
        return buf.getvalue()

    # -- helpers -----------------------------------------------------------

    def moment_sequence(self, max_index: int | None = None) -> MomentSequence:
        """Rebuild the moments the document was generated from."""
        if self.distribution == "custom":
            if not self.moments:
                raise DocumentError("custom distribution without embedded moments")
            try:
                return moments_from_strings(self.moments, self.domain)
            except MomentError as exc:
                raise DocumentError(f"embedded moments invalid: {exc}") from None
        try:
            spec = DistributionSpec.parse(self.distribution)
        except MomentError as exc:
            raise DocumentError(str(exc)) from None
        seq = MomentSequence.from_distribution(spec, max_index or self.max_index or DEFAULT_MAX_INDEX)
        return MomentSequence(self.domain, seq.values, source=seq.source)

    def formula(self, level: int = -1) -> QuadratureFormula:
        rec = self.levels[level]
        with mpmath.workdps(self.precision + 10):
            nodes = tuple(mpmath.mpf(x) for x in rec.nodes)
            weights = tuple(mpmath.mpf(w) for w in rec.weights)
        return QuadratureFormula(nodes, weights, rec.node_polynomial, self.precision, rec.verified_degree)


@dataclass
class VerificationReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    @property
    def first_failure(self) -> Optional[tuple[str, str]]:
        for name, passed, msg in self.checks:
            if not passed:
                return name, msg
        return None

    def add(self, name: str, passed: bool, message: str = ""):
        self.checks.append((name, passed, message))

    def __str__(self):
        lines = [f"{'PASS' if ok else 'FAIL'} {name}{': ' + msg if msg else ''}" for name, ok, msg in self.checks]
        return "\n".join(lines)


def verify_document(doc: RuleDocument) -> VerificationReport:
    """Re-check a document from scratch.

    Checks, per level and in order: nestedness, the extension certificates,
    moment reproduction by the stored nodes and weights, agreement of the
    stored nodes with the roots of the node polynomial, first-level tags,
    and the stored degrees. Verification stops at the first failing level.
    """
    report = VerificationReport()
    moments = doc.moment_sequence()
    digits = doc.precision if moments.is_exact else min(doc.precision, moments.precision)
    tol_digits = digits - 10
    prev = Polynomial([1])
    tags_seen: dict[str, int] = {}
    for lv, rec in enumerate(doc.levels, start=1):
        F = rec.node_polynomial
        if rec.level != lv:
            report.add("nestedness", False, f"record {lv} is labelled level {rec.level}")
            return report
        factor = new_factor(F, prev, moments.precision)
        if factor is None or factor.degree < 1:
            report.add("nestedness", False, f"level {lv} does not strictly extend level {lv - 1}")
            return report
        if factor.is_exact and prev.is_exact:
            out = certify(prev, factor, doc.domain)
        else:
            out = certify_approx(prev, factor, doc.domain, moments.precision or doc.precision)
        if not out.success:
            report.add("certificate", False, f"level {lv}: {out.reason}")
            return report
        formula = doc.formula(lv - 1)
        K = formula.size
        resid = moment_residuals(formula, moments, K - 1)
        with mpmath.workdps(doc.precision + 10):
            bad = [j for j, r in enumerate(resid) if r > mpmath.mpf(10) ** (-tol_digits)]
        if bad:
            report.add("moment-reproduction", False,
                       f"level {lv}: moment {bad[0]} off by {mpmath.nstr(resid[bad[0]], 3)}")
            return report
        roots = real_roots(F, doc.domain, doc.precision + 10)
        with mpmath.workdps(doc.precision + 10):
            tol = mpmath.mpf(10) ** (-tol_digits)
            mism = [k for k, (x, r) in enumerate(zip(formula.nodes, roots))
                    if abs(x - to_mpf(r)) > tol * max(1, abs(to_mpf(r)))]
        if mism:
            report.add("node-consistency", False, f"level {lv}: node {mism[0]} is not a root of its polynomial")
            return report
        new_tags = {}
        for k, (r, tag) in enumerate(zip(roots, rec.first_level)):
            key = format_real(r, tol_digits)
            expected = tags_seen.get(key, lv)
            if tag != expected:
                report.add("first-level", False, f"level {lv}: node {k} tagged {tag}, expected {expected}")
                return report
            new_tags[key] = expected
        tags_seen = new_tags
        deg = degree_of_exactness(formula, moments, moments.max_index)
        if deg != rec.verified_degree:
            report.add("degree", False, f"level {lv}: measured degree {deg}, document says {rec.verified_degree}")
            return report
        if deg < rec.guaranteed_degree:
            report.add("degree", False, f"level {lv}: degree {deg} below guaranteed {rec.guaranteed_degree}")
            return report
        prev = F
    n_levels = len(doc.levels)
    report.add("nestedness", True, f"{n_levels} levels")
    report.add("certificate", True)
    report.add("moment-reproduction", True)
    report.add("node-consistency", True)
    report.add("first-level", True)
    report.add("degree", True, ", ".join(str(r.verified_degree) for r in doc.levels))
    return report
