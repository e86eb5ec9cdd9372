"""Estimator-style front end to nested rule generation."""

from __future__ import annotations

from fractions import Fraction

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .extension import ExtensionOutcome, ExtensionSchedule, generate_chain
from .moments import DEFAULT_MAX_INDEX, MomentSequence
from .numerics import NestedRule, QuadratureFormula, build_nested_rule
from .ratpoly import Interval, Polynomial
from .validation import check_interval, check_moments, check_polynomial, check_precision, check_schedule


def default_start(moments: MomentSequence, domain: Interval) -> Polynomial:
    """Single node at the midpoint of a finite domain, else at the mean."""
    if domain.is_finite:
        c = domain.midpoint()
    else:
        c = moments[1]
        if not isinstance(c, Fraction):
            raise ValueError("an unbounded domain with approximate moments needs an explicit start")
    return Polynomial([-c, 1])


class NestedQuadrature(BaseEstimator):
    """Generate a nested sequence of quadrature formulas from moments.

    Parameters
    ----------
    schedule : list of int or None
        Number of nodes added at each step. ``None`` uses ``p = n + 1``
        (Patterson's doubling rule) for ``iterations`` steps.
    iterations : int
        Steps taken when ``schedule`` is None.
    start : Polynomial, list of coefficients or None
        Node polynomial of the initial formula. ``None`` means the empty
        formula for an explicit schedule, and a single node at the domain
        midpoint (or the mean, on unbounded domains) for the doubling rule.
    precision : int
        Decimal digits of the reported nodes and weights.
    domain : Interval, pair of bounds or None
        Integration domain; defaults to the one carried by the moments.
    max_index : int
        Number of moments to generate for built-in distributions. Raised
        automatically when the schedule needs more.

    Attributes
    ----------
    moments_ : MomentSequence
    chain_ : list of ChainStep
    rule_ : NestedRule
    failure_ : ExtensionOutcome or None
        The failed step when the chain stopped early.
    node_polynomials_, guaranteed_degrees_, added_ : tuple
        Per-level node polynomial, the degree guaranteed by construction and
        the ``p`` used (``None`` for the start formula).
    nodes_, weights_, first_level_ : tuple
        Top-level formula, with the level in which each node first appears.
    """

    def __init__(self, schedule=None, iterations=4, start=None, precision=50, domain=None,
                 max_index=DEFAULT_MAX_INDEX):
        self.schedule = schedule
        self.iterations = iterations
        self.start = start
        self.precision = precision
        self.domain = domain
        self.max_index = max_index

    def _resolve(self, X):
        schedule = check_schedule(self.schedule, self.iterations)
        precision = check_precision(self.precision)
        domain = check_interval(self.domain)
        moments = check_moments(X, domain, self.max_index)
        domain = domain or moments.domain
        if self.start is not None:
            start = check_polynomial(self.start)
        elif schedule.explicit is None:
            start = default_start(moments, domain)
        else:
            start = Polynomial([1])
        need = schedule.moments_needed(start.degree)
        if need > moments.max_index and not isinstance(X, (MomentSequence, list, tuple)):
            moments = check_moments(X, domain, need)
        return schedule, precision, domain, moments, start

    def fit(self, X, y=None):
        """Run the extension chain on moments ``X`` and build every formula.

        ``X`` is anything :func:`check_moments` accepts. ``y`` is ignored.
        """
        schedule, precision, domain, moments, start = self._resolve(X)
        chain = generate_chain(start, schedule, moments, domain)
        polys, guaranteed, added = [], [], []
        if start.degree >= 1:
            polys.append(start)
            guaranteed.append(start.degree - 1)
            added.append(None)
        n = start.degree
        failure: ExtensionOutcome | None = None
        for step in chain:
            if not step.outcome.success:
                failure = step.outcome
                break
            p = step.outcome.p
            polys.append(step.polynomial)
            guaranteed.append(n + 2 * p - 1)
            added.append(p)
            n += p
        self.moments_ = moments
        self.domain_ = domain
        self.schedule_ = schedule
        self.start_ = start
        self.chain_ = chain
        self.failure_ = failure
        self.rule_ = build_nested_rule(polys, moments, domain, precision) if polys else NestedRule(())
        self.node_polynomials_ = tuple(polys)
        self.guaranteed_degrees_ = tuple(guaranteed)
        self.added_ = tuple(added)
        top = self.rule_.top if polys else None
        self.nodes_ = top.nodes if top else ()
        self.weights_ = top.weights if top else ()
        self.first_level_ = self.rule_.first_level
        self.n_levels_ = len(polys)
        return self

    def formula(self, level: int = -1) -> QuadratureFormula:
        """Formula at ``level`` (1-based; negative indexes from the top)."""
        check_is_fitted(self)
        if not self.n_levels_:
            raise IndexError("the chain produced no formula")
        idx = level - 1 if level > 0 else level
        return self.rule_.formulas[idx]

    @property
    def succeeded_(self) -> bool:
        check_is_fitted(self)
        return self.failure_ is None
