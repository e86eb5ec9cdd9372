import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nestquad.extension import ExtensionSchedule, generate_chain
from nestquad.numerics import (
    CertificateViolation,
    QuadratureFormula,
    bjorck_pereyra,
    build_formula,
    build_nested_rule,
    degree_of_exactness,
    exact_value,
    moment_residuals,
    real_roots,
    solve_weights,
    to_mpf,
)
from nestquad.ratpoly import Interval, Polynomial

from .conftest import ONE, T, poly
from .reference_nodes import ARCSINE_NODES, ARCSINE_SCHEDULE

UNIT = Interval(0, 1)
SYM = Interval(-1, 1)


def close(a, b, digits):
    with mpmath.workdps(digits + 20):
        return abs(to_mpf(a) - to_mpf(b)) <= mpmath.mpf(10) ** (-digits) * max(1, abs(to_mpf(b)))


@pytest.fixture(scope="module")
def arcsine_chain(beta_half):
    steps = generate_chain(ONE, ARCSINE_SCHEDULE, beta_half, UNIT)
    return [s.polynomial for s in steps]


# -- real_roots ---------------------------------------------------------------

def test_linear_root_is_exact():
    assert real_roots(poly("-1/2", 1), UNIT, 50) == [Fraction(1, 2)]


def test_level_two_roots():
    roots = real_roots(poly("1/16", -1, 1), UNIT, 50)
    assert close(roots[0], "0.066987298107780676618138414623531908264298686547405", 50)
    assert close(roots[1], "0.93301270189221932338186158537646809173570131345260", 50)


def test_sqrt_three_fifths():
    roots = real_roots(poly("-3/5", 0, 1), SYM, 30)
    with mpmath.workdps(50):
        s = mpmath.sqrt(mpmath.mpf(3) / 5)
        neg = -s
    assert close(roots[0], neg, 30) and close(roots[1], s, 30)


def test_roots_deterministic_and_sorted():
    P = Polynomial.from_roots([Fraction(1, 3), Fraction(-2, 7), 0]) * poly(-2, 0, 1)
    a = real_roots(P, Interval(-2, 2), 40)
    b = real_roots(P, Interval(-2, 2), 40)
    assert a == b
    assert [exact_value(x) for x in a] == sorted(exact_value(x) for x in a)
    assert a[1:3] == [Fraction(-2, 7), 0]


def test_missing_roots_is_certificate_violation():
    with pytest.raises(CertificateViolation):
        real_roots(poly(1, 0, 1), SYM, 30)
    with pytest.raises(CertificateViolation):
        real_roots(poly(-4, 1), SYM, 30)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=1, max_size=4, unique=True),
       st.integers(2, 9), st.sampled_from([20, 35, 60]))
def test_refined_roots_bracket_a_sign_change(nums, k, prec):
    # an irrational factor t^2 - k keeps refinement honest
    k = k if int(k ** 0.5) ** 2 != k else k + 1
    P = Polynomial.from_roots([Fraction(n, 7) for n in nums]) * poly(-k, 0, 1)
    roots = real_roots(P, Interval(-5, 5), prec)
    assert len(roots) == P.degree
    for r in roots:
        if isinstance(r, Fraction):
            assert P(r) == 0
            continue
        x = exact_value(r)
        eps = Fraction(1, 10 ** prec) * max(1, abs(x))
        assert P(x - eps) * P(x + eps) < 0


def test_approximate_polynomial_roots():
    with mpmath.workdps(60):
        P = Polynomial([mpmath.mpf(-3) / 5, mpmath.mpf(0), mpmath.mpf(1)])
        roots = real_roots(P, SYM, 40)
        s = mpmath.sqrt(mpmath.mpf(3) / 5)
        neg = -s
    assert close(roots[1], s, 35) and close(roots[0], neg, 35)


# -- weights ------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(-3, 3, max_denominator=9), min_size=1, max_size=7, unique=True),
       st.lists(st.fractions(-5, 5, max_denominator=9), min_size=7, max_size=7))
def test_bjorck_pereyra_solves_vandermonde(nodes, rhs):
    b = rhs[: len(nodes)]
    w = bjorck_pereyra(nodes, b)
    for k in range(len(nodes)):
        assert sum(wi * x ** k for wi, x in zip(w, nodes)) == b[k]


def test_bjorck_pereyra_duplicate_nodes():
    with pytest.raises(ZeroDivisionError):
        bjorck_pereyra([Fraction(1), Fraction(1)], [1, 1])


def test_single_node_weight(beta_half):
    assert solve_weights([Fraction(1, 2)], beta_half) == [1]


def test_three_point_uniform_weights(uniform):
    with mpmath.workdps(80):
        s = mpmath.sqrt(mpmath.mpf(3) / 5)
        nodes = [-s, Fraction(0), s]
    w = solve_weights(nodes, uniform, 30)
    for got, want in zip(w, [Fraction(5, 18), Fraction(4, 9), Fraction(5, 18)]):
        assert close(got, want, 30)


def test_arcsine_three_point_weights(beta_half):
    roots = real_roots(Polynomial.from_roots([Fraction(1, 2)]) * poly("1/16", -1, 1), UNIT, 110)
    w = solve_weights(roots, beta_half, 50)
    assert all(close(x, Fraction(1, 3), 50) for x in w)


def test_weights_reject_duplicates(uniform):
    with pytest.raises(ValueError):
        solve_weights([Fraction(1, 2), Fraction(1, 2)], uniform)


def test_weights_need_moments(uniform):
    with pytest.raises(ValueError):
        solve_weights([Fraction(k, 10) for k in range(5)], uniform.truncate(3))


def _exact_weight_oracle(F, mu):
    # at a root s of F the weight is N(s)/F'(s) with N(s) = sum_k f_k sum_{j<k} mu_j s^(k-1-j)
    coeffs = F.coeffs
    N = Polynomial([0])
    for k, fk in enumerate(coeffs):
        for j in range(k):
            N = N + Polynomial.monomial(k - 1 - j, fk * mu[j])
    return N, F.derivative()


def test_weights_match_residue_formula(beta23):
    F = generate_chain(ONE, [1, 2, 4], beta23, UNIT)[-1].polynomial
    prec = 40
    nodes = real_roots(F, UNIT, 2 * prec + 10)
    w = solve_weights(nodes, beta23, prec)
    N, dF = _exact_weight_oracle(F, beta23)
    with mpmath.workdps(2 * prec + 10):
        for x, wi in zip(nodes, w):
            x = to_mpf(x)
            want = N(x) / dF(x)
            assert close(wi, want, prec)


# -- degree of exactness -----------------------------------------------------

def test_degree_gauss_three_point(uniform):
    f = build_formula(poly(0, "-3/5", 0, 1), uniform, SYM, 40)
    assert degree_of_exactness(f, uniform, 8) == 5


def test_degree_single_node_uniform(uniform):
    f = QuadratureFormula((Fraction(0),), (Fraction(1),), T, 50)
    assert degree_of_exactness(f, uniform, 4) == 1


def test_degree_single_node_arcsine(beta_half):
    f = QuadratureFormula((Fraction(1, 2),), (Fraction(1),), poly("-1/2", 1), 50)
    assert degree_of_exactness(f, beta_half, 4) == 1


def test_degree_empty_formula(uniform):
    assert degree_of_exactness(QuadratureFormula((), (), ONE, 50), uniform, 4) == -1


def test_degree_max_check_bound(uniform):
    f = QuadratureFormula((Fraction(0),), (Fraction(1),), T, 50)
    with pytest.raises(ValueError):
        degree_of_exactness(f, uniform.truncate(3), 4)


def test_degree_full_range_is_max_check(uniform):
    f = build_formula(poly(0, "-3/5", 0, 1), uniform, SYM, 40)
    assert degree_of_exactness(f, uniform, 5) == 5


# -- build_formula / build_nested_rule ---------------------------------------

def test_build_single_node(beta_half):
    f = build_formula(poly("-1/2", 1), beta_half, UNIT, 50)
    assert f.nodes == (Fraction(1, 2),) and f.weights == (1,)
    assert f.verified_degree >= 1 and f.is_exact


def test_build_arcsine_three(beta_half):
    F = poly("-1/2", 1) * poly("1/16", -1, 1)
    f = build_formula(F, beta_half, UNIT, 50)
    assert [close(x, y, 50) for x, y in zip(f.nodes, [n for n, lv in ARCSINE_NODES if lv <= 2])] == [True] * 3
    assert all(close(w, Fraction(1, 3), 50) for w in f.weights)


def test_arcsine_reference_rule(beta_half, arcsine_chain):
    rule = build_nested_rule(arcsine_chain, beta_half, UNIT, 50)
    top = rule.top
    assert top.size == 25
    for x, (ref, _) in zip(top.nodes, ARCSINE_NODES):
        assert close(x, ref, 49)
    assert list(rule.first_level) == [lv for _, lv in ARCSINE_NODES]
    assert [f.size for f in rule.formulas] == [1, 3, 7, 13, 25]


@pytest.mark.parametrize("name", ["beta_half", "uniform"])
def test_formula_invariants(name, request):
    mu = request.getfixturevalue(name)
    start = ONE if name == "beta_half" else T
    sched = ARCSINE_SCHEDULE if name == "beta_half" else ExtensionSchedule.patterson(3)
    polys = [s.polynomial for s in generate_chain(start, sched, mu)]
    if start.degree:
        polys = [start] + polys
    rule = build_nested_rule(polys, mu, mu.domain, 40)
    for i, f in enumerate(rule.formulas):
        assert f.size == f.node_polynomial.degree
        xs = [exact_value(x) for x in f.nodes]
        assert xs == sorted(xs) and len(set(xs)) == len(xs)
        assert all(x in mu.domain for x in xs)
        with mpmath.workdps(100):
            total = mpmath.fsum(to_mpf(w) for w in f.weights)
        assert close(total, 1, 35)
        assert max(moment_residuals(f, mu, f.size - 1)) < mpmath.mpf(10) ** -30
        if i:
            assert rule.formulas[i - 1].node_polynomial.divides(f.node_polynomial)
            assert set(rule.formulas[i - 1].nodes) < set(f.nodes)


@pytest.mark.parametrize("name,reflect", [("uniform", lambda x: -x), ("beta_half", lambda x: 1 - x)])
def test_symmetry(name, reflect, request):
    mu = request.getfixturevalue(name)
    start = T if name == "uniform" else ONE
    sched = ExtensionSchedule.patterson(3) if name == "uniform" else ARCSINE_SCHEDULE
    polys = [s.polynomial for s in generate_chain(start, sched, mu)]
    f = build_formula(polys[-1], mu, mu.domain, 40)
    nodes, weights = f.nodes, f.weights
    K = len(nodes)
    with mpmath.workdps(100):
        for k in range(K):
            assert close(reflect(to_mpf(nodes[k])), nodes[K - 1 - k], 35)
            assert close(weights[k], weights[K - 1 - k], 35)


def test_nested_rule_rejects_non_divisor(uniform):
    with pytest.raises(CertificateViolation):
        build_nested_rule([T, poly("-1/2", 1)], uniform, SYM, 30)


def test_levels_of(beta_half, arcsine_chain):
    rule = build_nested_rule(arcsine_chain[:2], beta_half, UNIT, 30)
    assert rule.levels_of(1) == (1,)
    assert rule.levels_of(2) == (2, 1, 2)


def test_random_chains_reach_guaranteed_degree():
    from .cases import random_case, sequence
    rng = random.Random(5)
    done = 0
    while done < 15:
        name, F, p = random_case(rng)
        mu = sequence(name)
        steps = generate_chain(F, [p], mu)
        if not steps[0].outcome.success:
            continue
        f = build_formula(steps[0].polynomial, mu, mu.domain, 30)
        assert f.verified_degree >= F.degree + 2 * p - 1
        done += 1


def test_double_root_is_certificate_violation():
    with pytest.raises(CertificateViolation):
        real_roots(poly(0, 0, -3, 0, 5), SYM, 30)
