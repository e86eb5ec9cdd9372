import json
from fractions import Fraction
from math import comb

import mpmath
import pytest
import sympy

from nestquad.moments import (
    DistributionSpec,
    MomentError,
    MomentSequence,
    dump_moments,
    load_moments,
    moment,
    moments_from_strings,
)
from nestquad.ratpoly import Interval

FAMILIES = ["uniform:-1,1", "uniform:0,3", "beta:1/2,1/2", "beta:2,3", "gauss"]


def test_examples():
    assert moment(DistributionSpec.parse("beta:1/2,1/2"), 1) == Fraction(1, 2)
    assert moment(DistributionSpec.parse("uniform:-1,1"), 2) == Fraction(1, 3)
    assert moment(DistributionSpec.parse("gauss"), 4) == 3


@pytest.mark.parametrize("family", FAMILIES)
def test_normalization(family):
    assert moment(DistributionSpec.parse(family), 0) == 1


@pytest.mark.parametrize("k", range(8))
def test_uniform_matches_symbolic_integral(k):
    t = sympy.Symbol("t")
    expect = sympy.integrate(t**k / 3, (t, 0, 3))
    assert moment(DistributionSpec.parse("uniform:0,3"), k) == Fraction(str(expect))


@pytest.mark.parametrize("k", range(0, 11))
def test_gaussian_matches_quadrature(k):
    with mpmath.workdps(30):
        val = mpmath.quad(lambda t: t**k * mpmath.npdf(t), [-mpmath.inf, 0, mpmath.inf])
        assert abs(val - int(moment(DistributionSpec("gaussian"), k))) < mpmath.mpf(10) ** -20


@pytest.mark.parametrize("k", range(6))
def test_beta23_matches_symbolic_integral(k):
    t = sympy.Symbol("t")
    dens = t * (1 - t) ** 2 / sympy.beta(2, 3)
    expect = sympy.nsimplify(sympy.integrate(t**k * dens, (t, 0, 1)))
    assert moment(DistributionSpec.parse("beta:2,3"), k) == Fraction(str(expect))


def test_arcsine_moments_are_central_binomials():
    spec = DistributionSpec.parse("beta:1/2,1/2")
    for k in range(21):
        assert moment(spec, k) == Fraction(comb(2 * k, k), 4**k)


@pytest.mark.parametrize("family", ["uniform:-1,1", "uniform:-3/2,3/2", "gauss"])
def test_odd_moments_vanish_for_symmetric_families(family):
    seq = MomentSequence.from_distribution(family, 40)
    assert all(seq[k] == 0 for k in range(1, 41, 2))


@pytest.mark.parametrize("family", ["uniform:-1,1", "beta:1/2,1/2", "beta:2,3", "gauss"])
def test_hankel_positive_definite_up_to_100(family):
    seq = MomentSequence.from_distribution(family, 100)
    minors = seq.hankel_minors()
    assert len(minors) == 51
    assert all(d > 0 for d in minors)


def test_discrete_measure_is_not_positive_definite():
    # two-point distribution: mu_k = (0 + 1)/2
    seq = moments_from_strings(["1"] + ["1/2"] * 6, Interval(0, 1), check_hankel=False)
    assert not seq.is_positive_definite()


@pytest.mark.parametrize("text", ["uniform:1,0", "beta:0,1", "beta:1", "gauss:1", "cauchy", "beta:a,b"])
def test_invalid_specs(text):
    with pytest.raises(MomentError):
        DistributionSpec.parse(text)


def test_negative_index():
    with pytest.raises(MomentError):
        moment(DistributionSpec.parse("gauss"), -1)


def test_domains():
    assert DistributionSpec.parse("beta:2,3").domain == Interval(0, 1)
    assert DistributionSpec.parse("uniform:-1,1").domain == Interval(-1, 1)
    assert not DistributionSpec.parse("normal").domain.is_finite


def write(tmp_path, doc, name="m.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_load_exact(tmp_path):
    seq = load_moments(write(tmp_path, {"domain": ["0", "1"], "moments": ["1", "1/2", "3/8"]}))
    assert seq.is_exact and seq.kind == "exact"
    assert seq.max_index == 2
    assert seq[2] == Fraction(3, 8)


def test_load_degenerate(tmp_path):
    seq = load_moments(write(tmp_path, {"domain": ["0", "1"], "moments": ["1"]}))
    assert seq.max_index == 0


def test_load_rejects_bad_normalization(tmp_path):
    with pytest.raises(MomentError):
        load_moments(write(tmp_path, {"domain": ["0", "1"], "moments": ["2", "1/2"]}))


def test_load_rejects_empty(tmp_path):
    with pytest.raises(MomentError):
        load_moments(write(tmp_path, {"domain": ["0", "1"], "moments": []}))


def test_load_rejects_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(MomentError):
        load_moments(path)
    with pytest.raises(MomentError):
        load_moments(write(tmp_path, {"moments": ["1"]}))


def test_load_approximate(tmp_path):
    doc = {"domain": ["-inf", "inf"], "precision": 30, "moments": ["1", "0.0", "1.0", "0", "3.0000000000"]}
    seq = load_moments(write(tmp_path, doc))
    assert seq.kind == "approximate"
    assert seq.precision == 30
    assert seq[4] == 3


def test_dump_load_roundtrip(tmp_path):
    seq = MomentSequence.from_distribution("beta:1/2,1/2", 12)
    path = tmp_path / "beta.json"
    path.write_text(dump_moments(seq))
    back = load_moments(path)
    assert back.values == seq.values
    assert back.domain == seq.domain


def test_to_approximate_keeps_digits():
    seq = MomentSequence.from_distribution("uniform:-1,1", 4).to_approximate(60)
    with mpmath.workdps(70):
        assert abs(seq[2] - mpmath.mpf(1) / 3) < mpmath.mpf(10) ** -59
