import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracspec import DomainError
from fracspec.bounds import (
    DomainSpec,
    asymptotic_eigenvalue,
    asymptotic_sum,
    bly_sum_lower_bound,
    counting_upper_bound,
    counting_upper_bound_euclidean,
    li_yau_sum_lower_bound,
    polya_lower_bound,
    scan_bounds,
    weyl_constant,
    weyl_counting_estimate,
    write_scan_csv,
)
from fracspec.specfun import ball_volume
from fracspec.spectrum import SpectralParams, counting_function, eigenvalue_sum, enumerate_smallest

PI = math.pi
SQ = DomainSpec(PI ** 2, 2)
dims = st.integers(1, 6)
orders = st.floats(0.51, 1.0)


def test_weyl_examples():
    assert weyl_counting_estimate(SQ, 1, 8) == pytest.approx(2 * PI, rel=1e-14)
    assert weyl_counting_estimate(SQ, 1, 0) == 0
    for vol in (0.3, 1.0, 17.0):
        assert weyl_constant(DomainSpec(vol, 2), 1) == pytest.approx(vol / (4 * PI), rel=1e-14)


def test_asymptotic_examples():
    assert asymptotic_eigenvalue(SQ, 1, 1) == pytest.approx(4 / PI, rel=1e-14)
    assert asymptotic_sum(SQ, 1, 5) == pytest.approx(50 / PI, rel=1e-14)
    assert asymptotic_sum(SQ, 1, 0, allow_zero=True) == 0
    with pytest.raises(DomainError):
        asymptotic_sum(SQ, 1, 0)


def test_asymptotic_eigenvalue_s1_pattern():
    # s=1: E_n ~ (2 pi)^2 (n / (|B_d| |Omega|))^(2/d)
    for d in (1, 2, 3, 5):
        dom = DomainSpec(2.3, d)
        ref = (2 * PI) ** 2 * (7 / (ball_volume(d, 1) * 2.3)) ** (2 / d)
        assert asymptotic_eigenvalue(dom, 1, 7) == pytest.approx(ref, rel=1e-13)


@given(dims, orders, st.floats(0.1, 100), st.integers(1, 10**6))
def test_weyl_inverse(d, s, vol, n):
    dom = DomainSpec(vol, d)
    assert weyl_counting_estimate(dom, s, asymptotic_eigenvalue(dom, s, n)) == pytest.approx(n, rel=1e-10)


def test_polya_examples():
    assert polya_lower_bound(SQ, 1, 1) == pytest.approx(4 / PI, rel=1e-14)
    assert polya_lower_bound(SQ, 1, 1) <= 2
    line = DomainSpec(PI, 1)
    assert polya_lower_bound(line, 0.75, 3) <= 3 ** 1.5


@given(dims, orders, st.floats(0.1, 10), st.integers(1, 10**5))
def test_polya_is_asymptotic(d, s, vol, n):
    dom = DomainSpec(vol, d)
    assert polya_lower_bound(dom, s, n) == asymptotic_eigenvalue(dom, s, n)


def test_polya_requires_tiling():
    with pytest.raises(DomainError):
        polya_lower_bound(DomainSpec(1.0, 2, tiling=False), 1, 3)


def test_bly_examples():
    b = bly_sum_lower_bound(SQ, 1, 5)
    assert b == pytest.approx(50 / PI, rel=1e-14) and b <= 30


@given(dims, st.floats(0.1, 10), st.integers(1, 10**5))
def test_bly_reduces_to_li_yau(d, vol, N):
    dom = DomainSpec(vol, d)
    assert bly_sum_lower_bound(dom, 1, N) == pytest.approx(li_yau_sum_lower_bound(dom, N), rel=1e-12)


@given(st.integers(1, 4), st.sampled_from([0.55, 0.6, 0.75, 0.9, 1.0]), st.sampled_from([1.0, PI]))
def test_first_eigenvalue_above_bly(d, s, L):
    p = SpectralParams(d, s, L=L)
    dom = DomainSpec.from_params(p)
    assert eigenvalue_sum(p, 1) >= bly_sum_lower_bound(dom, s, 1)


def test_counting_upper_examples():
    assert counting_upper_bound(SQ, 1, 8) == pytest.approx(4 * PI, rel=1e-14)
    assert counting_upper_bound(SQ, 1, 8) >= 4
    assert counting_upper_bound(SQ, 0.7, 0) == 0


@given(dims, st.floats(0.1, 10), st.floats(0, 1e6))
def test_counting_upper_s1_form(d, vol, z):
    dom = DomainSpec(vol, d)
    a, b = counting_upper_bound(dom, 1, z), counting_upper_bound_euclidean(dom, z)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@given(dims, orders, st.floats(0.1, 1e4))
def test_counting_upper_over_weyl_constant(d, s, z):
    dom = DomainSpec(1.7, d)
    ratio = counting_upper_bound(dom, s, z) / weyl_counting_estimate(dom, s, z)
    assert ratio == pytest.approx(((d + 2 * s) / d) ** (d / (2 * s)), rel=1e-12)
    assert ratio > 1


def test_scan_examples():
    reps = scan_bounds(SpectralParams(2, 1, L=PI), 1000)
    polya = [r for r in reps if r.quantity == "polya"]
    assert len(polya) == 1000 and all(r.satisfied for r in polya)
    reps = scan_bounds(SpectralParams(1, 0.6, L=1.0), 1000)
    assert all(r.satisfied for r in reps if r.quantity == "bly_sum")
    assert scan_bounds(SpectralParams(2, 1), 0, ()) == []


def test_scan_csv():
    import io

    reps = scan_bounds(SpectralParams(2, 0.75), 3, [50.0])
    buf = io.StringIO()
    write_scan_csv(reps, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# fracspec-csv v1 bounds-scan"
    assert len(lines) == 2 + len(reps) == 2 + 8


@given(st.integers(1, 4), st.sampled_from([0.55, 0.75, 1.0]), st.floats(1, 2000))
def test_counting_below_upper_bound(d, s, E):
    p = SpectralParams(d, s, L=PI)
    assert counting_function(p, E) <= counting_upper_bound(DomainSpec.from_params(p), s, E)


def test_domain_validation():
    for bad in (0, -1, float("inf")):
        with pytest.raises(DomainError):
            DomainSpec(bad, 2)
    with pytest.raises(DomainError):
        DomainSpec(1.0, 0)
    dom = DomainSpec.cube(2.0, 3)
    assert dom.volume == 8.0
    assert dom.scaled(0.5).volume == 1.0
    with pytest.raises(DomainError):
        dom.scaled(1.5)


@given(st.integers(1, 3), orders, st.floats(0.2, 1.0))
def test_scaling_covariance(d, s, lam):
    # bounds on the scaled cube follow lam^(-2s)
    dom = DomainSpec.cube(PI, d)
    small = dom.scaled(lam)
    assert polya_lower_bound(small, s, 5) == pytest.approx(
        polya_lower_bound(dom, s, 5) / DomainSpec.eigenvalue_factor(lam, s), rel=1e-12)
