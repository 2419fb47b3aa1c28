import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fracspec import DomainError
from fracspec.coherent import (
    CoherentParams,
    coherent_profile,
    gaussian_kinetic_expectation,
    kinetic_expectation,
    momentum_centroid,
    momentum_density,
    normalization_constant,
    normalization_mass,
    parseval_check,
    potential_expectation,
    semiclassical_limit_check,
)
from fracspec.semiclassical import PotentialSpec
from fracspec.specfun import gamma

TWO_PI = 2 * math.pi


def test_profile_at_centre():
    c = CoherentParams(2, 0.7, 0.3, k=(1.0, -0.5), y=(0.2, 0.4))
    ref = (2 * math.sqrt(0.3) * gamma(1 + 1 / 1.4)) ** -1.0
    assert abs(coherent_profile(c, [[0.2, 0.4]])[0]) == pytest.approx(ref, rel=1e-14)
    assert normalization_constant(2, 0.7, 0.3) == pytest.approx(ref, rel=1e-14)


@given(st.floats(0.05, 1.0), st.floats(0.01, 2), st.floats(-3, 3), st.floats(0, 2))
def test_modulus_symmetric(s, hbar, y, u):
    c = CoherentParams(1, s, hbar, k=(1.3,), y=(y,))
    a = np.abs(coherent_profile(c, [[y + u], [y - u]]))
    assert a[0] == pytest.approx(a[1], rel=1e-13, abs=1e-300)


@pytest.mark.parametrize("s,hbar", [(1.0, 1.0), (0.6, 0.05), (0.9, 0.5), (0.75, 1.0)])
def test_normalization(s, hbar):
    assert abs(normalization_mass(CoherentParams(1, s, hbar, k=(2.0,))) - 1) <= 1e-8
    assert abs(normalization_mass(CoherentParams(2, s, hbar, k=(2.0, 1.0))) - 1) <= 1e-8


def test_normalization_quadrature_d1_gaussian():
    c = CoherentParams(1, 1.0, 1.0)
    val, _ = integrate.quad(lambda x: abs(coherent_profile(c, [[x]])[0]) ** 2, -np.inf, np.inf)
    assert val == pytest.approx(1, abs=1e-10)


def test_gaussian_kinetic_examples():
    c = CoherentParams(1, 1.0, 0.1, k=(1.0,))
    assert kinetic_expectation(c) == pytest.approx(39.5284, abs=1e-4)
    assert kinetic_expectation(c) == pytest.approx(TWO_PI ** 2 + 0.05, rel=1e-10)
    c = CoherentParams(2, 1.0, 0.2, k=(1.0, 1.0))
    # 2 (2 pi)^2 + hbar d / 2 = 78.9568 + 0.2
    assert kinetic_expectation(c) == pytest.approx(79.1568, abs=1e-4)
    assert gaussian_kinetic_expectation((1.0, 1.0), 0.2) == pytest.approx(2 * TWO_PI ** 2 + 0.2, rel=1e-15)


@pytest.mark.parametrize("hbar", [0.02, 0.1, 0.37, 1.0])
def test_gaussian_identity_grid(hbar):
    for k in ((0.5,), (1.0, -2.0)):
        c = CoherentParams(len(k), 1.0, hbar, k=k)
        assert abs(kinetic_expectation(c) - gaussian_kinetic_expectation(k, hbar)) <= 1e-6


def test_zero_momentum_limit():
    vals = [kinetic_expectation(CoherentParams(1, 0.75, h, k=(0.0,))) for h in (0.5, 0.1, 0.02)]
    assert vals[0] > vals[1] > vals[2] > 0
    assert vals[2] < 0.1


def test_s1_gap_is_hbar_d_over_2():
    rep = semiclassical_limit_check(1.0, (1.0, 0.5), d=2)
    np.testing.assert_allclose(rep.gap, np.array(rep.hbar), rtol=1e-9)
    assert rep.decreasing


@pytest.mark.parametrize("s", [0.6, 0.75, 0.9])
def test_fractional_gap_decreasing(s):
    rep = semiclassical_limit_check(s, 1.0)
    assert rep.decreasing and rep.converged
    assert rep.final_relative_gap < 0.05


def test_limit_homogeneous():
    a = CoherentParams(1, 0.8, 0.1, k=(1.0,))
    b = a.replace(k=(2.5,))
    assert b.classical_limit == pytest.approx(2.5 ** 1.6 * a.classical_limit, rel=1e-14)


def test_report_csv():
    rep = semiclassical_limit_check(1.0, 1.0, hbars=(0.5, 0.1))
    buf = io.StringIO()
    rep.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "hbar,expectation,limit,gap" and len(lines) == 3


@pytest.mark.parametrize("s", [0.75, 1.0])
def test_tensor_equals_separable(s):
    c = CoherentParams(2, s, 0.3, k=(0.7, -0.4), y=(0.1, 0.3))
    assert kinetic_expectation(c, method="tensor") == pytest.approx(kinetic_expectation(c), rel=1e-9)


@settings(max_examples=15)
@given(st.floats(-5, 5), st.sampled_from([0.6, 0.75, 1.0]))
def test_translation_invariance(y, s):
    c = CoherentParams(1, s, 0.2, k=(1.0,))
    assert kinetic_expectation(c.replace(y=(y,))) == pytest.approx(kinetic_expectation(c), rel=1e-10)


@pytest.mark.parametrize("s", [0.6, 0.9])
def test_centroid_is_p(s):
    c = CoherentParams(2, s, 0.1, k=(1.0, -0.5))
    np.testing.assert_allclose(momentum_centroid(c), c.p, rtol=1e-8)


def test_momentum_density_mass():
    # the grid samples the s < 1 cusp, so the discrete mass is only close to 1
    p, w, dp = momentum_density(CoherentParams(1, 0.7, 0.1, k=(1.0,)))
    assert np.sum(w) * dp == pytest.approx(1, rel=1e-6)
    p, w, dp = momentum_density(CoherentParams(1, 1.0, 0.1, k=(1.0,)))
    assert np.sum(w) * dp == pytest.approx(1, rel=1e-12)


def test_potential_constant_and_outside():
    c = CoherentParams(1, 0.8, 0.1, k=(1.0,), y=(0.3,))
    const = lambda x: np.full(len(x), 2.5)
    for mode in ("center", "diagnostic"):
        assert potential_expectation(c, const, mode).value == pytest.approx(2.5, rel=1e-8)
    well = PotentialSpec.box_well(1.0, [0.5], 0.8, 1.0)
    out = c.replace(y=(3.0,))
    assert potential_expectation(out, well, "center").value == 0.0


def test_potential_diagnostic_gap_shrinks():
    well = PotentialSpec.gaussian_well(1.0, 0.5, 1, 0.75, 1.0)
    gaps = [abs(potential_expectation(CoherentParams(1, 0.75, h, k=(1.0,), y=(0.2,)), well, "diagnostic").gap)
            for h in (0.5, 0.1, 0.02)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.05
    with pytest.raises(DomainError):
        potential_expectation(CoherentParams(1, 0.75, 0.1), well, "other")


@pytest.mark.parametrize("s", [0.75, 1.0])
def test_parseval(s):
    c = CoherentParams(1, s, 0.5, k=(0.0,))
    assert parseval_check(c, "gaussian") <= 1e-4
    assert parseval_check(c.replace(k=(1.0,)), "coherent") <= 1e-4


@pytest.mark.parametrize("s,tail", [(0.75, 1e-2), (0.75, 1e-3), (1.0, 1e-2)])
def test_parseval_widening(s, tail):
    c = CoherentParams(1, s, 0.5)
    r = [parseval_check(c, widen=w, tail=tail) for w in (0.5, 1.0, 2.0)]
    assert r[0] > r[1] > r[2]


def test_param_validation():
    for kw in (dict(d=3, s=1, hbar=1), dict(d=1, s=1, hbar=0), dict(d=1, s=1.5, hbar=1),
               dict(d=2, s=1, hbar=1, k=(1.0, 2.0, 3.0))):
        with pytest.raises(DomainError):
            CoherentParams(**kw)
