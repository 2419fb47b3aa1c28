import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracspec import DomainError
from fracspec.bounds import DomainSpec, asymptotic_sum, weyl_counting_estimate
from fracspec.semiclassical import (
    PhaseSpaceQuery,
    PotentialSpec,
    bound_state_moment_sum,
    classical_free_sum,
    deformed_sphere_volume,
    gamma_one_coefficients,
    jacobian_volume_quadrature,
    load_potential_grid,
    momentum_moment_quadrature,
    phase_space_moment_quadrature,
    phase_space_volume,
    phase_space_volume_mc,
    polya_weyl_scale_factor,
    potential_power_integral,
    radial_moment_integral,
    radial_moment_quadrature,
    save_potential_grid,
    spherical_jacobian,
)
from fracspec.specfun import ball_volume, lieb_thirring_classical_constant

PI = math.pi
SQ = DomainSpec(PI ** 2, 2)
dims = st.integers(1, 6)
orders = st.floats(0.51, 1.0)


def test_phase_volume_examples():
    assert phase_space_volume(PhaseSpaceQuery(SQ, 1, E_max=8)) == pytest.approx(2 * PI, rel=1e-14)


@given(dims, orders, st.floats(0.1, 10), st.floats(1e-3, 1e5))
def test_phase_volume_is_weyl(d, s, vol, E):
    dom = DomainSpec(vol, d)
    assert phase_space_volume(PhaseSpaceQuery(dom, s, E_max=E)) == pytest.approx(
        weyl_counting_estimate(dom, s, E), rel=1e-14)


@pytest.mark.parametrize("d,s", [(1, 0.6), (2, 0.75), (3, 1.0)])
def test_phase_volume_mc(d, s):
    q = PhaseSpaceQuery(DomainSpec(1.5, d), s, E_max=200.0)
    est, err = phase_space_volume_mc(q, samples=10**6, seed=11)
    assert abs(est - phase_space_volume(q)) <= 3 * err
    assert phase_space_volume_mc(q, samples=10**5, seed=4) == phase_space_volume_mc(q, samples=10**5, seed=4)


def test_free_sum_examples():
    assert classical_free_sum(PhaseSpaceQuery(SQ, 1, N=5)) == pytest.approx(50 / PI, rel=1e-14)
    assert classical_free_sum(PhaseSpaceQuery(SQ, 0.7, N=0)) == 0


@given(dims, orders, st.floats(0.1, 10), st.integers(1, 10**6))
def test_free_sum_matches_asymptotic_sum(d, s, vol, N):
    dom = DomainSpec(vol, d)
    assert classical_free_sum(PhaseSpaceQuery(dom, s, N=N)) == pytest.approx(asymptotic_sum(dom, s, N), rel=1e-12)


def test_query_validation():
    with pytest.raises(DomainError):
        PhaseSpaceQuery(SQ, 1)
    with pytest.raises(DomainError):
        PhaseSpaceQuery(SQ, 1, E_max=-1)
    with pytest.raises(DomainError):
        PhaseSpaceQuery(SQ, 1, N=-2)


def test_scale_factor_examples():
    lam, ratio = polya_weyl_scale_factor(2, 1)
    assert lam == pytest.approx(0.5, rel=1e-15) and ratio == pytest.approx(4, rel=1e-14)


@given(dims, orders)
def test_scale_factor_range(d, s):
    lam, ratio = polya_weyl_scale_factor(d, s)
    assert 0 < lam < 1 and ratio > 1
    assert ratio == pytest.approx(lam ** (-2 * s), rel=1e-14)


def test_radial_moment_examples():
    for d in (1, 2, 5):
        assert radial_moment_integral(d, 0.8, 0) == pytest.approx(1 / d, rel=1e-14)
        assert radial_moment_integral(d, 0.8, 1) == pytest.approx(1.6 / (d * (d + 1.6)), rel=1e-13)
    assert abs(radial_moment_integral(2, 0.75, 2.5) - radial_moment_quadrature(2, 0.75, 2.5)) <= 1e-10


@given(dims, orders, st.floats(0, 4))
def test_radial_moment_quadrature(d, s, g):
    assert radial_moment_quadrature(d, s, g) == pytest.approx(radial_moment_integral(d, s, g), rel=1e-10)


def test_box_well_moment_sum():
    p = PotentialSpec.box_well(3.0, [0.5, 1.5], 0.75, 1.0)
    W = 1.0 * 3.0
    ref = lieb_thirring_classical_constant(1.0, 2, 0.75) * 3.0 ** p.exponent * W
    assert bound_state_moment_sum(p) == pytest.approx(ref, rel=1e-12)
    assert phase_space_moment_quadrature(p) == pytest.approx(bound_state_moment_sum(p), rel=1e-8)


def test_gaussian_phase_space_quadrature_d1():
    p = PotentialSpec.gaussian_well(2.0, 0.8, 1, 0.75, 1.0)
    assert abs(bound_state_moment_sum(p) - phase_space_moment_quadrature(p)) <= 1e-6 * bound_state_moment_sum(p)


def test_gamma_zero_counts():
    p = PotentialSpec.gaussian_well(5.0, 1.0, 2, 0.9, 0.0)
    ref = lieb_thirring_classical_constant(0, 2, 0.9) * potential_power_integral(p, 2 / 1.8)
    assert bound_state_moment_sum(p) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("maker", [
    lambda: PotentialSpec.gaussian_well(1.7, 0.6, 2, 0.8, 1.5),
    lambda: PotentialSpec.bump_product(2.0, 1.1, 2, 0.6, 0.5),
    lambda: PotentialSpec.box_well(0.9, [0.3, 0.4, 0.5], 1.0, 2.0),
])
def test_power_integral_quadrature_vs_closed_form(maker):
    p = maker()
    m = p.exponent
    # the quadrature route ignores closed_form
    bare = PotentialSpec(p.d, p.s, p.gamma, p.profile, p.support, "custom")
    assert potential_power_integral(bare) == pytest.approx(p.closed_form(m), rel=1e-8)


@settings(max_examples=20)
@given(st.floats(0.1, 10), st.floats(0.51, 1.0), st.floats(0, 3))
def test_moment_sum_homogeneity(c, s, g):
    p = PotentialSpec.bump_product(1.0, 0.7, 1, s, g)
    assert bound_state_moment_sum(p.scaled(c)) == pytest.approx(c ** p.exponent * bound_state_moment_sum(p), rel=1e-12)


def test_gamma_one_factor_d():
    for d, s in ((1, 1.0), (2, 0.75), (3, 0.6)):
        c = gamma_one_coefficients(d, s)
        assert c.matches == "reduced"
        assert c.quadrature == pytest.approx(c.reduced, rel=1e-9)
        assert c.unreduced / c.reduced == pytest.approx(d, rel=1e-14)
        assert c.reduced == pytest.approx(lieb_thirring_classical_constant(1, d, s), rel=1e-13)


def test_momentum_quadrature_zero_depth():
    assert momentum_moment_quadrature(0.0, 2, 0.7, 1.0) == 0.0


def test_sphere_volume_examples():
    assert deformed_sphere_volume(2, 1, 1) == pytest.approx(PI, rel=1e-14)
    assert deformed_sphere_volume(1, 0.6, 2.5) == pytest.approx(5.0, rel=1e-14)


@given(dims, orders, st.floats(0.1, 5))
def test_sphere_volume_is_ball(d, s, R):
    assert deformed_sphere_volume(d, s, R) == pytest.approx(R ** d * ball_volume(d, s), rel=1e-12)


@pytest.mark.parametrize("d,s", [(2, 0.55), (2, 0.8), (2, 1.0), (3, 0.8)])
def test_jacobian_quadrature(d, s):
    assert jacobian_volume_quadrature(d, s, 1.3) == pytest.approx(deformed_sphere_volume(d, s, 1.3), rel=1e-8)


def test_jacobian_matches_finite_difference():
    s, r, th = 0.7, 0.9, np.array([0.4, 0.9])
    q = 1 / s

    def x(v):
        r_, t1, t2 = v
        return np.array([
            r_ * np.cos(t1) ** q,
            r_ * (np.sin(t1) * np.cos(t2)) ** q,
            r_ * (np.sin(t1) * np.sin(t2)) ** q,
        ])

    v0 = np.array([r, *th])
    h = 1e-6
    J = np.column_stack([(x(v0 + h * e) - x(v0 - h * e)) / (2 * h) for e in np.eye(3)])
    assert abs(np.linalg.det(J)) == pytest.approx(spherical_jacobian(r, th, s), rel=1e-7)


@pytest.mark.parametrize("suffix", [".csv", ".bin"])
def test_grid_roundtrip(tmp_path, suffix):
    rng = np.random.default_rng(3)
    vals = rng.uniform(0, 2, size=(4, 5, 3))
    path = tmp_path / f"well{suffix}"
    save_potential_grid(path, vals, (0.1, 0.2, 0.3), (-1.0, 0.0, 0.5))
    got, spacing, origin = load_potential_grid(path)
    np.testing.assert_array_equal(got, vals)
    assert spacing == (0.1, 0.2, 0.3) and origin == (-1.0, 0.0, 0.5)


def test_grid_well_integral(tmp_path):
    # cell-centred sampling of a box well of depth 2 on [0, 1] x [0, 0.5]
    vals = np.full((10, 5), 2.0)
    save_potential_grid(tmp_path / "w.csv", vals, (0.1, 0.1), (0.05, 0.05))
    g, sp, org = load_potential_grid(tmp_path / "w.csv")
    p = PotentialSpec.from_grid(g, sp, org, 0.75, 1.0)
    assert potential_power_integral(p) == pytest.approx(2.0 ** p.exponent * 0.5, rel=1e-14)
    with pytest.raises(DomainError):
        PotentialSpec.from_grid(-vals, sp, org, 0.75, 1.0)


def test_potential_validation():
    with pytest.raises(DomainError):
        PotentialSpec(2, 0.8, -1.0, lambda x: x[:, 0])
    with pytest.raises(DomainError):
        PotentialSpec(2, 0.8, 1.0)


def test_grid_file_rejects_foreign(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("1,2\n3,4\n")
    with pytest.raises(DomainError):
        load_potential_grid(f)
    g = tmp_path / "x.bin"
    g.write_bytes(b"something else\n" + b"\0" * 16)
    with pytest.raises(DomainError):
        load_potential_grid(g)
