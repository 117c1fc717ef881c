import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import kendalltau

from trivine.errors import DomainError, InvalidParams, OutOfRange, Unsupported
from trivine.families import (
    BivariateCopula,
    Family,
    canonicalize,
    family_metadata,
    params_from_tau,
)
from trivine.quadrature import gauss_legendre_unit_clustered

from conftest import FAMILY_SETTINGS, setting_id


# ---------------------------------------------------------------------------
# construction, validation, serialization


def test_parameter_space_rejects_out_of_range():
    with pytest.raises(InvalidParams):
        BivariateCopula(Family.CLAYTON, 0, (-1.0,))
    with pytest.raises(InvalidParams):
        BivariateCopula(Family.GAUSSIAN, 0, (1.2,))
    with pytest.raises(InvalidParams):
        BivariateCopula(Family.FRANK, 0, (0.0,))
    with pytest.raises(InvalidParams):
        BivariateCopula(Family.BB8, 0, (2.0, 1.5))
    with pytest.raises(InvalidParams):
        BivariateCopula(Family.TAWN1, 0, (0.9, 0.5))
    with pytest.raises(InvalidParams):
        BivariateCopula(Family.GAUSSIAN, 45, (0.5,))


def test_negative_shorthand_canonicalizes():
    # joe at 270 written with a negative parameter keeps its quarter turn
    fam, rot, par = canonicalize(Family.JOE, 270, (-2.0,))
    assert (fam, rot, par) == (Family.JOE, 270, (2.0,))
    # an unrotated one-sided family with a negative parameter turns by 90
    fam, rot, par = canonicalize(Family.CLAYTON, 0, (-2.0,))
    assert (fam, rot, par) == (Family.CLAYTON, 90, (2.0,))
    # survival shorthand flips to 270
    fam, rot, par = canonicalize(Family.GUMBEL, 180, (-3.5,))
    assert (fam, rot, par) == (Family.GUMBEL, 270, (3.5,))
    # sign-flexible families keep negative parameters
    fam, rot, par = canonicalize(Family.GAUSSIAN, 0, (-0.7,))
    assert (fam, rot, par) == (Family.GAUSSIAN, 0, (-0.7,))


def test_json_round_trip_canonicalizes():
    cop = BivariateCopula.from_json({"family": "joe", "rotation": 270, "params": [-2.0]})
    assert cop == BivariateCopula(Family.JOE, 270, (2.0,))
    assert cop.to_json() == {"family": "joe", "rotation": 270, "params": [2.0]}
    for cop in FAMILY_SETTINGS:
        assert BivariateCopula.from_json(cop.to_json()) == cop


def test_family_metadata_covers_all_families():
    meta = family_metadata()
    assert len(meta) == 13
    byname = {m["family"]: m for m in meta}
    assert byname["student_t"]["n_params"] == 2
    assert byname["independence"]["n_params"] == 0


# ---------------------------------------------------------------------------
# pdf examples


def test_pdf_independence_is_one():
    cop = BivariateCopula(Family.INDEPENDENCE)
    assert cop.pdf(0.3, 0.7) == pytest.approx(1.0)


def test_pdf_gaussian_zero_rho_is_one():
    cop = BivariateCopula(Family.GAUSSIAN, 0, (0.0,))
    assert cop.pdf(0.5, 0.5) == pytest.approx(1.0)


def test_pdf_clayton_matches_cdf_mixed_derivative():
    # central finite differences of the closed-form CDF with step 1e-4
    th = 2.0
    cop = BivariateCopula(Family.CLAYTON, 0, (th,))
    u, v, h = 0.2, 0.3, 1e-4

    def cdf(a, b):
        return (a ** -th + b ** -th - 1.0) ** (-1.0 / th)

    fd = (cdf(u + h, v + h) - cdf(u + h, v - h) - cdf(u - h, v + h) + cdf(u - h, v - h)) / (
        4.0 * h * h
    )
    assert cop.pdf(u, v) == pytest.approx(fd, abs=1e-5)


def test_pdf_domain_error():
    cop = BivariateCopula(Family.GAUSSIAN, 0, (0.5,))
    with pytest.raises(DomainError):
        cop.pdf(-0.1, 0.5)
    with pytest.raises(DomainError):
        cop.pdf(0.5, 1.3)


# ---------------------------------------------------------------------------
# cdf examples


@pytest.mark.parametrize("cop", FAMILY_SETTINGS, ids=setting_id)
def test_cdf_uniform_margins(cop):
    for u in (0.0, 0.25, 1.0):
        assert cop.cdf(u, 1.0) == pytest.approx(u, abs=1e-9)
        assert cop.cdf(1.0, u) == pytest.approx(u, abs=1e-9)
        assert cop.cdf(u, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert cop.cdf(0.0, u) == pytest.approx(0.0, abs=1e-12)


def test_cdf_gaussian_zero_rho_is_product():
    cop = BivariateCopula(Family.GAUSSIAN, 0, (0.0,))
    assert cop.cdf(0.4, 0.5) == pytest.approx(0.20, abs=1e-12)


def test_cdf_gumbel_at_median():
    cop = BivariateCopula(Family.GUMBEL, 0, (2.0,))
    expected = math.exp(-math.sqrt(2.0 * math.log(2.0) ** 2))
    assert cop.cdf(0.5, 0.5) == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------------------
# h-functions


def test_hfunc2_independence():
    cop = BivariateCopula(Family.INDEPENDENCE)
    assert cop.hfunc2(0.3, 0.9) == pytest.approx(0.3)


def test_hfunc2_gaussian_median_symmetry():
    cop = BivariateCopula(Family.GAUSSIAN, 0, (0.6,))
    assert cop.hfunc2(0.5, 0.5) == pytest.approx(0.5, abs=1e-12)


def test_hfunc2_frank_matches_numeric_derivative():
    cop = BivariateCopula(Family.FRANK, 0, (7.0,))
    u, v, h = 0.3, 0.6, 1e-5
    fd = (cop.cdf(u, v + h) - cop.cdf(u, v - h)) / (2.0 * h)
    assert cop.hfunc2(u, v) == pytest.approx(fd, abs=1e-6)


def test_hfunc1_independence():
    cop = BivariateCopula(Family.INDEPENDENCE)
    assert cop.hfunc1(0.7, 0.2) == pytest.approx(0.2)


def test_hfunc1_exchangeable_identity():
    cop = BivariateCopula(Family.CLAYTON, 0, (2.0,))
    assert cop.hfunc1(0.2, 0.7) == pytest.approx(cop.hfunc2(0.7, 0.2), rel=1e-12)


def test_hfunc1_tawn_matches_numeric_derivative_and_is_asymmetric():
    cop = BivariateCopula(Family.TAWN1, 0, (3.0, 0.3))
    u, v, h = 0.4, 0.6, 1e-5
    fd = (cop.cdf(u + h, v) - cop.cdf(u - h, v)) / (2.0 * h)
    assert cop.hfunc1(u, v) == pytest.approx(fd, abs=1e-6)
    assert abs(cop.hfunc1(u, v) - cop.hfunc2(v, u)) > 1e-3


# ---------------------------------------------------------------------------
# inverse h-functions


def test_hinv2_independence():
    cop = BivariateCopula(Family.INDEPENDENCE)
    assert cop.hinv2(0.42, 0.9) == pytest.approx(0.42)


def test_hinv2_gaussian_round_trip():
    cop = BivariateCopula(Family.GAUSSIAN, 0, (0.5,))
    assert cop.hinv2(cop.hfunc2(0.3, 0.8), 0.8) == pytest.approx(0.3, abs=1e-8)


def test_hinv2_clayton_against_bisection_oracle():
    cop = BivariateCopula(Family.CLAYTON, 0, (2.0,))
    p, v = 0.5, 0.5
    lo, hi = 1e-12, 1 - 1e-12
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if cop.hfunc2(mid, v) < p:
            lo = mid
        else:
            hi = mid
    assert cop.hinv2(p, v) == pytest.approx(0.5 * (lo + hi), abs=1e-8)


# ---------------------------------------------------------------------------
# Kendall's tau


@pytest.mark.parametrize(
    "cop,expected",
    [
        (BivariateCopula(Family.GAUSSIAN, 0, (0.6,)), 0.41),
        (BivariateCopula(Family.CLAYTON, 0, (2.0,)), 0.50),
        (BivariateCopula(Family.FRANK, 0, (7.0,)), 0.56),
        (BivariateCopula(Family.GUMBEL, 0, (2.0,)), 0.50),
        (BivariateCopula(Family.JOE, 270, (2.0,)), -0.36),
        (BivariateCopula(Family.BB1, 0, (2.0, 1.5)), 0.67),
        (BivariateCopula(Family.TAWN1, 0, (3.0, 0.3)), 0.25),
    ],
)
def test_tau_reference_values(cop, expected):
    assert cop.tau() == pytest.approx(expected, abs=0.005)


def test_tau_closed_form_cross_checks():
    # numeric quadrature against exact identities
    assert BivariateCopula(Family.BB1, 0, (2.0, 1.5)).tau() == pytest.approx(
        1.0 - 2.0 / (1.5 * 4.0), abs=2e-4
    )
    assert BivariateCopula(Family.JOE, 0, (2.0,)).tau() == pytest.approx(
        2.0 - math.pi**2 / 6.0, abs=2e-4
    )
    g = 0.8
    amh_exact = 1.0 - 2.0 * (g + (1 - g) ** 2 * math.log(1 - g)) / (3.0 * g * g)
    assert BivariateCopula(Family.AMH, 0, (g,)).tau() == pytest.approx(amh_exact, abs=1e-6)


def test_tau_rotation_signs():
    base = BivariateCopula(Family.GUMBEL, 0, (3.5,))
    assert BivariateCopula(Family.GUMBEL, 90, (3.5,)).tau() == pytest.approx(-base.tau())
    assert BivariateCopula(Family.GUMBEL, 180, (3.5,)).tau() == pytest.approx(base.tau())
    assert BivariateCopula(Family.GUMBEL, 270, (3.5,)).tau() == pytest.approx(-base.tau())


# ---------------------------------------------------------------------------
# params_from_tau


def test_params_from_tau_examples():
    assert params_from_tau(Family.CLAYTON, 0.5) == pytest.approx((2.0,))
    assert params_from_tau(Family.GAUSSIAN, 0.0) == pytest.approx((0.0,))
    (theta,) = params_from_tau(Family.FRANK, 0.56)
    assert theta == pytest.approx(6.949, abs=0.01)
    assert BivariateCopula(Family.FRANK, 0, (theta,)).tau() == pytest.approx(0.56, abs=1e-6)


def test_params_from_tau_round_trip():
    for fam, tau in [
        (Family.GAUSSIAN, -0.35),
        (Family.CLAYTON, 0.62),
        (Family.GUMBEL, 0.44),
        (Family.FRANK, -0.3),
        (Family.JOE, 0.41),
        (Family.AMH, 0.2),
    ]:
        params = params_from_tau(fam, tau)
        assert BivariateCopula(fam, 0, params).tau() == pytest.approx(tau, abs=1e-6)


def test_params_from_tau_errors():
    with pytest.raises(Unsupported):
        params_from_tau(Family.STUDENT_T, 0.3)
    with pytest.raises(Unsupported):
        params_from_tau(Family.BB1, 0.3)
    with pytest.raises(OutOfRange):
        params_from_tau(Family.CLAYTON, -0.4)
    with pytest.raises(OutOfRange):
        params_from_tau(Family.AMH, 0.5)


# ---------------------------------------------------------------------------
# property suites


@pytest.mark.parametrize("cop", FAMILY_SETTINGS, ids=setting_id)
def test_density_normalizes(cop):
    # clustered tensor quadrature, then once more at double resolution
    coarse = fine = None
    for n, store in ((96, "coarse"), (192, "fine")):
        x, w = gauss_legendre_unit_clustered(n)
        W = w[:, None] * w[None, :]
        val = float(np.sum(W * cop.pdf(x[:, None], x[None, :])))
        if store == "coarse":
            coarse = val
        else:
            fine = val
    assert fine == pytest.approx(1.0, abs=1e-3)
    assert abs(fine - coarse) < 1e-3


@pytest.mark.parametrize("cop", FAMILY_SETTINGS, ids=setting_id)
def test_hfunc_matches_cdf_derivative(cop, interior_points):
    u, v = interior_points[:, 0], interior_points[:, 1]
    h = 1e-4
    fd2 = (cop.cdf(u, v + h) - cop.cdf(u, v - h)) / (2.0 * h)
    assert np.max(np.abs(fd2 - cop.hfunc2(u, v))) < 1e-5
    fd1 = (cop.cdf(u + h, v) - cop.cdf(u - h, v)) / (2.0 * h)
    assert np.max(np.abs(fd1 - cop.hfunc1(u, v))) < 1e-5


def test_rotation_closure_exact():
    # four quarter turns land on the original rotation tag, so the density
    # follows the identical floating-point path
    rng = np.random.default_rng(5)
    pts = rng.uniform(0.01, 0.99, size=(50, 2))
    for cop in FAMILY_SETTINGS:
        rot = cop.rotation
        for _ in range(4):
            rot = (rot + 90) % 360
        four = BivariateCopula(cop.family, rot, cop.params)
        assert np.array_equal(four.pdf(pts[:, 0], pts[:, 1]), cop.pdf(pts[:, 0], pts[:, 1]))


def test_rotation_composition_matches_180():
    # two quarter turns equal the survival copula numerically
    cop0 = BivariateCopula(Family.CLAYTON, 0, (2.0,))
    cop180 = BivariateCopula(Family.CLAYTON, 180, (2.0,))
    rng = np.random.default_rng(6)
    u, v = rng.uniform(0.05, 0.95, size=(2, 200))
    # rotating the 90-degree copula by another 90 degrees: c180(u,v) = c90(1-v, u)
    c90 = BivariateCopula(Family.CLAYTON, 90, (2.0,))
    np.testing.assert_allclose(c90.pdf(1.0 - v, u), cop180.pdf(u, v), rtol=1e-12)
    np.testing.assert_allclose(cop0.pdf(1.0 - u, 1.0 - v), cop180.pdf(u, v), rtol=1e-12)


@pytest.mark.parametrize("cop", FAMILY_SETTINGS, ids=setting_id)
def test_hinv_round_trips(cop, interior_points):
    u = 0.01 + 0.98 * interior_points[:, 0]
    v = 0.01 + 0.98 * interior_points[:, 1]
    assert np.max(np.abs(cop.hinv2(cop.hfunc2(u, v), v) - u)) < 1e-8
    assert np.max(np.abs(cop.hinv1(cop.hfunc1(u, v), u) - v)) < 1e-8


@pytest.mark.parametrize("cop", FAMILY_SETTINGS, ids=setting_id)
def test_frechet_bounds(cop, interior_points):
    u, v = interior_points[:, 0], interior_points[:, 1]
    c = cop.cdf(u, v)
    assert np.all(c >= np.maximum(u + v - 1.0, 0.0) - 1e-9)
    assert np.all(c <= np.minimum(u, v) + 1e-9)


@pytest.mark.parametrize("cop", FAMILY_SETTINGS, ids=setting_id)
def test_tau_against_simulated_sample(cop):
    pairs = cop.simulate(50_000, seed=17)
    sample_tau = kendalltau(pairs[:, 0], pairs[:, 1]).statistic
    assert cop.tau() == pytest.approx(sample_tau, abs=0.01)


@given(
    u=st.floats(0.01, 0.99),
    v=st.floats(0.01, 0.99),
    rho=st.floats(-0.75, 0.75),
)
@settings(max_examples=200, deadline=None)
def test_gaussian_h_round_trip_property(u, v, rho):
    # |rho| beyond ~0.8 saturates the conditional CDF at the box corners, and
    # a float64 p cannot carry enough information for 1e-8 u-recovery there
    cop = BivariateCopula(Family.GAUSSIAN, 0, (rho,))
    assert cop.hinv2(cop.hfunc2(u, v), v) == pytest.approx(u, abs=1e-8)


@given(
    u=st.floats(0.01, 0.99),
    v=st.floats(0.01, 0.99),
    theta=st.floats(1.05, 12.0),
)
@settings(max_examples=100, deadline=None)
def test_gumbel_hfunc_monotone_property(u, v, theta):
    cop = BivariateCopula(Family.GUMBEL, 0, (theta,))
    h = cop.hfunc2(np.array([u, min(u + 0.01, 0.995)]), np.array([v, v]))
    assert h[1] >= h[0] - 1e-12
