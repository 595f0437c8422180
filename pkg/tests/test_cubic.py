import numpy as np
import pytest

from dhawkes.cubic import (
    alpha_q,
    b_star,
    boundary_band,
    c_bounds,
    cubic_report,
    det_m_alpha_identity_check,
    discriminant,
    k_of_alpha,
    m_alpha,
    p_eval,
    q_eval,
    r_of_alpha,
    real_roots,
    spectral_radius,
)


def test_discriminant_reference_point():
    assert discriminant(2.5, -1.0, -3.0) == pytest.approx(-188.25, abs=1e-9)


def test_discriminant_c_zero_factorization():
    # Disc(a, b, 0) = (a^2 + 4b) * b^2
    assert discriminant(2.0, -1.0, 0.0) == pytest.approx(0.0, abs=1e-12)
    for a, b in [(1.3, -0.7), (-2.0, 0.5), (3.0, -4.0)]:
        assert discriminant(a, b, 0.0) == pytest.approx((a * a + 4 * b) * b * b, rel=1e-12)


def test_discriminant_direct_value():
    assert discriminant(3.0, 0.0, -15.0) == pytest.approx(-4455.0, abs=1e-9)


def test_c_bounds_none_when_always_negative():
    assert c_bounds(0.0, -1.0) is None


def test_c_bounds_symmetric_case():
    cm, cp = c_bounds(0.0, 3.0)
    assert cm == pytest.approx(-2.0, abs=1e-12)
    assert cp == pytest.approx(2.0, abs=1e-12)
    # the discriminant sign really flips at the endpoints
    assert discriminant(0.0, 3.0, -2.001) < 0 < discriminant(0.0, 3.0, -1.999)
    assert discriminant(0.0, 3.0, 1.999) > 0 > discriminant(0.0, 3.0, 2.001)


def test_c_bounds_straddle_zero():
    cm, cp = c_bounds(2.0, 1.0)  # a^2 + 4b = 8 > 0
    assert cm < 0.0 < cp


def test_c_bounds_ordering_random():
    rng = np.random.default_rng(11)
    for _ in range(500):
        a, b = rng.uniform(-5, 5, size=2)
        bounds = c_bounds(a, b)
        if bounds is not None:
            assert bounds[0] <= bounds[1]


def test_real_roots_triple_zero():
    assert real_roots(0.0, 0.0, 0.0) == pytest.approx([0.0, 0.0, 0.0], abs=1e-10)


def test_real_roots_unique_when_disc_negative():
    roots = real_roots(2.5, -1.0, -3.0)
    assert len(roots) == 1
    # the single real root of P is the negated positive root of the mirror cubic
    assert roots[0] == pytest.approx(-alpha_q(2.5, -1.0, -3.0), abs=1e-10)


def test_real_roots_cube():
    assert real_roots(0.0, 0.0, 1.0) == pytest.approx([1.0], abs=1e-12)


def test_real_roots_residuals_random():
    rng = np.random.default_rng(5)
    for _ in range(300):
        a, b, c = rng.uniform(-5, 5, size=3)
        for r in real_roots(a, b, c):
            assert abs(p_eval(a, b, c, r)) < 1e-8 * (1.0 + abs(r) ** 3)


def test_root_count_matches_disc_sign():
    rng = np.random.default_rng(6)
    for _ in range(500):
        a, b, c = rng.uniform(-5, 5, size=3)
        if boundary_band(a, b, c):
            continue
        n = len(real_roots(a, b, c))
        if discriminant(a, b, c) < 0:
            assert n == 1
        else:
            assert n == 3


def test_alpha_q_reference_point():
    aq = alpha_q(2.5, -1.0, -3.0)
    assert 0.80 < aq < 0.82
    assert abs(q_eval(2.5, -1.0, -3.0, aq)) < 1e-10


def test_alpha_q_exact_cube():
    assert alpha_q(0.0, 0.0, -8.0) == pytest.approx(2.0, abs=1e-12)


def test_alpha_q_vanishes_with_c():
    assert alpha_q(1.0, -1.0, -1e-8) < 1e-6


def test_alpha_q_preconditions():
    with pytest.raises(ValueError):
        alpha_q(0.0, 3.0, -1.0)  # Disc > 0
    with pytest.raises(ValueError):
        alpha_q(2.5, -1.0, 3.0)  # c > 0


def test_r_of_alpha_values():
    assert r_of_alpha(0.0, 0.0, 0.0) == 0.0
    assert r_of_alpha(0.0, -1.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    aq = alpha_q(2.5, -1.0, -3.0)
    assert r_of_alpha(2.5, -1.0, aq) > 0.0


def test_k_of_alpha_values():
    assert k_of_alpha(1.5, 2.5, -0.75, 0.0) == -0.75
    assert k_of_alpha(0.0, 0.0, -1.0, 1.0) == pytest.approx(-1.5, abs=1e-15)
    aq = alpha_q(2.5, -1.0, -3.0)
    assert k_of_alpha(2.5, -1.0, -3.0, aq) < 0.0


def test_spectral_radius_examples():
    assert spectral_radius(0.0, 0.0, 0.0) == 0.0
    assert spectral_radius(0.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-10)
    # stable linear recurrence: coefficients sum to 0.9 < 1
    rho = spectral_radius(0.3, 0.3, 0.3)
    assert rho < 1.0
    assert rho == pytest.approx(0.9491145586273801, abs=1e-8)


def test_spectral_radius_matches_companion_oracle():
    rng = np.random.default_rng(12)
    for _ in range(200):
        a, b, c = rng.uniform(-4, 4, size=3)
        oracle = max(abs(np.roots([1.0, -a, -b, -c])))
        assert spectral_radius(a, b, c) == pytest.approx(oracle, abs=1e-8)


def test_b_star_branches():
    assert b_star(-3.0) == 1.0
    assert b_star(1.0) == 0.0
    assert b_star(2.0) == -1.0
    assert b_star(1.9999999) == pytest.approx(b_star(2.0), abs=1e-6)
    assert b_star(4.0) == -4.0


def test_det_identity_at_origin():
    assert det_m_alpha_identity_check(0.0, 0.0, 0.0, 0.0) == 0.0


def test_det_identity_random():
    rng = np.random.default_rng(13)
    for _ in range(500):
        a, b, c, alpha = rng.uniform(-2, 2, size=4)
        q = q_eval(a, b, c, alpha)
        assert det_m_alpha_identity_check(a, b, c, alpha) < 1e-8 * (1.0 + q * q)


def test_det_vanishes_at_alpha_q():
    for a, b, c in [(2.5, -1.0, -3.0), (3.0, -2.0, -10.0), (0.5, -0.5, -0.25)]:
        aq = alpha_q(a, b, c)
        det = float(np.linalg.det(m_alpha(a, b, c, aq)))
        assert abs(det) < 1e-8


def test_mirror_identity_random():
    rng = np.random.default_rng(14)
    for _ in range(300):
        a, b, c, x = rng.uniform(-5, 5, size=4)
        assert q_eval(a, b, c, x) == pytest.approx(-p_eval(a, b, c, -x), abs=1e-12 * (1 + abs(x) ** 3))


def test_sign_partition_small_sample():
    rng = np.random.default_rng(15)
    checked = 0
    while checked < 2000:
        a, b, c = rng.uniform(-5, 5, size=3)
        if a * a + 3 * b < 0 or boundary_band(a, b, c):
            continue
        cm, cp = c_bounds(a, b)
        outside = c < cm or c > cp
        assert (discriminant(a, b, c) < 0) == outside
        checked += 1


def test_cubic_report_fields():
    rep = cubic_report(2.5, -1.0, -3.0)
    assert rep.disc == pytest.approx(-188.25, abs=1e-9)
    assert rep.alpha_q is not None and rep.r_at_alpha_q > 0 > rep.k_at_alpha_q
    assert len(rep.real_roots) == 1
    rep2 = cubic_report(0.0, 3.0, 0.5)  # Disc > 0
    assert rep2.alpha_q is None
    assert len(rep2.real_roots) == 3
