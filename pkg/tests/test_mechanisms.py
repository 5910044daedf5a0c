import math

import numpy as np
import pytest

from privest.core import DomainError, ParameterError, PrivacyLevel, make_rng
from privest.audit import halfspace_expectation_cube, sphere_halfspace_mean_quadrature
from privest.mechanisms import (
    Channel,
    ChannelKind,
    MomentAssumption,
    _l2_ball_batch,
    _linf_ball_batch,
    cube_halfspace_mean,
    cube_vertices,
    l2_ball_channel,
    l2_bound_B,
    laplace_vector_channel,
    linf_ball_channel,
    linf_bound_B,
    naive_median_channel,
    privatization_count,
    reset_privatization_count,
    sign_rr_channel,
    sphere_halfspace_mean,
    truncated_laplace_mean_channel,
    truncation_level,
)

LN3 = PrivacyLevel(math.log(3.0))
ONE = PrivacyLevel(1.0)


class TestMomentAssumption:
    def test_rejects_low_order(self):
        with pytest.raises(ParameterError):
            MomentAssumption(k=1.0)

    def test_rejects_bad_radius(self):
        with pytest.raises(ParameterError):
            MomentAssumption(k=2.0, radius_k=0.0)

    def test_truncation_examples(self):
        # (n eps^2)^(1/(2k)) = (10^4)^(1/4) = 10
        assert truncation_level(MomentAssumption(k=2.0), 10_000, ONE) == pytest.approx(10.0)
        bounded = MomentAssumption(k=math.inf, radius_k=1.0)
        for n in (1, 10_000):
            assert truncation_level(bounded, n, LN3) == 1.0


class TestBoundFormulas:
    def test_l2_bound_examples(self):
        # Gamma(1) = 1 and Gamma(3/2) = sqrt(pi)/2 collapse the ratio at d = 1
        assert l2_bound_B(1, 1.0, LN3) == pytest.approx(2.0, abs=1e-12)
        assert l2_bound_B(3, 1.0, LN3) == pytest.approx(4.0, abs=1e-12)

    def test_l2_stirling_bound(self):
        for d in range(1, 65):
            assert l2_bound_B(d, 1.0, ONE) <= ONE.phi_eps * 0.75 * math.sqrt(math.pi) * math.sqrt(d)

    def test_linf_bound_examples(self):
        assert linf_bound_B(1, 1.0, LN3) == pytest.approx(2.0, abs=1e-12)
        # d = 2, 3 frozen from the vertex-enumeration oracle: C_2 = 3, C_3 = 2
        assert linf_bound_B(2, 1.0, LN3) == pytest.approx(6.0, abs=1e-12)
        assert linf_bound_B(3, 1.0, LN3) == pytest.approx(4.0, abs=1e-12)

    @pytest.mark.parametrize("d", range(1, 11))
    def test_cube_constant_matches_enumeration(self, d):
        factor = cube_halfspace_mean(d)
        for vertex in cube_vertices(d):
            np.testing.assert_allclose(
                halfspace_expectation_cube(vertex), factor * vertex, atol=1e-12
            )

    @pytest.mark.parametrize("d", range(1, 9))
    def test_sphere_constant_matches_quadrature(self, d):
        assert sphere_halfspace_mean(d) == pytest.approx(
            sphere_halfspace_mean_quadrature(d), abs=1e-8
        )


class TestTruncatedLaplace:
    def test_mean_and_variance(self):
        assumption = MomentAssumption(k=math.inf, radius_k=1.0)
        rng = make_rng(10)
        draws = np.array([
            truncated_laplace_mean_channel(0.0, assumption, 100, ONE, rng) for _ in range(200_000)
        ])
        stderr = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean()) <= 5.0 * stderr
        second = draws**2
        se2 = second.std(ddof=1) / math.sqrt(draws.size)
        assert abs(second.mean() - 8.0) <= 5.0 * se2  # 8 T^2 / eps^2 with T = 1

    def test_analytic_privacy_ratio(self):
        # |clamp(x) - clamp(x')| <= 2T forces the density log ratio below eps
        rng = make_rng(11)
        t_level = truncation_level(MomentAssumption(k=2.0), 1000, ONE)
        kappa = ONE.epsilon / (2.0 * t_level)
        for _ in range(1000):
            x, xp = rng.uniform(-100, 100, size=2)
            z = rng.uniform(-3 * t_level, 3 * t_level)
            log_ratio = kappa * (
                abs(z - np.clip(xp, -t_level, t_level)) - abs(z - np.clip(x, -t_level, t_level))
            )
            assert log_ratio <= ONE.epsilon + 1e-9


class TestL2Ball:
    def test_support_norm_exact(self):
        rng = make_rng(12)
        bound = l2_bound_B(4, 1.0, ONE)
        for _ in range(50):
            z = l2_ball_channel([0.1, -0.2, 0.05, 0.3], 1.0, ONE, rng)
            assert abs(np.linalg.norm(z) - bound) <= 1e-12 * bound

    def test_domain_error(self):
        with pytest.raises(DomainError):
            l2_ball_channel([1.0, 1.0], 1.0, ONE, make_rng(0))

    def test_unbiased_at_interior_point(self):
        x = np.array([0.3, 0.4])
        draws = _l2_ball_batch(np.tile(x, (200_000, 1)), 1.0, ONE, make_rng(13))
        stderr = draws.std(axis=0, ddof=1) / math.sqrt(draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0) - x) <= 5.0 * stderr)

    def test_zero_input_symmetric(self):
        draws = _l2_ball_batch(np.zeros((200_000, 3)), 1.0, ONE, make_rng(14))
        stderr = draws.std(axis=0, ddof=1) / math.sqrt(draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0)) <= 5.0 * stderr)

    def test_single_and_batch_agree_in_law(self):
        x = np.array([0.5, -0.25])
        n = 40_000
        rng = make_rng(15)
        singles = np.array([l2_ball_channel(x, 1.0, ONE, rng) for _ in range(n)])
        batch = _l2_ball_batch(np.tile(x, (n, 1)), 1.0, ONE, make_rng(16))
        gap = singles.mean(axis=0) - batch.mean(axis=0)
        joint_se = np.sqrt(
            singles.var(axis=0, ddof=1) / n + batch.var(axis=0, ddof=1) / n
        )
        assert np.all(np.abs(gap) <= 5.0 * joint_se)


class TestLinfBall:
    def test_support_is_vertex_set(self):
        rng = make_rng(17)
        bound = linf_bound_B(3, 1.0, ONE)
        for _ in range(50):
            z = linf_ball_channel([0.2, -0.9, 0.5], 1.0, ONE, rng)
            assert np.all(np.isin(z, (-bound, bound)))

    def test_domain_error(self):
        with pytest.raises(DomainError):
            linf_ball_channel([1.2, 0.0], 1.0, ONE, make_rng(0))

    def test_batch_reports_offending_record(self):
        data = np.zeros((5, 2))
        data[3, 1] = 2.0
        with pytest.raises(DomainError, match="record 3"):
            _linf_ball_batch(data, 1.0, ONE, make_rng(0))

    def test_zero_mean_high_dimension(self):
        level = PrivacyLevel(0.5)
        draws = _linf_ball_batch(np.zeros((100_000, 27)), 1.0, level, make_rng(18))
        stderr = draws.std(axis=0, ddof=1) / math.sqrt(draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0)) <= 5.0 * stderr)

    def test_single_and_batch_agree_in_law(self):
        x = np.array([0.7, 0.0, -0.4])
        n = 40_000
        rng = make_rng(19)
        singles = np.array([linf_ball_channel(x, 1.0, ONE, rng) for _ in range(n)])
        batch = _linf_ball_batch(np.tile(x, (n, 1)), 1.0, ONE, make_rng(20))
        gap = singles.mean(axis=0) - batch.mean(axis=0)
        joint_se = np.sqrt(singles.var(axis=0, ddof=1) / n + batch.var(axis=0, ddof=1) / n)
        assert np.all(np.abs(gap) <= 5.0 * joint_se)


class TestSignRR:
    def test_exact_outputs_and_expectation(self):
        rng = make_rng(21)
        values = {sign_rr_channel(1.0, LN3, rng) for _ in range(1000)}
        assert values == {LN3.phi_eps, -LN3.phi_eps}
        assert LN3.phi_eps == pytest.approx(2.0, abs=1e-12)

    def test_likelihood_ratio_is_exactly_exp_eps(self):
        assert LN3.pi_eps / (1.0 - LN3.pi_eps) == pytest.approx(LN3.exp_eps, rel=1e-12)

    def test_unbiased_for_minus_one(self):
        rng = make_rng(22)
        draws = np.array([sign_rr_channel(-1.0, ONE, rng) for _ in range(200_000)])
        stderr = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() + 1.0) <= 5.0 * stderr

    def test_rejects_non_sign(self):
        with pytest.raises(DomainError):
            sign_rr_channel(0.5, ONE, make_rng(0))


class TestLaplaceVector:
    def test_l1_mode_variance(self):
        level = PrivacyLevel(0.5)
        rng = make_rng(23)
        draws = np.array([
            laplace_vector_channel(np.zeros(27), 1.0, level, "l1", rng) for _ in range(4000)
        ])
        coords = draws.ravel()
        second = coords**2
        stderr = second.std(ddof=1) / math.sqrt(coords.size)
        assert abs(second.mean() - 5832.0) <= 5.0 * stderr  # 2 (d / eps)^2

    def test_unbiased(self):
        x = np.array([0.2, 0.8, 0.5])
        rng = make_rng(24)
        draws = np.array([
            laplace_vector_channel(x, 1.0, ONE, "l1", rng) for _ in range(100_000)
        ])
        stderr = draws.std(axis=0, ddof=1) / math.sqrt(draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0) - x) <= 5.0 * stderr)

    def test_d1_reduces_to_scalar_laplace(self):
        rng = make_rng(25)
        draws = np.array([
            laplace_vector_channel(np.array([0.5]), 1.0, ONE, "l1", rng)[0]
            for _ in range(200_000)
        ])
        second = (draws - 0.5) ** 2
        stderr = second.std(ddof=1) / math.sqrt(second.size)
        assert abs(second.mean() - 2.0) <= 5.0 * stderr  # Laplace(eps/range), var 2

    def test_l2_mode_domain_check(self):
        with pytest.raises(DomainError):
            laplace_vector_channel(np.array([1.0, 1.0]), 1.0, ONE, "l2_paper", make_rng(0))

    def test_unknown_mode(self):
        with pytest.raises(ParameterError):
            laplace_vector_channel(np.array([0.0]), 1.0, ONE, "l3", make_rng(0))


class TestNaiveMedian:
    def test_mean_and_variance(self):
        rng = make_rng(26)
        draws = np.array([naive_median_channel(0.5, 1.0, ONE, rng) for _ in range(200_000)])
        stderr = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - 0.5) <= 5.0 * stderr
        second = (draws - 0.5) ** 2
        se2 = second.std(ddof=1) / math.sqrt(second.size)
        assert abs(second.mean() - 8.0) <= 5.0 * se2  # 2 / (eps/(2r))^2

    def test_clamps_before_noise(self):
        rng = make_rng(27)
        draws = np.array([naive_median_channel(2.0, 1.0, ONE, rng) for _ in range(200_000)])
        stderr = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - 1.0) <= 5.0 * stderr

    def test_median_preserved(self):
        rng = make_rng(28)
        draws = np.array([naive_median_channel(0.0, 1.0, ONE, rng) for _ in range(1_000_000)])
        iqr = np.subtract(*np.percentile(draws, [75, 25]))
        assert abs(np.median(draws)) <= 5.0 * iqr / math.sqrt(draws.size)


class TestChannelObjects:
    def test_factories_compute_bounds(self):
        assert Channel.l2_ball(3, 1.0, LN3).bound_B == pytest.approx(4.0, abs=1e-12)
        assert Channel.linf_ball(2, 1.0, LN3).bound_B == pytest.approx(6.0, abs=1e-12)
        assert Channel.sign_rr(LN3).bound_B == pytest.approx(2.0, abs=1e-12)
        trunc = Channel.truncated_laplace(MomentAssumption(k=2.0), 10_000, ONE)
        assert trunc.radius == pytest.approx(10.0)

    def test_support_points(self):
        sign = Channel.sign_rr(LN3)
        np.testing.assert_allclose(sign.support_points(), [[-2.0], [2.0]])
        cube = Channel.linf_ball(2, 1.0, LN3)
        assert cube.support_points().shape == (4, 2)
        with pytest.raises(ParameterError):
            Channel.l2_ball(2, 1.0, LN3).support_points()

    def test_privatize_dispatch_shapes(self):
        rng = make_rng(29)
        assert Channel.l2_ball(3, 1.0, ONE).privatize([0.1, 0.0, 0.2], rng).shape == (3,)
        assert Channel.linf_ball(2, 1.0, ONE).privatize([0.1, 0.0], rng).shape == (2,)
        assert isinstance(Channel.sign_rr(ONE).privatize(1.0, rng), float)
        assert Channel.laplace_vector(2, 1.0, ONE).privatize([0.5, 0.5], rng).shape == (2,)
        assert isinstance(Channel.naive_median(1.0, ONE).privatize(0.2, rng), float)
        batch = Channel.linf_ball(2, 1.0, ONE).privatize_batch(np.zeros((7, 2)), rng)
        assert batch.shape == (7, 2)

    def test_discrete_output_flag(self):
        assert ChannelKind.SIGN_RR.discrete_output
        assert ChannelKind.LINF_BALL.discrete_output
        assert not ChannelKind.L2_BALL.discrete_output

    def test_privatization_counter(self):
        reset_privatization_count()
        rng = make_rng(30)
        Channel.linf_ball(2, 1.0, ONE).privatize_batch(np.zeros((25, 2)), rng)
        Channel.sign_rr(ONE).privatize(1.0, rng)
        assert privatization_count() == 26
        reset_privatization_count()
        assert privatization_count() == 0
