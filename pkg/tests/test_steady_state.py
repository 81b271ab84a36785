import numpy as np
import pytest

from epiclosures import (
    BelowThresholdWarning,
    IntegratorConfig,
    ModelKind,
    MomentClosure,
    ParameterError,
    build_report,
    default_k0,
    initial_state,
    integrate_to_steady,
    quasi_stationary_distribution,
    raw_moment,
    rhs_mean_field,
    rhs_moment,
    rhs_pairwise_triple,
    ss_binomial,
    ss_exact,
    ss_pair,
    ss_triple,
)

BETA, GAMMA = 5.0, 2.0

# Reference values: scaled errors 1000*|approx - exact| for beta=5, gamma=2.
REFERENCE_SCALED_ERRORS = {
    100: (6.9486, 1.2355, 0.1689),
    200: (3.4008, 0.5729, 0.0395),
    400: (1.6832, 0.2763, 0.0096),
    800: (0.8374, 0.1357, 0.0024),
}


class TestPairFormula:
    def test_endemic_values(self):
        assert ss_pair(5.0, 2.0) == pytest.approx(0.6)
        assert ss_pair(4.0, 1.0) == pytest.approx(0.75)

    def test_threshold(self):
        with pytest.warns(BelowThresholdWarning):
            assert ss_pair(2.0, 2.0) == 0.0


class TestTripleFormula:
    def test_hand_value(self):
        assert ss_triple(BETA, GAMMA, 200) == pytest.approx(117410.0 / 196610.0,
                                                            rel=1e-14)

    def test_large_n_limit(self):
        assert ss_triple(BETA, GAMMA, 10**8) == pytest.approx(0.6, abs=1e-6)

    def test_numerator_root(self):
        # (N-2) beta = N gamma at N=10, beta=5, gamma=4
        with pytest.warns(BelowThresholdWarning):
            assert ss_triple(5.0, 4.0, 10) == 0.0


class TestBinomialFormula:
    def test_hand_value(self):
        assert ss_binomial(BETA, GAMMA, 200) == pytest.approx(71.0 / 119.0, rel=1e-14)

    def test_large_n_limit(self):
        assert ss_binomial(BETA, GAMMA, 10**8) == pytest.approx(0.6, abs=1e-6)

    def test_numerator_root(self):
        # N q^2 = 1 at q = 0.5, N = 4
        with pytest.warns(BelowThresholdWarning):
            assert ss_binomial(2.0, 1.0, 4) == 0.0


class TestExactFormula:
    def test_two_state_hand_value(self):
        # A_1 = beta/(4 gamma) = 1, so prevalence (1 + 2)/(2 (1 + 1)) = 3/4
        assert ss_exact(4.0, 1.0, 2) == pytest.approx(0.75, rel=1e-14)

    def test_matches_quasi_stationary_mean(self):
        for N in (20, 150):
            qsd = quasi_stationary_distribution(BETA, GAMMA, N)
            assert qsd.p[0] == 0.0
            mean = raw_moment(qsd, 1) / N
            assert mean == pytest.approx(ss_exact(BETA, GAMMA, N), abs=1e-12)

    def test_large_n_stability(self):
        # The raw detailed-balance weights overflow doubles far below this
        # size; the log-space evaluation must stay finite and ordered.
        value = ss_exact(BETA, GAMMA, 10_000)
        assert 0.59 < value < 0.6

    def test_below_threshold(self):
        with pytest.warns(BelowThresholdWarning):
            assert ss_exact(1.0, 2.0, 50) == 0.0

    def test_rejects_bad_input(self):
        with pytest.raises(ParameterError):
            ss_exact(5.0, -2.0, 50)
        with pytest.raises(ParameterError):
            ss_exact(5.0, 2.0, 1)


class TestReports:
    @pytest.mark.parametrize("N", [100, 800])
    def test_reference_scaled_errors(self, N):
        report = build_report(BETA, GAMMA, N)
        for got, want in zip(report.scaled_errors, REFERENCE_SCALED_ERRORS[N]):
            assert got == pytest.approx(want, abs=5.1e-5)

    def test_below_threshold_report(self):
        with pytest.warns(BelowThresholdWarning):
            report = build_report(1.0, 2.0, 100)
        assert (report.exact, report.pair, report.triple, report.binomial) == (
            0.0, 0.0, 0.0, 0.0)
        assert report.scaled_errors == (0.0, 0.0, 0.0)

    def test_errors_are_recomputed(self):
        report = build_report(BETA, GAMMA, 100)
        assert report.err_pair == abs(report.pair - report.exact)
        assert report.err_triple == abs(report.triple - report.exact)
        assert report.err_binomial == abs(report.binomial - report.exact)

    def test_halving_law(self):
        reports = {N: build_report(BETA, GAMMA, N) for N in (100, 200, 400, 800)}
        for N in (100, 200, 400):
            ratio_pair = reports[2 * N].err_pair / reports[N].err_pair
            ratio_triple = reports[2 * N].err_triple / reports[N].err_triple
            ratio_binomial = reports[2 * N].err_binomial / reports[N].err_binomial
            assert 0.45 <= ratio_pair <= 0.55
            assert 0.45 <= ratio_triple <= 0.55
            assert 0.2 <= ratio_binomial <= 0.3


class TestLimitingPairClosure:
    def test_error_is_first_order_like_the_classic_pair_closure(self):
        # One-moment model closed with the size-pinned binomial second
        # moment.  Its fixed point lands at (N q - 1)/(N - 1); measured
        # against the exact reference it decays at the same 1/N order as
        # the classic pair closure, with a similar magnitude.
        from epiclosures import limiting_pair_second_moment

        errors = {}
        for N in (100, 200, 400):
            def rhs(y, n=N):
                m1 = y[0]
                return np.array([
                    (BETA - GAMMA) * m1 - BETA * limiting_pair_second_moment(m1, n)])

            result = integrate_to_steady(
                rhs, np.array([default_k0(N) / N]),
                config=IntegratorConfig(rel_tol=1e-12, abs_tol=1e-12),
                plateau_tol=1e-11, t_max=2000.0)
            assert result.converged
            q = 1.0 - GAMMA / BETA
            assert result.state[0] == pytest.approx((N * q - 1.0) / (N - 1.0),
                                                    abs=1e-9)
            errors[N] = abs(result.state[0] - ss_exact(BETA, GAMMA, N))
        for N in (100, 200):
            assert 0.4 <= errors[2 * N] / errors[N] <= 0.6
        classic_pair_error = abs(ss_pair(BETA, GAMMA) - ss_exact(BETA, GAMMA, 100))
        assert 0.1 <= errors[100] / classic_pair_error <= 10.0


class TestFixedPointAgreement:
    @pytest.mark.parametrize("N", [100, 400])
    def test_dynamics_land_on_formulas(self, N):
        config = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-12)
        cases = [
            (rhs_mean_field(BETA, GAMMA, N),
             initial_state(ModelKind.MEAN_FIELD_PAIR, N, default_k0(N)),
             lambda s: s[0] / N, ss_pair(BETA, GAMMA)),
            (rhs_pairwise_triple(BETA, GAMMA, N),
             initial_state(ModelKind.PAIRWISE_TRIPLE, N, default_k0(N)),
             lambda s: s[0] / N, ss_triple(BETA, GAMMA, N)),
            (rhs_moment(BETA, GAMMA, N, MomentClosure.BINOMIAL),
             initial_state(ModelKind.MOMENT_BINOMIAL, N, default_k0(N)),
             lambda s: s[0], ss_binomial(BETA, GAMMA, N)),
        ]
        for rhs, y0, read, expected in cases:
            result = integrate_to_steady(rhs, y0, config=config,
                                         plateau_tol=1e-10, t_max=2000.0)
            assert result.converged
            assert read(result.state) == pytest.approx(expected, abs=1e-7)
