import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from crnsim.bounds import (
    DecayBoundParams,
    PoissonBoundParams,
    ReflectingBoundParams,
    WalkBoundParams,
    clopper_pearson_upper,
    compute_theorem_constants,
    log_bound_decay,
    log_bound_poisson,
    log_bound_reflecting,
    log_bound_walk,
    monte_carlo_validate,
)
from crnsim.errors import DomainError, HypothesisViolationError
from crnsim.harness import chain_crn
from crnsim.model import parse_crn

from conftest import random_config, random_crn


class TestDecayBound:
    def test_worked_value(self):
        # (delta*N - 1) * log2(2*delta*e^(lam*t)) at N=100, lam=t=1, delta=0.1
        assert log_bound_decay(100, 1.0, 1.0, 0.1) == pytest.approx(
            9 * math.log2(0.2 * math.e), rel=1e-12
        )
        assert log_bound_decay(100, 1.0, 1.0, 0.1) == pytest.approx(-7.9130974859, rel=1e-9)

    def test_vacuous_when_base_exceeds_one(self):
        assert log_bound_decay(100, 1.0, 1.0, 0.5) > 0

    def test_strictly_decreasing_in_n(self):
        vals = [log_bound_decay(n, 1.0, 1.0, 0.1) for n in (50, 100, 200, 400)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            log_bound_decay(0, 1.0, 1.0, 0.1)
        with pytest.raises(DomainError):
            log_bound_decay(10, 1.0, 1.0, 1.0)


class TestPoissonBound:
    def test_worked_value_upper(self):
        # e^(-10) * (e/2)^20 in log2
        expect = (-10 + 20 * (1 - math.log(2.0))) / math.log(2.0)
        assert log_bound_poisson(10.0, 20.0, "upper") == pytest.approx(expect, rel=1e-12)
        assert log_bound_poisson(10.0, 20.0, "upper") == pytest.approx(-5.5730495911, rel=1e-9)

    def test_degenerates_at_the_mean(self):
        for eps in (1e-3, 1e-6):
            assert abs(log_bound_poisson(10.0, 10.0 * (1 + eps), "upper")) < 1e-3
            assert abs(log_bound_poisson(10.0, 10.0 * (1 - eps), "lower")) < 1e-3

    def test_gamma_form_identity(self):
        # e^(-lam) (e lam/n)^n with n = gamma*lam equals (e^(1-1/gamma)/gamma)^(gamma*lam)
        rng = np.random.default_rng(5)
        for _ in range(50):
            lam = float(rng.uniform(0.5, 50.0))
            gamma = float(rng.uniform(1.05, 4.0))
            direct = log_bound_poisson(lam, gamma * lam, "upper")
            gamma_form = gamma * lam * math.log2(math.exp(1 - 1 / gamma) / gamma)
            assert direct == pytest.approx(gamma_form, rel=1e-12, abs=1e-12)
            gamma = float(rng.uniform(0.2, 0.95))
            direct = log_bound_poisson(lam, gamma * lam, "lower")
            gamma_form = gamma * lam * math.log2(math.exp(1 - 1 / gamma) / gamma)
            assert direct == pytest.approx(gamma_form, rel=1e-12, abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_bound_poisson(10.0, 5.0, "upper")
        with pytest.raises(DomainError):
            log_bound_poisson(10.0, 15.0, "lower")
        with pytest.raises(DomainError):
            log_bound_poisson(10.0, 15.0, "sideways")


class TestWalkBound:
    def test_worked_values(self):
        assert log_bound_walk(2.0, 1.0, 8.0, 1.0) == pytest.approx(
            1 - 0.5 * math.log2(math.e), rel=1e-12
        )
        assert log_bound_walk(100.0, 25.0, 1.0, 2.0 / 3.0) == pytest.approx(
            -3.5084220028, rel=1e-9
        )

    def test_linear_in_t(self):
        base = log_bound_walk(10.0, 5.0, 1.0, 0.5)
        scaled = log_bound_walk(10.0, 5.0, 4.0, 0.5)
        assert scaled - 1 == pytest.approx(4 * (base - 1), rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_bound_walk(1.0, 2.0, 1.0, 0.5)


class TestReflectingBound:
    def test_worked_value(self):
        assert log_bound_reflecting(0.22, 1.0, 0.05, 1000) == -9.0

    def test_vacuous_at_small_scale(self):
        assert log_bound_reflecting(0.22, 1.0, 0.05, 100) == 0.0

    def test_hypothesis_violations_are_named(self):
        with pytest.raises(HypothesisViolationError, match="lambda_r"):
            log_bound_reflecting(0.22, 0.5, 0.05, 1000)
        with pytest.raises(HypothesisViolationError, match="delta_r"):
            log_bound_reflecting(0.22, 1.0, 0.06, 1000)
        with pytest.raises(HypothesisViolationError, match="6/delta_f"):
            log_bound_reflecting(0.22, 1.0, 0.05, 20)


class TestPrecision:
    def test_evaluators_stable_at_higher_precision(self):
        # recompute with 80-bit mantissas; float64 results agree to 1e-9
        mpmath = pytest.importorskip("mpmath")
        mp = mpmath.mp
        mp.prec = 80
        rng = np.random.default_rng(11)
        for _ in range(50):
            N = int(rng.integers(10, 5000))
            lam = float(rng.uniform(0.1, 3.0))
            t = float(rng.uniform(0.1, 3.0))
            delta = float(rng.uniform(0.01, 0.45))
            got = log_bound_decay(N, lam, t, delta)
            hp = float(
                (mpmath.mpf(delta) * N - 1)
                * mpmath.log(2 * mpmath.mpf(delta) * mpmath.e ** (mpmath.mpf(lam) * t), 2)
            )
            assert got == pytest.approx(hp, rel=1e-9, abs=1e-9)

            gamma = float(rng.uniform(1.1, 5.0))
            got = log_bound_poisson(lam * 10, gamma * lam * 10, "upper")
            lam_mp = mpmath.mpf(lam) * 10
            n_mp = gamma * lam_mp
            hp = float(mpmath.log(mpmath.e ** (-lam_mp) * (mpmath.e * lam_mp / n_mp) ** n_mp, 2))
            assert got == pytest.approx(hp, rel=1e-9, abs=1e-9)

            f = float(rng.uniform(2.0, 100.0))
            r = f * float(rng.uniform(0.1, 0.9))
            eps = float(rng.uniform(0.1, 1.5))
            got = log_bound_walk(f, r, t, eps)
            hp = float(
                1
                - mpmath.log(mpmath.e, 2)
                * (mpmath.mpf(eps) ** 2 * (mpmath.mpf(f) - r) ** 2 * t / (8 * mpmath.mpf(f)))
            )
            assert got == pytest.approx(hp, rel=1e-9, abs=1e-9)


class TestTheoremConstants:
    def test_chain_worst_case(self):
        crn = chain_crn(3)
        init = crn.config({"X1": 1000})
        tc = compute_theorem_constants(crn, init, alpha=1.0, c_hat=1.0)
        # 2m = 6 unit-rate reactions
        assert tc.K_hat == 6.0
        assert tc.k_hat == 1.0
        assert tc.c_hat == 1.0
        assert tc.lam == 6.0
        assert tc.m == 3 == crn.n_species - 1
        assert tc.t == 4.0
        assert tc.log2_c == pytest.approx(2 + 24 * math.log2(math.e), rel=1e-12)
        assert len(tc.log2_delta) == 4
        assert tc.log2_delta[0] == pytest.approx(-tc.log2_c, rel=1e-12)  # alpha = 1

    def test_m_zero_network(self):
        crn, _ = parse_crn("X -> 0 ; k=2\n")
        tc = compute_theorem_constants(crn, crn.config({"X": 5}), alpha=1.0, c_hat=1.0)
        assert tc.m == 0
        assert tc.t == 1.0
        assert len(tc.log2_delta) == 1

    def test_c_hat_adjusted_up_for_small_rates(self):
        crn, _ = parse_crn("X -> Y ; k=0.25\n")
        tc = compute_theorem_constants(crn, crn.config({"X": 5}), alpha=0.5, c_hat=1.0)
        # lam = c_hat*K_hat must be >= 1, so c_hat rises to 1/K_hat = 4
        assert tc.c_hat == 4.0
        assert tc.lam == 1.0

    def test_c_hat_derived_from_classification(self):
        crn, _ = parse_crn("L + L -> L + N\n")
        tc = compute_theorem_constants(crn, crn.config({"L": 10}), alpha=1.0)
        assert tc.c_hat_input == 1.0

    def test_unknown_classification_requires_c_hat(self):
        crn, _ = parse_crn("X -> 2X\n")
        with pytest.raises(DomainError, match="c_hat"):
            compute_theorem_constants(crn, crn.config({"X": 3}), alpha=1.0)

    def test_missing_init_is_an_error(self):
        crn, _ = parse_crn("X -> Y\n")
        with pytest.raises(DomainError, match="initial configuration"):
            compute_theorem_constants(crn, None, alpha=1.0, c_hat=1.0)

    def test_ladder_recurrence_is_exact_in_log_space(self):
        crn = chain_crn(3)
        tc = compute_theorem_constants(crn, crn.config({"X1": 8}), alpha=0.75, c_hat=1.0)
        step = math.log2(tc.k_hat) - (4.0 + math.log2(tc.lam) + tc.log2_c)
        for i in range(tc.m):
            assert tc.log2_delta[i + 1] == 2.0 * tc.log2_delta[i] + step

    def test_floor_and_thresholds(self):
        crn = chain_crn(2)
        tc = compute_theorem_constants(crn, crn.config({"X1": 4}), alpha=0.5, c_hat=1.0)
        assert tc.log2_delta[tc.m] >= tc.log2_delta_m_lower
        assert tc.log2_epsilon == tc.log2_epsilon_prime - 1.0
        assert len(tc.n_thresholds) == tc.m + 2
        assert all(v > 0 for _, v in tc.n_thresholds)  # log2(n) thresholds
        assert len(tc.warnings) == 2

    def test_random_networks_satisfy_floor_inequality(self, rng):
        for trial in range(60):
            crn = random_crn(rng, max_species=5, max_reactions=6)
            init = random_config(rng, crn)
            tc = compute_theorem_constants(crn, init, alpha=0.5, c_hat=1.25)
            base = (
                math.log2(tc.alpha)
                + math.log2(tc.k_hat)
                - (4.0 + math.log2(tc.lam) + 2.0 * tc.log2_c)
            )
            for i, l2d in enumerate(tc.log2_delta):
                assert l2d > (2.0**i) * base


class TestMonteCarlo:
    def test_vacuous_decay_bound_dominates(self):
        rep = monte_carlo_validate(
            "decay", DecayBoundParams(200, 1.0, 1.0, 0.25), trials=10_000, seed=1
        )
        assert rep.vacuous
        assert rep.verdict == "dominates"
        assert rep.log2_bound == pytest.approx(49 * math.log2(0.5 * math.e), rel=1e-12)

    def test_unresolvable_bound_is_inconclusive(self):
        rep = monte_carlo_validate(
            "decay", DecayBoundParams(2000, 1.0, 1.0, 0.05), trials=10_000, seed=1
        )
        assert rep.verdict == "inconclusive"
        assert 2.0**rep.log2_bound < 10 / rep.trials

    def test_walk_bound_dominates(self):
        rep = monte_carlo_validate(
            "walk_z", WalkBoundParams(100.0, 25.0, 1.0, 2.0 / 3.0), trials=20_000, seed=2
        )
        assert rep.verdict == "dominates"
        assert rep.upper_confidence <= 2.0**rep.log2_bound

    def test_poisson_empirical_rate_matches_exact_tail(self):
        lam, n = 10.0, 14
        rep = monte_carlo_validate(
            "poisson", PoissonBoundParams(lam, n, "upper"), trials=50_000, seed=3
        )
        exact = 1.0 - scipy_stats.poisson.cdf(n - 1, lam)
        se = math.sqrt(exact * (1 - exact) / rep.trials)
        assert abs(rep.empirical_rate - exact) < 4 * se
        assert rep.verdict == "dominates"

    def test_reflecting_dominates(self):
        rep = monte_carlo_validate(
            "reflecting",
            ReflectingBoundParams(0.2, 1.0, 0.05, 500),
            trials=10_000,
            seed=4,
        )
        assert rep.verdict == "dominates"

    def test_thread_count_does_not_change_hits(self):
        params = PoissonBoundParams(10.0, 14, "upper")
        a = monte_carlo_validate("poisson", params, trials=30_000, seed=5, threads=1)
        b = monte_carlo_validate("poisson", params, trials=30_000, seed=5, threads=4)
        assert a.empirical_hits == b.empirical_hits
        assert a.to_dict() == b.to_dict()

    def test_trial_floor_enforced(self):
        with pytest.raises(DomainError):
            monte_carlo_validate("poisson", PoissonBoundParams(10.0, 14, "upper"), trials=100)

    def test_hypothesis_violations_propagate(self):
        with pytest.raises(HypothesisViolationError):
            monte_carlo_validate(
                "reflecting", ReflectingBoundParams(0.2, 1.0, 0.06, 500), trials=10_000
            )

    def test_unknown_target(self):
        with pytest.raises(DomainError):
            monte_carlo_validate("brownian", None, trials=10_000)


def test_clopper_pearson_known_values():
    # zero successes: upper limit is 1 - 0.01^(1/n)
    n = 1000
    assert clopper_pearson_upper(0, n) == pytest.approx(1 - 0.01 ** (1 / n), rel=1e-9)
    assert clopper_pearson_upper(n, n) == 1.0
    assert 0.5 < clopper_pearson_upper(500, 1000) < 0.55
