import math

import numpy as np
import pytest
from scipy import stats

from src.errors import (InconsistentEvidenceError, IndeterminateOddsError, InvalidSystemError,
                        UndefinedFactorError, UnknownEventError)
from src.hypothesis_core import (CausalSystem, EvidenceItem, OddsState, bayes_factor, bernoulli_evidence_chain,
                                 binomial_evidence, log_bayes_factor, log_chain_factor, odds_from_posteriors,
                                 posterior_over_causes, posterior_probability, sequential_posterior,
                                 sequential_update, update_odds, weight_of_evidence)


def two_causes(priors, likelihoods):
    return CausalSystem(labels=["a", "b"], priors=priors, likelihoods={"e": likelihoods})


def random_system(rng, causes):
    priors = rng.dirichlet(np.ones(causes)).tolist()
    likelihoods = rng.uniform(0.01, 1.0, size=causes).tolist()
    return CausalSystem(labels=[f"c{k}" for k in range(causes)], priors=priors, likelihoods={"e": likelihoods})


class TestCausalSystem:

    def test_valid_system(self):
        system = two_causes([0.25, 0.75], [0.8, 0.2])
        assert system.labels == ("a", "b")
        assert system.event_likelihoods("e") == (0.8, 0.2)
        assert system.to_dict()["causes"][1] == {"label": "b", "prior": 0.75}

    @pytest.mark.parametrize("labels, priors, likelihoods", [
        (["a", "b"], [0.5, 0.4], [0.5, 0.5]),
        (["a", "a"], [0.5, 0.5], [0.5, 0.5]),
        (["a", "b"], [0.5, 0.5], [1.2, 0.5]),
        (["a", "b"], [0.5, 0.5], [0.5]),
        (["a", "b", "c"], [0.5, 0.5], [0.5, 0.5]),
        (["a", "b"], [1.5, -0.5], [0.5, 0.5]),
        ([], [], []),
    ])
    def test_invalid_systems_are_rejected(self, labels, priors, likelihoods):
        with pytest.raises(InvalidSystemError):
            CausalSystem(labels=labels, priors=priors, likelihoods={"e": likelihoods})

    def test_priors_are_not_renormalized(self):
        with pytest.raises(InvalidSystemError, match="sum to 1"):
            two_causes([0.45, 0.45], [0.5, 0.5])

    def test_unknown_event(self):
        with pytest.raises(UnknownEventError):
            posterior_over_causes(two_causes([0.5, 0.5], [0.8, 0.2]), "missing")


class TestPosteriorOverCauses:

    def test_equal_priors(self):
        assert posterior_over_causes(two_causes([0.5, 0.5], [0.8, 0.2]), "e") == pytest.approx((0.8, 0.2), rel=1e-15)

    def test_certain_prior_stays_certain(self):
        assert posterior_over_causes(two_causes([1.0, 0.0], [0.3, 0.9]), "e") == (1.0, 0.0)

    def test_unequal_priors(self):
        posterior = posterior_over_causes(two_causes([0.25, 0.75], [0.8, 0.2]), "e")
        assert posterior == pytest.approx((0.2 / 0.35, 0.15 / 0.35), rel=1e-12)

    def test_impossible_event(self):
        with pytest.raises(InconsistentEvidenceError):
            posterior_over_causes(two_causes([0.5, 0.5], [0.0, 0.0]), "e")

    def test_normalization(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            system = random_system(rng, int(rng.integers(2, 7)))
            assert math.fsum(posterior_over_causes(system, "e")) == pytest.approx(1.0, abs=1e-12)

    def test_joints_below_the_double_range(self):
        system = CausalSystem(labels=["a", "b", "c"], priors=[1e-200, 1e-200, 1.0],
                              likelihoods={"rare": [1e-200, 3e-200, 0.0]})
        assert posterior_over_causes(system, "rare") == pytest.approx((0.25, 0.75, 0.0), rel=1e-12)
        assert sequential_posterior(system, ["rare"]) == pytest.approx((0.25, 0.75, 0.0), rel=1e-12)


class TestSequentialPosterior:

    def test_repeated_conditioning(self):
        system = CausalSystem(labels=["a", "b"], priors=[0.5, 0.5], likelihoods={"x": [0.8, 0.2], "y": [0.5, 0.5]})
        assert sequential_posterior(system, ["x", "x"]) == pytest.approx((16 / 17, 1 / 17), rel=1e-12)
        assert sequential_posterior(system, ["x", "y"]) == pytest.approx(posterior_over_causes(system, "x"), rel=1e-15)

    def test_no_events_returns_priors(self):
        system = two_causes([0.25, 0.75], [0.8, 0.2])
        assert sequential_posterior(system, []) == (0.25, 0.75)

    def test_prior_certainty_is_absorbing(self):
        system = CausalSystem(labels=["a", "b", "c"], priors=[0.0, 0.3, 0.7],
                              likelihoods={"x": [0.9, 0.1, 0.4], "y": [0.2, 0.6, 0.3]})
        assert sequential_posterior(system, ["x", "y", "x"])[0] == 0.0
        certain = CausalSystem(labels=["a", "b"], priors=[1.0, 0.0], likelihoods={"x": [0.1, 0.9]})
        assert sequential_posterior(certain, ["x"] * 20) == (1.0, 0.0)

    def test_event_excluded_by_earlier_evidence(self):
        system = CausalSystem(labels=["a", "b"], priors=[0.5, 0.5], likelihoods={"x": [1.0, 0.0], "y": [0.0, 1.0]})
        with pytest.raises(InconsistentEvidenceError, match="position 1"):
            sequential_posterior(system, ["x", "y"])


class TestBayesFactor:

    def test_ratio(self):
        assert bayes_factor(EvidenceItem("e", 0.8, 0.2)) == 4.0

    @pytest.mark.parametrize("h", [1e-300, 0.3, 1.0])
    def test_identical_likelihoods(self, h):
        assert bayes_factor(EvidenceItem("e", h, h)) == 1.0

    def test_extended_reals(self):
        assert bayes_factor(EvidenceItem("e", 0.5, 0.0)) == math.inf
        assert bayes_factor(EvidenceItem("e", 0.0, 0.5)) == 0.0

    def test_zero_over_zero_rejected_at_construction(self):
        with pytest.raises(UndefinedFactorError):
            EvidenceItem("e", 0.0, 0.0)

    @pytest.mark.parametrize("h_num, h_den", [(1.2, 0.5), (0.5, -0.1), (math.nan, 0.5)])
    def test_not_probabilities(self, h_num, h_den):
        with pytest.raises(UndefinedFactorError):
            EvidenceItem("e", h_num, h_den)

    def test_sharper_factor(self):
        item = binomial_evidence(10, 6, 0.25, 0.125)
        expected = (0.25 ** 6 * 0.75 ** 4) / (0.125 ** 6 * 0.875 ** 4)
        assert bayes_factor(item) == pytest.approx(expected, rel=1e-12)
        assert item.h_num == pytest.approx(stats.binom.pmf(6, 10, 0.25), rel=1e-15)
        assert item.h_num == pytest.approx(math.comb(10, 6) * 0.25 ** 6 * 0.75 ** 4, rel=1e-12)

    def test_weight_of_evidence(self):
        assert weight_of_evidence(EvidenceItem("e", 0.8, 0.2)) == pytest.approx(math.log10(4.0), rel=1e-14)
        assert weight_of_evidence(EvidenceItem("e", 0.8, 0.0)) == math.inf

    def test_factor_from_log_probabilities(self):
        item = EvidenceItem("e", 0.0, 0.0, log_h_num=-800.0, log_h_den=-801.0)
        assert bayes_factor(item) == pytest.approx(math.e, rel=1e-12)
        assert log_bayes_factor(item) == 1.0

    @pytest.mark.parametrize("log_h_num, log_h_den", [(0.5, -1.0), (math.nan, -1.0), (-math.inf, -math.inf)])
    def test_invalid_log_probabilities(self, log_h_num, log_h_den):
        with pytest.raises(UndefinedFactorError):
            EvidenceItem("e", 0.0, 0.0, log_h_num=log_h_num, log_h_den=log_h_den)

    def test_no_kings_favours_the_fair_dealer(self):
        item = binomial_evidence(10, 0, 0.25, 0.125)
        assert bayes_factor(item) < 1.0
        assert bayes_factor(item) == pytest.approx((0.75 / 0.875) ** 10, rel=1e-12)

    def test_binomial_factor_survives_underflowing_pmfs(self):
        item = binomial_evidence(2000, 1000, 0.02, 0.01)
        assert item.h_num == 0.0 and item.h_den == 0.0
        expected_log = 1000 * math.log(2.0) + 1000 * math.log(0.98 / 0.99)
        assert log_bayes_factor(item) == pytest.approx(expected_log, rel=1e-12)
        assert bayes_factor(item) == pytest.approx(math.exp(expected_log), rel=1e-9)

    def test_binomial_factor_beyond_the_double_range(self):
        item = binomial_evidence(2000, 1000, 0.5, 0.01)
        assert bayes_factor(item) == math.inf
        assert math.isfinite(weight_of_evidence(item))


class TestOddsUpdates:

    def test_equal_prior_odds(self):
        assert update_odds(OddsState("a", "b", 1.0), EvidenceItem("e", 0.8, 0.2)).odds == 4.0

    def test_multiplication(self):
        assert update_odds(OddsState("a", "b", 2.0), EvidenceItem("e", 0.6, 0.2)).odds == pytest.approx(6.0, rel=1e-15)

    def test_zero_prior_is_absorbing(self):
        assert update_odds(OddsState("a", "b", 0.0), EvidenceItem("e", 0.9, 0.1)).odds == 0.0

    def test_zero_times_infinity(self):
        with pytest.raises(IndeterminateOddsError):
            update_odds(OddsState("a", "b", 0.0), EvidenceItem("e", 0.9, 0.0))

    def test_negative_odds_rejected(self):
        with pytest.raises(IndeterminateOddsError):
            OddsState("a", "b", -1.0)

    def test_sequential(self):
        items = [EvidenceItem("x", 0.5, 0.25), EvidenceItem("y", 0.5, 0.25)]
        assert sequential_update(OddsState("a", "b", 1.0), items).odds == pytest.approx(4.0, rel=1e-14)

    def test_empty_chain_is_identity(self):
        assert sequential_update(OddsState("a", "b", 1.0), []).odds == 1.0

    def test_order_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            items = [EvidenceItem(f"e{k}", *rng.uniform(1e-3, 1.0, size=2).tolist()) for k in range(25)]
            prior = OddsState("a", "b", float(rng.uniform(0.1, 10.0)))
            forward = sequential_update(prior, items).odds
            shuffled = [items[k] for k in rng.permutation(len(items))]
            assert sequential_update(prior, shuffled).odds == forward
            assert sequential_update(prior, items[::-1]).odds == forward

    def test_long_balanced_chain(self):
        # The running product underflows to 0 halfway through; the log-space sum does not.
        items = [EvidenceItem("e", 1e-10, 2e-10)] * 2000
        balanced = items + [EvidenceItem("f", 2e-10, 1e-10)] * 2000
        assert sequential_update(OddsState("a", "b", 1.0), balanced).odds == pytest.approx(1.0, rel=1e-12)

    def test_one_sided_chain_saturates(self):
        favouring = [EvidenceItem("e", 1.0, 0.1)] * 400
        against = [EvidenceItem("e", 0.1, 1.0)] * 400
        assert sequential_update(OddsState("a", "b", 1.0), favouring).odds == math.inf
        assert sequential_update(OddsState("a", "b", 1.0), against).odds == 0.0
        assert log_chain_factor(favouring) == pytest.approx(400 * math.log(10.0), rel=1e-12)

    def test_indeterminate_chain_reports_item(self):
        items = [EvidenceItem("x", 0.5, 0.0), EvidenceItem("y", 0.2, 0.3), EvidenceItem("z", 0.0, 0.5)]
        with pytest.raises(IndeterminateOddsError) as raised:
            sequential_update(OddsState("a", "b", 1.0), items)
        assert raised.value.index == 2

    def test_posterior_probability(self):
        assert posterior_probability(OddsState("a", "b", 3.0)) == 0.75
        assert posterior_probability(OddsState("a", "b", math.inf)) == 1.0
        assert posterior_probability(OddsState("a", "b", 0.0)) == 0.0


class TestOddsFromPosteriors:

    def test_equal_priors(self):
        assert odds_from_posteriors(two_causes([0.5, 0.5], [0.8, 0.2]), "e", 0, 1).odds == 4.0

    def test_unequal_priors(self):
        odds = odds_from_posteriors(two_causes([0.25, 0.75], [0.8, 0.2]), "e", 0, 1).odds
        assert odds == pytest.approx((0.25 * 0.8) / (0.75 * 0.2), rel=1e-12)

    def test_self_ratio(self):
        system = CausalSystem(labels=["a", "b", "c"], priors=[0.2, 0.3, 0.5], likelihoods={"e": [0.1, 0.2, 0.3]})
        for i in range(3):
            assert odds_from_posteriors(system, "e", i, i).odds == 1.0

    def test_excluded_denominator(self):
        system = two_causes([0.5, 0.5], [0.4, 0.0])
        assert odds_from_posteriors(system, "e", 0, 1).odds == math.inf
        assert odds_from_posteriors(system, "e", 1, 0).odds == 0.0

    def test_both_excluded(self):
        system = CausalSystem(labels=["a", "b", "c"], priors=[0.2, 0.3, 0.5], likelihoods={"e": [0.0, 0.0, 0.3]})
        with pytest.raises(IndeterminateOddsError):
            odds_from_posteriors(system, "e", 0, 1)

    def test_odds_form_matches_bayes_rule(self):
        rng = np.random.default_rng(2024)
        for _ in range(10_000):
            system = random_system(rng, int(rng.integers(2, 7)))
            i, j = (int(k) for k in rng.choice(len(system.labels), size=2, replace=False))
            posterior = posterior_over_causes(system, "e")
            likelihoods = system.event_likelihoods("e")
            odds = odds_from_posteriors(system, "e", i, j).odds
            assert odds == pytest.approx(posterior[i] / posterior[j], rel=1e-12)
            assert odds == pytest.approx(update_odds(system.odds_state(i, j),
                                                     EvidenceItem("e", likelihoods[i], likelihoods[j])).odds,
                                         rel=1e-12)

    def test_equal_priors_give_the_factor_exactly(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            likelihoods = rng.uniform(0.01, 1.0, size=2).tolist()
            system = two_causes([0.5, 0.5], likelihoods)
            assert odds_from_posteriors(system, "e", 0, 1).odds == bayes_factor(EvidenceItem("e", *likelihoods))


class TestSharperChain:

    def test_chain_layout(self):
        chain = bernoulli_evidence_chain(10, 6, 0.25, 0.125)
        assert len(chain) == 10
        assert [item.h_num for item in chain] == [0.25] * 6 + [0.75] * 4

    def test_chain_matches_single_shot(self):
        rng = np.random.default_rng(1821)
        for _ in range(1000):
            p_sharp, p_fair = rng.uniform(0.01, 0.99, size=2).tolist()
            single = bayes_factor(binomial_evidence(10, 6, p_sharp, p_fair))
            chained = sequential_update(OddsState("sharper", "fair", 1.0),
                                        bernoulli_evidence_chain(10, 6, p_sharp, p_fair)).odds
            assert chained == pytest.approx(single, rel=1e-12)

    def test_indistinguishable_hypotheses(self):
        assert bayes_factor(binomial_evidence(10, 6, 0.2, 0.2)) == 1.0
