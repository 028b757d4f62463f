"""
Discrete probability inversion over a complete class of causes.

Posteriors come from Bayes' rule over every cause; pairs of causes are compared through
their odds, which a Bayes factor multiplies when a new event is observed. Chains of
evidence are accumulated in log space so long sequences neither underflow nor overflow.
"""
import logging
import math
import sys
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
from scipy import special, stats

from src.config import PROBABILITY_SUM_TOLERANCE
from src.errors import (InconsistentEvidenceError, IndeterminateOddsError, InvalidSystemError,
                        UndefinedFactorError, UnknownEventError)

logger = logging.getLogger(__name__)

# Smallest positive normal double; below it products and ratios lose digits.
_TINY = sys.float_info.min


def _is_probability(value: float) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and 0.0 <= value <= 1.0


def _log(value: float) -> float:
    return math.log(value) if value > 0 else -math.inf


def _exp(value: float) -> float:
    try:
        return math.exp(value)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class CausalSystem:
    """Mutually exclusive, exhaustive causes with their priors and per-event likelihoods."""
    labels: tuple
    priors: tuple
    likelihoods: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        labels = tuple(self.labels)
        priors = tuple(float(p) if _is_probability(p) else p for p in self.priors)
        if not labels:
            raise InvalidSystemError("A causal system needs at least one cause")
        if len(set(labels)) != len(labels):
            raise InvalidSystemError(f"Cause labels must be unique: {labels}")
        if len(priors) != len(labels):
            raise InvalidSystemError(f"Got {len(priors)} priors for {len(labels)} causes")
        if not all(_is_probability(p) for p in priors):
            raise InvalidSystemError(f"Priors must lie in [0, 1]: {priors}")
        total = math.fsum(priors)
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise InvalidSystemError(f"Priors must sum to 1, got {total!r}")

        likelihoods = {}
        for event, values in dict(self.likelihoods).items():
            values = tuple(values)
            if len(values) != len(labels):
                raise InvalidSystemError(f"Event '{event}' has {len(values)} likelihoods for {len(labels)} causes")
            if not all(_is_probability(v) for v in values):
                raise InvalidSystemError(f"Likelihoods of event '{event}' must lie in [0, 1]: {values}")
            likelihoods[event] = tuple(float(v) for v in values)

        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "likelihoods", MappingProxyType(likelihoods))

    def to_dict(self) -> dict:
        return {"causes": [{"label": label, "prior": prior} for label, prior in zip(self.labels, self.priors)],
                "events": {event: list(values) for event, values in self.likelihoods.items()}}

    def event_likelihoods(self, event: str) -> tuple:
        try:
            return self.likelihoods[event]
        except KeyError:
            raise UnknownEventError(f"Event '{event}' is not registered; known events: {sorted(self.likelihoods)}")

    def index_of(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidSystemError(f"Unknown cause '{label}'")

    def odds_state(self, i: int, j: int) -> "OddsState":
        """Prior odds of cause i against cause j."""
        return OddsState(self.labels[i], self.labels[j], _ratio(self.priors[i], self.priors[j]))


@dataclass(frozen=True)
class OddsState:
    numerator_label: str
    denominator_label: str
    odds: float

    def __post_init__(self):
        if math.isnan(self.odds) or self.odds < 0:
            raise IndeterminateOddsError(f"Odds must be a non-negative extended real, got {self.odds!r}")
        object.__setattr__(self, "odds", float(self.odds))


@dataclass(frozen=True)
class EvidenceItem:
    """
    Probabilities of one event under the numerator and the denominator hypothesis.

    ``log_h_num`` and ``log_h_den`` default to the logs of the probabilities. Pass them
    explicitly when a probability is too small for a double, e.g. a binomial pmf over
    thousands of draws; the factor is then taken from the logs.
    """
    event_label: str
    h_num: float
    h_den: float
    log_h_num: float | None = None
    log_h_den: float | None = None

    def __post_init__(self):
        if not (_is_probability(self.h_num) and _is_probability(self.h_den)):
            raise UndefinedFactorError(
                f"Evidence '{self.event_label}' needs probabilities in [0, 1], got ({self.h_num!r}, {self.h_den!r})")
        for name, probability in (("log_h_num", self.h_num), ("log_h_den", self.h_den)):
            value = getattr(self, name)
            if value is None:
                value = _log(probability)
            elif math.isnan(value) or value > 0:
                raise UndefinedFactorError(f"Evidence '{self.event_label}' has {name} {value!r}, not a log probability")
            object.__setattr__(self, name, float(value))
        if self.log_h_num == -math.inf and self.log_h_den == -math.inf:
            raise UndefinedFactorError(f"Evidence '{self.event_label}' is impossible under both hypotheses")


def _ratio(num: float, den: float) -> float:
    if den == 0:
        if num == 0:
            raise IndeterminateOddsError("0/0 ratio is undefined")
        return math.inf
    return num / den


def _bayes_rule(likelihoods: Sequence[float], priors: Sequence[float]) -> tuple | None:
    """Normalized joints, or None when every joint is zero."""
    joint = [likelihood * prior for likelihood, prior in zip(likelihoods, priors)]
    evidence = math.fsum(joint)
    if evidence >= _TINY:
        return tuple(j / evidence for j in joint)

    # Joints below the normal range underflow in linear space.
    log_joint = np.array([_log(likelihood) + _log(prior) for likelihood, prior in zip(likelihoods, priors)])
    if np.isneginf(log_joint).all():
        return None
    return tuple(np.exp(log_joint - special.logsumexp(log_joint)).tolist())


def posterior_over_causes(system: CausalSystem, event: str) -> tuple:
    posterior = _bayes_rule(system.event_likelihoods(event), system.priors)
    if posterior is None:
        raise InconsistentEvidenceError(f"Event '{event}' is impossible under every cause")
    return posterior


def sequential_posterior(system: CausalSystem, events: Sequence[str]) -> tuple:
    """Posterior after conditioning on independent events one after another."""
    posterior = system.priors
    for index, event in enumerate(events):
        posterior = _bayes_rule(system.event_likelihoods(event), posterior)
        if posterior is None:
            raise InconsistentEvidenceError(
                f"Event '{event}' (position {index}) is impossible given the evidence before it")
    return tuple(posterior)


def bayes_factor(item: EvidenceItem) -> float:
    if item.h_num >= _TINY and item.h_den >= _TINY:
        return item.h_num / item.h_den
    return _exp(log_bayes_factor(item))


def log_bayes_factor(item: EvidenceItem) -> float:
    return item.log_h_num - item.log_h_den


def weight_of_evidence(item: EvidenceItem) -> float:
    """Bayes factor in decimal logarithm units (bans)."""
    return log_bayes_factor(item) / math.log(10.0)


def update_odds(prior: OddsState, item: EvidenceItem) -> OddsState:
    factor = bayes_factor(item)
    if (math.isinf(factor) and prior.odds == 0) or (factor == 0 and math.isinf(prior.odds)):
        raise IndeterminateOddsError(
            f"Evidence '{item.event_label}' multiplies {prior.odds!r} odds by a {factor!r} factor")
    return OddsState(prior.numerator_label, prior.denominator_label, factor * prior.odds)


def _accumulate_log_odds(log_start: float, items: Sequence[EvidenceItem]) -> float:
    has_zero = log_start == -math.inf
    has_infinity = log_start == math.inf
    log_terms = [log_start] if math.isfinite(log_start) else []

    for index, item in enumerate(items):
        log_factor = log_bayes_factor(item)
        has_zero = has_zero or log_factor == -math.inf
        has_infinity = has_infinity or log_factor == math.inf
        if has_zero and has_infinity:
            raise IndeterminateOddsError(
                f"Evidence item {index} ('{item.event_label}') makes the odds 0 x infinity", index=index)
        if math.isfinite(log_factor):
            log_terms.append(log_factor)

    if has_zero:
        return -math.inf
    if has_infinity:
        return math.inf
    return math.fsum(log_terms)


def log_chain_factor(items: Sequence[EvidenceItem]) -> float:
    """Natural log of the product of the items' Bayes factors, kept finite where the product is not."""
    return _accumulate_log_odds(0.0, items)


def sequential_update(prior: OddsState, items: Sequence[EvidenceItem]) -> OddsState:
    """
    Applies every item's Bayes factor to the prior odds.

    The log factors are added with ``math.fsum``, which rounds the exact sum once, so the
    result does not depend on the order of ``items``. Log odds beyond the double range
    come back as 0 or infinite odds.
    """
    odds = _exp(_accumulate_log_odds(_log(prior.odds), items))
    logger.debug("Accumulated %d evidence items into odds %r", len(items), odds)
    return OddsState(prior.numerator_label, prior.denominator_label, odds)


def odds_from_posteriors(system: CausalSystem, event: str, i: int, j: int) -> OddsState:
    """
    Posterior odds of cause i against cause j after ``event``.

    The evidence normalizer cancels in the ratio, so the odds are computed as Bayes factor
    times prior odds; with equal priors this is the Bayes factor itself, bit for bit.
    """
    posterior = posterior_over_causes(system, event)
    labels = system.labels
    if i == j:
        return OddsState(labels[i], labels[j], 1.0)
    if posterior[j] == 0:
        if posterior[i] == 0:
            raise IndeterminateOddsError(f"Causes '{labels[i]}' and '{labels[j]}' are both excluded by '{event}'")
        return OddsState(labels[i], labels[j], math.inf)

    likelihoods = system.event_likelihoods(event)
    item = EvidenceItem(event, likelihoods[i], likelihoods[j])
    return update_odds(system.odds_state(i, j), item)


def posterior_probability(odds: OddsState) -> float:
    """Probability of the numerator hypothesis when only the two compared hypotheses remain."""
    if math.isinf(odds.odds):
        return 1.0
    return odds.odds / (1.0 + odds.odds)


def binomial_evidence(trials: int, successes: int, p_num: float, p_den: float, label: str = "binomial") -> EvidenceItem:
    """
    Single-shot evidence of ``successes`` out of ``trials`` independent Bernoulli draws.

    The log pmfs travel with the item, so the factor survives when both pmfs underflow.
    """
    return EvidenceItem(label,
                        float(stats.binom.pmf(successes, trials, p_num)),
                        float(stats.binom.pmf(successes, trials, p_den)),
                        log_h_num=min(0.0, float(stats.binom.logpmf(successes, trials, p_num))),
                        log_h_den=min(0.0, float(stats.binom.logpmf(successes, trials, p_den))))


def bernoulli_evidence_chain(trials: int, successes: int, p_num: float, p_den: float) -> list:
    """The same data as one evidence item per draw: successes first, then failures."""
    chain = [EvidenceItem(f"success_{k + 1}", p_num, p_den) for k in range(successes)]
    chain += [EvidenceItem(f"failure_{k + 1}", 1.0 - p_num, 1.0 - p_den) for k in range(trials - successes)]
    return chain
