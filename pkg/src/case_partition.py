"""
Exact case-counting model of probability inversion.

Elementary cases are equiprobable and classified by hypothesis (H, H' or neither) and by
whether they produce the event E. Priors, likelihoods and posteriors are ratios of counts,
kept as ``Fraction`` so the odds identity checks out with a residual of exactly zero.
"""
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from src.errors import ImpossibleEventError, InvalidPartitionError, UndefinedFactorError
from src.hypothesis_core import CausalSystem

EVENT_LABEL = "E"


class Hypothesis(str, Enum):
    H = "H"
    H_PRIME = "H'"
    OTHER = "other"


@dataclass(frozen=True)
class CasePartition:
    m: int
    n: int
    m_p: int
    n_p: int
    m_pp: int = 0
    n_pp: int = 0

    def __post_init__(self):
        for name in ("m", "n", "m_p", "n_p", "m_pp", "n_pp"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidPartitionError(f"Count {name} must be an integer, got {value!r}")
            if value < 0:
                raise InvalidPartitionError(f"Count {name} must be non-negative, got {value}")
        if self.m + self.n == 0:
            raise InvalidPartitionError("Hypothesis H has no cases (m + n = 0)")
        if self.m_p + self.n_p == 0:
            raise InvalidPartitionError("Hypothesis H' has no cases (m' + n' = 0)")

    def to_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "m'": self.m_p, "n'": self.n_p, "m''": self.m_pp, "n''": self.n_pp}

    @property
    def total(self) -> int:
        return self.m + self.n + self.m_p + self.n_p + self.m_pp + self.n_pp

    @property
    def event_cases(self) -> int:
        return self.m + self.m_p + self.m_pp

    def counts(self, which: Hypothesis) -> tuple:
        """(cases giving E, cases not giving E) under one hypothesis."""
        which = Hypothesis(which)
        if which is Hypothesis.H:
            return self.m, self.n
        if which is Hypothesis.H_PRIME:
            return self.m_p, self.n_p
        return self.m_pp, self.n_pp


@dataclass(frozen=True)
class TheoremReport:
    equal_priors: bool
    posterior_ratio: Fraction | float
    likelihood_ratio: Fraction | float
    prior_ratio: Fraction
    general_identity_residual: Fraction


def prior(partition: CasePartition, which: Hypothesis) -> Fraction:
    favorable, unfavorable = partition.counts(which)
    return Fraction(favorable + unfavorable, partition.total)


def likelihood(partition: CasePartition, which: Hypothesis) -> Fraction:
    favorable, unfavorable = partition.counts(which)
    if favorable + unfavorable == 0:
        raise InvalidPartitionError(f"Hypothesis {Hypothesis(which).value} has no cases")
    return Fraction(favorable, favorable + unfavorable)


def posterior(partition: CasePartition, which: Hypothesis) -> Fraction:
    # Once E is known the cases n, n', n'' drop out of the count of possible cases.
    if partition.event_cases == 0:
        raise ImpossibleEventError("No case gives the event (m + m' + m'' = 0)")
    favorable, _ = partition.counts(which)
    return Fraction(favorable, partition.event_cases)


def joint_probabilities(partition: CasePartition) -> dict:
    total = partition.total
    return {"E and H": Fraction(partition.m, total),
            "not E and H": Fraction(partition.n, total),
            "E and H'": Fraction(partition.m_p, total),
            "not E and H'": Fraction(partition.n_p, total),
            "E and other": Fraction(partition.m_pp, total),
            "not E and other": Fraction(partition.n_pp, total)}


def _exact_ratio(num: Fraction, den: Fraction) -> Fraction | float:
    return math.inf if den == 0 else num / den


def verify_theorem(partition: CasePartition) -> TheoremReport:
    if partition.event_cases == 0:
        raise ImpossibleEventError("No case gives the event (m + m' + m'' = 0)")
    if partition.m == 0 and partition.m_p == 0:
        raise UndefinedFactorError("Both H and H' exclude the event, their ratios are 0/0")

    posterior_ratio = _exact_ratio(posterior(partition, Hypothesis.H), posterior(partition, Hypothesis.H_PRIME))
    likelihood_ratio = _exact_ratio(likelihood(partition, Hypothesis.H), likelihood(partition, Hypothesis.H_PRIME))
    prior_ratio = prior(partition, Hypothesis.H) / prior(partition, Hypothesis.H_PRIME)

    if math.isinf(posterior_ratio) or math.isinf(likelihood_ratio):
        # m' = 0 makes both sides infinite together.
        residual = Fraction(0) if posterior_ratio == likelihood_ratio else Fraction(1)
    else:
        residual = abs(posterior_ratio - likelihood_ratio * prior_ratio)

    return TheoremReport(equal_priors=partition.m + partition.n == partition.m_p + partition.n_p,
                         posterior_ratio=posterior_ratio,
                         likelihood_ratio=likelihood_ratio,
                         prior_ratio=prior_ratio,
                         general_identity_residual=residual)


def to_causal_system(partition: CasePartition) -> CausalSystem:
    """H, H' and, when it has cases, the aggregate of everything else, with the single event E."""
    hypotheses = [Hypothesis.H, Hypothesis.H_PRIME]
    if partition.m_pp + partition.n_pp > 0:
        hypotheses.append(Hypothesis.OTHER)
    return CausalSystem(labels=[h.value for h in hypotheses],
                        priors=[float(prior(partition, h)) for h in hypotheses],
                        likelihoods={EVENT_LABEL: [float(likelihood(partition, h)) for h in hypotheses]})
