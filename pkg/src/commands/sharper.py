import logging
import math

from src.commands.reporting import RunResult, write_report
from src.config import SEQUENTIAL_AGREEMENT_TOLERANCE, SHARPER_DEFAULTS
from src.errors import InferenceError, InvalidRunOptionError
from src.hypothesis_core import (OddsState, bayes_factor, bernoulli_evidence_chain, binomial_evidence,
                                 log_bayes_factor, log_chain_factor, posterior_probability, sequential_update,
                                 update_odds, weight_of_evidence)
from src.utils.run_config import RunConfig

logger = logging.getLogger(__name__)


def _options(config: RunConfig) -> dict:
    raw = {key: config.option(key, default) for key, default in SHARPER_DEFAULTS.items()}
    try:
        options = {key: float(value) for key, value in raw.items()}
    except (TypeError, ValueError):
        raise InvalidRunOptionError(f"Sharper options must be numbers, got {raw}")

    deals, successes = options["deals"], options["successes"]
    if not (deals.is_integer() and successes.is_integer() and 0 <= successes <= deals and deals >= 1):
        raise InvalidRunOptionError(f"Need integers 0 <= successes <= deals and deals >= 1, got {raw['successes']} "
                                    f"of {raw['deals']}")
    for key in ("p_fair", "p_sharp"):
        if not 0 < options[key] < 1:
            raise InvalidRunOptionError(f"{key} must lie strictly between 0 and 1, got {options[key]!r}")
    if not options["prior_odds"] >= 0:
        raise InvalidRunOptionError(f"prior_odds must be non-negative, got {options['prior_odds']!r}")
    options["deals"], options["successes"] = int(deals), int(successes)
    return options


def run_sharper(config: RunConfig) -> RunResult:
    """
    Odds that a dealer who turned the king ``successes`` times in ``deals`` deals is cheating,
    computed once from the binomial probabilities and again deal by deal.
    """
    options = _options(config)
    deals, successes = options["deals"], options["successes"]
    p_sharp, p_fair = options["p_sharp"], options["p_fair"]

    evidence = binomial_evidence(deals, successes, p_sharp, p_fair, label=f"{successes} kings in {deals} deals")
    prior = OddsState("sharper", "fair", options["prior_odds"])
    posterior = update_odds(prior, evidence)
    factor = bayes_factor(evidence)

    chain = bernoulli_evidence_chain(deals, successes, p_sharp, p_fair)
    chained_factor = sequential_update(OddsState("sharper", "fair", 1.0), chain).odds
    chained_posterior = sequential_update(prior, chain)

    # Compared as logs, with slack scaled to the magnitude of the log pmfs.
    single_log, chained_log = log_bayes_factor(evidence), log_chain_factor(chain)
    scale = max(1.0, abs(evidence.log_h_num) + abs(evidence.log_h_den))
    if not math.isclose(chained_log, single_log, rel_tol=SEQUENTIAL_AGREEMENT_TOLERANCE,
                        abs_tol=SEQUENTIAL_AGREEMENT_TOLERANCE * scale):
        raise InferenceError(f"Deal-by-deal log factor {chained_log!r} disagrees with single-shot {single_log!r}")
    logger.info("Bayes factor %r, posterior odds %r", factor, posterior.odds)

    report = {"deals": deals,
              "successes": successes,
              "p_fair": p_fair,
              "p_sharp": p_sharp,
              "prior_odds": prior.odds,
              "bayes_factor": factor,
              "weight_of_evidence": weight_of_evidence(evidence),
              "posterior_odds": posterior.odds,
              "posterior_probability_sharper": posterior_probability(posterior),
              "sequential": {"factors": [bayes_factor(item) for item in chain],
                             "bayes_factor": chained_factor,
                             "posterior_odds": chained_posterior.odds,
                             "agrees": True}}

    write_report(report, config.output_path)
    return RunResult(0, report)
