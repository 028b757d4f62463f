import logging

from src.commands.reporting import RunResult, write_report
from src.datasources.input_files import load_causal_system
from src.errors import InvalidRunOptionError
from src.hypothesis_core import (CausalSystem, EvidenceItem, bayes_factor, posterior_probability, sequential_posterior,
                                 sequential_update, update_odds, weight_of_evidence)
from src.utils.run_config import RunConfig, conf_str_to_list

logger = logging.getLogger(__name__)


def _cause_index(system: CausalSystem, token: str) -> int:
    """A cause named by its label or by its position; labels win."""
    if token in system.labels:
        return system.index_of(token)
    try:
        index = int(token)
    except ValueError:
        raise InvalidRunOptionError(f"--pair entry '{token}' is neither a cause index nor one of {list(system.labels)}")
    if not 0 <= index < len(system.labels):
        raise InvalidRunOptionError(f"--pair index {index} is out of range for {len(system.labels)} causes")
    return index


def run_odds(config: RunConfig) -> RunResult:
    """
    Re-ranks a pair of causes event by event and reports the full posterior after all events.
    """
    system = load_causal_system(config.inputs["system"])
    events = conf_str_to_list(config.option("events", ""), str)
    if not events:
        raise InvalidRunOptionError("At least one event is required (--events e1,e2,...)")

    raw_pair = config.option("pair", "0,1")
    tokens = [t.strip() for t in raw_pair.split(",")] if isinstance(raw_pair, str) else conf_str_to_list(raw_pair, str)
    if len(tokens) != 2:
        raise InvalidRunOptionError(f"--pair needs exactly two causes, got {raw_pair!r}")
    i, j = (_cause_index(system, token) for token in tokens)

    prior = system.odds_state(i, j)
    state = prior
    steps, items = [], []
    for event in events:
        likelihoods = system.event_likelihoods(event)
        item = EvidenceItem(event, likelihoods[i], likelihoods[j])
        state = update_odds(state, item)
        items.append(item)
        steps.append({"event": event,
                      "bayes_factor": bayes_factor(item),
                      "weight_of_evidence": weight_of_evidence(item),
                      "posterior_odds": state.odds})
        logger.debug("Event %s: factor %r, odds now %r", event, bayes_factor(item), state.odds)

    chained = sequential_update(prior, items)
    logger.info("Odds %s:%s went from %r to %r (log-space chain %r)",
                prior.numerator_label, prior.denominator_label, prior.odds, state.odds, chained.odds)

    posterior = sequential_posterior(system, events)
    report = {"pair": {"numerator": prior.numerator_label, "denominator": prior.denominator_label},
              "prior_odds": prior.odds,
              "events": steps,
              "posterior_odds": state.odds,
              "pair_posterior_probability": posterior_probability(state),
              "posterior": dict(zip(system.labels, posterior))}

    write_report(report, config.output_path)
    return RunResult(0, report)
