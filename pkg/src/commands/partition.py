from src.case_partition import (Hypothesis, joint_probabilities, likelihood, posterior, prior,
                                verify_theorem)
from src.commands.reporting import RunResult, rational_pair, write_report
from src.datasources.input_files import load_partition
from src.utils.run_config import RunConfig


def run_partition(config: RunConfig) -> RunResult:
    partition = load_partition(config.inputs["counts"])
    theorem = verify_theorem(partition)

    named = [Hypothesis.H, Hypothesis.H_PRIME]
    report = {"counts": partition.to_dict(),
              "equal_priors": theorem.equal_priors,
              "prior_ratio": rational_pair(theorem.prior_ratio),
              "likelihood_ratio": rational_pair(theorem.likelihood_ratio),
              "posterior_ratio": rational_pair(theorem.posterior_ratio),
              "general_identity_residual": rational_pair(theorem.general_identity_residual),
              "priors": {h.value: rational_pair(prior(partition, h)) for h in Hypothesis},
              "likelihoods": {h.value: rational_pair(likelihood(partition, h)) for h in named},
              "posteriors": {h.value: rational_pair(posterior(partition, h)) for h in Hypothesis},
              "joint_probabilities": {k: rational_pair(v) for k, v in joint_probabilities(partition).items()}}

    write_report(report, config.output_path)
    return RunResult(0, report)
