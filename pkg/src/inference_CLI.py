import argparse
import json
import logging
import os
import sys

import yaml
from dotenv import load_dotenv
from pydantic import ValidationError

# Add the parent directory to Python path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../")))

from src.errors import InferenceError, InvalidRunOptionError  # noqa: E402
from src.utils.logging_config import LOG_LEVELS, configure_logger  # noqa: E402
from src.utils.run_config import GenericConfig, RunConfig, load_config_dict  # noqa: E402

logger = logging.getLogger("src.inference_CLI")

# Input files and options each subcommand reads, by argparse destination / YAML key.
INPUTS = {"odds": ("system",),
          "partition": ("counts",),
          "fit": ("model", "data"),
          "sharper": ()
          }
OPTIONS = {"odds": ("events", "pair"),
           "partition": (),
           "fit": ("dump_grid", "cross_check", "progress"),
           "sharper": ("deals", "successes", "p_fair", "p_sharp", "prior_odds")
           }


class InferenceCLI(object):
    """
    CLI for probability inversion. Supported commands:
    - odds: re-rank two causes of a causal system event by event.
    - partition: check the odds identity on an exact case count.
    - fit: flat-prior grid posterior of a model formula's parameters.
    - sharper: odds that a card dealer who keeps turning the king is cheating.
    """

    def __init__(self, sys_args):
        parser = argparse.ArgumentParser(
            description="Probability inversion runner CLI",
            usage='''inference_CLI.py <command> [<args>]
       Available sub-commands:
            odds        Prior odds, Bayes factors and posterior of a causal system
            partition   Exact ratios of a case-counting partition
            fit         Grid posterior of model parameters from observations
            sharper     Card-sharper odds, single-shot and deal by deal
        ''')
        parser.add_argument('command', help='Subcommand to run')
        args = parser.parse_args(sys_args[0:1])

        if args.command not in INPUTS:
            print(f'Unrecognized command: {args.command}', file=sys.stderr)
            parser.print_help(sys.stderr)
            raise SystemExit(2)

        self.command = args.command
        self.args = self.command_parser(args.command).parse_args(sys_args[1:])
        configure_logger(self.args.log_level)

    @staticmethod
    def command_parser(command):
        parser = argparse.ArgumentParser(prog=f"inference_CLI.py {command}")
        parser.add_argument("--config-path", help=f"YAML run configuration; its '{command}' section supplies defaults")
        parser.add_argument("--out", help="Path to save the report (default: standard output)")
        parser.add_argument("--format", choices=["json", "csv"], help="Report format (default: json)")
        parser.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS,
                            help="Logging level (default: $INFERENCE_LOG_LEVEL or INFO)")

        if command == "odds":
            parser.add_argument("--system", help="Causal system JSON")
            parser.add_argument("--events", help="Comma separated events, in observation order")
            parser.add_argument("--pair", help="Indices i,j of the compared causes (default: 0,1)")
        elif command == "partition":
            parser.add_argument("--counts", help="Partition JSON with m, n, m', n', m'', n''")
        elif command == "fit":
            parser.add_argument("--model", help="Model specification JSON (formula and parameter axes)")
            parser.add_argument("--data", help="Observation CSV with covariates, value and sigma columns")
            parser.add_argument("--dump-grid", help="Also write every grid node to this CSV")
            parser.add_argument("--cross-check", action="store_true", default=None,
                                help="Compare the MAP with an iterative least-squares fit")
            parser.add_argument("--no-progress", dest="progress", action="store_false", default=None,
                                help="Never show the progress bar")
        elif command == "sharper":
            parser.add_argument("--deals", type=int, help="Number of deals N")
            parser.add_argument("--successes", type=int, help="Deals that turned the king, k")
            parser.add_argument("--p-fair", type=float, help="Chance a fair dealer turns the king")
            parser.add_argument("--p-sharp", type=float, help="Chance a sharper turns the king")
            parser.add_argument("--prior-odds", type=float, help="Prior odds sharper:fair")
        return parser

    def load_configuration(self) -> RunConfig:
        section = GenericConfig({}, self.command)
        if self.args.config_path:
            section = GenericConfig(load_config_dict(self.args.config_path)).get_gc(self.command)

        given = {key: value for key, value in vars(self.args).items() if value is not None}

        def pick(key):
            return given.get(key, section.get(key))

        inputs = {name: pick(name) for name in INPUTS[self.command]}
        missing = [name for name, path in inputs.items() if path is None]
        if missing:
            raise InvalidRunOptionError(f"Missing input file(s): {', '.join('--' + m for m in missing)}")

        return RunConfig(subcommand=self.command,
                         inputs=inputs,
                         output_path=pick("out"),
                         output_format=pick("format") or "json",
                         options={key: pick(key) for key in OPTIONS[self.command]})

    def run(self) -> int:
        try:
            config = self.load_configuration()
            result = getattr(self, self.command)(config)
        except (InferenceError, ValidationError, OSError, json.JSONDecodeError, yaml.YAMLError) as e:
            logger.error("%s failed: %s", self.command, e)
            return 1
        return result.status

    def odds(self, config):
        from src.commands.odds import run_odds
        return run_odds(config)

    def partition(self, config):
        from src.commands.partition import run_partition
        return run_partition(config)

    def fit(self, config):
        from src.commands.fit import run_fit
        return run_fit(config)

    def sharper(self, config):
        from src.commands.sharper import run_sharper
        return run_sharper(config)


def main():
    load_dotenv()
    sys.exit(InferenceCLI(sys.argv[1:]).run())


if __name__ == "__main__":
    main()
