# General Configuration
PROBABILITY_SUM_TOLERANCE = 1e-12
SEQUENTIAL_AGREEMENT_TOLERANCE = 1e-12

# Logging.
LOG_LEVEL_ENV = "INFERENCE_LOG_LEVEL"
DEFAULT_LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Grid evaluation shows a progress bar above this many node evaluations (nodes x records).
PROGRESS_MIN_EVALUATIONS = 2_000_000

# Default central mass for credible intervals (one standard deviation of a Gaussian).
CREDIBLE_MASS = 0.6826894921370859

# Card-sharper demo. The probabilities of turning the king are configuration defaults,
# not measured values: 1/8 for a fair dealer (4 kings in a 32-card deck), 1/4 for a cheat.
SHARPER_DEFAULTS = {"deals": 10,
                    "successes": 6,
                    "p_fair": 0.125,
                    "p_sharp": 0.25,
                    "prior_odds": 1.0
                    }

OUTPUT_FORMATS = {"odds": ("json",),
                  "partition": ("json",),
                  "fit": ("json", "csv"),
                  "sharper": ("json",)
                  }
