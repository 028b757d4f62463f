import logging
import sys

from src.commands.reporting import RunResult, write_report
from src.datasources.input_files import load_model_spec
from src.error_model import ObservationSet
from src.posterior_grid import (boundary_axes, credible_interval, dump_grid_csv, evaluate_posterior,
                                least_squares_fit, moments)
from src.utils.run_config import RunConfig

logger = logging.getLogger(__name__)


def run_fit(config: RunConfig) -> RunResult:
    expr, space = load_model_spec(config.inputs["model"])
    observations = ObservationSet.from_csv(config.inputs["data"])

    grid = evaluate_posterior(expr, observations, space, progress=config.option("progress"))
    summary = moments(grid)
    boundary_axes(grid)

    for axis in space.names:
        lower, upper = credible_interval(grid, axis)
        logger.info("%s: MAP %r, mean %r +- %r, central interval [%r, %r]", axis, summary.map_point[axis],
                    summary.mean[axis], summary.std[axis], lower, upper)

    if config.option("cross_check", False):
        fitted = least_squares_fit(expr, observations, summary.map_point, space)
        for axis in space.names:
            off_by = abs(fitted[axis] - summary.map_point[axis]) / space.axis(axis).spacing
            level = logging.INFO if off_by <= 1 else logging.WARNING
            logger.log(level, "%s: least squares %r is %.2f cells from the MAP node", axis, fitted[axis], off_by)

    if config.option("dump_grid"):
        dump_grid_csv(grid, config.option("dump_grid"))

    report = summary.to_dict()
    if config.output_format == "csv":
        dump_grid_csv(grid, config.output_path or sys.stdout)
    else:
        write_report(report, config.output_path)
    return RunResult(0, report)
