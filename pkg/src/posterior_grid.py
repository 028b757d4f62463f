"""
Flat-prior posterior of model parameters on a dense grid.

The prior is uniform on the box spanned by the :class:`~src.model_expr.ParameterSpace`,
so the posterior is proportional to the joint density of the observations. The box is
cut into equal cells and every cell is represented by its midpoint (midpoint Riemann
quadrature); the normalization constant lambda is therefore relative to that box.

Nodes are always reduced in C order (first axis slowest), so summaries are
bit-reproducible however the node values were produced.
"""
import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from scipy import optimize, special
from tqdm import tqdm

from src.config import CREDIBLE_MASS, PROGRESS_MIN_EVALUATIONS
from src.error_model import ObservationSet, log_omega, standardized_square_sum
from src.errors import (DegeneratePosteriorError, DuplicateBindingError, ExpressionDomainError, InvalidErrorScaleError,
                        InvalidObservationError, InvalidParameterSpaceError, InvalidPredictionError,
                        UnboundNameError)
from src.model_expr import ModelExpression, ParameterSpace, evaluate, predictions

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PosteriorGrid:
    space: ParameterSpace
    log_density: np.ndarray
    log_lambda: float
    cell_volume: float

    @classmethod
    def from_log_density(cls, space: ParameterSpace, log_density) -> "PosteriorGrid":
        log_density = np.array(log_density, dtype=float)
        if log_density.shape != space.shape:
            raise InvalidParameterSpaceError(f"Log density of shape {log_density.shape} does not match grid {space.shape}")
        log_density.setflags(write=False)
        log_lambda = _log_lambda(log_density, space.cell_volume)
        return cls(space=space, log_density=log_density, log_lambda=log_lambda, cell_volume=space.cell_volume)

    @property
    def density(self) -> np.ndarray:
        """Normalized posterior density at every node."""
        return np.exp(self.log_density + self.log_lambda)

    def axis_index(self, name: str) -> int:
        return self.space.names.index(self.space.axis(name).name)


@dataclass(frozen=True)
class PosteriorSummary:
    map_point: Mapping[str, float]
    mean: Mapping[str, float]
    std: Mapping[str, float]
    log_lambda: float

    def to_dict(self) -> dict:
        return {"map": dict(self.map_point),
                "mean": dict(self.mean),
                "std": dict(self.std),
                "log_lambda": self.log_lambda}


@dataclass(frozen=True)
class MarginalDensity:
    name: str
    values: np.ndarray
    density: np.ndarray
    spacing: float

    @property
    def mean(self) -> float:
        return float(np.sum(self.values * self.density) * self.spacing)

    def cdf_at_edges(self) -> tuple:
        edges = np.concatenate(([self.values[0] - 0.5 * self.spacing], self.values + 0.5 * self.spacing))
        cdf = np.concatenate(([0.0], np.cumsum(self.density) * self.spacing))
        return edges, cdf


@dataclass(frozen=True)
class WeightedMean:
    mean: float
    sigma: float


def _log_lambda(log_density: np.ndarray, cell_volume: float) -> float:
    if np.isnan(log_density).any() or np.isposinf(log_density).any():
        raise DegeneratePosteriorError("Log density has NaN or +infinite nodes")
    if np.isneginf(log_density).all():
        raise DegeneratePosteriorError("Every grid node has zero density")
    log_mass = special.logsumexp(log_density.ravel(order="C")) + math.log(cell_volume)
    return float(-log_mass)


def _check_bindings(expr: ModelExpression, obs: ObservationSet, space: ParameterSpace):
    parameters = set(space.names)
    unused = parameters - expr.free_names
    if unused:
        raise InvalidParameterSpaceError(f"Axes {sorted(unused)} are not parameters of '{expr}'")
    clash = parameters & obs.covariate_names
    if clash:
        raise DuplicateBindingError(f"Names {sorted(clash)} are both grid axes and observation covariates")
    unbound = expr.free_names - parameters - obs.covariate_names
    if unbound:
        raise UnboundNameError(f"Names {sorted(unbound)} in '{expr}' are neither axes nor covariates")


def _node_description(space: ParameterSpace, flat_index: int | None) -> str:
    if flat_index is None:
        return "every node"
    return f"node {space.node(np.unravel_index(flat_index, space.shape))}"


def evaluate_posterior(expr: ModelExpression, obs: ObservationSet, space: ParameterSpace,
                       progress: bool | None = None) -> PosteriorGrid:
    _check_bindings(expr, obs, space)
    mesh = space.mesh()
    node_count = space.size
    if progress is None:
        progress = node_count * len(obs) >= PROGRESS_MIN_EVALUATIONS
    logger.info("Evaluating '%s' on %d nodes x %d observations", expr, node_count, len(obs))

    model_values = []
    records = tqdm(obs.records, desc="Evaluating model", disable=not progress)
    for index, record in enumerate(records):
        try:
            value = evaluate(expr, mesh, record.covariates)
        except ExpressionDomainError as e:
            raise ExpressionDomainError(f"observation {index}, {_node_description(space, e.flat_index)}: "
                                        f"model is undefined", e.subexpression, e.flat_index) from e
        model_values.append(np.broadcast_to(value, space.shape))

    try:
        log_density = log_omega(obs, model_values)
    except InvalidPredictionError as e:
        raise InvalidPredictionError(f"{e} at {_node_description(space, e.flat_index)}",
                                     index=e.index, flat_index=e.flat_index) from e

    grid = PosteriorGrid.from_log_density(space, log_density)
    logger.info("Grid normalized, log lambda = %r", grid.log_lambda)
    return grid


def normalization_lambda(grid: PosteriorGrid) -> float:
    """log lambda, where 1/lambda is the integral of the unnormalized density over the box."""
    return _log_lambda(grid.log_density, grid.cell_volume)


def _map_index(grid: PosteriorGrid) -> tuple:
    # argmax returns the first maximum in C order: the lexicographically smallest multi-index.
    return np.unravel_index(int(np.argmax(grid.log_density)), grid.log_density.shape)


def map_estimate(grid: PosteriorGrid) -> dict:
    normalization_lambda(grid)
    return grid.space.node(_map_index(grid))


def boundary_axes(grid: PosteriorGrid) -> list:
    """Axes on which the MAP node is the first or last node; a sign the bounds cut the posterior."""
    index = _map_index(grid)
    axes = [axis.name for axis, i in zip(grid.space.axes, index) if i in (0, axis.points - 1)]
    if axes:
        logger.warning("MAP lies on the grid boundary along %s; widen the bounds", axes)
    return axes


def marginal(grid: PosteriorGrid, axis: str) -> MarginalDensity:
    position = grid.axis_index(axis)
    other_axes = tuple(i for i in range(grid.space.dimension) if i != position)
    other_volume = math.prod(grid.space.axes[i].spacing for i in other_axes)
    density = grid.density.sum(axis=other_axes) * other_volume if other_axes else grid.density.copy()
    spacing = grid.space.axes[position].spacing
    # Rounding only; the joint density is already normalized.
    density = density / (density.sum() * spacing)
    return MarginalDensity(axis, grid.space.axes[position].values, density, spacing)


def _coordinates(grid: PosteriorGrid, position: int) -> np.ndarray:
    shape = [1] * grid.space.dimension
    shape[position] = grid.space.axes[position].points
    return grid.space.axes[position].values.reshape(shape)


def moments(grid: PosteriorGrid) -> PosteriorSummary:
    weights = grid.density * grid.cell_volume
    mean, std = {}, {}
    for position, axis in enumerate(grid.space.axes):
        x = _coordinates(grid, position)
        mean[axis.name] = float(np.sum(weights * x))
        std[axis.name] = float(math.sqrt(np.sum(weights * (x - mean[axis.name]) ** 2)))
    return PosteriorSummary(map_point=map_estimate(grid), mean=mean, std=std, log_lambda=grid.log_lambda)


def credible_interval(grid: PosteriorGrid, axis: str, mass: float = CREDIBLE_MASS) -> tuple:
    """Central interval holding ``mass`` of the marginal posterior, interpolated within cells."""
    if not 0 < mass < 1:
        raise ValueError(f"Credible mass must lie in (0, 1), got {mass!r}")
    edges, cdf = marginal(grid, axis).cdf_at_edges()
    tail = 0.5 * (1.0 - mass)
    return float(np.interp(tail, cdf, edges)), float(np.interp(1.0 - tail, cdf, edges))


def weighted_mean(values: Sequence[float], sigmas: Sequence[float]) -> WeightedMean:
    values = np.asarray(values, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if values.size == 0 or values.shape != sigmas.shape:
        raise InvalidObservationError("Weighted mean needs at least one value and one sigma per value")
    if not np.all(np.isfinite(sigmas) & (sigmas > 0)):
        raise InvalidErrorScaleError(f"Every sigma must be positive and finite: {sigmas.tolist()}")
    weights = 1.0 / sigmas ** 2
    total_weight = math.fsum(weights)
    return WeightedMean(mean=math.fsum(weights * values) / total_weight, sigma=total_weight ** -0.5)


def chi_squared(expr: ModelExpression, obs: ObservationSet, params: Mapping[str, float]) -> float:
    return standardized_square_sum(obs, predictions(expr, params, obs))


def least_squares_fit(expr: ModelExpression, obs: ObservationSet, start: Mapping[str, float],
                      space: ParameterSpace | None = None) -> dict:
    """
    Iterative least-squares minimizer of chi-squared, used to cross-check the grid MAP.

    With ``space`` the search is confined to the grid box.
    """
    names = list(start)
    bounds = (-np.inf, np.inf)
    if space is not None:
        bounds = ([space.axis(n).lower for n in names], [space.axis(n).upper for n in names])
    values, sigmas = obs.values, obs.sigmas

    def standardized_residuals(x):
        params = dict(zip(names, x))
        return (values - np.asarray(predictions(expr, params, obs), dtype=float)) / sigmas

    result = optimize.least_squares(standardized_residuals, x0=[start[n] for n in names], bounds=bounds,
                                    xtol=1e-12, ftol=1e-12, gtol=1e-12)
    logger.debug("Least-squares fit: %s after %d evaluations", result.message, result.nfev)
    return dict(zip(names, (float(v) for v in result.x)))


def grid_frame(grid: PosteriorGrid) -> pd.DataFrame:
    """One row per node in C order: parameter values, then log_density and density."""
    columns = {name: values.ravel(order="C") for name, values in grid.space.mesh().items()}
    columns["log_density"] = grid.log_density.ravel(order="C")
    columns["density"] = grid.density.ravel(order="C")
    return pd.DataFrame(columns)


def dump_grid_csv(grid: PosteriorGrid, path) -> None:
    grid_frame(grid).to_csv(path, index=False, float_format="%.17g", encoding="utf-8")
    logger.info("Grid with %d nodes written to %s", grid.log_density.size, path)
