"""
Observation errors and the joint density of a set of observations.

The error law is the Gaussian; :class:`ErrorLaw` is the seam for another density. All
likelihood work happens in log space because the joint density of a few dozen
observations already underflows.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from scipy import special

from src.errors import (InvalidErrorScaleError, InvalidObservationError, InvalidPredictionError,
                        InvertedIntervalError)

logger = logging.getLogger(__name__)

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

VALUE_COLUMN = "value"
SIGMA_COLUMN = "sigma"


class ErrorLaw(ABC):

    @abstractmethod
    def log_density(self, delta):
        """Log density of an error ``delta``; accepts floats or numpy arrays."""

    @abstractmethod
    def interval_probability(self, lower: float, upper: float) -> float:
        """Probability that the error lies between ``lower`` and ``upper``."""


@dataclass(frozen=True)
class GaussianError(ErrorLaw):
    sigma: float

    def __post_init__(self):
        sigma = self.sigma
        if isinstance(sigma, bool) or not isinstance(sigma, (int, float)) or not math.isfinite(sigma) or sigma <= 0:
            raise InvalidErrorScaleError(f"sigma must be a positive finite number, got {sigma!r}")
        object.__setattr__(self, "sigma", float(sigma))

    @property
    def log_normalizer(self) -> float:
        return -_LOG_SQRT_2PI - math.log(self.sigma)

    def standardize(self, delta):
        return delta / self.sigma

    def log_density(self, delta):
        z = self.standardize(delta)
        return self.log_normalizer - 0.5 * (z * z)

    def interval_probability(self, lower: float, upper: float) -> float:
        a, b = lower / self.sigma, upper / self.sigma
        # Both bounds in the upper tail: difference of survival functions keeps the digits.
        if a > 0:
            probability = special.ndtr(-a) - special.ndtr(-b)
        else:
            probability = special.ndtr(b) - special.ndtr(a)
        return float(min(max(probability, 0.0), 1.0))


@dataclass(frozen=True)
class ObservationRecord:
    covariates: Mapping[str, float]
    value: float
    error: GaussianError

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise InvalidObservationError(f"Observed value must be finite, got {self.value!r}")
        covariates = {}
        for name, covariate in dict(self.covariates).items():
            if not math.isfinite(covariate):
                raise InvalidObservationError(f"Covariate '{name}' must be finite, got {covariate!r}")
            covariates[name] = float(covariate)
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "covariates", MappingProxyType(covariates))


@dataclass(frozen=True)
class ObservationSet:
    records: tuple = field(default_factory=tuple)

    def __post_init__(self):
        records = tuple(self.records)
        if not records:
            raise InvalidObservationError("An observation set needs at least one record")
        names = set(records[0].covariates)
        for index, record in enumerate(records):
            if set(record.covariates) != names:
                raise InvalidObservationError(
                    f"Record {index} has covariates {sorted(record.covariates)}, expected {sorted(names)}")
        object.__setattr__(self, "records", records)

    def __len__(self):
        return len(self.records)

    @property
    def covariate_names(self) -> frozenset:
        return frozenset(self.records[0].covariates)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([r.error.sigma for r in self.records])

    @classmethod
    def from_arrays(cls, values: Sequence[float], sigmas: Sequence[float], **covariates) -> "ObservationSet":
        if len(values) != len(sigmas) or any(len(c) != len(values) for c in covariates.values()):
            raise InvalidObservationError("values, sigmas and covariate columns must have the same length")
        return cls(tuple(ObservationRecord({name: float(column[i]) for name, column in covariates.items()},
                                           float(values[i]), GaussianError(float(sigmas[i])))
                         for i in range(len(values))))

    @classmethod
    def from_csv(cls, path: str) -> "ObservationSet":
        """Reads ``covariate...,value,sigma`` rows (UTF-8, decimal point, no thousands separators)."""
        try:
            frame = pd.read_csv(path, encoding="utf-8", thousands=None)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise InvalidObservationError(f"Could not read observations from {path}: {e}")

        frame.columns = [str(c).strip() for c in frame.columns]
        missing = {VALUE_COLUMN, SIGMA_COLUMN} - set(frame.columns)
        if missing:
            raise InvalidObservationError(f"{path} is missing column(s) {sorted(missing)}")
        try:
            frame = frame.apply(pd.to_numeric, errors="raise")
        except (ValueError, TypeError) as e:
            raise InvalidObservationError(f"{path} has a non-numeric entry: {e}")

        covariate_names = [c for c in frame.columns if c not in (VALUE_COLUMN, SIGMA_COLUMN)]
        observations = cls.from_arrays(frame[VALUE_COLUMN].to_numpy(float),
                                       frame[SIGMA_COLUMN].to_numpy(float),
                                       **{name: frame[name].to_numpy(float) for name in covariate_names})
        logger.info("Loaded %d observations with covariates %s from %s", len(observations), covariate_names, path)
        return observations

    def merge(self, other: "ObservationSet") -> "ObservationSet":
        return ObservationSet(self.records + other.records)


def log_phi_density(delta, err: ErrorLaw):
    return err.log_density(delta)


def phi_density(delta, err: ErrorLaw):
    return np.exp(log_phi_density(delta, err)) if isinstance(delta, np.ndarray) \
        else math.exp(log_phi_density(delta, err))


def interval_probability(lower: float, upper: float, err: ErrorLaw) -> float:
    if math.isnan(lower) or math.isnan(upper) or lower > upper:
        raise InvertedIntervalError(f"Interval bounds must satisfy D <= D', got ({lower!r}, {upper!r})")
    if lower == upper:
        return 0.0
    return err.interval_probability(lower, upper)


def _checked_predictions(obs: ObservationSet, predictions: Sequence) -> list:
    if len(predictions) != len(obs):
        raise InvalidPredictionError(f"Got {len(predictions)} predictions for {len(obs)} observations")
    checked = []
    for index, prediction in enumerate(predictions):
        prediction = np.asarray(prediction, dtype=float)
        finite = np.isfinite(prediction)
        if not finite.all():
            flat_index = int(np.argmin(finite.ravel())) if prediction.ndim else None
            raise InvalidPredictionError(f"Prediction for observation {index} is not finite",
                                         index=index, flat_index=flat_index)
        checked.append(prediction)
    return checked


def residuals(obs: ObservationSet, predictions: Sequence) -> list:
    return [record.value - prediction for record, prediction in zip(obs.records, _checked_predictions(obs, predictions))]


def standardized_square_sum(obs: ObservationSet, predictions: Sequence):
    """Sum of squared standardized residuals, accumulated in record order."""
    total = 0.0
    for record, delta in zip(obs.records, residuals(obs, predictions)):
        z = record.error.standardize(delta)
        total = total + z * z
    return total if isinstance(total, np.ndarray) and total.ndim else float(total)


def log_omega(obs: ObservationSet, predictions: Sequence):
    """
    Log of the joint density of all observations given the predictions.

    Observations are independent, so the log density is the sum over records; with
    Gaussian errors it is split as (sum of log normalizers) - chi^2 / 2, which keeps it an
    exactly monotone function of the chi-squared statistic.
    """
    log_normalizer = math.fsum(record.error.log_normalizer for record in obs.records)
    return log_normalizer - 0.5 * standardized_square_sum(obs, predictions)
