import json
import logging
from typing import Dict, List

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.case_partition import CasePartition
from src.errors import InvalidParameterSpaceError, InvalidPartitionError, InvalidSystemError
from src.hypothesis_core import CausalSystem
from src.model_expr import ModelExpression, ParameterSpace, parse

logger = logging.getLogger(__name__)


class CauseEntry(BaseModel):
    label: str
    prior: float


class SystemFile(BaseModel):
    causes: List[CauseEntry]
    events: Dict[str, List[float]] = {}


class PartitionFile(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    m: int = Field(strict=True)
    n: int = Field(strict=True)
    m_p: int = Field(alias="m'", strict=True)
    n_p: int = Field(alias="n'", strict=True)
    m_pp: int = Field(0, alias="m''", strict=True)
    n_pp: int = Field(0, alias="n''", strict=True)


class AxisEntry(BaseModel):
    name: str
    min: float
    max: float
    points: int = Field(strict=True)


class ModelSpecFile(BaseModel):
    formula: str
    parameters: List[AxisEntry]

    @field_validator("parameters")
    @classmethod
    def at_least_one(cls, parameters: List[AxisEntry]) -> List[AxisEntry]:
        if not parameters:
            raise ValueError("at least one parameter is required")
        return parameters


def _read_json(path: str) -> dict:
    with open(path, 'r', encoding='utf-8') as json_file:
        return json.load(json_file)


def _validation_message(path: str, error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{path}: {location}: {first['msg']}"


def load_causal_system(path: str) -> CausalSystem:
    try:
        spec = SystemFile.model_validate(_read_json(path))
    except ValidationError as e:
        raise InvalidSystemError(_validation_message(path, e))
    system = CausalSystem(labels=[c.label for c in spec.causes],
                          priors=[c.prior for c in spec.causes],
                          likelihoods=spec.events)
    logger.info("Loaded %d causes and %d events from %s", len(system.labels), len(system.likelihoods), path)
    return system


def load_partition(path: str) -> CasePartition:
    try:
        spec = PartitionFile.model_validate(_read_json(path))
    except ValidationError as e:
        raise InvalidPartitionError(_validation_message(path, e))
    return CasePartition(spec.m, spec.n, spec.m_p, spec.n_p, spec.m_pp, spec.n_pp)


def load_model_spec(path: str) -> tuple[ModelExpression, ParameterSpace]:
    """Model formula and the grid it is evaluated on; names not listed as parameters are covariates."""
    try:
        spec = ModelSpecFile.model_validate(_read_json(path))
    except ValidationError as e:
        raise InvalidParameterSpaceError(_validation_message(path, e))
    expr = parse(spec.formula)
    space = ParameterSpace.from_dicts([axis.model_dump() for axis in spec.parameters])
    logger.info("Model '%s' with parameters %s and covariates %s", expr, list(space.names),
                sorted(expr.covariate_names(space.names)))
    return expr, space
