from pathlib import Path
from typing import Any, Dict, Literal

import yaml
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.config import OUTPUT_FORMATS


def load_config_dict(path: str) -> Dict:
    with open(path, 'r', encoding='utf-8') as config_file:
        return yaml.full_load(config_file) or {}


def conf_str_to_list(conf_str, convert_type):

    if type(conf_str) == str:
        conf_out = conf_str.split(",")
        if convert_type == str:
            conf_out = [i.strip() for i in conf_out if i.strip()]
        else:
            conf_out = [convert_type(i) for i in conf_out]
    elif isinstance(conf_str, (list, tuple)):
        conf_out = [convert_type(i) for i in conf_str]
    else:
        conf_out = [conf_str]

    return conf_out


class GenericConfig:

    def __init__(self, raw: Dict, root: str = '<root>'):
        self.raw = raw or {}
        self.root = root

    def get(self, key: str, default=None):
        return self.raw.get(key, default)

    def get_gc(self, key: str):
        return GenericConfig(self.raw.get(key) or {}, self.root + "." + key)


class RunConfig(BaseModel):
    """
    Everything one CLI invocation needs: which subcommand, the input files it reads,
    where the report goes and the subcommand-specific options.
    """
    model_config = ConfigDict(frozen=True)

    subcommand: Literal["odds", "partition", "fit", "sharper"]
    inputs: Dict[str, Path] = {}
    output_path: Path | None = None
    output_format: Literal["json", "csv"] = "json"
    options: Dict[str, Any] = {}

    @field_validator("inputs")
    @classmethod
    def inputs_exist(cls, inputs: Dict[str, Path]) -> Dict[str, Path]:
        for name, path in inputs.items():
            if not path.is_file():
                raise ValueError(f"input '{name}' does not exist: {path}")
        return inputs

    @model_validator(mode="after")
    def format_supported(self) -> "RunConfig":
        if self.output_format not in OUTPUT_FORMATS[self.subcommand]:
            raise ValueError(f"output format '{self.output_format}' is not available for '{self.subcommand}'")
        return self

    def option(self, key: str, default=None):
        value = self.options.get(key)
        return default if value is None else value
