import json
import logging
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunResult:
    status: int
    report: dict


def rational_pair(value: Fraction | float) -> list:
    """Exact rational as [numerator, denominator]; infinity is [1, 0]."""
    if isinstance(value, float) and math.isinf(value):
        return [1, 0]
    value = Fraction(value)
    return [value.numerator, value.denominator]


def jsonable(value):
    # JSON has no infinities; floats otherwise keep their full round-trip repr.
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def write_report(report: dict, output_path: Path | None = None) -> None:
    text = json.dumps(jsonable(report), indent=4, allow_nan=False)
    if output_path is None:
        sys.stdout.write(text + "\n")
        return
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, 'w', encoding='utf-8') as json_file:
        json_file.write(text + "\n")
    logger.info("Report saved to %s", output_path)
