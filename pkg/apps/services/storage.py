"""Report files: canonical JSON with sorted keys, timings kept separately."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from pydantic import BaseModel, ValidationError

from ..core.config import settings
from ..core.errors import InputError
from ..core.schemas import PipelineConfig

logger = logging.getLogger(__name__)


def dump_report(report: Union[BaseModel, Dict[str, Any]]) -> str:
    """Canonical text of a report; identical reports give identical bytes."""
    data = report.model_dump(mode="json") if isinstance(report, BaseModel) else report
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


class ReportStorage:
    """Writes reports into one output directory."""

    def __init__(self, output_dir: Optional[Union[str, Path]] = None):
        self.output_dir = Path(output_dir or settings.output_dir)

    def write(self, name: str, report: Union[BaseModel, Dict[str, Any]]) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / f"{name}.json"
        try:
            path.write_text(dump_report(report))
        except OSError as e:
            logger.error(f"Failed to write report {path}: {e}")
            raise
        logger.info(f"Wrote {path}")
        return path

    def write_timings(self, timings: Dict[str, float]) -> Path:
        rounded = {k: round(v, 3) for k, v in timings.items()}
        return self.write("timings", rounded)

    def matrices_dir(self) -> Path:
        path = self.output_dir / "matrices"
        path.mkdir(parents=True, exist_ok=True)
        return path


def load_pipeline_config(path: Union[str, Path]) -> PipelineConfig:
    """PipelineConfig from a YAML or JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"cannot read config {path}: {e}")
    try:
        data = json.loads(text) if path.suffix.lower() == ".json" else yaml.safe_load(text)
        return PipelineConfig.model_validate(data or {})
    except (ValidationError, yaml.YAMLError, json.JSONDecodeError) as e:
        raise InputError(f"invalid pipeline config {path}: {e}")
