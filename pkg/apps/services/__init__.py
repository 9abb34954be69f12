"""Pipeline orchestration and report storage."""

from .pipeline import PipelineRunner, check_invariance, flip_experiment, run_pipeline
from .storage import ReportStorage, dump_report, load_pipeline_config

__all__ = [
    "PipelineRunner",
    "ReportStorage",
    "check_invariance",
    "dump_report",
    "flip_experiment",
    "load_pipeline_config",
    "run_pipeline",
]
