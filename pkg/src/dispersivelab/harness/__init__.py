"""Reproducible experiment driver: configs, suites, records, CLI."""

from .config import (ExperimentConfig, config_hash, default_config,
                     load_config, with_overrides)
from .records import (CaseResult, ResultRecord, write_case_csv,
                      write_record, write_summary_json)
from .suites import (SUITES, run_admissible_suite, run_decay_suite,
                     run_dunkl_suite, run_strichartz_suite,
                     run_wellposed_suite)

__all__ = [
    "ExperimentConfig", "config_hash", "default_config", "load_config",
    "with_overrides", "CaseResult", "ResultRecord", "write_case_csv",
    "write_record", "write_summary_json", "SUITES", "run_decay_suite",
    "run_strichartz_suite", "run_wellposed_suite", "run_dunkl_suite",
    "run_admissible_suite",
]
