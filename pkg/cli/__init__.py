"""Command-line interface: run configuration, commands, artifacts and the reproduce battery."""

from .config_file import Command, RunConfig, load_run_config, parse_run_config
from .main import build_parser, main

__all__ = [
    "Command",
    "RunConfig",
    "load_run_config",
    "parse_run_config",
    "build_parser",
    "main",
]
