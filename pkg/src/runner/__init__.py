"""Experiment documents and the command runner."""

from .experiment_runner import ExperimentRunner
from .schema import ArtifactEnvelope, Command, Subcommand, parse_section

__all__ = ["ArtifactEnvelope", "Command", "ExperimentRunner", "Subcommand", "parse_section"]
