"""Artifact output."""

from .artifacts import ArtifactWriter

__all__ = ["ArtifactWriter"]
