"""
Artifact writer: JSON reports and CSV tables under an output directory.
"""

import os
from pathlib import Path
from typing import Any, List, Optional, Union

import pandas as pd
from loguru import logger
from pydantic import BaseModel

from src.utils.errors import ArtifactError
from src.utils.helpers import format_output


OUTPUT_DIR_ENV = "SCBO_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "output"


class ArtifactWriter:
    """Writes experiment artifacts relative to a base directory."""

    def __init__(self, base_path: Optional[str] = None):
        """
        Initialize artifact writer.

        Args:
            base_path: Output directory; defaults to $SCBO_OUTPUT_DIR, then ./output
        """
        self.base_path = Path(base_path or os.getenv(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR)
        self.written: List[Path] = []
        logger.debug(f"Artifact writer initialized with base path: {self.base_path}")

    def _target(self, file_path: str) -> Path:
        full_path = self.base_path / file_path
        try:
            full_path.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ArtifactError(f"Cannot create output directory {full_path.parent}: {e}") from e
        return full_path

    def write_text(self, file_path: str, content: str) -> Path:
        """
        Write text content to a file.

        Args:
            file_path: Path relative to base_path
            content: Text to write

        Returns:
            Full path of the written file
        """
        full_path = self._target(file_path)
        try:
            full_path.write_text(content, encoding="utf-8")
        except OSError as e:
            raise ArtifactError(f"Cannot write {full_path}: {e}") from e
        logger.info(f"Wrote {full_path}")
        self.written.append(full_path)
        return full_path

    def write_json(self, file_path: str, data: Union[BaseModel, Any]) -> Path:
        """Write a pydantic model or plain data as indented JSON."""
        if isinstance(data, BaseModel):
            content = data.model_dump_json(indent=2, by_alias=True)
        else:
            content = format_output(data, "json")
        return self.write_text(file_path, content + "\n")

    def write_csv(self, file_path: str, frame: pd.DataFrame) -> Path:
        """Write a DataFrame as CSV without the index."""
        full_path = self._target(file_path)
        try:
            frame.to_csv(full_path, index=False)
        except OSError as e:
            raise ArtifactError(f"Cannot write {full_path}: {e}") from e
        logger.info(f"Wrote {full_path} ({len(frame)} rows)")
        self.written.append(full_path)
        return full_path
