"""Output directory manager for synclab commands."""

import json
import platform
from pathlib import Path
from datetime import datetime
from typing import Any, Dict, Optional

import numpy
import pandas as pd
import scipy


def dumps_json(payload: Any) -> str:
    """Deterministic JSON text (sorted keys, 2-space indent, trailing newline)."""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=True) + "\n"


class OutputManager:
    """Manages output directory structure for commands."""

    def __init__(self, base_output_dir: str = "output"):
        """Initialize output manager.

        Args:
            base_output_dir: Base directory for all outputs (default: "output")
        """
        self.base_output_dir = Path(base_output_dir)

    def get_output_path(self, command: str, filename: str, subfolder: Optional[str] = "") -> Path:
        """Get the full output path for a file.

        Args:
            command: Name of the command generating the output
            filename: Name of the output file
            subfolder: Optional subfolder name (empty string means no subfolder,
                None means a timestamped subfolder)

        Returns:
            Full path for the output file
        """
        if subfolder == "":
            output_dir = self.base_output_dir / command
        else:
            if subfolder is None:
                subfolder = datetime.now().strftime("%Y-%m-%d-%H-%M-%S")
            output_dir = self.base_output_dir / command / subfolder

        output_dir.mkdir(parents=True, exist_ok=True)

        return output_dir / filename

    def write_json(self, command: str, filename: str, payload: Any) -> Path:
        path = self.get_output_path(command, filename)
        path.write_text(dumps_json(payload), encoding="utf-8")
        return path

    def write_csv(self, command: str, filename: str, frame: pd.DataFrame) -> Path:
        path = self.get_output_path(command, filename)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        return path

    def write_run_metadata(self, command: str, started: datetime, extra: Dict[str, Any]) -> Path:
        """Side-file for everything that legitimately differs between reruns."""
        finished = datetime.now()
        payload = {
            "command": command,
            "started": started.isoformat(timespec="seconds"),
            "finished": finished.isoformat(timespec="seconds"),
            "wall_seconds": (finished - started).total_seconds(),
            "python": platform.python_version(),
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
            **extra,
        }
        return self.write_json(command, "run_meta.json", payload)
