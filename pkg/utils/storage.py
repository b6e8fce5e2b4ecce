"""JSON and CSV file storage utilities."""

import json
import os
from typing import Any

import pandas as pd

# Fixed float rendering keeps numeric outputs byte-identical across runs
CSV_FLOAT_FORMAT = "%.12g"


def ensure_parent_dir(filepath: str) -> None:
    """Ensure the directory holding ``filepath`` exists."""
    parent = os.path.dirname(filepath)
    if parent:
        os.makedirs(parent, exist_ok=True)


def load_json(filepath: str, default: Any = None) -> Any:
    """Load JSON data from a file.

    Args:
        filepath: Path to the JSON file.
        default: Default value if file doesn't exist or is invalid.

    Returns:
        Loaded JSON data or default value.
    """
    if default is None:
        default = {}

    try:
        with open(filepath, "r", encoding="utf-8") as f:
            return json.load(f)
    except (FileNotFoundError, json.JSONDecodeError):
        return default


def save_json(filepath: str, data: Any) -> None:
    """Save data to a JSON file, creating its directory if needed.

    Args:
        filepath: Path to the JSON file.
        data: Data to save.
    """
    ensure_parent_dir(filepath)
    with open(filepath, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")


def save_csv(filepath: str, frame: pd.DataFrame) -> None:
    """Save a data frame as comma-delimited UTF-8 CSV without the index.

    Args:
        filepath: Path to the CSV file.
        frame: Data to save.
    """
    ensure_parent_dir(filepath)
    frame.to_csv(filepath, index=False, float_format=CSV_FLOAT_FORMAT, encoding="utf-8")
