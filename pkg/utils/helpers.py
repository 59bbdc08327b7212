"""
Helper utilities for hebbian-duality: canonical JSON, atomic file writes, CSV views
"""
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd


def format_float(value: float) -> str:
    """
    Render a float with '.17g': at most 17 significant digits, trailing zeros dropped, exact on reload.

    Args:
        value: Number to render

    Returns:
        JSON token; non-finite values become null
    """
    value = float(value)
    if not math.isfinite(value):
        return "null"
    if value == 0.0:
        return "0"  # also for -0.0, which would not survive a reload
    return format(value, '.17g')


def to_plain(value: Any) -> Any:
    """
    Convert numpy scalars / arrays (recursively) into plain Python values.

    Args:
        value: Arbitrary nested structure

    Returns:
        Structure made of dict, list, str, int, float, bool and None only
    """
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _is_scalar(value: Any) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def _dump(value: Any, level: int, indent: int) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)

    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_dump(v, level + 1, indent)}"
                 for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        # numeric rows stay on one line
        if all(_is_scalar(v) for v in value):
            return "[" + ", ".join(_dump(v, level + 1, indent) for v in value) + "]"
        items = [pad + _dump(v, level + 1, indent) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(obj: Any, indent: int = 2) -> str:
    """
    Deterministic JSON text: insertion key order, 17-digit floats, no timestamps.

    Args:
        obj: Structure to serialize (numpy values allowed)
        indent: Spaces per nesting level

    Returns:
        JSON document terminated by a newline
    """
    return _dump(to_plain(obj), 0, indent) + "\n"


def atomic_write_text(path, text: str) -> Path:
    """
    Write text to path through a temporary file and an atomic rename.

    Args:
        path: Destination file
        text: Full file contents (written without newline translation)

    Returns:
        The destination path
    """
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def write_json(path, obj: Any) -> Path:
    return atomic_write_text(path, canonical_json(obj))


def load_json(path) -> Dict:
    """
    Read a JSON object from disk.

    Raises:
        OSError: file cannot be read
        ValueError: contents are not a JSON object
    """
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object at top level")
    return data


def frame_to_csv(rows: List[Dict[str, Any]], columns: Sequence[str]) -> str:
    """
    RFC-4180 CSV (CRLF line endings, minimal quoting) with empty cells for missing values.

    Args:
        rows: One dict per row; missing keys and None become empty cells
        columns: Header, in output order

    Returns:
        CSV text
    """
    frame = pd.DataFrame([{c: to_plain(row.get(c)) for c in columns} for row in rows], columns=list(columns))
    text = frame.to_csv(index=False, lineterminator="\r\n", na_rep="", float_format="%.17g")
    return text


def write_csv(path, rows: List[Dict[str, Any]], columns: Sequence[str]) -> Path:
    return atomic_write_text(path, frame_to_csv(rows, columns))


def format_metric(value: Optional[float]) -> str:
    """Short human-readable number for console tables."""
    if value is None:
        return "n/a"
    value = float(value)
    if not math.isfinite(value):
        return str(value)
    if value == 0.0 or 1e-3 <= abs(value) < 1e4:
        return f"{value:.4f}"
    return f"{value:.3e}"
