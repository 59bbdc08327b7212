"""
Utils package - serialization and file helpers for hebbian-duality
"""
from .helpers import (
    atomic_write_text,
    canonical_json,
    format_float,
    format_metric,
    frame_to_csv,
    load_json,
    to_plain,
    write_csv,
    write_json,
)

__all__ = [
    'atomic_write_text',
    'canonical_json',
    'format_float',
    'format_metric',
    'frame_to_csv',
    'load_json',
    'to_plain',
    'write_csv',
    'write_json',
]
