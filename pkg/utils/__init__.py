"""Utility modules shared across tripdiff packages."""

from .storage import load_json, save_json, save_csv

__all__ = ["load_json", "save_json", "save_csv"]
