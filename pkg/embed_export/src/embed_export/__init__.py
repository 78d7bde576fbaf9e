"""embed-export: turn a phrase dataset into an embedding TSV store."""

from .export import ExportConfig, export, read_phrases, stub_vector

__version__ = "0.1.0"

__all__ = ["ExportConfig", "export", "read_phrases", "stub_vector"]
