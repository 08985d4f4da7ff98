"""Paths to the bundled desk-scale corpus (treebank, rules, KB, QA suite)."""

from __future__ import annotations

from importlib.resources import files


def data_path(name: str) -> str:
    """Absolute path of a bundled data file, e.g. ``minitreebank.trees``."""
    return str(files("paralat").joinpath("data", name))
