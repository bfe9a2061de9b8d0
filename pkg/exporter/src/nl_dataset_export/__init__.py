"""Exporter for public node-classification benchmarks.

Materializes each graph into the tabular ``nodes.csv`` / ``edges.csv``
format consumed by the neurochaos package, plus a manifest recording the
counts, the directedness convention, and file checksums.
"""

from .export import DATASET_NAMES, ExportManifest, RawGraph, export_dataset

__version__ = "0.1.0"
