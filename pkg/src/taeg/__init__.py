"""Narrative consolidation with a Temporal Alignment Event Graph (TAEG)."""

__version__ = "0.1.0"
