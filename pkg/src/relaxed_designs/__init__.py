"""Relaxed-seed random circuits: bounds, moment operators and design certification."""

__version__ = "0.1.0"
