"""
Evaluation module for the neural DNF toolkit.

This module contains truth-table oracles, F1 metrics and report rendering.
"""
