"""
Utilities module for the neural DNF toolkit.

This module contains helper functions used across the pipeline.
"""
