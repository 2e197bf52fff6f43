"""
Configuration module for the neural DNF toolkit.

This module contains environment settings, the CLI parser and validated config models.
"""
