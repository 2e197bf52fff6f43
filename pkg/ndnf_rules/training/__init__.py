"""
Training module for the neural DNF toolkit.

This module contains the two-layer model, losses and the SGD training loop.
"""
