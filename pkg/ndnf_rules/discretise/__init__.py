"""
Discretisation module for the neural DNF toolkit.

This module contains thresholding, exclusion-set search and node disentanglement.
"""
