"""
Experiments module for the neural DNF toolkit.

This module contains multi-seed experiment orchestration and the disentanglement benchmark.
"""
