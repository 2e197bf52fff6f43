"""
Data module for the neural DNF toolkit.

This module contains dataset loaders, the boolean-network generator and checkpoint persistence.
"""
