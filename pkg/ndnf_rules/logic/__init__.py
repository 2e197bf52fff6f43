"""
Logic module for the neural DNF toolkit.

This module contains the logic-program model, translation from discretised models and rule emission.
"""
