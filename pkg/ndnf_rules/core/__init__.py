"""
Core module for the neural DNF toolkit.

This module contains the semi-symbolic node math and threshold predicate invention.
"""
