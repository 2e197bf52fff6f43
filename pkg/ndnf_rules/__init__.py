"""
Neural DNF rule extraction toolkit.

This package trains neural Disjunctive Normal Form classifiers built from
semi-symbolic nodes and translates them into bivalent logic programs by:
1. Training conjunctive/disjunctive semi-symbolic layers with scheduled delta
2. Discretising weights by thresholding or by disentangling conjunctive nodes
3. Verifying every discretisation against exhaustive soft-valued truth tables
4. Emitting ASP-style rule files and compactness/F1 reports
"""

__version__ = "0.1.0"
