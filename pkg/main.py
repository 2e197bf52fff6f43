"""
Neural DNF rule extraction - command line entry point.

Trains neural DNF models on tabular data, discretises them by thresholding or
by disentangling their conjunctive nodes, and emits the learned rules as
logic programs. See README.md for the subcommands.
"""

import sys

from ndnf_rules.main import main

if __name__ == "__main__":
    sys.exit(main())
