#!/usr/bin/env python3
"""
mpstab - stability, intersection and parent Hamiltonians of MPS tensors

Workflow:
1. Load a tensor file (or a packaged example such as w_state)
2. Certify injectivity, nilpotency and left/right stability
3. Check the intersection property over a range of lengths
4. Compare parent-Hamiltonian ground spaces with the MPS subspaces
5. Write the results as a JSON report

Run `python main.py --help` for the subcommands.
"""

import sys

from cli import main

if __name__ == "__main__":
    sys.exit(main())
